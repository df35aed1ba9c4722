"""Configuration module for the mfhd significance-testing engine."""
import os
from typing import Optional
from dataclasses import dataclass, field
from dotenv import load_dotenv

load_dotenv()


def _default_threads() -> int:
    """Number of logical cores, at least one."""
    return max(1, os.cpu_count() or 1)


@dataclass
class SolverConfig:
    """Coordinate-descent solver and tuning-parameter search configuration."""
    tol: float = 1e-7  # max coefficient change between sweeps
    max_iter: int = 10000  # max sweeps
    cv_folds: int = 5
    cv_grid_size: int = 20
    scad_a: float = 3.7
    lla_steps: int = 5  # local linear approximation rounds for SCAD

    @classmethod
    def from_env(cls) -> "SolverConfig":
        """Load solver config from environment variables."""
        return cls(
            tol=float(os.getenv("MFHD_SOLVER_TOL", "1e-7")),
            max_iter=int(os.getenv("MFHD_SOLVER_MAX_ITER", "10000")),
            cv_folds=int(os.getenv("MFHD_CV_FOLDS", "5")),
            cv_grid_size=int(os.getenv("MFHD_CV_GRID_SIZE", "20")),
            scad_a=float(os.getenv("MFHD_SCAD_A", "3.7")),
            lla_steps=int(os.getenv("MFHD_LLA_STEPS", "5")),
        )


@dataclass
class AppConfig:
    """Application configuration."""
    solver: SolverConfig = field(default_factory=SolverConfig)
    log_level: str = "INFO"
    threads: int = field(default_factory=_default_threads)
    threads_from_env: bool = False  # MFHD_THREADS was set and wins over --threads
    default_h: int = 5
    seed: int = 20240101
    api_max_upload_mb: int = 200

    @classmethod
    def from_env(cls) -> "AppConfig":
        """Load full config from environment variables."""
        threads_env: Optional[str] = os.getenv("MFHD_THREADS")
        return cls(
            solver=SolverConfig.from_env(),
            log_level=os.getenv("LOG_LEVEL", "INFO"),
            threads=int(threads_env) if threads_env else _default_threads(),
            threads_from_env=bool(threads_env),
            default_h=int(os.getenv("MFHD_DEFAULT_H", "5")),
            seed=int(os.getenv("MFHD_SEED", "20240101")),
            api_max_upload_mb=int(os.getenv("MFHD_API_MAX_UPLOAD_MB", "200")),
        )

    def resolve_threads(self, requested: Optional[int]) -> int:
        """Worker count for a run: MFHD_THREADS, then the request, then the default."""
        if self.threads_from_env or requested is None:
            return max(1, self.threads)
        return max(1, requested)


# Global config instance
config = AppConfig.from_env()

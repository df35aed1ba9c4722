"""Simulation designs with AR(1) Gaussian predictors.

Random numbers come from the counter-based Philox generator; replication r of
a design with seed s uses the stream SeedSequence(s, spawn_key=(r,)), so
replications are independent of each other and of the order they run in.
Normal variates are inverse-CDF transforms of open-interval uniforms.
"""
import logging
from dataclasses import dataclass, field
from typing import Optional, Set, Tuple, Union

import numpy as np
from scipy import special

from errors import DomainError, InputError

logger = logging.getLogger(__name__)

MODELS = ("I", "II", "III", "IV", "V")
_UNIFORM_BITS = 53

SeedLike = Union[int, np.random.Generator]


def make_rng(seed: int, stream: Optional[int] = None) -> np.random.Generator:
    """Philox generator for a seed, optionally on a numbered sub-stream."""
    if stream is None:
        sequence = np.random.SeedSequence(seed)
    else:
        sequence = np.random.SeedSequence(seed, spawn_key=(stream,))
    return np.random.Generator(np.random.Philox(sequence))


def _as_rng(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return make_rng(int(seed))


def standard_normal(rng: np.random.Generator, size) -> np.ndarray:
    """N(0, 1) draws by inverting the normal CDF at uniforms in (0, 1)."""
    k = rng.integers(0, 2 ** _UNIFORM_BITS, size=size, dtype=np.int64)
    u = (k + 0.5) / 2.0 ** _UNIFORM_BITS
    return special.ndtri(u)


@dataclass(frozen=True)
class SimDesign:
    """One simulation setting."""
    model: str = "I"
    n: int = 200
    p: int = 200
    rho: float = 0.5
    sparsity: int = 4  # models IV and V
    seed: int = 42

    def __post_init__(self):
        if self.model not in MODELS:
            raise DomainError(f"Unknown model '{self.model}', expected one of {MODELS}")
        if self.n < 1 or self.p < 1:
            raise DomainError(f"n and p must be positive, got n={self.n}, p={self.p}")
        if not abs(self.rho) < 1:
            raise DomainError(f"|rho| must be < 1, got {self.rho}")
        if self.model in ("IV", "V") and not 1 <= self.sparsity <= self.p:
            raise DomainError(f"sparsity must lie in 1..p, got {self.sparsity}")
        if self.model == "III" and self.p < 3:
            raise DomainError("model III needs p >= 3")
        if self.model == "II" and self.p < 4:
            raise DomainError("model II needs p >= 4")
        if self.model == "V" and self.p < self.sparsity + 2:
            raise DomainError(f"model V needs p >= sparsity + 2, got p={self.p}")


@dataclass
class LabeledData:
    """Simulated predictors and response with the true active set (1-based)."""
    X: np.ndarray
    y: np.ndarray
    active: Set[int] = field(default_factory=set)


def gen_ar1_gaussian(n: int, p: int, rho: float = 0.5, seed: SeedLike = 0) -> np.ndarray:
    """Rows i.i.d. N(0, Sigma) with Sigma_ij = rho^|i-j|.

    X_1 = e_1 and X_k = rho X_{k-1} + sqrt(1 - rho^2) e_k.
    """
    if not abs(rho) < 1:
        raise DomainError(f"|rho| must be < 1, got {rho}")
    rng = _as_rng(seed)
    eps = standard_normal(rng, (n, p))
    X = np.empty((n, p))
    X[:, 0] = eps[:, 0]
    innovation = np.sqrt(1.0 - rho ** 2)
    for k in range(1, p):
        X[:, k] = rho * X[:, k - 1] + innovation * eps[:, k]
    return X


def active_set(model: str, p: int, sparsity: int = 4) -> Set[int]:
    """True active coordinates (1-based) of a model."""
    if model == "I":
        return {1, 2}
    if model == "II":
        return {1, 2, 3, 4}
    if model == "III":
        return {1, 3, p}
    if model == "IV":
        return set(range(1, sparsity + 1))
    if model == "V":
        return set(range(1, sparsity + 1)) | {p - 2, p - 1}
    raise DomainError(f"Unknown model '{model}'")


def gen_response(
    model: str,
    X: np.ndarray,
    sparsity: int = 4,
    seed: SeedLike = 0,
    noise: Optional[np.ndarray] = None,
) -> Tuple[np.ndarray, Set[int]]:
    """Response of a simulation model and its active set.

    noise replaces the N(0, 1) errors when given, e.g. zeros for a noiseless
    check.
    """
    X = np.asarray(X, dtype=float)
    n, p = X.shape
    if model == "V" and p < sparsity + 2:
        raise InputError(f"model V needs p >= sparsity + 2, got p={p}, sparsity={sparsity}")
    if model in ("IV", "V") and not 1 <= sparsity <= p:
        raise InputError(f"sparsity must lie in 1..{p}, got {sparsity}")
    eps = standard_normal(_as_rng(seed), n) if noise is None else np.broadcast_to(noise, (n,)).astype(float)

    # columns below are 0-based: X[:, 0] is X_1
    if model == "I":
        y = X[:, 0] + X[:, 1] + eps
    elif model == "II":
        y = (X[:, 0] + X[:, 1]) / (0.5 + (1.5 + X[:, 2] + X[:, 3]) ** 2) + 0.1 * eps
    elif model == "III":
        y = 3.0 * np.sin(X[:, 0]) + 3.0 * np.sin(X[:, p - 1]) + np.exp(-2.0 * X[:, 2]) * eps
    elif model == "IV":
        y = X[:, :sparsity].sum(axis=1) + eps
    elif model == "V":
        y = X[:, :sparsity].sum(axis=1) / (0.5 + (1.5 + X[:, p - 2] + X[:, p - 3]) ** 2) + 0.1 * eps
    else:
        raise DomainError(f"Unknown model '{model}'")
    return y, active_set(model, p, sparsity)


def generate(design: SimDesign, replication: int = 0) -> LabeledData:
    """Data for one replication of a design, from its own RNG stream."""
    rng = make_rng(design.seed, replication)
    X = gen_ar1_gaussian(design.n, design.p, design.rho, rng)
    y, active = gen_response(design.model, X, design.sparsity, rng)
    logger.debug(f"Generated model {design.model} replication {replication} (n={design.n}, p={design.p})")
    return LabeledData(X=X, y=y, active=active)

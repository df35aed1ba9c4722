"""Base penalty abstraction for penalized least squares."""
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from errors import DomainError

PENALTY_FAMILIES = ("lasso", "scad")


@dataclass(frozen=True)
class PenaltySpec:
    """Penalty family plus tuning parameter."""
    family: str = "lasso"  # lasso, scad
    lam: float = 0.0
    scad_a: float = 3.7  # scad only

    def __post_init__(self):
        if self.family not in PENALTY_FAMILIES:
            raise DomainError(f"Unsupported penalty family: {self.family}")
        if not np.isfinite(self.lam) or self.lam < 0:
            raise DomainError(f"lambda must be a finite nonnegative number, got {self.lam}")
        if self.family == "scad" and not self.scad_a > 2:
            raise DomainError(f"SCAD needs a > 2, got {self.scad_a}")

    def with_lambda(self, lam: float) -> "PenaltySpec":
        """Same family and shape parameter, new tuning parameter."""
        return PenaltySpec(family=self.family, lam=float(lam), scad_a=self.scad_a)


class PenaltyBase(ABC):
    """Abstract base class for separable coordinate penalties p_lambda(|b|).

    Coordinates are assumed standardized, so every one-dimensional
    subproblem has unit curvature.
    """

    def __init__(self, lam: float):
        self.lam = float(lam)

    @abstractmethod
    def value(self, beta: np.ndarray) -> float:
        """Total penalty sum_l p_lambda(|beta_l|)."""
        pass

    @abstractmethod
    def update(self, z: float) -> float:
        """Minimizer of 0.5*(x - z)**2 + p_lambda(|x|)."""
        pass

    @abstractmethod
    def derivative(self, t: np.ndarray) -> np.ndarray:
        """p'_lambda(t) for t >= 0; the weights of a local linear approximation."""
        pass

    def objective(self, gram: np.ndarray, cross: np.ndarray, y_sq: float, beta: np.ndarray) -> float:
        """Penalized objective (2n)^-1 ||y - Xb||^2 + sum p(|b|) in Gram form."""
        quad = 0.5 * y_sq - cross @ beta + 0.5 * beta @ (gram @ beta)
        return float(quad + self.value(beta))

"""Lasso penalty."""
import numpy as np

from .base import PenaltyBase


def soft_threshold(z, t):
    """sign(z) * max(|z| - t, 0), for scalars or arrays."""
    if np.ndim(z) == 0 and np.ndim(t) == 0:
        z = float(z)
        if z > t:
            return z - t
        if z < -t:
            return z + t
        return 0.0
    z = np.asarray(z, dtype=float)
    return np.sign(z) * np.maximum(np.abs(z) - t, 0.0)


class LassoPenalty(PenaltyBase):
    """l1 penalty lambda * |b|."""

    def value(self, beta: np.ndarray) -> float:
        return self.lam * float(np.sum(np.abs(beta)))

    def update(self, z: float) -> float:
        return soft_threshold(z, self.lam)

    def derivative(self, t: np.ndarray) -> np.ndarray:
        return np.full(np.shape(t), self.lam, dtype=float)

"""SCAD penalty."""
import math

import numpy as np

from .base import PenaltyBase
from .lasso import soft_threshold


def scad_update(z: float, lam: float, a: float = 3.7) -> float:
    """One-dimensional SCAD-penalized least squares solution for unit curvature.

    Three regimes: soft thresholding for |z| <= 2*lam, a linear interpolation
    for 2*lam < |z| <= a*lam, and no shrinkage beyond a*lam.
    """
    z = float(z)
    az = abs(z)
    if az <= 2.0 * lam:
        return soft_threshold(z, lam)
    if az <= a * lam:
        return ((a - 1.0) * z - math.copysign(a * lam, z)) / (a - 2.0)
    return z


class SCADPenalty(PenaltyBase):
    """Smoothly clipped absolute deviation penalty with shape parameter a."""

    def __init__(self, lam: float, a: float = 3.7):
        super().__init__(lam)
        self.a = float(a)

    def value(self, beta: np.ndarray) -> float:
        lam, a = self.lam, self.a
        t = np.abs(np.asarray(beta, dtype=float))
        vals = np.where(
            t <= lam,
            lam * t,
            np.where(
                t <= a * lam,
                (2.0 * a * lam * t - t ** 2 - lam ** 2) / (2.0 * (a - 1.0)),
                lam ** 2 * (a + 1.0) / 2.0,
            ),
        )
        return float(np.sum(vals))

    def update(self, z: float) -> float:
        return scad_update(z, self.lam, self.a)

    def derivative(self, t: np.ndarray) -> np.ndarray:
        lam, a = self.lam, self.a
        t = np.abs(np.asarray(t, dtype=float))
        return np.where(t <= lam, lam, np.maximum(a * lam - t, 0.0) / (a - 1.0))

"""Linear B-spline response transformations.

The h transformed responses f_1(Y), ..., f_h(Y) are the hat functions of a
piecewise-linear B-spline basis on the knot vector
(boundary_low, inner[0], ..., inner[h-3], boundary_high).
"""
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.interpolate import BSpline

from errors import DegenerateBasisError, DomainError

logger = logging.getLogger(__name__)

DEFAULT_H = 5


@dataclass(frozen=True)
class KnotSet:
    """Knots of an h-function linear B-spline basis."""
    boundary_low: float
    boundary_high: float
    inner: Tuple[float, ...]
    h: int

    def __post_init__(self):
        if self.h < 2:
            raise DomainError(f"a linear B-spline basis needs h >= 2, got {self.h}")
        if len(self.inner) != self.h - 2:
            raise DomainError(f"expected {self.h - 2} inner knots, got {len(self.inner)}")
        knots = self.knots
        if not np.all(np.diff(knots) > 0):
            raise DegenerateBasisError(f"knots must be strictly increasing: {knots.tolist()}")

    @property
    def knots(self) -> np.ndarray:
        """Full knot vector, boundaries included."""
        return np.array([self.boundary_low, *self.inner, self.boundary_high], dtype=float)


def make_knots(y, h: int = DEFAULT_H) -> KnotSet:
    """Place h-2 inner knots at the k/(h-1) empirical quantiles of y.

    Quantiles interpolate order statistics at positions (n-1)*k/(h-1). When
    ties make neighbouring quantiles coincide, the same positions are taken
    over the distinct values of y instead.
    """
    y = np.asarray(y, dtype=float).ravel()
    if h < 2:
        raise DomainError(f"h must be >= 2 for a B-spline basis, got {h}")
    if not np.all(np.isfinite(y)):
        raise DegenerateBasisError("response contains non-finite values")
    distinct = np.unique(y)
    if y.size < h or distinct.size < h:
        raise DegenerateBasisError(
            f"need at least h={h} distinct response values, got {distinct.size} of n={y.size}"
        )

    levels = np.arange(1, h - 1) / (h - 1)
    inner = np.quantile(y, levels)
    full = np.concatenate(([distinct[0]], inner, [distinct[-1]]))
    if not np.all(np.diff(full) > 0):
        logger.debug(f"Quantile knots collide under ties, using distinct-value quantiles (h={h})")
        inner = np.quantile(distinct, levels)

    return KnotSet(
        boundary_low=float(distinct[0]),
        boundary_high=float(distinct[-1]),
        inner=tuple(float(k) for k in inner),
        h=h,
    )


def _hat_weights(values: np.ndarray, knots: KnotSet) -> np.ndarray:
    t = knots.knots
    # degree-1 basis: boundary knots appear twice
    padded = np.r_[t[0], t, t[-1]]
    clamped = np.clip(values, t[0], t[-1])
    return BSpline.design_matrix(clamped, padded, 1).toarray()


def eval_basis(y_value: float, knots: KnotSet) -> np.ndarray:
    """Evaluate the h hat functions at one response value.

    Values outside [boundary_low, boundary_high] are clamped to the boundary.
    """
    return _hat_weights(np.array([float(y_value)]), knots)[0]


def transform_responses(y, knots: KnotSet) -> np.ndarray:
    """Return the n x h matrix whose row i is eval_basis(y_i)."""
    y = np.asarray(y, dtype=float).ravel()
    return _hat_weights(y, knots)


def build_transform(y, h: int = DEFAULT_H) -> Tuple[np.ndarray, Optional[KnotSet]]:
    """Response transform matrix F for a given h.

    h = 1 is the single identity transform f_1(Y) = Y; h >= 2 uses the
    linear B-spline basis with quantile knots.
    """
    y = np.asarray(y, dtype=float).ravel()
    if h < 1:
        raise DomainError(f"h must be >= 1, got {h}")
    if h == 1:
        return y.reshape(-1, 1).copy(), None
    knots = make_knots(y, h)
    logger.debug(f"Built {h} spline transforms with inner knots {knots.inner}")
    return transform_responses(y, knots), knots

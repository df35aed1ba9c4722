"""False discovery rate controlled selection over chi-square statistics.

For a threshold t, the number of false discoveries among p tests is estimated
by p * G(t) with G(t) = Pr(chi2_h >= t), so the estimated false discovery
proportion is p * G(t) / max(R(t), 1) where R(t) counts statistics >= t.
The threshold is the smallest t in [0, b_p] whose estimate is <= alpha; when
none exists a fixed fallback threshold is used.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Set, Tuple

import numpy as np

from chi2 import Chi2Params, survival
from errors import DomainError, PowerUndefinedError

logger = logging.getLogger(__name__)

D0_MARGIN = 0.25


def default_d0(h: int) -> float:
    """d0 with 2*d0 = h - 4 - 0.25 when h > 4, else -0.5."""
    if h > 4:
        return (h - 4 - D0_MARGIN) / 2.0
    return -0.5


def _check_p(p: int) -> None:
    if p < 3:
        raise DomainError(f"log log p needs p >= 3, got {p}")


def bp_bound(p: int, d0: float) -> float:
    """Search cap b_p = 2 log p + 2 d0 log log p."""
    _check_p(p)
    return 2.0 * math.log(p) + 2.0 * d0 * math.log(math.log(p))


def fallback_threshold(p: int, h: int) -> float:
    """Threshold 2 log p + (h - 1) log log p used when the search finds nothing."""
    _check_p(p)
    return 2.0 * math.log(p) + (h - 1) * math.log(math.log(p))


@dataclass
class FdrConfig:
    """Target level and search region of the threshold procedure."""
    alpha: float = 0.1
    h: int = 5
    d0: Optional[float] = None  # None means default_d0(h)
    search_cap_override: Optional[float] = None
    fallback_override: Optional[float] = None

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.h < 1:
            raise DomainError(f"h must be >= 1, got {self.h}")
        if self.d0 is None:
            self.d0 = default_d0(self.h)

    @classmethod
    def with_loglog_coefficients(
        cls,
        alpha: float,
        h: int,
        p: int,
        cap_coefficient: float,
        fallback_coefficient: float,
    ) -> "FdrConfig":
        """Cap 2 log p + c1 log log p and fallback 2 log p + c2 log log p.

        cap_coefficient=0.75 and fallback_coefficient=4 give the fixed-region
        variant used for the sparse linear and nonlinear FDR studies.
        """
        _check_p(p)
        loglog = math.log(math.log(p))
        return cls(
            alpha=alpha,
            h=h,
            search_cap_override=2.0 * math.log(p) + cap_coefficient * loglog,
            fallback_override=2.0 * math.log(p) + fallback_coefficient * loglog,
        )

    @classmethod
    def for_region(
        cls,
        alpha: float,
        h: int,
        p: int,
        d0: Optional[float] = None,
        cap_coefficient: Optional[float] = None,
        fallback_coefficient: Optional[float] = None,
    ) -> "FdrConfig":
        """Log-log region when both coefficients are given, the d0 cap otherwise."""
        if (cap_coefficient is None) != (fallback_coefficient is None):
            raise DomainError("cap and fallback coefficients must be given together")
        if cap_coefficient is not None:
            return cls.with_loglog_coefficients(alpha, h, p, cap_coefficient, fallback_coefficient)
        return cls(alpha=alpha, h=h, d0=d0)

    def search_cap(self, p: int) -> float:
        if self.search_cap_override is not None:
            return float(self.search_cap_override)
        return bp_bound(p, self.d0)

    def fallback(self, p: int) -> float:
        if self.fallback_override is not None:
            return float(self.fallback_override)
        return fallback_threshold(p, self.h)


@dataclass
class FdrSelection:
    """Chosen threshold and the coordinates (1-based) it rejects."""
    threshold: float
    rejected: Set[int] = field(default_factory=set)
    fdp_estimate: float = 1.0
    used_fallback: bool = False
    search_cap: float = float("nan")

    def sorted_rejected(self):
        return sorted(self.rejected)


def fdp_hat(t: float, stats, h: int) -> float:
    """Estimated false discovery proportion p * G(t) / max(R(t), 1)."""
    stats = np.asarray(stats, dtype=float)
    rejections = int(np.count_nonzero(stats >= t))
    return stats.size * survival(t, Chi2Params(df=h)) / max(rejections, 1)


def find_threshold(stats, config: FdrConfig) -> FdrSelection:
    """Smallest t in [0, b_p] with estimated FDP <= alpha, else the fallback.

    R(t) only jumps at observed statistics, so the candidates are the
    statistics inside [0, cap] plus both ends of that interval. A qualifying t
    between two candidates rejects the same set as the next candidate.
    """
    stats = np.asarray(stats, dtype=float).ravel()
    if not np.all(np.isfinite(stats) | np.isposinf(stats)):
        raise DomainError("statistics must be finite")
    p = stats.size
    cap = config.search_cap(p)
    params = Chi2Params(df=config.h)

    ordered = np.sort(stats)
    inside = ordered[(ordered >= 0) & (ordered <= cap)]
    candidates = np.unique(np.concatenate(([0.0], inside, [cap] if cap >= 0 else [])))
    # R(t) = #{W >= t}
    counts = p - np.searchsorted(ordered, candidates, side="left")
    estimates = p * survival(candidates, params) / np.maximum(counts, 1)
    qualifying = np.flatnonzero(estimates <= config.alpha)

    if qualifying.size:
        first = int(qualifying[0])
        threshold = float(candidates[first])
        fdp_estimate = float(estimates[first])
        used_fallback = False
    else:
        threshold = config.fallback(p)
        fdp_estimate = float(fdp_hat(threshold, stats, config.h))
        used_fallback = True
        logger.warning(
            f"No threshold in [0, {cap:.3f}] reaches FDP <= {config.alpha}; using fallback {threshold:.3f}"
        )

    rejected = {int(i) + 1 for i in np.flatnonzero(stats >= threshold)}
    logger.info(f"FDR threshold {threshold:.4f} rejects {len(rejected)} of {p} coordinates")
    return FdrSelection(
        threshold=threshold,
        rejected=rejected,
        fdp_estimate=fdp_estimate,
        used_fallback=used_fallback,
        search_cap=cap,
    )


def false_discovery_proportion(rejected: Iterable[int], truth: Iterable[int]) -> float:
    """|rejected minus truth| / max(|rejected|, 1)."""
    rejected, truth = set(rejected), set(truth)
    return len(rejected - truth) / max(len(rejected), 1)


def evaluate_selection(selection: FdrSelection, truth: Iterable[int]) -> Tuple[float, float]:
    """Realized (FDP, power) of a selection against the true active set."""
    truth = set(truth)
    if not truth:
        raise PowerUndefinedError("power is undefined for an empty active set")
    fdp = false_discovery_proportion(selection.rejected, truth)
    power = len(selection.rejected & truth) / len(truth)
    return fdp, power

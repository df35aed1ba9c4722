"""Central and noncentral chi-square distribution functions.

The central survival function is the regularized upper incomplete gamma
function Q(df/2, t/2). The noncentral survival function is its Poisson
mixture sum_j Pois(j; ncp/2) Q(df/2 + j, t/2), truncated once the
remaining Poisson mass is below 1e-14.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np
from scipy import optimize, special, stats

from errors import DomainError

logger = logging.getLogger(__name__)

SERIES_TAIL = 1e-14
TAIL_RATIO_SPREAD = 10.0


@dataclass(frozen=True)
class Chi2Params:
    """Degrees of freedom and noncentrality of a chi-square law."""
    df: int
    ncp: float = 0.0

    def __post_init__(self):
        if self.df < 1:
            raise DomainError(f"df must be >= 1, got {self.df}")
        if not self.ncp >= 0:
            raise DomainError(f"ncp must be >= 0, got {self.ncp}")


def _poisson_terms(ncp: float):
    """Poisson indices and weights covering all but SERIES_TAIL of the mixture mass."""
    mu = ncp / 2.0
    lo = int(stats.poisson.ppf(SERIES_TAIL, mu))
    hi = int(stats.poisson.isf(SERIES_TAIL, mu)) + 1
    j = np.arange(max(lo, 0), hi + 1)
    w = stats.poisson.pmf(j, mu)
    return j, w / w.sum()


def survival(t, params: Chi2Params):
    """Pr(chi2 >= t); t may be a scalar or an array. t <= 0 gives 1."""
    t_arr = np.asarray(t, dtype=float)
    x = np.maximum(t_arr, 0.0) / 2.0
    a = params.df / 2.0
    if params.ncp == 0.0:
        out = special.gammaincc(a, x)
    else:
        j, w = _poisson_terms(params.ncp)
        terms = special.gammaincc(a + j[:, None], np.ravel(x)[None, :])
        out = (w[:, None] * terms).sum(axis=0).reshape(x.shape)
    out = np.where(t_arr <= 0, 1.0, np.clip(out, 0.0, 1.0))
    if np.ndim(t) == 0:
        return float(out)
    return out


def quantile(q: float, params: Chi2Params) -> float:
    """The t with survival(t) = q, for 0 < q < 1."""
    if not 0.0 < q < 1.0:
        raise DomainError(f"quantile level must lie in (0, 1), got {q}")
    a = params.df / 2.0
    if params.ncp == 0.0:
        return float(2.0 * special.gammainccinv(a, q))
    # bracket above the central quantile, which is stochastically smaller
    lo = 0.0
    hi = max(2.0 * special.gammainccinv(a, q), 1.0) + params.ncp
    while survival(hi, params) > q:
        hi *= 2.0
    return float(optimize.brentq(lambda t: survival(t, params) - q, lo, hi, xtol=1e-14, rtol=1e-14))


@dataclass
class TailBoundReport:
    """Scaled tail probabilities G(b_p) * p / (log p)^(h/2 - d0 - 1) over a grid of p."""
    p_grid: List[int]
    h: int
    d0: float
    bp: List[float]
    tail: List[float]
    ratios: List[float]
    lower_constant: float = field(init=False)
    upper_constant: float = field(init=False)

    def __post_init__(self):
        self.lower_constant = float(min(self.ratios)) if self.ratios else float("nan")
        self.upper_constant = float(max(self.ratios)) if self.ratios else float("nan")

    @property
    def spread(self) -> float:
        """max/min of the ratios."""
        if not self.ratios:
            return 1.0
        return self.upper_constant / self.lower_constant

    @property
    def bounded(self) -> bool:
        return bool(np.isfinite(self.spread) and self.spread < TAIL_RATIO_SPREAD)


def tail_bound_check(p_grid: Sequence[int], h: int, d0: float) -> TailBoundReport:
    """Check that G(b_p) is of order (log p)^(h/2 - d0 - 1) / p along p_grid."""
    from fdr import bp_bound

    if h < 2:
        raise DomainError(f"tail check needs h >= 2, got {h}")
    params = Chi2Params(df=h)
    exponent = h / 2.0 - d0 - 1.0
    bps, tails, ratios = [], [], []
    for p in p_grid:
        b = bp_bound(int(p), d0)
        g = survival(b, params)
        bps.append(b)
        tails.append(g)
        ratios.append(g * p / math.log(p) ** exponent)
    report = TailBoundReport(p_grid=[int(p) for p in p_grid], h=h, d0=d0, bp=bps, tail=tails, ratios=ratios)
    logger.info(f"Tail ratios for h={h}, d0={d0}: spread {report.spread:.3f}")
    return report

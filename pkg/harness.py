"""Monte-Carlo studies over simulated designs.

Rejection study: per-coordinate rejection rates of the score test at level
alpha. FDR study: realized false discovery proportion and power of the
threshold procedure. Power sweep: rejection rates as a function of h.

Replications run on a thread pool; each draws from its own RNG stream, so the
aggregates do not depend on scheduling.
"""
import logging
import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Set

import numpy as np

from config import config
from data_gen import SimDesign, generate
from dataset import Dataset
from errors import DomainError, MfhdError
from fdr import FdrConfig, evaluate_selection, find_threshold
from score_test import ScoreTester, ScoreTestConfig

logger = logging.getLogger(__name__)

PROGRESS_EVERY = 50


def default_coordinates(p: int) -> List[int]:
    """Coordinates 1..5 and p-4..p, the columns reported in rejection tables."""
    return sorted({j for j in (*range(1, 6), *range(p - 4, p + 1)) if 1 <= j <= p})


def binomial_se(rate: float, replications: int) -> float:
    return math.sqrt(rate * (1.0 - rate) / replications) if replications else float("nan")


def sample_se(values: Sequence[float]) -> float:
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        return 0.0
    return float(values.std(ddof=1) / math.sqrt(values.size))


@dataclass
class RejectionRate:
    j: int
    active: bool
    rate: float
    se: float
    replications: int


@dataclass
class RejectionStudyResult:
    design: SimDesign
    h: int
    alpha: float
    replications: int
    rates: List[RejectionRate]
    statistics: Dict[int, List[float]] = field(default_factory=dict)
    p_values: Dict[int, List[float]] = field(default_factory=dict)

    def rate(self, j: int) -> float:
        for row in self.rates:
            if row.j == j:
                return row.rate
        raise KeyError(j)


@dataclass
class FdrStudyResult:
    design: SimDesign
    h: int
    alpha: float
    replications: int
    fdr: float
    fdr_se: float
    power: float
    power_se: float
    mean_rejections: float
    fallback_rate: float
    fdps: List[float] = field(default_factory=list)
    powers: List[float] = field(default_factory=list)


@dataclass
class PowerSweepPoint:
    h: int
    j: int
    active: bool
    rate: float
    se: float


def _run_replications(run, replications: int, threads: Optional[int], label: str) -> list:
    if replications < 1:
        raise DomainError(f"replications must be >= 1, got {replications}")
    workers = config.resolve_threads(threads)
    done = 0
    lock = threading.Lock()

    def task(r: int):
        nonlocal done
        try:
            out = run(r)
        except MfhdError:
            raise
        except Exception:
            logger.error(f"{label}: replication {r} failed", exc_info=True)
            raise
        with lock:
            done += 1
            count = done
        if count % PROGRESS_EVERY == 0:
            logger.info(f"{label}: {count}/{replications} replications")
        return out

    logger.info(f"{label}: {replications} replications on {workers} worker(s)")
    if workers == 1:
        return [task(r) for r in range(replications)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(task, range(replications)))


def _dataset(design: SimDesign, replication: int):
    sample = generate(design, replication)
    return Dataset(X=sample.X, y=sample.y), sample.active


def run_rejection_study(
    design: SimDesign,
    replications: int,
    test_config: Optional[ScoreTestConfig] = None,
    alpha: float = 0.05,
    coordinates: Optional[Sequence[int]] = None,
    threads: Optional[int] = None,
) -> RejectionStudyResult:
    """Fraction of replications in which each coordinate's p-value is below alpha."""
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    test_config = test_config or ScoreTestConfig()
    coords = sorted(set(coordinates)) if coordinates else default_coordinates(design.p)
    for j in coords:
        if not 1 <= j <= design.p:
            raise DomainError(f"coordinate j={j} outside 1..{design.p}")
    # one multi-coordinate pass per replication: shared fits unless asked otherwise
    if test_config.gamma_mode is None:
        test_config = replace(test_config, gamma_mode="shared")

    def run(r: int):
        data, active = _dataset(design, r)
        tester = ScoreTester(data, test_config)
        results = [tester.test(j) for j in coords]
        return active, results

    outcomes = _run_replications(run, replications, threads, f"model {design.model} rejection study")
    active: Set[int] = outcomes[0][0]
    statistics = {j: [] for j in coords}
    p_values = {j: [] for j in coords}
    for _, results in outcomes:
        for res in results:
            statistics[res.j].append(res.statistic)
            p_values[res.j].append(res.p_value)

    rates = []
    for j in coords:
        rate = float(np.mean(np.asarray(p_values[j]) < alpha))
        rates.append(RejectionRate(j=j, active=j in active, rate=rate,
                                   se=binomial_se(rate, replications), replications=replications))
    h = outcomes[0][1][0].h if outcomes[0][1] else test_config.h
    return RejectionStudyResult(design=design, h=h, alpha=alpha, replications=replications,
                                rates=rates, statistics=statistics, p_values=p_values)


def run_fdr_study(
    design: SimDesign,
    replications: int,
    test_config: Optional[ScoreTestConfig] = None,
    alpha: float = 0.1,
    d0: Optional[float] = None,
    cap_coefficient: Optional[float] = None,
    fallback_coefficient: Optional[float] = None,
    threads: Optional[int] = None,
) -> FdrStudyResult:
    """Empirical FDR and power of threshold selection over all p coordinates.

    With cap_coefficient and fallback_coefficient the search region is
    [0, 2 log p + c1 log log p] with fallback 2 log p + c2 log log p;
    otherwise it is [0, b_p] with b_p from d0.
    """
    test_config = test_config or ScoreTestConfig()
    if test_config.gamma_mode is None:
        test_config = replace(test_config, gamma_mode="shared")
    # rejects a lone coefficient before any replication runs
    FdrConfig.for_region(alpha, test_config.h, design.p, d0, cap_coefficient, fallback_coefficient)

    def run(r: int):
        data, active = _dataset(design, r)
        tester = ScoreTester(data, test_config)
        stats = np.array([tester.test(j).statistic for j in range(1, data.p + 1)])
        fdr_config = FdrConfig.for_region(alpha, tester.h, data.p, d0, cap_coefficient, fallback_coefficient)
        selection = find_threshold(stats, fdr_config)
        fdp, power = evaluate_selection(selection, active)
        return fdp, power, len(selection.rejected), selection.used_fallback, tester.h

    outcomes = _run_replications(run, replications, threads, f"model {design.model} FDR study")
    fdps = [o[0] for o in outcomes]
    powers = [o[1] for o in outcomes]
    return FdrStudyResult(
        design=design,
        h=outcomes[0][4],
        alpha=alpha,
        replications=replications,
        fdr=float(np.mean(fdps)),
        fdr_se=sample_se(fdps),
        power=float(np.mean(powers)),
        power_se=sample_se(powers),
        mean_rejections=float(np.mean([o[2] for o in outcomes])),
        fallback_rate=float(np.mean([o[3] for o in outcomes])),
        fdps=fdps,
        powers=powers,
    )


def run_power_sweep(
    design: SimDesign,
    replications: int,
    h_values: Sequence[int],
    test_config: Optional[ScoreTestConfig] = None,
    alpha: float = 0.05,
    coordinates: Optional[Sequence[int]] = None,
    threads: Optional[int] = None,
) -> List[PowerSweepPoint]:
    """Rejection rates of the chosen coordinates for each h.

    Every h sees the same simulated replications.
    """
    test_config = test_config or ScoreTestConfig()
    points: List[PowerSweepPoint] = []
    for h in h_values:
        study = run_rejection_study(design, replications, replace(test_config, h=h), alpha,
                                    coordinates, threads)
        points.extend(PowerSweepPoint(h=h, j=row.j, active=row.active, rate=row.rate, se=row.se)
                      for row in study.rates)
        logger.info(f"Power sweep h={h} done")
    return points

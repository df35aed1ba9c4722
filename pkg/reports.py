"""Build report models from results and render them as TSV or JSON."""
import io
import logging
from typing import Iterable, List, Optional, Sequence, Type

import pandas as pd
from pydantic import BaseModel

from api.models import (
    CoordinateTestRow,
    FdrReport,
    FdrStudyRow,
    PowerSweepRow,
    RejectionRateRow,
    SimulationReport,
    TailCheckReport,
    TailCheckRow,
    TestReport,
)
from chi2 import TailBoundReport, tail_bound_check
from data_gen import SimDesign
from dataset import Dataset
from errors import DomainError
from fdr import FdrConfig, FdrSelection, default_d0
from harness import (
    FdrStudyResult,
    PowerSweepPoint,
    RejectionStudyResult,
    default_coordinates,
    run_fdr_study,
    run_power_sweep,
    run_rejection_study,
)
from score_test import CoordinateTestResult, ScoreTester, ScoreTestConfig

logger = logging.getLogger(__name__)

OUTPUT_FORMATS = ("tsv", "json")
STUDIES = ("auto", "rejection", "fdr")
TAIL_CHECK_GRID = [10 ** k for k in range(3, 9)]


def coordinate_row(data: Dataset, result: CoordinateTestResult) -> CoordinateTestRow:
    return CoordinateTestRow(
        j=result.j,
        name=data.column_name(result.j),
        statistic=result.statistic,
        p_value=result.p_value,
        delta_hat=result.delta_hat,
        h=result.h,
        regularized=result.regularized,
        converged=result.converged,
    )


def build_test_report(tester: ScoreTester, results: Sequence[CoordinateTestResult], gamma_mode: str) -> TestReport:
    cfg = tester.config
    return TestReport(
        n=tester.data.n,
        p=tester.data.p,
        h=tester.h,
        penalty=cfg.penalty,
        lambda_mode=cfg.lambda_mode,
        gamma_mode=cfg.gamma_mode or gamma_mode,
        orthogonalize=cfg.orthogonalize,
        knots=None if tester.knots is None else tester.knots.knots.tolist(),
        results=[coordinate_row(tester.data, r) for r in results],
    )


def build_fdr_report(
    data: Dataset,
    fdr_config: FdrConfig,
    selection: FdrSelection,
    results: Sequence[CoordinateTestResult],
) -> FdrReport:
    by_j = {r.j: r for r in results}
    return FdrReport(
        n=data.n,
        p=data.p,
        h=fdr_config.h,
        alpha=fdr_config.alpha,
        d0=fdr_config.d0 if fdr_config.search_cap_override is None else None,
        threshold=selection.threshold,
        search_cap=selection.search_cap,
        used_fallback=selection.used_fallback,
        fdp_estimate=selection.fdp_estimate,
        n_rejected=len(selection.rejected),
        rejected=[coordinate_row(data, by_j[j]) for j in selection.sorted_rejected()],
    )


def rejection_rows(study: RejectionStudyResult) -> List[RejectionRateRow]:
    d = study.design
    return [
        RejectionRateRow(model=d.model, n=d.n, p=d.p, h=study.h, alpha=study.alpha, j=row.j,
                         active=row.active, rate=row.rate, se=row.se, replications=row.replications)
        for row in study.rates
    ]


def fdr_study_row(study: FdrStudyResult) -> FdrStudyRow:
    d = study.design
    return FdrStudyRow(
        model=d.model, n=d.n, p=d.p, sparsity=d.sparsity, h=study.h, alpha=study.alpha,
        replications=study.replications, fdr=study.fdr, fdr_se=study.fdr_se, power=study.power,
        power_se=study.power_se, mean_rejections=study.mean_rejections,
        fallback_rate=study.fallback_rate,
    )


def power_sweep_rows(
    design: SimDesign, points: Sequence[PowerSweepPoint], alpha: float, replications: int
) -> List[PowerSweepRow]:
    return [
        PowerSweepRow(model=design.model, n=design.n, p=design.p, h=pt.h, alpha=alpha, j=pt.j,
                      active=pt.active, rate=pt.rate, se=pt.se, replications=replications)
        for pt in points
    ]


def tail_check_report(report: TailBoundReport) -> TailCheckReport:
    rows = [TailCheckRow(p=p, bp=b, tail=g, ratio=r)
            for p, b, g, r in zip(report.p_grid, report.bp, report.tail, report.ratios)]
    return TailCheckReport(h=report.h, d0=report.d0, spread=report.spread, bounded=report.bounded, rows=rows)


def default_study(model: str) -> str:
    """FDR studies for the sparse models IV and V, rejection rates otherwise."""
    return "fdr" if model in ("IV", "V") else "rejection"


def default_level(study: str) -> float:
    return 0.1 if study == "fdr" else 0.05


def simulation_report(
    design: SimDesign,
    study: str,
    replications: int,
    test_config: ScoreTestConfig,
    alpha: Optional[float] = None,
    coordinates: Optional[Sequence[int]] = None,
    threads: Optional[int] = None,
    d0: Optional[float] = None,
    cap_coefficient: Optional[float] = None,
    fallback_coefficient: Optional[float] = None,
    tail_check: bool = False,
) -> SimulationReport:
    """Run a rejection-rate or FDR study on a design and report it.

    alpha defaults to 0.05 for rejection studies and 0.1 for FDR studies.
    tail_check adds the scaled chi-square tail at the search cap.
    """
    if study not in STUDIES:
        raise DomainError(f"study must be one of {STUDIES}, got {study}")
    if (cap_coefficient is None) != (fallback_coefficient is None):
        raise DomainError("cap and fallback coefficients must be given together")
    if study == "auto":
        study = default_study(design.model)
    alpha = default_level(study) if alpha is None else alpha
    logger.info(f"Running {study} study on model {design.model}, {replications} replications")

    report = SimulationReport(study=study, seed=design.seed)
    if study == "rejection":
        result = run_rejection_study(design, replications, test_config, alpha, coordinates, threads)
        report.rejection_rates = rejection_rows(result)
    else:
        result = run_fdr_study(design, replications, test_config, alpha, d0,
                               cap_coefficient, fallback_coefficient, threads)
        report.fdr = fdr_study_row(result)
    if tail_check:
        cap_d0 = default_d0(test_config.h) if d0 is None else d0
        report.tail_check = tail_check_report(tail_bound_check(TAIL_CHECK_GRID, max(test_config.h, 2), cap_d0))
    return report


def power_sweep_report(
    design: SimDesign,
    replications: int,
    h_values: Iterable[int],
    test_config: ScoreTestConfig,
    alpha: Optional[float] = None,
    coordinates: Optional[Sequence[int]] = None,
    threads: Optional[int] = None,
) -> SimulationReport:
    """Rejection rates of the selected coordinates for each h."""
    alpha = default_level("rejection") if alpha is None else alpha
    coords = coordinates or default_coordinates(design.p)
    points = run_power_sweep(design, replications, list(h_values), test_config, alpha, coords, threads)
    return SimulationReport(
        study="power-sweep",
        seed=design.seed,
        power_sweep=power_sweep_rows(design, points, alpha, replications),
    )


def to_tsv(rows: Sequence[BaseModel], model: Type[BaseModel]) -> str:
    """Tab-separated table with one column per model field, in field order."""
    columns = list(model.model_fields)
    frame = pd.DataFrame([row.model_dump() for row in rows], columns=columns)
    buffer = io.StringIO()
    frame.to_csv(buffer, sep="\t", index=False, float_format="%.10g", lineterminator="\n")
    return buffer.getvalue()


def _summary_line(report: BaseModel, exclude: set) -> str:
    fields = report.model_dump(exclude=exclude)
    return "# " + " ".join(f"{k}={v}" for k, v in fields.items()) + "\n"


def render(report: BaseModel, output_format: str = "tsv") -> str:
    """Report text for the output stream.

    JSON is the whole model. TSV is the main table; FDR and test reports
    carry their scalar fields on a leading '#' line.
    """
    if output_format not in OUTPUT_FORMATS:
        raise DomainError(f"output format must be one of {OUTPUT_FORMATS}, got {output_format}")
    if output_format == "json":
        return report.model_dump_json(indent=2) + "\n"

    if isinstance(report, TestReport):
        return _summary_line(report, {"results"}) + to_tsv(report.results, CoordinateTestRow)
    if isinstance(report, FdrReport):
        return _summary_line(report, {"rejected"}) + to_tsv(report.rejected, CoordinateTestRow)
    if isinstance(report, SimulationReport):
        if report.study == "rejection":
            text = to_tsv(report.rejection_rates, RejectionRateRow)
        elif report.study == "fdr":
            text = to_tsv([report.fdr] if report.fdr else [], FdrStudyRow)
        else:
            text = to_tsv(report.power_sweep, PowerSweepRow)
        if report.tail_check is not None:
            text += "\n" + _summary_line(report.tail_check, {"rows"}) + to_tsv(report.tail_check.rows, TailCheckRow)
        return text
    if isinstance(report, TailCheckReport):
        return _summary_line(report, {"rows"}) + to_tsv(report.rows, TailCheckRow)
    raise DomainError(f"no TSV layout for {type(report).__name__}")


def tsv_frame(text: str) -> pd.DataFrame:
    """Parse the first table of a TSV report back into a frame."""
    table = text.split("\n\n")[0]
    return pd.read_csv(io.StringIO(table), sep="\t", comment="#")

"""Command-line front end: mfhd test | fdr | simulate | power-sweep.

Results go to stdout (or --output); progress and warnings go to the log on
stderr. Exit codes: 0 ok, 2 input or domain error, 3 degenerate test,
1 anything else.
"""
import argparse
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from config import config
from data_gen import MODELS, SimDesign, generate
import dataset
from dataset import Dataset, read_csv, write_csv
from errors import DomainError, InputError, MfhdError
from fdr import FdrConfig, find_threshold
from regression import PENALTY_FAMILIES
from regression.solver import SolverOptions
from reports import (
    STUDIES,
    build_fdr_report,
    build_test_report,
    default_level,
    default_study,
    power_sweep_report,
    render,
    simulation_report,
)
from score_test import GAMMA_MODES, ScoreTester, ScoreTestConfig

logger = logging.getLogger(__name__)

COMMANDS = ("test", "fdr", "simulate", "power-sweep")


@dataclass
class RunConfig:
    """Everything one CLI invocation needs, validated against its command."""
    command: str
    input_path: Optional[str] = None
    response: str = "y"
    coordinates: Optional[List[int]] = None
    h: int = field(default_factory=lambda: config.default_h)
    penalty: str = "lasso"
    alpha: Optional[float] = None  # 0.05 for tests and sweeps, 0.1 for FDR
    lambda_mode: str = "cv"
    lambda_value: float = 1.0  # rate constant or fixed lambda
    gamma_mode: Optional[str] = None
    orthogonalize: bool = True
    scad_method: str = "lla"
    seed: int = field(default_factory=lambda: config.seed)
    threads: Optional[int] = None
    output_format: str = "tsv"
    output_path: Optional[str] = None
    # simulation designs
    model: str = "I"
    n: int = 200
    p: int = 200
    rho: float = 0.5
    sparsity: int = 4
    replications: int = 100
    study: str = "auto"  # auto, rejection, fdr
    h_min: int = 1
    h_max: int = 20
    # threshold search
    d0: Optional[float] = None  # None: default_d0(h)
    cap_coefficient: Optional[float] = None
    fallback_coefficient: Optional[float] = None
    export_csv: Optional[str] = None
    tail_check: bool = False

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise DomainError(f"unknown command {self.command}")
        if self.command in ("test", "fdr") and not self.input_path:
            raise InputError(f"{self.command} needs --input")
        if self.command in ("simulate", "power-sweep") and self.input_path:
            raise InputError(f"{self.command} generates its own data and takes no --input")
        if self.alpha is not None and not 0.0 < self.alpha < 1.0:
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.replications < 1:
            raise DomainError(f"--reps must be >= 1, got {self.replications}")
        if not 1 <= self.h_min <= self.h_max:
            raise DomainError(f"need 1 <= h-min <= h-max, got {self.h_min}..{self.h_max}")
        if (self.cap_coefficient is None) != (self.fallback_coefficient is None):
            raise DomainError("--cap-coef and --fallback-coef must be given together")
        if self.study not in STUDIES:
            raise DomainError(f"unknown study {self.study}")

    @property
    def resolved_study(self) -> str:
        if self.study != "auto":
            return self.study
        return default_study(self.model)

    def level(self, study: str) -> float:
        if self.alpha is not None:
            return self.alpha
        return default_level(study)

    def test_config(self, h: Optional[int] = None) -> ScoreTestConfig:
        return ScoreTestConfig.with_lambda(
            self.lambda_mode,
            self.lambda_value,
            h=self.h if h is None else h,
            penalty=self.penalty,
            gamma_mode=self.gamma_mode,
            orthogonalize=self.orthogonalize,
            seed=self.seed,
            solver=SolverOptions(scad_method=self.scad_method),
        )

    def design(self) -> SimDesign:
        return SimDesign(model=self.model, n=self.n, p=self.p, rho=self.rho,
                         sparsity=self.sparsity, seed=self.seed)

    def fdr_config(self, h: int, p: int) -> FdrConfig:
        return FdrConfig.for_region(self.level("fdr"), h, p, self.d0, self.cap_coefficient, self.fallback_coefficient)

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        lambda_mode, lambda_value = "cv", 1.0
        if getattr(args, "lambda_rate", None) is not None:
            lambda_mode, lambda_value = "rate", args.lambda_rate
        elif getattr(args, "lambda_fixed", None) is not None:
            lambda_mode, lambda_value = "fixed", args.lambda_fixed
        values = dict(
            command=args.command,
            h=args.h,
            penalty=args.penalty,
            alpha=args.alpha,
            lambda_mode=lambda_mode,
            lambda_value=lambda_value,
            gamma_mode=args.gamma_mode,
            orthogonalize=not args.no_orthogonalize,
            scad_method=args.scad_method,
            seed=args.seed,
            threads=args.threads,
            output_format=args.format,
            output_path=args.output,
            coordinates=getattr(args, "j", None),
        )
        for name in ("input_path", "response", "model", "n", "p", "rho", "sparsity", "replications",
                     "study", "h_min", "h_max", "d0", "cap_coefficient", "fallback_coefficient",
                     "export_csv", "tail_check"):
            if hasattr(args, name):
                values[name] = getattr(args, name)
        return cls(**values)


def parse_coordinates(text: str) -> List[int]:
    try:
        return dataset.parse_coordinates(text)
    except InputError as e:
        raise argparse.ArgumentTypeError(str(e))


def parse_d0(text: str) -> Optional[float]:
    if text == "auto":
        return None
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--d0 must be a number or 'auto', got '{text}'")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mfhd",
        description="Model-free score tests for high-dimensional predictors",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--h", type=int, default=config.default_h, help="number of response transforms")
    common.add_argument("--penalty", choices=PENALTY_FAMILIES, default="lasso")
    common.add_argument("--scad-method", choices=("lla", "cd"), default="lla")
    lam = common.add_mutually_exclusive_group()
    lam.add_argument("--lambda-rate", type=float, metavar="C",
                     help="lambda = C sd sqrt(log d / n) instead of cross-validation")
    lam.add_argument("--lambda", dest="lambda_fixed", type=float, metavar="VALUE", help="fixed lambda")
    common.add_argument("--gamma-mode", choices=GAMMA_MODES, default=None,
                        help="transform fits per coordinate (direct) or once on all predictors (shared)")
    common.add_argument("--no-orthogonalize", action="store_true",
                        help="use the raw centered predictor instead of its nuisance residual")
    common.add_argument("--alpha", type=float, default=None)
    common.add_argument("--seed", type=int, default=config.seed)
    common.add_argument("--threads", type=int, default=None, help="worker threads (MFHD_THREADS wins)")
    common.add_argument("--format", choices=("tsv", "json"), default="tsv")
    common.add_argument("--output", "-o", default=None, help="write results here instead of stdout")
    common.add_argument("--log-level", default=None, help="override LOG_LEVEL")

    coords = argparse.ArgumentParser(add_help=False)
    coords.add_argument("--j", type=parse_coordinates, default=None, help="coordinates, e.g. 1,2,5 or 1-10")

    data = argparse.ArgumentParser(add_help=False)
    data.add_argument("--input", dest="input_path", required=True, help="CSV file with a header row")
    data.add_argument("--response", default="y", help="response column name or 1-based position")

    threshold = argparse.ArgumentParser(add_help=False)
    threshold.add_argument("--d0", type=parse_d0, default=None, help="cap constant, or 'auto'")
    threshold.add_argument("--cap-coef", dest="cap_coefficient", type=float, default=None,
                           help="search cap 2 log p + C log log p")
    threshold.add_argument("--fallback-coef", dest="fallback_coefficient", type=float, default=None,
                           help="fallback 2 log p + C log log p")

    design = argparse.ArgumentParser(add_help=False)
    design.add_argument("--model", choices=MODELS, default="I")
    design.add_argument("--n", type=int, default=200)
    design.add_argument("--p", type=int, default=200)
    design.add_argument("--rho", type=float, default=0.5)
    design.add_argument("--sparsity", type=int, default=4)
    design.add_argument("--reps", dest="replications", type=int, default=100)

    sub.add_parser("test", parents=[common, coords, data], help="score tests of selected coordinates")
    sub.add_parser("fdr", parents=[common, data, threshold], help="FDR-controlled selection")
    simulate = sub.add_parser("simulate", parents=[common, coords, design, threshold], help="Monte-Carlo study")
    simulate.add_argument("--study", choices=STUDIES, default="auto",
                          help="auto: FDR for models IV and V, rejection rates otherwise")
    simulate.add_argument("--export-csv", default=None, help="write replication 0 as CSV")
    simulate.add_argument("--tail-check", action="store_true",
                          help="also report the scaled chi-square tail at the search cap")
    sweep = sub.add_parser("power-sweep", parents=[common, coords, design], help="rejection rate against h")
    sweep.add_argument("--h-min", type=int, default=1)
    sweep.add_argument("--h-max", type=int, default=20)
    return parser


def cmd_test(rc: RunConfig):
    data = read_csv(rc.input_path, rc.response)
    tester = ScoreTester(data, rc.test_config())
    coords = rc.coordinates or list(range(1, data.p + 1))
    mode = "direct" if len(coords) == 1 else "shared"
    results = tester.test_many(coords, rc.threads, gamma_mode=mode)
    for r in results:
        if r.regularized:
            logger.warning(f"j={r.j}: score covariance was regularized")
    return build_test_report(tester, results, mode)


def cmd_fdr(rc: RunConfig):
    data = read_csv(rc.input_path, rc.response)
    tester = ScoreTester(data, rc.test_config())
    results = tester.test_many(None, rc.threads, gamma_mode="shared")
    stats = np.array([r.statistic for r in results])
    fdr_config = rc.fdr_config(tester.h, data.p)
    selection = find_threshold(stats, fdr_config)
    return build_fdr_report(data, fdr_config, selection, results)


def _export(design: SimDesign, path: str) -> None:
    sample = generate(design, 0)
    write_csv(Dataset(X=sample.X, y=sample.y), Path(path))


def cmd_simulate(rc: RunConfig):
    design = rc.design()
    if rc.export_csv:
        _export(design, rc.export_csv)
    return simulation_report(
        design, rc.resolved_study, rc.replications, rc.test_config(), rc.alpha, rc.coordinates,
        rc.threads, rc.d0, rc.cap_coefficient, rc.fallback_coefficient, rc.tail_check,
    )


def cmd_power_sweep(rc: RunConfig):
    return power_sweep_report(
        rc.design(), rc.replications, range(rc.h_min, rc.h_max + 1), rc.test_config(), rc.alpha,
        rc.coordinates, rc.threads,
    )


HANDLERS = {
    "test": cmd_test,
    "fdr": cmd_fdr,
    "simulate": cmd_simulate,
    "power-sweep": cmd_power_sweep,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, run one command and return its exit code."""
    args = build_parser().parse_args(argv)
    if args.log_level:
        logging.getLogger().setLevel(getattr(logging, args.log_level.upper(), logging.INFO))
    try:
        rc = RunConfig.from_args(args)
        report = HANDLERS[rc.command](rc)
        text = render(report, rc.output_format)
        if rc.output_path:
            Path(rc.output_path).write_text(text)
            logger.info(f"Wrote results to {rc.output_path}")
        else:
            sys.stdout.write(text)
            sys.stdout.flush()
        return 0
    except MfhdError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except Exception as e:
        logger.error(f"Unexpected error: {e}", exc_info=True)
        return 1

"""Coordinate-descent solver for Lasso and SCAD penalized least squares.

All fits run on internally standardized designs: columns are centered and
scaled to unit mean square, the response is centered. Coefficients, intercept
and residuals are reported on the original scale.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Union

import numpy as np

from config import config
from errors import DomainError, InputError
from . import get_penalty, kernels
from .base import PenaltySpec

logger = logging.getLogger(__name__)

LAMBDA_MIN_RATIO = 0.01


@dataclass
class SolverOptions:
    """Coordinate-descent stopping rules and SCAD strategy."""
    tol: float = field(default_factory=lambda: config.solver.tol)
    max_iter: int = field(default_factory=lambda: config.solver.max_iter)
    scad_method: str = "lla"  # lla, cd
    lla_steps: int = field(default_factory=lambda: config.solver.lla_steps)
    record_objective: bool = False

    def __post_init__(self):
        if self.scad_method not in ("lla", "cd"):
            raise DomainError(f"Unsupported SCAD method: {self.scad_method}")
        if self.tol <= 0 or self.max_iter < 1:
            raise DomainError("solver tolerance must be positive and max_iter >= 1")


@dataclass
class RegressionFit:
    """A fitted sparse linear model."""
    coefficients: np.ndarray
    intercept: float
    residuals: np.ndarray
    lambda_used: float
    iterations: int
    converged: bool
    family: str = "lasso"
    objective_path: List[float] = field(default_factory=list)

    def predict(self, X) -> np.ndarray:
        return self.intercept + np.asarray(X, dtype=float) @ self.coefficients


@dataclass
class TransformFits:
    """Shared fits of every transformed response on the full design."""
    coefficients: np.ndarray  # p x h
    fits: List[RegressionFit]

    def gamma(self, k: int, j: int) -> np.ndarray:
        """Coefficients of transform k (0-based) with coordinate j (1-based) deleted."""
        return np.delete(self.coefficients[:, k], j - 1)


class StandardizedDesign:
    """Centered, unit mean-square columns of a design matrix and their Gram matrix.

    Columns with no spread are marked invalid; they keep a zero coefficient.
    """

    def __init__(self, X, rows: Optional[np.ndarray] = None):
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if rows is not None:
            X = X[rows]
        self.n = X.shape[0]
        self.mean = X.mean(axis=0)
        centered = X - self.mean
        scale = np.sqrt(np.mean(centered ** 2, axis=0))
        self.valid = scale > 1e-12 * (1.0 + np.abs(self.mean))
        self.scale = np.where(self.valid, scale, 1.0)
        self.Xs = centered / self.scale
        self.Xs[:, ~self.valid] = 0.0
        self.gram = self.Xs.T @ self.Xs / self.n

    @property
    def d(self) -> int:
        return self.Xs.shape[1]

    def standardize(self, X) -> np.ndarray:
        """Apply this design's centering and scaling to new rows."""
        Xs = (np.asarray(X, dtype=float) - self.mean) / self.scale
        Xs[:, ~self.valid] = 0.0
        return Xs

    def cross(self, yc: np.ndarray) -> np.ndarray:
        return self.Xs.T @ yc / self.n

    def subset(self, columns) -> "StandardizedDesign":
        """Design restricted to some columns, without recomputing the Gram matrix."""
        columns = np.asarray(columns)
        sub = object.__new__(StandardizedDesign)
        sub.n = self.n
        sub.mean = self.mean[columns]
        sub.scale = self.scale[columns]
        sub.valid = self.valid[columns]
        sub.Xs = self.Xs[:, columns]
        sub.gram = self.gram[np.ix_(columns, columns)]
        return sub


def _check_finite(name: str, values: np.ndarray) -> None:
    if not np.all(np.isfinite(values)):
        raise InputError(f"{name} contains non-finite entries")


def _coordinate_descent(
    gram: np.ndarray,
    cross: np.ndarray,
    weights: np.ndarray,
    beta: np.ndarray,
    valid: np.ndarray,
    tol: float,
    max_iter: int,
    rule: int = kernels.SOFT,
    scad_a: float = 3.7,
    on_sweep: Optional[Callable[[np.ndarray], None]] = None,
):
    """Cyclic coordinate descent with covariance updates.

    Alternates full sweeps with sweeps over the nonzero coordinates; stops when
    a full sweep moves no coordinate by tol or more. With on_sweep every sweep
    is a full one.
    """
    gram = np.ascontiguousarray(gram, dtype=np.float64)
    cross = np.ascontiguousarray(cross, dtype=np.float64)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    beta = np.ascontiguousarray(beta, dtype=np.float64)
    full = np.flatnonzero(valid).astype(np.int64)
    if on_sweep is None:
        sweeps, converged = kernels.coordinate_descent(
            gram, cross, beta, weights, full, rule, float(scad_a), float(tol), int(max_iter)
        )
        return beta, int(sweeps), bool(converged)
    for sweep in range(1, max_iter + 1):
        _, done = kernels.coordinate_descent(gram, cross, beta, weights, full, rule, float(scad_a), float(tol), 1)
        on_sweep(beta)
        if done:
            return beta, sweep, True
    return beta, max_iter, False


def _solve(
    design: StandardizedDesign,
    cross: np.ndarray,
    penalty: PenaltySpec,
    opts: SolverOptions,
    beta0: Optional[np.ndarray] = None,
    y_sq: float = 0.0,
):
    """Standardized coefficients for one penalized problem in Gram form."""
    beta = np.zeros(design.d) if beta0 is None else np.array(beta0, dtype=float)
    beta[~design.valid] = 0.0
    pen = get_penalty(penalty)
    path: List[float] = []

    def record(b):
        path.append(pen.objective(design.gram, cross, y_sq, b))

    on_sweep = record if opts.record_objective else None
    flat = np.full(design.d, penalty.lam)

    if penalty.family == "lasso" or opts.scad_method == "cd":
        rule = kernels.SOFT if penalty.family == "lasso" else kernels.SCAD
        beta, iterations, converged = _coordinate_descent(
            design.gram, cross, flat, beta, design.valid, opts.tol, opts.max_iter,
            rule, penalty.scad_a, on_sweep,
        )
        return beta, iterations, converged, path

    # SCAD by local linear approximation started from the Lasso solution
    beta, iterations, converged = _coordinate_descent(
        design.gram, cross, flat, beta, design.valid, opts.tol, opts.max_iter,
    )
    if opts.record_objective:
        record(beta)
    for _ in range(opts.lla_steps):
        weights = pen.derivative(beta)
        previous = beta.copy()
        beta, steps, converged = _coordinate_descent(
            design.gram, cross, weights, beta, design.valid, opts.tol, opts.max_iter,
        )
        iterations += steps
        if opts.record_objective:
            record(beta)
        if np.max(np.abs(beta - previous), initial=0.0) < opts.tol:
            break
    return beta, iterations, converged, path


def _fit_centered(
    design: StandardizedDesign,
    yc: np.ndarray,
    y_mean: float,
    penalty: PenaltySpec,
    opts: SolverOptions,
    beta0: Optional[np.ndarray] = None,
) -> RegressionFit:
    cross = design.cross(yc)
    y_sq = float(yc @ yc) / design.n
    beta, iterations, converged, path = _solve(design, cross, penalty, opts, beta0, y_sq)
    if not converged:
        logger.warning(
            f"{penalty.family} fit did not converge in {iterations} sweeps (lambda={penalty.lam:.4g})"
        )
    coefficients = np.where(design.valid, beta / design.scale, 0.0)
    intercept = float(y_mean - design.mean @ coefficients)
    residuals = yc - design.Xs @ beta
    return RegressionFit(
        coefficients=coefficients,
        intercept=intercept,
        residuals=residuals,
        lambda_used=penalty.lam,
        iterations=iterations,
        converged=converged,
        family=penalty.family,
        objective_path=path,
    )


def fit_design(
    design: StandardizedDesign,
    y,
    penalty: PenaltySpec,
    opts: Optional[SolverOptions] = None,
    beta0: Optional[np.ndarray] = None,
) -> RegressionFit:
    """Penalized fit of y on a prepared design."""
    opts = opts or SolverOptions()
    y = np.asarray(y, dtype=float).ravel()
    _check_finite("response", y)
    y_mean = float(y.mean())
    return _fit_centered(design, y - y_mean, y_mean, penalty, opts, beta0)


def fit(X, y, penalty: PenaltySpec, opts: Optional[SolverOptions] = None) -> RegressionFit:
    """Minimize (2n)^-1 sum (y_i - x_i'b)^2 + sum_l p_lambda(|b_l|) by coordinate descent."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    y = np.asarray(y, dtype=float).ravel()
    if X.shape[0] != y.size:
        raise InputError(f"X has {X.shape[0]} rows but y has {y.size} entries")
    if X.shape[0] < 2 or X.shape[1] < 1:
        raise InputError(f"need n >= 2 and d >= 1, got X of shape {X.shape}")
    _check_finite("X", X)
    _check_finite("y", y)
    return fit_design(StandardizedDesign(X), y, penalty, opts)


def lambda_max(design: StandardizedDesign, yc: np.ndarray) -> float:
    """Smallest lambda at which the penalized fit is identically zero."""
    if not np.any(design.valid):
        return 0.0
    return float(np.max(np.abs(design.cross(yc))))


def lambda_grid(lam_max: float, grid_size: int, min_ratio: float = LAMBDA_MIN_RATIO) -> np.ndarray:
    """Log-spaced grid from lam_max down to min_ratio * lam_max."""
    if grid_size < 1:
        raise DomainError(f"grid_size must be >= 1, got {grid_size}")
    if lam_max <= 0:
        return np.array([0.0])
    if grid_size == 1:
        return np.array([lam_max])
    return np.geomspace(lam_max, min_ratio * lam_max, grid_size)


def rate_lambda(y, n: int, d: int, constant: float) -> float:
    """lambda = C * sd(y) * sqrt(log d / n)."""
    y = np.asarray(y, dtype=float)
    return float(constant * np.std(y) * math.sqrt(math.log(max(d, 2)) / n))


@dataclass
class _Fold:
    train: np.ndarray
    test: np.ndarray
    design: StandardizedDesign
    X_test: np.ndarray


class CrossValidator:
    """K-fold splits of one design, standardized per training fold.

    Fold designs are built once and reused for any response and any column
    subset, so many nuisance regressions on the same X share the work.
    """

    def __init__(self, X, n_folds: int = 5, seed: int = 0):
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if n_folds < 2:
            raise DomainError(f"n_folds must be >= 2, got {n_folds}")
        n = X.shape[0]
        n_folds = min(n_folds, n)
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
        perm = rng.permutation(n)
        self.full = StandardizedDesign(X)
        self.folds: List[_Fold] = []
        for test in np.array_split(perm, n_folds):
            train = np.setdiff1d(perm, test)
            design = StandardizedDesign(X, rows=train)
            self.folds.append(_Fold(train, np.sort(test), design, design.standardize(X[np.sort(test)])))

    def select(
        self,
        y,
        penalty: PenaltySpec,
        grid_size: int,
        opts: Optional[SolverOptions] = None,
        columns: Optional[np.ndarray] = None,
    ) -> float:
        """lambda on the grid with the smallest cross-validated squared error."""
        opts = opts or SolverOptions()
        y = np.asarray(y, dtype=float).ravel()
        full = self.full if columns is None else self.full.subset(columns)
        grid = lambda_grid(lambda_max(full, y - y.mean()), grid_size)
        if grid.size == 1:
            return float(grid[0])

        errors = np.zeros(grid.size)
        for fold in self.folds:
            design = fold.design if columns is None else fold.design.subset(columns)
            X_test = fold.X_test if columns is None else fold.X_test[:, columns]
            y_train = y[fold.train]
            y_mean = y_train.mean()
            cross = design.cross(y_train - y_mean)
            beta = np.zeros(design.d)
            for i, lam in enumerate(grid):
                beta, _, _, _ = _solve(design, cross, penalty.with_lambda(lam), opts, beta)
                resid = y[fold.test] - y_mean - X_test @ beta
                errors[i] += resid @ resid
        best = int(np.argmin(errors))
        logger.debug(f"CV picked lambda={grid[best]:.4g} ({best + 1}/{grid.size} on grid)")
        return float(grid[best])


def select_lambda(
    X,
    y,
    penalty_family: str = "lasso",
    n_folds: int = 5,
    grid_size: int = 20,
    seed: int = 0,
    opts: Optional[SolverOptions] = None,
    scad_a: float = 3.7,
) -> float:
    """K-fold cross-validated lambda over a log-spaced grid below lambda_max."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    _check_finite("X", X)
    _check_finite("y", y)
    spec = PenaltySpec(family=penalty_family, lam=0.0, scad_a=scad_a)
    return CrossValidator(X, n_folds, seed).select(y, spec, grid_size, opts)


def fit_all_transforms(
    X,
    F,
    penalty: Union[PenaltySpec, Sequence[PenaltySpec]],
    opts: Optional[SolverOptions] = None,
    design: Optional[StandardizedDesign] = None,
) -> TransformFits:
    """Regress every transformed response f_k(Y) on all of X.

    penalty is either one spec for all columns of F or one spec per column.
    """
    F = np.asarray(F, dtype=float)
    if F.ndim == 1:
        F = F.reshape(-1, 1)
    if design is None:
        X = np.asarray(X, dtype=float)
        _check_finite("X", X)
        design = StandardizedDesign(X)
    specs = [penalty] * F.shape[1] if isinstance(penalty, PenaltySpec) else list(penalty)
    if len(specs) != F.shape[1]:
        raise InputError(f"got {len(specs)} penalties for {F.shape[1]} transforms")
    fits = [fit_design(design, F[:, k], specs[k], opts) for k in range(F.shape[1])]
    coefficients = np.column_stack([f.coefficients for f in fits])
    return TransformFits(coefficients=coefficients, fits=fits)


def fit_nuisance(
    X,
    j: int,
    penalty: PenaltySpec,
    opts: Optional[SolverOptions] = None,
    design: Optional[StandardizedDesign] = None,
) -> RegressionFit:
    """Regress column j (1-based) on all other columns.

    The residuals are the orthogonalization weights X_ij - Z_ij' theta_j.
    """
    if design is None:
        X = np.asarray(X, dtype=float)
        _check_finite("X", X)
        design = StandardizedDesign(X)
    p = design.d
    if not 1 <= j <= p:
        raise InputError(f"coordinate j={j} outside 1..{p}")
    if p < 2:
        raise InputError("nuisance regression needs at least two columns")
    col = j - 1
    keep = np.delete(np.arange(p), col)
    target_c = design.Xs[:, col] * design.scale[col]
    return _fit_centered(
        design.subset(keep), target_c, float(design.mean[col]), penalty, opts or SolverOptions()
    )

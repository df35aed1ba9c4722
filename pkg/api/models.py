"""Pydantic models for reports, API requests and API responses.

The CLI prints the same models: JSON through model_dump_json, TSV with the
columns in field order.
"""
from typing import List, Literal, Optional

from pydantic import BaseModel, Field


class CoordinateTestRow(BaseModel):
    """Score test of one coordinate."""
    j: int
    name: str
    statistic: float
    p_value: float
    delta_hat: float
    h: int
    regularized: bool = False
    converged: bool = True

    class Config:
        from_attributes = True


class TestReport(BaseModel):
    """Score tests of the requested coordinates of one dataset."""
    n: int
    p: int
    h: int
    penalty: str
    lambda_mode: str
    gamma_mode: str
    orthogonalize: bool = True
    knots: Optional[List[float]] = None
    results: List[CoordinateTestRow]


class FdrReport(BaseModel):
    """Threshold selection over all coordinates of one dataset."""
    n: int
    p: int
    h: int
    alpha: float
    d0: Optional[float] = None
    threshold: float
    search_cap: float
    used_fallback: bool
    fdp_estimate: float
    n_rejected: int
    rejected: List[CoordinateTestRow]


class RejectionRateRow(BaseModel):
    """Rejection rate of one coordinate over the replications of a design."""
    model: str
    n: int
    p: int
    h: int
    alpha: float
    j: int
    active: bool
    rate: float
    se: float
    replications: int


class FdrStudyRow(BaseModel):
    """Empirical FDR and power of one design."""
    model: str
    n: int
    p: int
    sparsity: int
    h: int
    alpha: float
    replications: int
    fdr: float
    fdr_se: float
    power: float
    power_se: float
    mean_rejections: float
    fallback_rate: float


class PowerSweepRow(BaseModel):
    """Rejection rate of one coordinate at one h."""
    model: str
    n: int
    p: int
    h: int
    alpha: float
    j: int
    active: bool
    rate: float
    se: float
    replications: int


class TailCheckRow(BaseModel):
    p: int
    bp: float
    tail: float
    ratio: float


class TailCheckReport(BaseModel):
    """Scaled chi-square tail at the search cap over a grid of p."""
    h: int
    d0: float
    spread: float
    bounded: bool
    rows: List[TailCheckRow]


class SimulationReport(BaseModel):
    """Output of a simulation run; only the parts of the chosen study are filled."""
    study: Literal["rejection", "fdr", "power-sweep"]
    seed: int
    rejection_rates: List[RejectionRateRow] = Field(default_factory=list)
    fdr: Optional[FdrStudyRow] = None
    power_sweep: List[PowerSweepRow] = Field(default_factory=list)
    tail_check: Optional[TailCheckReport] = None


class SimulationRequest(BaseModel):
    """Simulation study request model."""
    study: Literal["rejection", "fdr", "power-sweep"] = "rejection"
    model: Literal["I", "II", "III", "IV", "V"] = "I"
    n: int = Field(default=200, ge=20, le=5000)
    p: int = Field(default=200, ge=2, le=5000)
    rho: float = Field(default=0.5, gt=-1, lt=1)
    sparsity: int = Field(default=4, ge=1)
    seed: int = 42
    replications: int = Field(default=100, ge=1, le=1000)
    h: int = Field(default=5, ge=1, le=50)
    h_max: int = Field(default=20, ge=1, le=50)
    alpha: Optional[float] = Field(default=None, gt=0, lt=1)
    penalty: Literal["lasso", "scad"] = "lasso"
    lambda_mode: Literal["cv", "rate", "fixed"] = "cv"
    lambda_value: float = Field(default=1.0, ge=0)
    coordinates: Optional[List[int]] = None
    d0: Optional[float] = None
    cap_coefficient: Optional[float] = None
    fallback_coefficient: Optional[float] = None

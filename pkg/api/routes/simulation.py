"""Monte-Carlo simulation routes."""
import logging

from fastapi import APIRouter

from api.models import SimulationReport, SimulationRequest
from data_gen import SimDesign
from reports import power_sweep_report, simulation_report
from score_test import ScoreTestConfig

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/api/simulation", tags=["Simulation"])


@router.post("/run", response_model=SimulationReport)
def run_simulation(request: SimulationRequest):
    """Run a rejection, FDR or power-sweep study on a simulated design."""
    design = SimDesign(model=request.model, n=request.n, p=request.p, rho=request.rho,
                       sparsity=request.sparsity, seed=request.seed)
    test_config = ScoreTestConfig.with_lambda(
        request.lambda_mode, request.lambda_value, h=request.h, penalty=request.penalty, seed=request.seed
    )
    logger.info(f"Simulation request: {request.study} on model {request.model}, {request.replications} reps")
    if request.study == "power-sweep":
        return power_sweep_report(design, request.replications, range(1, request.h_max + 1), test_config,
                                  request.alpha, request.coordinates)
    return simulation_report(
        design, request.study, request.replications, test_config, request.alpha, request.coordinates,
        d0=request.d0, cap_coefficient=request.cap_coefficient, fallback_coefficient=request.fallback_coefficient,
    )

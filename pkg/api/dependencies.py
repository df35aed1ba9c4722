"""FastAPI dependencies."""
import io
import logging
from typing import Optional

from fastapi import File, Form, HTTPException, UploadFile

from config import config
from dataset import Dataset, read_csv
from errors import InputError
from regression.solver import SolverOptions
from score_test import ScoreTestConfig

logger = logging.getLogger(__name__)


async def get_dataset(file: UploadFile = File(...), response: str = Form("y")) -> Dataset:
    """Dependency to parse an uploaded CSV into a dataset."""
    content = await file.read()
    limit = config.api_max_upload_mb * 1024 * 1024
    if len(content) > limit:
        raise HTTPException(status_code=413, detail=f"upload exceeds {config.api_max_upload_mb} MB")
    buffer = io.BytesIO(content)
    buffer.name = file.filename or "upload.csv"
    try:
        return read_csv(buffer, response)
    except InputError as e:
        raise HTTPException(status_code=400, detail=str(e))


def get_test_config(
    h: int = Form(config.default_h),
    penalty: str = Form("lasso"),
    lambda_mode: str = Form("cv"),
    lambda_value: float = Form(1.0),
    gamma_mode: Optional[str] = Form(None),
    orthogonalize: bool = Form(True),
    scad_method: str = Form("lla"),
    seed: int = Form(config.seed),
) -> ScoreTestConfig:
    """Dependency to build the score-test configuration from form fields.

    lambda_value is the rate constant in rate mode and lambda itself in fixed mode.
    """
    return ScoreTestConfig.with_lambda(
        lambda_mode,
        lambda_value,
        h=h,
        penalty=penalty,
        gamma_mode=gamma_mode or None,
        orthogonalize=orthogonalize,
        seed=seed,
        solver=SolverOptions(scad_method=scad_method),
    )

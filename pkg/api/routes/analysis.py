"""Score test and FDR selection routes over uploaded CSV data."""
import logging
from typing import Optional

import numpy as np
from fastapi import APIRouter, Depends, Form

from api.dependencies import get_dataset, get_test_config
from api.models import FdrReport, TestReport
from dataset import Dataset, parse_coordinates
from fdr import FdrConfig, find_threshold
from reports import build_fdr_report, build_test_report
from score_test import ScoreTester, ScoreTestConfig

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/api/analysis", tags=["Analysis"])


@router.post("/test", response_model=TestReport)
def run_test(
    coordinates: Optional[str] = Form(None),
    data: Dataset = Depends(get_dataset),
    test_config: ScoreTestConfig = Depends(get_test_config),
):
    """Score tests of the listed coordinates ('1,2,5' or '1-10'; all when omitted)."""
    coords = parse_coordinates(coordinates) if coordinates else list(range(1, data.p + 1))
    tester = ScoreTester(data, test_config)
    mode = "direct" if len(coords) == 1 else "shared"
    results = tester.test_many(coords, gamma_mode=mode)
    return build_test_report(tester, results, mode)


@router.post("/fdr", response_model=FdrReport)
def run_fdr(
    alpha: float = Form(0.1),
    d0: Optional[float] = Form(None),
    cap_coefficient: Optional[float] = Form(None),
    fallback_coefficient: Optional[float] = Form(None),
    data: Dataset = Depends(get_dataset),
    test_config: ScoreTestConfig = Depends(get_test_config),
):
    """Threshold selection over all coordinates at FDR level alpha.

    cap_coefficient and fallback_coefficient go together; a lone one is a 400.
    """
    tester = ScoreTester(data, test_config)
    fdr_config = FdrConfig.for_region(alpha, tester.h, data.p, d0, cap_coefficient, fallback_coefficient)
    results = tester.test_many(None, gamma_mode="shared")
    stats = np.array([r.statistic for r in results])
    selection = find_threshold(stats, fdr_config)
    logger.info(f"FDR selection over upload: {len(selection.rejected)} of {data.p} rejected")
    return build_fdr_report(data, fdr_config, selection, results)

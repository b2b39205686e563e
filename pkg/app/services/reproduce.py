"""Whole-table verification: sample every row, classify, scan and compare."""
import logging
from typing import Callable, Dict, List, Optional, Union

import numpy as np

from app.config import settings
from app.schemas.classify import NonUnimodularRow, UnimodularRow
from app.schemas.report import ReproduceMatrix, ReproduceRow, ReproduceSample
from app.schemas.structure import NonUnimodularStructure, UnimodularStructure
from app.services.algebra import AnyStructure
from app.services.classify import classify, compare
from app.services.scan import numeric_scan

logger = logging.getLogger(__name__)

Row = Union[UnimodularRow, NonUnimodularRow]
Sampler = Callable[[np.random.Generator], AnyStructure]

# Distance kept from case boundaries and from zero when sampling.
MARGIN = 0.25


def _draw(rng: np.random.Generator, k: int, low: float, high: float) -> np.ndarray:
    """k values in [low, high], sorted descending, pairwise and from zero at least MARGIN apart."""
    while True:
        values = np.sort(rng.uniform(low, high, size=k))[::-1]
        if np.all(np.abs(values) >= MARGIN) and (k == 1 or np.min(-np.diff(values)) >= MARGIN):
            return values


def _uni(c1: float, c2: float, c3: float) -> UnimodularStructure:
    return UnimodularStructure(c1=float(c1), c2=float(c2), c3=float(c3))


def _nonuni(alpha: float, beta: float) -> NonUnimodularStructure:
    return NonUnimodularStructure(alpha=float(alpha), beta=float(beta))


def _kernel_bound(alpha: float) -> float:
    """beta at which D = 1 for a given alpha in (0, 1)."""
    return alpha / np.sqrt(1.0 - alpha ** 2)


def _sample_top_pair(rng):
    a, b = _draw(rng, 2, -4, 4)
    return _uni(a, b, b)


def _sample_bottom_pair(rng):
    a, b = _draw(rng, 2, -4, 4)
    return _uni(a, a, b)


def _sample_ppm(rng):
    a, b = _draw(rng, 2, 0, 4)
    return _uni(a, b, _draw(rng, 1, -4, 0)[0])


def _sample_pmm(rng):
    a = _draw(rng, 1, 0, 4)[0]
    b, c = _draw(rng, 2, -4, 0)
    return _uni(a, b, c)


def _sample_last_zero(rng):
    a, b = _draw(rng, 2, 0, 4)
    return _uni(a, b, 0)


def _sample_first_zero(rng):
    b, c = _draw(rng, 2, -4, 0)
    return _uni(0, b, c)


def _sample_above_one(rng):
    alpha = rng.uniform(0.0, 0.8)
    return _nonuni(alpha, rng.uniform(_kernel_bound(alpha) + MARGIN, 3.0))


def _sample_d_one(rng):
    alpha = rng.uniform(0.1, 0.9)
    return _nonuni(alpha, _kernel_bound(alpha))


def _sample_between(rng):
    alpha = rng.uniform(0.3, 0.9)
    return _nonuni(alpha, _kernel_bound(alpha) * rng.uniform(0.25, 0.75))


UNIMODULAR_SAMPLERS: Dict[UnimodularRow, Sampler] = {
    UnimodularRow.ALL_EQUAL_NONZERO: lambda rng: _uni(*[_draw(rng, 1, -4, 4)[0]] * 3),
    UnimodularRow.ALL_ZERO: lambda rng: _uni(0, 0, 0),
    UnimodularRow.TOP_NONZERO_PAIR: _sample_top_pair,
    UnimodularRow.TOP_ZERO_PAIR: lambda rng: _uni(_draw(rng, 1, 0, 4)[0], 0, 0),
    UnimodularRow.BOTTOM_NONZERO_PAIR: _sample_bottom_pair,
    UnimodularRow.BOTTOM_ZERO_PAIR: lambda rng: _uni(0, 0, _draw(rng, 1, -4, 0)[0]),
    UnimodularRow.DISTINCT_PPP: lambda rng: _uni(*_draw(rng, 3, 0, 4)),
    UnimodularRow.DISTINCT_PPM: _sample_ppm,
    UnimodularRow.DISTINCT_PMM: _sample_pmm,
    UnimodularRow.DISTINCT_MMM: lambda rng: _uni(*_draw(rng, 3, -4, 0)),
    UnimodularRow.DISTINCT_LAST_ZERO: _sample_last_zero,
    UnimodularRow.DISTINCT_MIDDLE_ZERO: lambda rng: _uni(_draw(rng, 1, 0, 4)[0], 0, _draw(rng, 1, -4, 0)[0]),
    UnimodularRow.DISTINCT_FIRST_ZERO: _sample_first_zero,
}

NONUNIMODULAR_SAMPLERS: Dict[NonUnimodularRow, Sampler] = {
    NonUnimodularRow.D_ABOVE_ONE: _sample_above_one,
    NonUnimodularRow.D_ONE_HYPERBOLIC: lambda rng: _nonuni(0, 0),
    NonUnimodularRow.D_ONE: _sample_d_one,
    NonUnimodularRow.D_BETWEEN_BETA_ZERO: lambda rng: _nonuni(rng.uniform(0.1, 0.9), 0),
    NonUnimodularRow.D_BETWEEN: _sample_between,
    NonUnimodularRow.D_ZERO_BETA_ZERO: lambda rng: _nonuni(1, 0),
    NonUnimodularRow.D_ZERO: lambda rng: _nonuni(1, rng.uniform(MARGIN, 3.0)),
    NonUnimodularRow.D_NEGATIVE_BETA_ZERO: lambda rng: _nonuni(rng.uniform(1.0 + MARGIN, 3.0), 0),
    NonUnimodularRow.D_NEGATIVE: lambda rng: _nonuni(rng.uniform(1.0 + MARGIN, 3.0), rng.uniform(MARGIN, 3.0)),
}


def table_rows(family: str) -> List[Row]:
    if family == "unimodular":
        return list(UNIMODULAR_SAMPLERS)
    if family == "nonunimodular":
        return list(NONUNIMODULAR_SAMPLERS)
    raise ValueError(f"unknown family {family!r}")


def sample_row(row: Row, n: int, rng: np.random.Generator) -> List[AnyStructure]:
    sampler = UNIMODULAR_SAMPLERS.get(row) or NONUNIMODULAR_SAMPLERS[row]
    return [sampler(rng) for _ in range(n)]


def verify_structure(
    s: AnyStructure,
    grid_n: int,
    tolerance: Optional[float] = None,
) -> ReproduceSample:
    solution_set = classify(s)
    scan = numeric_scan(s, grid_n=grid_n, tolerance=tolerance)
    match = compare(solution_set, scan)
    return ReproduceSample(
        structure=s,
        case_label=solution_set.case_label,
        components=len(solution_set.components),
        scan_points=len(scan.points),
        unmatched_points=len(match.unmatched_points),
        matched=match.matched,
    )


def reproduce_table(
    family: str,
    samples: Optional[int] = None,
    seed: Optional[int] = None,
    grid_n: Optional[int] = None,
    tolerance: Optional[float] = None,
) -> ReproduceMatrix:
    samples = settings.reproduce_samples if samples is None else samples
    seed = settings.reproduce_seed if seed is None else seed
    grid_n = settings.reproduce_grid_n if grid_n is None else grid_n
    rng = np.random.default_rng(seed)
    verified: Dict[AnyStructure, ReproduceSample] = {}

    rows = []
    for row in table_rows(family):
        results = []
        for s in sample_row(row, samples, rng):
            if s not in verified:
                verified[s] = verify_structure(s, grid_n, tolerance)
            results.append(verified[s])
        passed = all(r.matched and r.case_label == row.value for r in results)
        logger.info("row %s: %s", row.value, "pass" if passed else "FAIL")
        rows.append(ReproduceRow(row=row.value, passed=passed, samples=results))

    return ReproduceMatrix(
        family=family,
        samples=samples,
        seed=seed,
        grid_n=grid_n,
        rows=rows,
        passed=all(r.passed for r in rows),
    )

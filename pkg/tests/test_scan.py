import numpy as np
import pytest

from app.schemas.classify import ScanStats
from app.services.classify import classify, compare
from app.services.scan import MagneticSystem, numeric_scan, scan_passes
from app.services.magnetic import magnetic_terms
from tests.conftest import nonuni, random_unit, uni

GRID_N = 48


def _points(result):
    return np.array([p.x.as_tuple() for p in result.points]).reshape(-1, 3)


def test_scan_passes():
    assert [p.kind for p in scan_passes("both")] == ["any", "free"]
    assert [p.kind for p in scan_passes("free")] == ["free"]
    (fixed,) = scan_passes(-0.25)
    assert fixed.kind == "fixed" and fixed.q == -0.25
    assert scan_passes("-1.5")[0].q == -1.5
    with pytest.raises(ValueError):
        scan_passes("sometimes")


def test_scan_rejects_coarse_grids():
    with pytest.raises(ValueError):
        numeric_scan(uni(1, 2, 3), grid_n=8)


def test_system_matches_residual_kernels(rng):
    s = nonuni(0.7, 1.9)
    X = random_unit(rng, 20)
    A, B, S = MagneticSystem(s).terms(X)
    A2, B2, S2 = magnetic_terms(s, X)
    np.testing.assert_allclose(A, A2, atol=1e-12)
    np.testing.assert_allclose(B, B2, atol=1e-12)
    np.testing.assert_allclose(S, S2, atol=1e-12)


def test_jacobians_match_finite_differences(rng):
    system = MagneticSystem(uni(2.5, -1.0, 0.5))
    x = random_unit(rng, 1)
    JA, JB, JS = system.jacobians(x)
    h = 1e-6
    for k in range(3):
        step = np.zeros((1, 3))
        step[0, k] = h
        plus, minus = system.terms(x + step), system.terms(x - step)
        for J, p, m in zip((JA, JB, JS), plus, minus):
            np.testing.assert_allclose(J[0, :, k], (p[0] - m[0]) / (2 * h), atol=1e-6)


def test_axes_of_a_generic_group():
    s = uni(3, 2, 1)
    result = numeric_scan(s, grid_n=GRID_N)
    X = np.abs(_points(result))
    assert len(result.points) == 3
    assert all(p.q.is_any for p in result.points)
    np.testing.assert_allclose(X[np.argsort(np.argmax(X, axis=1))], np.eye(3), atol=1e-8)
    assert compare(classify(s), result).matched


def test_hyperbolic_space_scan_is_empty():
    s = nonuni(0, 0.7)
    result = numeric_scan(s, grid_n=GRID_N)
    assert result.points == []
    assert compare(classify(s), result).matched


def test_alpha_one_scan_finds_the_corrected_charge():
    s = nonuni(1, 1)
    result = numeric_scan(s, grid_n=GRID_N)
    fixed = [p for p in result.points if not p.q.is_any]
    anyq = [p for p in result.points if p.q.is_any]
    assert len(fixed) == 1 and len(anyq) == 1
    assert fixed[0].q.value == pytest.approx(-5.0, abs=1e-8)
    assert fixed[0].x.as_tuple() == pytest.approx((0.0, 2 ** -0.5, 2 ** -0.5), abs=1e-8)
    assert anyq[0].x.as_tuple() == pytest.approx((0.0, 0.0, 1.0), abs=1e-8)


@pytest.mark.parametrize("s", [uni(1, 0, 0), uni(2, 2, 2), uni(1, 0, -1), nonuni(0, 0), nonuni(0.5, 0.3)])
def test_scan_agrees_with_classification(s):
    result = numeric_scan(s, grid_n=GRID_N)
    report = compare(classify(s), result)
    assert report.matched, [m.model_dump() for m in report.components]


def test_round_sphere_scan_covers_the_sphere():
    s = uni(2, 2, 2)
    report = compare(classify(s), numeric_scan(s, grid_n=GRID_N))
    assert report.sphere_covered


def test_scan_points_are_canonical_and_below_tolerance():
    result = numeric_scan(uni(1, 0, -1), grid_n=GRID_N)
    X = _points(result)
    pivots = X[np.arange(len(X)), np.argmax(np.abs(X), axis=1)]
    assert np.all(pivots > 0)
    assert all(p.residual < 1e-9 for p in result.points)


def test_fixed_charge_mode():
    result = numeric_scan(uni(1, 0, 0), grid_n=GRID_N, q_mode=-0.25)
    assert len(result.points) > 100
    assert all(p.q.is_any or p.q.value == -0.25 for p in result.points)


def test_scan_statistics():
    stats = numeric_scan(uni(3, 2, 1), grid_n=GRID_N).stats
    assert isinstance(stats, ScanStats)
    assert stats.grid_points == GRID_N ** 2
    assert stats.seeds == stats.converged + stats.failed
    assert 0 < stats.max_iterations <= 50


@pytest.mark.slow
def test_generic_group_on_the_full_grid():
    s = uni(3, 2, 1)
    result = numeric_scan(s, grid_n=256)
    assert len(result.points) == 3
    assert result.stats.converged > 1000
    assert compare(classify(s), result).matched

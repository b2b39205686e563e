import numpy as np
import pytest
from hypothesis import given
from numpy.testing import assert_allclose

from app.errors import NonUnitVectorError
from app.services.algebra import mu_constants, structure_constants
from app.services.geometry import (
    curvature_from_connection, koszul_array, nabla, rough_laplacian_matrix,
)
from app.services.magnetic import (
    axis_table, check_field, covariant_self_derivative, curvature_trace, harmonic_field_residual,
    harmonic_map_residual, harmonic_unit_residual, lh_critical_residual, magnetic_terms, solve_q,
    tm_magnetic_residual, trace_tensor_from, unit_magnetic_residual, uvw,
)
from tests.conftest import (
    nonuni, random_nonunimodular, random_unimodular, random_unit, structures, uni,
    unimodular_structures, unit_vectors,
)


def _vec(frame_vector):
    return np.array(frame_vector.as_tuple())


# ==================== CURVATURE TRACE ====================

def test_curvature_trace_matches_direct_evaluation(rng):
    for s in random_unimodular(rng, 200) + random_nonunimodular(rng, 200):
        C = structure_constants(s)
        gamma = koszul_array(C)
        T = trace_tensor_from(gamma, curvature_from_connection(gamma, C))
        for x in random_unit(rng, 5):
            direct = np.einsum("ljb,j,b->l", T, x, x)
            assert_allclose(_vec(curvature_trace(s, x)), direct, atol=1e-10)


def test_curvature_trace_examples():
    e1 = [1, 0, 0]
    assert curvature_trace(uni(3, -1, 2), e1).norm() == 0.0
    assert curvature_trace(uni(0, 0, 0), [0.6, 0, 0.8]).norm() == 0.0
    a, b = 0.4, 1.3
    constants = uvw(nonuni(a, b))
    u, v = constants.u, constants.v
    trace = curvature_trace(nonuni(a, b), e1)
    assert trace.x1 == pytest.approx(-(1 + a) * u + (1 - a) * v)
    assert (trace.x2, trace.x3) == (0.0, 0.0)


@given(unimodular_structures, unit_vectors())
def test_unimodular_first_equation_factors(s, x):
    q = 0.7
    m = mu_constants(s)
    c1, c2, c3 = s.constants
    x1, x2, x3 = x
    expected = [
        (m.mu1 * c1 - m.mu2 * m.mu3 + q) * (c2 - c3) * x2 * x3,
        (m.mu2 * c2 - m.mu3 * m.mu1 + q) * (c3 - c1) * x3 * x1,
        (m.mu3 * c3 - m.mu1 * m.mu2 + q) * (c1 - c2) * x1 * x2,
    ]
    assert_allclose(_vec(unit_magnetic_residual(s, x, q).first), expected, atol=1e-10)


@given(structures, unit_vectors())
def test_self_derivative_is_nabla_x_x(s, x):
    assert_allclose(_vec(covariant_self_derivative(s, x)), _vec(nabla(s, x, x)), atol=1e-14)


@given(structures, unit_vectors())
def test_vectorized_terms_match_scalar_operations(s, x):
    A, B, S = magnetic_terms(s, x[None, :])
    assert_allclose(A[0], _vec(curvature_trace(s, x)), atol=1e-10)
    assert_allclose(B[0], _vec(covariant_self_derivative(s, x)), atol=1e-12)
    assert_allclose(S[0], _vec(harmonic_unit_residual(s, x)), atol=1e-12)


# ==================== UNIT MAGNETIC SYSTEM ====================

@given(unit_vectors())
def test_heisenberg_is_magnetic_everywhere_at_minus_quarter(x):
    assert unit_magnetic_residual(uni(1, 0, 0), x, -0.25).max_norm() < 1e-12


@pytest.mark.parametrize("q", [-10.0, 0.0, 3.5])
def test_frame_axes_are_magnetic_for_any_charge(q):
    for axis in np.eye(3):
        assert unit_magnetic_residual(uni(3, 2, 1), axis, q).max_norm() == 0.0


@pytest.mark.parametrize("q", [-5.0, -1.0, 0.0, 2.0])
def test_hyperbolic_space_has_no_magnetic_fields_off_the_kernel(q):
    residual = unit_magnetic_residual(nonuni(0, 1), [0.6, 0.8, 0.0], q)
    assert residual.max_norm() > 1e-3


@given(structures, unit_vectors())
def test_residual_under_sign_flip(s, x):
    plus = unit_magnetic_residual(s, x, 1.3)
    minus = unit_magnetic_residual(s, -x, 1.3)
    # first equation is quadratic in x, the tension is odd
    assert_allclose(_vec(minus.first), _vec(plus.first), rtol=0, atol=1e-14)
    assert_allclose(_vec(minus.second), -_vec(plus.second), rtol=0, atol=1e-14)


@given(structures, unit_vectors())
def test_tension_is_tangent_to_the_sphere(s, x):
    second = _vec(unit_magnetic_residual(s, x, 0.0).second)
    scale = max(1.0, float(np.max(np.abs(rough_laplacian_matrix(s)))))
    assert abs(second @ x) < 1e-13 * scale


def test_landau_hall_identity_on_random_pairs(rng):
    sample = random_unimodular(rng, 50) + random_nonunimodular(rng, 50)
    for s in sample:
        for x in random_unit(rng, 100):
            q = rng.uniform(-10, 10)
            assert unit_magnetic_residual(s, x, q).second == harmonic_unit_residual(s, x)


def test_unit_operations_reject_non_unit_vectors():
    with pytest.raises(NonUnitVectorError):
        unit_magnetic_residual(uni(1, 2, 3), [1, 1, 0], 0.0)
    with pytest.raises(NonUnitVectorError):
        harmonic_unit_residual(uni(1, 2, 3), [0, 0, 2])
    with pytest.raises(NonUnitVectorError):
        solve_q(uni(1, 2, 3), [0.1, 0, 0])


# ==================== TANGENT BUNDLE VARIANTS ====================

def test_tm_magnetic_residual():
    assert tm_magnetic_residual(uni(1, 2, 3), [0, 0, 0], 2.0).max_norm() == 0.0
    assert tm_magnetic_residual(uni(0, 0, 0), [0.5, 2.0, -1.0], 0.0).max_norm() == 0.0
    assert tm_magnetic_residual(uni(1, 0, 0), [1, 0, 0], -0.5).second.norm() == pytest.approx(0.0)


def test_lh_critical_residual_is_tm_second_component(rng):
    s = nonuni(0.3, 0.9)
    x = rng.normal(size=3)
    assert lh_critical_residual(s, x, 1.5) == tm_magnetic_residual(s, x, 1.5).second
    assert lh_critical_residual(uni(0, 0, 0), x, 0.0).norm() == 0.0
    assert lh_critical_residual(uni(1, 0, 0), [0, 1, 0], -0.5).norm() == pytest.approx(0.0)


def test_harmonic_unit_residual_examples():
    assert harmonic_unit_residual(uni(2, 2, 2), [1, 0, 0]).norm() == pytest.approx(0.0)
    assert harmonic_unit_residual(nonuni(0, 0), [0, 1, 0]).norm() == pytest.approx(0.0)
    assert harmonic_unit_residual(nonuni(0, 1), [0, 1, 0]).norm() > 1.0


def test_harmonic_field_and_map_residuals():
    assert harmonic_field_residual(uni(0, 0, 0), [1, 2, 3]).norm() == 0.0
    assert harmonic_field_residual(uni(1, 0, 0), [1, 0, 0]).as_tuple() == pytest.approx((0.5, 0, 0))
    assert harmonic_map_residual(uni(0, 0, 0), [1, 2, 3]).max_norm() == 0.0
    assert harmonic_map_residual(uni(1, 0, 0), [0, 0, 1]).second.norm() > 0


# ==================== CHARGE EXTRACTION ====================

@pytest.mark.parametrize("beta, q", [(1.0, -5.0), (2.0, -8.0), (0.5, -4.25)])
def test_solve_q_alpha_one_pair(beta, q):
    x = np.array([0.0, 1.0, beta]) / np.sqrt(1 + beta ** 2)
    result = solve_q(nonuni(1, beta), x)
    assert result.kind == "fixed"
    assert result.value == pytest.approx(q, rel=1e-12)


def test_solve_q_examples():
    assert solve_q(uni(3, 2, 1), [0, 1, 0]).is_any
    assert solve_q(nonuni(0, 1), [1, 0, 0]) is None
    assert solve_q(uni(1, 0, 0), [0, 0.6, 0.8]).is_any
    assert solve_q(uni(1, 0, 0), [0.6, 0, 0.8]).value == pytest.approx(-0.25)
    assert solve_q(nonuni(0, 0), [0, 0.6, 0.8]).value == pytest.approx(-1.0)


def test_solve_q_rejects_fields_failing_the_tension_equation():
    x = np.array([1.0, 1.0, 1.0]) / np.sqrt(3)
    assert solve_q(uni(3, 2, 1), x) is None


def test_axis_table():
    verdicts = axis_table(uni(3, 2, 1))
    assert [v.axis for v in verdicts] == [1, 2, 3]
    assert all(v.q.is_any for v in verdicts)
    e2, e3 = axis_table(nonuni(1, 0))[1:]
    assert e2.q.value == pytest.approx(-4.0)
    assert e3.q.is_any


# ==================== CHECK ====================

def test_check_field_with_charge():
    result = check_field(uni(1, 0, 0), [0.6, 0.8, 0], -0.25)
    assert result.magnetic
    assert result.first_norm < 1e-12 and result.second_norm < 1e-12


def test_check_field_solves_for_charge():
    result = check_field(nonuni(0, 1), [1, 0, 0])
    assert not result.magnetic
    assert result.solved_q is None
    flat = check_field(uni(0, 0, 0), [1, 0, 0])
    assert flat.magnetic and flat.solved_q.is_any


def test_check_field_renormalizes_near_unit_input():
    result = check_field(uni(1, 0, 0), [0.6, 0.8, 1e-8], -0.25)
    assert result.x.norm() == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(NonUnitVectorError):
        check_field(uni(1, 0, 0), [0.6, 0.8, 0.1])

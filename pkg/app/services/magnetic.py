"""Magnetic residual systems for left-invariant fields.

The first equation is written A(x) = q B(x) with
    A = tr R(nabla . X, X) .   (curvature trace)
    B = nabla_X X
and the unit second equation is the harmonic-unit tension
    S = rough Laplacian X - |nabla X|^2 X.
A and B are quadratic in x, S is cubic on the sphere.
"""
import logging
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np

from app.config import settings
from app.schemas.magnetic import AxisVerdict, CheckResult, QConstraint, ResidualPair
from app.schemas.structure import UVW, FrameVector, NonUnimodularStructure, UnimodularStructure
from app.services.algebra import (
    AnyStructure, VectorLike, as_array, mu_constants, require_unit, uvw_values,
)
from app.services.geometry import (
    connection_array, curvature_array, rough_laplacian_matrix, sectional_array,
)

logger = logging.getLogger(__name__)


def uvw(s: NonUnimodularStructure) -> UVW:
    u, v, w = uvw_values(s)
    return UVW(u=u, v=v, w=w)


# ==================== VECTORIZED KERNELS ====================

@lru_cache(maxsize=1024)
def trace_tensor(s: AnyStructure) -> np.ndarray:
    """T[l, j, b] with A(x)_l = sum_jb T[l, j, b] x_j x_b."""
    return trace_tensor_from(connection_array(s), curvature_array(s))


def trace_tensor_from(gamma: np.ndarray, r: np.ndarray) -> np.ndarray:
    T = np.einsum("ija,abil->ljb", gamma, r)
    T.flags.writeable = False
    return T


def curvature_trace_array(s: AnyStructure, X: np.ndarray) -> np.ndarray:
    """A(x) for a stack of vectors X of shape (n, 3)."""
    return np.einsum("ljb,nj,nb->nl", trace_tensor(s), X, X)


def self_derivative_array(s: AnyStructure, X: np.ndarray) -> np.ndarray:
    """B(x) = nabla_X X for a stack of vectors."""
    return np.einsum("ijl,ni,nj->nl", connection_array(s), X, X)


def tension_array(s: AnyStructure, X: np.ndarray) -> np.ndarray:
    """S(x) = L x - (x . L x) x for a stack of vectors."""
    LX = X @ rough_laplacian_matrix(s).T
    energy = np.einsum("ni,ni->n", X, LX)
    return LX - energy[:, None] * X


def magnetic_terms(s: AnyStructure, X: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    return curvature_trace_array(s, X), self_derivative_array(s, X), tension_array(s, X)


# ==================== SCALAR OPERATIONS ====================

def _curvature_trace(s: AnyStructure, x: np.ndarray) -> np.ndarray:
    if isinstance(s, UnimodularStructure):
        # (M x) x (K x), M = diag(mu), K = diag(K23, K13, K12)
        mu = np.asarray(mu_constants(s).as_tuple())
        k12, k13, k23 = sectional_array(s)
        return np.cross(mu * x, np.array([k23, k13, k12]) * x)
    a, b = s.alpha, s.beta
    u, v, w = uvw_values(s)
    x1, x2, x3 = x
    p = (1 + a) * x2 + a * b * x3
    q = a * b * x2 + (1 - a) * x3
    return np.array([
        -u * (p * x2 + (1 + a) * x1 ** 2) + v * ((1 - a) * x1 ** 2 + q * x3),
        b * x1 * x3 * (u + a * w) - (1 - a) * w * x1 * x2,
        b * x1 * x2 * (v + a * w) - (1 + a) * w * x1 * x3,
    ])


def _self_derivative(s: AnyStructure, x: np.ndarray) -> np.ndarray:
    return np.einsum("i,j,ijl->l", x, x, connection_array(s))


def _tension(s: AnyStructure, x: np.ndarray) -> np.ndarray:
    Lx = rough_laplacian_matrix(s) @ x
    return Lx - (x @ Lx) * x


def _shifted_laplacian(s: AnyStructure, x: np.ndarray, q: float) -> np.ndarray:
    return rough_laplacian_matrix(s) @ x + q * x


def curvature_trace(s: AnyStructure, x: VectorLike) -> FrameVector:
    """sum_i R(nabla_{e_i} X, X) e_i."""
    return FrameVector.from_array(_curvature_trace(s, as_array(x)))


def covariant_self_derivative(s: AnyStructure, x: VectorLike) -> FrameVector:
    return FrameVector.from_array(_self_derivative(s, as_array(x)))


def unit_magnetic_residual(s: AnyStructure, x: VectorLike, q: float) -> ResidualPair:
    x = require_unit(as_array(x))
    first = _curvature_trace(s, x) - q * _self_derivative(s, x)
    return ResidualPair(first=FrameVector.from_array(first), second=FrameVector.from_array(_tension(s, x)))


def harmonic_unit_residual(s: AnyStructure, x: VectorLike) -> FrameVector:
    x = require_unit(as_array(x))
    return FrameVector.from_array(_tension(s, x))


def tm_magnetic_residual(s: AnyStructure, x: VectorLike, q: float) -> ResidualPair:
    """Magnetic system for fields into the full tangent bundle; x need not be unit."""
    x = as_array(x)
    first = _curvature_trace(s, x) - q * _self_derivative(s, x)
    return ResidualPair(
        first=FrameVector.from_array(first),
        second=FrameVector.from_array(_shifted_laplacian(s, x, q)),
    )


def lh_critical_residual(s: AnyStructure, x: VectorLike, q: float) -> FrameVector:
    return FrameVector.from_array(_shifted_laplacian(s, as_array(x), q))


def harmonic_field_residual(s: AnyStructure, x: VectorLike) -> FrameVector:
    return FrameVector.from_array(rough_laplacian_matrix(s) @ as_array(x))


def harmonic_map_residual(s: AnyStructure, x: VectorLike) -> ResidualPair:
    """Both components vanish iff X is a harmonic map into TM."""
    x = as_array(x)
    return ResidualPair(
        first=FrameVector.from_array(_curvature_trace(s, x)),
        second=FrameVector.from_array(rough_laplacian_matrix(s) @ x),
    )


def solve_q(
    s: AnyStructure,
    x: VectorLike,
    tolerance: Optional[float] = None,
) -> Optional[QConstraint]:
    """Charge for which unit X is magnetic, AnyQ, or None."""
    eps_res = settings.eps_res if tolerance is None else tolerance
    x = require_unit(as_array(x))
    if np.linalg.norm(_tension(s, x)) >= eps_res:
        return None
    A = _curvature_trace(s, x)
    B = _self_derivative(s, x)
    b_norm = np.linalg.norm(B)
    if b_norm < settings.eps_b:
        return QConstraint.any_q() if np.linalg.norm(A) < eps_res else None
    q_star = float(A @ B / (B @ B))
    if np.linalg.norm(A - q_star * B) < eps_res:
        return QConstraint.fixed(q_star)
    return None


def axis_table(s: AnyStructure) -> List[AxisVerdict]:
    """solve_q verdict for each frame axis."""
    return [
        AxisVerdict(axis=i + 1, q=solve_q(s, np.eye(3)[i]))
        for i in range(3)
    ]


def check_field(
    s: AnyStructure,
    x: VectorLike,
    q: Optional[float] = None,
    tolerance: Optional[float] = None,
) -> CheckResult:
    """Residual norms and verdict for one field, renormalizing near-unit input."""
    eps_res = settings.eps_res if tolerance is None else tolerance
    x = require_unit(as_array(x), settings.check_unit_tol)
    x = x / np.linalg.norm(x)
    solved = solve_q(s, x, eps_res)
    if q is None:
        residual = unit_magnetic_residual(s, x, solved.value if solved and not solved.is_any else 0.0)
        magnetic = solved is not None
    else:
        residual = unit_magnetic_residual(s, x, q)
        magnetic = residual.max_norm() < eps_res
    first_norm, second_norm = residual.norms()
    logger.info("check %s x=%s q=%s magnetic=%s", s.label(), x.tolist(), q, magnetic)
    return CheckResult(
        x=FrameVector.from_array(x),
        q=q,
        first_norm=first_norm,
        second_norm=second_norm,
        solved_q=solved,
        magnetic=magnetic,
    )

"""Levi-Civita geometry of left-invariant metrics in the orthonormal frame.

Index conventions (0-based arrays):
    gamma[i, j, k]   e_k coefficient of nabla_{e_i} e_j
    r[i, j, k, l]    e_l coefficient of R(e_i, e_j) e_k
with R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z.
"""
import logging
from functools import lru_cache
from typing import Tuple, Union

import numpy as np

from app.config import settings
from app.errors import FrameIndexError, StructureError
from app.schemas.geometry import (
    ConnectionTable, CurvatureTensor, PhiSectional, RicciData, SectionalCurvatures,
)
from app.schemas.structure import FrameVector, NonUnimodularStructure, UnimodularStructure
from app.services.algebra import (
    AnyStructure, VectorLike, as_array, mu_constants, require_unit, structure_constants,
    uvw_values,
)

logger = logging.getLogger(__name__)

StructureOrTensor = Union[UnimodularStructure, NonUnimodularStructure, np.ndarray]


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


def _tensor(s: StructureOrTensor) -> np.ndarray:
    if isinstance(s, np.ndarray):
        if s.shape != (3, 3, 3):
            raise StructureError(f"structure tensor must have shape (3, 3, 3), got {s.shape}")
        return s
    return structure_constants(s)


# ==================== CONNECTION ====================

def koszul_array(C: np.ndarray) -> np.ndarray:
    """2 g(nabla_X Y, Z) = g([X,Y],Z) - g([Y,Z],X) + g([Z,X],Y) on frame triples."""
    return 0.5 * (C - np.einsum("jki->ijk", C) + np.einsum("kij->ijk", C))


@lru_cache(maxsize=1024)
def connection_array(s: AnyStructure) -> np.ndarray:
    gamma = np.zeros((3, 3, 3))
    if isinstance(s, UnimodularStructure):
        mu1, mu2, mu3 = mu_constants(s).as_tuple()
        gamma[0, 1, 2], gamma[0, 2, 1] = mu1, -mu1
        gamma[1, 2, 0], gamma[1, 0, 2] = mu2, -mu2
        gamma[2, 0, 1], gamma[2, 1, 0] = mu3, -mu3
    else:
        a, b = s.alpha, s.beta
        gamma[0, 1, 2], gamma[0, 2, 1] = b, -b
        gamma[1, 0, 1], gamma[1, 0, 2] = -(1 + a), -a * b
        gamma[1, 1, 0], gamma[1, 2, 0] = 1 + a, a * b
        gamma[2, 0, 1], gamma[2, 0, 2] = -a * b, -(1 - a)
        gamma[2, 1, 0], gamma[2, 2, 0] = a * b, 1 - a
    return _readonly(gamma)


def koszul_connection(s: StructureOrTensor) -> ConnectionTable:
    return ConnectionTable.from_array(koszul_array(_tensor(s)))


def connection_table(s: AnyStructure) -> ConnectionTable:
    return ConnectionTable.from_array(connection_array(s))


def connection_matrices(gamma: np.ndarray) -> np.ndarray:
    """A[i] with nabla_{e_i} X = A[i] @ x, i.e. A[i][k, j] = gamma[i, j, k]."""
    return np.transpose(gamma, (0, 2, 1))


def nabla(s: AnyStructure, y: VectorLike, x: VectorLike) -> FrameVector:
    """nabla_Y X for left-invariant Y and X."""
    value = np.einsum("i,j,ijk->k", as_array(y), as_array(x), connection_array(s))
    return FrameVector.from_array(value)


# ==================== CURVATURE ====================

def curvature_from_connection(gamma: np.ndarray, C: np.ndarray) -> np.ndarray:
    return (
        np.einsum("jkm,iml->ijkl", gamma, gamma)
        - np.einsum("ikm,jml->ijkl", gamma, gamma)
        - np.einsum("ijm,mkl->ijkl", C, gamma)
    )


@lru_cache(maxsize=1024)
def sectional_array(s: AnyStructure) -> np.ndarray:
    """(K12, K13, K23); the frame diagonalizes the curvature operator."""
    if isinstance(s, UnimodularStructure):
        mu1, mu2, mu3 = mu_constants(s).as_tuple()
        k12 = s.c3 * mu3 - mu1 * mu2
        k13 = s.c2 * mu2 - mu3 * mu1
        k23 = s.c1 * mu1 - mu2 * mu3
    else:
        u, v, w = uvw_values(s)
        k12, k13, k23 = -u, v, -w
    return _readonly(np.array([k12, k13, k23], dtype=float))


@lru_cache(maxsize=1024)
def curvature_array(s: AnyStructure) -> np.ndarray:
    r = np.zeros((3, 3, 3, 3))
    for (i, j), k in zip(((0, 1), (0, 2), (1, 2)), sectional_array(s)):
        r[i, j, j, i] = r[j, i, i, j] = k
        r[i, j, i, j] = r[j, i, j, i] = -k
    return _readonly(r)


def curvature(s: AnyStructure) -> CurvatureTensor:
    return CurvatureTensor.from_array(curvature_array(s))


def koszul_curvature(s: StructureOrTensor) -> CurvatureTensor:
    C = _tensor(s)
    return CurvatureTensor.from_array(curvature_from_connection(koszul_array(C), C))


def sectional(s: AnyStructure, i: int, j: int) -> float:
    """K_ij = g(R(e_i,e_j)e_j, e_i), 1-based indices."""
    if i == j or not {i, j} <= {1, 2, 3}:
        raise FrameIndexError(f"sectional curvature needs distinct frame indices, got ({i}, {j})")
    return float(curvature_array(s)[i - 1, j - 1, j - 1, i - 1])


def sectional_curvatures(s: AnyStructure) -> SectionalCurvatures:
    k12, k13, k23 = (float(v) for v in sectional_array(s))
    return SectionalCurvatures(k12=k12, k13=k13, k23=k23)


def ricci_tensor(s: AnyStructure) -> np.ndarray:
    """Ric[j, k] = sum_i r[i, j, k, i]."""
    return np.einsum("ijki->jk", curvature_array(s))


def ricci_principal(s: AnyStructure) -> Tuple[float, float, float]:
    if isinstance(s, UnimodularStructure):
        mu1, mu2, mu3 = mu_constants(s).as_tuple()
        return (2 * mu2 * mu3, 2 * mu3 * mu1, 2 * mu1 * mu2)
    a, b2 = s.alpha, s.beta ** 2
    return (
        -2 * (1 + a ** 2 * (1 + b2)),
        -2 * (1 + a * (1 + b2)),
        -2 * (1 - a * (1 + b2)),
    )


def ricci(s: AnyStructure) -> RicciData:
    rho = ricci_principal(s)
    return RicciData(principal=rho, scalar=sum(rho))


# ==================== LAPLACIANS ====================

@lru_cache(maxsize=1024)
def rough_laplacian_matrix(s: AnyStructure) -> np.ndarray:
    """L with rough Laplacian = L @ x for left-invariant X."""
    if isinstance(s, UnimodularStructure):
        m1, m2, m3 = (m ** 2 for m in mu_constants(s).as_tuple())
        L = np.diag([m2 + m3, m3 + m1, m1 + m2])
    else:
        a, b = s.alpha, s.beta
        ab2 = (a * b) ** 2
        L = np.array([
            [2 * (1 + a ** 2 + ab2), 0.0, 0.0],
            [0.0, b ** 2 + (1 + a) ** 2 + ab2, -2 * b * (1 - a)],
            [0.0, 2 * b * (1 + a), b ** 2 + (1 - a) ** 2 + ab2],
        ])
    return _readonly(L.astype(float))


def rough_laplacian_oracle_matrix(gamma: np.ndarray) -> np.ndarray:
    """-sum_i (nabla_{e_i} nabla_{e_i} - nabla_{nabla_{e_i} e_i}) as a matrix."""
    A = connection_matrices(gamma)
    trace_terms = np.einsum("iim,mkj->kj", gamma, A)
    return -np.einsum("ikm,imj->kj", A, A) + trace_terms


def rough_laplacian(s: AnyStructure, x: VectorLike) -> FrameVector:
    return FrameVector.from_array(rough_laplacian_matrix(s) @ as_array(x))


def energy_density(s: AnyStructure, x: VectorLike) -> float:
    """|nabla X|^2 = g(X, rough Laplacian X) for unit X."""
    x = require_unit(as_array(x))
    return float(x @ rough_laplacian_matrix(s) @ x)


def energy_density_direct(s: AnyStructure, x: VectorLike) -> float:
    """sum_i |nabla_{e_i} X|^2."""
    x = as_array(x)
    columns = connection_matrices(connection_array(s)) @ x
    return float(np.sum(columns ** 2))


def weitzenbock_laplacian(s: AnyStructure, x: VectorLike) -> FrameVector:
    x = as_array(x)
    value = rough_laplacian_matrix(s) @ x + np.asarray(ricci_principal(s)) * x
    return FrameVector.from_array(value)


# ==================== PHI-SECTIONAL ====================

def phi_sectional(s: UnimodularStructure) -> PhiSectional:
    if not isinstance(s, UnimodularStructure):
        raise StructureError("phi-sectional curvature is defined for unimodular structures")
    if abs(s.c1 - 2.0) >= settings.eps_sym:
        raise StructureError(f"phi-sectional curvature requires c1 = 2, got c1 = {s.c1:g}")
    c2, c3 = s.c2, s.c3
    spread = 0.25 * (c2 - c3) ** 2
    return PhiSectional(
        phi_k=-3.0 + spread + c2 + c3,
        kappa=1.0 - spread,
        mu=2.0 - (c2 + c3),
        sasakian=abs(c2 - c3) < settings.eps_sym,
    )

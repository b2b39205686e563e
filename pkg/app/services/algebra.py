import logging
from functools import lru_cache
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from app.config import settings
from app.errors import NonUnitVectorError, StructureError
from app.schemas.structure import (
    FrameVector, MuConstants, NonUnimodularStructure, SignatureClass,
    SignatureTag, StructureCoefficients, UnimodularStructure,
)

logger = logging.getLogger(__name__)

AnyStructure = Union[UnimodularStructure, NonUnimodularStructure]
VectorLike = Union[FrameVector, Sequence[float], np.ndarray]

# (positive, negative, zero) counts after the global sign flip
_SIGNATURES = {
    (3, 0, 0): SignatureTag.SU2,
    (2, 1, 0): SignatureTag.SL2R,
    (2, 0, 1): SignatureTag.E2,
    (1, 1, 1): SignatureTag.E11,
    (1, 0, 2): SignatureTag.HEISENBERG,
    (0, 0, 3): SignatureTag.ABELIAN,
}


def as_array(x: VectorLike) -> np.ndarray:
    """Frame coefficients as a float array of shape (3,)."""
    if isinstance(x, FrameVector):
        return np.array(x.as_tuple(), dtype=float)
    arr = np.asarray(x, dtype=float)
    if arr.shape != (3,):
        raise ValueError(f"expected 3 frame coefficients, got shape {arr.shape}")
    return arr


def snap(value: float, eps: Optional[float] = None) -> float:
    """Treat values inside the symbolic band as exact zero."""
    eps = settings.eps_sym if eps is None else eps
    return 0.0 if abs(value) < eps else value


# ==================== UNIMODULAR ====================

def mu_constants(s: UnimodularStructure) -> MuConstants:
    half = 0.5 * (s.c1 + s.c2 + s.c3)
    return MuConstants(mu1=half - s.c1, mu2=half - s.c2, mu3=half - s.c3)


def signature_classify(s: UnimodularStructure) -> SignatureClass:
    signs = [np.sign(snap(c)) for c in s.constants]
    pos = sum(1 for v in signs if v > 0)
    neg = sum(1 for v in signs if v < 0)
    flipped = neg > pos
    if flipped:
        pos, neg = neg, pos
    zero = 3 - pos - neg
    pattern = ("+",) * pos + ("0",) * zero + ("-",) * neg
    return SignatureClass(tag=_SIGNATURES[(pos, neg, zero)], pattern=pattern, flipped=flipped)


# ==================== NON-UNIMODULAR ====================

def milnor_invariant(s: NonUnimodularStructure) -> float:
    return (1.0 - s.alpha ** 2) * (1.0 + s.beta ** 2)


def structure_coefficients(s: NonUnimodularStructure) -> StructureCoefficients:
    a, b = s.alpha, s.beta
    return StructureCoefficients(a11=1.0 + a, a12=(1.0 + a) * b, a21=-(1.0 - a) * b, a22=1.0 - a)


def uvw_values(s: NonUnimodularStructure) -> Tuple[float, float, float]:
    a, b2 = s.alpha, s.beta ** 2
    u = a * b2 + (1 + a) ** 2 + a * b2 * (1 + a)
    v = a * b2 - (1 - a) ** 2 + a * b2 * (1 - a)
    w = 1 - a ** 2 * (1 + b2)
    return (u, v, w)


def isomorphic(s1: NonUnimodularStructure, s2: NonUnimodularStructure) -> bool:
    """Isomorphism of the Lie algebras via the Milnor invariant."""
    for s in (s1, s2):
        if snap(s.alpha) == 0.0 and snap(s.beta) == 0.0:
            raise StructureError("isomorphism test excludes (alpha, beta) = (0, 0)")
    return abs(milnor_invariant(s1) - milnor_invariant(s2)) < settings.isomorphism_tol


# ==================== BRACKET ====================

@lru_cache(maxsize=1024)
def _structure_constants(s: AnyStructure) -> np.ndarray:
    C = np.zeros((3, 3, 3))
    if isinstance(s, UnimodularStructure):
        # [e1,e2] = c3 e3, [e2,e3] = c1 e1, [e3,e1] = c2 e2
        for (i, j, k), c in zip(((0, 1, 2), (1, 2, 0), (2, 0, 1)), (s.c3, s.c1, s.c2)):
            C[i, j, k] = c
            C[j, i, k] = -c
    else:
        a = structure_coefficients(s)
        C[0, 1, 1], C[0, 1, 2] = a.a11, a.a12
        C[0, 2, 1], C[0, 2, 2] = a.a21, a.a22
        C[1, 0] = -C[0, 1]
        C[2, 0] = -C[0, 2]
    C.flags.writeable = False
    return C


def structure_constants(s: AnyStructure) -> np.ndarray:
    """C[i,j,k] with [e_i,e_j] = sum_k C[i,j,k] e_k. Read-only."""
    return _structure_constants(s)


def bracket(s: AnyStructure, v: VectorLike, w: VectorLike) -> FrameVector:
    return FrameVector.from_array(bracket_array(s, as_array(v), as_array(w)))


def bracket_array(s: AnyStructure, v: np.ndarray, w: np.ndarray) -> np.ndarray:
    return np.einsum("i,j,ijk->k", v, w, structure_constants(s))


def jacobi_defect(s: AnyStructure, u: VectorLike, v: VectorLike, w: VectorLike) -> FrameVector:
    u, v, w = as_array(u), as_array(v), as_array(w)
    total = (
        bracket_array(s, u, bracket_array(s, v, w))
        + bracket_array(s, v, bracket_array(s, w, u))
        + bracket_array(s, w, bracket_array(s, u, v))
    )
    return FrameVector.from_array(total)


def ad_traces(s: AnyStructure) -> Tuple[float, float, float]:
    """tr ad(e_i) = sum_j C[i,j,j]."""
    C = structure_constants(s)
    return tuple(float(v) for v in np.einsum("ijj->i", C))


def require_unit(x: np.ndarray, tol: Optional[float] = None) -> np.ndarray:
    tol = settings.unit_tol if tol is None else tol
    norm = float(np.linalg.norm(x))
    if abs(norm - 1.0) > tol:
        raise NonUnitVectorError(f"expected a unit vector, got |x| = {norm:.12g}")
    return x

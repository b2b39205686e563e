"""Closed-form classification of unit magnetic left-invariant fields."""
import logging
from typing import List, Optional, Tuple

import numpy as np

from app.config import settings
from app.errors import StructureError, StructureMismatchError
from app.schemas.classify import (
    ComponentMatch, MatchReport, NonUnimodularRow, ScanResult, SolutionComponent,
    SolutionSet, UnimodularRow,
)
from app.schemas.magnetic import QConstraint
from app.schemas.structure import FrameVector, NonUnimodularStructure, UnimodularStructure
from app.services.algebra import AnyStructure, milnor_invariant
from app.services.geometry import rough_laplacian_matrix
from app.services.magnetic import magnetic_terms
from app.services.sphere import antipodal_distance, fibonacci_sphere

logger = logging.getLogger(__name__)

_PLANES = ((0, 1, 2), (0, 2, 1), (1, 2, 0))  # (i, j, normal)


def _pair(x, q: QConstraint, double_root: bool = False) -> SolutionComponent:
    return SolutionComponent(kind="point_pair", point=FrameVector.from_array(x), q=q, double_root=double_root)


def _circle(i: int, j: int, q: QConstraint) -> SolutionComponent:
    """Great circle in span(e_i, e_j), 1-based."""
    return SolutionComponent(kind="great_circle", plane=tuple(sorted((i, j))), q=q)


def _sphere(q: QConstraint) -> SolutionComponent:
    return SolutionComponent(kind="full_sphere", q=q)


# ==================== UNIMODULAR ====================

def unimodular_row(sorted_c: np.ndarray) -> UnimodularRow:
    eps = settings.eps_sym
    zero = [abs(c) < eps for c in sorted_c]
    eq12 = abs(sorted_c[0] - sorted_c[1]) < eps
    eq23 = abs(sorted_c[1] - sorted_c[2]) < eps
    if eq12 and eq23:
        return UnimodularRow.ALL_ZERO if all(zero) else UnimodularRow.ALL_EQUAL_NONZERO
    if eq23:
        return UnimodularRow.TOP_ZERO_PAIR if zero[1] else UnimodularRow.TOP_NONZERO_PAIR
    if eq12:
        return UnimodularRow.BOTTOM_ZERO_PAIR if zero[0] else UnimodularRow.BOTTOM_NONZERO_PAIR
    if zero[2]:
        return UnimodularRow.DISTINCT_LAST_ZERO
    if zero[1]:
        return UnimodularRow.DISTINCT_MIDDLE_ZERO
    if zero[0]:
        return UnimodularRow.DISTINCT_FIRST_ZERO
    if sorted_c[2] > 0:
        return UnimodularRow.DISTINCT_PPP
    if sorted_c[1] > 0:
        return UnimodularRow.DISTINCT_PPM
    if sorted_c[0] > 0:
        return UnimodularRow.DISTINCT_PMM
    return UnimodularRow.DISTINCT_MMM


def classify_unimodular(s: UnimodularStructure) -> SolutionSet:
    """Solutions from the axis / circle / sphere case analysis, in the caller's frame.

    The constants are sorted c1 >= c2 >= c3 internally; every component is
    coordinate-aligned, so mapping back only relabels axes.
    """
    eps = settings.eps_sym
    c = np.array(s.constants)
    order = np.argsort(-c, kind="stable")
    sc = c[order]
    zero = [abs(v) < eps for v in sc]

    def axis(k: int) -> int:
        return int(order[k]) + 1

    def equal(i: int, j: int) -> bool:
        return abs(sc[i] - sc[j]) < eps

    row = unimodular_row(sc)
    components: List[SolutionComponent] = []

    if equal(0, 1) and equal(1, 2):
        components.append(_sphere(QConstraint.any_q()))
        return SolutionSet(structure=s, case_label=row.value, components=components)

    any_planes = [(i, j, k) for i, j, k in _PLANES if equal(i, j)]
    in_any_plane = {m for i, j, _ in any_planes for m in (i, j)}
    for k in range(3):
        if k not in in_any_plane:
            components.append(_pair(np.eye(3)[order[k]], QConstraint.any_q()))
    for i, j, _ in any_planes:
        components.append(_circle(axis(i), axis(j), QConstraint.any_q()))

    sphere_q: Optional[float] = None
    if sum(zero) == 2:
        sphere_q = -0.25 * float(sc[zero.index(False)]) ** 2

    if sphere_q is None:
        for i, j, k in _PLANES:
            if zero[k] and not equal(i, j):
                q = QConstraint.fixed(-0.25 * float(sc[i] - sc[j]) ** 2)
                components.append(_pair(np.eye(3)[order[k]], q))
                components.append(_circle(axis(i), axis(j), q))
    else:
        components.append(_sphere(QConstraint.fixed(sphere_q)))

    logger.debug("classified %s as %s with %d components", s.label(), row.value, len(components))
    return SolutionSet(structure=s, case_label=row.value, components=components)


# ==================== NON-UNIMODULAR ====================

def kernel_system_matrix(s: NonUnimodularStructure) -> np.ndarray:
    """Homogeneous (x2, x3) system of the x1 != 0 branch; its determinant is D^2."""
    L = rough_laplacian_matrix(s)
    return L[1:, 1:] - L[0, 0] * np.eye(2)


def kernel_quadratic(s: NonUnimodularStructure, x2: float, x3: float) -> float:
    """Tension condition on the kernel circle x1 = 0."""
    a, b = s.alpha, s.beta
    return b * (1 + a) * x2 ** 2 - 2 * a * x2 * x3 + b * (1 - a) * x3 ** 2


def general_pairs(s: NonUnimodularStructure) -> List[Tuple[np.ndarray, float]]:
    """Kernel points x2/x3 = (alpha +- sqrt(1 - D)) / (beta (1 + alpha)) with their charges."""
    a, b = s.alpha, s.beta
    D = milnor_invariant(s)
    if abs(D - 1.0) < settings.eps_sym:
        root, signs = 0.0, (1.0,)
    else:
        root, signs = float(np.sqrt(max(1.0 - D, 0.0))), (1.0, -1.0)
    pairs = []
    for sign in signs:
        t = (a + sign * root) / (b * (1 + a))
        x = np.array([0.0, t, 1.0]) / np.sqrt(1.0 + t * t)
        q = -(1.0 + a ** 2 + (a * b) ** 2 + 2.0 * sign * root)
        pairs.append((x, q))
    return pairs


def classify_nonunimodular(s: NonUnimodularStructure) -> SolutionSet:
    eps = settings.eps_sym
    a, b = s.alpha, s.beta
    D = milnor_invariant(s)
    e2, e3 = np.eye(3)[1], np.eye(3)[2]
    components: List[SolutionComponent] = []

    if a < eps:
        if b < eps:
            row = NonUnimodularRow.D_ONE_HYPERBOLIC
            components.append(_circle(2, 3, QConstraint.fixed(-1.0)))
        else:
            row = NonUnimodularRow.D_ABOVE_ONE
    elif abs(a - 1.0) < eps:
        components.append(_pair(e3, QConstraint.any_q()))
        if b < eps:
            row = NonUnimodularRow.D_ZERO_BETA_ZERO
            components.append(_pair(e2, QConstraint.fixed(-4.0)))
        else:
            row = NonUnimodularRow.D_ZERO
            x = np.array([0.0, 1.0, b]) / np.sqrt(1.0 + b * b)
            components.append(_pair(x, QConstraint.fixed(-(b * b + 4.0))))
    elif b < eps:
        row = NonUnimodularRow.D_BETWEEN_BETA_ZERO if a < 1 else NonUnimodularRow.D_NEGATIVE_BETA_ZERO
        components.append(_pair(e2, QConstraint.fixed(-(1 + a) ** 2)))
        components.append(_pair(e3, QConstraint.fixed(-(1 - a) ** 2)))
    elif D > 1.0 + eps:
        row = NonUnimodularRow.D_ABOVE_ONE
    else:
        if abs(D - 1.0) < eps:
            row = NonUnimodularRow.D_ONE
        else:
            row = NonUnimodularRow.D_BETWEEN if a < 1 else NonUnimodularRow.D_NEGATIVE
        double_root = row == NonUnimodularRow.D_ONE
        for x, q in general_pairs(s):
            components.append(_pair(x, QConstraint.fixed(q), double_root))

    logger.debug("classified %s as %s (D=%.6g) with %d components", s.label(), row.value, D, len(components))
    return SolutionSet(structure=s, case_label=row.value, components=components)


def classify(s: AnyStructure) -> SolutionSet:
    if isinstance(s, UnimodularStructure):
        return classify_unimodular(s)
    if isinstance(s, NonUnimodularStructure):
        return classify_nonunimodular(s)
    raise StructureError(f"unsupported structure {type(s).__name__}")


# ==================== SAMPLING & VERIFICATION ====================

def sample_component(
    component: SolutionComponent,
    n: int = 100,
    rng: Optional[np.random.Generator] = None,
) -> np.ndarray:
    """Unit points on the component, shape (m, 3)."""
    if component.kind == "point_pair":
        p = np.array(component.point.as_tuple())
        return np.vstack([p, -p])
    if component.kind == "great_circle":
        phase = 0.0 if rng is None else rng.uniform(0.0, 2 * np.pi)
        theta = phase + np.linspace(0.0, 2 * np.pi, n, endpoint=False)
        X = np.zeros((n, 3))
        i, j = component.plane
        X[:, i - 1] = np.cos(theta)
        X[:, j - 1] = np.sin(theta)
        return X
    return fibonacci_sphere(n)


def verify_component(
    s: AnyStructure,
    component: SolutionComponent,
    n: int = 100,
    rng: Optional[np.random.Generator] = None,
) -> float:
    """Largest residual over sampled points (three random charges when AnyQ)."""
    rng = np.random.default_rng(0) if rng is None else rng
    X = sample_component(component, n, rng)
    A, B, S = magnetic_terms(s, X)
    charges = rng.uniform(-10.0, 10.0, size=3) if component.q.is_any else [component.q.value]
    worst = float(np.max(np.linalg.norm(S, axis=1)))
    for q in charges:
        worst = max(worst, float(np.max(np.linalg.norm(A - q * B, axis=1))))
    return worst


# ==================== COMPARISON ====================

def component_distance(component: SolutionComponent, X: np.ndarray) -> np.ndarray:
    """Chord distance from unit rows of X to the component."""
    if component.kind == "full_sphere":
        return np.zeros(len(X))
    if component.kind == "great_circle":
        normal = ({1, 2, 3} - set(component.plane)).pop() - 1
        return np.abs(X[:, normal])
    return antipodal_distance(X, np.array(component.point.as_tuple()))


def _compatible(component: SolutionComponent, scan_any: np.ndarray, scan_q: np.ndarray) -> np.ndarray:
    if component.q.is_any:
        return np.ones(len(scan_any), dtype=bool)
    rel = settings.match_q_double_root if component.double_root else settings.match_q
    tol = rel * max(1.0, abs(component.q.value))
    return scan_any | (np.abs(scan_q - component.q.value) < tol)


def compare(solution_set: SolutionSet, scan: ScanResult) -> MatchReport:
    """Match closed-form components against numerically found points."""
    if solution_set.structure != scan.structure:
        raise StructureMismatchError(
            f"solution set for {solution_set.structure.label()} "
            f"but scan for {scan.structure.label()}"
        )
    X = np.array([p.x.as_tuple() for p in scan.points]).reshape(-1, 3)
    scan_any = np.array([p.q.is_any for p in scan.points], dtype=bool)
    scan_q = np.array([np.nan if p.q.is_any else p.q.value for p in scan.points], dtype=float)
    matched_points = np.zeros(len(X), dtype=bool)
    results = []
    for component in solution_set.components:
        near = component_distance(component, X) < settings.match_angle
        hits = near & _compatible(component, scan_any, scan_q)
        matched_points |= hits
        required = 1 if component.kind == "point_pair" else settings.min_family_hits
        count = int(hits.sum())
        results.append(ComponentMatch(component=component, hits=count, required=required, matched=count >= required))

    unmatched = [p for p, ok in zip(scan.points, matched_points) if not ok]
    matched = all(r.matched for r in results) and not unmatched
    sphere_covered = any(r.matched and r.component.kind == "full_sphere" for r in results)
    logger.info(
        "compare %s: %d components, %d scan points, %d unmatched, match=%s",
        scan.structure.label(), len(results), len(X), len(unmatched), matched,
    )
    return MatchReport(
        matched=matched,
        components=results,
        unmatched_points=unmatched,
        sphere_covered=sphere_covered,
    )

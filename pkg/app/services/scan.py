"""Grid search plus projected Gauss-Newton refinement for unit magnetic fields.

Passes:
    any    solve A = B = S = 0 in x alone (fields magnetic for every charge)
    free   solve A - qB = S = 0 in (x, q)
    fixed  solve A - q0 B = S = 0 in x for a given q0
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

import numpy as np

from app.config import settings
from app.schemas.classify import ScanPoint, ScanResult, ScanStats
from app.schemas.magnetic import QConstraint
from app.schemas.structure import FrameVector
from app.services.algebra import AnyStructure, structure_constants
from app.services.geometry import connection_array, rough_laplacian_matrix
from app.services.magnetic import trace_tensor
from app.services.sphere import (
    antipodal_clusters, canonical_sign, fibonacci_sphere, local_minima,
    normalize_rows, tangent_frames,
)

logger = logging.getLogger(__name__)

QMode = Union[str, float]
MAX_HALVINGS = 10


@dataclass(frozen=True)
class ScanPass:
    kind: str
    q: float = 0.0


def scan_passes(q_mode: QMode) -> List[ScanPass]:
    if isinstance(q_mode, (int, float)) and not isinstance(q_mode, bool):
        return [ScanPass("fixed", float(q_mode))]
    if q_mode == "both":
        return [ScanPass("any"), ScanPass("free")]
    if q_mode in ("any", "free"):
        return [ScanPass(q_mode)]
    try:
        return [ScanPass("fixed", float(q_mode))]
    except ValueError:
        raise ValueError(f"unknown q mode {q_mode!r}; use both, any, free or a number") from None


def structure_scale(s: AnyStructure) -> float:
    scale = float(np.max(np.abs(structure_constants(s))))
    return scale if scale > 0 else 1.0


class MagneticSystem:
    """Quadratic forms for A, B and the tension S, with analytic Jacobians."""

    def __init__(self, s: AnyStructure):
        self.T = trace_tensor(s)
        self.G = np.transpose(connection_array(s), (2, 0, 1))  # G[l, i, j] = gamma[i, j, l]
        self.T_sym = self.T + np.transpose(self.T, (0, 2, 1))
        self.G_sym = self.G + np.transpose(self.G, (0, 2, 1))
        self.L = np.asarray(rough_laplacian_matrix(s))
        self.L_sym = self.L + self.L.T
        self.scale = structure_scale(s)

    def terms(self, X: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        A = np.einsum("ljb,nj,nb->nl", self.T, X, X)
        B = np.einsum("lij,ni,nj->nl", self.G, X, X)
        LX = X @ self.L.T
        S = LX - np.einsum("ni,ni->n", X, LX)[:, None] * X
        return A, B, S

    def jacobians(self, X: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        JA = np.einsum("lmb,nb->nlm", self.T_sym, X)
        JB = np.einsum("lmb,nb->nlm", self.G_sym, X)
        energy = np.einsum("ni,ij,nj->n", X, self.L, X)
        JS = (
            self.L[None, :, :]
            - energy[:, None, None] * np.eye(3)[None, :, :]
            - np.einsum("ni,nj->nij", X, X @ self.L_sym)
        )
        return JA, JB, JS

    def residual(self, p: ScanPass, X: np.ndarray, q: np.ndarray) -> np.ndarray:
        A, B, S = self.terms(X)
        if p.kind == "any":
            return np.hstack([A, B, S])
        return np.hstack([A - q[:, None] * B, S])

    def jacobian(self, p: ScanPass, X: np.ndarray, q: np.ndarray) -> np.ndarray:
        """Jacobian in tangent coordinates (and q for the free pass)."""
        JA, JB, JS = self.jacobians(X)
        if p.kind == "any":
            Jx = np.concatenate([JA, JB, JS], axis=1)
        else:
            Jx = np.concatenate([JA - q[:, None, None] * JB, JS], axis=1)
        t1, t2 = tangent_frames(X)
        J = Jx @ np.stack([t1, t2], axis=2)
        if p.kind == "free":
            _, B, _ = self.terms(X)
            dq = np.hstack([-B, np.zeros_like(B)])
            J = np.concatenate([J, dq[:, :, None]], axis=2)
        return J

    def least_squares_q(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        bb = np.einsum("ni,ni->n", B, B)
        ab = np.einsum("ni,ni->n", A, B)
        return np.divide(ab, bb, out=np.zeros_like(ab), where=bb > 0)

    def seed_measure(self, p: ScanPass, X: np.ndarray) -> np.ndarray:
        """Scale-free residual used to pick Newton seeds."""
        A, B, S = self.terms(X)
        s = self.scale
        tension = np.linalg.norm(S, axis=1) / s ** 2
        if p.kind == "any":
            return np.linalg.norm(A, axis=1) / s ** 3 + np.linalg.norm(B, axis=1) / s + tension
        q = self.least_squares_q(A, B) if p.kind == "free" else np.full(len(X), p.q)
        return np.linalg.norm(A - q[:, None] * B, axis=1) / s ** 3 + tension

    def initial_q(self, p: ScanPass, X: np.ndarray) -> np.ndarray:
        if p.kind == "fixed":
            return np.full(len(X), p.q)
        if p.kind == "free":
            A, B, _ = self.terms(X)
            return self.least_squares_q(A, B)
        return np.zeros(len(X))


def refine(system: MagneticSystem, p: ScanPass, X0: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Damped Gauss-Newton on the sphere for a batch of seeds."""
    X = X0.copy()
    q = system.initial_q(p, X)
    norms = np.linalg.norm(system.residual(p, X, q), axis=1)
    iterations = np.zeros(len(X), dtype=int)
    active = norms >= settings.newton_tol

    for _ in range(settings.newton_max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        Xa, qa = X[idx], q[idx]
        F = system.residual(p, Xa, qa)
        J = system.jacobian(p, Xa, qa)
        step = -np.einsum("nij,nj->ni", np.linalg.pinv(J), F)
        t1, t2 = tangent_frames(Xa)

        damping = np.ones(idx.size)
        for _ in range(MAX_HALVINGS):
            move = damping[:, None] * (step[:, 0:1] * t1 + step[:, 1:2] * t2)
            X_new = normalize_rows(Xa + move)
            q_new = qa + damping * step[:, 2] if p.kind == "free" else qa
            new_norms = np.linalg.norm(system.residual(p, X_new, q_new), axis=1)
            worse = new_norms > norms[idx]
            if not worse.any():
                break
            damping = np.where(worse, 0.5 * damping, damping)

        accepted = ~worse
        X[idx[accepted]] = X_new[accepted]
        q[idx[accepted]] = q_new[accepted]
        norms[idx[accepted]] = new_norms[accepted]
        iterations[idx] += 1

        # no residual cut-off here: double roots only converge linearly and
        # need to run down to the rounding floor
        step_norm = damping * np.linalg.norm(step, axis=1)
        done = (new_norms == 0.0) | (step_norm < settings.newton_step_tol) | ~accepted
        active[idx[done]] = False

    return X, q, iterations


def label_points(
    system: MagneticSystem,
    p: ScanPass,
    X: np.ndarray,
    eps_res: float,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(keep, is_any, q, residual) for refined points."""
    A, B, S = system.terms(X)
    a_norm = np.linalg.norm(A, axis=1)
    b_norm = np.linalg.norm(B, axis=1)
    s_norm = np.linalg.norm(S, axis=1)
    is_any = (b_norm < settings.anyq_b_tol) & (a_norm < eps_res) & (s_norm < eps_res)
    q = np.full(len(X), p.q) if p.kind == "fixed" else system.least_squares_q(A, B)
    fixed_residual = np.maximum(np.linalg.norm(A - q[:, None] * B, axis=1), s_norm)
    residual = np.where(is_any, np.maximum(a_norm, s_norm), fixed_residual)
    keep = is_any | (fixed_residual < eps_res)
    return keep, is_any, q, residual


def _seeds(system: MagneticSystem, p: ScanPass, grid: np.ndarray) -> np.ndarray:
    measure = system.seed_measure(p, grid)
    mask = (measure < settings.scan_seed_threshold) | local_minima(grid, measure, settings.scan_neighbours)
    return grid[mask]


def numeric_scan(
    s: AnyStructure,
    grid_n: Optional[int] = None,
    q_mode: QMode = "both",
    tolerance: Optional[float] = None,
) -> ScanResult:
    """Search the unit sphere for magnetic fields independently of the case analysis."""
    grid_n = settings.grid_n if grid_n is None else grid_n
    if grid_n < 16:
        raise ValueError(f"grid_n must be at least 16, got {grid_n}")
    eps_res = settings.eps_res if tolerance is None else tolerance
    system = MagneticSystem(s)
    grid = fibonacci_sphere(grid_n * grid_n)

    found_x, found_any, found_q, found_res = [], [], [], []
    seed_count, iteration_counts = 0, []
    for p in scan_passes(q_mode):
        seeds = _seeds(system, p, grid)
        seed_count += len(seeds)
        chunks = np.array_split(seeds, max(1, math.ceil(len(seeds) / settings.scan_chunk_size)))
        with ThreadPoolExecutor(max_workers=settings.scan_workers) as pool:
            results = list(pool.map(lambda chunk: refine(system, p, chunk), chunks))
        if not results:
            continue
        X = np.vstack([r[0] for r in results])
        iteration_counts.append(np.concatenate([r[2] for r in results]))
        keep, is_any, q, residual = label_points(system, p, X, eps_res)
        found_x.append(X[keep])
        found_any.append(is_any[keep])
        found_q.append(q[keep])
        found_res.append(residual[keep])
        logger.debug(
            "%s pass on %s: %d seeds, %d converged", p.kind, s.label(), len(seeds), int(keep.sum()),
        )

    X = np.vstack(found_x) if found_x else np.zeros((0, 3))
    is_any = np.concatenate(found_any) if found_any else np.zeros(0, dtype=bool)
    q = np.concatenate(found_q) if found_q else np.zeros(0)
    residual = np.concatenate(found_res) if found_res else np.zeros(0)
    converged = len(X)

    # AnyQ labels first, then smallest residual, so cluster representatives prefer them
    priority = np.lexsort((residual, ~is_any))
    X, is_any, q, residual = X[priority], is_any[priority], q[priority], residual[priority]
    labels = antipodal_clusters(X, settings.dedup_angle)
    _, first = np.unique(labels, return_index=True)
    first = np.sort(first)
    X = canonical_sign(X[first])

    points = [
        ScanPoint(
            x=FrameVector.from_array(x),
            q=QConstraint.any_q() if any_flag else QConstraint.fixed(qv),
            residual=float(res),
        )
        for x, any_flag, qv, res in zip(X, is_any[first], q[first], residual[first])
    ]
    iterations = np.concatenate(iteration_counts) if iteration_counts else np.zeros(0, dtype=int)
    stats = ScanStats(
        grid_points=len(grid),
        seeds=seed_count,
        converged=converged,
        failed=seed_count - converged,
        max_iterations=int(iterations.max()) if iterations.size else 0,
        mean_iterations=float(iterations.mean()) if iterations.size else 0.0,
    )
    logger.info(
        "scan %s grid_n=%d: %d seeds, %d converged, %d distinct points",
        s.label(), grid_n, seed_count, converged, len(points),
    )
    return ScanResult(structure=s, grid_n=grid_n, q_mode=str(q_mode), points=points, stats=stats)

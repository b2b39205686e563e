import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))
# cell edge as a share of the merge radius; the cell diagonal sqrt(3)/4 stays below 1
CELL_FRACTION = 0.25


def fibonacci_sphere(n: int) -> np.ndarray:
    """n nearly uniform unit vectors, shape (n, 3)."""
    i = np.arange(n, dtype=float) + 0.5
    z = 1.0 - 2.0 * i / n
    radius = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    phi = GOLDEN_ANGLE * i
    return np.column_stack([radius * np.cos(phi), radius * np.sin(phi), z])


def normalize_rows(X: np.ndarray) -> np.ndarray:
    return X / np.linalg.norm(X, axis=1, keepdims=True)


def tangent_frames(X: np.ndarray) -> tuple:
    """Orthonormal (t1, t2) spanning the tangent plane at each unit row of X."""
    helper = np.zeros_like(X)
    helper[np.arange(len(X)), np.argmin(np.abs(X), axis=1)] = 1.0
    t1 = helper - np.sum(helper * X, axis=1, keepdims=True) * X
    t1 = normalize_rows(t1)
    t2 = np.cross(X, t1)
    return t1, t2


def antipodal_distance(X: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Chord distance from each row of X to the nearer of +p, -p."""
    return np.minimum(np.linalg.norm(X - p, axis=1), np.linalg.norm(X + p, axis=1))


def antipodal_clusters(X: np.ndarray, radius: float) -> np.ndarray:
    """Cluster labels merging rows closer than radius, treating x and -x as one point."""
    if len(X) == 0:
        return np.zeros(0, dtype=int)
    # rows sharing a cell are already within radius of each other; keep one per
    # cell so thousands of seeds converged onto one root stay a single row
    cells = np.round(canonical_sign(X) / (CELL_FRACTION * radius)).astype(np.int64)
    _, first, inverse = np.unique(cells, axis=0, return_index=True, return_inverse=True)
    reps = X[first]
    n = len(reps)
    tree = cKDTree(np.vstack([reps, -reps]))
    pairs = tree.query_pairs(radius, output_type="ndarray") % n
    pairs = pairs.reshape(-1, 2)
    graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n))
    _, labels = connected_components(graph, directed=False)
    return labels[inverse.reshape(-1)]


def local_minima(X: np.ndarray, values: np.ndarray, k: int) -> np.ndarray:
    """Mask of grid points whose value does not exceed any of their k nearest neighbours."""
    if len(X) <= k:
        return values <= values.min()
    _, idx = cKDTree(X).query(X, k=k + 1)
    return values <= values[idx[:, 1:]].min(axis=1)


def canonical_sign(X: np.ndarray) -> np.ndarray:
    """Flip rows so the largest-magnitude coordinate is positive."""
    pivot = X[np.arange(len(X)), np.argmax(np.abs(X), axis=1)]
    return X * np.where(pivot < 0, -1.0, 1.0)[:, None]

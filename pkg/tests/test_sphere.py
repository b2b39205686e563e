import numpy as np
from numpy.testing import assert_allclose

from app.services.sphere import (
    antipodal_clusters, antipodal_distance, canonical_sign, fibonacci_sphere, local_minima,
    normalize_rows, tangent_frames,
)


def test_fibonacci_sphere_is_unit_and_balanced():
    X = fibonacci_sphere(2000)
    assert X.shape == (2000, 3)
    assert_allclose(np.linalg.norm(X, axis=1), 1.0, atol=1e-14)
    assert np.linalg.norm(X.mean(axis=0)) < 1e-3


def test_tangent_frames_are_orthonormal(rng):
    X = normalize_rows(rng.normal(size=(100, 3)))
    t1, t2 = tangent_frames(X)
    for a, b in [(X, t1), (X, t2), (t1, t2)]:
        assert np.max(np.abs(np.sum(a * b, axis=1))) < 1e-14
    assert_allclose(np.linalg.norm(t1, axis=1), 1.0, atol=1e-14)
    assert_allclose(np.linalg.norm(t2, axis=1), 1.0, atol=1e-14)


def test_antipodal_clusters_merge_opposite_points():
    X = np.array([
        [1.0, 0.0, 0.0],
        [-1.0, 1e-9, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 1.0, 2e-7],
    ])
    labels = antipodal_clusters(X, 1e-6)
    assert labels[0] == labels[1]
    assert labels[2] == labels[3]
    assert labels[0] != labels[2]
    assert len(antipodal_clusters(np.zeros((0, 3)), 1e-6)) == 0


def test_antipodal_distance():
    p = np.array([0.0, 0.0, 1.0])
    X = np.array([[0.0, 0.0, -1.0], [1.0, 0.0, 0.0]])
    assert_allclose(antipodal_distance(X, p), [0.0, np.sqrt(2)])


def test_local_minima_finds_the_poles():
    X = fibonacci_sphere(500)
    values = 1.0 - X[:, 2] ** 2
    mask = local_minima(X, values, 8)
    assert set(np.argmax(np.abs(X[mask]), axis=1)) == {2}
    assert mask[0] and mask[-1]


def test_canonical_sign():
    X = np.array([[0.1, -0.9, 0.0], [0.5, 0.2, 0.0]])
    assert_allclose(canonical_sign(X), [[-0.1, 0.9, 0.0], [0.5, 0.2, 0.0]])


def test_antipodal_clusters_collapse_many_coincident_points(rng):
    roots = normalize_rows(np.array([[0.6, 0.0, 0.8], [0.0, 1.0, 1.0]]))
    X = np.repeat(roots, 30000, axis=0) + rng.normal(scale=1e-12, size=(60000, 3))
    X[::2] *= -1.0
    labels = antipodal_clusters(X, 1e-6)
    assert len(set(labels[:30000])) == 1
    assert len(set(labels[30000:])) == 1
    assert labels[0] != labels[-1]

"""K-means on the rows of a recovered row-space basis, and label-matched accuracy."""
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import ParameterError
from .linalg import as_matrix
from .sensing import make_rng
from .solver import RspParams, solve

RESTARTS = 10
LLOYD_ITERS = 300
CENTROID_TOL = 1e-9


@dataclass
class ClusterAssignment:
    labels: np.ndarray
    k: int
    inertia: float
    restarts_used: int
    inertia_trace: list = field(default_factory=list)
    solution: object = None


def _sq_dists(points, centers):
    # squared distances from inner products only
    d = (np.sum(points ** 2, axis=1)[:, None] + np.sum(centers ** 2, axis=1)[None, :]
         - 2.0 * points @ centers.T)
    return np.maximum(d, 0.0)


def _kmeanspp(points, k, rng):
    """Greedy k-means++: each new center is the best of ``2 + log k`` D^2 draws."""
    n = points.shape[0]
    trials = 2 + int(np.log(k))
    centers = [points[rng.integers(n)]]
    closest = _sq_dists(points, centers[0][None, :])[:, 0]
    for _ in range(1, k):
        total = closest.sum()
        if total > 0:
            candidates = rng.choice(n, size=trials, p=closest / total)
        else:
            candidates = rng.integers(n, size=trials)
        cand_d = np.minimum(closest[None, :], _sq_dists(points, points[candidates]).T)
        best = int(np.argmin(cand_d.sum(axis=1)))
        centers.append(points[candidates[best]])
        closest = cand_d[best]
    return np.array(centers)


def _lloyd(points, centers, max_iters, tol):
    k = centers.shape[0]
    trace = []
    for _ in range(max_iters):
        d = _sq_dists(points, centers)
        labels = np.argmin(d, axis=1)
        trace.append(float(d[np.arange(len(labels)), labels].sum()))
        new = np.empty_like(centers)
        taken = set()
        for j in range(k):
            members = labels == j
            if members.any():
                new[j] = points[members].mean(axis=0)
                continue
            # empty cluster: move it onto the point farthest from its centroid
            far = d[np.arange(len(labels)), labels].copy()
            far[list(taken)] = -1.0
            idx = int(np.argmax(far))
            taken.add(idx)
            new[j] = points[idx]
            labels[idx] = j
        shift = float(np.max(np.sum((new - centers) ** 2, axis=1)))
        centers = new
        if shift <= tol ** 2:
            break
    d = _sq_dists(points, centers)
    labels = np.argmin(d, axis=1)
    inertia = float(d[np.arange(len(labels)), labels].sum())
    trace.append(inertia)
    return labels, inertia, trace


def kmeans(points, k, seed=0, restarts=RESTARTS, max_iters=LLOYD_ITERS, tol=CENTROID_TOL):
    """Lloyd's algorithm with k-means++ seeding; best of ``restarts`` by inertia.

    Ties in inertia keep the earliest restart. Each restart draws from its
    own stream derived from ``seed``.
    """
    points = as_matrix(points, "points")
    n = points.shape[0]
    if not 1 <= k <= n:
        raise ParameterError(f"k={k} must lie in [1, n={n}]")
    best = None
    for i in range(restarts):
        rng = make_rng(np.random.SeedSequence(int(seed), spawn_key=(i,)).generate_state(1)[0])
        labels, inertia, trace = _lloyd(points, _kmeanspp(points, k, rng), max_iters, tol)
        if best is None or inertia < best.inertia:
            best = ClusterAssignment(labels, k, inertia, restarts, trace)
    return best


def _labels(x):
    if isinstance(x, ClusterAssignment):
        return x.labels
    return np.asarray(x)


def accuracy(predicted, truth):
    """Fraction of points correctly grouped under the best one-to-one relabeling."""
    pred = _labels(predicted).ravel()
    true = np.asarray(truth).ravel()
    if pred.shape != true.shape:
        raise ParameterError(f"label lengths differ: {pred.size} vs {true.size}")
    if pred.size == 0:
        return 1.0
    _, p_idx = np.unique(pred, return_inverse=True)
    _, t_idx = np.unique(true, return_inverse=True)
    confusion = np.zeros((p_idx.max() + 1, t_idx.max() + 1), dtype=np.int64)
    np.add.at(confusion, (p_idx, t_idx), 1)
    rows, cols = linear_sum_assignment(confusion, maximize=True)
    return float(confusion[rows, cols].sum()) / pred.size


def row_embedding(v):
    """Sign- and rotation-free features for the rows of an orthonormal basis.

    Each row is scaled to unit length (zero rows stay zero) and replaced by
    the flattened outer product ``u u^T``. Squared distances between
    embedded rows equal ``|a|^4 + |b|^4 - 2 (a.b)^2``, a function of row inner
    products alone, so right-multiplying the basis by an orthogonal matrix
    leaves the k-means problem unchanged. Points from one subspace collapse
    onto a common projector instead of spreading along a line through the
    origin with both signs, which is what defeats k-means on raw rows.
    """
    v = as_matrix(v, "basis")
    norms = np.linalg.norm(v, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    u = v / norms
    n, r = u.shape
    return np.einsum("ij,ik->ijk", u, u).reshape(n, r * r)


def cluster_rows(v, k, seed=0):
    """k-means on the embedded rows of an ``n x r`` row-space basis."""
    return kmeans(row_embedding(v), k, seed)


def normalize_columns(m_mat):
    m_mat = as_matrix(m_mat, "M")
    norms = np.linalg.norm(m_mat, axis=0)
    norms[norms == 0.0] = 1.0
    return m_mat / norms


def cluster_compressed(m_mat, r_mat, k, params, normalize=True, seed=0):
    """Solve for the row space from compressed data, then cluster its rows.

    The solver output is attached to the result as ``.solution``.
    """
    if not isinstance(params, RspParams):
        raise ParameterError("params must be RspParams")
    m_mat = normalize_columns(m_mat) if normalize else as_matrix(m_mat, "M")
    solution = solve(m_mat, r_mat, params)
    assignment = cluster_rows(solution.row_space, k, seed)
    assignment.solution = solution
    return assignment

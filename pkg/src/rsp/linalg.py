"""Dense real-matrix kernels shared by the solver, baselines and metrics.

Matrices are plain 2-D ``float64`` numpy arrays. :func:`as_matrix` is the
single validation point (2-D, finite, float64).
"""
from dataclasses import dataclass

import numpy as np

from .errors import NumericError, ParameterError, ShapeError

# below this size the randomized range finder buys nothing
DENSE_CUTOFF = 64
OVERSAMPLE = 10
POWER_ITERS = 2


def as_matrix(a, name="matrix"):
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ParameterError(f"{name} contains NaN or Inf")
    return a


def matmul(a, b):
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


@dataclass(frozen=True)
class TruncatedSvd:
    left_vectors: np.ndarray
    singular_values: np.ndarray
    right_vectors: np.ndarray

    @property
    def rank(self):
        return self.singular_values.shape[0]

    def reconstruct(self):
        return (self.left_vectors * self.singular_values) @ self.right_vectors.T


def _dense_svd(a, r):
    try:
        u, s, vt = np.linalg.svd(a, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"dense SVD did not converge: {exc}") from exc
    return TruncatedSvd(u[:, :r], s[:r], vt[:r].T)


def _randomized_svd(a, r, rng):
    # Halko-Martinsson-Tropp range finder with re-orthonormalized power steps
    ell = min(r + OVERSAMPLE, min(a.shape))
    q, _ = np.linalg.qr(a @ rng.standard_normal((a.shape[1], ell)))
    for _ in range(POWER_ITERS):
        w, _ = np.linalg.qr(a.T @ q)
        q, _ = np.linalg.qr(a @ w)
    try:
        ub, s, vt = np.linalg.svd(q.T @ a, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"projected SVD did not converge: {exc}") from exc
    return TruncatedSvd((q @ ub)[:, :r], s[:r], vt[:r].T)


def truncated_svd(a, r, method="auto", seed=0):
    """Top-``r`` singular triplets of ``a``.

    ``method`` is ``"dense"``, ``"randomized"`` or ``"auto"``. Auto uses the
    dense LAPACK path when the short side is at most 64 or when ``r`` plus
    oversampling would cover more than half of it, and the randomized range
    finder (oversampling 10, two power iterations) otherwise. The randomized
    path is seeded, so results are reproducible.
    """
    a = as_matrix(a, "a")
    short = min(a.shape)
    if not 1 <= r <= short:
        raise ParameterError(f"rank {r} outside [1, {short}] for shape {a.shape}")
    if method == "auto":
        use_dense = short <= DENSE_CUTOFF or 2 * (r + OVERSAMPLE) > short
        method = "dense" if use_dense else "randomized"
    if method == "dense":
        return _dense_svd(a, r)
    if method == "randomized":
        return _randomized_svd(a, r, np.random.default_rng(seed))
    raise ParameterError(f"unknown SVD method {method!r}")


def operator_norm(a, tol=1e-10, max_iters=1000):
    """Largest singular value of ``a`` by power iteration on ``a.T @ a``.

    Stops once the estimate changes by less than ``tol`` relative. If the cap
    is reached (tiny spectral gap) the dense SVD answer is returned instead.
    """
    a = as_matrix(a, "a")
    if a.size == 0:
        raise ShapeError("operator norm of an empty matrix")
    if not np.any(a):
        return 0.0
    x = np.random.default_rng(0).standard_normal(a.shape[1])
    x /= np.linalg.norm(x)
    sigma = 0.0
    for _ in range(max_iters):
        y = a.T @ (a @ x)
        lam = np.linalg.norm(y)
        if lam == 0.0:
            break
        x = y / lam
        new_sigma = np.sqrt(lam)
        if abs(new_sigma - sigma) <= tol * new_sigma:
            # polish with the Rayleigh quotient, which is accurate to O(err^2)
            return float(np.linalg.norm(a @ x))
        sigma = new_sigma
    return float(np.linalg.norm(a, 2))


def frobenius_norm(a):
    return float(np.linalg.norm(as_matrix(a, "a")))


def shrink(a, tau):
    """Entry-wise soft threshold ``sign(x) * max(|x| - tau, 0)``."""
    if tau < 0:
        raise ParameterError(f"shrinkage threshold must be >= 0, got {tau}")
    a = np.asarray(a, dtype=np.float64)
    return np.sign(a) * np.maximum(np.abs(a) - tau, 0.0)


def orthonormality_error(v):
    v = np.asarray(v)
    return float(np.max(np.abs(v.T @ v - np.eye(v.shape[1])))) if v.size else 0.0


def principal_angles(a, b):
    """Principal angles (radians, ascending) between the column spans of two orthonormal bases."""
    s = np.linalg.svd(np.asarray(a).T @ np.asarray(b), compute_uv=False)
    return np.sort(np.arccos(np.clip(s, -1.0, 1.0)))


def orthonormal_completion(v, n_total, seed=0):
    """Extend an ``n x r`` orthonormal block to ``n x n_total`` columns."""
    n, r = v.shape
    if n_total <= r:
        return v[:, :n_total]
    rng = np.random.default_rng(seed)
    extra = rng.standard_normal((n, n_total - r))
    extra -= v @ (v.T @ extra)
    q, _ = np.linalg.qr(np.hstack([v, extra]))
    # QR may flip the sign of the leading columns; keep the caller's block exactly
    return np.hstack([v, q[:, r:]])

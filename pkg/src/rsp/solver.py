"""Row space pursuit by alternating proximal minimization.

Minimizes::

    lam * ||S||_1 + 1/2 * ||(M - R S)(I - V V^T)||_F^2   s.t.  V^T V = I

over an ``n x r`` orthonormal ``V`` and an ``m x n`` sparse ``S``. Each sweep
takes the exact minimizer in ``V`` (top-r right singular vectors of
``M - R S``) followed by one proximal gradient step in ``S`` with step
``1/rho``, ``rho = 1.1 * ||R||^2``.

The ``n x n`` projector ``I - V V^T`` is never formed; every product is
applied as ``A - (A V) V^T``.
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, ShapeError
from .linalg import as_matrix, operator_norm, orthonormal_completion, shrink, truncated_svd
from .sensing import sensing_array

log = logging.getLogger(__name__)

DEFAULT_LAMBDA = 2.0 ** -7


@dataclass(frozen=True)
class RspParams:
    r: int
    lam: float = DEFAULT_LAMBDA
    max_iters: int = 1000
    tol: float = 1e-6

    def __post_init__(self):
        if self.r < 1:
            raise ParameterError(f"r must be >= 1, got {self.r}")
        if not self.lam > 0:
            raise ParameterError(f"lambda must be > 0, got {self.lam}")
        if self.max_iters < 1:
            raise ParameterError("max_iters must be >= 1")
        if not self.tol > 0:
            raise ParameterError("tol must be > 0")


@dataclass
class RspSolution:
    row_space: np.ndarray
    sparse: np.ndarray
    objective_trace: list = field(default_factory=list)
    iterations: int = 0
    converged: bool = False
    rho: float = 0.0
    degenerate: bool = False

    def projector(self):
        return self.row_space @ self.row_space.T


def _project_out(a, v):
    """``a (I - v v^T)`` without materializing the projector."""
    return a - (a @ v) @ v.T


def _check_shapes(m_mat, r_mat, s=None, v=None):
    p, n = m_mat.shape
    if r_mat.shape[0] != p:
        raise ShapeError(f"M has {p} rows but R has {r_mat.shape[0]}")
    if s is not None and s.shape != (r_mat.shape[1], n):
        raise ShapeError(f"S must be {(r_mat.shape[1], n)}, got {s.shape}")
    if v is not None and v.shape[0] != n:
        raise ShapeError(f"V must have {n} rows, got {v.shape}")


def smooth_term(m_mat, r_mat, v, s):
    """``1/2 ||(M - R S)(I - V V^T)||_F^2``."""
    r_mat = sensing_array(r_mat)
    _check_shapes(m_mat, r_mat, s, v)
    return 0.5 * float(np.sum(_project_out(m_mat - r_mat @ s, v) ** 2))


def objective(m_mat, r_mat, v, s, lam):
    return lam * float(np.abs(s).sum()) + smooth_term(m_mat, r_mat, v, s)


def update_v(m_mat, r_mat, s, r):
    """Exact V-step: top-``r`` right singular vectors of ``M - R S``."""
    r_mat = sensing_array(r_mat)
    _check_shapes(m_mat, r_mat, s)
    return truncated_svd(m_mat - r_mat @ s, r).right_vectors


def gradient_s(m_mat, r_mat, v, s):
    """Gradient of the smooth term in S: ``R^T (R S - M)(I - V V^T)``."""
    r_mat = sensing_array(r_mat)
    _check_shapes(m_mat, r_mat, s, v)
    return r_mat.T @ _project_out(r_mat @ s - m_mat, v)


def update_s(s_prev, grad, lam, rho):
    """Proximal step ``shrink(S - grad / rho, lam / rho)``."""
    if not rho > 0:
        raise ParameterError(f"rho must be > 0, got {rho}")
    if lam < 0:
        raise ParameterError(f"lambda must be >= 0, got {lam}")
    return shrink(s_prev - grad / rho, lam / rho)


def penalty(r_mat):
    return 1.1 * operator_norm(sensing_array(r_mat)) ** 2


def _degenerate(m_mat, r_mat, r, rho, lam):
    # r >= p: M (I - V V^T) vanishes once V spans the row space of M, so the
    # gradient is zero and S stays at its initial value 0
    p, n = m_mat.shape
    if r > n:
        raise ParameterError(f"r={r} exceeds the number of points n={n}")
    short = min(p, n)
    v = truncated_svd(m_mat, short, method="dense").right_vectors
    v = orthonormal_completion(v, r)
    s = np.zeros((r_mat.shape[1], n))
    return RspSolution(v, s, [objective(m_mat, r_mat, v, s, lam)], 1, True, rho, True)


def solve(m_mat, r_mat, params, init_sparse=None):
    """Run the alternating proximal iteration from ``S = 0``.

    Stops when ``||S_new - S||_F / max(1, ||S||_F) < params.tol`` or after
    ``params.max_iters`` sweeps; hitting the cap is reported through
    ``converged=False``, not raised. ``init_sparse`` replaces the zero start.
    The objective is recorded after every sweep. The returned basis is
    refreshed from the final ``S`` so that the pair is a V-optimal point.
    """
    m_mat = as_matrix(m_mat, "M")
    r_arr = sensing_array(r_mat)
    _check_shapes(m_mat, r_arr)
    p, n = m_mat.shape
    rho = penalty(r_arr)
    if params.r >= p:
        log.debug("r=%d >= p=%d, taking the one-step degenerate path", params.r, p)
        return _degenerate(m_mat, r_arr, params.r, rho, params.lam)
    if params.r > n:
        raise ParameterError(f"r={params.r} exceeds the number of points n={n}")

    if init_sparse is None:
        s = np.zeros((r_arr.shape[1], n))
    else:
        s = as_matrix(init_sparse, "initial S").copy()
        _check_shapes(m_mat, r_arr, s)

    trace = []
    converged = False
    it = 0
    residual = m_mat - r_arr @ s
    for it in range(1, params.max_iters + 1):
        v = truncated_svd(residual, params.r).right_vectors
        grad = -(r_arr.T @ _project_out(residual, v))
        s_new = shrink(s - grad / rho, params.lam / rho)
        change = np.linalg.norm(s_new - s) / max(1.0, np.linalg.norm(s))
        s = s_new
        residual = m_mat - r_arr @ s
        smooth = 0.5 * float(np.sum(_project_out(residual, v) ** 2))
        trace.append(params.lam * float(np.abs(s).sum()) + smooth)
        if change < params.tol:
            converged = True
            break

    v = truncated_svd(residual, params.r).right_vectors
    log.debug("solve stopped after %d iterations (converged=%s)", it, converged)
    return RspSolution(v, s, trace, it, converged, rho)

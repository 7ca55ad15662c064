"""Random Gaussian sensing matrices with unit-norm columns, and M = R X.

Reproducibility contract: a seed maps to ``numpy.random.Generator`` on the
counter-based Philox4x64 bit generator, and normals come from numpy's
ziggurat ``standard_normal``. Entries are drawn in row-major order for the
whole ``p x m`` block in one call, so a given (seed, p, m) always yields
the same bits.
"""
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, ShapeError
from .linalg import as_matrix


def make_rng(seed):
    return np.random.Generator(np.random.Philox(int(seed)))


@dataclass(frozen=True)
class SensingMatrix:
    matrix: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "matrix", as_matrix(self.matrix, "sensing matrix"))

    @property
    def shape(self):
        return self.matrix.shape

    @property
    def p(self):
        return self.matrix.shape[0]

    @property
    def m(self):
        return self.matrix.shape[1]


def make_sensing(p, m, seed, allow_square=False):
    """Draw a ``p x m`` Gaussian matrix and scale each column to unit length.

    ``p < m`` is enforced unless ``allow_square`` is set (degenerate tests).
    """
    if p < 1 or m < 1:
        raise ParameterError(f"p and m must be positive, got p={p}, m={m}")
    if p >= m and not allow_square:
        raise ParameterError(f"compression needs p < m, got p={p}, m={m}")
    rng = make_rng(seed)
    r = rng.standard_normal((p, m))
    norms = np.linalg.norm(r, axis=0)
    for j in np.flatnonzero(norms == 0.0):
        while norms[j] == 0.0:
            r[:, j] = rng.standard_normal(p)
            norms[j] = np.linalg.norm(r[:, j])
    return SensingMatrix(r / norms, int(seed))


def sensing_array(r):
    return r.matrix if isinstance(r, SensingMatrix) else as_matrix(r, "sensing matrix")


def compress(r, x):
    """Return ``R @ X``."""
    rm = sensing_array(r)
    x = as_matrix(x, "data")
    if rm.shape[1] != x.shape[0]:
        raise ShapeError(f"sensing matrix {rm.shape} incompatible with data {x.shape}")
    return rm @ x

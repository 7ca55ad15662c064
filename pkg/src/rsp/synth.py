"""Synthetic union-of-subspaces data with sparse +-1 gross corruption."""
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ParameterError
from .sensing import make_rng


@dataclass(frozen=True)
class SynConfig:
    m: int = 200
    n_per_class: int = 100
    k: int = 2
    subspace_dim: int = 1
    corruption_size: float = 0.0
    seed: int = 0

    @property
    def n(self):
        return self.k * self.n_per_class

    @property
    def true_rank(self):
        return self.k * self.subspace_dim

    @property
    def corruption_count(self):
        # round half up; Python's round() is banker's rounding
        return int(np.floor(self.corruption_size * self.n + 0.5))

    def validate(self):
        if self.m < 1 or self.n_per_class < 1 or self.k < 1:
            raise ParameterError(f"m, n_per_class and k must be positive: {self}")
        if self.subspace_dim < 1:
            raise ParameterError("subspace_dim must be >= 1")
        if self.true_rank > min(self.m, self.n):
            raise ParameterError(
                f"k*subspace_dim = {self.true_rank} exceeds min(m, n) = {min(self.m, self.n)}")
        if self.subspace_dim > self.n_per_class:
            raise ParameterError("each subspace needs at least subspace_dim points")
        if self.corruption_size < 0 or self.corruption_count > self.m * self.n:
            raise ParameterError(f"corruption_size {self.corruption_size} out of range")

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class SynInstance:
    config: SynConfig
    clean: np.ndarray
    corruption: np.ndarray
    observed: np.ndarray
    labels: np.ndarray
    bases: tuple

    @property
    def true_rank(self):
        return self.config.true_rank

    @property
    def corruption_count(self):
        return int(np.count_nonzero(self.corruption))

    def manifest(self):
        return {
            "config": self.config.to_dict(),
            "m": self.clean.shape[0],
            "n": self.clean.shape[1],
            "true_rank": self.true_rank,
            "corruption_count": self.corruption_count,
        }


def generate(cfg):
    """Build L0 = [U_1 C_1, ..., U_k C_k], scale to unit sup-norm, add S0.

    S0 has ``cfg.corruption_count`` nonzeros at distinct positions drawn
    uniformly over the m x n grid, each +1 or -1 with equal probability.
    """
    cfg.validate()
    rng = make_rng(cfg.seed)
    m, n, d = cfg.m, cfg.n, cfg.subspace_dim
    bases = []
    blocks = []
    for _ in range(cfg.k):
        u, _ = np.linalg.qr(rng.standard_normal((m, d)))
        bases.append(u)
        blocks.append(u @ rng.standard_normal((d, cfg.n_per_class)))
    clean = np.hstack(blocks)
    clean /= np.max(np.abs(clean))
    labels = np.repeat(np.arange(cfg.k), cfg.n_per_class)

    count = cfg.corruption_count
    corruption = np.zeros(m * n)
    positions = rng.choice(m * n, size=count, replace=False)
    corruption[positions] = rng.choice(np.array([-1.0, 1.0]), size=count)
    corruption = corruption.reshape(m, n)
    return SynInstance(cfg, clean, corruption, clean + corruption, labels, tuple(bases))

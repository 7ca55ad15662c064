"""Baselines that work on the compressed matrix alone, without R.

SIM takes the top-r right singular vectors of M and clusters their rows.
The PCA row-space estimate is the same computation; it keeps its own name
so benchmark tables can carry both legends.
"""
from .clustering import cluster_rows
from .errors import ParameterError
from .linalg import as_matrix, truncated_svd


def sim_rowspace(m_mat, r):
    m_mat = as_matrix(m_mat, "M")
    if not 1 <= r <= min(m_mat.shape):
        raise ParameterError(f"r={r} outside [1, {min(m_mat.shape)}]")
    return truncated_svd(m_mat, r).right_vectors


def pca_rowspace(m_mat, r):
    return sim_rowspace(m_mat, r)


def sim_cluster(m_mat, r, k, seed=0):
    return cluster_rows(sim_rowspace(m_mat, r), k, seed)

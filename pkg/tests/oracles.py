"""Slow reference implementations used only to check the library."""
import itertools

import numpy as np


def naive_matmul(a, b):
    n, k = a.shape
    _, m = b.shape
    out = np.zeros((n, m))
    for i in range(n):
        for j in range(m):
            acc = 0.0
            for t in range(k):
                acc += a[i, t] * b[t, j]
            out[i, j] = acc
    return out


def naive_frobenius(a):
    acc = 0.0
    for x in np.asarray(a).ravel():
        acc += float(x) * float(x)
    return acc ** 0.5


def jacobi_svd(a, tol=1e-15, sweeps=100):
    """One-sided Jacobi SVD; returns (U, s, V) with s descending."""
    a = np.array(a, dtype=np.float64)
    transpose = a.shape[0] < a.shape[1]
    if transpose:
        a = a.T
    u = a.copy()
    n = u.shape[1]
    v = np.eye(n)
    for _ in range(sweeps):
        rotated = False
        for i in range(n - 1):
            for j in range(i + 1, n):
                alpha = u[:, i] @ u[:, i]
                beta = u[:, j] @ u[:, j]
                gamma = u[:, i] @ u[:, j]
                if abs(gamma) <= tol * np.sqrt(alpha * beta) or gamma == 0.0:
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                t = np.sign(zeta) / (abs(zeta) + np.sqrt(1.0 + zeta * zeta)) if zeta != 0 else 1.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                ui, uj = u[:, i].copy(), u[:, j].copy()
                u[:, i], u[:, j] = c * ui - s * uj, s * ui + c * uj
                vi, vj = v[:, i].copy(), v[:, j].copy()
                v[:, i], v[:, j] = c * vi - s * vj, s * vi + c * vj
        if not rotated:
            break
    sv = np.linalg.norm(u, axis=0)
    order = np.argsort(-sv)
    sv = sv[order]
    v = v[:, order]
    u = u[:, order]
    with np.errstate(invalid="ignore", divide="ignore"):
        u = np.where(sv > 0, u / sv, 0.0)
    if transpose:
        return v, sv, u
    return u, sv, v


def soft_threshold(x, tau):
    if x > tau:
        return x - tau
    if x < -tau:
        return x + tau
    return 0.0


def brute_force_accuracy(pred, truth):
    pred = list(pred)
    truth = list(truth)
    p_labels = sorted(set(pred))
    t_labels = sorted(set(truth))
    best = 0
    size = max(len(p_labels), len(t_labels))
    padded_t = t_labels + [None] * (size - len(t_labels))
    for perm in itertools.permutations(padded_t, len(p_labels)):
        mapping = dict(zip(p_labels, perm))
        best = max(best, sum(mapping[p] == t for p, t in zip(pred, truth)))
    return best / len(pred)


def finite_difference(f, x, idx, h=1e-6):
    xp = x.copy()
    xm = x.copy()
    xp[idx] += h
    xm[idx] -= h
    return (f(xp) - f(xm)) / (2 * h)


def projector(v):
    return v @ v.T

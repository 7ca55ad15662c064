"""Row-space recovery quality, the benchmark score buckets, and support metrics."""
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ParameterError

SNR_CAP_DB = 300.0
SUPPORT_REL_THRESHOLD = 1e-3


def projector_snr(v_true, v_est):
    """SNR in dB of the estimated projector against the true one.

    ``10 log10(||P_true||_F^2 / ||P_true - P_est||_F^2)`` with the first
    argument as the reference. Both Frobenius norms are computed from the
    ``r x r`` cross-Gram, so no ``n x n`` matrix is formed. Exact recovery is
    reported as ``SNR_CAP_DB``.
    """
    v_true = np.asarray(v_true, dtype=np.float64)
    v_est = np.asarray(v_est, dtype=np.float64)
    if v_true.ndim != 2 or v_est.ndim != 2 or v_true.shape[0] != v_est.shape[0]:
        raise ParameterError(f"bases must share n: {v_true.shape} vs {v_est.shape}")
    ref = float(np.sum((v_true.T @ v_true) ** 2))
    cross = float(np.sum((v_true.T @ v_est) ** 2))
    est = float(np.sum((v_est.T @ v_est) ** 2))
    diff = max(ref + est - 2.0 * cross, 0.0)
    if diff < 1e-15 * max(ref, 1.0):
        return SNR_CAP_DB
    return min(10.0 * np.log10(ref / diff), SNR_CAP_DB)


def score_of_snr(snr_db):
    if snr_db >= 30:
        return 1.0
    if snr_db >= 20:
        return 0.5
    if snr_db >= 15:
        return 0.2
    return 0.0


def support(a, threshold):
    return np.abs(np.asarray(a)) > threshold


def support_metrics(s_true, s_est, threshold=None):
    """Precision and recall of the estimated sparse support.

    ``threshold=None`` uses ``1e-3 * max|s_est|``. An empty estimate has
    precision 1, an empty truth has recall 1.
    """
    s_true = np.asarray(s_true)
    s_est = np.asarray(s_est)
    if s_true.shape != s_est.shape:
        raise ParameterError(f"support shapes differ: {s_true.shape} vs {s_est.shape}")
    if threshold is None:
        threshold = SUPPORT_REL_THRESHOLD * (float(np.max(np.abs(s_est))) if s_est.size else 0.0)
    if threshold < 0:
        raise ParameterError("threshold must be >= 0")
    est = support(s_est, threshold)
    true = support(s_true, threshold)
    hit = int(np.count_nonzero(est & true))
    n_est = int(np.count_nonzero(est))
    n_true = int(np.count_nonzero(true))
    precision = hit / n_est if n_est else 1.0
    recall = hit / n_true if n_true else 1.0
    return precision, recall


def corruption_size(s, threshold=0.0):
    s = np.asarray(s)
    return int(np.count_nonzero(np.abs(s) > threshold)) / s.shape[1]


@dataclass
class RecoveryReport:
    snr_db: float
    score: float
    corruption_size: float
    support_precision: float | None
    support_recall: float | None

    def to_dict(self):
        return asdict(self)


def recovery_report(v_true, v_est, s_true=None, s_est=None, threshold=None):
    snr = projector_snr(v_true, v_est)
    if s_est is None:
        return RecoveryReport(snr, score_of_snr(snr), 0.0, 1.0, 1.0)
    if threshold is None:
        threshold = SUPPORT_REL_THRESHOLD * float(np.max(np.abs(s_est))) if np.size(s_est) else 0.0
    if s_true is None:
        precision = recall = None
    else:
        precision, recall = support_metrics(s_true, s_est, threshold)
    return RecoveryReport(snr, score_of_snr(snr), corruption_size(s_est, threshold),
                          precision, recall)

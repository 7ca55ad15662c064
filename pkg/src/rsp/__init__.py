"""Row space pursuit: compressive robust subspace clustering."""
__version__ = "0.1.0"

from .baselines import pca_rowspace, sim_cluster, sim_rowspace
from .clustering import (
    ClusterAssignment, accuracy, cluster_compressed, cluster_rows, kmeans, row_embedding,
)
from .errors import NumericError, ParameterError, RspError, ShapeError
from .linalg import frobenius_norm, matmul, operator_norm, shrink, truncated_svd
from .metrics import projector_snr, score_of_snr, support_metrics
from .sensing import SensingMatrix, compress, make_sensing
from .solver import RspParams, RspSolution, solve
from .synth import SynConfig, SynInstance, generate

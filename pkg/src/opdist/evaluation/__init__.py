from .clustering import (
    ALGORITHMS,
    ClusteringError,
    ClusteringResult,
    cluster,
    kmeans_rows,
    kmedoids,
    spectral,
)
from .metrics import ari, d_metric, nmi, silhouette, weighted_f1
from .report import EvaluationReport, evaluate, nearest_neighbors
from .supervised import (
    LogisticRegression,
    SupervisedError,
    logistic_grad,
    logistic_loss,
    supervised_pairwise,
)

__all__ = [
    "ALGORITHMS",
    "ClusteringError",
    "ClusteringResult",
    "EvaluationReport",
    "LogisticRegression",
    "SupervisedError",
    "ari",
    "cluster",
    "d_metric",
    "evaluate",
    "kmeans_rows",
    "kmedoids",
    "logistic_grad",
    "logistic_loss",
    "nearest_neighbors",
    "nmi",
    "silhouette",
    "spectral",
    "supervised_pairwise",
    "weighted_f1",
]

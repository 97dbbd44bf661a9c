from cosigma.metrics.burst import BurstInterval, BurstParams, BurstResult, detect_bursts
from cosigma.metrics.centrality import betweenness
from cosigma.metrics.indices import (
    SELECTORS,
    SIGMA2,
    SIGMA3,
    NodeMetrics,
    SigmaConfig,
    compute_metrics,
    geometric_mean,
    normalize,
    pearson,
    pearson_matrix,
    rank_candidates,
    sigma,
)

__all__ = [
    "SELECTORS",
    "SIGMA2",
    "SIGMA3",
    "BurstInterval",
    "BurstParams",
    "BurstResult",
    "NodeMetrics",
    "SigmaConfig",
    "betweenness",
    "compute_metrics",
    "detect_bursts",
    "geometric_mean",
    "normalize",
    "pearson",
    "pearson_matrix",
    "rank_candidates",
    "sigma",
]

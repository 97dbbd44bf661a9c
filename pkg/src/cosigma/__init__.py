"""Co-citation network analysis for spotting candidate transformative references.

The pipeline reads field-tagged bibliographic exports, builds time-sliced
co-citation networks, scores every cited reference by betweenness,
citation burstness and citation count, and ranks them by geometric-mean
sigma indices. A small growth simulator contrasts brokerage growth with
preferential attachment.
"""

from cosigma.bib_ingest import (
    BibRecord,
    CitedRefKey,
    Corpus,
    filter_corpus,
    format_cited_ref,
    parse_cited_ref,
    parse_export_file,
)
from cosigma.cocite_graph import (
    CoCitationNetwork,
    TimeSlice,
    TopN,
    Triple,
    build_network,
    merge_slices,
    slice_corpus,
)
from cosigma.metrics import (
    BurstParams,
    NodeMetrics,
    SigmaConfig,
    betweenness,
    compute_metrics,
    detect_bursts,
    normalize,
    pearson_matrix,
    rank_candidates,
    sigma,
)

__version__ = "0.1.0"

__all__ = [
    "BibRecord",
    "BurstParams",
    "CitedRefKey",
    "CoCitationNetwork",
    "Corpus",
    "NodeMetrics",
    "SigmaConfig",
    "TimeSlice",
    "TopN",
    "Triple",
    "betweenness",
    "build_network",
    "compute_metrics",
    "detect_bursts",
    "filter_corpus",
    "format_cited_ref",
    "merge_slices",
    "normalize",
    "parse_cited_ref",
    "parse_export_file",
    "pearson_matrix",
    "rank_candidates",
    "sigma",
    "slice_corpus",
]

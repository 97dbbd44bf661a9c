"""CSV and GraphML writers for networks, metrics and simulation results."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, Sequence

import networkx as nx

from cosigma.bib_ingest import format_cited_ref
from cosigma.cocite_graph import CoCitationNetwork
from cosigma.metrics import NodeMetrics

METRICS_COLUMNS = [
    "author", "year", "source", "volume", "page", "citations",
    "rho_burst", "rho_centrality", "rho_citation", "sigma2", "sigma3",
]
RANKING_COLUMNS = ["rank"] + METRICS_COLUMNS
CORRELATION_COLUMNS = ["rho_citation", "rho_burst", "rho_centrality", "sigma2", "sigma3"]
EDGE_COLUMNS = ["source", "target", "weight", "first_year"]
BURST_COLUMNS = ["reference", "start_year", "end_year", "weight", "rate_ratio"]
SIM_COLUMNS = ["run", "mechanism", "node", "step", "degree", "betweenness"]
SUMMARY_COLUMNS = ["run", "mechanism_a", "mechanism_b", "median_a", "median_b", "ratio"]

UNDEFINED = "undefined"


def fmt(x: float | None) -> str:
    return UNDEFINED if x is None else f"{x:.4f}"


def _writer(path: Path):
    fh = open(path, "w", newline="", encoding="utf-8")
    return fh, csv.writer(fh, lineterminator="\n")


def _metrics_row(m: NodeMetrics) -> list:
    k = m.key
    return [
        k.first_author, "" if k.year is None else k.year, k.source, k.volume or "", k.page or "",
        m.citation_raw, fmt(m.rho_burst), fmt(m.rho_centrality), fmt(m.rho_citation),
        fmt(m.sigma2), fmt(m.sigma3),
    ]


def write_metrics_csv(path: Path, metrics: Iterable[NodeMetrics]) -> None:
    fh, w = _writer(path)
    with fh:
        w.writerow(METRICS_COLUMNS)
        for m in metrics:
            w.writerow(_metrics_row(m))


def write_ranking_csv(path: Path, ranked: Sequence[NodeMetrics]) -> None:
    fh, w = _writer(path)
    with fh:
        w.writerow(RANKING_COLUMNS)
        for i, m in enumerate(ranked, start=1):
            w.writerow([i] + _metrics_row(m))


def write_correlation_csv(path: Path, matrix: Sequence[Sequence[float | None]],
                          columns: Sequence[str] = CORRELATION_COLUMNS) -> None:
    """Upper triangle only (above the diagonal); other cells are left blank."""
    fh, w = _writer(path)
    with fh:
        w.writerow([""] + list(columns))
        for i, name in enumerate(columns):
            w.writerow([name] + [fmt(matrix[i][j]) if j > i else "" for j in range(len(columns))])


def write_bursts_csv(path: Path, metrics: Iterable[NodeMetrics]) -> None:
    fh, w = _writer(path)
    with fh:
        w.writerow(BURST_COLUMNS)
        for m in metrics:
            for iv in m.bursts:
                w.writerow([format_cited_ref(m.key), iv.start_year, iv.end_year, fmt(iv.weight),
                            fmt(m.burst_ratio)])


def write_edges_csv(path: Path, net: CoCitationNetwork) -> None:
    fh, w = _writer(path)
    with fh:
        w.writerow(EDGE_COLUMNS)
        for (a, b), e in sorted(net.edges.items()):
            w.writerow([format_cited_ref(a), format_cited_ref(b), e.cocite_count, e.first_year])


def ring_string(ring: dict[int, int]) -> str:
    return ";".join(f"{y}:{n}" for y, n in sorted(ring.items()))


def network_to_nx(net: CoCitationNetwork) -> nx.Graph:
    g = nx.Graph()
    ids = {}
    for i, key in enumerate(sorted(net.nodes)):
        node = net.nodes[key]
        ids[key] = f"n{i}"
        g.add_node(ids[key], label=format_cited_ref(key), total_citations=node.total,
                   ring=ring_string(node.citation_ring))
    for (a, b), e in sorted(net.edges.items()):
        g.add_edge(ids[a], ids[b], cocite_count=e.cocite_count, first_year=e.first_year)
    return g


def write_network_graphml(path: Path, net: CoCitationNetwork) -> None:
    nx.write_graphml(network_to_nx(net), path)


def write_sim_graphml(path: Path, adjacency: dict[int, set[int]], community: dict[int, int]) -> None:
    g = nx.Graph()
    for v in sorted(adjacency):
        g.add_node(v, community=community.get(v, -1))
    for u in sorted(adjacency):
        for v in sorted(adjacency[u]):
            if u < v:
                g.add_edge(u, v)
    nx.write_graphml(g, path)


def read_csv_header(path: Path) -> list[str]:
    with open(path, newline="", encoding="utf-8") as fh:
        return next(csv.reader(fh), [])

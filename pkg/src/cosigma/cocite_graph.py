"""Time-sliced co-citation networks.

Each slice keeps the references that pass a selection threshold, links
every pair of selected references that a record cites together, and the
slice networks are then merged into one panoramic network.  Nodes keep a
year -> count "citation ring"; edges keep their co-citation count and the
earliest year the pair was co-cited.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Union

from cosigma.bib_ingest import CitedRefKey, Corpus
from cosigma.errors import EmptyCorpusError

Ring = dict[int, int]
EdgeKey = tuple[CitedRefKey, CitedRefKey]


@dataclass(frozen=True)
class TimeSlice:
    start_year: int
    end_year: int

    def __post_init__(self) -> None:
        if self.start_year > self.end_year:
            raise ValueError(f"slice {self.start_year}-{self.end_year} is empty")

    def __contains__(self, year: object) -> bool:
        return isinstance(year, int) and self.start_year <= year <= self.end_year

    def __str__(self) -> str:
        return f"{self.start_year}-{self.end_year}"


@dataclass(frozen=True)
class TopN:
    """Keep the ``n`` most cited references of each slice."""

    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("TopN.n must be positive")


@dataclass(frozen=True)
class Triple:
    """CiteSpace-style ``c,cc,ccv`` threshold.

    ``c``: minimum citations in a single year of the slice.
    ``cc``: minimum raw co-citation count of an edge.
    ``ccv``: minimum cosine co-citation coefficient, times 100.
    """

    c: int
    cc: int
    ccv: float

    def __post_init__(self) -> None:
        if self.c < 1 or self.cc < 1 or self.ccv <= 0:
            raise ValueError("Triple threshold components must be positive")

    @classmethod
    def parse(cls, text: str) -> "Triple":
        c, cc, ccv = (p.strip() for p in text.split(","))
        return cls(int(c), int(cc), float(ccv))


SelectionThreshold = Union[TopN, Triple]


@dataclass
class NodeRecord:
    citation_ring: Ring
    first_seen_slice: int

    @property
    def total(self) -> int:
        return sum(self.citation_ring.values())


@dataclass
class EdgeRecord:
    cocite_count: int
    first_year: int


def edge_key(a: CitedRefKey, b: CitedRefKey) -> EdgeKey:
    return (a, b) if a < b else (b, a)


@dataclass
class CoCitationNetwork:
    nodes: dict[CitedRefKey, NodeRecord] = field(default_factory=dict)
    edges: dict[EdgeKey, EdgeRecord] = field(default_factory=dict)
    slices: list[TimeSlice] = field(default_factory=list)

    def adjacency(self) -> dict[CitedRefKey, list[CitedRefKey]]:
        adj: dict[CitedRefKey, list[CitedRefKey]] = {k: [] for k in sorted(self.nodes)}
        for a, b in sorted(self.edges):
            adj[a].append(b)
            adj[b].append(a)
        return adj

    def year_totals(self) -> Ring:
        """Per-year citation totals summed over every node ring."""
        totals: Ring = {}
        for node in self.nodes.values():
            for y, n in node.citation_ring.items():
                totals[y] = totals.get(y, 0) + n
        return dict(sorted(totals.items()))

    def check(self) -> None:
        """Assert the structural invariants; used by tests and the CLI."""
        for (a, b), e in self.edges.items():
            assert a != b, "self-loop"
            assert a in self.nodes and b in self.nodes, "dangling edge"
            assert e.cocite_count >= 1
        for node in self.nodes.values():
            assert all(v >= 0 for v in node.citation_ring.values())
            assert node.total > 0


def slice_corpus(corpus: Corpus, slice_length_years: int) -> list[TimeSlice]:
    if slice_length_years < 1:
        raise ValueError("slice length must be positive")
    lo, hi = corpus.year_min, corpus.year_max
    if lo is None or hi is None:
        raise EmptyCorpusError("no dated records to slice")
    return [
        TimeSlice(start, min(start + slice_length_years - 1, hi))
        for start in range(lo, hi + 1, slice_length_years)
    ]


def count_slice_citations(corpus: Corpus, s: TimeSlice) -> dict[CitedRefKey, Ring]:
    counts: dict[CitedRefKey, Ring] = {}
    for rec in corpus.records:
        if rec.year not in s:
            continue
        for key in set(rec.cited_refs):
            ring = counts.setdefault(key, {})
            ring[rec.year] = ring.get(rec.year, 0) + 1
    return counts


def _topn_order(item: tuple[CitedRefKey, Ring]) -> tuple:
    key, ring = item
    return (-sum(ring.values()), key.year if key.year is not None else 10**9, key.sort_key())


def select_nodes(counts: Mapping[CitedRefKey, Ring], threshold: SelectionThreshold) -> set[CitedRefKey]:
    """Pick the references of one slice that enter its network.

    Triple mode keeps references whose best single year reaches ``c``.
    TopN mode ranks by total slice citations, ties going to the earlier
    publication year, then to the smaller key.
    """
    if isinstance(threshold, Triple):
        return {k for k, ring in counts.items() if ring and max(ring.values()) >= threshold.c}
    ranked = sorted(counts.items(), key=_topn_order)
    return {k for k, _ in ranked[: threshold.n]}


def count_cocitations(
    corpus: Corpus,
    s: TimeSlice,
    selected: Iterable[CitedRefKey],
    threshold: SelectionThreshold | None = None,
) -> dict[EdgeKey, EdgeRecord]:
    selected = set(selected)
    edges: dict[EdgeKey, EdgeRecord] = {}
    for rec in corpus.records:
        if rec.year not in s:
            continue
        cited = sorted(set(rec.cited_refs) & selected)
        for a, b in combinations(cited, 2):
            e = edges.get((a, b))
            if e is None:
                edges[(a, b)] = EdgeRecord(1, rec.year)
            else:
                e.cocite_count += 1
                e.first_year = min(e.first_year, rec.year)
    if isinstance(threshold, Triple):
        counts = count_slice_citations(corpus, s)
        totals = {k: sum(counts[k].values()) for k in selected if k in counts}
        edges = {
            pair: e
            for pair, e in edges.items()
            if e.cocite_count >= threshold.cc
            and e.cocite_count / math.sqrt(totals[pair[0]] * totals[pair[1]]) >= threshold.ccv / 100.0
        }
    return edges


def build_slice_network(corpus: Corpus, s: TimeSlice, threshold: SelectionThreshold,
                        slice_index: int = 0) -> CoCitationNetwork:
    counts = count_slice_citations(corpus, s)
    selected = select_nodes(counts, threshold) if counts else set()
    nodes = {k: NodeRecord(dict(sorted(counts[k].items())), slice_index) for k in sorted(selected)}
    edges = count_cocitations(corpus, s, selected, threshold)
    return CoCitationNetwork(nodes, edges, [s])


def merge_slices(slice_networks: Iterable[CoCitationNetwork]) -> CoCitationNetwork:
    """Sum slice networks into one: rings and edge counts add, first years take the min."""
    merged = CoCitationNetwork()
    for net in slice_networks:
        merged.slices.extend(net.slices)
        for key, node in net.nodes.items():
            tgt = merged.nodes.get(key)
            if tgt is None:
                merged.nodes[key] = NodeRecord(dict(node.citation_ring), node.first_seen_slice)
                continue
            for y, n in node.citation_ring.items():
                tgt.citation_ring[y] = tgt.citation_ring.get(y, 0) + n
            tgt.citation_ring = dict(sorted(tgt.citation_ring.items()))
            tgt.first_seen_slice = min(tgt.first_seen_slice, node.first_seen_slice)
        for pair, e in net.edges.items():
            tgt_e = merged.edges.get(pair)
            if tgt_e is None:
                merged.edges[pair] = EdgeRecord(e.cocite_count, e.first_year)
            else:
                tgt_e.cocite_count += e.cocite_count
                tgt_e.first_year = min(tgt_e.first_year, e.first_year)
    return merged


def build_network(corpus: Corpus, slice_years: int,
                  threshold: SelectionThreshold) -> tuple[CoCitationNetwork, list[CoCitationNetwork]]:
    """Slice, build every slice network, and merge. Returns (merged, per-slice)."""
    slices = slice_corpus(corpus, slice_years)
    per_slice = [build_slice_network(corpus, s, threshold, i) for i, s in enumerate(slices)]
    return merge_slices(per_slice), per_slice

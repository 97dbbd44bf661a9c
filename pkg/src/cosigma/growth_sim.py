"""Network growth: brokerage across structural holes vs preferential attachment.

The seed graph is ``k`` disconnected random blocks (no edges between
blocks, so the structural holes are literal).  Each step adds one node:

* ``preferential``: ``m`` distinct targets, each drawn with probability
  proportional to current degree.
* ``brokerage``: two distinct seed communities drawn uniformly;
  ``ceil(m/2)`` uniform targets in the first and ``floor(m/2)`` in the
  second.
* ``uniform``: ``m`` distinct targets drawn uniformly from all nodes; a
  control for the preferential model.

Betweenness of the final network comes from
:func:`cosigma.metrics.betweenness`.
"""

from __future__ import annotations

import random
import statistics
from dataclasses import dataclass, field, replace
from enum import Enum

from cosigma.errors import ConfigInvalidError
from cosigma.metrics import betweenness


class Mechanism(str, Enum):
    PREFERENTIAL = "preferential"
    BROKERAGE = "brokerage"
    UNIFORM = "uniform"

    @classmethod
    def parse(cls, text: str) -> "Mechanism":
        aliases = {"pa": cls.PREFERENTIAL, "preferentialattachment": cls.PREFERENTIAL}
        t = text.strip().lower().replace("_", "").replace("-", "")
        if t in aliases:
            return aliases[t]
        try:
            return cls(t)
        except ValueError:
            raise ConfigInvalidError(f"unknown mechanism {text!r}") from None


@dataclass(frozen=True)
class GrowthConfig:
    mechanism: Mechanism = Mechanism.BROKERAGE
    seed_communities: int = 4
    seed_size: int = 10
    intra_p: float = 0.6
    steps: int = 30
    links_per_node: int = 2
    rng_seed: int = 0

    def validate(self) -> None:
        m, k = self.links_per_node, self.seed_communities
        if k < 1 or self.seed_size < 1 or m < 1 or self.steps < 0:
            raise ConfigInvalidError("communities, seed size and links must be positive; steps >= 0")
        if not 0.0 < self.intra_p <= 1.0:
            raise ConfigInvalidError(f"intra_p must be in (0, 1], got {self.intra_p}")
        if self.seed_size * k < m + 1:
            raise ConfigInvalidError("seed graph too small for links_per_node")
        if self.mechanism is Mechanism.BROKERAGE and (k < 2 or m < 2):
            raise ConfigInvalidError("brokerage needs two or more seed communities and links_per_node >= 2")
        if not 0 <= self.rng_seed < 2**64:
            raise ConfigInvalidError("rng_seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class AddedNode:
    node: int
    step: int
    mechanism: Mechanism
    degree: int
    centrality: float
    communities: tuple[int, ...] = ()


@dataclass
class SimResult:
    config: GrowthConfig
    adjacency: dict[int, set[int]]
    # seed node -> community index; added nodes are absent
    community: dict[int, int]
    seed_edges: int
    realized_links: list[int] = field(default_factory=list)
    added: list[AddedNode] = field(default_factory=list)

    @property
    def edge_count(self) -> int:
        return sum(len(nb) for nb in self.adjacency.values()) // 2

    def edges(self) -> list[tuple[int, int]]:
        return sorted((u, v) for u, nb in self.adjacency.items() for v in nb if u < v)


def _seed_graph(cfg: GrowthConfig, rng: random.Random) -> tuple[dict[int, set[int]], dict[int, int]]:
    adj: dict[int, set[int]] = {}
    community: dict[int, int] = {}
    for c in range(cfg.seed_communities):
        members = list(range(c * cfg.seed_size, (c + 1) * cfg.seed_size))
        for v in members:
            adj[v] = set()
            community[v] = c
        for i, u in enumerate(members):
            for v in members[i + 1:]:
                if rng.random() < cfg.intra_p:
                    adj[u].add(v)
                    adj[v].add(u)
    return adj, community


def _weighted_sample(nodes: list[int], weights: list[float], m: int, rng: random.Random) -> list[int]:
    nodes, weights = list(nodes), list(weights)
    picked = []
    while nodes and len(picked) < m:
        total = sum(weights)
        if total <= 0:
            i = rng.randrange(len(nodes))
        else:
            x = rng.random() * total
            acc = 0.0
            i = len(nodes) - 1
            for j, w in enumerate(weights):
                acc += w
                if x < acc:
                    i = j
                    break
        picked.append(nodes.pop(i))
        weights.pop(i)
    return picked


def _targets(cfg: GrowthConfig, adj, community, rng: random.Random) -> tuple[list[int], tuple[int, ...]]:
    m = cfg.links_per_node
    existing = sorted(adj)
    if cfg.mechanism is Mechanism.PREFERENTIAL:
        return _weighted_sample(existing, [len(adj[v]) for v in existing], m, rng), ()
    if cfg.mechanism is Mechanism.UNIFORM:
        return rng.sample(existing, min(m, len(existing))), ()
    first, second = rng.sample(range(cfg.seed_communities), 2)
    chosen = []
    for c, quota in ((first, (m + 1) // 2), (second, m // 2)):
        members = [v for v in existing if community.get(v) == c]
        chosen.extend(rng.sample(members, min(quota, len(members))))
    return chosen, (first, second)


def simulate(cfg: GrowthConfig) -> SimResult:
    """Grow a network from ``cfg``; fully determined by ``cfg.rng_seed``."""
    cfg.validate()
    rng = random.Random(cfg.rng_seed)
    adj, community = _seed_graph(cfg, rng)
    result = SimResult(cfg, adj, community, seed_edges=sum(len(nb) for nb in adj.values()) // 2)
    picked_communities = []
    for step in range(cfg.steps):
        targets, comms = _targets(cfg, adj, community, rng)
        new = len(adj)
        adj[new] = set(targets)
        for t in targets:
            adj[t].add(new)
        result.realized_links.append(len(targets))
        picked_communities.append((new, step, comms))
    centrality = betweenness(adj)
    result.added = [
        AddedNode(v, step, cfg.mechanism, len(adj[v]), centrality[v], comms)
        for v, step, comms in picked_communities
    ]
    return result


@dataclass
class RunComparison:
    run: int
    median_a: float | None
    median_b: float | None

    @property
    def ratio(self) -> float | None:
        if self.median_a is None or self.median_b is None or self.median_b == 0:
            return None
        return self.median_a / self.median_b


@dataclass
class ComparisonSummary:
    mechanism_a: Mechanism
    mechanism_b: Mechanism
    runs: list[RunComparison]
    results_a: list[SimResult] = field(repr=False, default_factory=list)
    results_b: list[SimResult] = field(repr=False, default_factory=list)

    @property
    def median_ratio(self) -> float | None:
        ratios = [r.ratio for r in self.runs if r.ratio is not None]
        return statistics.median(ratios) if ratios else None

    @property
    def wins_a(self) -> int:
        """Runs where A's degree-matched median strictly beats B's."""
        return sum(
            1 for r in self.runs
            if r.median_a is not None and r.median_b is not None and r.median_a > r.median_b
        )


def matched_median(result: SimResult) -> float | None:
    """Median betweenness of added nodes whose final degree equals ``m``."""
    vals = [a.centrality for a in result.added if a.degree == result.config.links_per_node]
    return statistics.median(vals) if vals else None


def compare_mechanisms(cfg_a: GrowthConfig, cfg_b: GrowthConfig, runs: int) -> ComparisonSummary:
    """Run both configs ``runs`` times on matched seeds and compare medians.

    Run ``i`` uses ``rng_seed + i`` for both sides, so both mechanisms grow
    from the same seed graph.  ``ratio`` is A's median over B's.
    """
    if runs < 1:
        raise ConfigInvalidError("runs must be >= 1")
    if replace(cfg_a, mechanism=cfg_b.mechanism) != cfg_b:
        raise ConfigInvalidError("configs may differ only in mechanism")
    summary = ComparisonSummary(cfg_a.mechanism, cfg_b.mechanism, [])
    for i in range(runs):
        seed = (cfg_a.rng_seed + i) % 2**64
        ra = simulate(replace(cfg_a, rng_seed=seed))
        rb = simulate(replace(cfg_b, rng_seed=seed))
        summary.results_a.append(ra)
        summary.results_b.append(rb)
        summary.runs.append(RunComparison(i, matched_median(ra), matched_median(rb)))
    return summary

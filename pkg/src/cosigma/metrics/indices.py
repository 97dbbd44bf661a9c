"""Normalized node properties, sigma indices, correlations and rankings."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from cosigma.bib_ingest import CitedRefKey
from cosigma.metrics.burst import BurstInterval, BurstParams, detect_bursts
from cosigma.metrics.centrality import betweenness

PROPERTIES = ("citation", "centrality", "burst")
SELECTORS = ("citation", "centrality", "burst", "sigma2", "sigma3")


@dataclass(frozen=True)
class SigmaConfig:
    """Which normalized properties a sigma index combines, in order."""

    properties: tuple[str, ...]

    def __post_init__(self) -> None:
        props = tuple(self.properties)
        if not props:
            raise ValueError("SigmaConfig needs at least one property")
        if len(set(props)) != len(props):
            raise ValueError(f"duplicate properties in {props}")
        bad = [p for p in props if p not in PROPERTIES]
        if bad:
            raise ValueError(f"unknown properties {bad}")
        object.__setattr__(self, "properties", props)

    @property
    def n(self) -> int:
        return len(self.properties)


SIGMA2 = SigmaConfig(("burst", "centrality"))
SIGMA3 = SigmaConfig(("burst", "centrality", "citation"))


@dataclass
class NodeMetrics:
    key: CitedRefKey
    citation_raw: int
    centrality_raw: float
    burst_raw: float
    rho_citation: float = 0.0
    rho_centrality: float = 0.0
    rho_burst: float = 0.0
    sigma2: float = 0.0
    sigma3: float = 0.0
    burst_ratio: float = 0.0
    bursts: list[BurstInterval] = field(default_factory=list)

    def rho(self, prop: str) -> float:
        return getattr(self, "rho_" + prop)

    def value(self, selector: str) -> float:
        selector = selector.removeprefix("rho_")
        if selector in PROPERTIES:
            return self.rho(selector)
        if selector in ("sigma2", "sigma3"):
            return getattr(self, selector)
        raise ValueError(f"unknown selector {selector!r}")


def normalize(raw: Mapping, mode: str = "max") -> dict:
    """Scale nonnegative raw scores into [0, 1].

    ``max``: divide by the largest value, so the top node gets exactly 1.
    ``minmax``: ``(x - min) / (max - min)``.  A constant (or all-zero) input
    maps to all zeros in either mode.
    """
    if not raw:
        return {}
    hi = max(raw.values())
    if mode == "max":
        if hi <= 0:
            return dict.fromkeys(raw, 0.0)
        return {k: (1.0 if v == hi else v / hi) for k, v in raw.items()}
    if mode == "minmax":
        lo = min(raw.values())
        if hi == lo:
            return dict.fromkeys(raw, 0.0)
        return {k: (1.0 if v == hi else (v - lo) / (hi - lo)) for k, v in raw.items()}
    raise ValueError(f"unknown normalization mode {mode!r}")


def geometric_mean(values: Sequence[float]) -> float:
    if not values:
        raise ValueError("geometric mean of nothing")
    prod = 1.0
    for v in values:
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"normalized property {v} outside [0, 1]")
        prod *= v
    return prod ** (1.0 / len(values))


def sigma(node: NodeMetrics | Mapping[str, float], cfg: SigmaConfig = SIGMA2) -> float:
    """Geometric mean of the selected normalized properties of one node.

    ``node`` may be a :class:`NodeMetrics` or a plain mapping such as
    ``{"burst": 0.851, "centrality": 0.537}``.
    """
    if isinstance(node, NodeMetrics):
        values = [node.rho(p) for p in cfg.properties]
    else:
        values = [node[p] for p in cfg.properties]
    return geometric_mean(values)


def compute_metrics(
    network,
    burst_params: BurstParams = BurstParams(),
    normalization: str = "max",
    burst_mode: str = "total",
) -> list[NodeMetrics]:
    """Score every node of a merged co-citation network.

    ``burst_mode`` is ``total`` (sum of all burst interval weights) or
    ``strongest`` (weight of the single strongest interval).
    """
    if burst_mode not in ("total", "strongest"):
        raise ValueError(f"unknown burst mode {burst_mode!r}")
    keys = sorted(network.nodes)
    centrality = betweenness(network)
    totals = network.year_totals()
    years = list(range(min(totals), max(totals) + 1)) if totals else []
    out = {}
    for k in keys:
        node = network.nodes[k]
        res = detect_bursts(node.citation_ring, totals, burst_params, years)
        out[k] = NodeMetrics(
            key=k,
            citation_raw=node.total,
            centrality_raw=centrality[k],
            burst_raw=res.weight if burst_mode == "total" else res.strongest,
            burst_ratio=res.rate_ratio,
            bursts=res.intervals,
        )
    for prop in PROPERTIES:
        rho = normalize({k: getattr(m, prop + "_raw") for k, m in out.items()}, normalization)
        for k, v in rho.items():
            setattr(out[k], "rho_" + prop, v)
    for m in out.values():
        m.sigma2 = sigma(m, SIGMA2)
        m.sigma3 = sigma(m, SIGMA3)
    return [out[k] for k in keys]


def pearson(x: Sequence[float], y: Sequence[float]) -> float | None:
    """Sample Pearson r, or ``None`` when either column has zero variance.

    Single pass with running co-moments (Welford updates).
    """
    if len(x) != len(y):
        raise ValueError("columns differ in length")
    if len(x) < 2:
        raise ValueError("need at least two observations")
    mx = my = 0.0
    sxx = syy = sxy = 0.0
    for i, (a, b) in enumerate(zip(x, y), start=1):
        dx = a - mx
        mx += dx / i
        dy = b - my
        my += dy / i
        sxx += dx * (a - mx)
        syy += dy * (b - my)
        sxy += dx * (b - my)
    if sxx <= 0.0 or syy <= 0.0:
        return None
    r = sxy / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def column(metrics: Iterable[NodeMetrics], selector: str) -> list[float]:
    return [m.value(selector) for m in metrics]


def pearson_matrix(metrics: Sequence[NodeMetrics], columns: Sequence[str]) -> list[list[float | None]]:
    """Symmetric matrix of pairwise Pearson r; ``None`` marks undefined entries."""
    cols = [column(metrics, c) for c in columns]
    k = len(cols)
    mat: list[list[float | None]] = [[None] * k for _ in range(k)]
    for i in range(k):
        for j in range(i, k):
            r = pearson(cols[i], cols[j])
            if i == j and r is not None:
                r = 1.0
            mat[i][j] = mat[j][i] = r
    return mat


def rank_candidates(metrics: Iterable[NodeMetrics], by: str = "sigma2", k: int | None = None) -> list[NodeMetrics]:
    """Top ``k`` nodes by ``by`` descending.

    Ties go to more citations, then the earlier publication year, then the
    smaller key, so the order is total and reproducible.
    """
    if k is not None and k < 1:
        raise ValueError("k must be positive")

    def order(m: NodeMetrics) -> tuple:
        year = m.key.year if m.key.year is not None else 10**9
        return (-m.value(by), -m.citation_raw, year, m.key.sort_key())

    ranked = sorted(metrics, key=order)
    return ranked if k is None else ranked[:k]

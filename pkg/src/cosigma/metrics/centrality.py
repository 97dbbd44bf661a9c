"""Betweenness centrality on undirected, unweighted graphs (Brandes accumulation)."""

from __future__ import annotations

from collections import deque
from typing import Hashable, Iterable, Mapping, TypeVar

N = TypeVar("N", bound=Hashable)


def _as_adjacency(graph) -> Mapping:
    if hasattr(graph, "adjacency"):
        return graph.adjacency()
    return graph


def _dependencies(adj: Mapping[N, Iterable[N]], source: N) -> dict[N, float]:
    dist = {source: 0}
    sigma = {source: 1}
    preds: dict[N, list[N]] = {source: []}
    order = []
    queue = deque([source])
    while queue:
        v = queue.popleft()
        order.append(v)
        for w in adj[v]:
            if w not in dist:
                dist[w] = dist[v] + 1
                sigma[w] = 0
                preds[w] = []
                queue.append(w)
            if dist[w] == dist[v] + 1:
                sigma[w] += sigma[v]
                preds[w].append(v)
    delta = dict.fromkeys(order, 0.0)
    for w in reversed(order):
        coeff = (1.0 + delta[w]) / sigma[w]
        for v in preds[w]:
            delta[v] += sigma[v] * coeff
    delta[source] = 0.0
    return delta


def betweenness(graph) -> dict:
    """Pair-fraction betweenness of every node.

    ``graph`` is a :class:`~cosigma.cocite_graph.CoCitationNetwork` or any
    mapping ``node -> neighbours`` (undirected: each edge listed both ways).
    The value for ``v`` is the sum over unordered pairs ``s, t`` (both
    different from ``v``) of the share of shortest ``s``-``t`` paths passing
    through ``v``, divided by ``(n-1)(n-2)/2``.  Pairs in different
    components contribute nothing.
    """
    adj = _as_adjacency(graph)
    n = len(adj)
    result = dict.fromkeys(adj, 0.0)
    if n <= 2:
        return result
    for s in adj:
        for v, d in _dependencies(adj, s).items():
            result[v] += d
    # each unordered pair was counted from both endpoints
    scale = 1.0 / ((n - 1) * (n - 2))
    return {v: c * scale for v, c in result.items()}

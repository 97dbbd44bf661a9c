"""Two-state burst detection over yearly citation counts.

A reference's yearly counts ``r[y]`` are read against the yearly totals of
the whole network ``d[y]``.  The base state emits at the average rate
``p0 = sum(r) / sum(d)``; the burst state at ``p1 = min(s * p0, 1)``.  A
year costs the negative log binomial likelihood of its counts under the
current state; moving up into the burst state costs ``gamma * ln(Y)``
(``Y`` = number of years), moving down is free, and the sequence starts in
the base state.  The cheapest state sequence is found by dynamic
programming.

Ties: when two state sequences cost the same (within ``TIE_EPS``) the one
that stays in the base state earlier wins, i.e. the lexicographically
smallest sequence with base = 0.  The DP runs backwards (cost-to-go) so the
forward reconstruction can apply that rule year by year.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

TIE_EPS = 1e-9


@dataclass(frozen=True)
class BurstParams:
    s: float = 2.0
    gamma: float = 1.0

    def __post_init__(self) -> None:
        if not self.s > 1:
            raise ValueError("burst rate ratio s must be > 1")
        if self.gamma < 0:
            raise ValueError("gamma must be >= 0")


@dataclass(frozen=True)
class BurstInterval:
    start_year: int
    end_year: int
    weight: float


@dataclass
class BurstResult:
    years: list[int]
    states: list[int]
    intervals: list[BurstInterval] = field(default_factory=list)
    weight: float = 0.0
    base_rate: float = 0.0
    # highest observed rate over a burst interval divided by the base rate
    rate_ratio: float = 0.0

    @property
    def strongest(self) -> float:
        return max((iv.weight for iv in self.intervals), default=0.0)


def binomial_cost(r: int, d: int, p: float) -> float:
    """``-ln P(r successes in d trials at rate p)``; ``inf`` when impossible."""
    if d == 0:
        return 0.0
    log_c = math.lgamma(d + 1) - math.lgamma(r + 1) - math.lgamma(d - r + 1)
    if p <= 0.0:
        return -log_c if r == 0 else math.inf
    if p >= 1.0:
        return -log_c if r == d else math.inf
    return -(log_c + r * math.log(p) + (d - r) * math.log1p(-p))


def state_costs(counts: Sequence[int], totals: Sequence[int], params: BurstParams) -> tuple[list[list[float]], float]:
    """Per-year emission costs ``[[base, burst], ...]`` and the base rate."""
    p0 = sum(counts) / sum(totals)
    p1 = min(params.s * p0, 1.0)
    return [[binomial_cost(r, d, p0), binomial_cost(r, d, p1)] for r, d in zip(counts, totals)], p0


def transition_cost(prev: int, nxt: int, n_years: int, gamma: float) -> float:
    return gamma * math.log(n_years) if nxt > prev else 0.0


def optimal_states(costs: Sequence[Sequence[float]], gamma: float) -> list[int]:
    n = len(costs)
    up = gamma * math.log(n) if n else 0.0
    # togo[t][prev]: cheapest cost of years t.. given the state before t
    togo = [[0.0, 0.0] for _ in range(n + 1)]
    for t in range(n - 1, -1, -1):
        stay0 = costs[t][0] + togo[t + 1][0]
        stay1 = costs[t][1] + togo[t + 1][1]
        togo[t][0] = min(stay0, up + stay1)
        togo[t][1] = min(stay0, stay1)
    states = []
    prev = 0
    for t in range(n):
        c0 = costs[t][0] + togo[t + 1][0]
        c1 = costs[t][1] + togo[t + 1][1] + (up if prev == 0 else 0.0)
        q = 0 if c0 <= c1 + TIE_EPS * max(1.0, abs(c1)) else 1
        states.append(q)
        prev = q
    return states


def detect_bursts(ring: Mapping[int, int], totals: Mapping[int, int],
                  params: BurstParams = BurstParams(), years: Sequence[int] | None = None) -> BurstResult:
    """Find burst intervals of one node's citation ring.

    ``years`` defaults to every year from the first to the last year of
    ``totals``; missing years count as zero.  Returns the optimal state
    sequence, the burst intervals and the summed interval weight
    (``result.weight``).  A stream with no citations at all, or with zero
    totals, yields no intervals.
    """
    if years is None:
        years = list(range(min(totals), max(totals) + 1)) if totals else []
    years = list(years)
    counts = [int(ring.get(y, 0)) for y in years]
    tots = [int(totals.get(y, 0)) for y in years]
    for y, r, d in zip(years, counts, tots):
        if r < 0 or d < r:
            raise ValueError(f"year {y}: need 0 <= ring <= totals, got {r}/{d}")
    if sum(tots) == 0 or sum(counts) == 0:
        return BurstResult(years, [0] * len(years))
    costs, p0 = state_costs(counts, tots, params)
    states = optimal_states(costs, params.gamma)
    result = BurstResult(years, states, base_rate=p0)
    t = 0
    while t < len(states):
        if states[t] == 0:
            t += 1
            continue
        start = t
        while t < len(states) and states[t] == 1:
            t += 1
        w = sum(costs[i][0] - costs[i][1] for i in range(start, t))
        result.intervals.append(BurstInterval(years[start], years[t - 1], w))
        hits, trials = sum(counts[start:t]), sum(tots[start:t])
        if trials:
            result.rate_ratio = max(result.rate_ratio, (hits / trials) / p0)
    result.weight = sum(iv.weight for iv in result.intervals)
    return result

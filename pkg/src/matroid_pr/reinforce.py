"""Minimum-cost capacity increase so that k bases pack.

``reinforce`` reads the increase off one exact push-relabel run whose bases
all start at the cheapest base.  The result is always feasible and usually
optimal, but not always: on U(6,4) with u = (1,0,1,1,1,2),
costs = (4,3,1,2,4,5), k = 2 it pays 4 where 3 suffices.
``reinforce_greedy`` is exact at the price of many covering decisions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .matroid import Graph, GraphicMatroid, greedy_base
from .pack_cover import exact_covering
from .push_relabel import _rank_of, engine_for, exact_height, exact_union


def min_cost_base(matroid, costs: Sequence[float]) -> list[int]:
    """Greedy base scanning elements by (cost, id)."""
    oracle = GraphicMatroid(matroid) if isinstance(matroid, Graph) else matroid
    order = sorted(range(oracle.n), key=lambda e: (costs[e], e))
    return greedy_base(oracle, order)


@dataclass
class Reinforcement:
    z: list[int]
    cost: float
    base0: list[int]
    bases: list[list[int]]
    queries: int = 0


def reinforce(matroid, u: Sequence[int], costs: Sequence[float], k: int) -> Reinforcement:
    if k < 1:
        raise ValueError("k must be at least 1")
    b0 = min_cost_base(matroid, costs)
    st = engine_for(matroid, u, k, exact_height(_rank_of(matroid)), initial_base=b0)
    st.run()
    z = [max(x - c, 0) for x, c in zip(st.x, st.u)]
    in_b0 = set(b0)
    for e, ze in enumerate(z):
        if ze > 0 and e not in in_b0:
            raise AssertionError(f"element {e} outside the cheapest base was overpacked")
    cost = sum(c * ze for c, ze in zip(costs, z))
    return Reinforcement(z, cost, sorted(b0), st.bases(), st.oracle.total)


def reinforce_greedy(matroid, u: Sequence[int], costs: Sequence[float], k: int) -> Reinforcement:
    """Greedy augmentation: take a maximum ``y <= u`` from k-fold union, then
    raise ``y`` element by element in (cost, id) order as far as k
    independent sets can still cover it.  Each raise is a binary search over
    exact covering decisions."""
    if k < 1:
        raise ValueError("k must be at least 1")
    res = exact_union(matroid, u, k)
    x = [0] * len(u)
    for b in res.bases:
        for e in b:
            x[e] += 1
    w = [min(a, c) for a, c in zip(x, u)]
    queries = res.queries
    for e in sorted(range(len(u)), key=lambda e: (costs[e], e)):
        lo, hi = 0, k - w[e]
        while lo < hi:
            mid = (lo + hi + 1) // 2
            w[e] += mid
            dec = exact_covering(matroid, w, k)
            w[e] -= mid
            if dec.state is not None:
                queries += dec.state.oracle.total
            if dec.covered:
                lo = mid
            else:
                hi = mid - 1
        w[e] += lo
    z = [max(a - c, 0) for a, c in zip(w, u)]
    cost = sum(c * ze for c, ze in zip(costs, z))
    bases = exact_covering(matroid, w, k).bases or []
    return Reinforcement(z, cost, sorted(min_cost_base(matroid, costs)), [sorted(b) for b in bases], queries)

"""Brute-force reference oracles.

Everything here enumerates subsets (or vertex partitions) directly and is
meant for cross-checking the fast solvers on small instances.  Ratios are
exact :class:`fractions.Fraction` values.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .matroid import Graph, GraphicMatroid, IndependenceOracle


class BudgetExceeded(ValueError):
    pass


@dataclass(frozen=True)
class EnumBudget:
    max_elements: int = 20
    max_subsets: int = 1 << 20

    def check(self, n: int) -> None:
        if n > min(self.max_elements, 20) or (1 << n) > self.max_subsets:
            raise BudgetExceeded(f"{n} elements exceed the enumeration budget")


DEFAULT_BUDGET = EnumBudget()


def _as_oracle(m) -> IndependenceOracle:
    return GraphicMatroid(m) if isinstance(m, Graph) else m


def rank_table(oracle, budget: EnumBudget = DEFAULT_BUDGET) -> np.ndarray:
    """``table[mask] = rank(mask)`` for every subset, via one query per subset.

    Each subset keeps a maximal independent subset of itself; extending the
    one for ``mask - top`` by ``top`` needs a single query.
    """
    oracle = _as_oracle(oracle)
    n = oracle.n
    budget.check(n)
    size = 1 << n
    table = np.zeros(size, dtype=np.int64)
    basis: list[tuple[int, ...]] = [()] * size
    for mask in range(1, size):
        top = mask.bit_length() - 1
        rest = mask ^ (1 << top)
        b = basis[rest]
        cand = b + (top,)
        if oracle.query(list(cand)):
            basis[mask] = cand
            table[mask] = table[rest] + 1
        else:
            basis[mask] = b
            table[mask] = table[rest]
    return table


def _masked_sums(u: Sequence, n: int) -> np.ndarray:
    """``sums[mask] = u(mask)`` as exact Python ints or floats (object array)."""
    sums = np.zeros(1 << n, dtype=object)
    sums[0] = 0
    for mask in range(1, 1 << n):
        low = (mask & -mask).bit_length() - 1
        sums[mask] = sums[mask & (mask - 1)] + u[low]
    return sums


def dual_enum_union(oracle, u: Sequence, k: int, budget: EnumBudget = DEFAULT_BUDGET):
    """``min_S k*rank(S) + u(E - S)``."""
    oracle = _as_oracle(oracle)
    n = oracle.n
    ranks = rank_table(oracle, budget)
    sums = _masked_sums(u, n)
    full = (1 << n) - 1
    total = sums[full]
    best = None
    for mask in range(1 << n):
        val = k * int(ranks[mask]) + (total - sums[mask])
        if best is None or val < best:
            best = val
    return best


def strength_enum(oracle, u: Sequence, budget: EnumBudget = DEFAULT_BUDGET) -> Fraction:
    """``min over rank(S) < r`` of ``u(E - S) / (r - rank(S))``."""
    oracle = _as_oracle(oracle)
    n = oracle.n
    ranks = rank_table(oracle, budget)
    sums = _masked_sums([Fraction(c) for c in u], n)
    full = (1 << n) - 1
    r = int(ranks[full])
    if r == 0:
        raise ValueError("strength is undefined for a rank-0 matroid")
    best = None
    for mask in range(1 << n):
        rk = int(ranks[mask])
        if rk < r:
            val = (sums[full] - sums[mask]) / (r - rk)
            if best is None or val < best:
                best = val
    return best


def covering_enum(oracle, u: Sequence, budget: EnumBudget = DEFAULT_BUDGET) -> Fraction:
    """Fractional covering number ``max over rank(S) >= 1`` of ``u(S)/rank(S)``.

    Loops (rank-0 elements with positive capacity) make covering impossible;
    that case returns ``None``.
    """
    oracle = _as_oracle(oracle)
    n = oracle.n
    ranks = rank_table(oracle, budget)
    sums = _masked_sums([Fraction(c) for c in u], n)
    best = Fraction(0)
    for mask in range(1, 1 << n):
        rk = int(ranks[mask])
        if rk == 0:
            if sums[mask] > 0:
                return None
            continue
        val = sums[mask] / rk
        if val > best:
            best = val
    return best


def pack_feasible_enum(oracle, u: Sequence, k, budget: EnumBudget = DEFAULT_BUDGET) -> bool:
    """k bases pack under ``u`` iff ``u(E-S) >= k(r - rank S)`` for all S."""
    oracle = _as_oracle(oracle)
    n = oracle.n
    ranks = rank_table(oracle, budget)
    sums = _masked_sums(list(u), n)
    full = (1 << n) - 1
    r = int(ranks[full])
    return all(sums[full] - sums[m] >= k * (r - int(ranks[m])) for m in range(1 << n))


def cover_feasible_enum(oracle, u: Sequence, k, budget: EnumBudget = DEFAULT_BUDGET) -> bool:
    """k bases cover ``u`` iff ``u(S) <= k*rank(S)`` for all S."""
    oracle = _as_oracle(oracle)
    n = oracle.n
    ranks = rank_table(oracle, budget)
    sums = _masked_sums(list(u), n)
    return all(sums[m] <= k * int(ranks[m]) for m in range(1 << n))


def reinforce_enum(oracle, u: Sequence[int], costs: Sequence, k: int, zmax: int,
                   budget: EnumBudget = DEFAULT_BUDGET):
    """Cheapest ``z`` in ``{0..zmax}^n`` with ``u + z`` packing k bases.

    Returns ``(cost, z)`` or ``(None, None)`` if no vector in range works.
    """
    oracle = _as_oracle(oracle)
    n = oracle.n
    ranks = rank_table(oracle, budget).astype(np.int64)
    r = int(ranks[-1])
    masks = np.arange(1 << n, dtype=np.int64)
    # member[mask, e] = 1 iff e in mask; complement indicator is 1 - member
    member = ((masks[:, None] >> np.arange(n)[None, :]) & 1).astype(np.int64)
    comp = 1 - member
    need = k * (r - ranks)
    base_comp = comp @ np.asarray(u, dtype=np.int64)
    deficit = need - base_comp  # z must add at least this on E - S
    best_cost, best_z = None, None
    for z in itertools.product(range(zmax + 1), repeat=n):
        cost = sum(c * zi for c, zi in zip(costs, z))
        if best_cost is not None and cost >= best_cost:
            continue
        if np.all(comp @ np.asarray(z, dtype=np.int64) >= deficit):
            best_cost, best_z = cost, list(z)
    return best_cost, best_z


def _set_partitions(items: list[int]):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def partition_strength_enum(graph: Graph, u: Sequence | None = None, max_vertices: int = 8) -> Fraction:
    """Graph strength by vertex partitions: ``min u(cross edges) / (#parts - 1)``.

    The denominator is the rank lost by dropping the crossing edges, i.e. how
    many components of the graph split further, so disconnected graphs follow
    the matroid definition.
    """
    if graph.n_vertices > max_vertices:
        raise BudgetExceeded("too many vertices for partition enumeration")
    caps = [Fraction(c) for c in (graph.cap if u is None else u)]
    comps = graph.components()
    best = None
    for part in _set_partitions(list(range(graph.n_vertices))):
        where = {}
        for idx, block in enumerate(part):
            for v in block:
                where[v] = idx
        # rank of inside edges = n_v - (#components of the union of inside edges)
        inside = [i for i, (a, b) in enumerate(graph.edges) if where[a] == where[b]]
        drop = graph.components(inside) - comps
        if drop <= 0:
            continue
        cut = sum(caps[i] for i, (a, b) in enumerate(graph.edges) if where[a] != where[b])
        val = cut / drop
        if best is None or val < best:
            best = val
    return best


def explicit_aux_bfs(packing, oracle=None, u: Sequence | None = None):
    """Plain BFS over the fully materialized auxiliary graph.

    Vertices are ``(e, i)`` pairs.  Arcs, each decided by direct oracle tests:

    * ``s -> (e, i)``: e uncovered and e not in I_i
    * ``(e, i) -> (d, i)``: d in I_i, e not in I_i, I_i - d + e independent
    * ``(d, i) -> (d, j)``: d in I_i, d not in I_j, d covered
    * ``(e, i) -> t``: e not in I_i and I_i + e independent

    Returns the vertex path (without s and t) or ``None``.
    """
    oracle = packing.oracle if oracle is None else _as_oracle(oracle)
    u = packing.u if u is None else list(u)
    sets = [list(s) for s in packing.sets]
    members = [set(s) for s in sets]
    k, n = len(sets), oracle.n
    x = [sum(e in m for m in members) for e in range(n)]
    parent: dict = {}
    q: deque = deque()
    for e in range(n):
        if x[e] < u[e]:
            for i in range(k):
                if e not in members[i]:
                    v = (e, i)
                    parent[v] = None
                    q.append(v)
    while q:
        v = q.popleft()
        e, i = v
        if e not in members[i]:
            if oracle.query(sets[i] + [e]):
                path = [v]
                while parent[path[-1]] is not None:
                    path.append(parent[path[-1]])
                return path[::-1]
            for d in sets[i]:
                w = (d, i)
                if w not in parent:
                    if oracle.query([y for y in sets[i] if y != d] + [e]):
                        parent[w] = v
                        q.append(w)
        else:
            if x[e] >= u[e]:
                for j in range(k):
                    w = (e, j)
                    if e not in members[j] and w not in parent:
                        parent[w] = v
                        q.append(w)
    return None

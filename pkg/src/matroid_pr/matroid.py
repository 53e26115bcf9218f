"""Independence oracles, concrete matroids and the rank/span helpers every
solver is written against.

Elements are dense integer ids ``0..n-1``.  Oracles receive element lists and
answer a single yes/no question: is this set independent?  All algorithms in
the package count cost in these queries, so helpers here are careful to issue
exactly the number of queries they advertise.
"""

from __future__ import annotations

import itertools
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence


class NotSpannedError(ValueError):
    """Raised by :func:`circuit_element` when the candidate list does not span."""


class IndependenceOracle:
    """Abstract independence oracle over the ground set ``range(n)``."""

    n: int = 0

    def query(self, elements: Sequence[int]) -> bool:
        raise NotImplementedError

    @property
    def ground_set(self) -> range:
        return range(self.n)


class QueryCounter(IndependenceOracle):
    """Transparent wrapper that counts queries, optionally split by phase.

    >>> oracle = QueryCounter(UniformMatroid(4, 2))
    >>> with oracle.phase("probe"):
    ...     oracle.query([0, 1])
    True
    >>> oracle.total, oracle.by_phase
    (1, {'probe': 1})
    """

    def __init__(self, inner: IndependenceOracle):
        self.inner = inner
        self.n = inner.n
        self.total = 0
        self.by_phase: dict[str, int] = {}
        self._phase: str | None = None

    def query(self, elements: Sequence[int]) -> bool:
        self.total += 1
        if self._phase is not None:
            self.by_phase[self._phase] = self.by_phase.get(self._phase, 0) + 1
        return self.inner.query(elements)

    @contextmanager
    def phase(self, name: str) -> Iterator[None]:
        previous, self._phase = self._phase, name
        try:
            yield
        finally:
            self._phase = previous

    def __getattr__(self, name):
        # expose wrapped-matroid attributes (graph, rank_value, ...)
        return getattr(self.inner, name)


def unwrap(oracle: IndependenceOracle) -> IndependenceOracle:
    while isinstance(oracle, QueryCounter):
        oracle = oracle.inner
    return oracle


class UniformMatroid(IndependenceOracle):
    def __init__(self, n: int, r: int):
        if not 0 <= r <= n:
            raise ValueError(f"uniform matroid needs 0 <= r <= n, got n={n} r={r}")
        self.n = n
        self.r = r

    def query(self, elements: Sequence[int]) -> bool:
        return len(set(elements)) == len(elements) and len(elements) <= self.r

    def __repr__(self) -> str:
        return f"UniformMatroid({self.n}, {self.r})"


class PartitionMatroid(IndependenceOracle):
    """Each element belongs to one block; a set is independent when no block
    contributes more than its cap."""

    def __init__(self, blocks: Sequence[int], caps: Sequence[int]):
        self.blocks = list(blocks)
        self.caps = list(caps)
        self.n = len(self.blocks)
        for b in self.blocks:
            if not 0 <= b < len(self.caps):
                raise ValueError(f"block id {b} out of range")

    def query(self, elements: Sequence[int]) -> bool:
        if len(set(elements)) != len(elements):
            return False
        used = [0] * len(self.caps)
        for e in elements:
            b = self.blocks[e]
            used[b] += 1
            if used[b] > self.caps[b]:
                return False
        return True

    def __repr__(self) -> str:
        return f"PartitionMatroid(blocks={self.blocks}, caps={self.caps})"


@dataclass
class Graph:
    """Undirected multigraph; edge ``i`` joins ``edges[i]`` and carries
    ``cap[i]`` (int or float) and an optional ``cost[i]``."""

    n_vertices: int
    edges: list[tuple[int, int]]
    cap: list = field(default_factory=list)
    cost: list | None = None

    def __post_init__(self):
        self.edges = [tuple(e) for e in self.edges]
        if not self.cap:
            self.cap = [1] * len(self.edges)
        if len(self.cap) != len(self.edges):
            raise ValueError("one capacity per edge required")
        for a, b in self.edges:
            if not (0 <= a < self.n_vertices and 0 <= b < self.n_vertices):
                raise ValueError(f"edge ({a}, {b}) has an endpoint out of range")
        for c in self.cap:
            if c < 0:
                raise ValueError("capacities must be nonnegative")

    @property
    def m(self) -> int:
        return len(self.edges)

    @classmethod
    def complete(cls, nv: int, cap=1) -> "Graph":
        edges = list(itertools.combinations(range(nv), 2))
        return cls(nv, edges, [cap] * len(edges))

    def components(self, edge_ids: Iterable[int] | None = None) -> int:
        uf = _DSU(self.n_vertices)
        ids = range(self.m) if edge_ids is None else edge_ids
        comps = self.n_vertices
        for i in ids:
            a, b = self.edges[i]
            if uf.union(a, b):
                comps -= 1
        return comps

    def rank(self, edge_ids: Iterable[int] | None = None) -> int:
        return self.n_vertices - self.components(edge_ids)


class _DSU:
    __slots__ = ("parent",)

    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        parent = self.parent
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True


class GraphicMatroid(IndependenceOracle):
    """Forests of a multigraph.  Each query runs a fresh union-find pass,
    which keeps generic solvers oracle-pure; the fast path lives in
    :mod:`matroid_pr.graphic`."""

    def __init__(self, graph: Graph):
        self.graph = graph
        self.n = graph.m

    def query(self, elements: Sequence[int]) -> bool:
        if len(set(elements)) != len(elements):
            return False
        uf = _DSU(self.graph.n_vertices)
        edges = self.graph.edges
        for e in elements:
            a, b = edges[e]
            if not uf.union(a, b):
                return False
        return True

    def __repr__(self) -> str:
        return f"GraphicMatroid(n_vertices={self.graph.n_vertices}, m={self.graph.m})"


class ExplicitMatroid(IndependenceOracle):
    """Matroid given by the full list of its bases (n <= 16)."""

    MAX_N = 16

    def __init__(self, n: int, bases: Iterable[Iterable[int]]):
        if n > self.MAX_N:
            raise ValueError(f"explicit matroids are limited to n <= {self.MAX_N}")
        self.n = n
        masks = {sum(1 << e for e in set(b)) for b in bases}
        if not masks:
            raise ValueError("explicit matroid needs at least one base")
        sizes = {bin(m).count("1") for m in masks}
        if len(sizes) != 1:
            raise ValueError("all bases must have the same size")
        self.r = sizes.pop()
        self.base_masks = sorted(masks)
        independent = set()
        stack = list(masks)
        while stack:
            m = stack.pop()
            if m in independent:
                continue
            independent.add(m)
            sub = m
            while sub:
                low = sub & -sub
                stack.append(m & ~low)
                sub &= sub - 1
        self._independent = frozenset(independent)

    def query(self, elements: Sequence[int]) -> bool:
        mask = 0
        for e in elements:
            bit = 1 << e
            if mask & bit:
                return False
            mask |= bit
        return mask in self._independent

    @property
    def bases(self) -> list[list[int]]:
        return [[e for e in range(self.n) if m >> e & 1] for m in self.base_masks]

    def __repr__(self) -> str:
        return f"ExplicitMatroid(n={self.n}, r={self.r}, bases={len(self.base_masks)})"


def rank(oracle: IndependenceOracle, S: Iterable[int]) -> int:
    """Size of a largest independent subset of ``S`` (greedy, |S| queries)."""
    return len(max_independent_subset(oracle, S))


def max_independent_subset(oracle: IndependenceOracle, S: Iterable[int]) -> list[int]:
    chosen: list[int] = []
    for e in S:
        chosen.append(e)
        if not oracle.query(chosen):
            chosen.pop()
    return chosen


def spans(oracle: IndependenceOracle, I: Sequence[int], e: int, *, check: bool = False) -> bool:
    """True iff ``e`` lies in the span of the independent list ``I``.

    Costs one query when ``e`` is not already in ``I``.  With ``check`` the
    independence of ``I`` is verified first (an extra, uncounted-by-contract
    query meant for tests).
    """
    if check and not oracle.query(list(I)):
        raise ValueError("spans() requires an independent set")
    if e in I:
        return True
    return not oracle.query([*I, e])


def greedy_base(oracle: IndependenceOracle, order: Iterable[int] | None = None) -> list[int]:
    """Greedy base in the given scan order (identity order by default)."""
    if order is None:
        order = range(oracle.n)
    return max_independent_subset(oracle, order)


def circuit_element(
    oracle: IndependenceOracle, P: Sequence[int], fixed: Sequence[int], e: int
) -> int:
    """Last element of the shortest prefix ``Q`` of ``P`` with ``fixed + Q``
    spanning ``e``.

    Doubling over prefix lengths, then bisection, so the cost is
    O(log |P|) queries.  If ``e`` itself occurs in ``P`` the prefix ending at
    ``e`` spans it without a query, and ``e`` may be returned.
    """
    fixed = list(fixed)
    pos_e = -1
    for idx, x in enumerate(P):
        if x == e:
            pos_e = idx
            break

    def prefix_spans(length: int) -> bool:
        if pos_e != -1 and length > pos_e:
            return True
        return not oracle.query(fixed + list(P[:length]) + [e])

    n = len(P)
    if n == 0:
        raise NotSpannedError(f"element {e} is not spanned by fixed + P")
    lo = 0  # largest length known not to span
    step = 1
    while True:
        hi = min(lo + step, n)
        if prefix_spans(hi):
            break
        if hi == n:
            raise NotSpannedError(f"element {e} is not spanned by fixed + P")
        lo = hi
        step *= 2
    # prefix of length lo does not span (lo == 0 relies on the precondition)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if prefix_spans(mid):
            hi = mid
        else:
            lo = mid
    return P[hi - 1]


def matroid_rank(oracle: IndependenceOracle) -> int:
    inner = unwrap(oracle)
    if isinstance(inner, GraphicMatroid):
        return inner.graph.rank()
    if hasattr(inner, "r"):
        return inner.r
    return rank(oracle, range(oracle.n))

"""Leveled-bases push-relabel engine for k-fold matroid union.

The state keeps ``k`` bases.  Every element of base ``i`` remembers the level
it had when it was inserted there; ``buckets[i][j]`` lists those elements in
insertion order, so ``B^(i)_{>=j}`` is the union of buckets ``j..H``.
Uncovered elements are processed FIFO by :meth:`PushRelabel.greedy_insert`
until each one is covered or sits at level ``H``.

Base indices are 0-based throughout the API.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .matroid import (
    Graph,
    IndependenceOracle,
    QueryCounter,
    circuit_element,
    greedy_base,
    matroid_rank,
    max_independent_subset,
)


class InvariantError(RuntimeError):
    """Raised when an instrumented run finds a broken invariant."""


@dataclass(frozen=True)
class RaisedToH:
    element: int


@dataclass(frozen=True)
class Exchanged:
    element: int
    base: int
    level: int  # new level of the inserted element
    removed: int


@dataclass
class DualCut:
    """``S = L_{>=threshold}``; ``value = k*rank(S) + u(E - S)``."""

    threshold: int
    S: list[int]
    rank_S: int
    complement_capacity: float
    k: int

    @property
    def value(self):
        return self.k * self.rank_S + self.complement_capacity


@dataclass
class RunStats:
    inserts: int = 0
    exchanges: int = 0
    relabels_to_h: int = 0
    probes: int = 0

    def as_dict(self) -> dict:
        return dict(
            inserts=self.inserts,
            exchanges=self.exchanges,
            relabels_to_h=self.relabels_to_h,
            probes=self.probes,
        )


@dataclass
class UnionResult:
    value: int
    bases: list[list[int]]
    dual: DualCut | None
    state: "PushRelabel | None" = None
    queries: int = 0
    stats: RunStats = field(default_factory=RunStats)


class PushRelabel:
    """Push-relabel state over an independence oracle.

    ``u`` holds nonnegative integer capacities; elements with ``u == 0`` are
    never queued.  ``H`` is the target height.
    """

    def __init__(
        self,
        oracle: IndependenceOracle,
        u: Sequence[int],
        k: int,
        H: int,
        initial_base: Sequence[int] | None = None,
    ):
        if k < 0:
            raise ValueError("k must be nonnegative")
        if H < 1:
            raise ValueError("height must be at least 1")
        if len(u) != oracle.n:
            raise ValueError("one capacity per element required")
        self.oracle = oracle if isinstance(oracle, QueryCounter) else QueryCounter(oracle)
        self.n = oracle.n
        self.u = list(u)
        self.k = k
        self.H = H
        self.stats = RunStats()
        self.level = [0] * self.n
        self.x = [0] * self.n
        with self.oracle.phase("init"):
            base = list(initial_base) if initial_base is not None else self._first_base()
        self.r = len(base)
        self.buckets: list[list[list[int]]] = []
        self.ins_level: list[dict[int, int]] = []
        for _ in range(k):
            b = [[] for _ in range(H + 1)]
            b[0] = list(base)
            self.buckets.append(b)
            self.ins_level.append({e: 0 for e in base})
        for e in base:
            self.x[e] = k
        self.queue: deque[int] = deque()
        self.queued = [False] * self.n
        for e in range(self.n):
            self._maybe_enqueue(e)

    # hooks overridden by the graphic engine
    def _first_base(self) -> list[int]:
        return greedy_base(self.oracle)

    def _spans(self, i: int, j: int, e: int) -> bool:
        at = self.ins_level[i].get(e)
        if at is not None and at >= j:
            return True
        return not self.oracle.query(self.prefix(i, j) + [e])

    def _pick_out(self, i: int, jp: int, e: int) -> int:
        return circuit_element(self.oracle, self.buckets[i][jp - 1], self.prefix(i, jp), e)

    def _after_exchange(self, i: int, jp: int, e: int, d: int, old_e_level: int | None) -> None:
        pass

    def _independent_in_order(self, order: Sequence[int]) -> list[int]:
        return max_independent_subset(self.oracle, order)

    # basic accessors
    def prefix(self, i: int, j: int) -> list[int]:
        """Elements of ``B^(i)_{>=j}`` (any order)."""
        out: list[int] = []
        b = self.buckets[i]
        for t in range(max(j, 0), self.H + 1):
            out.extend(b[t])
        return out

    def base(self, i: int) -> list[int]:
        return self.prefix(i, 0)

    def bases(self) -> list[list[int]]:
        return [sorted(self.base(i)) for i in range(self.k)]

    def covered(self, e: int) -> bool:
        return self.x[e] >= self.u[e]

    def _maybe_enqueue(self, e: int) -> None:
        if not self.queued[e] and self.x[e] < self.u[e] and self.level[e] < self.H:
            self.queued[e] = True
            self.queue.append(e)

    def span_test(self, i: int, j: int, e: int) -> bool:
        """True iff ``B^(i)_{>=j}`` spans ``e``."""
        self.stats.probes += 1
        return self._spans(i, j, e)

    # the insertion step
    def greedy_insert(self, e: int):
        if self.covered(e) or self.level[e] >= self.H:
            raise ValueError(f"element {e} is not an uncovered element below the height")
        H, last = self.H, self.k - 1
        self.stats.inserts += 1
        with self.oracle.phase("insert"):
            if self.span_test(last, H - 1, e):
                self.level[e] = H
                self.stats.relabels_to_h += 1
                return RaisedToH(e)
            # first level jp >= max(level, 1) whose last-base prefix misses e
            good, bad = max(self.level[e], 1) - 1, H - 1
            step = 1
            while good + 1 < bad:
                p = min(good + step, bad - 1)
                if self.span_test(last, p, e):
                    good = p
                    step *= 2
                else:
                    bad = p
                    break
            while bad - good > 1:
                mid = (good + bad) // 2
                if self.span_test(last, mid, e):
                    good = mid
                else:
                    bad = mid
            jp = bad
            # first base whose >=jp prefix misses e
            lo, hi = -1, last
            while hi - lo > 1:
                mid = (lo + hi) // 2
                if self.span_test(mid, jp, e):
                    lo = mid
                else:
                    hi = mid
            i = hi
            d = self._pick_out(i, jp, e)
        self._exchange(i, jp, e, d)
        return Exchanged(e, i, jp, d)

    def _exchange(self, i: int, jp: int, e: int, d: int) -> None:
        bucket = self.buckets[i]
        ins = self.ins_level[i]
        old_e_level = ins.get(e)
        bucket[jp - 1].remove(d)
        del ins[d]
        bucket[jp].append(e)
        ins[e] = jp
        self.level[e] = jp
        self.x[d] -= 1
        self.x[e] += 1
        self.stats.exchanges += 1
        self._after_exchange(i, jp, e, d, old_e_level)
        if d != e:
            self._maybe_enqueue(d)

    def run(self, after_insert: Callable[["PushRelabel", object], None] | None = None) -> "PushRelabel":
        if self.k == 0:
            self.queue.clear()
            return self
        q = self.queue
        while q:
            e = q.popleft()
            self.queued[e] = False
            if self.x[e] >= self.u[e] or self.level[e] >= self.H:
                continue
            outcome = self.greedy_insert(e)
            if after_insert is not None:
                after_insert(self, outcome)
            self._maybe_enqueue(e)
        return self

    # primal and dual readout
    def value(self) -> int:
        return sum(min(a, b) for a, b in zip(self.u, self.x))

    def level_set(self, t: int) -> list[int]:
        """``L_{>=t}``."""
        return [e for e in range(self.n) if self.level[e] >= t]

    def _cut(self, t: int, rank_S: int) -> DualCut:
        S = self.level_set(t)
        comp = sum(self.u[e] for e in range(self.n) if self.level[e] < t)
        return DualCut(t, S, rank_S, comp, self.k)

    def level_ranks(self) -> list[int]:
        """``ranks[t] = rank(L_{>=t})`` for ``t = 0..H+1`` in one greedy pass."""
        order = sorted(range(self.n), key=lambda e: -self.level[e])
        chosen = self._independent_in_order(order)
        counts = [0] * (self.H + 2)
        for e in chosen:
            counts[min(self.level[e], self.H)] += 1
        ranks = [0] * (self.H + 2)
        for t in range(self.H, -1, -1):
            ranks[t] = ranks[t + 1] + counts[t]
        return ranks

    def exact_dual(self) -> DualCut:
        with self.oracle.phase("dual"):
            ranks = self.level_ranks()
        for t in range(1, self.H + 1):
            if ranks[t] == ranks[t + 1]:
                cut = self._cut(t, ranks[t])
                if cut.value != self.value():
                    raise InvariantError(
                        f"dual {cut.value} differs from primal {self.value()} at threshold {t}"
                    )
                return cut
        raise InvariantError("no level with equal ranks; height too small or invariants broken")

    def apx_dual(self, eps: float) -> DualCut:
        rows = [0] * (self.H + 1)
        for b in self.buckets:
            for t in range(1, self.H + 1):
                rows[t] += len(b[t])
        total = sum(rows[1:])
        for j in range(1, self.H):
            if rows[j] <= eps * total:
                S = self.level_set(j + 1)
                with self.oracle.phase("dual"):
                    rk = len(self._independent_in_order(S))
                return self._cut(j + 1, rk)
        raise InvariantError("no sparse level row; height too small for this eps")

    # instrumentation
    def check_invariants(self) -> None:
        """Oracle-checked invariants 1 and 2 plus decreasing order.

        Queries issued here are tagged with the ``check`` phase.
        """
        o = self.oracle
        with o.phase("check"):
            x = [0] * self.n
            for i in range(self.k):
                B = self.base(i)
                if len(B) != self.r or not o.query(B):
                    raise InvariantError(f"base {i} is not a base")
                for e in B:
                    x[e] += 1
            if x != self.x:
                raise InvariantError("coverage counts out of sync")
            for e in range(self.n):
                if x[e] > self.u[e] and self.level[e] != 0:
                    raise InvariantError(f"overpacked element {e} at level {self.level[e]}")
            for j in range(self.H + 1):
                above = [e for e in range(self.n) if self.level[e] > j]
                for i in range(self.k):
                    P = self.prefix(i, j)
                    for e in above:
                        if e not in P and o.query(P + [e]):
                            raise InvariantError(f"B^({i})_>={j} misses level-{self.level[e]} element {e}")
                    if i + 1 < self.k:
                        for e in self.prefix(i + 1, j):
                            if e not in P and o.query(P + [e]):
                                raise InvariantError(f"bases {i},{i + 1} not decreasing at level {j}")


def exact_height(r: int) -> int:
    return r + 3


def apx_height(eps: float) -> int:
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    return math.ceil(1 / eps) + 3


def engine_for(matroid, u: Sequence[int], k: int, H: int, initial_base=None, compiled: bool = False) -> PushRelabel:
    """Graphs get the link-cut/union-find engine (or its compiled twin when
    ``compiled``); anything else the generic one."""
    if isinstance(matroid, Graph):
        if compiled:
            from .compiled import compiled_engine

            return compiled_engine(matroid, u, k, H, initial_base=initial_base)
        from .graphic import GraphicPushRelabel

        return GraphicPushRelabel(matroid, u, k, H, initial_base=initial_base)
    return PushRelabel(matroid, u, k, H, initial_base=initial_base)


def _rank_of(matroid) -> int:
    if isinstance(matroid, Graph):
        return matroid.rank()
    return matroid_rank(matroid)


def _empty_result(u) -> UnionResult:
    return UnionResult(0, [], DualCut(0, [], 0, 0, 0))


def exact_union(matroid, u: Sequence[int], k: int, *, height: int | None = None, after_insert=None,
    compiled: bool = False) -> UnionResult:
    """Maximum of ``sum min(u, x)`` over k bases, with a matching dual cut."""
    if k == 0:
        return _empty_result(u)
    H = height if height is not None else exact_height(_rank_of(matroid))
    st = engine_for(matroid, u, k, H, compiled=compiled)
    st.run(after_insert)
    dual = st.exact_dual()
    return UnionResult(st.value(), st.bases(), dual, st, st.oracle.total, st.stats)


def apx_union(matroid, u: Sequence[int], k: int, eps: float, *, height: int | None = None, after_insert=None,
    compiled: bool = False) -> UnionResult:
    """(1+eps)-approximate union value with a (1+eps)-approximate dual cut."""
    if k == 0:
        return _empty_result(u)
    H = height if height is not None else apx_height(eps)
    st = engine_for(matroid, u, k, H, compiled=compiled)
    st.run(after_insert)
    dual = st.apx_dual(eps)
    return UnionResult(st.value(), st.bases(), dual, st, st.oracle.total, st.stats)

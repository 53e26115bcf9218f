"""Exact k-fold union by augmenting a push-relabel packing.

The pipeline is: approximate push-relabel run, strip overpacked copies into a
maximal decreasing packing, optionally restrict to a greedy sparsifier, then
repeat implicit BFS, chord pruning and application until no path is left.

Auxiliary vertices are ``(e, i)`` pairs.  With ``e`` outside ``I_i`` the
vertex offers ``e`` to set ``i``; with ``e`` inside it stands for removing
``e`` from set ``i``.  Arcs:

* ``s -> (e, i)``: ``e`` uncovered, not in ``I_i``
* ``(e, i) -> (d, i)``: ``I_i - d + e`` independent
* ``(d, i) -> (d, j)``: ``d`` covered, in ``I_i``, not in ``I_j``
* ``(e, i) -> t``: ``I_i + e`` independent
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from .matroid import QueryCounter, circuit_element, matroid_rank
from .push_relabel import PushRelabel, _rank_of, apx_height, engine_for


class PackingCorrupted(RuntimeError):
    pass


class StaleAugmentation(ValueError):
    pass


class Packing:
    """k independent sets with coverage counts ``x`` and a version stamp."""

    def __init__(self, oracle, u: Sequence[int], sets: Sequence[Sequence[int]]):
        self.oracle = oracle if isinstance(oracle, QueryCounter) else QueryCounter(oracle)
        self.u = list(u)
        self.sets = [list(s) for s in sets]
        self.members = [set(s) for s in self.sets]
        self.x = [0] * self.oracle.n
        for s in self.sets:
            for e in s:
                self.x[e] += 1
        self.version = 0

    @property
    def k(self) -> int:
        return len(self.sets)

    @property
    def n(self) -> int:
        return self.oracle.n

    def size(self) -> int:
        return sum(len(s) for s in self.sets)

    def value(self) -> int:
        return sum(min(a, b) for a, b in zip(self.u, self.x))

    def uncovered(self, e: int) -> bool:
        return self.x[e] < self.u[e]

    def spans(self, i: int, e: int) -> bool:
        if e in self.members[i]:
            return True
        return not self.oracle.query(self.sets[i] + [e])

    def check(self, elements: Sequence[int] | None = None) -> None:
        """Feasible, independent, maximal over ``elements``, decreasing."""
        o = self.oracle
        with o.phase("check"):
            for i, s in enumerate(self.sets):
                if len(set(s)) != len(s) or not o.query(s):
                    raise PackingCorrupted(f"set {i} is not independent")
            for e in range(self.n):
                if self.x[e] > self.u[e]:
                    raise PackingCorrupted(f"element {e} overpacked")
            pool = range(self.n) if elements is None else elements
            for e in pool:
                if self.uncovered(e):
                    for i in range(self.k):
                        if not self.spans(i, e):
                            raise PackingCorrupted(f"uncovered {e} not spanned by set {i}")
            for i in range(self.k - 1):
                for e in self.sets[i + 1]:
                    if not self.spans(i, e):
                        raise PackingCorrupted(f"sets {i}, {i + 1} not decreasing")


def extract_packing(state: PushRelabel) -> Packing:
    """Drop overpacked copies, always from the highest-index base holding them.

    The result is maximal when the run finished at height 2 or more: every
    uncovered element then sits above level 1, where no copy is dropped.
    """
    sets = [state.base(i) for i in range(state.k)]
    members = [set(s) for s in sets]
    x = list(state.x)
    for e in range(state.n):
        i = state.k - 1
        while x[e] > state.u[e]:
            while e not in members[i]:
                i -= 1
            members[i].discard(e)
            x[e] -= 1
    sets = [[e for e in s if e in m] for s, m in zip(sets, members)]
    packing = Packing(state.oracle, state.u, sets)
    with packing.oracle.phase("extract"):
        settle(packing)
    return packing


def settle(packing: Packing) -> int:
    """Move elements of ``I_{i+1}`` that ``I_i`` does not span into ``I_i``
    until the sets are decreasing.

    Coverage is unchanged and spans of earlier sets only grow.  Elements that
    a set inherited from its leveled base above level 0 are spanned by the
    previous set from the start and never move, so maximality survives.
    Returns the number of moves.
    """
    o = packing.oracle
    moves = 0
    changed = True
    while changed:
        changed = False
        for i in range(packing.k - 1):
            A, Am = packing.sets[i], packing.members[i]
            B, Bm = packing.sets[i + 1], packing.members[i + 1]
            for e in list(B):
                if e not in Am and o.query(A + [e]):
                    A.append(e)
                    Am.add(e)
                    B.remove(e)
                    Bm.discard(e)
                    moves += 1
                    changed = True
    return moves


def sparsifier_size(k: int, r: int) -> int:
    return math.ceil(k * r * (1 + math.log(max(2, r))))


def sparsify(packing: Packing, r: int) -> list[int]:
    """Extend the packing first-fit to ``ceil(k (1 + ln r))`` sets, residual
    capacity acting as multiplicity, and return the union of all sets."""
    k = packing.k
    ell = math.ceil(k * (1 + math.log(max(2, r))))
    extra: list[list[int]] = [[] for _ in range(max(0, ell - k))]
    extra_m = [set() for _ in extra]
    o = packing.oracle

    def spanned(j: int, e: int) -> bool:
        return e in extra_m[j] or not o.query(extra[j] + [e])

    with o.phase("sparsify"):
        for e in range(packing.n):
            for _ in range(packing.u[e] - packing.x[e]):
                if not extra or spanned(len(extra) - 1, e):
                    break
                lo, hi = -1, len(extra) - 1
                while hi - lo > 1:
                    mid = (lo + hi) // 2
                    if spanned(mid, e):
                        lo = mid
                    else:
                        hi = mid
                extra[hi].append(e)
                extra_m[hi].add(e)
    keep = set()
    for s in packing.sets:
        keep.update(s)
    for s in extra:
        keep.update(s)
    return sorted(keep)


@dataclass
class SearchResult:
    path: list[tuple[int, int]]  # auxiliary vertices between s and t
    marked: int
    queries: int


class _Search:
    """Implicit BFS with predecessor search; marked sets M_i stay decreasing."""

    def __init__(self, packing: Packing, elements: Sequence[int] | None, check: bool):
        self.p = packing
        self.o = packing.oracle
        self.k = packing.k
        self.elements = list(range(packing.n)) if elements is None else list(elements)
        self.M = [[] for _ in range(self.k)]
        self.Mset = [set() for _ in range(self.k)]
        self.parent: dict = {}
        self.queue: deque = deque()
        self.searched: set[int] = set()
        self.check = check

    # helpers
    def _largest_missing(self, e: int) -> int:
        for m in range(self.k - 1, -1, -1):
            if e not in self.p.members[m]:
                return m
        return -1

    def _marked_spans(self, i: int, e: int) -> bool:
        if e in self.Mset[i]:
            return True
        if e in self.p.members[i]:
            return False
        return not self.o.query(self.M[i] + [e])

    def _pick(self, i: int, e: int) -> int:
        rest = [d for d in self.p.sets[i] if d not in self.Mset[i]]
        return circuit_element(self.o, rest, self.M[i], e)

    def _mark(self, d: int, i: int) -> None:
        self.M[i].append(d)
        self.Mset[i].add(d)
        if self.check and i > 0:
            if not self._marked_spans(i - 1, d) and d not in self.Mset[i - 1]:
                raise PackingCorrupted(f"marked sets lost decreasing order at {i}")

    def _set_parent(self, v, par) -> None:
        if v not in self.parent:
            self.parent[v] = par

    def run(self) -> SearchResult | None:
        p = self.p
        start = self.o.total
        for e in self.elements:
            if p.uncovered(e) and e not in self.searched:
                found = self._search_element(e, "s")
                if found:
                    return self._result(found, start)
                found = self._drain(start)
                if found:
                    return found
        return None

    def _drain(self, start):
        while self.queue:
            d, i = self.queue.popleft()
            if self.p.uncovered(d) or d in self.searched:
                continue
            found = self._search_element(d, (d, i))
            if found:
                return self._result(found, start)
        return None

    def _search_element(self, e: int, via):
        """Explore every out-vertex of ``e``; ``via`` leads into them."""
        self.searched.add(e)
        p = self.p
        m = self._largest_missing(e)
        if m < 0:
            return None
        last = self.k - 1
        if e not in p.members[last] and not p.spans(last, e):
            lo, hi = -1, last
            while hi - lo > 1:
                mid = (lo + hi) // 2
                if p.spans(mid, e):
                    lo = mid
                else:
                    hi = mid
            out = (e, hi)
            self._set_parent(out, via)
            self.parent["t"] = out
            return out
        out = (e, m)
        self._set_parent(out, via)
        while not self._marked_spans(m, e):
            d = self._pick(m, e)
            self._run_pre_search(d, m)
            self._mark(d, m)
            self._set_parent((d, m), out)
            self.queue.append((d, m))
        return None

    def _via(self, d: int, i: int):
        return "s" if self.p.uncovered(d) else (d, i)

    def _pre(self, e: int, i: int, via):
        """Pre-search as a generator; yields the sub-searches it needs."""
        if i == 0:
            return
        j = i - 1
        if e in self.p.members[j]:
            if e in self.Mset[j]:
                return
            # e is in I_j as well, so it must itself join M_j
            yield (e, j, via)
            self._mark(e, j)
            return
        out = (e, j)
        while not self._marked_spans(j, e):
            c = self._pick(j, e)
            self._set_parent(out, via)
            yield (c, j, self._via(c, j))
            self._mark(c, j)
            self._set_parent((c, j), out)
            self.queue.append((c, j))

    def _run_pre_search(self, d: int, i: int) -> None:
        stack = [self._pre(d, i, self._via(d, i))]
        while stack:
            try:
                args = next(stack[-1])
            except StopIteration:
                stack.pop()
                continue
            stack.append(self._pre(*args))

    def _result(self, out, start) -> SearchResult:
        path = [out]
        v = out
        while True:
            par = self.parent[v]
            if par == "s":
                break
            path.append(par)
            v = par
        path.reverse()
        return SearchResult(path, sum(len(m) for m in self.M), self.o.total - start)


def bfs_search(packing: Packing, elements: Sequence[int] | None = None, check: bool = False) -> SearchResult | None:
    """Find an s-t path in the implicit auxiliary graph, or ``None``."""
    with packing.oracle.phase("search"):
        return _Search(packing, elements, check).run()


def path_arc_types(packing: Packing, path: Sequence[tuple[int, int]]) -> str:
    """Arc types along ``s, path..., t`` as digits 1-4."""
    kinds = ["1"]
    for a, b in zip(path, path[1:]):
        kinds.append("3" if a[0] == b[0] else "2")
    kinds.append("4")
    return "".join(kinds)


@dataclass
class Augmentation:
    version: int
    exchanges: dict[int, list[tuple[int, int]]]  # set -> [(e_in, d_out), ...]
    insertion: tuple[int, int]  # (element, set)
    path: list[tuple[int, int]] = field(default_factory=list)


def _set_exchanges(path, i, members):
    """Positions of (out, in) pairs in set i, plus whether the sink is in i."""
    pairs = []
    for pos in range(len(path) - 1):
        (e, a), (d, b) = path[pos], path[pos + 1]
        if a == i and b == i and e not in members and d in members:
            pairs.append(pos)
    sink = path[-1][1] == i
    return pairs, sink


def prune_path(packing: Packing, path: Sequence[tuple[int, int]]) -> Augmentation:
    """Remove chordal pairs set by set so each set's exchange sequence is
    jointly feasible, then verify every touched set with one query."""
    o = packing.oracle
    path = list(path)
    order = []
    for _, i in path:
        if i not in order:
            order.append(i)
    with o.phase("prune"):
        for i in order:
            I = packing.sets[i]
            mem = packing.members[i]
            pairs, sink = _set_exchanges(path, i, mem)
            j1 = len(pairs) - 1
            while j1 >= 0:
                pairs, sink = _set_exchanges(path, i, mem)
                p = len(pairs)
                e1 = path[pairs[j1]][0]
                ds = [path[q + 1][0] for q in pairs]

                def indep_without_tail(t: int) -> bool:
                    # I - {d_t .. d_{p-1}} + e1; t == p removes nothing
                    drop = set(ds[t:])
                    return o.query([y for y in I if y not in drop] + [e1])

                hi_limit = p if sink else p - 1
                lo, hi = j1, hi_limit + 1  # indep_without_tail(lo) holds
                while hi - lo > 1:
                    mid = (lo + hi) // 2
                    if indep_without_tail(mid):
                        lo = mid
                    else:
                        hi = mid
                j2 = lo
                if j2 > j1:
                    start = pairs[j1]
                    if j2 == p:
                        path = path[: start + 1]
                    else:
                        path = path[: start + 1] + path[pairs[j2] + 1:]
                j1 -= 1
        aug = _to_augmentation(packing, path)
        for i, ex in aug.exchanges.items():
            new = _apply_to_set(packing.sets[i], ex, aug.insertion if aug.insertion[1] == i else None)
            if not o.query(new):
                raise PackingCorrupted(f"pruned exchanges leave set {i} dependent")
        if aug.insertion[1] not in aug.exchanges:
            e, i = aug.insertion
            if not o.query(packing.sets[i] + [e]):
                raise PackingCorrupted(f"insertion into set {i} is dependent")
    return aug


def _to_augmentation(packing: Packing, path) -> Augmentation:
    ex: dict[int, list[tuple[int, int]]] = {}
    for pos in range(len(path) - 1):
        (e, a), (d, b) = path[pos], path[pos + 1]
        if a == b:
            ex.setdefault(a, []).append((e, d))
    return Augmentation(packing.version, ex, path[-1], list(path))


def _apply_to_set(s, exchanges, insertion):
    drop = {d for _, d in exchanges}
    out = [y for y in s if y not in drop]
    out += [e for e, _ in exchanges]
    if insertion is not None:
        out.append(insertion[0])
    return out


def apply(packing: Packing, aug: Augmentation) -> Packing:
    if aug.version != packing.version:
        raise StaleAugmentation("augmentation was computed for an older packing")
    touched = set(aug.exchanges) | {aug.insertion[1]}
    for i in touched:
        ins = aug.insertion if aug.insertion[1] == i else None
        ex = aug.exchanges.get(i, [])
        for e, d in ex:
            packing.x[e] += 1
            packing.x[d] -= 1
        if ins is not None:
            packing.x[ins[0]] += 1
        packing.sets[i] = _apply_to_set(packing.sets[i], ex, ins)
        packing.members[i] = set(packing.sets[i])
    packing.version += 1
    return packing


@dataclass
class HybridResult:
    value: int
    packing: Packing
    augmentations: int
    eps: float
    restricted: list[int] | None
    queries: int
    per_augmentation: list[int] = field(default_factory=list)


def hybrid_eps(n_prime: int, opt_hat: float, k: int, r: int) -> float:
    denom = n_prime + opt_hat * math.log2(2 + r)
    if denom <= 0:  # rank 0: nothing to pack
        return 0.5
    return min(0.5, math.sqrt(math.log2(2 + k * r) / denom))


def hybrid_exact_union(matroid, u: Sequence[int], k: int, *, check: bool = False, on_augment=None) -> HybridResult:
    """Approximate push-relabel, then augmenting paths up to the optimum."""
    n = len(u)
    if k == 0:
        from .matroid import UniformMatroid
        empty = Packing(UniformMatroid(n, 0), u, [])
        return HybridResult(0, empty, 0, 0.5, None, 0)
    r = _rank_of(matroid)
    probe = engine_for(matroid, u, k, apx_height(0.5)).run()
    opt_hat = 1.5 * probe.value()
    n_prime = min(n, sparsifier_size(k, r))
    eps = hybrid_eps(n_prime, opt_hat, k, r)
    st = engine_for(matroid, u, k, apx_height(eps)).run()
    oracle = st.oracle
    queries = probe.oracle.total
    packing = extract_packing(st)
    restricted = None
    if n > n_prime:
        restricted = sparsify(packing, r)
    if check:
        packing.check()
    count = 0
    per = []
    while True:
        before = oracle.total
        found = bfs_search(packing, restricted, check=check)
        if found is None:
            break
        aug = prune_path(packing, found.path)
        size = packing.size()
        apply(packing, aug)
        if packing.size() != size + 1:
            raise PackingCorrupted("augmentation did not grow the packing by one")
        count += 1
        per.append(oracle.total - before)
        if on_augment is not None:
            on_augment(packing, found, aug)
        if check:
            packing.check(restricted)
    return HybridResult(packing.value(), packing, count, eps, restricted, queries + oracle.total, per)

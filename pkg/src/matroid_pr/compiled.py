"""Compiled spanning-forest push-relabel for large rounded instances.

Same insertion rule, queue order and exchange choice as
:class:`~matroid_pr.graphic.GraphicPushRelabel`, so both engines end in the
same state.  Each base is kept as a rooted forest with parent pointers and
tree paths are walked explicitly, which is cheap for the small vertex counts
where ``K'`` gets large.  Readout goes through the Python engine: the kernel
result is loaded back into its buckets.
"""

from __future__ import annotations

import gc
from contextlib import contextmanager
from typing import Sequence

import numpy as np
from numba import njit

from .graphic import GraphicPushRelabel
from .matroid import Graph


# forest row layout per (base, vertex): parent, parent edge, its level, its stamp
_PAR, _EDGE, _LEV, _STAMP = 0, 1, 2, 3


@njit(cache=True)
def _path_best(T, i, a, b, mark, tag):
    """Minimum (level, -stamp) edge on the a-b path of forest i, or -1 if a and
    b lie in different trees."""
    v = a
    while v != -1:
        mark[v] = tag
        v = T[i, v, _PAR]
    w = b
    while w != -1 and mark[w] != tag:
        w = T[i, w, _PAR]
    if w == -1:
        return -1
    best = -1
    blev = 0
    bst = 0
    v = a
    for _ in range(2):
        while v != w:
            lv = T[i, v, _LEV]
            st = T[i, v, _STAMP]
            if best == -1 or lv < blev or (lv == blev and st > bst):
                best = T[i, v, _EDGE]
                blev = lv
                bst = st
            v = T[i, v, _PAR]
        v = b
    return best


@njit(cache=True)
def _path_level(T, i, a, b, mark, tag):
    """Lowest level on the a-b path of forest i (-1 if disconnected)."""
    v = a
    while v != -1:
        mark[v] = tag
        v = T[i, v, _PAR]
    w = b
    while w != -1 and mark[w] != tag:
        w = T[i, w, _PAR]
    if w == -1:
        return -1
    low = 1 << 62
    v = a
    for _ in range(2):
        while v != w:
            if T[i, v, _LEV] < low:
                low = T[i, v, _LEV]
            v = T[i, v, _PAR]
        v = b
    return low


@njit(cache=True)
def _spans(T, ins, ea, eb, i, j, e, mark, tag):
    at = ins[i, e]
    if at >= 0 and at >= j:
        return True
    a = ea[e]
    b = eb[e]
    if a == b:
        return True
    return _path_level(T, i, a, b, mark, tag) >= j


@njit(cache=True)
def _swap(T, ea, eb, i, d, e, lev, st):
    """Replace tree edge d by e (level ``lev``, stamp ``st``) in forest i."""
    a = ea[d]
    b = eb[d]
    c = a if (T[i, a, _PAR] == b and T[i, a, _EDGE] == d) else b
    x = ea[e]
    y = eb[e]
    # which endpoint of e hangs below c
    v = x
    below = False
    while v != -1:
        if v == c:
            below = True
            break
        v = T[i, v, _PAR]
    if not below:
        x, y = y, x
    # reverse parent pointers from x up to c
    prev, pe, pl, ps = y, e, lev, st
    v = x
    while True:
        nxt, ne, nl, ns = T[i, v, _PAR], T[i, v, _EDGE], T[i, v, _LEV], T[i, v, _STAMP]
        T[i, v, _PAR] = prev
        T[i, v, _EDGE] = pe
        T[i, v, _LEV] = pl
        T[i, v, _STAMP] = ps
        if v == c:
            break
        prev, pe, pl, ps = v, ne, nl, ns
        v = nxt


@njit(cache=True)
def _relevel(T, ea, eb, i, e, lev, st):
    a = ea[e]
    v = a if T[i, a, _EDGE] == e else eb[e]
    T[i, v, _LEV] = lev
    T[i, v, _STAMP] = st


@njit(cache=True)
def _run(ea, eb, u, k, H, nv, base0, T, ins, stamp, level, x, stats):
    n = ea.shape[0]
    mark = np.zeros(nv, np.int64)
    tag = 0
    clock = base0.shape[0]
    queue = np.empty(n + 1, np.int64)
    queued = np.zeros(n, np.bool_)
    qh = 0
    qt = 0
    qn = n + 1
    for e in range(n):
        if x[e] < u[e] and level[e] < H:
            queued[e] = True
            queue[qt] = e
            qt = (qt + 1) % qn
    last = k - 1
    while qh != qt:
        e = queue[qh]
        qh = (qh + 1) % qn
        queued[e] = False
        if x[e] >= u[e] or level[e] >= H:
            continue
        stats[0] += 1
        # every probe of the last base reads the same tree path: B_{>=p}
        # spans e iff p <= top
        if ea[e] == eb[e]:
            top = H
        else:
            tag += 1
            top = _path_level(T, last, ea[e], eb[e], mark, tag)
        if ins[last, e] > top:
            top = ins[last, e]
        stats[3] += 1
        if H - 1 <= top:
            level[e] = H
            stats[2] += 1
        else:
            good = max(level[e], 1) - 1
            bad = H - 1
            step = 1
            while good + 1 < bad:
                p = min(good + step, bad - 1)
                stats[3] += 1
                if p <= top:
                    good = p
                    step *= 2
                else:
                    bad = p
                    break
            while bad - good > 1:
                mid = (good + bad) // 2
                stats[3] += 1
                if mid <= top:
                    good = mid
                else:
                    bad = mid
            jp = bad
            lo = -1
            hi = last
            while hi - lo > 1:
                mid = (lo + hi) // 2
                tag += 1
                stats[3] += 1
                if _spans(T, ins, ea, eb, mid, jp, e, mark, tag):
                    lo = mid
                else:
                    hi = mid
            i = hi
            tag += 1
            d = _path_best(T, i, ea[e], eb[e], mark, tag)
            if d == -1 or ins[i, d] != jp - 1:
                stats[4] += 1
                return
            if d != e:
                _swap(T, ea, eb, i, d, e, jp, clock)
            else:
                _relevel(T, ea, eb, i, e, jp, clock)
            ins[i, d] = -1
            ins[i, e] = jp
            stamp[i, e] = clock
            clock += 1
            level[e] = jp
            x[d] -= 1
            x[e] += 1
            stats[1] += 1
            if d != e and not queued[d] and x[d] < u[d] and level[d] < H:
                queued[d] = True
                queue[qt] = d
                qt = (qt + 1) % qn
        if not queued[e] and x[e] < u[e] and level[e] < H:
            queued[e] = True
            queue[qt] = e
            qt = (qt + 1) % qn


def _root_forest(nv: int, edges, base: Sequence[int], stamp):
    T = np.zeros((nv, 4), np.int64)
    T[:, _PAR] = -1
    T[:, _EDGE] = -1
    adj: list[list[tuple[int, int]]] = [[] for _ in range(nv)]
    for e in base:
        a, b = edges[e]
        adj[a].append((b, e))
        adj[b].append((a, e))
    seen = [False] * nv
    for root in range(nv):
        if seen[root]:
            continue
        seen[root] = True
        stack = [root]
        while stack:
            v = stack.pop()
            for w, e in adj[v]:
                if not seen[w]:
                    seen[w] = True
                    T[w, _PAR] = v
                    T[w, _EDGE] = e
                    T[w, _STAMP] = stamp[e]
                    stack.append(w)
    return T


@contextmanager
def _gc_paused():
    # K' * H bucket lists are all live; collector passes over them are wasted
    was = gc.isenabled()
    gc.disable()
    try:
        yield
    finally:
        if was:
            gc.enable()


class CompiledGraphicPushRelabel(GraphicPushRelabel):
    """:class:`GraphicPushRelabel` whose :meth:`run` executes in compiled code."""

    def __init__(self, *args, **kwargs):
        with _gc_paused():
            super().__init__(*args, **kwargs)

    def run(self, after_insert=None):
        if after_insert is not None:
            raise ValueError("the compiled engine has no per-insert hook")
        if self.stats.inserts:
            raise ValueError("the compiled engine runs from the initial state only")
        if self.k == 0 or not self.queue:
            self.queue.clear()
            return self
        g, k, n, H = self.graph, self.k, self.n, self.H
        ea = np.array([a for a, _ in g.edges], np.int64)
        eb = np.array([b for _, b in g.edges], np.int64)
        base0 = np.array(self.buckets[0][0], np.int64)
        ins = np.full((k, n), -1, np.int64)
        stamp = np.zeros((k, n), np.int64)
        ins[:, base0] = 0
        stamp[:, base0] = np.arange(len(base0))
        T = np.tile(_root_forest(g.n_vertices, g.edges, self.buckets[0][0], stamp[0]), (k, 1, 1))
        level = np.array(self.level, np.int64)
        x = np.array(self.x, np.int64)
        stats = np.zeros(5, np.int64)
        _run(ea, eb, np.array(self.u, np.int64), k, H, g.n_vertices, base0,
             T, ins, stamp, level, x, stats)
        if stats[4]:
            raise RuntimeError("compiled engine found an exchange edge at the wrong level")
        self.level = level.tolist()
        self.x = x.tolist()
        self.queue.clear()
        self.queued = [False] * n
        self.stats.inserts += int(stats[0])
        self.stats.exchanges += int(stats[1])
        self.stats.relabels_to_h += int(stats[2])
        self.stats.probes += int(stats[3])
        self.forests.clear()
        self.luf.tables.clear()
        with _gc_paused():
            self._load(ins, stamp)
        self.clock = len(base0) + self.stats.exchanges
        return self

    def _load(self, ins, stamp) -> None:
        H = self.H
        for i in range(self.k):
            row = ins[i]
            members = np.nonzero(row >= 0)[0]
            order = members[np.lexsort((stamp[i, members], row[members]))]
            b = [[] for _ in range(H + 1)]
            for e in order.tolist():
                b[int(row[e])].append(e)
            self.buckets[i] = b
            self.ins_level[i] = {e: int(row[e]) for e in members.tolist()}
            self.stamp[i] = {e: int(stamp[i, e]) for e in members.tolist()}


def compiled_engine(graph: Graph, u: Sequence[int], k: int, H: int, initial_base=None):
    return CompiledGraphicPushRelabel(graph, u, k, H, initial_base=initial_base)

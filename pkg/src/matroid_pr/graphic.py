"""Spanning-forest push-relabel.

Span tests become union-find lookups on ``T^(i)_{>=t}`` (one structure per
base and threshold, built on first use), and the edge to drop on an exchange
is the minimum-key edge on the tree path closed by the new edge, read off a
link-cut forest.  Keys order edges by insertion level, then latest insertion
first, which reproduces the generic engine's choice exactly.
"""

from __future__ import annotations

from collections import deque
from typing import Sequence

from .matroid import Graph, GraphicMatroid, _DSU
from .pack_cover import decide_covering, decide_packing
from .push_relabel import InvariantError, PushRelabel, apx_union, exact_union

_STAMP_BITS = 40
_INF = 1 << 62


def edge_key(level: int, stamp: int) -> int:
    return (level << _STAMP_BITS) + ((1 << _STAMP_BITS) - 1 - stamp)


class LinkCutForest:
    """Splay-based link-cut forest with path-minimum over node keys.

    Vertex nodes ``0..n_vertices-1`` carry an infinite key; edge ``eid`` is the
    node ``n_vertices + eid`` hung between its endpoints, so a path minimum is
    always an edge.
    """

    def __init__(self, n_vertices: int, n_edges: int):
        size = n_vertices + n_edges
        self.nv = n_vertices
        self.left = [-1] * size
        self.right = [-1] * size
        self.par = [-1] * size
        self.rev = [False] * size
        self.key = [_INF] * size
        self.mn = list(range(size))
        self.ends: dict[int, tuple[int, int]] = {}

    def _is_root(self, x: int) -> bool:
        p = self.par[x]
        return p == -1 or (self.left[p] != x and self.right[p] != x)

    def _pull(self, x: int) -> None:
        key, mn = self.key, self.mn
        best = x
        c = self.left[x]
        if c != -1 and key[mn[c]] < key[best]:
            best = mn[c]
        c = self.right[x]
        if c != -1 and key[mn[c]] < key[best]:
            best = mn[c]
        mn[x] = best

    def _push(self, x: int) -> None:
        if self.rev[x]:
            l, r = self.left[x], self.right[x]
            self.left[x], self.right[x] = r, l
            if l != -1:
                self.rev[l] = not self.rev[l]
            if r != -1:
                self.rev[r] = not self.rev[r]
            self.rev[x] = False

    def _rotate(self, x: int) -> None:
        left, right, par = self.left, self.right, self.par
        p = par[x]
        g = par[p]
        if not self._is_root(p):
            if left[g] == p:
                left[g] = x
            else:
                right[g] = x
        par[x] = g
        if left[p] == x:
            b = right[x]
            left[p] = b
            right[x] = p
        else:
            b = left[x]
            right[p] = b
            left[x] = p
        if b != -1:
            par[b] = p
        par[p] = x
        self._pull(p)
        self._pull(x)

    def _splay(self, x: int) -> None:
        stack = [x]
        y = x
        while not self._is_root(y):
            y = self.par[y]
            stack.append(y)
        for y in reversed(stack):
            self._push(y)
        while not self._is_root(x):
            p = self.par[x]
            if not self._is_root(p):
                g = self.par[p]
                if (self.left[g] == p) == (self.left[p] == x):
                    self._rotate(p)
                else:
                    self._rotate(x)
            self._rotate(x)

    def _access(self, x: int) -> None:
        last = -1
        y = x
        while y != -1:
            self._splay(y)
            self.right[y] = last
            self._pull(y)
            last = y
            y = self.par[y]
        self._splay(x)

    def _make_root(self, x: int) -> None:
        self._access(x)
        self.rev[x] = not self.rev[x]

    def _find_root(self, x: int) -> int:
        self._access(x)
        while True:
            self._push(x)
            if self.left[x] == -1:
                break
            x = self.left[x]
        self._splay(x)
        return x

    def connected(self, a: int, b: int) -> bool:
        return a == b or self._find_root(a) == self._find_root(b)

    def _link_nodes(self, a: int, b: int) -> None:
        self._make_root(a)
        self.par[a] = b

    def _cut_nodes(self, a: int, b: int) -> None:
        self._make_root(a)
        self._access(b)
        # a is now the left child of b in b's splay tree
        if self.left[b] != a or self.right[a] != -1:
            raise InvariantError("cut of non-adjacent nodes")
        self.left[b] = -1
        self.par[a] = -1
        self._pull(b)

    def link(self, a: int, b: int, eid: int, key: int) -> None:
        if self.connected(a, b):
            raise InvariantError(f"link of edge {eid} would close a cycle")
        w = self.nv + eid
        self.key[w] = key
        self.mn[w] = w
        self._link_nodes(w, a)
        self._link_nodes(w, b)
        self.ends[eid] = (a, b)

    def cut(self, eid: int) -> None:
        a, b = self.ends.pop(eid)
        w = self.nv + eid
        self._cut_nodes(a, w)
        self._cut_nodes(w, b)
        self.key[w] = _INF
        self.mn[w] = w

    def path_min(self, a: int, b: int) -> tuple[int, int]:
        """(edge id, key) of the minimum-key edge on the a-b tree path."""
        if a == b:
            raise ValueError("empty path")
        self._make_root(a)
        self._access(b)
        node = self.mn[b]
        if node < self.nv:
            raise InvariantError("path has no edge; endpoints not connected")
        return node - self.nv, self.key[node]


class NaiveForest:
    """Same interface as :class:`LinkCutForest` by explicit path walks; used
    as a shadow in checked runs."""

    def __init__(self, n_vertices: int, n_edges: int):
        self.adj: dict[int, dict[int, int]] = {v: {} for v in range(n_vertices)}
        self.keys: dict[int, int] = {}
        self.ends: dict[int, tuple[int, int]] = {}

    def _path(self, a: int, b: int) -> list[int] | None:
        prev = {a: None}
        q = deque([a])
        while q:
            v = q.popleft()
            if v == b:
                break
            for w, eid in self.adj[v].items():
                if w not in prev:
                    prev[w] = (v, eid)
                    q.append(w)
        if b not in prev:
            return None
        out = []
        v = b
        while prev[v] is not None:
            v, eid = prev[v]
            out.append(eid)
        return out

    def connected(self, a: int, b: int) -> bool:
        return self._path(a, b) is not None

    def link(self, a: int, b: int, eid: int, key: int) -> None:
        if self.connected(a, b):
            raise InvariantError("cycle")
        self.adj[a][b] = eid
        self.adj[b][a] = eid
        self.keys[eid] = key
        self.ends[eid] = (a, b)

    def cut(self, eid: int) -> None:
        a, b = self.ends.pop(eid)
        del self.adj[a][b]
        del self.adj[b][a]
        del self.keys[eid]

    def path_min(self, a: int, b: int) -> tuple[int, int]:
        path = self._path(a, b)
        eid = min(path, key=lambda x: self.keys[x])
        return eid, self.keys[eid]


class LevelUnionFind:
    """Union-only connectivity of ``T^(i)_{>=t}``, one DSU per (i, t) built
    lazily from the engine state on first touch."""

    def __init__(self, engine: "GraphicPushRelabel"):
        self.engine = engine
        self.tables: dict[tuple[int, int], _DSU] = {}
        g = engine.graph
        self.static = _DSU(g.n_vertices)
        for a, b in g.edges:
            self.static.union(a, b)

    def get(self, i: int, t: int) -> _DSU:
        key = (i, t)
        dsu = self.tables.get(key)
        if dsu is None:
            eng = self.engine
            dsu = _DSU(eng.graph.n_vertices)
            edges = eng.graph.edges
            for e in eng.prefix(i, t):
                a, b = edges[e]
                dsu.union(a, b)
            self.tables[key] = dsu
        return dsu

    def same(self, i: int, t: int, a: int, b: int) -> bool:
        if t <= 0:
            s = self.static
            return s.find(a) == s.find(b)
        dsu = self.get(i, t)
        return dsu.find(a) == dsu.find(b)

    def on_insert(self, i: int, t: int, a: int, b: int) -> None:
        dsu = self.tables.get((i, t))
        if dsu is not None:
            dsu.union(a, b)


class GraphicPushRelabel(PushRelabel):
    """Push-relabel over the forests of ``graph`` with no oracle calls on the
    hot path.  ``shadow=True`` cross-checks every structure operation."""

    def __init__(self, graph: Graph, u: Sequence[int], k: int, H: int,
                 initial_base: Sequence[int] | None = None, shadow: bool = False):
        self.graph = graph
        self.shadow = shadow
        super().__init__(GraphicMatroid(graph), u, k, H, initial_base=initial_base)
        self.luf = LevelUnionFind(self)
        self.stamp: list[dict[int, int]] = [{e: pos for pos, e in enumerate(self.buckets[i][0])} for i in range(k)]
        self.clock = self.r
        self.forests: dict[int, LinkCutForest] = {}
        self.naive: dict[int, NaiveForest] = {}

    def _first_base(self) -> list[int]:
        return self._independent_in_order(range(self.graph.m))

    def _independent_in_order(self, order) -> list[int]:
        dsu = _DSU(self.graph.n_vertices)
        edges = self.graph.edges
        return [e for e in order if dsu.union(*edges[e])]

    def _forest(self, i: int) -> LinkCutForest:
        f = self.forests.get(i)
        if f is None:
            g = self.graph
            f = LinkCutForest(g.n_vertices, g.m)
            for e, lvl in self.ins_level[i].items():
                a, b = g.edges[e]
                f.link(a, b, e, edge_key(lvl, self.stamp[i][e]))
            self.forests[i] = f
            if self.shadow:
                nf = NaiveForest(g.n_vertices, g.m)
                for e, lvl in self.ins_level[i].items():
                    a, b = g.edges[e]
                    nf.link(a, b, e, edge_key(lvl, self.stamp[i][e]))
                self.naive[i] = nf
        return f

    def _spans(self, i: int, j: int, e: int) -> bool:
        at = self.ins_level[i].get(e)
        if at is not None and at >= j:
            return True
        a, b = self.graph.edges[e]
        return self.luf.same(i, j, a, b)

    def _pick_out(self, i: int, jp: int, e: int) -> int:
        a, b = self.graph.edges[e]
        d, key = self._forest(i).path_min(a, b)
        if self.shadow:
            d2, key2 = self.naive[i].path_min(a, b)
            if (d, key) != (d2, key2):
                raise InvariantError(f"path_min mismatch: {(d, key)} vs {(d2, key2)}")
        if key >> _STAMP_BITS != jp - 1:
            raise InvariantError(f"exchange edge at level {key >> _STAMP_BITS}, expected {jp - 1}")
        return d

    def _after_exchange(self, i: int, jp: int, e: int, d: int, old_e_level) -> None:
        g = self.graph
        a, b = g.edges[e]
        self.stamp[i].pop(d, None)
        self.stamp[i][e] = self.clock
        key = edge_key(jp, self.clock)
        self.clock += 1
        structures = [self.forests.get(i)]
        if self.shadow:
            structures.append(self.naive.get(i))
        for f in structures:
            if f is not None:
                f.cut(d)
                f.link(a, b, e, key)
        self.luf.on_insert(i, jp, a, b)
        if self.shadow:
            self.check_level_union_find()

    def check_level_union_find(self) -> None:
        for (i, t), dsu in self.luf.tables.items():
            fresh = _DSU(self.graph.n_vertices)
            for e in self.prefix(i, t):
                fresh.union(*self.graph.edges[e])
            for v in range(self.graph.n_vertices):
                for w in range(v + 1, self.graph.n_vertices):
                    if (dsu.find(v) == dsu.find(w)) != (fresh.find(v) == fresh.find(w)):
                        raise InvariantError(f"level union-find ({i}, {t}) out of date")


def vertex_partition(graph: Graph, S: Sequence[int]) -> list[list[int]]:
    """Components of ``(V, S)``: the partition whose crossing edges lie outside S."""
    dsu = _DSU(graph.n_vertices)
    for e in S:
        dsu.union(*graph.edges[e])
    groups: dict[int, list[int]] = {}
    for v in range(graph.n_vertices):
        groups.setdefault(dsu.find(v), []).append(v)
    return sorted(groups.values())


def graphic_run(graph: Graph, k: int, H: int, u: Sequence[int] | None = None,
                shadow: bool = False, after_insert=None) -> GraphicPushRelabel:
    caps = list(graph.cap) if u is None else list(u)
    st = GraphicPushRelabel(graph, caps, k, H, shadow=shadow)
    st.run(after_insert)
    return st


def _with_partition(graph: Graph, res):
    if res.dual is not None:
        res.partition = vertex_partition(graph, res.dual.S)
    return res


def max_forest_union(graph: Graph, k: int, u: Sequence[int] | None = None):
    caps = list(graph.cap) if u is None else list(u)
    return _with_partition(graph, exact_union(graph, caps, k))


def apx_forest_union(graph: Graph, k: int, eps: float, u: Sequence[int] | None = None):
    caps = list(graph.cap) if u is None else list(u)
    return _with_partition(graph, apx_union(graph, caps, k, eps))


def tree_packing_decision(graph: Graph, k: int, eps: float, u: Sequence[int] | None = None):
    caps = list(graph.cap) if u is None else list(u)
    dec = decide_packing(graph, caps, k, eps)
    if dec.certificate is not None:
        dec.partition = vertex_partition(graph, dec.certificate)
    return dec


def tree_covering_decision(graph: Graph, k: int, eps: float, u: Sequence[int] | None = None):
    caps = list(graph.cap) if u is None else list(u)
    dec = decide_covering(graph, caps, k, eps)
    if dec.certificate is not None:
        dec.partition = vertex_partition(graph, dec.certificate)
    return dec

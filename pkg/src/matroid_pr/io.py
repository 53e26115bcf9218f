"""Text formats for instances.

Graphs::

    graph <n_v> <m>
    <u> <v> <cap> [cost]      # m lines, vertices 0-indexed

Other matroids::

    uniform <n> <r>
    partition <n>
    block <elem ids...> cap <c>
    explicit <n>
    base <elem ids...>

Matroid files may add ``caps <c_0 ... c_{n-1}>`` and ``costs <...>`` lines
(defaults: all ones).  ``#`` starts a comment; blank lines are ignored.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .matroid import ExplicitMatroid, Graph, PartitionMatroid, UniformMatroid


class InputError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass
class Instance:
    kind: str
    matroid: object
    caps: list[float]
    costs: list[float]

    @property
    def n(self) -> int:
        return len(self.caps)


def _number(tok: str, lineno: int) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise InputError(f"expected a number, got {tok!r}", lineno) from None
    if v != v or v in (float("inf"), float("-inf")):
        raise InputError(f"non-finite number {tok!r}", lineno)
    return int(v) if v.is_integer() else v


def _int(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise InputError(f"expected an integer, got {tok!r}", lineno) from None


def _lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].split()
        if body:
            yield lineno, body


def integral(values) -> list[int] | None:
    """The values as ints when all are integral, else None."""
    if all(float(v).is_integer() for v in values):
        return [int(v) for v in values]
    return None


def parse_instance(text: str, *, expand_capacities: bool = False) -> Instance:
    rows = list(_lines(text))
    if not rows:
        raise InputError("empty input", 1)
    lineno, head = rows[0]
    kind = head[0]
    body = rows[1:]
    if kind == "graph":
        return _parse_graph(head, lineno, body, expand_capacities)
    if expand_capacities:
        raise InputError("--expand-capacities applies to graph files only", lineno)
    if kind == "uniform":
        if len(head) != 3:
            raise InputError("expected 'uniform <n> <r>'", lineno)
        n, r = _int(head[1], lineno), _int(head[2], lineno)
        if not 0 <= r <= n:
            raise InputError("need 0 <= r <= n", lineno)
        matroid = UniformMatroid(n, r)
        extra = body
    elif kind == "partition":
        if len(head) != 2:
            raise InputError("expected 'partition <n>'", lineno)
        n = _int(head[1], lineno)
        block_of = [-1] * n
        caps_b: list[int] = []
        extra = []
        for ln, toks in body:
            if toks[0] != "block":
                extra.append((ln, toks))
                continue
            if len(toks) < 3 or toks[-2] != "cap":
                raise InputError("expected 'block <ids...> cap <c>'", ln)
            for t in toks[1:-2]:
                e = _int(t, ln)
                if not 0 <= e < n:
                    raise InputError(f"element {e} out of range", ln)
                if block_of[e] != -1:
                    raise InputError(f"element {e} is in two blocks", ln)
                block_of[e] = len(caps_b)
            c = _int(toks[-1], ln)
            if c < 0:
                raise InputError("block cap must be nonnegative", ln)
            caps_b.append(c)
        missing = [e for e, b in enumerate(block_of) if b == -1]
        if missing:
            raise InputError(f"element {missing[0]} belongs to no block", lineno)
        matroid = PartitionMatroid(block_of, caps_b)
    elif kind == "explicit":
        if len(head) != 2:
            raise InputError("expected 'explicit <n>'", lineno)
        n = _int(head[1], lineno)
        bases = []
        extra = []
        for ln, toks in body:
            if toks[0] != "base":
                extra.append((ln, toks))
                continue
            ids = [_int(t, ln) for t in toks[1:]]
            if any(not 0 <= e < n for e in ids):
                raise InputError("element out of range", ln)
            bases.append(ids)
        try:
            matroid = ExplicitMatroid(n, bases)
        except ValueError as err:
            raise InputError(str(err), lineno) from None
    else:
        raise InputError(f"unknown instance kind {kind!r}", lineno)
    caps, costs = [1] * n, [1] * n
    for ln, toks in extra:
        if toks[0] not in ("caps", "costs"):
            raise InputError(f"unexpected line starting with {toks[0]!r}", ln)
        vals = [_number(t, ln) for t in toks[1:]]
        if len(vals) != n:
            raise InputError(f"{toks[0]} needs {n} values, got {len(vals)}", ln)
        if toks[0] == "caps":
            if any(v < 0 for v in vals):
                raise InputError("capacities must be nonnegative", ln)
            caps = vals
        else:
            costs = vals
    return Instance(kind, matroid, caps, costs)


def _parse_graph(head, lineno, body, expand) -> Instance:
    if len(head) != 3:
        raise InputError("expected 'graph <n_v> <m>'", lineno)
    nv, m = _int(head[1], lineno), _int(head[2], lineno)
    if nv < 1 or m < 0:
        raise InputError("need n_v >= 1 and m >= 0", lineno)
    if len(body) != m:
        last = body[-1][0] if body else lineno
        raise InputError(f"header announces {m} edges, found {len(body)}", last)
    edges, caps, costs = [], [], []
    for ln, toks in body:
        if len(toks) not in (3, 4):
            raise InputError("expected '<u> <v> <cap> [cost]'", ln)
        a, b = _int(toks[0], ln), _int(toks[1], ln)
        if not (0 <= a < nv and 0 <= b < nv):
            raise InputError(f"endpoint out of range 0..{nv - 1}", ln)
        c = _number(toks[2], ln)
        if c < 0:
            raise InputError("capacities must be nonnegative", ln)
        cost = _number(toks[3], ln) if len(toks) == 4 else 1
        if expand:
            if not float(c).is_integer():
                raise InputError("only integral capacities can be expanded", ln)
            edges += [(a, b)] * int(c)
            caps += [1] * int(c)
            costs += [cost] * int(c)
        else:
            edges.append((a, b))
            caps.append(c)
            costs.append(cost)
    return Instance("graph", Graph(nv, edges, caps, costs), caps, costs)


def load_instance(path: str | Path, *, expand_capacities: bool = False) -> Instance:
    try:
        text = Path(path).read_text()
    except OSError as err:
        raise InputError(f"cannot read {path}: {err.strerror}") from None
    return parse_instance(text, expand_capacities=expand_capacities)


def format_graph(graph: Graph) -> str:
    lines = [f"graph {graph.n_vertices} {graph.m}"]
    costs = graph.cost or [None] * graph.m
    for (a, b), c, w in zip(graph.edges, graph.cap, costs):
        lines.append(f"{a} {b} {c}" + ("" if w is None else f" {w}"))
    return "\n".join(lines) + "\n"

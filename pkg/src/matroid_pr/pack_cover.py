"""Base packing and covering: exact decisions through the union value and
(1 +/- eps) decisions that read a certificate off the level structure."""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass, field
from typing import Sequence

from .push_relabel import PushRelabel, _rank_of, engine_for, exact_union


@dataclass
class PackDecision:
    """``packed`` with bases, or a set ``S`` with u(E-S) < scale*(r - rank S)."""

    packed: bool
    bases: list[list[int]] | None = None
    certificate: list[int] | None = None
    rank_S: int | None = None
    threshold: int | None = None
    scale: float = 0.0
    height: int = 0
    state: PushRelabel | None = None
    partition: list[list[int]] | None = None


@dataclass
class CoverDecision:
    """``covered`` with bases, or a set ``S`` with u(S) > scale*rank(S)."""

    covered: bool
    bases: list[list[int]] | None = None
    certificate: list[int] | None = None
    rank_S: int | None = None
    threshold: int | None = None
    scale: float = 0.0
    height: int = 0
    state: PushRelabel | None = None
    partition: list[list[int]] | None = None


def packing_violated(u: Sequence, S: Sequence[int], rank_S: int, r: int, scale: float) -> bool:
    inside = set(S)
    comp = sum(c for e, c in enumerate(u) if e not in inside)
    return comp < scale * (r - rank_S)


def covering_violated(u: Sequence, S: Sequence[int], rank_S: int, scale: float) -> bool:
    return sum(u[e] for e in S) > scale * rank_S


def _coverage(bases, n):
    x = [0] * n
    for b in bases:
        for e in b:
            x[e] += 1
    return x


def exact_packing(matroid, u: Sequence[int], k: int) -> PackDecision:
    if k == 0:
        return PackDecision(True, bases=[], scale=0)
    res = exact_union(matroid, u, k)
    st = res.state
    if res.value == k * st.r:
        return PackDecision(True, bases=res.bases, scale=k, height=st.H, state=st)
    d = res.dual
    return PackDecision(False, certificate=d.S, rank_S=d.rank_S, threshold=d.threshold,
                        scale=k, height=st.H, state=st)


def exact_covering(matroid, u: Sequence[int], k: int) -> CoverDecision:
    total = sum(u)
    if k == 0:
        if total == 0:
            return CoverDecision(True, bases=[], scale=0)
        return CoverDecision(False, certificate=[e for e, c in enumerate(u) if c > 0], rank_S=0, scale=0)
    res = exact_union(matroid, u, k)
    st = res.state
    if res.value == total:
        return CoverDecision(True, bases=res.bases, scale=k, height=st.H, state=st)
    d = res.dual
    # value = k*rank(S) + u(E-S) < u(E) gives u(S) > k*rank(S)
    return CoverDecision(False, certificate=d.S, rank_S=d.rank_S, threshold=d.threshold,
                         scale=k, height=st.H, state=st)


def packing_height(total_capacity, eps: float) -> int:
    return math.ceil(math.log(max(2, total_capacity)) / math.log(1 + eps / (1 + eps))) + 2


def covering_height(r: int, eps: float) -> int:
    return math.ceil(math.log(max(2, r)) / math.log(1 / (1 - eps))) + 2


def _check_eps(eps: float) -> None:
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")


def decide_packing(matroid, u: Sequence[int], k: int, eps: float, *, height: int | None = None,
                   compiled: bool = False) -> PackDecision:
    """Packed: k bases with x <= u.  Otherwise a level set S = L_{>j} with
    u(E - S) < (1+eps) k (r - rank S)."""
    _check_eps(eps)
    if k == 0:
        return PackDecision(True, bases=[], scale=0)
    total = sum(u)
    H = height if height is not None else packing_height(total, eps)
    st = engine_for(matroid, u, k, H, compiled=compiled)
    st.run()
    scale = (1 + eps) * k
    over = [e for e in range(st.n) if st.x[e] > st.u[e]]
    if not over:
        return PackDecision(True, bases=st.bases(), scale=scale, height=H, state=st)
    level, uu = st.level, st.u
    row = [0] * (H + 1)
    for e in range(st.n):
        row[level[e]] += uu[e]
    below = 0
    ratio = eps / (1 + eps)
    candidates = []
    for j in range(0, H):
        below += row[j]
        if j >= 1 and row[j] < ratio * below:
            candidates.append(j)
    # fall back to every threshold if the sparse-level scan does not verify
    candidates += [j for j in range(0, H + 1) if j not in candidates]
    for j in candidates:
        S = st.level_set(j + 1)
        rk = len(st._independent_in_order(S))
        if packing_violated(uu, S, rk, st.r, scale):
            return PackDecision(False, certificate=S, rank_S=rk, threshold=j + 1,
                                scale=scale, height=H, state=st)
    raise RuntimeError("overpacked elements remain but no level set certifies infeasibility")


def decide_covering(matroid, u: Sequence[int], k: int, eps: float, *, height: int | None = None,
                    compiled: bool = False) -> CoverDecision:
    """Covered: k bases with x >= u.  Otherwise a level set S = L_{>=j} with
    u(S) > (1-eps) k rank(S)."""
    _check_eps(eps)
    n = len(u)
    total = sum(u)
    scale = (1 - eps) * k
    if total == 0:
        return CoverDecision(True, bases=None, scale=scale)
    r = _rank_of(matroid)
    if k == 0 or total > k * r:
        return CoverDecision(False, certificate=list(range(n)), rank_S=r, threshold=0, scale=scale)
    H = height if height is not None else covering_height(r, eps)
    st = engine_for(matroid, u, k, H, compiled=compiled)
    st.run()
    if all(st.x[e] >= st.u[e] for e in range(n)):
        return CoverDecision(True, bases=st.bases(), scale=scale, height=H, state=st)
    ranks = st.level_ranks()
    candidates = [j for j in range(1, H) if ranks[j + 1] >= (1 - eps) * ranks[j]]
    candidates += [j for j in range(0, H + 1) if j not in candidates]
    for j in candidates:
        S = st.level_set(j)
        if covering_violated(st.u, S, ranks[j], scale):
            return CoverDecision(False, certificate=S, rank_S=ranks[j], threshold=j,
                                 scale=scale, height=H, state=st)
    raise RuntimeError("uncovered elements remain but no level set certifies infeasibility")


@dataclass
class RatioResult:
    """Exact ratio with the set attaining it."""

    value: Fraction
    S: list[int]
    rank_S: int
    tests: int


def exact_strength(matroid, u: Sequence[int]) -> RatioResult:
    """``min u(E - S) / (r - rank S)`` over sets of rank below r.

    Starts from ``S = {}`` and tests whether ``q*u`` packs ``p`` bases for the
    current ratio ``p/q``; each failure returns a set of strictly smaller
    ratio, so the loop ends at the minimum.
    """
    r = _rank_of(matroid)
    if r == 0:
        raise ValueError("strength is undefined for rank 0")
    S, rk = [], 0
    ratio = Fraction(sum(u), r)
    tests = 0
    while True:
        p, q = ratio.numerator, ratio.denominator
        tests += 1
        dec = exact_packing(matroid, [q * c for c in u], p)
        if dec.packed:
            return RatioResult(ratio, S, rk, tests)
        S, rk = dec.certificate, dec.rank_S
        inside = set(S)
        ratio = Fraction(sum(c for e, c in enumerate(u) if e not in inside), r - rk)


def exact_covering_number(matroid, u: Sequence[int]) -> RatioResult:
    """``max u(S) / rank(S)``; the same certificate walk upward from ``S = E``."""
    n = len(u)
    S = list(range(n))
    r = _rank_of(matroid)
    if sum(u) == 0:
        return RatioResult(Fraction(0), [], 0, 0)
    if r == 0:
        raise ValueError("positive capacity on a loop cannot be covered")
    rk = r
    ratio = Fraction(sum(u), r)
    tests = 0
    while True:
        p, q = ratio.numerator, ratio.denominator
        tests += 1
        dec = exact_covering(matroid, [q * c for c in u], p)
        if dec.covered:
            return RatioResult(ratio, S, rk, tests)
        S, rk = dec.certificate, dec.rank_S
        if rk == 0:
            raise ValueError("positive capacity on a loop cannot be covered")
        ratio = Fraction(sum(u[e] for e in S), rk)

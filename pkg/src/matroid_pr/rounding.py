"""Real capacities through randomized rounding.

Capacities are divided by ``tau = k / K'`` and rounded up or down at random
so each rounded value is unbiased.  The integer instance with ``K'`` bases is
then handed to the integer solvers; answers scale back by ``tau``.  All
outputs are Monte Carlo: certificates are exact for the rounded instance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .matroid import Graph, rank
from .pack_cover import decide_covering, decide_packing
from .push_relabel import _rank_of, apx_union


@dataclass(frozen=True)
class RoundingConfig:
    eps: float
    c0: float = 9.0
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.eps < 1:
            raise ValueError("eps must lie in (0, 1)")
        if self.c0 <= 0:
            raise ValueError("c0 must be positive")

    def bases_count(self, n: int) -> int:
        """``K' = ceil(c0 ln(max(3, n)) / eps^2)``."""
        return max(1, math.ceil(self.c0 * math.log(max(3, n)) / self.eps ** 2))

    def rng(self, trial: int = 0) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(self.seed + trial))


@dataclass
class RoundedInstance:
    u: list[int]
    tau: float
    k_prime: int


def _fast(matroid) -> bool:
    # rounded instances carry K' bases; graphs run in compiled code
    return isinstance(matroid, Graph)


def round_capacities(u: Sequence[float], k: float, cfg: RoundingConfig,
                     rng: np.random.Generator | None = None) -> RoundedInstance:
    if k <= 0:
        raise ValueError("k must be positive")
    rng = cfg.rng() if rng is None else rng
    kp = cfg.bases_count(len(u))
    tau = k / kp
    scaled = np.asarray(u, dtype=float) / tau
    base = np.floor(scaled)
    frac = scaled - base
    up = rng.random(len(u)) < frac
    return RoundedInstance([int(v) for v in base + up], tau, kp)


@dataclass
class RealUnionEstimate:
    value: float
    dual_value: float
    dual_set: list[int]
    rounded: RoundedInstance


def apx_union_value_real(matroid, u: Sequence[float], k: float, eps: float,
                         cfg: RoundingConfig, rng: np.random.Generator | None = None) -> RealUnionEstimate:
    ri = round_capacities(u, k, cfg, rng)
    res = apx_union(matroid, ri.u, ri.k_prime, eps, compiled=_fast(matroid))
    return RealUnionEstimate(ri.tau * res.value, ri.tau * res.dual.value, res.dual.S, ri)


@dataclass
class Decision:
    """``yes`` is AtLeast / Inside / Covered; a certificate backs ``no``."""

    yes: bool
    k: float
    rounded: RoundedInstance
    certificate: list[int] | None = None
    rank_S: int | None = None
    detail: object = None


def decide_strength(matroid, u: Sequence[float], k: float, eps: float,
                    cfg: RoundingConfig, rng: np.random.Generator | None = None) -> Decision:
    """AtLeast (``yes``): strength >= (1 - O(eps)) k.  AtMost: <= (1 + O(eps)) k."""
    ri = round_capacities(u, k, cfg, rng)
    dec = decide_packing(matroid, ri.u, ri.k_prime, eps, compiled=_fast(matroid))
    return Decision(dec.packed, k, ri, dec.certificate, dec.rank_S, dec)


def decide_covering_real(matroid, u: Sequence[float], k: float, eps: float,
                         cfg: RoundingConfig, rng: np.random.Generator | None = None) -> Decision:
    """Covered (``yes``) by about k fractional bases, or a dense set."""
    ri = round_capacities(u, k, cfg, rng)
    dec = decide_covering(matroid, ri.u, ri.k_prime, eps, compiled=_fast(matroid))
    return Decision(dec.covered, k, ri, dec.certificate, dec.rank_S, dec)


def decide_membership(matroid, x: Sequence[float], eps: float, cfg: RoundingConfig,
                      rng: np.random.Generator | None = None) -> Decision:
    """Inside (``yes``) the independent-set polytope, up to 1 +/- O(eps)."""
    return decide_covering_real(matroid, x, 1.0, eps, cfg, rng)


def majority(decide: Callable[[np.random.Generator], Decision], cfg: RoundingConfig, trials: int) -> Decision:
    """Majority vote over independent streams; returns a decision from the
    winning side so its certificate is attached."""
    votes = [decide(cfg.rng(t)) for t in range(max(1, trials))]
    yes = [d for d in votes if d.yes]
    no = [d for d in votes if not d.yes]
    return yes[0] if len(yes) * 2 > len(votes) else (no[0] if no else yes[0])


@dataclass
class SearchOutcome:
    estimate: float
    lo: float
    hi: float
    probes: int
    stages: int


def _staged_search(lo: float, hi: float, eps: float, probe: Callable[[float, float], bool],
                   yes_raises_lo: bool) -> SearchOutcome:
    """Geometric bracket search with stage errors 2^-i.

    ``probe(m, delta)`` answers the decision at ``m`` with error ``delta``.
    For strength a yes moves ``lo`` up; for covering a yes moves ``hi`` down.
    """
    lo0, hi0 = lo, hi
    probes = 0
    i = 0
    while True:
        eps_i = 2.0 ** -i
        delta = eps_i / 4
        while hi / lo > (1 + eps_i) ** 2:
            m = math.sqrt(lo * hi)
            ans = probe(m, delta)
            probes += 1
            if ans == yes_raises_lo:
                lo = min(max(lo, m * (1 - delta)), hi0)
            else:
                hi = max(min(hi, m * (1 + delta)), lo0)
            if lo > hi:
                lo, hi = hi, lo
        if eps_i <= eps:
            return SearchOutcome(math.sqrt(lo * hi), lo, hi, probes, i + 1)
        i += 1


def _support_spans(matroid, u: Sequence[float], r: int) -> bool:
    support = [e for e, c in enumerate(u) if c > 0]
    if isinstance(matroid, Graph):
        return matroid.rank(support) == r
    return rank(matroid, support) == r


def strength_bounds(matroid, u: Sequence[float]) -> tuple[float, float]:
    """One base inside the support packs at weight ``min u > 0``; ``S = {}``
    gives the upper bound.  The support must span."""
    r = _rank_of(matroid)
    pos = [c for c in u if c > 0]
    if r == 0 or not pos:
        raise ValueError("strength search needs rank >= 1 and a positive capacity")
    return min(pos), sum(u) / r


def search_strength(matroid, u: Sequence[float], eps: float, cfg: RoundingConfig,
                    rng: np.random.Generator | None = None) -> SearchOutcome:
    rng = cfg.rng() if rng is None else rng
    lo, hi = strength_bounds(matroid, u)
    if not _support_spans(matroid, u, _rank_of(matroid)):
        return SearchOutcome(0.0, 0.0, 0.0, 0, 0)
    if hi / lo <= 1:
        return SearchOutcome(lo, lo, hi, 0, 0)

    def probe(m, delta):
        return decide_strength(matroid, u, m, delta, cfg, rng).yes

    return _staged_search(lo, hi, eps, probe, yes_raises_lo=True)


def search_covering_number(matroid, u: Sequence[float], eps: float, cfg: RoundingConfig,
                           rng: np.random.Generator | None = None) -> SearchOutcome:
    rng = cfg.rng() if rng is None else rng
    pos = [c for c in u if c > 0]
    if not pos:
        raise ValueError("covering search needs a positive capacity")
    lo, hi = max(pos), float(sum(pos))
    if hi / lo <= 1:
        return SearchOutcome(lo, lo, hi, 0, 0)

    def probe(m, delta):
        return decide_covering_real(matroid, u, m, delta, cfg, rng).yes

    return _staged_search(lo, hi, eps, probe, yes_raises_lo=False)

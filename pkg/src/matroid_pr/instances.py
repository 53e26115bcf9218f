"""Seeded random instances for the verify and bench commands and the tests."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .matroid import ExplicitMatroid, Graph, PartitionMatroid, UniformMatroid

FAMILIES = ("graph", "uniform", "partition", "explicit")


@dataclass
class RandomInstance:
    family: str
    matroid: object
    u: list[int]
    k: int
    costs: list[int]

    @property
    def n(self) -> int:
        return len(self.u)


def random_graph(rng: random.Random, max_vertices: int = 6, max_edges: int = 12) -> Graph:
    nv = rng.randint(2, max_vertices)
    m = rng.randint(1, max_edges)
    return Graph(nv, [(rng.randrange(nv), rng.randrange(nv)) for _ in range(m)])


def gf2_rank(vectors) -> int:
    basis: list[int] = []
    for v in vectors:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
    return len(basis)


def random_vector_matroid(rng: random.Random, n: int, dim: int) -> ExplicitMatroid:
    """Column matroid of a random 0/1 matrix over GF(2), listed by its bases."""
    vecs = [rng.randrange(1 << dim) for _ in range(n)]
    r = gf2_rank(vecs)
    bases = [c for c in itertools.combinations(range(n), r) if gf2_rank(vecs[e] for e in c) == r]
    return ExplicitMatroid(n, bases)


def random_matroid(rng: random.Random, family: str, n_max: int = 12):
    if family == "graph":
        return random_graph(rng, max_vertices=6, max_edges=min(12, n_max))
    n = rng.randint(1, n_max)
    if family == "uniform":
        return UniformMatroid(n, rng.randint(0, n))
    if family == "partition":
        nb = rng.randint(1, 4)
        return PartitionMatroid([rng.randrange(nb) for _ in range(n)], [rng.randint(0, 3) for _ in range(nb)])
    if family == "explicit":
        n = min(n, 8)
        return random_vector_matroid(rng, n, rng.randint(1, 4))
    raise ValueError(f"unknown family {family!r}")


def random_instance(rng: random.Random, family: str, n_max: int = 12, max_cap: int = 3, max_k: int = 4) -> RandomInstance:
    if family == "random":
        family = rng.choice(FAMILIES)
    mat = random_matroid(rng, family, n_max)
    n = mat.m if isinstance(mat, Graph) else mat.n
    u = [rng.randint(0, max_cap) for _ in range(n)]
    costs = [rng.randint(1, 5) for _ in range(n)]
    return RandomInstance(family, mat, u, rng.randint(1, max_k), costs)

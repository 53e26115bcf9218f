import random

import numpy as np
import pytest

from matroid_pr.instances import random_graph
from matroid_pr.matroid import Graph, GraphicMatroid, UniformMatroid, rank
from matroid_pr.rounding import (
    RoundingConfig,
    apx_union_value_real,
    decide_membership,
    decide_strength,
    majority,
    round_capacities,
    search_covering_number,
    search_strength,
)

K3, K4, K5 = Graph.complete(3), Graph.complete(4), Graph.complete(5)


def test_config_validation_and_count():
    with pytest.raises(ValueError):
        RoundingConfig(eps=0)
    with pytest.raises(ValueError):
        RoundingConfig(eps=0.5, c0=0)
    cfg = RoundingConfig(eps=0.5, c0=1)
    assert cfg.bases_count(1) == cfg.bases_count(3) == 5  # ln 3 / 0.25 = 4.39


def test_integral_ratios_stay_exact():
    cfg = RoundingConfig(eps=0.5, c0=1)
    kp = cfg.bases_count(3)
    ri = round_capacities([2.0, 4.0, 0.0], 2 * kp / kp, cfg)
    assert ri.u == [2 * kp // 2, 4 * kp // 2, 0]


def test_half_values_have_the_right_mean():
    cfg = RoundingConfig(eps=0.5, c0=1)
    kp = cfg.bases_count(3)
    tau = 1.0 / kp
    rng = cfg.rng(0)
    draws = [round_capacities([2.5 * tau] * 3, 1.0, cfg, rng).u for _ in range(3400)]
    flat = np.array(draws).ravel()[:10_000]
    assert set(flat) <= {2, 3}
    assert abs(flat.mean() - 2.5) <= 0.05


def test_zero_stays_zero_and_k_must_be_positive():
    cfg = RoundingConfig(eps=0.3)
    assert round_capacities([0.0] * 5, 1.0, cfg).u == [0] * 5
    with pytest.raises(ValueError):
        round_capacities([1.0], 0, cfg)


def test_rounding_is_deterministic_per_seed():
    cfg = RoundingConfig(eps=0.3, seed=5)
    u = [0.37, 1.9, 2.25]
    assert round_capacities(u, 1.3, cfg, cfg.rng(2)).u == round_capacities(u, 1.3, cfg, cfg.rng(2)).u


def test_rounding_is_unbiased():
    cfg = RoundingConfig(eps=0.5, c0=1, seed=3)
    u = np.array([0.13, 0.71, 1.37, 2.05])
    rng = cfg.rng()
    total = np.zeros(4)
    trials = 10_000
    for _ in range(trials):
        ri = round_capacities(u, 1.0, cfg, rng)
        total += np.array(ri.u) * ri.tau
    assert np.all(np.abs(total / trials - u) <= 0.02 * u)


def test_closed_set_sums_concentrate():
    rng = random.Random(61)
    g = random_graph(rng, max_vertices=7, max_edges=20)
    while g.m < 20:
        g = random_graph(rng, max_vertices=7, max_edges=20)
    o = GraphicMatroid(g)
    u = np.array([rng.uniform(1, 3) for _ in range(g.m)])
    k, eps = 2.0, 0.3
    r = g.rank()
    closed = []
    for _ in range(200):
        seed = [e for e in range(g.m) if rng.random() < 0.3]
        rk = rank(o, seed)
        closed.append(([e for e in range(g.m) if rank(o, seed + [e]) == rk], rk))
    cfg = RoundingConfig(eps=eps, seed=7)
    fails = 0
    for t in range(50):
        ri = round_capacities(u, k, cfg, cfg.rng(t))
        tu = np.array(ri.u) * ri.tau
        for S, rk in closed:
            comp = np.ones(g.m, bool)
            comp[S] = False
            exact, rounded = u[comp].sum(), tu[comp].sum()
            fails += abs(rounded - exact) > (eps / 2) * max(exact, k * (r - rk))
    assert fails < 0.05 * 200 * 50


def test_union_estimate_on_k4():
    cfg = RoundingConfig(eps=0.3, seed=11)
    hits = sum(4.2 <= apx_union_value_real(K4, [1.0] * 6, 2.0, 0.3, cfg, cfg.rng(t)).value <= 7.8
               for t in range(50))
    assert hits >= 45


def test_union_estimate_is_homogeneous():
    cfg = RoundingConfig(eps=0.3, seed=12)
    a = apx_union_value_real(K4, [1.0] * 6, 2.0, 0.3, cfg, cfg.rng(0))
    b = apx_union_value_real(K4, [2.0] * 6, 4.0, 0.3, cfg, cfg.rng(0))
    assert b.value == pytest.approx(2 * a.value)


def test_strength_decisions():
    cfg = RoundingConfig(eps=0.2, seed=13)
    at_least = sum(decide_strength(K4, [1.0] * 6, 1.5, 0.2, cfg, cfg.rng(t)).yes for t in range(20))
    at_most = sum(not decide_strength(K3, [1.0] * 3, 2.0, 0.2, cfg, cfg.rng(t)).yes for t in range(20))
    assert at_least >= 18 and at_most >= 18
    assert decide_strength(K4, [5.0] * 6, 0.5, 0.2, cfg).yes


def test_no_answer_carries_a_certificate():
    cfg = RoundingConfig(eps=0.2, seed=14)
    dec = majority(lambda rng: decide_strength(K3, [1.0] * 3, 2.0, 0.2, cfg, rng), cfg, 3)
    assert not dec.yes and dec.certificate is not None and dec.rank_S < 2


def test_membership():
    cfg = RoundingConfig(eps=0.2, seed=15)
    assert decide_membership(K3, [0.5] * 3, 0.2, cfg).yes
    assert not decide_membership(K3, [1.0] * 3, 0.2, cfg).yes
    assert decide_membership(K3, [0.0] * 3, 0.2, cfg).yes


def test_strength_search():
    cfg = RoundingConfig(eps=0.1, seed=16)
    for t in range(2):
        assert 1.8 <= search_strength(K4, [1.0] * 6, 0.1, cfg, cfg.rng(t)).estimate <= 2.2
    coarse = RoundingConfig(eps=0.2, seed=16)
    assert search_strength(K5, [1.0] * 10, 0.2, coarse).estimate == pytest.approx(2.5, rel=0.25)
    assert search_strength(Graph(2, [(0, 1)], [7.0]), [7.0], 0.1, cfg).estimate == pytest.approx(7)


def test_strength_is_zero_when_support_does_not_span():
    cfg = RoundingConfig(eps=0.2)
    g = Graph(3, [(0, 1), (1, 2), (0, 2)], [2.0, 0.0, 0.0])
    assert search_strength(g, [2.0, 0.0, 0.0], 0.2, cfg).estimate == 0
    assert search_strength(UniformMatroid(3, 2), [1.0, 0.0, 0.0], 0.2, cfg).estimate == 0


def test_strength_search_is_deterministic():
    cfg = RoundingConfig(eps=0.2, seed=17)
    a = search_strength(K4, [1.0] * 6, 0.2, cfg)
    b = search_strength(K4, [1.0] * 6, 0.2, cfg)
    assert (a.estimate, a.probes) == (b.estimate, b.probes)


def test_covering_search():
    cfg = RoundingConfig(eps=0.1, seed=18)
    assert search_covering_number(K4, [1.0] * 6, 0.1, cfg).estimate == pytest.approx(2, rel=0.12)
    assert search_covering_number(K5, [1.0] * 10, 0.1, cfg).estimate == pytest.approx(2.5, rel=0.12)
    assert search_covering_number(UniformMatroid(1, 1), [3.0], 0.1, cfg).estimate == pytest.approx(3)

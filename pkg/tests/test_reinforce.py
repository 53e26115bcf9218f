import itertools
import random

from matroid_pr import oracle_ref
from matroid_pr.instances import random_instance
from matroid_pr.matroid import Graph, GraphicMatroid, UniformMatroid
from matroid_pr.reinforce import min_cost_base, reinforce, reinforce_greedy

K3, K4 = Graph.complete(3), Graph.complete(4)


def _packs(m, u, z, k):
    return oracle_ref.pack_feasible_enum(m, [a + b for a, b in zip(u, z)], k)


def test_min_cost_base():
    assert sorted(min_cost_base(K4, [1, 0, 1, 0, 1, 0])) == [1, 3, 5]
    assert min_cost_base(K4, [1] * 6) == [0, 1, 2]
    rng = random.Random(51)
    o = GraphicMatroid(K4)
    for _ in range(10):
        c = [rng.randint(1, 9) for _ in range(6)]
        best = min(sum(c[e] for e in t) for t in itertools.combinations(range(6), 3) if o.query(list(t)))
        assert sum(c[e] for e in min_cost_base(K4, c)) == best


def test_small_graphs():
    res = reinforce(K3, [1] * 3, [1] * 3, 2)
    assert res.cost == 1 and sum(res.z) == 1
    assert reinforce(K4, [1] * 6, [1] * 6, 2).cost == 0
    assert reinforce_greedy(K3, [1] * 3, [1] * 3, 2).cost == 1


def test_one_run_readout_is_not_always_optimal():
    m, u, costs = UniformMatroid(6, 4), [1, 0, 1, 1, 1, 2], [4, 3, 1, 2, 4, 5]
    best, _ = oracle_ref.reinforce_enum(m, u, costs, 2, 2)
    one = reinforce(m, u, costs, 2)
    assert best == 3
    assert one.cost == 4 and _packs(m, u, one.z, 2)
    greedy = reinforce_greedy(m, u, costs, 2)
    assert greedy.cost == 3 and greedy.z == [0, 0, 1, 1, 0, 0]


def test_one_run_graph_counterexample():
    g = Graph(5, [(3, 3), (2, 3), (1, 4), (3, 2), (4, 0), (1, 4), (0, 1)])
    u, costs = [2, 2, 2, 0, 1, 0, 1], [5, 1, 5, 5, 2, 3, 4]
    best, _ = oracle_ref.reinforce_enum(g, u, costs, 3, 3)
    assert best == 5
    assert reinforce(g, u, costs, 3).cost == 6
    assert reinforce_greedy(g, u, costs, 3).cost == 5


def test_both_methods_feasible_and_greedy_optimal():
    rng = random.Random(52)
    done = 0
    while done < 40:
        inst = random_instance(rng, "random", n_max=7, max_cap=2, max_k=3)
        best, _ = oracle_ref.reinforce_enum(inst.matroid, inst.u, inst.costs, inst.k, 3)
        if best is None:
            continue
        one = reinforce(inst.matroid, inst.u, inst.costs, inst.k)
        greedy = reinforce_greedy(inst.matroid, inst.u, inst.costs, inst.k)
        assert _packs(inst.matroid, inst.u, one.z, inst.k) and one.cost >= best
        assert _packs(inst.matroid, inst.u, greedy.z, inst.k) and greedy.cost == best
        done += 1


def test_already_packing_costs_nothing():
    assert reinforce(UniformMatroid(4, 2), [2, 2, 2, 2], [1, 2, 3, 4], 2).z == [0] * 4

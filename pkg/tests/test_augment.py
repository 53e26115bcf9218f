import random

import pytest

from matroid_pr import oracle_ref
from matroid_pr.augment import (
    Packing,
    StaleAugmentation,
    apply,
    bfs_search,
    extract_packing,
    hybrid_eps,
    hybrid_exact_union,
    path_arc_types,
    prune_path,
    settle,
    sparsify,
)
from matroid_pr.instances import random_instance
from matroid_pr.matroid import Graph, GraphicMatroid, UniformMatroid
from matroid_pr.push_relabel import PushRelabel, _rank_of, engine_for, exact_union

K4 = Graph.complete(4)  # 01, 02, 03, 12, 13, 23


def _oracle(m):
    return GraphicMatroid(m) if isinstance(m, Graph) else m


def _k4_five_edges():
    return Packing(GraphicMatroid(K4), [1] * 6, [[0, 1, 2], [3, 4]])


def test_extract_drops_copies_from_later_bases():
    st = PushRelabel(UniformMatroid(3, 2), [1, 1, 1], 2, 1)
    p = extract_packing(st)
    assert p.sets == [[0, 1], []]


def test_height_one_extraction_can_miss_maximality():
    # the uncovered element is spanned only through a dropped copy
    st = PushRelabel(UniformMatroid(3, 1), [0, 1, 1], 1, 1).run()
    assert st.level == [0, 1, 1]
    p = extract_packing(st)
    assert p.sets == [[]] and not p.spans(0, 2)
    assert extract_packing(PushRelabel(UniformMatroid(3, 1), [0, 1, 1], 1, 2).run()).sets == [[1]]


def test_extract_gives_checked_packings():
    rng = random.Random(41)
    for _ in range(40):
        inst = random_instance(rng, "random", n_max=9)
        p = extract_packing(engine_for(inst.matroid, inst.u, inst.k, rng.randint(2, 4)).run())
        p.check()


def test_settle_restores_decreasing_order():
    p = Packing(UniformMatroid(4, 2), [1] * 4, [[0], [1, 2]])
    assert settle(p) >= 1
    p.check([])


def test_search_on_optimal_packing_is_none():
    res = exact_union(K4, [1] * 6, 2)
    p = Packing(GraphicMatroid(K4), [1] * 6, res.bases)
    assert bfs_search(p) is None


def test_direct_insertion_path():
    p = Packing(UniformMatroid(3, 2), [1, 1, 1], [[0]])
    found = bfs_search(p)
    assert found.path == [(1, 0)]
    assert path_arc_types(p, found.path) == "14"
    aug = prune_path(p, found.path)
    apply(p, aug)
    assert p.size() == 2


def test_k4_exchange_chain_reaches_six():
    p = _k4_five_edges()
    found = bfs_search(p)
    assert found is not None and oracle_ref.explicit_aux_bfs(p) is not None
    apply(p, prune_path(p, found.path))
    assert p.value() == 6
    p.check()


def test_stale_augmentation_rejected():
    p = _k4_five_edges()
    aug = prune_path(p, bfs_search(p).path)
    apply(p, aug)
    with pytest.raises(StaleAugmentation):
        apply(p, aug)


def test_augmenting_from_low_heights_reaches_optimum():
    rng = random.Random(42)
    grown = 0
    for _ in range(40):
        inst = random_instance(rng, "random", n_max=10, max_k=4)
        opt = oracle_ref.dual_enum_union(inst.matroid, inst.u, inst.k)
        p = extract_packing(engine_for(inst.matroid, inst.u, inst.k, 2).run())
        while True:
            found = bfs_search(p, check=True)
            if found is None:
                break
            size = p.size()
            apply(p, prune_path(p, found.path))
            assert p.size() == size + 1
            p.check()
            grown += 1
        assert p.value() == opt
    assert grown > 0


def test_sparsify_keeps_optimum():
    u10 = UniformMatroid(10, 2)
    p = extract_packing(engine_for(u10, [1] * 10, 1, 5).run())
    keep = sparsify(p, 2)
    assert len(keep) <= 4
    g = Graph(4, list(K4.edges) + [K4.edges[0]] * 5)
    p = extract_packing(engine_for(g, [1] * 11, 2, 5).run())
    keep = set(sparsify(p, 3))
    restricted = [1 if e in keep else 0 for e in range(11)]
    assert exact_union(g, restricted, 2).value == 6


def test_hybrid_matches_exact():
    rng = random.Random(43)
    for _ in range(50):
        inst = random_instance(rng, "random", n_max=10)
        res = hybrid_exact_union(inst.matroid, inst.u, inst.k, check=True)
        assert res.value == exact_union(inst.matroid, inst.u, inst.k).value


def test_hybrid_edge_cases():
    assert hybrid_exact_union(UniformMatroid(3, 2), [1, 1, 1], 0).value == 0
    assert hybrid_eps(0, 0, 2, 0) == 0.5
    assert 0 < hybrid_eps(40, 10, 2, 3) <= 0.5

import itertools

import numpy as np
import pytest
from hypothesis import given, settings

from finehyp.errors import MissingTruncationData
from finehyp.generators import FreeProductSpec, coned_off_ball, path, random_tree, regular_tree_ball, star
from finehyp.graph import all_pairs_distances, interval
from finehyp.partitions import (
    ClassIndex,
    class_index,
    local_determination_check,
    min_distance_points,
    sphere_partition,
)

from conftest import adj_of, connected_graphs, trees
from oracles import profile_classes, tree_classes


def _sets(classes):
    return sorted((frozenset(c.members) for c in classes), key=sorted)


def test_k_zero_and_k_n():
    g = coned_off_ball(FreeProductSpec.parse("Z2*Z3"), 3).graph
    for n in range(1, 4):
        assert len(sphere_partition(g, None, 0, n, 0)) == 1
        top = sphere_partition(g, None, 0, n, n)
        assert all(len(c) == 1 for c in top)


def test_partition_rejects_bad_k():
    with pytest.raises(ValueError):
        sphere_partition(path(4), None, 0, 1, 2)


@settings(max_examples=40, deadline=None)
@given(trees(max_n=16))
def test_tree_classes_match_oracle(g):
    adj = adj_of(g)
    x = g.n // 2
    ecc = int(all_pairs_distances(g).row(x).max())
    for n in range(ecc + 1):
        for k in range(n + 1):
            assert _sets(sphere_partition(g, None, x, n, k)) == tree_classes(adj, x, n, k)


@settings(max_examples=30, deadline=None)
@given(connected_graphs(max_n=9))
def test_profile_classes_match_oracle(g):
    adj = adj_of(g)
    ecc = int(all_pairs_distances(g).row(0).max())
    for n in range(ecc + 1):
        for k in range(n + 1):
            assert _sets(sphere_partition(g, None, 0, n, k)) == profile_classes(adj, 0, n, k)


def test_profiles_sorted_and_consistent():
    g = coned_off_ball(FreeProductSpec.parse("Z*Z"), 3).graph
    dm = all_pairs_distances(g)
    cls = sphere_partition(g, dm, 0, 3, 2)
    assert [c.profile for c in cls] == sorted(c.profile for c in cls)
    for c in cls:
        for a in c.members:
            assert tuple(int(dm[a, z]) for z in c.ball) == c.profile


def test_p3_index_counts():
    idx = class_index(path(3), None, 0, 2)
    counts = {key: len(v) for key, v in idx.classes.items() if key[0] > 0}
    assert counts == {(1, 0): 1, (1, 1): 1, (2, 0): 1, (2, 1): 1, (2, 2): 1}


def test_star_singletons():
    idx = class_index(star(6), None, 0, 1)
    assert len(idx.classes[(1, 1)]) == 6


def test_regular_tree_counts():
    sp = regular_tree_ball(3, 4)
    idx = class_index(sp.graph, None, 0, 4)
    adj = adj_of(sp.graph)
    for (n, k), cls in idx.classes.items():
        assert len(cls) == len(tree_classes(adj, 0, n, k))
        if n:
            assert len(cls) == (3 * 2 ** (k - 1) if k else 1)


def test_index_beyond_eccentricity():
    with pytest.raises(MissingTruncationData):
        ClassIndex(path(4), None, 0, 4)


def test_laminar_and_lookup():
    g = coned_off_ball(FreeProductSpec.parse("Z*Z"), 4).graph
    idx = class_index(g, None, 0, 4)
    assert idx.check_laminar() == (True, "ok")
    for n in range(5):
        sphere = np.flatnonzero(idx.dist == n)
        for k in range(n + 1):
            for a in sphere.tolist():
                assert a in idx.class_of(int(a), k)
    # any two classes on one sphere are disjoint or nested
    cls = [c for c in idx if c.n == 3]
    for c1, c2 in itertools.combinations(cls, 2):
        inter = c1.member_set & c2.member_set
        assert not inter or inter in (c1.member_set, c2.member_set)
    assert len(idx.keys) == len(idx) and idx.position[idx.keys[5]] == 5


def test_class_of_outside():
    idx = class_index(path(6), None, 0, 2)
    with pytest.raises(MissingTruncationData):
        idx.class_of(4, 0)


def test_min_distance_points():
    t = random_tree(30, 4)
    dm = all_pairs_distances(t)
    idx = class_index(t, dm, 0, int(dm.row(0).max()))
    for c in idx:
        pts = min_distance_points(c)
        if c.k == 0:
            assert pts == (0,)
        assert len(pts) == 1
        z = pts[0]
        assert dm[0, z] == c.k and all(dm[0, z] + dm[z, a] == c.n for a in c.members)
    g = coned_off_ball(FreeProductSpec.parse("Z*Z"), 3).graph
    dm = all_pairs_distances(g)
    for c in class_index(g, dm, 0, 3):
        ball = [z for z in range(g.n) if dm[0, z] <= c.k]
        for a in c.members:
            assert {z for z in ball if dm[a, z] == c.n - c.k} == set(min_distance_points(c))


def test_local_determination_tree():
    t = random_tree(35, 8)
    dm = all_pairs_distances(t)
    for n in range(1, 5):
        for k in range(0, n + 1):
            assert local_determination_check(t, dm, 0, n, k, 0) == (True, None)


@pytest.mark.parametrize("variant", ["ball", "cone"])
def test_local_determination_coned_off(variant):
    g = coned_off_ball(FreeProductSpec.parse("Z*Z"), 4).graph
    dm = all_pairs_distances(g)
    idx = class_index(g, dm, 0, 4)
    for n in range(1, 5):
        for k in range(1, n + 1):
            assert local_determination_check(g, dm, 0, n, k, 1, variant, idx) == (True, None)


def test_local_determination_detects_failure():
    # 3 hangs off 1 only while 4 sees both 1 and 2: with radius 0 the
    # witness set around z=1 is {1}, which cannot tell them apart
    from finehyp.graph import build_graph

    g = build_graph([(0, 1), (0, 2), (1, 3), (1, 4), (2, 4)])
    assert local_determination_check(g, None, 0, 2, 1, 0) == (False, (3, 4, 1))
    assert local_determination_check(g, None, 0, 2, 1, 1) == (True, None)
    with pytest.raises(ValueError):
        local_determination_check(g, None, 0, 2, 1, 0, variant="nope")


def test_interval_sizes_bounded_by_distance():
    g = coned_off_ball(FreeProductSpec.parse("Z*Z"), 4).graph
    dm = all_pairs_distances(g)
    worst = {}
    for x in range(0, g.n, 7):
        for y in range(g.n):
            d = int(dm[x, y])
            worst[d] = max(worst.get(d, 0), len(interval(g, x, y, dm)))
    # coned-off free products: every interval is a chain of cosets
    assert all(worst[d] <= 3 * d + 1 for d in worst)

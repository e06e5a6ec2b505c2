from fractions import Fraction

import pytest
from hypothesis import given, settings

from finehyp.errors import BudgetExceeded, DisconnectedGraph, DuplicateEdge, SelfLoop
from finehyp.generators import cycle, path, random_tree
from finehyp.graph import (
    DistanceMatrix,
    all_geodesics,
    all_pairs_distances,
    build_graph,
    corner_points,
    graph_from_edge_list,
    graph_from_json,
    graph_to_edge_list,
    graph_to_json,
    gromov_product,
    hyperbolicity_delta,
    hyperbolicity_delta_direct,
    interval,
    quasi_center,
    quasi_center_radius,
    read_graph,
    some_geodesic,
    working_delta,
    write_graph,
)

from conftest import adj_of, connected_graphs, petersen, trees
from oracles import all_dist, delta_brute, geodesics


def test_build_path_and_triangle():
    p3 = build_graph([(0, 1), (1, 2)])
    assert (p3.n, p3.m) == (3, 2)
    c3 = build_graph([(0, 1), (1, 2), (2, 0)])
    assert c3.edges == ((0, 1), (0, 2), (1, 2))


def test_build_errors():
    with pytest.raises(DisconnectedGraph):
        build_graph([(0, 1), (2, 3)])
    with pytest.raises(SelfLoop):
        build_graph([(0, 0)])
    with pytest.raises(DuplicateEdge):
        build_graph([(0, 1), (1, 0)])
    with pytest.raises(DisconnectedGraph):
        build_graph([])


def test_ids_are_compacted():
    g = build_graph([(10, 30), (30, 20)], labels={10: "a", 20: "b"})
    assert g.n == 3 and g.edges == ((0, 2), (1, 2))
    assert g.label(0) == "a" and g.label(1) == "b" and g.label(2) == "2"


def test_small_distances():
    assert all_pairs_distances(build_graph([(0, 1), (1, 2)]))[0, 2] == 2
    assert all_pairs_distances(cycle(5))[0, 3] == 2


def test_lazy_rows_match_dense():
    g = random_tree(40, 3)
    dense, lazy = DistanceMatrix(g), DistanceMatrix(g, cap=10)
    assert dense.is_dense and not lazy.is_dense
    for u in range(g.n):
        assert (dense.row(u) == lazy.row(u)).all()
    assert lazy.eccentricity(0) == dense.eccentricity(0)


def test_intervals():
    assert interval(path(3), 0, 2) == {0, 1, 2}
    assert interval(cycle(4), 0, 2) == {0, 1, 2, 3}
    g = random_tree(25, 1)
    assert set(interval(g, 3, 17)) == set(some_geodesic(g, 3, 17))


def test_geodesic_counts():
    assert len(all_geodesics(cycle(4), 0, 2)) == 2
    assert all_geodesics(cycle(4), 1, 1) == [(1,)]
    assert len(all_geodesics(random_tree(20, 5), 0, 13)) == 1


def test_some_geodesic_takes_smallest_neighbour():
    assert some_geodesic(cycle(4), 0, 2) == (0, 1, 2)
    assert some_geodesic(cycle(6), 0, 3) == (0, 1, 2, 3)


def test_gromov_products():
    tripod = build_graph([(0, 1), (1, 2), (0, 3), (3, 4), (0, 5), (5, 6)])
    dm = all_pairs_distances(tripod)
    assert gromov_product(dm, 2, 4, 0) == 0
    assert gromov_product(dm, 4, 6, 2) == 2
    assert gromov_product(dm, 3, 3, 6) == dm[3, 6]
    assert gromov_product(all_pairs_distances(path(3)), 0, 2, 1) == 0
    c5 = all_pairs_distances(cycle(5))
    assert gromov_product(c5, 1, 4, 0) == 0
    assert gromov_product(c5, 1, 3, 0) == Fraction(1, 2)


@settings(max_examples=40, deadline=None)
@given(connected_graphs())
def test_interval_is_union_of_geodesics(g):
    adj = adj_of(g)
    for x in range(g.n):
        for y in range(g.n):
            verts = {v for p in geodesics(adj, x, y) for v in p}
            assert interval(g, x, y) == verts


@settings(max_examples=40, deadline=None)
@given(connected_graphs())
def test_gromov_symmetric_nonnegative(g):
    dm = all_pairs_distances(g)
    for x in range(g.n):
        for y in range(g.n):
            for z in range(g.n):
                p = gromov_product(dm, x, y, z)
                assert p >= 0 and p == gromov_product(dm, y, x, z)


def test_delta_examples(c6):
    assert hyperbolicity_delta(build_graph([(0, 1)])).delta == 0
    est = hyperbolicity_delta(c6)
    assert est.delta == 1  # triple-enumeration oracle
    x, y, z, m = est.witness
    d = all_pairs_distances(c6)
    other = interval(c6, x, z) | interval(c6, y, z)
    assert m in interval(c6, x, y) and min(d[m, o] for o in other) == 1


@settings(max_examples=30, deadline=None)
@given(trees())
def test_delta_trees_zero(g):
    assert hyperbolicity_delta(g).delta == 0


@settings(max_examples=40, deadline=None)
@given(connected_graphs(max_n=8))
def test_delta_matches_brute_force(g):
    assert hyperbolicity_delta(g).delta == delta_brute(adj_of(g))


@settings(max_examples=25, deadline=None)
@given(connected_graphs(max_n=10, extra=10))
def test_delta_blocks_match_direct(g):
    assert hyperbolicity_delta(g).delta == hyperbolicity_delta_direct(g).delta


def test_delta_round_trip():
    g = petersen()
    dm = all_pairs_distances(g)
    delta = hyperbolicity_delta(g).delta
    for x in range(g.n):
        for y in range(g.n):
            for z in range(g.n):
                other = interval(g, x, z, dm) | interval(g, y, z, dm)
                for m in interval(g, x, y, dm):
                    assert min(dm[m, o] for o in other) <= delta


def test_delta_budget():
    with pytest.raises(BudgetExceeded):
        hyperbolicity_delta(cycle(12), block_cap=10)


def test_working_delta():
    assert working_delta(path(4), 0) == 1
    assert working_delta(cycle(8), 2) == 2


def test_quasi_center_tripod():
    tripod = build_graph([(0, 1), (1, 2), (0, 3), (3, 4), (0, 5), (5, 6)])
    dm = all_pairs_distances(tripod)
    tri = (some_geodesic(tripod, 2, 4), some_geodesic(tripod, 2, 6), some_geodesic(tripod, 4, 6))
    assert corner_points(dm, tri) == (0, 0, 0)
    assert quasi_center(tripod, dm, tri) == 0
    assert quasi_center_radius(dm, tri) == (0, 0)


def test_quasi_center_degenerate():
    g = cycle(5)
    assert quasi_center(g, None, ((3,), (3,), (3,))) == 3


def test_quasi_center_c6(c6):
    dm = all_pairs_distances(c6)
    tri = (some_geodesic(c6, 0, 2), some_geodesic(c6, 0, 4), some_geodesic(c6, 2, 4))
    # corner points 5, 3, 1; vertex enumeration gives radius 2 at vertex 1
    assert corner_points(dm, tri) == (5, 3, 1)
    assert quasi_center_radius(dm, tri) == (1, 2)
    d = all_dist(adj_of(c6))
    assert min(max(d[5][t], d[3][t], d[1][t]) for t in range(6)) == 2


def test_json_round_trip(tmp_path):
    g = build_graph([(0, 1), (1, 2), (2, 0), (2, 3)], labels={0: "e"}, kinds={0: "group"})
    text = graph_to_json(g)
    assert text.endswith("\n") and "\r" not in text
    assert graph_to_json(graph_from_json(text)) == text
    f = tmp_path / "g.json"
    write_graph(g, str(f))
    assert f.read_bytes() == text.encode()
    assert read_graph(str(f)).edges == g.edges


def test_edge_list_round_trip(tmp_path):
    g = random_tree(15, 2)
    text = graph_to_edge_list(g)
    assert graph_to_edge_list(graph_from_edge_list(text)) == text
    f = tmp_path / "g.txt"
    write_graph(g, str(f))
    assert f.read_text() == text
    assert graph_from_edge_list("# comment\n0 1\n\n1 2\n").m == 2

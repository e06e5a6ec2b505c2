import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from finehyp.errors import (
    IncompleteCover,
    MissingTruncationData,
    NotATree,
    SupportOutsideDomain,
    SupportOutsideIndex,
)
from finehyp.generators import FreeProductSpec, coned_off_ball, cycle, left_translation, path, random_tree
from finehyp.graph import all_pairs_distances
from finehyp.hilbert import (
    BASEL,
    FinSuppFunction,
    GrowthBound,
    SignedDecomposition,
    TriangleCache,
    basepoint_matrix,
    check_decomposition,
    cocycle_norm_sq,
    decompose_all,
    decompose_class_general,
    decompose_class_tree,
    h_norm_sq,
    measure_K,
    operator_norm,
    phi,
    pi_apply,
    pi_operator_norm,
    theta,
    theta_matrix,
    tree_bound,
)
from finehyp.partitions import ClassIndex, class_index

from conftest import adj_of, connected_graphs, trees
from oracles import h_norm_sq as oracle_norm


def _full_index(g, x):
    dm = all_pairs_distances(g)
    return class_index(g, dm, x, int(dm.row(x).max()))


@settings(max_examples=30, deadline=None)
@given(connected_graphs(max_n=8), st.data())
def test_norm_matches_oracle(g, data):
    idx = _full_index(g, 0)
    vals = data.draw(st.lists(st.integers(-4, 4), min_size=g.n, max_size=g.n))
    f = {v: c for v, c in enumerate(vals) if c}
    assert h_norm_sq(idx, f) == oracle_norm(adj_of(g), 0, f)


@settings(max_examples=30, deadline=None)
@given(trees(max_n=12))
def test_dirac_norms(g):
    idx = _full_index(g, 0)
    for a in range(g.n):
        n = int(idx.dist[a])
        assert h_norm_sq(idx, FinSuppFunction.delta(a)) == (n + 1) ** 3


def test_theta_matrix_is_theta():
    g = coned_off_ball(FreeProductSpec.parse("Z*Z3"), 3).graph
    idx = _full_index(g, 0)
    m = theta_matrix(idx)
    cols = np.flatnonzero(idx.dist <= idx.max_n)
    rng = np.random.default_rng(3)
    for _ in range(20):
        vec = rng.standard_normal(len(cols))
        f = dict(zip(cols.tolist(), vec.tolist()))
        th = theta(idx, f)
        dense = m @ vec
        for key, val in th.items():
            assert math.isclose(dense[idx.position[key]], val, rel_tol=1e-9, abs_tol=1e-9)
        assert math.isclose(float(dense @ dense), h_norm_sq(idx, f), rel_tol=1e-9)


def test_theta_exact_fractions():
    idx = _full_index(path(5), 0)
    f = {1: Fraction(1, 3), 4: Fraction(-2, 7)}
    assert theta(idx, f)[(4, 0, 0)] == 5 * Fraction(-2, 7)
    assert h_norm_sq(idx, f) == 2 * 4 * Fraction(1, 9) + 5 * 25 * Fraction(4, 49)


def test_theta_rejects_outside_support():
    idx = class_index(path(6), None, 0, 2)
    with pytest.raises(SupportOutsideIndex):
        theta(idx, {5: 1})
    with pytest.raises(SupportOutsideIndex):
        theta_matrix(idx, [5])


def test_phi_bound_constant():
    assert math.isclose(BASEL, sum(1 / (n + 1) ** 2 for n in range(10**6)), rel_tol=1e-5)
    # on a path each sphere carries n + 1 singleton classes
    idx = _full_index(path(40), 0)
    f = {n: Fraction(1, (n + 1) ** 2) for n in range(40)}
    assert h_norm_sq(idx, f) == sum((n + 1) ** 3 * f[n] ** 2 for n in range(40))
    assert phi(f) ** 2 / h_norm_sq(idx, f) < BASEL


def test_fin_supp_algebra():
    f = FinSuppFunction({1: 2, 3: 0}) + FinSuppFunction.delta(1).scale(-2)
    assert f == {} and FinSuppFunction({4: 1, 2: 5}).support == [2, 4]
    assert FinSuppFunction({1: 1}) - FinSuppFunction({2: 1}) == {1: 1, 2: -1}


def _tree_case(seed):
    rng = np.random.default_rng(seed)
    g = random_tree(int(rng.integers(8, 30)), seed)
    dm = all_pairs_distances(g)
    x = int(rng.integers(g.n))
    xp = int(rng.integers(g.n))
    ix = class_index(g, dm, x, int(dm.row(x).max()))
    ip = class_index(g, dm, xp, int(dm.row(xp).max()))
    return g, dm, x, xp, ix, ip


@pytest.mark.parametrize("seed", range(12))
def test_tree_decomposition_exact(seed):
    g, dm, x, xp, ix, ip = _tree_case(seed)
    d = int(dm[x, xp])
    decs = decompose_all(g, dm, 1, ix, ip, tree=True)
    assert all(check_decomposition(dec).ok for dec in decs)
    A = basepoint_matrix(ix, ip, decs)
    f = {v: Fraction(int(v) % 5 - 2, 1 + v % 3) for v in range(g.n)}
    assert A.apply_exact(theta(ip, f)) == theta(ix, f)
    assert A.row_support() <= 2 * d + 2 and A.column_support() <= 2 * d + 3
    assert operator_norm(A.to_scipy()) <= tree_bound(d) * (1 + 1e-9)


@pytest.mark.parametrize("seed", range(6))
def test_general_agrees_with_tree(seed):
    g, dm, x, xp, ix, ip = _tree_case(seed)
    cache = TriangleCache(g, dm, 1, x, xp)
    for c in ix:
        a = decompose_class_tree(g, x, xp, c, ip)
        b = decompose_class_general(g, dm, 1, ix, ip, c, cache)
        assert a.indicator() == b.indicator() == {v: 1 for v in c.members}


def test_tree_decomposition_needs_tree():
    g = cycle(5)
    ix = _full_index(g, 0)
    with pytest.raises(NotATree):
        decompose_class_tree(g, 0, 1, next(iter(ix)), _full_index(g, 1))


def test_general_decomposition_coned_off():
    sp = coned_off_ball(FreeProductSpec.parse("Z2*Z3"), 4)
    g, dm = sp.graph, all_pairs_distances(sp.graph)
    ix = ClassIndex(g, dm, sp.base, 2)
    for xp in sp.group_vertices[1:6]:
        d = int(dm[sp.base, xp])
        ip = ClassIndex(g, dm, xp, min(2 + d, int(dm.row(xp).max())))
        decs = decompose_all(g, dm, 1, ix, ip)
        A = basepoint_matrix(ix, ip, decs)
        f = {int(v): Fraction(int(v) % 7 - 3) for v in np.flatnonzero(dm.row(sp.base) <= 2)}
        assert A.apply_exact(theta(ip, f)) == theta(ix, f)


def test_decomposition_checks_flag_errors():
    g = path(5)
    ix, ip = _full_index(g, 0), _full_index(g, 1)
    c = ix.class_of(3, 0)
    other = ip.class_of(4, 0)
    bad = SignedDecomposition(c, 1, [other], [], [])
    chk = check_decomposition(bad)
    assert not chk.identity and not chk.ok
    wrong_depth = SignedDecomposition(c, 1, [ip.class_of(3, 0)], [ip.class_of(3, 2)], [0])
    assert not check_decomposition(wrong_depth).negatives_one_deeper


def test_incomplete_cover():
    g = path(4)
    ix, ip = _full_index(g, 0), _full_index(g, 1)
    with pytest.raises(IncompleteCover):
        basepoint_matrix(ix, ip, [])


def test_missing_truncation():
    g = path(8)
    ix = class_index(g, None, 3, 3)
    ip = class_index(g, None, 0, 2)
    c = ix.class_of(6, 3)
    with pytest.raises(MissingTruncationData):
        decompose_class_general(g, None, 1, ix, ip, c)


def test_operator_norm_matches_svd():
    rng = np.random.default_rng(0)
    for shape in ((5, 5), (7, 3), (2, 9)):
        m = rng.standard_normal(shape)
        assert math.isclose(operator_norm(m), np.linalg.svd(m, compute_uv=False)[0], rel_tol=1e-6)
    assert operator_norm(np.zeros((0, 3))) == 0.0


def test_basepoint_csv():
    g = path(4)
    ix, ip = _full_index(g, 0), _full_index(g, 1)
    A = basepoint_matrix(ix, ip, decompose_all(g, None, 1, ix, ip, tree=True))
    text = A.to_csv()
    assert text.startswith("row,col,value\n") and text.endswith("\n")
    assert len(text.splitlines()) == len(A.entries) + 1


def test_translation_and_cocycle():
    sp = coned_off_ball(FreeProductSpec.parse("Z*Z"), 4)
    g, dm = sp.graph, all_pairs_distances(sp.graph)
    idx = ClassIndex(g, dm, sp.base, 4)
    act = left_translation(None, "a", sp)
    f = pi_apply(act, {sp.base: 2})
    assert f == {act.mapping[sp.base]: 2}
    # delta_e and delta_{a.e} share only the k = 0 class of radius 0 and 1
    assert cocycle_norm_sq(idx, act) == 1 + 8 == (1 + 1) ** 2 + 5
    nrm = pi_operator_norm(idx, act, R_dom=2)
    K = measure_K(g, 1, [idx]).K
    assert 1 <= nrm <= GrowthBound("general", K)(1)
    with pytest.raises(SupportOutsideDomain):
        pi_operator_norm(idx, act, R_dom=10)
    with pytest.raises(SupportOutsideDomain):
        pi_apply(act, {sp.graph.n - 1: 1} if sp.graph.n - 1 not in act.mapping else {-1: 1})


def test_identity_translation_is_isometry():
    sp = coned_off_ball(FreeProductSpec.parse("Z2*Z3"), 4)
    idx = ClassIndex(sp.graph, None, sp.base, 4)
    act = left_translation(None, "e", sp)
    assert math.isclose(pi_operator_norm(idx, act), 1.0, rel_tol=1e-8)


def test_measure_K_tree():
    k = measure_K(random_tree(20, 1), 1, [_full_index(random_tree(20, 1), 0)])
    # cones in a tree are single edges: two vertices plus one edge
    assert k.cone_size == 3 and k.theta == 224 and k.L >= 1

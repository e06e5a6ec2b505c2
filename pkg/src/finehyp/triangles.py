"""Tilde points and the normal form of geodesic triangles."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import ConstructionFailed
from .fine import angle_oracle, angle_vertices_gt
from .graph import (
    DistanceMatrix,
    Graph,
    all_pairs_distances,
    corner_points,
    quasi_center_radius,
    some_geodesic,
)

TILDE_FACTOR = 50
MIDDLE_FACTOR = 100


def on_every_geodesic(g: Graph, dm: DistanceMatrix | None, v: int, x: int, y: int) -> bool:
    """Whether every geodesic from x to y passes through v.

    A geodesic meets each distance level of I(x, y) exactly once, and every
    vertex of I(x, y) lies on some geodesic, so v is unavoidable iff it is
    the only vertex of I(x, y) on its level.
    """
    dm = all_pairs_distances(g) if dm is None else dm
    rx, ry = dm.row(x), dm.row(y)
    inter = rx + ry == rx[y]
    if not inter[v]:
        return False
    return int(np.count_nonzero(inter & (rx == rx[v]))) == 1


def unavoidable(dm: DistanceMatrix, x: int, y: int) -> np.ndarray:
    """Boolean mask of the vertices lying on every geodesic x-y."""
    rx, ry = dm.row(x), dm.row(y)
    inter = rx + ry == rx[y]
    levels = np.bincount(rx[inter], minlength=int(rx[y]) + 1)
    mask = inter.copy()
    mask[inter] = levels[rx[inter]] == 1
    return mask


@dataclass(frozen=True)
class TildePoint:
    base: int
    others: tuple[int, int]
    point: int
    distance_from_base: int


def tilde_point(
    g: Graph,
    dm: DistanceMatrix | None,
    delta: int,
    a: int,
    b: int,
    c: int,
    factor: int = TILDE_FACTOR,
) -> TildePoint:
    """Furthest vertex from a that lies on every geodesic a-b and a-c with
    both angles there above ``factor * delta``; a itself if there is none."""
    dm = all_pairs_distances(g) if dm is None else dm
    theta = factor * delta
    mask = unavoidable(dm, a, b) & unavoidable(dm, a, c)
    mask[a] = False
    ra = dm.row(a)
    best, best_d, tie = a, 0, False
    for v in np.flatnonzero(mask)[np.argsort(-ra[mask], kind="stable")]:
        v = int(v)
        dv = int(ra[v])
        if dv < best_d:
            break
        if angle_vertices_gt(g, dm, v, a, b, theta) and angle_vertices_gt(g, dm, v, a, c, theta):
            if best != a and dv == best_d:
                tie = True
            best, best_d = v, dv
    if tie:
        raise ConstructionFailed(f"two tilde candidates at distance {best_d} from {a}")
    return TildePoint(a, (b, c), best, best_d)


@dataclass(frozen=True)
class NormalTriangle:
    corners: tuple[int, int, int]
    sides: tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]
    tildes: tuple[int, int, int]
    corner_products: tuple[int, int, int]

    @property
    def ab(self) -> tuple[int, ...]:
        return self.sides[0]

    @property
    def ac(self) -> tuple[int, ...]:
        return self.sides[1]

    @property
    def bc(self) -> tuple[int, ...]:
        return self.sides[2]

    def to_json(self) -> dict:
        return {
            "corners": list(self.corners),
            "sides": [list(s) for s in self.sides],
            "tildes": list(self.tildes),
            "corner_products": list(self.corner_products),
        }


@dataclass(frozen=True)
class TriangleCheck:
    shared_a: bool
    shared_b: bool
    shared_c: bool
    middle_angles: bool
    geodesic_sides: bool = True
    tilde_order: bool = True
    witness: dict = field(default_factory=dict, compare=False)

    @property
    def ok(self) -> bool:
        return (
            self.shared_a and self.shared_b and self.shared_c
            and self.middle_angles and self.geodesic_sides and self.tilde_order
        )


def _join(*parts: tuple[int, ...]) -> tuple[int, ...]:
    out = list(parts[0])
    for p in parts[1:]:
        out.extend(p[1:])
    return tuple(out)


def normal_triangle(
    g: Graph,
    dm: DistanceMatrix | None,
    delta: int,
    a: int,
    b: int,
    c: int,
    verify: bool = True,
) -> NormalTriangle:
    """Geodesic triangle whose sides branch only at the tilde points."""
    dm = all_pairs_distances(g) if dm is None else dm
    ta = tilde_point(g, dm, delta, a, b, c).point
    tb = tilde_point(g, dm, delta, b, a, c).point
    tc = tilde_point(g, dm, delta, c, a, b).point
    head = some_geodesic(g, a, ta, dm)
    tail_b = some_geodesic(g, tb, b, dm)
    tail_c = some_geodesic(g, tc, c, dm)
    ab = _join(head, some_geodesic(g, ta, tb, dm), tail_b)
    ac = _join(head, some_geodesic(g, ta, tc, dm), tail_c)
    bc = _join(tail_b[::-1], some_geodesic(g, tb, tc, dm), tail_c)
    tri = NormalTriangle((a, b, c), (ab, ac, bc), (ta, tb, tc), corner_points(dm, (ab, ac, bc)))
    if verify:
        rep = check_normal_triangle(g, dm, delta, tri)
        if not rep.ok:
            raise ConstructionFailed(f"triangle {a, b, c} fails its checks: {rep}")
    return tri


def _is_geodesic(g: Graph, dm: DistanceMatrix, path: tuple[int, ...]) -> bool:
    if dm[path[0], path[-1]] != len(path) - 1:
        return False
    return all(g.has_edge(path[i], path[i + 1]) for i in range(len(path) - 1))


def _shared(p: tuple[int, ...], q: tuple[int, ...], t: int, dm: DistanceMatrix) -> bool:
    k = dm[p[0], t]
    return k < len(p) and k < len(q) and p[k] == t and p[: k + 1] == q[: k + 1]


def check_normal_triangle(
    g: Graph, dm: DistanceMatrix | None, delta: int, t: NormalTriangle,
    factor: int = MIDDLE_FACTOR,
) -> TriangleCheck:
    """Independent check of the normal-form properties of ``t``."""
    dm = all_pairs_distances(g) if dm is None else dm
    a, b, c = t.corners
    ta, tb, tc = t.tildes
    ab, ac, bc = t.sides
    geo = (
        ab[0] == a and ab[-1] == b and ac[0] == a and ac[-1] == c
        and bc[0] == b and bc[-1] == c
        and all(_is_geodesic(g, dm, s) for s in t.sides)
    )
    if not geo:
        return TriangleCheck(False, False, False, False, False, False, {"reason": "sides"})
    order = all(
        dm[side[0], s] <= dm[side[0], e]
        and side[dm[side[0], s]] == s and side[dm[side[0], e]] == e
        for side, s, e in ((ab, ta, tb), (ac, ta, tc), (bc, tb, tc))
    )
    if not order:
        return TriangleCheck(True, True, True, True, True, False, {"reason": "tilde order"})
    sa = _shared(ab, ac, ta, dm)
    sb = _shared(ab[::-1], bc, tb, dm)
    sc = _shared(ac[::-1], bc[::-1], tc, dm)
    oracle = angle_oracle(g)
    theta = factor * delta
    witness: dict = {}
    mid_ok = True
    for side, s, e in ((ab, ta, tb), (ac, ta, tc), (bc, tb, tc)):
        i0, i1 = dm[side[0], s], dm[side[0], e]
        if side[min(i0, len(side) - 1)] != s or side[min(i1, len(side) - 1)] != e:
            mid_ok = False
            witness = {"reason": "tilde off side", "side": [side[0], side[-1]]}
            break
        for i in range(i0 + 1, i1):
            ang = oracle.between(side[i], side[i - 1], side[i + 1])
            if ang > theta:
                mid_ok = False
                witness = {"vertex": side[i], "angle": ang}
                break
        if not mid_ok:
            break
    return TriangleCheck(sa, sb, sc, mid_ok, True, True, witness)


def tilde_order_ok(dm: DistanceMatrix, t: NormalTriangle) -> bool:
    """a, ã, c̃, c appear in this order along [a, c] (and likewise for the
    other two sides)."""
    a, b, c = t.corners
    ta, tb, tc = t.tildes
    return (
        dm[a, ta] <= dm[a, tc] and dm[a, ta] <= dm[a, tb]
        and dm[b, tb] <= dm[b, tc]
    )


def triangle_quasi_center(dm: DistanceMatrix, t: NormalTriangle) -> tuple[int, int]:
    """(vertex, radius) minimising the largest distance to u, v, w."""
    return quasi_center_radius(dm, t.sides)


@dataclass(frozen=True)
class TriangleSweep:
    """Outcome of building and checking the normal triangle of every triple."""

    triples: int
    not_geodesic: int
    shared_a: int
    shared_b: int
    shared_c: int
    middle_angles: int
    max_quasi_center: int
    failure_witness: tuple[int, int, int] | None
    quasi_center_witness: tuple[int, int, int] | None

    @property
    def failures(self) -> int:
        return self.not_geodesic + self.shared_a + self.shared_b + self.shared_c + self.middle_angles


def chain_table(g: Graph, delta: int, factor: int = TILDE_FACTOR) -> np.ndarray:
    """``CH[a, b, l]``: the vertex at distance l from a on every geodesic a-b
    with a large angle between a and b there (-1 if none).  The tilde point
    of (a, b, c) is the furthest common entry of ``CH[a, b]`` and ``CH[a, c]``."""
    o = angle_oracle(g)
    return kernels.chain_table(*g.csr, all_pairs_distances(g).d, o.off, o.data, factor * delta)


def sweep_normal_triangles(
    g: Graph, delta: int, ordered: bool = False,
    tilde_factor: int = TILDE_FACTOR, middle_factor: int = MIDDLE_FACTOR,
) -> TriangleSweep:
    """Normal-form checks over all triples a <= b <= c (all orderings with
    ``ordered``), with the largest quasi-center radius met."""
    d = all_pairs_distances(g).d
    o = angle_oracle(g)
    nh = kernels.next_hop(*g.csr, d)
    ch = chain_table(g, delta, tilde_factor)
    count, fails, qc, fw, qw = kernels.triangle_sweep(
        *g.csr, d, nh, ch, o.off, o.data, middle_factor * delta, ordered
    )
    return TriangleSweep(
        int(count), *(int(f) for f in fails), int(qc),
        None if fw[0] < 0 else tuple(int(x) for x in fw),
        None if qw[0] < 0 else tuple(int(x) for x in qw),
    )

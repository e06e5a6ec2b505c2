"""Angles at vertices, cones around edges, and fineness audits."""
from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import kernels
from .errors import BudgetExceeded, VertexNotOnEdges
from .graph import DistanceMatrix, Graph, all_pairs_distances

INFINITE = math.inf

Edge = tuple[int, int]


def edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


class AngleOracle:
    """Every angle of ``g`` between edge pairs at a common vertex, precomputed.

    One BFS per (vertex, neighbour) pair in the graph with that vertex removed.
    """

    def __init__(self, g: Graph):
        self.g = g
        self.off, self.data = kernels.angle_table(*g.csr)
        self._pos = [{w: i for i, w in enumerate(nb)} for nb in g.adjacency]

    def block(self, v: int) -> np.ndarray:
        """deg(v) x deg(v) matrix of angles at v (``kernels.INF`` when infinite)."""
        k = self.g.degree(v)
        return self.data[self.off[v]: self.off[v] + k * k].reshape(k, k)

    def between(self, v: int, w1: int, w2: int) -> int | float:
        k = self.g.degree(v)
        pos = self._pos[v]
        val = int(self.data[self.off[v] + pos[w1] * k + pos[w2]])
        return INFINITE if val >= kernels.INF else val

    def index(self, v: int, w: int) -> int:
        return self._pos[v][w]


_ORACLES: dict[int, AngleOracle] = {}


def angle_oracle(g: Graph) -> AngleOracle:
    """Cached oracle for ``g`` (keyed on identity; graphs are immutable)."""
    o = _ORACLES.get(id(g))
    if o is None or o.g is not g:
        o = AngleOracle(g)
        _ORACLES[id(g)] = o
    return o


def angle_edges(
    g: Graph, dm: DistanceMatrix | None, v: int, e1: Edge, e2: Edge
) -> int | float:
    """Angle at v between two edges through v; ``INFINITE`` when the far
    endpoints are disconnected once v is removed."""
    if v not in e1 or v not in e2:
        raise VertexNotOnEdges(f"{v} is not on both {e1} and {e2}")
    w1 = e1[1] if e1[0] == v else e1[0]
    w2 = e2[1] if e2[0] == v else e2[0]
    if not g.has_edge(v, w1) or not g.has_edge(v, w2):
        raise VertexNotOnEdges(f"{e1} or {e2} is not an edge")
    return angle_oracle(g).between(v, w1, w2)


def steps_toward(g: Graph, dm: DistanceMatrix, v: int, a: int) -> np.ndarray:
    """Positions (in v's neighbour list) of neighbours one step closer to a."""
    nb = np.asarray(g.adjacency[v])
    ra = dm.row(a)
    return np.flatnonzero(ra[nb] == ra[v] - 1)


def angle_vertices_gt(
    g: Graph, dm: DistanceMatrix | None, v: int, a: int, b: int, theta: float
) -> bool:
    """Whether some pair of first edges of geodesics v->a and v->b makes an
    angle larger than theta at v.

    If v coincides with a or b there is no first edge; this is read as an
    infinite angle, so the answer is True.
    """
    if v == a or v == b:
        return True
    dm = all_pairs_distances(g) if dm is None else dm
    blk = angle_oracle(g).block(v)
    i = steps_toward(g, dm, v, a)
    j = steps_toward(g, dm, v, b)
    return bool((blk[np.ix_(i, j)] > theta).any())


def max_angle_vertices(g: Graph, dm: DistanceMatrix | None, v: int, a: int, b: int) -> int | float:
    """Largest angle over first-edge pairs of geodesics v->a, v->b
    (``INFINITE`` when v is a or b, as in :func:`angle_vertices_gt`)."""
    if v == a or v == b:
        return INFINITE
    dm = all_pairs_distances(g) if dm is None else dm
    blk = angle_oracle(g).block(v)
    m = int(blk[np.ix_(steps_toward(g, dm, v, a), steps_toward(g, dm, v, b))].max())
    return INFINITE if m >= kernels.INF else m


@dataclass(frozen=True)
class Cone:
    anchor: Edge
    theta: int
    edges: frozenset[Edge]
    vertices: frozenset[int]

    def __len__(self) -> int:
        return len(self.edges) + len(self.vertices)

    def to_json(self) -> dict:
        return {
            "anchor": list(self.anchor),
            "theta": self.theta,
            "edges": [list(e) for e in sorted(self.edges)],
            "vertices": sorted(self.vertices),
        }


def cone(g: Graph, dm: DistanceMatrix | None, e: Edge, theta: int) -> Cone:
    """Edges reachable from e by chains of at most theta steps, consecutive
    edges sharing a vertex at which their angle is at most theta, together
    with the endpoints of those edges."""
    e = edge(*e)
    if not g.has_edge(*e):
        raise VertexNotOnEdges(f"{e} is not an edge")
    oracle = angle_oracle(g)
    depth = {e: 0}
    queue = deque([e])
    while queue:
        cur = queue.popleft()
        dcur = depth[cur]
        if dcur >= theta:
            continue
        for v, w in (cur, cur[::-1]):
            row = oracle.block(v)[oracle.index(v, w)]
            nb = g.adjacency[v]
            for j in np.flatnonzero(row <= theta):
                nxt = edge(v, nb[j])
                if nxt not in depth:
                    depth[nxt] = dcur + 1
                    queue.append(nxt)
    verts = frozenset(x for f in depth for x in f)
    return Cone(e, theta, frozenset(depth), verts)


def count_simple_loops_through(g: Graph, e: Edge, L: int, budget: int = 10_000_000) -> int:
    """Number of simple cycles of length at most L that contain e.

    Each such cycle is the edge e closed up by a unique simple path between
    its endpoints, so counting those paths counts unoriented cycles once.
    """
    if L < 3:
        return 0
    u, v = edge(*e)
    if not g.has_edge(u, v):
        raise VertexNotOnEdges(f"{e} is not an edge")
    dm = all_pairs_distances(g)
    count, _ = kernels.count_cycle_paths(*g.csr, dm.d, u, v, L - 1, budget)
    if count < 0:
        raise BudgetExceeded(f"loop enumeration through {e} exceeded {budget} expansions")
    return int(count)


@dataclass(frozen=True)
class FinenessReport:
    L: int
    per_edge_loop_counts: dict[Edge, int]
    phi_of_L: int

    def to_json(self) -> dict:
        return {
            "L": self.L,
            "phi_of_L": self.phi_of_L,
            "per_edge_loop_counts": [[u, v, c] for (u, v), c in sorted(self.per_edge_loop_counts.items())],
        }


def fineness_report(
    g: Graph, L: int, budget: int = 10_000_000, edges: Iterable[Edge] | None = None
) -> FinenessReport:
    counts = {
        edge(*e): count_simple_loops_through(g, e, L, budget)
        for e in (g.edges if edges is None else edges)
    }
    return FinenessReport(L, counts, max(counts.values(), default=0))


def dumps(obj) -> str:
    return json.dumps(obj.to_json(), separators=(",", ":"), sort_keys=True)


def angle_triangle_inequality(g: Graph) -> tuple[bool, tuple[int, int, int, int] | None]:
    """Check angle(e1, e3) <= angle(e1, e2) + angle(e2, e3) at every vertex.

    Returns (ok, witness) where the witness is (v, w1, w2, w3), the three
    edges being {v, wi}.
    """
    o = angle_oracle(g)
    for v in range(g.n):
        blk = o.block(v).astype(np.float64)
        blk[blk >= kernels.INF] = np.inf
        # s[i, j, k] = blk[i, j] + blk[j, k]
        s = blk[:, :, None] + blk[None, :, :]
        bad = np.argwhere(blk[:, None, :] > s)
        if len(bad):
            i, j, k = (int(t) for t in bad[0])
            nb = g.adjacency[v]
            return False, (v, nb[i], nb[j], nb[k])
    return True, None


def _path_edge(p: tuple[int, ...], t: int) -> Edge | None:
    return edge(p[t], p[t + 1]) if 0 <= t < len(p) - 1 else None


def conical_thinness(
    g: Graph, dm: DistanceMatrix | None, delta: int,
    triples: Iterable[tuple[int, int, int]], factor: int = 50,
) -> tuple[int, int, tuple | None]:
    """Sample the conical thinness of geodesic triangles.

    For each triple the sides are the canonical geodesics.  The edge of [a, b]
    starting at distance t from a must lie in the cone of parameter
    ``factor * delta`` around the edge of [a, c] starting at distance t from
    a, or around the edge of [b, c] at the same distance from b.  Returns
    (edges checked, failures, first witness (a, b, c, t)).
    """
    from .graph import some_geodesic

    dm = all_pairs_distances(g) if dm is None else dm
    theta = factor * delta
    cones: dict[Edge, frozenset[Edge]] = {}

    def members(e: Edge) -> frozenset[Edge]:
        m = cones.get(e)
        if m is None:
            m = cones[e] = cone(g, dm, e, theta).edges
        return m

    checked = bad = 0
    witness = None
    for a, b, c in triples:
        ab = some_geodesic(g, a, b, dm)
        ac = some_geodesic(g, a, c, dm)
        bc = some_geodesic(g, b, c, dm)
        dab = len(ab) - 1
        for t in range(dab):
            e = edge(ab[t], ab[t + 1])
            cands = [_path_edge(ac, t), _path_edge(bc, dab - t - 1)]
            checked += 1
            if not any(f is not None and e in members(f) for f in cands):
                bad += 1
                if witness is None:
                    witness = (a, b, c, t)
    return checked, bad, witness

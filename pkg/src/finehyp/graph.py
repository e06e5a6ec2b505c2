"""Undirected graphs, their metric, geodesics, intervals and hyperbolicity."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import networkx as nx
import numpy as np

from . import kernels
from .errors import (
    BudgetExceeded,
    DisconnectedGraph,
    DuplicateEdge,
    EnumerationCapExceeded,
    SelfLoop,
)

DENSE_VERTEX_CAP = 20_000
DELTA_BLOCK_CAP = 400


@dataclass(frozen=True, eq=False)
class Graph:
    """Connected simple graph on the dense vertex ids ``0..n-1``.

    Build instances with :func:`build_graph`; the constructor trusts its input.
    """

    adjacency: tuple[tuple[int, ...], ...]
    labels: Mapping[int, str] | None = None
    kinds: Mapping[int, str] | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return len(self.adjacency)

    def __len__(self) -> int:
        return len(self.adjacency)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.adjacency[u]
        i = np.searchsorted(nb, v)
        return i < len(nb) and nb[i] == v

    @cached_property
    def edges(self) -> tuple[tuple[int, int], ...]:
        """Edges as sorted ``(u, v)`` pairs with ``u < v``, in lexicographic order."""
        return tuple((u, v) for u in range(self.n) for v in self.adjacency[u] if u < v)

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        deg = np.fromiter((len(a) for a in self.adjacency), dtype=np.int64, count=self.n)
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(deg, out=indptr[1:])
        indices = np.fromiter(
            (w for a in self.adjacency for w in a), dtype=np.int32, count=int(indptr[-1])
        )
        return indptr, indices

    def is_tree(self) -> bool:
        return self.m == self.n - 1

    def label(self, v: int) -> str:
        if self.labels and v in self.labels:
            return self.labels[v]
        return str(v)

    def to_networkx(self) -> nx.Graph:
        h = nx.Graph()
        h.add_nodes_from(range(self.n))
        h.add_edges_from(self.edges)
        return h

    @cached_property
    def _distances(self) -> "DistanceMatrix":
        return DistanceMatrix(self)


def build_graph(
    edge_list: Iterable[Sequence[int]],
    vertices: Iterable[int] | None = None,
    labels: Mapping[int, str] | None = None,
    kinds: Mapping[int, str] | None = None,
) -> Graph:
    """Validate an edge list and return a :class:`Graph` with compacted ids.

    Original ids are mapped to ``0..n-1`` in increasing order; ``labels`` and
    ``kinds`` are keyed by original ids.
    """
    pairs = [(int(a), int(b)) for a, b in edge_list]
    ids = set(int(v) for v in vertices) if vertices is not None else set()
    seen = set()
    for a, b in pairs:
        if a == b:
            raise SelfLoop(f"self-loop at vertex {a}")
        key = (a, b) if a < b else (b, a)
        if key in seen:
            raise DuplicateEdge(f"duplicate edge {key}")
        seen.add(key)
        ids.add(a)
        ids.add(b)
    if not ids:
        raise DisconnectedGraph("empty graph")
    order = sorted(ids)
    index = {v: i for i, v in enumerate(order)}
    adj: list[list[int]] = [[] for _ in order]
    for a, b in pairs:
        adj[index[a]].append(index[b])
        adj[index[b]].append(index[a])
    adjacency = tuple(tuple(sorted(a)) for a in adj)
    g = Graph(
        adjacency,
        labels={index[k]: v for k, v in labels.items() if k in index} if labels else None,
        kinds={index[k]: v for k, v in kinds.items() if k in index} if kinds else None,
    )
    indptr, indices = g.csr
    reach = kernels.bfs_from(indptr, indices, 0)
    if (reach < 0).any():
        missing = int(np.flatnonzero(reach < 0)[0])
        raise DisconnectedGraph(f"vertex {order[missing]} unreachable from {order[0]}")
    return g


class DistanceMatrix:
    """Graph metric in edge-count units.

    Dense (an ``n x n`` int32 array) up to ``cap`` vertices; above that, rows
    are computed by BFS on demand and only row access is available.
    """

    def __init__(self, graph: Graph, cap: int = DENSE_VERTEX_CAP):
        self.graph = graph
        self.cap = cap
        self._dense = None
        self._rows: dict[int, np.ndarray] = {}
        if graph.n <= cap:
            self._dense = kernels.bfs_all_pairs(*graph.csr)

    @property
    def is_dense(self) -> bool:
        return self._dense is not None

    @property
    def d(self) -> np.ndarray:
        if self._dense is None:
            raise BudgetExceeded(
                f"{self.graph.n} vertices exceed the dense distance cap {self.cap}"
            )
        return self._dense

    def row(self, u: int) -> np.ndarray:
        if self._dense is not None:
            return self._dense[u]
        r = self._rows.get(u)
        if r is None:
            r = kernels.bfs_from(*self.graph.csr, u)
            self._rows[u] = r
        return r

    def __getitem__(self, uv: tuple[int, int]) -> int:
        u, v = uv
        return int(self.row(u)[v])

    def eccentricity(self, u: int) -> int:
        return int(self.row(u).max())


def all_pairs_distances(g: Graph) -> DistanceMatrix:
    """Cached metric of ``g`` (computed once per graph)."""
    return g._distances


def _dm(g: Graph, dm: DistanceMatrix | None) -> DistanceMatrix:
    return all_pairs_distances(g) if dm is None else dm


def interval(g: Graph, x: int, y: int, dm: DistanceMatrix | None = None) -> frozenset[int]:
    """I(x, y): vertices ``a`` with d(x, a) + d(a, y) = d(x, y)."""
    dm = _dm(g, dm)
    rx, ry = dm.row(x), dm.row(y)
    return frozenset(np.flatnonzero(rx + ry == rx[y]).tolist())


def ball(dm: DistanceMatrix, x: int, r: int) -> np.ndarray:
    return np.flatnonzero(dm.row(x) <= r)


def sphere(dm: DistanceMatrix, x: int, r: int) -> np.ndarray:
    return np.flatnonzero(dm.row(x) == r)


def some_geodesic(g: Graph, x: int, y: int, dm: DistanceMatrix | None = None) -> tuple[int, ...]:
    """The deterministic geodesic from x to y: always step to the smallest-id
    neighbour that is one closer to y."""
    dm = _dm(g, dm)
    ry = dm.row(y)
    path = [x]
    cur = x
    while cur != y:
        target = ry[cur] - 1
        for w in g.adjacency[cur]:
            if ry[w] == target:
                cur = w
                break
        path.append(cur)
    return tuple(path)


def all_geodesics(
    g: Graph, x: int, y: int, dm: DistanceMatrix | None = None, max_paths: int = 10_000
) -> list[tuple[int, ...]]:
    """Every geodesic from x to y in lexicographic order of vertex sequences."""
    dm = _dm(g, dm)
    ry = dm.row(y)
    out: list[tuple[int, ...]] = []
    path = [x]

    def walk(cur: int) -> None:
        if cur == y:
            if len(out) >= max_paths:
                raise EnumerationCapExceeded(f"more than {max_paths} geodesics {x}->{y}")
            out.append(tuple(path))
            return
        target = ry[cur] - 1
        for w in g.adjacency[cur]:
            if ry[w] == target:
                path.append(w)
                walk(w)
                path.pop()

    walk(x)
    return out


def gromov_product2(dm: DistanceMatrix, x: int, y: int, z: int) -> int:
    """Twice the Gromov product (x, y)_z, an exact integer."""
    return dm[x, z] + dm[y, z] - dm[x, y]


def gromov_product(dm: DistanceMatrix, x: int, y: int, z: int) -> Fraction:
    return Fraction(gromov_product2(dm, x, y, z), 2)


@dataclass(frozen=True)
class DeltaEstimate:
    """Minimal interval-thinness constant with a witness (x, y, z, m)."""

    delta: int
    witness: tuple[int, int, int, int] | None = None
    largest_block: int = 0


def blocks(g: Graph) -> list[list[int]]:
    """Biconnected components as sorted vertex lists (bridges included)."""
    if g.n == 1:
        return [[0]]
    return sorted(sorted(b) for b in nx.biconnected_components(g.to_networkx()))


def hyperbolicity_delta(
    g: Graph, dm: DistanceMatrix | None = None, block_cap: int = DELTA_BLOCK_CAP
) -> DeltaEstimate:
    """Smallest integer delta such that every m in I(x, y) lies within delta
    of I(x, z) | I(y, z), for all triples.

    Geodesics between two vertices of a block never leave the block, and a
    triangle's intervals only branch inside one block, so the constant is
    the maximum over blocks; each block is enumerated exactly.
    """
    dm = _dm(g, dm)
    best = DeltaEstimate(0, None, 0)
    largest = max(len(b) for b in blocks(g))
    if largest > block_cap:
        raise BudgetExceeded(f"block of {largest} vertices exceeds cubic budget {block_cap}")
    for b in blocks(g):
        if len(b) <= 3:
            # paths of length <= 2 and triangles have every interval thin
            continue
        idx = np.asarray(b)
        sub = dm.d[np.ix_(idx, idx)]
        delta, x, y, z, m = kernels.interval_delta(sub)
        if delta > best.delta:
            best = DeltaEstimate(int(delta), (b[x], b[y], b[z], b[m]), largest)
    return DeltaEstimate(best.delta, best.witness, largest)


def hyperbolicity_delta_direct(g: Graph, dm: DistanceMatrix | None = None) -> DeltaEstimate:
    """Same constant, enumerated over the whole graph without block splitting."""
    dm = _dm(g, dm)
    delta, x, y, z, m = kernels.interval_delta(dm.d)
    return DeltaEstimate(int(delta), (x, y, z, m) if delta else None, g.n)


def working_delta(g: Graph, delta: int) -> int:
    """Constant fed to the angle and cone thresholds: ``max(delta, 1)``.

    With a zero constant, "> 12 delta" becomes "> 0", which already fails in
    a triangle, and the decomposition offsets collapse.  On trees every angle
    is 0 or infinite, so thresholds of the form "> c delta" read the same for
    any positive constant.
    """
    return max(int(delta), 1)


def corner_points(
    dm: DistanceMatrix, tri: Sequence[Sequence[int]]
) -> tuple[int, int, int]:
    """Points u on [x,z], v on [y,z], w on [x,y] cut by the Gromov products.

    ``tri`` is ``(side_xy, side_xz, side_yz)``, each listed from its first
    named endpoint.  Half-integer products are rounded down.
    """
    xy, xz, yz = tri
    x, y, z = xy[0], xy[-1], xz[-1]
    px = gromov_product2(dm, y, z, x) // 2
    py = gromov_product2(dm, x, z, y) // 2
    return xz[px], yz[py], xy[px]


def quasi_center(
    g: Graph,
    dm: DistanceMatrix | None,
    tri: Sequence[Sequence[int]],
    delta: int | None = None,
) -> int:
    """Vertex minimising the largest distance to the three corner points
    (ties broken by smallest id)."""
    dm = _dm(g, dm)
    return quasi_center_radius(dm, tri)[0]


def quasi_center_radius(dm: DistanceMatrix, tri: Sequence[Sequence[int]]) -> tuple[int, int]:
    u, v, w = corner_points(dm, tri)
    spread = np.maximum(np.maximum(dm.row(u), dm.row(v)), dm.row(w))
    t = int(np.argmin(spread))
    return t, int(spread[t])


# -- serialization -----------------------------------------------------------


def graph_to_json(g: Graph) -> str:
    verts = []
    for v in range(g.n):
        item: dict = {"id": v}
        if g.labels and v in g.labels:
            item["label"] = g.labels[v]
        if g.kinds and v in g.kinds:
            item["kind"] = g.kinds[v]
        verts.append(item)
    doc = {"vertices": verts, "edges": [list(e) for e in g.edges]}
    return json.dumps(doc, separators=(",", ":")) + "\n"


def graph_from_json(text: str) -> Graph:
    doc = json.loads(text)
    verts = doc.get("vertices", [])
    labels = {int(v["id"]): v["label"] for v in verts if "label" in v}
    kinds = {int(v["id"]): v["kind"] for v in verts if "kind" in v}
    return build_graph(
        doc.get("edges", []),
        vertices=[int(v["id"]) for v in verts],
        labels=labels or None,
        kinds=kinds or None,
    )


def graph_to_edge_list(g: Graph) -> str:
    return "".join(f"{u} {v}\n" for u, v in g.edges)


def graph_from_edge_list(text: str) -> Graph:
    pairs = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        a, b = line.split()[:2]
        pairs.append((int(a), int(b)))
    return build_graph(pairs)


def read_graph(path: str) -> Graph:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if path.endswith(".json") or text.lstrip().startswith("{"):
        return graph_from_json(text)
    return graph_from_edge_list(text)


def write_graph(g: Graph, path: str) -> None:
    text = graph_to_json(g) if path.endswith(".json") else graph_to_edge_list(g)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)

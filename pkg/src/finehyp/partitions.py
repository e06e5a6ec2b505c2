"""Sphere partitions by distance profile and the class index."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import MissingTruncationData
from .fine import cone
from .graph import DistanceMatrix, Graph, all_pairs_distances, some_geodesic


@dataclass(frozen=True, eq=False)
class SphereClass:
    """Vertices of S(x, n) with identical distances to every vertex of B(x, k).

    ``ball`` lists B(x, k) by increasing id and ``profile`` gives the common
    distances to those vertices, in the same order.
    """

    x: int
    n: int
    k: int
    i: int
    members: tuple[int, ...]
    profile: tuple[int, ...]
    ball: tuple[int, ...] = field(repr=False)

    @property
    def key(self) -> tuple[int, int, int]:
        return (self.n, self.k, self.i)

    @cached_property
    def member_set(self) -> frozenset[int]:
        return frozenset(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, v: int) -> bool:
        return v in self.member_set

    def to_json(self) -> dict:
        return {"n": self.n, "k": self.k, "profile": list(self.profile), "members": list(self.members)}


def _group(dm: DistanceMatrix, x: int, n: int, k: int, sphere: np.ndarray,
           ball: np.ndarray) -> tuple[list[SphereClass], np.ndarray]:
    rows = np.stack([dm.row(int(a))[ball] for a in sphere]) if len(sphere) else np.zeros((0, len(ball)), int)
    profiles, inverse = np.unique(rows, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    btuple = tuple(ball.tolist())
    classes = []
    for i, prof in enumerate(profiles):
        members = tuple(sphere[inverse == i].tolist())
        classes.append(SphereClass(x, n, k, i, members, tuple(prof.tolist()), btuple))
    return classes, inverse


def sphere_partition(g: Graph, dm: DistanceMatrix | None, x: int, n: int, k: int) -> list[SphereClass]:
    """Classes of S(x, n) at ball radius k, ordered by profile."""
    dm = all_pairs_distances(g) if dm is None else dm
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    rx = dm.row(x)
    return _group(dm, x, n, k, np.flatnonzero(rx == n), np.flatnonzero(rx <= k))[0]


class ClassIndex:
    """All sphere classes around x for radii n <= max_n (the index set U_x)."""

    def __init__(self, g: Graph, dm: DistanceMatrix | None, x: int, max_n: int):
        dm = all_pairs_distances(g) if dm is None else dm
        rx = dm.row(x)
        ecc = int(rx.max())
        if max_n > ecc:
            raise MissingTruncationData(f"radius {max_n} beyond eccentricity {ecc} of {x}")
        self.g, self.dm, self.x, self.max_n = g, dm, x, max_n
        self.dist = rx
        self.classes: dict[tuple[int, int], list[SphereClass]] = {}
        self._labels: dict[tuple[int, int], np.ndarray] = {}
        for n in range(max_n + 1):
            sphere = np.flatnonzero(rx == n)
            for k in range(n + 1):
                cls, inverse = _group(dm, x, n, k, sphere, np.flatnonzero(rx <= k))
                lab = np.full(g.n, -1, dtype=np.int64)
                lab[sphere] = inverse
                self.classes[(n, k)] = cls
                self._labels[(n, k)] = lab

    def __iter__(self):
        for n in range(self.max_n + 1):
            for k in range(n + 1):
                yield from self.classes[(n, k)]

    def __len__(self) -> int:
        return sum(len(c) for c in self.classes.values())

    def labels(self, n: int, k: int) -> np.ndarray:
        return self._labels[(n, k)]

    def class_of(self, a: int, k: int) -> SphereClass:
        n = int(self.dist[a])
        if n > self.max_n or not 0 <= k <= n:
            raise MissingTruncationData(f"vertex {a} at k={k} outside this index")
        return self.classes[(n, k)][int(self._labels[(n, k)][a])]

    def get(self, n: int, k: int, i: int) -> SphereClass:
        return self.classes[(n, k)][i]

    @cached_property
    def keys(self) -> list[tuple[int, int, int]]:
        """Coordinates of U_x in a fixed order."""
        return [c.key for c in self]

    @cached_property
    def position(self) -> dict[tuple[int, int, int], int]:
        return {key: p for p, key in enumerate(self.keys)}

    def min_points(self, c: SphereClass) -> tuple[int, ...]:
        return min_distance_points(c)

    def classes_at_min_point(self, n: int, k: int, z: int) -> list[SphereClass]:
        """Classes at (n, k) having z among their minimal-distance points."""
        return [c for c in self.classes[(n, k)] if z in min_distance_points(c)]

    def max_classes_per_min_point(self) -> tuple[int, tuple[int, int, int] | None]:
        """Largest number of classes sharing one minimal-distance point, over
        all (n, k, z); returns the count and a witness (n, k, z)."""
        best, wit = 0, None
        for (n, k), cls in self.classes.items():
            counts: dict[int, int] = {}
            for c in cls:
                for z in min_distance_points(c):
                    counts[z] = counts.get(z, 0) + 1
            for z, cnt in counts.items():
                if cnt > best:
                    best, wit = cnt, (n, k, z)
        return best, wit

    def check_laminar(self) -> tuple[bool, str]:
        """Partition, refinement and nesting checks; returns (ok, message)."""
        for n in range(self.max_n + 1):
            sphere = set(np.flatnonzero(self.dist == n).tolist())
            for k in range(n + 1):
                cls = self.classes[(n, k)]
                union = set()
                for c in cls:
                    if union & c.member_set:
                        return False, f"overlap at {(n, k)}"
                    union |= c.member_set
                if union != sphere:
                    return False, f"classes at {(n, k)} do not cover the sphere"
                if k < n:
                    lab_k = self._labels[(n, k)]
                    for c in self.classes[(n, k + 1)]:
                        parents = {int(lab_k[a]) for a in c.members}
                        if len(parents) != 1:
                            return False, f"class {c.key} meets several classes at k={k}"
        return True, "ok"


def class_index(g: Graph, dm: DistanceMatrix | None, x: int, max_n: int) -> ClassIndex:
    return ClassIndex(g, dm, x, max_n)


def min_distance_points(c: SphereClass) -> tuple[int, ...]:
    """Vertices of B(x, k) at distance n - k from the class."""
    target = c.n - c.k
    return tuple(z for z, d in zip(c.ball, c.profile) if d == target)


def local_determination_check(
    g: Graph, dm: DistanceMatrix | None, x: int, n: int, k: int, delta: int,
    variant: str = "ball", index: ClassIndex | None = None,
) -> tuple[bool, tuple[int, int, int] | None]:
    """Whether a few distances already pin down the class of each a in S(x, n).

    For every a and every minimal-distance point z of a at radius k, each
    a' in S(x, n) that agrees with a on the witness set W must share a's
    class.  W is B(x, k) & B(z, 3 delta) for ``variant="ball"``, and the
    vertices of the cone of parameter 50 delta around the last edge of a
    geodesic from x to z for ``variant="cone"``.  Returns (ok, witness
    (a, a', z)).
    """
    dm = all_pairs_distances(g) if dm is None else dm
    rx = dm.row(x)
    sphere = np.flatnonzero(rx == n)
    if k == 0 or len(sphere) == 0:
        return True, None
    ball = np.flatnonzero(rx <= k)
    labels = index.labels(n, k) if index is not None else None
    if labels is None:
        _, inverse = _group(dm, x, n, k, sphere, ball)
        labels = np.full(g.n, -1, dtype=np.int64)
        labels[sphere] = inverse
    DS = np.stack([dm.row(b) for b in sphere.tolist()])
    witness_sets: dict[int, np.ndarray] = {}
    for a in sphere.tolist():
        ra = dm.row(a)
        for z in ball[ra[ball] == n - k].tolist():
            W = witness_sets.get(z)
            if W is None:
                if variant == "ball":
                    W = ball[dm.row(z)[ball] <= 3 * delta]
                elif variant == "cone":
                    path = some_geodesic(g, x, z, dm)
                    W = np.asarray(sorted(cone(g, dm, (path[-2], z), 50 * delta).vertices))
                else:
                    raise ValueError(f"unknown variant {variant!r}")
                witness_sets[z] = W
            same = (DS[:, W] == ra[W]).all(axis=1)
            bad = sphere[same & (labels[sphere] != labels[a])]
            if len(bad):
                return False, (a, int(bad[0]), z)
    return True, None

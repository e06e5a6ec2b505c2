"""The weighted norm H_x, its isometry onto l2(U_x), changes of basepoint,
the translation operators and the cocycle."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.linalg import qr, solve_triangular
from scipy.sparse.linalg import LinearOperator, aslinearoperator

from .errors import (
    DecompositionMismatch,
    IncompleteCover,
    MissingTruncationData,
    NonConvergence,
    NotATree,
    SupportOutsideDomain,
    SupportOutsideIndex,
)
from .fine import angle_vertices_gt, cone
from .generators import PartialGroupAction
from .graph import DistanceMatrix, Graph, all_pairs_distances, gromov_product2, some_geodesic
from .partitions import ClassIndex, SphereClass, min_distance_points
from .triangles import normal_triangle

BASEL = math.pi ** 2 / 6
ClassKey = tuple[int, int, int]


class FinSuppFunction(dict):
    """Finitely supported scalar function on vertices; zeros are dropped."""

    def __init__(self, data: Mapping[int, complex] | Iterable = ()):
        super().__init__()
        for v, c in dict(data).items():
            if c != 0:
                self[int(v)] = c

    @classmethod
    def delta(cls, a: int) -> "FinSuppFunction":
        return cls({a: 1})

    def __add__(self, other: "FinSuppFunction") -> "FinSuppFunction":
        out = dict(self)
        for v, c in other.items():
            out[v] = out.get(v, 0) + c
        return FinSuppFunction(out)

    def __sub__(self, other: "FinSuppFunction") -> "FinSuppFunction":
        return self + other.scale(-1)

    def scale(self, s) -> "FinSuppFunction":
        return FinSuppFunction({v: s * c for v, c in self.items()})

    @property
    def support(self) -> list[int]:
        return sorted(self)


def _abs2(c):
    return (c * c.conjugate()).real if isinstance(c, complex) else c * c


def _check_support(index: ClassIndex, f: Mapping[int, complex]) -> None:
    for v in f:
        if not 0 <= v < len(index.dist) or index.dist[v] > index.max_n:
            raise SupportOutsideIndex(f"vertex {v} lies outside B({index.x}, {index.max_n})")


def theta(index: ClassIndex, f: Mapping[int, complex]) -> dict[ClassKey, complex]:
    """Coordinates of f in l2(U_x): (n + 1) times the sum of f over each class.

    Exact when f carries ints or Fractions.
    """
    _check_support(index, f)
    out: dict[ClassKey, complex] = {}
    for a, c in f.items():
        n = int(index.dist[a])
        for k in range(n + 1):
            key = (n, k, int(index.labels(n, k)[a]))
            out[key] = out.get(key, 0) + (n + 1) * c
    return {key: val for key, val in out.items() if val != 0}


def h_norm_sq(index: ClassIndex, f: Mapping[int, complex]):
    """Squared H_x norm: sum over all classes of |(n + 1) sum_class f|^2."""
    return sum((_abs2(v) for v in theta(index, f).values()), 0)


def phi(f: Mapping[int, complex]):
    """The linear form f -> sum of values."""
    return sum(f.values(), 0)


def theta_matrix(index: ClassIndex, columns: Sequence[int] | None = None) -> sp.csr_matrix:
    """Sparse matrix of Theta_x: rows follow ``index.keys``, columns the given
    vertices (default: every vertex of B(x, max_n), by id)."""
    if columns is None:
        columns = np.flatnonzero(index.dist <= index.max_n)
    columns = np.asarray(columns, dtype=np.int64)
    if len(columns) and index.dist[columns].max() > index.max_n:
        raise SupportOutsideIndex("column vertex outside the index radius")
    pos = index.position
    rows, cols, vals = [], [], []
    for j, a in enumerate(columns.tolist()):
        n = int(index.dist[a])
        for k in range(n + 1):
            rows.append(pos[(n, k, int(index.labels(n, k)[a]))])
            cols.append(j)
            vals.append(n + 1.0)
    return sp.csr_matrix((vals, (rows, cols)), shape=(len(pos), len(columns)))


# -- decompositions -----------------------------------------------------------


@dataclass
class SignedDecomposition:
    """target = (disjoint union of positives) minus the negatives, where each
    negative sits inside the positive recorded in ``parent``."""

    target: SphereClass
    x_prime: int
    positives: list[SphereClass]
    negatives: list[SphereClass]
    parent: list[int]
    cases: dict[int, int] = field(default_factory=dict)
    clamped: int = 0
    fallback: bool = False
    discrepancy: str = ""
    n_range: tuple[int, int] = (0, 0)

    def indicator(self) -> dict[int, int]:
        ind: dict[int, int] = {}
        for c in self.positives:
            for a in c.members:
                ind[a] = ind.get(a, 0) + 1
        for c in self.negatives:
            for a in c.members:
                ind[a] = ind.get(a, 0) - 1
        return {a: v for a, v in ind.items() if v}

    def to_json(self) -> dict:
        return {
            "target": list(self.target.key),
            "x_prime": self.x_prime,
            "positives": [list(c.key) for c in self.positives],
            "negatives": [list(c.key) for c in self.negatives],
            "parent": self.parent,
            "cases": {str(k): v for k, v in sorted(self.cases.items())},
            "clamped": self.clamped,
            "fallback": self.fallback,
            "discrepancy": self.discrepancy,
        }


@dataclass(frozen=True)
class DecompositionCheck:
    identity: bool
    negatives_nested: bool
    negatives_disjoint: bool
    negatives_one_deeper: bool
    positives_disjoint: bool

    @property
    def ok(self) -> bool:
        return self.identity and self.negatives_nested and self.negatives_disjoint and self.negatives_one_deeper


def check_decomposition(dec: SignedDecomposition) -> DecompositionCheck:
    ind = dec.indicator()
    identity = set(ind) == dec.target.member_set and all(v == 1 for v in ind.values())
    nested = len(dec.parent) == len(dec.negatives) and all(
        neg.member_set <= dec.positives[p].member_set for neg, p in zip(dec.negatives, dec.parent)
    )
    deeper = all(
        neg.k == dec.positives[p].k + 1 and neg.n == dec.positives[p].n
        for neg, p in zip(dec.negatives, dec.parent)
    )
    seen: set[int] = set()
    neg_disjoint = True
    for c in dec.negatives:
        if seen & c.member_set:
            neg_disjoint = False
        seen |= c.member_set
    seen = set()
    pos_disjoint = True
    for c in dec.positives:
        if seen & c.member_set:
            pos_disjoint = False
        seen |= c.member_set
    return DecompositionCheck(identity, nested, neg_disjoint, deeper, pos_disjoint)


def _lookup(idx: ClassIndex, n: int, k: int, a: int) -> SphereClass:
    if n > idx.max_n:
        raise MissingTruncationData(f"class at n'={n} beyond index radius {idx.max_n} at {idx.x}")
    return idx.class_of(a, k)


def _class_with_min_point(idx: ClassIndex, n: int, k: int, z: int) -> SphereClass | None:
    if n > int(idx.dist.max()):
        return None  # the sphere is empty
    if n > idx.max_n:
        raise MissingTruncationData(f"class at n'={n} beyond index radius {idx.max_n} at {idx.x}")
    found = idx.classes_at_min_point(n, k, z)
    if len(found) > 1:
        raise NotATree(f"several classes at {(n, k)} share the point {z}")
    return found[0] if found else None


def decompose_class_tree(
    tree: Graph, x: int, x_prime: int, c: SphereClass, idx_prime: ClassIndex
) -> SignedDecomposition:
    """Decomposition of a tree class I_z^{n,k,x} into classes around x'."""
    if not tree.is_tree():
        raise NotATree("decompose_class_tree needs a tree")
    dm = all_pairs_distances(tree)
    n, k = c.n, c.k
    (z,) = min_distance_points(c)
    d = dm[x, x_prime]
    geo = some_geodesic(tree, x, x_prime, dm)
    pos: list[SphereClass] = []
    neg: list[SphereClass] = []
    parent: list[int] = []
    if dm[x, z] + dm[z, x_prime] != d:
        kp = dm[x_prime, z]
        p = _class_with_min_point(idx_prime, n - k + kp, kp, z)
        if p is not None:
            pos.append(p)
    else:
        for i in range(k, min(d, n) + 1):
            np_ = n - 2 * i + d
            p = _class_with_min_point(idx_prime, np_, d - i, geo[i])
            if p is None:
                continue
            q = None
            if 0 < i < n:
                q = _class_with_min_point(idx_prime, np_, d - i + 1, geo[i - 1])
            if q is not None and q.member_set == p.member_set:
                continue  # the difference is empty
            pos.append(p)
            if q is not None:
                neg.append(q)
                parent.append(len(pos) - 1)
    ns = [q.n for q in pos] or [n]
    return SignedDecomposition(c, x_prime, pos, neg, parent, n_range=(min(ns), max(ns)))


class TriangleCache:
    """Normal triangles (x, x', a) and derived points, computed once per a."""

    def __init__(self, g: Graph, dm: DistanceMatrix, delta: int, x: int, x_prime: int):
        self.g, self.dm, self.delta, self.x, self.xp = g, dm, delta, x, x_prime
        self._data: dict[int, tuple] = {}

    def get(self, a: int):
        got = self._data.get(a)
        if got is None:
            tri = normal_triangle(self.g, self.dm, self.delta, self.x, self.xp, a, verify=False)
            got = (tri.ac, tri.bc, tri.tildes[2])
            self._data[a] = got
        return got


def _case_piece(
    g: Graph, dm: DistanceMatrix, delta: int, x: int, xp: int, a: int, n: int, k: int,
    cache: TriangleCache, idx_p: ClassIndex,
) -> tuple[int, SphereClass, list[SphereClass], bool]:
    side_xa, side_xpa, at = cache.get(a)
    z = side_xa[k]
    np_ = dm[xp, a]
    d_x_at = dm[x, at]
    gp_x = gromov_product2(dm, a, xp, x)  # twice (a, x')_x
    v = side_xpa[gromov_product2(dm, a, x, xp) // 2]
    clamped = False
    negs: list[SphereClass] = []
    if k > d_x_at or (a == at and k == n):
        case, kp = 1, dm[xp, z]
    elif 2 * k <= gp_x and dm[xp, at] >= dm[xp, v] + 8 * delta:
        case, kp = 2, dm[xp, v] + 8 * delta
    elif 2 * k > gp_x and dm[xp, at] >= dm[xp, z] + 3 * delta:
        case, kp = 3, dm[xp, z] + 3 * delta
    else:
        case, kp = 4, dm[xp, at]
    if kp > np_:
        kp, clamped = np_, True
    pos = _lookup(idx_p, np_, kp, a)
    if case == 4 and kp + 1 <= np_:
        seen = set()
        for b in pos.members:
            if not angle_vertices_gt(g, dm, at, x, b, 24 * delta):
                q = idx_p.class_of(b, kp + 1)
                if q.key not in seen:
                    seen.add(q.key)
                    negs.append(q)
    return case, pos, negs, clamped


def _greedy(target: SphereClass, idx_p: ClassIndex) -> tuple[list[SphereClass], list[SphereClass], list[int]]:
    """Cover the target top-down by classes around x', removing overshoot
    through children one level deeper."""
    T = target.member_set
    ns = sorted({int(idx_p.dist[a]) for a in T})
    covered: set[int] = set()
    pos: list[SphereClass] = []
    neg: list[SphereClass] = []
    parent: list[int] = []
    for n in ns:
        for k in range(n + 1):
            for c in idx_p.classes[(n, k)]:
                inter = c.member_set & T
                if not inter or inter <= covered:
                    continue
                if c.member_set <= T:
                    pos.append(c)
                    covered |= c.member_set
                    continue
                if k == n:
                    continue
                children = [
                    ch for ch in idx_p.classes[(n, k + 1)] if ch.member_set <= c.member_set
                ]
                if all(ch.member_set <= T or not (ch.member_set & T) for ch in children):
                    pos.append(c)
                    for ch in children:
                        if not ch.member_set & T:
                            neg.append(ch)
                            parent.append(len(pos) - 1)
                    covered |= inter
    return pos, neg, parent


def laminar_decomposition(target: SphereClass, idx_p: ClassIndex) -> SignedDecomposition:
    """Brute-force decomposition by set algebra over the classes around x'."""
    pos, neg, par = _greedy(target, idx_p)
    ns = [p.n for p in pos] or [target.n]
    return SignedDecomposition(target, idx_p.x, pos, neg, par, n_range=(min(ns), max(ns)))


def decompose_class_general(
    g: Graph, dm: DistanceMatrix | None, delta: int, idx_x: ClassIndex, idx_p: ClassIndex,
    c: SphereClass, cache: TriangleCache | None = None, fallback: bool = True,
) -> SignedDecomposition:
    """Signed decomposition of a class around x into classes around x'.

    Each member a contributes the piece (class, minus removed children)
    chosen by where the point z of [x, a] at distance k sits relative to
    the tilde point of a and the Gromov points of the triangle (x, x', a).
    Pieces are laminar; the maximal ones are kept.
    """
    dm = all_pairs_distances(g) if dm is None else dm
    x, xp = idx_x.x, idx_p.x
    if cache is None:
        cache = TriangleCache(g, dm, delta, x, xp)
    pieces: dict[tuple, tuple[SphereClass, list[SphereClass], frozenset[int]]] = {}
    cases: dict[int, int] = {}
    clamped = 0
    for a in c.members:
        case, pos, negs, cl = _case_piece(g, dm, delta, x, xp, a, c.n, c.k, cache, idx_p)
        cases[case] = cases.get(case, 0) + 1
        clamped += cl
        key = (pos.key, tuple(sorted(q.key for q in negs)))
        if key not in pieces:
            removed = set()
            for q in negs:
                removed |= q.member_set
            pieces[key] = (pos, negs, frozenset(pos.member_set - removed))
    # keep pieces not strictly contained in another piece
    items = sorted(pieces.values(), key=lambda t: (-len(t[2]), t[0].key))
    kept: list[tuple[SphereClass, list[SphereClass], frozenset[int]]] = []
    for item in items:
        if any(item[2] <= other[2] for other in kept):
            continue
        kept.append(item)
    positives, negatives, parent = [], [], []
    for pos, negs, _ in sorted(kept, key=lambda t: t[0].key):
        positives.append(pos)
        for q in sorted(negs, key=lambda q: q.key):
            negatives.append(q)
            parent.append(len(positives) - 1)
    ns = [p.n for p in positives] or [c.n]
    dec = SignedDecomposition(c, xp, positives, negatives, parent, cases, clamped,
                              n_range=(min(ns), max(ns)))
    chk = check_decomposition(dec)
    if chk.ok:
        return dec
    msg = "constructive decomposition: " + ", ".join(
        name for name, val in (("identity", chk.identity), ("nested", chk.negatives_nested),
                               ("disjoint negatives", chk.negatives_disjoint),
                               ("depth", chk.negatives_one_deeper)) if not val
    ) + " failed"
    if not fallback:
        raise DecompositionMismatch(f"class {c.key}: {msg}")
    pos, neg, par = _greedy(c, idx_p)
    out = SignedDecomposition(c, xp, pos, neg, par, cases, clamped, True, msg, dec.n_range)
    if not check_decomposition(out).ok:
        raise DecompositionMismatch(f"class {c.key}: set-algebra fallback also fails")
    return out


def decompose_all(
    g: Graph, dm: DistanceMatrix | None, delta: int, idx_x: ClassIndex, idx_p: ClassIndex,
    max_n: int | None = None, tree: bool = False,
) -> list[SignedDecomposition]:
    """Decompositions of every class around x with n <= max_n."""
    dm = all_pairs_distances(g) if dm is None else dm
    max_n = idx_x.max_n if max_n is None else max_n
    out = []
    cache = TriangleCache(g, dm, delta, idx_x.x, idx_p.x)
    for c in idx_x:
        if c.n > max_n:
            continue
        if tree:
            out.append(decompose_class_tree(g, idx_x.x, idx_p.x, c, idx_p))
        else:
            out.append(decompose_class_general(g, dm, delta, idx_x, idx_p, c, cache))
    return out


# -- the basepoint matrix -----------------------------------------------------


@dataclass
class BasepointMatrix:
    """Sparse A with A . Theta_x' = Theta_x on the covered rows."""

    row_keys: list[ClassKey]
    col_keys: list[ClassKey]
    entries: dict[tuple[int, int], Fraction]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.row_keys), len(self.col_keys)

    def to_scipy(self) -> sp.csr_matrix:
        if not self.entries:
            return sp.csr_matrix(self.shape)
        r = [rc[0] for rc in self.entries]
        c = [rc[1] for rc in self.entries]
        v = [float(x) for x in self.entries.values()]
        return sp.csr_matrix((v, (r, c)), shape=self.shape)

    def apply_exact(self, vec: Mapping[ClassKey, object]) -> dict[ClassKey, object]:
        col = {k: j for j, k in enumerate(self.col_keys)}
        out: dict[ClassKey, object] = {}
        by_col: dict[int, list[tuple[int, Fraction]]] = {}
        for (r, c), v in self.entries.items():
            by_col.setdefault(c, []).append((r, v))
        for key, val in vec.items():
            j = col.get(key)
            if j is None:
                continue
            for r, v in by_col.get(j, ()):
                rk = self.row_keys[r]
                out[rk] = out.get(rk, 0) + v * val
        return {k: v for k, v in out.items() if v != 0}

    def row_support(self) -> int:
        counts: dict[int, int] = {}
        for r, _ in self.entries:
            counts[r] = counts.get(r, 0) + 1
        return max(counts.values(), default=0)

    def column_support(self) -> int:
        counts: dict[int, int] = {}
        for _, c in self.entries:
            counts[c] = counts.get(c, 0) + 1
        return max(counts.values(), default=0)

    def max_coefficient(self) -> Fraction:
        return max((abs(v) for v in self.entries.values()), default=Fraction(0))

    def to_csv(self) -> str:
        lines = ["row,col,value"]
        for (r, c), v in sorted(self.entries.items()):
            lines.append(f"{r},{c},{v}")
        return "\n".join(lines) + "\n"


def basepoint_matrix(
    idx_x: ClassIndex, idx_p: ClassIndex, decompositions: Sequence[SignedDecomposition],
    max_n: int | None = None,
) -> BasepointMatrix:
    """Assemble A from decompositions of every class around x with n <= max_n."""
    max_n = idx_x.max_n if max_n is None else max_n
    rows = [key for key in idx_x.keys if key[0] <= max_n]
    row_pos = {k: i for i, k in enumerate(rows)}
    cols = idx_p.keys
    col_pos = idx_p.position
    entries: dict[tuple[int, int], Fraction] = {}
    covered = set()
    for dec in decompositions:
        key = dec.target.key
        if key not in row_pos:
            continue
        covered.add(key)
        r = row_pos[key]
        for sign, group in ((1, dec.positives), (-1, dec.negatives)):
            for c in group:
                j = col_pos[c.key]
                val = entries.get((r, j), Fraction(0)) + sign * Fraction(key[0] + 1, c.n + 1)
                if val:
                    entries[(r, j)] = val
                else:
                    entries.pop((r, j), None)
    missing = [k for k in rows if k not in covered]
    if missing:
        raise IncompleteCover(f"{len(missing)} classes lack a decomposition, e.g. {missing[0]}")
    return BasepointMatrix(rows, cols, entries)


def tree_bound(d: int) -> float:
    return math.sqrt(2 * d + 2) * math.sqrt(2 * d + 3) * (d + 1)


@dataclass(frozen=True)
class GrowthBound:
    kind: str
    K: float | None = None

    def __call__(self, d: int) -> float:
        if self.kind == "tree":
            return tree_bound(d)
        return (self.K * d + self.K) * (d + 1)


def operator_norm(m, tol: float = 1e-8, max_iter: int = 10_000, seed: int = 0) -> float:
    """Largest singular value by power iteration on m* m from a seeded start."""
    op = m if isinstance(m, LinearOperator) else aslinearoperator(m)
    ncols = op.shape[1]
    if ncols == 0 or op.shape[0] == 0:
        return 0.0
    v = np.random.default_rng(seed).standard_normal(ncols)
    v /= np.linalg.norm(v)
    for _ in range(max_iter):
        w = op.rmatvec(op.matvec(v))
        rho = float(np.vdot(v, w).real)
        if rho <= 0:
            return 0.0
        resid = np.linalg.norm(w - rho * v)
        if resid <= tol * rho:
            return math.sqrt(rho)
        v = w / np.linalg.norm(w)
    raise NonConvergence(f"power iteration did not converge in {max_iter} steps")


# -- translations and the cocycle --------------------------------------------


def pi_apply(action: PartialGroupAction, f: Mapping[int, complex]) -> FinSuppFunction:
    """pi(g) f = f o g^{-1}: the value at a moves to g.a."""
    out = {}
    for a, c in f.items():
        if a not in action.mapping:
            raise SupportOutsideDomain(f"vertex {a} outside the domain of {action.label}")
        out[action.mapping[a]] = c
    return FinSuppFunction(out)


def pi_operator_norm(
    index: ClassIndex, action: PartialGroupAction, R_dom: int | None = None,
    tol: float = 1e-8,
) -> float:
    """Norm of pi(g) on H_x restricted to functions supported in B(x, R_dom)."""
    R_dom = action.domain_radius if R_dom is None else R_dom
    if R_dom > action.domain_radius:
        raise SupportOutsideDomain(f"radius {R_dom} exceeds the domain of {action.label}")
    dist = index.dist
    # vertices whose image was cut off by the truncation are left out
    dom = [v for v in np.flatnonzero(dist <= R_dom).tolist() if v in action.mapping]
    if not dom:
        raise SupportOutsideDomain(f"{action.label} maps nothing inside radius {R_dom}")
    img = [action.mapping[v] for v in dom]
    if max(int(dist[v]) for v in img) > index.max_n:
        raise MissingTruncationData("translated domain leaves the class index")
    m1 = theta_matrix(index, dom).toarray()
    m2 = theta_matrix(index, img).tocsr()
    _, r = qr(m1, mode="economic")
    op = LinearOperator(
        (m2.shape[0], r.shape[1]),
        matvec=lambda y: m2 @ solve_triangular(r, y),
        rmatvec=lambda z: solve_triangular(r, m2.T @ z, trans="T"),
        dtype=float,
    )
    return operator_norm(op, tol=tol)


def cocycle_norm_sq(index: ClassIndex, action: PartialGroupAction):
    """||delta_e - pi(g) delta_e||^2 in H_e, with e the basepoint of the index."""
    e = index.x
    if e not in action.mapping:
        raise MissingTruncationData(f"basepoint {e} outside the domain of {action.label}")
    ge = action.mapping[e]
    if index.dist[ge] > index.max_n:
        raise MissingTruncationData("g.e lies outside the class index")
    return h_norm_sq(index, FinSuppFunction({e: 1}) - FinSuppFunction({ge: 1}))


# -- the constant K -----------------------------------------------------------


@dataclass(frozen=True)
class KMeasurement:
    L: int
    L_witness: tuple[int, int, int] | None
    cone_size: int
    cone_vertices: int
    cone_edge: tuple[int, int]
    theta: int

    @property
    def K(self) -> int:
        return self.L * self.cone_size


def measure_K(g: Graph, delta: int, indices: Iterable[ClassIndex], factor: int = 224) -> KMeasurement:
    """K = L times the largest cone of parameter ``factor * delta``.

    L is the largest number of classes sharing a minimal-distance point over
    the given indices; cone size counts vertices plus edges.
    """
    dm = all_pairs_distances(g)
    L, lw = 0, None
    for idx in indices:
        cnt, wit = idx.max_classes_per_min_point()
        if cnt > L:
            L, lw = cnt, wit
    theta_ = factor * delta
    best, best_v, best_e = 0, 0, g.edges[0] if g.edges else (0, 0)
    for e in g.edges:
        cn = cone(g, dm, e, theta_)
        if len(cn) > best:
            best, best_v, best_e = len(cn), len(cn.vertices), e
    return KMeasurement(L, lw, best, best_v, best_e, theta_)

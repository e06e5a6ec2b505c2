"""Graph families: trees, cycles, and (coned-off) Cayley balls of free products."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import BudgetExceeded, EmptyDomain, FineHypError
from .graph import Graph, all_pairs_distances, build_graph

LETTERS = "abcdefgh"
MAX_FACTORS = 4
DEFAULT_EXPONENT_CAP = 2
DEFAULT_VERTEX_BUDGET = 200_000

Syllable = tuple[int, int]  # (factor index, exponent)
NormalForm = tuple[Syllable, ...]


@dataclass(frozen=True)
class FreeProductSpec:
    """Free product of cyclic groups, one generator per factor.

    ``orders[i]`` is the order of factor i, or ``None`` for a copy of Z.
    """

    orders: tuple[int | None, ...]

    def __post_init__(self):
        if not self.orders:
            raise ValueError("a free product needs at least one factor")
        if len(self.orders) > MAX_FACTORS:
            raise ValueError(f"at most {MAX_FACTORS} factors")
        for m in self.orders:
            if m is not None and m < 2:
                raise ValueError("finite factors need order >= 2")
        if len(self.orders) == 1 and self.orders[0] is not None:
            raise ValueError("a single finite factor is not an infinite group")

    @classmethod
    def parse(cls, text: str) -> "FreeProductSpec":
        """``"Z*Z"``, ``"Z2*Z3"``, ``"Z*Z3*Z3"`` and so on."""
        orders: list[int | None] = []
        for part in text.replace(" ", "").split("*"):
            m = re.fullmatch(r"Z(\d*)", part)
            if not m:
                raise ValueError(f"bad factor {part!r} in {text!r}")
            orders.append(int(m.group(1)) if m.group(1) else None)
        return cls(tuple(orders))

    def __str__(self) -> str:
        return "*".join("Z" if m is None else f"Z{m}" for m in self.orders)

    # -- normal form arithmetic --------------------------------------------

    def reduce(self, i: int, e: int) -> int:
        m = self.orders[i]
        if m is None:
            return e
        r = e % m
        return r - m if r > m // 2 else r

    def syllable_cost(self, i: int, e: int) -> int:
        """Coned-off length of a nontrivial power of generator i: one Cayley
        edge for +-1, otherwise two edges through the apex."""
        return 1 if abs(self.reduce(i, e)) == 1 else 2

    def cost(self, w: NormalForm) -> int:
        return sum(self.syllable_cost(i, e) for i, e in w)

    def multiply(self, u: NormalForm, v: NormalForm) -> NormalForm:
        out = list(u)
        for i, e in v:
            if out and out[-1][0] == i:
                r = self.reduce(i, out[-1][1] + e)
                out.pop()
                if r:
                    out.append((i, r))
            else:
                out.append((i, self.reduce(i, e)))
        return tuple(out)

    def inverse(self, w: NormalForm) -> NormalForm:
        return tuple((i, self.reduce(i, -e)) for i, e in reversed(w))

    def word(self, text: str) -> NormalForm:
        """Parse ``"a^2b^-1"``; ``"e"`` or ``""`` is the identity."""
        text = text.replace(" ", "")
        if text in ("", "e"):
            return ()
        out: NormalForm = ()
        pos = 0
        for m in re.finditer(r"([a-h])(?:\^(-?\d+))?", text):
            if m.start() != pos:
                raise ValueError(f"cannot parse word {text!r}")
            pos = m.end()
            i = LETTERS.index(m.group(1))
            if i >= len(self.orders):
                raise ValueError(f"generator {m.group(1)} not in {self}")
            e = int(m.group(2)) if m.group(2) else 1
            if self.reduce(i, e):
                out = self.multiply(out, ((i, self.reduce(i, e)),))
        if pos != len(text):
            raise ValueError(f"cannot parse word {text!r}")
        return out

    def exponents(self, i: int, cap: int) -> list[int]:
        """Nonzero exponents materialized for factor i."""
        m = self.orders[i]
        if m is None:
            return [e for e in range(-cap, cap + 1) if e]
        return sorted({self.reduce(i, e) for e in range(1, m)})


def format_word(w: NormalForm) -> str:
    if not w:
        return "e"
    return "".join(LETTERS[i] + ("" if e == 1 else f"^{e}") for i, e in w)


@dataclass(frozen=True, eq=False)
class TruncatedSpace:
    """Finite ball of a (coned-off) Cayley graph around the identity."""

    graph: Graph
    spec: FreeProductSpec
    radius: int
    coned: bool
    exponent_cap: int
    forms: tuple[NormalForm | None, ...]
    cosets: Mapping[int, tuple[NormalForm, int]]
    complete: Mapping[int, bool]
    base: int = 0
    _index: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        for v, w in enumerate(self.forms):
            if w is not None:
                self._index[("g", w)] = v
        for v, key in self.cosets.items():
            self._index[("c",) + key] = v

    def vertex_of(self, w: NormalForm) -> int | None:
        return self._index.get(("g", w))

    def cone_of(self, prefix: NormalForm, factor: int) -> int | None:
        return self._index.get(("c", prefix, factor))

    def kind(self, v: int) -> str:
        return "group" if self.forms[v] is not None else "cone"

    @property
    def group_vertices(self) -> list[int]:
        return [v for v, w in enumerate(self.forms) if w is not None]


def coset_key(spec: FreeProductSpec, w: NormalForm, i: int) -> tuple[NormalForm, int]:
    """Canonical key of the coset w<g_i>: w with a trailing i-syllable removed."""
    if w and w[-1][0] == i:
        return w[:-1], i
    return w, i


def word_length(spec: FreeProductSpec, coned: bool):
    """Length function of the metric of record: coned-off syllable costs, or
    the word metric on the canonical generators."""
    if coned:
        return spec.cost
    return lambda w: sum(abs(e) for _, e in w)


def _ball_forms(
    spec: FreeProductSpec, R: int, cap: int, budget: int, coned: bool = True
) -> list[NormalForm]:
    length = word_length(spec, coned)
    # the cap only matters for the coned-off metric, where every power of a
    # Z generator sits two steps from the identity
    cap = cap if coned else max(cap, R)
    forms: list[NormalForm] = [()]
    frontier: list[NormalForm] = [()]
    while frontier:
        nxt = []
        for w in frontier:
            last = w[-1][0] if w else -1
            base = length(w)
            for i in range(len(spec.orders)):
                if i == last:
                    continue
                for e in spec.exponents(i, cap):
                    if base + length(((i, e),)) <= R:
                        nxt.append(w + ((i, e),))
        forms.extend(nxt)
        if len(forms) > budget:
            raise BudgetExceeded(f"ball of {spec} radius {R} exceeds {budget} vertices")
        frontier = nxt
    return forms


def _build_space(
    spec: FreeProductSpec, R: int, cap: int, coned: bool, budget: int
) -> TruncatedSpace:
    if R < 0:
        raise ValueError("radius must be non-negative")
    forms = _ball_forms(spec, R, cap, budget, coned)
    length = word_length(spec, coned)
    forms.sort(key=lambda w: (length(w), w))
    index = {w: v for v, w in enumerate(forms)}
    edges = set()
    for w, v in index.items():
        for i in range(len(spec.orders)):
            u = index.get(spec.multiply(w, ((i, 1),)))
            if u is not None and u != v:
                edges.add((min(u, v), max(u, v)))
    all_forms: list[NormalForm | None] = list(forms)
    cosets: dict[int, tuple[NormalForm, int]] = {}
    complete: dict[int, bool] = {}
    if coned:
        members: dict[tuple[NormalForm, int], list[int]] = {}
        for w, v in index.items():
            for i in range(len(spec.orders)):
                members.setdefault(coset_key(spec, w, i), []).append(v)
        keys = sorted(members, key=lambda k: (spec.cost(k[0]), k[0], k[1]))
        if len(forms) + len(keys) > budget:
            raise BudgetExceeded(f"coned-off ball exceeds {budget} vertices")
        for key in keys:
            c = len(all_forms)
            all_forms.append(None)
            cosets[c] = key
            m = spec.orders[key[1]]
            complete[c] = m is not None and len(members[key]) == m
            for v in members[key]:
                edges.add((v, c))
    labels = {v: format_word(w) for v, w in enumerate(forms)}
    for c, (p, i) in cosets.items():
        labels[c] = ("" if not p else format_word(p) + "*") + f"<{LETTERS[i]}>"
    kinds = {v: ("group" if w is not None else "cone") for v, w in enumerate(all_forms)}
    g = build_graph(sorted(edges), vertices=range(len(all_forms)), labels=labels, kinds=kinds)
    return TruncatedSpace(g, spec, R, coned, cap, tuple(all_forms), cosets, complete)


def coned_off_ball(
    spec: FreeProductSpec | str,
    R: int,
    exponent_cap: int = DEFAULT_EXPONENT_CAP,
    budget: int = DEFAULT_VERTEX_BUDGET,
) -> TruncatedSpace:
    """Coned-off Cayley ball: group elements within coned-off distance R of
    the identity, one apex per coset of a factor meeting the ball.

    Powers of an infinite generator all sit at coned-off distance 2 from each
    other, so only exponents up to ``exponent_cap`` in absolute value are
    materialized; apexes of such cosets are flagged incomplete.
    """
    if isinstance(spec, str):
        spec = FreeProductSpec.parse(spec)
    return _build_space(spec, R, exponent_cap, True, budget)


def cayley_ball(
    spec: FreeProductSpec | str, R: int, exponent_cap: int = DEFAULT_EXPONENT_CAP,
    budget: int = DEFAULT_VERTEX_BUDGET,
) -> TruncatedSpace:
    """Plain Cayley ball (no apexes) in the same normal-form coordinates."""
    if isinstance(spec, str):
        spec = FreeProductSpec.parse(spec)
    return _build_space(spec, R, exponent_cap, False, budget)


def regular_tree_ball(q: int, R: int) -> TruncatedSpace:
    """Ball of radius R in the q-regular tree, realised as the Cayley graph of
    the free product of q copies of Z/2."""
    if q < 2:
        raise ValueError("valence must be at least 2")
    spec = FreeProductSpec((2,) * q) if q <= MAX_FACTORS else None
    if spec is None:
        return _big_tree_ball(q, R)
    return cayley_ball(spec, R)


def _big_tree_ball(q: int, R: int) -> TruncatedSpace:
    # same construction without the factor cap
    spec = object.__new__(FreeProductSpec)
    object.__setattr__(spec, "orders", (2,) * q)
    return _build_space(spec, R, 1, False, DEFAULT_VERTEX_BUDGET)


@dataclass(frozen=True, eq=False)
class PartialGroupAction:
    """Left translation by ``element`` restricted to a ball around the base."""

    label: str
    element: NormalForm
    mapping: Mapping[int, int]
    displacement: int
    domain_radius: int
    space: TruncatedSpace

    @property
    def inverse(self) -> dict[int, int]:
        return {w: v for v, w in self.mapping.items()}

    def __call__(self, v: int) -> int:
        return self.mapping[v]


def left_translation(
    spec: FreeProductSpec | None, word: NormalForm | str, space: TruncatedSpace
) -> PartialGroupAction:
    """Vertex map v -> word.v on the ball B(base, R - |word|).

    Apexes follow their cosets.  Vertices whose image is not materialized
    are left out of the domain.
    """
    spec = space.spec if spec is None else spec
    if isinstance(word, str):
        word = spec.word(word)
    g = space.graph
    disp = word_length(spec, space.coned)(word)
    r_dom = space.radius - disp
    if r_dom < 0:
        raise EmptyDomain(f"{format_word(word)} moves the base outside radius {space.radius}")
    dist = all_pairs_distances(g).row(space.base)
    mapping: dict[int, int] = {}
    for v in np.flatnonzero(dist <= r_dom).tolist():
        w = space.forms[v]
        if w is not None:
            img = space.vertex_of(spec.multiply(word, w))
        else:
            p, i = space.cosets[v]
            img = space.cone_of(*coset_key(spec, spec.multiply(word, p), i))
        if img is not None:
            mapping[v] = img
    if not mapping:
        raise EmptyDomain(f"no vertex of the ball has a materialized image under {format_word(word)}")
    return PartialGroupAction(format_word(word), word, mapping, disp, r_dom, space)


def words_up_to(space: TruncatedSpace, d: int) -> list[NormalForm]:
    """Group elements of the ball with displacement 1..d, in id order."""
    spec = space.spec
    length = word_length(spec, space.coned)
    return [w for w in space.forms if w is not None and 0 < length(w) <= d]


# -- small fixtures -----------------------------------------------------------


def cycle(n: int) -> Graph:
    if n < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    return build_graph([(i, (i + 1) % n) for i in range(n)])


def path(n: int) -> Graph:
    if n < 1:
        raise ValueError("a path needs at least 1 vertex")
    return build_graph([(i, i + 1) for i in range(n - 1)], vertices=range(n))


def random_tree(n: int, seed: int) -> Graph:
    """Random recursive tree: vertex i attaches to a uniform earlier vertex."""
    if n < 1:
        raise ValueError("a tree needs at least 1 vertex")
    rng = np.random.default_rng(seed)
    parents = [int(rng.integers(0, i)) for i in range(1, n)]
    return build_graph([(p, i) for i, p in enumerate(parents, start=1)], vertices=range(n))


def star(m: int) -> Graph:
    return build_graph([(0, i) for i in range(1, m + 1)])


def parse_generator(text: str, radius: int = 3, seed: int = 0,
                    exponent_cap: int = DEFAULT_EXPONENT_CAP,
                    budget: int = DEFAULT_VERTEX_BUDGET) -> tuple[Graph, TruncatedSpace | None]:
    """Resolve a CLI generator string into a graph (and its space, if any)."""
    kind, _, arg = text.partition(":")
    if kind == "tree":
        sp = regular_tree_ball(int(arg), radius)
        return sp.graph, sp
    if kind == "cycle":
        return cycle(int(arg)), None
    if kind == "path":
        return path(int(arg)), None
    if kind == "random-tree":
        return random_tree(int(arg), seed), None
    if kind == "star":
        return star(int(arg)), None
    try:
        spec = FreeProductSpec.parse(text)
    except ValueError as exc:
        raise FineHypError(f"unknown generator {text!r}") from exc
    sp = coned_off_ball(spec, radius, exponent_cap, budget)
    return sp.graph, sp

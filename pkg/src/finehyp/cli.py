"""Command-line entry point: ``finehyp delta|audit|verify|report``.

Reports are JSON by default (CSV on request) and carry no timings, so a
rerun with the same configuration reproduces the output byte for byte.
Exit codes: 0 when every check passes, 1 on an invariant failure, 2 on a
budget or usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import kernels
from .errors import BudgetExceeded, FineHypError, GraphError
from .fine import angle_oracle, angle_triangle_inequality, cone, conical_thinness, fineness_report
from .generators import (
    DEFAULT_EXPONENT_CAP,
    DEFAULT_VERTEX_BUDGET,
    TruncatedSpace,
    format_word,
    left_translation,
    parse_generator,
    random_tree,
    words_up_to,
)
from .graph import Graph, all_pairs_distances, hyperbolicity_delta, read_graph, working_delta
from .hilbert import (
    GrowthBound,
    basepoint_matrix,
    check_decomposition,
    cocycle_norm_sq,
    decompose_class_general,
    decompose_class_tree,
    laminar_decomposition,
    measure_K,
    operator_norm,
    pi_operator_norm,
    theta,
    TriangleCache,
)
from .partitions import ClassIndex, local_determination_check
from .triangles import sweep_normal_triangles

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


@dataclass
class RunConfig:
    command: str
    graph: str | None = None
    gen: str | None = None
    radius: int = 3
    base: int = 0
    word: str | None = None
    delta: int | None = None
    out: str | None = None
    format: str = "json"
    seed: int = 0
    budget_vertices: int = DEFAULT_VERTEX_BUDGET
    budget_loops: int = 10_000_000
    exponent_cap: int = DEFAULT_EXPONENT_CAP
    loop_length: int = 4
    max_n: int = 4
    displacement: int = 2
    samples: int = 200
    ordered: bool = False
    tree_oracle: bool = False

    def source(self) -> str:
        return f"file:{self.graph}" if self.graph else f"gen:{self.gen}"


@dataclass
class Check:
    name: str
    ok: bool
    value: object = None
    witness: object = None

    def to_json(self) -> dict:
        out = {"name": self.name, "ok": self.ok}
        if self.value is not None:
            out["value"] = self.value
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class Report:
    command: str
    config: dict
    constants: dict = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)
    tables: dict[str, tuple[list[str], list[list]]] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def check(self, name: str, ok: bool, value=None, witness=None) -> None:
        self.checks.append(Check(name, bool(ok), value, witness))

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "config": self.config,
            "constants": self.constants,
            "checks": [c.to_json() for c in self.checks],
            "tables": {k: {"columns": cols, "rows": rows} for k, (cols, rows) in self.tables.items()},
            "ok": self.ok,
        }

    def dumps(self, fmt: str = "json") -> str:
        if fmt == "json":
            return json.dumps(_plain(self.to_json()), indent=2, sort_keys=True) + "\n"
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if self.tables:
            for name in sorted(self.tables):
                cols, rows = self.tables[name]
                w.writerow(["table"] + cols)
                for r in rows:
                    w.writerow([name] + [_cell(x) for x in r])
        else:
            w.writerow(["check", "ok", "value"])
            for c in self.checks:
                w.writerow([c.name, int(c.ok), _cell(c.value)])
        return buf.getvalue()


def _cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.10g}"
    if isinstance(x, (list, tuple, dict)):
        return json.dumps(_plain(x), sort_keys=True, separators=(",", ":"))
    return str(x)


def _plain(x):
    """JSON-safe copy: tuples to lists, Fractions to strings, numpy to Python."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, float):
        if x == float("inf"):
            return "inf"
        return round(x, 10)
    if isinstance(x, np.floating):
        return _plain(float(x))
    return x


# -- shared plumbing ----------------------------------------------------------


def load(cfg: RunConfig) -> tuple[Graph, TruncatedSpace | None]:
    if (cfg.graph is None) == (cfg.gen is None):
        raise ValueError("give exactly one of --graph and --gen")
    if cfg.graph is not None:
        return read_graph(cfg.graph), None
    return parse_generator(cfg.gen, cfg.radius, cfg.seed, cfg.exponent_cap, cfg.budget_vertices)


def _deltas(cfg: RunConfig, g: Graph, dm) -> tuple[int, int, dict]:
    """(measured delta, constant used in thresholds, report fields)."""
    if cfg.delta is not None:
        return cfg.delta, cfg.delta, {"delta": cfg.delta, "delta_source": "override"}
    est = hyperbolicity_delta(g, dm)
    dw = working_delta(g, est.delta)
    return est.delta, dw, {
        "delta": est.delta,
        "delta_working": dw,
        "delta_witness": list(est.witness) if est.witness else None,
        "delta_source": "measured",
    }


def _base(cfg: RunConfig, g: Graph, sp: TruncatedSpace | None) -> int:
    base = sp.base if sp is not None and cfg.graph is None else cfg.base
    if not 0 <= base < g.n:
        raise ValueError(f"base {base} is not a vertex")
    return base


def _header(cfg: RunConfig, g: Graph) -> Report:
    conf = {k: v for k, v in asdict(cfg).items() if k not in ("out", "format")}
    rep = Report(cfg.command, conf)
    rep.constants.update({"vertices": g.n, "edges": g.m, "tree": g.is_tree()})
    return rep


def _sample_triples(n: int, count: int, seed: int) -> list[tuple[int, int, int]]:
    rng = np.random.default_rng(seed)
    return [tuple(int(v) for v in rng.integers(0, n, 3)) for _ in range(count)]


# -- commands -----------------------------------------------------------------


def cmd_delta(cfg: RunConfig) -> Report:
    g, _ = load(cfg)
    dm = all_pairs_distances(g)
    rep = _header(cfg, g)
    _, _, fields = _deltas(cfg, g, dm)
    rep.constants.update(fields)
    rep.check("delta_nonnegative", fields["delta"] >= 0, fields["delta"])
    if g.is_tree():
        rep.check("tree_delta_zero", fields["delta"] == 0, fields["delta"])
    return rep


def cmd_audit(cfg: RunConfig) -> Report:
    g, sp = load(cfg)
    dm = all_pairs_distances(g)
    rep = _header(cfg, g)
    delta, dw, fields = _deltas(cfg, g, dm)
    rep.constants.update(fields)

    fr = fineness_report(g, cfg.loop_length, cfg.budget_loops)
    counts = sorted(set(fr.per_edge_loop_counts.values()))
    rep.constants.update({"L": fr.L, "phi_of_L": fr.phi_of_L, "loop_count_values": counts})
    rep.check("fineness_counted", True, fr.phi_of_L)

    theta = 50 * dw
    base = _base(cfg, g, sp)
    small_ok, big, big_edge, wit = True, 0, None, None
    certified, near_boundary = 0, 0
    for e in g.edges:
        c_small, c_big = cone(g, dm, e, 0), cone(g, dm, e, theta)
        if not (c_small.edges <= c_big.edges and e in c_small.edges):
            small_ok, wit = False, list(e)
        if len(c_big) > big:
            big, big_edge = len(c_big), list(e)
        # chains may leave the ball within theta of its boundary: lower bound only
        if sp is not None and max(dm[base, e[0]], dm[base, e[1]]) > sp.radius - theta:
            near_boundary += 1
        else:
            certified = max(certified, len(c_big))
    rep.constants.update({"cone_theta": theta, "cone_max_size": big, "cone_max_anchor": big_edge,
                          "cone_max_certified": certified if near_boundary < g.m else None,
                          "cone_lower_bound_only_edges": near_boundary})
    rep.check("cone_monotone", small_ok, None, wit)

    o = angle_oracle(g)
    checked, bad, w = kernels.angle_forcing_sweep(*g.csr, dm.d, o.off, o.data, 12 * dw)
    rep.check("angle_forcing", bad == 0, {"checked": int(checked), "counterexamples": int(bad)},
              None if bad == 0 else [int(t) for t in w])
    ok, w = angle_triangle_inequality(g)
    rep.check("angle_triangle_inequality", ok, None, None if ok else list(w))
    checked, bad, w = conical_thinness(g, dm, dw, _sample_triples(g.n, cfg.samples, cfg.seed))
    rep.check("conical_thinness", bad == 0, {"edges": checked, "failures": bad},
              None if w is None else list(w))
    return rep


def _verify_triangles(rep: Report, g: Graph, dw: int, ordered: bool) -> None:
    sw = sweep_normal_triangles(g, dw, ordered=ordered)
    rep.check("normal_triangles", sw.failures == 0,
              {"triples": sw.triples, "failures": sw.failures},
              None if sw.failure_witness is None else list(sw.failure_witness))
    rep.check("quasi_center_within_4delta", sw.max_quasi_center <= 4 * dw,
              sw.max_quasi_center,
              None if sw.max_quasi_center <= 4 * dw else list(sw.quasi_center_witness))


def _verify_partitions(rep: Report, g: Graph, dm, base: int, max_n: int, dw: int) -> ClassIndex:
    idx = ClassIndex(g, dm, base, max_n)
    ok, msg = idx.check_laminar()
    rep.check("partition_laminar", ok, len(idx), None if ok else msg)
    for variant in ("ball", "cone"):
        fail = None
        for n in range(1, max_n + 1):
            for k in range(1, n + 1):
                good, w = local_determination_check(g, dm, base, n, k, dw, variant, idx)
                if not good and fail is None:
                    fail = [n, k, *w]
        rep.check(f"local_determination_{variant}", fail is None, None, fail)
    return idx


def _partners(g: Graph, dm, sp: TruncatedSpace | None, base: int, dmax: int) -> list[int]:
    row = dm.row(base)
    pts = [v for v in range(g.n) if 0 < row[v] <= dmax]
    if sp is not None:
        pts = [v for v in pts if sp.forms[v] is not None]
    return pts


def _verify_decompositions(rep: Report, cfg: RunConfig, g: Graph, dm, sp, base: int,
                           dw: int, idx: ClassIndex) -> None:
    max_n = idx.max_n
    tree = g.is_tree()
    K = measure_K(g, dw, [idx])
    rep.constants.update({"L": K.L, "cone_224": K.cone_size, "K": K.K})
    bound = GrowthBound("tree") if tree else GrowthBound("general", K.K)
    fails, fallbacks, clamped, count_fail, exact_fail, oracle_fail = [], 0, 0, None, None, None
    rows = []
    rng = np.random.default_rng(cfg.seed)
    for xp in _partners(g, dm, sp, base, cfg.displacement):
        d = int(dm[base, xp])
        ip = ClassIndex(g, dm, xp, min(max_n + d, int(dm.row(xp).max())))
        cache = TriangleCache(g, dm, dw, base, xp)
        decs = []
        for c in idx:
            dec = decompose_class_general(g, dm, dw, idx, ip, c, cache)
            decs.append(dec)
            if not check_decomposition(dec).ok and len(fails) < 5:
                fails.append([xp, *c.key])
            fallbacks += dec.fallback
            clamped += dec.clamped
            if not tree and len(dec.positives) + len(dec.negatives) > K.K * (d + 1) and count_fail is None:
                count_fail = [xp, *c.key]
            if cfg.tree_oracle and tree:
                ref = decompose_class_tree(g, base, xp, c, ip)
                if _pieces(ref) != _pieces(dec) and oracle_fail is None:
                    oracle_fail = [xp, *c.key]
            if dec.fallback and not check_decomposition(laminar_decomposition(c, ip)).identity:
                if len(fails) < 5:
                    fails.append([xp, *c.key, "laminar"])
        A = basepoint_matrix(idx, ip, decs)
        support = np.flatnonzero(dm.row(base) <= max_n)
        f = {int(a): Fraction(int(rng.integers(-5, 6))) for a in support}
        if A.apply_exact(theta(ip, f)) != theta(idx, f) and exact_fail is None:
            exact_fail = xp
        nrm = operator_norm(A.to_scipy())
        rows.append([xp, d, A.row_support(), A.column_support(), nrm, bound(d)])
    rep.check("decomposition_identity", not fails, None, fails or None)
    rep.constants.update({"fallbacks": fallbacks, "clamped": clamped})
    rep.check("basepoint_matrix_exact", exact_fail is None, None, exact_fail)
    if not tree:
        rep.check("decomposition_counts_K", count_fail is None, K.K, count_fail)
    else:
        sup = [r for r in rows if r[2] > 2 * r[1] + 2 or r[3] > 2 * r[1] + 3]
        rep.check("tree_supports", not sup, None, [sup[0][0]] if sup else None)
    if cfg.tree_oracle and tree:
        rep.check("tree_oracle_agreement", oracle_fail is None, None, oracle_fail)
    over = [r for r in rows if r[4] > r[5] * (1 + 1e-9)]
    rep.check("basepoint_norm_bound", not over, max((r[4] / r[5] for r in rows), default=0.0),
              [over[0][0]] if over else None)
    rep.tables["basepoint"] = (["x_prime", "d", "row_support", "column_support", "norm", "bound"], rows)


def _pieces(dec) -> list[frozenset]:
    """Member sets P minus its negatives, one per positive piece."""
    out = []
    for i, p in enumerate(dec.positives):
        s = set(p.member_set)
        for q, par in zip(dec.negatives, dec.parent):
            if par == i:
                s -= q.member_set
        if s:
            out.append(frozenset(s))
    return sorted(out, key=sorted)


def _verify_growth(rep: Report, cfg: RunConfig, g: Graph, dm, sp: TruncatedSpace,
                   base: int, K: int) -> None:
    ecc = int(dm.row(base).max())
    idx = ClassIndex(g, dm, base, min(sp.radius, ecc))
    bound = GrowthBound("tree") if g.is_tree() else GrowthBound("general", K)
    words = [sp.spec.word(cfg.word)] if cfg.word else words_up_to(sp, cfg.displacement)
    rows, norm_fail, cocycle_fail = [], None, None
    for w in words:
        act = left_translation(None, w, sp)
        ge = act.mapping[base]
        d = int(dm[base, ge])
        nrm = pi_operator_norm(idx, act)
        cs = cocycle_norm_sq(idx, act)
        low = (d + 1) ** 2 + 4
        label = format_word(w)
        if nrm > bound(d) * (1 + 1e-9) and norm_fail is None:
            norm_fail = label
        if ge != base and cs < low and cocycle_fail is None:
            cocycle_fail = label
        rows.append([label, d, nrm, bound(d), cs, low])
    rep.check("pi_norm_bound", norm_fail is None, len(rows), norm_fail)
    rep.check("cocycle_growth", cocycle_fail is None, len(rows), cocycle_fail)
    rep.tables["growth"] = (["word", "d", "pi_norm", "bound", "cocycle_sq", "cocycle_low"], rows)


def cmd_verify(cfg: RunConfig) -> Report:
    g, sp = load(cfg)
    dm = all_pairs_distances(g)
    rep = _header(cfg, g)
    _, dw, fields = _deltas(cfg, g, dm)
    rep.constants.update(fields)
    base = _base(cfg, g, sp)
    _verify_triangles(rep, g, dw, cfg.ordered)
    max_n = min(cfg.max_n, int(dm.row(base).max()))
    idx = _verify_partitions(rep, g, dm, base, max_n, dw)
    _verify_decompositions(rep, cfg, g, dm, sp, base, dw, idx)
    if sp is not None and cfg.graph is None:
        _verify_growth(rep, cfg, g, dm, sp, base, rep.constants["K"])
    return rep


DEFAULT_MATRIX = (
    "random-tree:30", "random-tree:45", "tree:3",
    "cycle:5", "cycle:6", "cycle:8",
    "Z*Z", "Z2*Z3",
)


def cmd_report(cfg: RunConfig) -> Report:
    """Run delta, audit and verify over the fixture matrix; the CSV form is
    one row per (fixture, check)."""
    fixtures = [cfg.gen] if cfg.gen else list(DEFAULT_MATRIX)
    rep = Report("report", {k: v for k, v in asdict(cfg).items() if k not in ("out", "format")})
    rows = []
    for spec in fixtures:
        sub = RunConfig(**{**asdict(cfg), "gen": spec, "graph": None})
        for name, fn in (("audit", cmd_audit), ("verify", cmd_verify)):
            r = fn(RunConfig(**{**asdict(sub), "command": name}))
            for c in r.checks:
                rep.check(f"{spec}/{name}/{c.name}", c.ok, c.value, c.witness)
                rows.append([spec, name, c.name, int(c.ok), c.value])
            for key in ("delta", "K", "phi_of_L"):
                if key in r.constants:
                    rep.constants.setdefault(spec, {})[key] = r.constants[key]
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    rep.tables["summary"] = (["fixture", "command", "check", "ok", "value"], rows)
    return rep


COMMANDS = {"delta": cmd_delta, "audit": cmd_audit, "verify": cmd_verify, "report": cmd_report}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="finehyp", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    src = p.add_mutually_exclusive_group()
    src.add_argument("--graph", metavar="FILE", help="graph file (JSON or edge list)")
    src.add_argument("--gen", metavar="SPEC",
                     help="generator: Z*Z, Z2*Z3, tree:Q, cycle:N, path:N, random-tree:N, star:N")
    p.add_argument("--radius", type=int, default=3)
    p.add_argument("--base", type=int, default=0)
    p.add_argument("--word", help="single group word for verify, e.g. a^2b^-1")
    p.add_argument("--delta", type=int, help="override the hyperbolicity constant")
    p.add_argument("--out", metavar="PATH")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget-vertices", type=int, default=DEFAULT_VERTEX_BUDGET)
    p.add_argument("--budget-loops", type=int, default=10_000_000)
    p.add_argument("--exponent-cap", type=int, default=DEFAULT_EXPONENT_CAP)
    p.add_argument("--loop-length", type=int, default=4)
    p.add_argument("--max-n", type=int, default=4)
    p.add_argument("--displacement", type=int, default=2)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--ordered", action="store_true", help="sweep every ordering of each triple")
    p.add_argument("--tree-oracle", action="store_true")
    return p


def config_from_args(argv: Sequence[str] | None = None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    return RunConfig(**vars(ns))


def _error(cfg: RunConfig, exc: Exception, kind: str) -> str:
    err = {"command": cfg.command, "error": type(exc).__name__, "kind": kind, "message": str(exc)}
    return json.dumps(err, sort_keys=True) + "\n"


def run(cfg: RunConfig) -> tuple[int, str]:
    try:
        if cfg.command != "report" and (cfg.graph is None) == (cfg.gen is None):
            raise ValueError("give exactly one of --graph and --gen")
        rep = COMMANDS[cfg.command](cfg)
    except (BudgetExceeded, GraphError, ValueError, OSError) as exc:
        kind = "budget" if isinstance(exc, BudgetExceeded) else "usage"
        return EXIT_USAGE, _error(cfg, exc, kind)
    except FineHypError as exc:
        return EXIT_FAIL, _error(cfg, exc, "invariant")
    return (EXIT_OK if rep.ok else EXIT_FAIL), rep.dumps(cfg.format)


def main(argv: Sequence[str] | None = None) -> int:
    cfg = config_from_args(argv)
    code, text = run(cfg)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())

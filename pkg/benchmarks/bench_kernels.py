"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 3] [--json out.json]
"""
import argparse
import json
import sys
import timeit

from finehyp import _pykernels
from finehyp.fine import angle_oracle
from finehyp.generators import FreeProductSpec, coned_off_ball, random_tree

try:
    from finehyp import _ckernels
except ImportError:
    _ckernels = None


def cases(g):
    ip, ix = g.csr
    D = _pykernels.bfs_all_pairs(ip, ix)
    off, data = _pykernels.angle_table(ip, ix)
    nh = _pykernels.next_hop(ip, ix, D)
    ch = _pykernels.chain_table(ip, ix, D, off, data, 50)
    e = g.edges[0]
    return {
        "bfs_all_pairs": lambda k: k.bfs_all_pairs(ip, ix),
        "interval_delta": lambda k: k.interval_delta(D),
        "angle_table": lambda k: k.angle_table(ip, ix),
        "next_hop": lambda k: k.next_hop(ip, ix, D),
        "chain_table": lambda k: k.chain_table(ip, ix, D, off, data, 50),
        "count_cycle_paths": lambda k: k.count_cycle_paths(ip, ix, D, e[0], e[1], 5, 10**7),
        "angle_forcing_sweep": lambda k: k.angle_forcing_sweep(ip, ix, D, off, data, 12),
        "triangle_sweep": lambda k: k.triangle_sweep(ip, ix, D, nh, ch, off, data, 6, False),
    }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--json", help="also write the timings here")
    args = p.parse_args(argv)
    if _ckernels is None:
        print("compiled kernels are not built; nothing to compare", file=sys.stderr)
        return 1
    graphs = {
        "coned-off Z*Z R=2": coned_off_ball(FreeProductSpec.parse("Z*Z"), 2).graph,
        "coned-off Z2*Z3 R=4": coned_off_ball(FreeProductSpec.parse("Z2*Z3"), 4).graph,
        "random tree n=60": random_tree(60, 0),
    }
    rows = []
    print(f"{'graph':22} {'kernel':20} {'python s':>10} {'cython s':>10} {'speedup':>8}")
    for name, g in graphs.items():
        for kname, fn in cases(g).items():
            t_py = min(timeit.repeat(lambda: fn(_pykernels), number=1, repeat=args.repeat))
            t_cy = min(timeit.repeat(lambda: fn(_ckernels), number=1, repeat=args.repeat))
            rows.append({"graph": name, "n": g.n, "kernel": kname, "python": t_py, "cython": t_cy})
            print(f"{name:22} {kname:20} {t_py:10.4f} {t_cy:10.4f} {t_py / max(t_cy, 1e-9):8.1f}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)
            fh.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Compare the compiled and pure-Python kernels on representative workloads.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Each workload runs on both backends, checks that the results agree and
prints the best wall time of each and the speedup.
"""

import argparse
import random
import sys
import time

from bilipfrac import _pykernels
from bilipfrac.codemap import EigData, build_upper_map, build_zero_rank_map
from bilipfrac.kernels import compiled_available
from bilipfrac.matrix import LAYERED4


def best_time(fn, repeat):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def walk_workloads():
    zero = build_zero_rank_map(EigData(((1, 2), (3, 2)), 4, (2, 3)), 3)
    upper = build_upper_map(EigData(LAYERED4, 4, (1, 2, 2, 3)), 12)
    for name, cmap, depth in [("zero-rank block, M=64, depth 3", zero, 3),
                              ("upper map, M=4, depth 12", upper, 12)]:
        tables = [list(t) if t is not None else [] for t in cmap.tables]
        yield name, (tables, cmap.roots(), cmap.base, depth)


def cluster_workload(count=4000, seed=1):
    rng = random.Random(seed)
    pts = sorted({(rng.randrange(-20000, 20000), rng.randrange(-20000, 20000)) for _ in range(count)})
    qint = ((2, 1), (1, 2))
    return "clustering, 4000 planar points", (pts, qint, 2 * 300 ** 2, 400)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if not compiled_available():
        print("compiled extension not built; nothing to compare")
        return 1
    from bilipfrac import _ckernels

    rows = []
    for name, params in walk_workloads():
        tp, rp = best_time(lambda: _pykernels.walk_step_tables(*params), args.repeat)
        tc, rc = best_time(lambda: _ckernels.walk_step_tables(*params), args.repeat)
        assert rp == rc, name
        rows.append((name, rp[0], tp, tc))
    name, params = cluster_workload()
    tp, rp = best_time(lambda: _pykernels.cluster_labels(*params), args.repeat)
    tc, rc = best_time(lambda: _ckernels.cluster_labels(*params), args.repeat)
    assert rp == rc, name
    rows.append((name, len(set(rp)), tp, tc))

    print(f"{'workload':34s} {'size':>10s} {'python s':>10s} {'cython s':>10s} {'speedup':>8s}")
    for name, size, tp, tc in rows:
        print(f"{name:34s} {size:10d} {tp:10.4f} {tc:10.4f} {tp / tc:8.1f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

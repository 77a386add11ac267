"""Benchmark the subset-sum backends on one instance.

Compares the exact cyclotomic engine against the float mirror with the numba
kernel and with the pure-numpy fallback (selected by TRIQUOT_NO_NUMBA).  The
float backend is a cross-check and sweep accelerator, never the arbiter, so
the interesting numbers are the exact path's cost and the numba-vs-numpy gap.

Run:  python benchmarks/bench_vi.py [--n 24 --r 4 --g 2 --d 9 --N 34] [--repeat 5]
"""

import argparse
import os
import statistics
import sys
from time import perf_counter

from triquot.quotvi import VIConvention, VIInstance, floatkern, vi_sum


def time_call(fn, repeat):
    times = []
    value = None
    for _ in range(repeat):
        t0 = perf_counter()
        value = fn()
        times.append(perf_counter() - t0)
    return value, min(times), statistics.median(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=24)
    ap.add_argument("--r", type=int, default=4)
    ap.add_argument("--g", type=int, default=2)
    ap.add_argument("--d", type=int, default=9)
    ap.add_argument("--N", type=int, default=34)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args(argv)

    inst = VIInstance(n=args.n, r=args.r, g=args.g, d=args.d, N=args.N)
    conv = VIConvention(root_target=-1, phase=1, weight_exponent_tweak=0)
    print(f"instance: n={inst.n} r={inst.r} g={inst.g} d={inst.d} N={inst.N} "
          f"({__import__('math').comb(inst.n, inst.r)} subsets)")
    print(f"numba available: {floatkern.HAS_NUMBA}")

    rows = []
    value, best, med = time_call(
        lambda: vi_sum(inst, conv, "exact", workers=args.workers), args.repeat)
    rows.append(("exact cyclotomic", value, best, med))

    if floatkern.HAS_NUMBA:
        os.environ.pop("TRIQUOT_NO_NUMBA", None)
        vi_sum(inst, conv, "float")  # compile outside the timed region
        fvalue, best, med = time_call(
            lambda: vi_sum(inst, conv, "float"), args.repeat)
        rows.append(("float (numba kernel)", fvalue, best, med))

    os.environ["TRIQUOT_NO_NUMBA"] = "1"
    fvalue, best, med = time_call(lambda: vi_sum(inst, conv, "float"), args.repeat)
    rows.append(("float (numpy fallback)", fvalue, best, med))
    os.environ.pop("TRIQUOT_NO_NUMBA", None)

    print(f"\n{'backend':<24} {'value':>16} {'best':>10} {'median':>10}")
    for name, val, best, med in rows:
        print(f"{name:<24} {val:>16} {best * 1e3:>8.2f}ms {med * 1e3:>8.2f}ms")

    values = {val for _, val, _, _ in rows}
    if len(values) != 1:
        print("\nbackends disagree!", values, file=sys.stderr)
        return 1
    base = rows[0][2]
    for name, _, best, _ in rows[1:]:
        print(f"{name}: {base / best:.1f}x faster than exact")
    return 0


if __name__ == "__main__":
    sys.exit(main())

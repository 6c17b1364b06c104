"""Compare the compiled and pure-Python kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat N] [--scale S]

Each case is timed with ``timeit`` (best of ``--repeat``). Results must be
identical between the two backends; the script checks this before timing.
"""
import argparse
import math
import timeit

from hyptail import _pykernels
from hyptail.growth import SauerShelah

try:
    from hyptail import _ckernels
except ImportError:
    _ckernels = None

LD05 = math.log(0.05)


def scan_args(k, m, d, hi):
    # one HTI m'-scan: a population and log-threshold per ghost size
    g = SauerShelah(d)
    pops = [m + mp for mp in range(1, hi + 1)]
    thr = [LD05 - math.log(4) - g.log_growth(M) for M in pops]
    return k, m, pops, thr


def cases(scale):
    return [
        ("tail k=0 M=9000", "hyp_tail_log", (0, 2000, 1500, 9000), 2000),
        ("tail k=800 M=21000", "hyp_tail_log", (800, 1000, 4000, 21000), 200),
        ("bisect k=0 M=9000", "hyp_tail_inv_bisect", (0, 2000, -250.0, 9000), 500),
        ("bisect k=800 M=21000", "hyp_tail_inv_bisect", (800, 1000, -120.0, 21000), 20),
        ("linear k=3 M=4000", "hyp_tail_inv_linear", (3, 2000, -60.0, 4000), 200),
        ("lower k=10 M=9000", "hyp_tail_lower_inv", (10, 2000, -250.0, 9000, math.nan), 200),
        ("bin_tail_inv m=2000 k=100", "bin_tail_inv", (2000, 100, -20.0), 20),
        (f"m'-scan k=0 m=1000 ({2000 * scale} pts)", "hyp_tail_inv_bisect_many",
         scan_args(0, 1000, 20, 2000 * scale), 1),
        (f"m'-scan k=100 m=1000 ({500 * scale} pts)", "hyp_tail_inv_bisect_many",
         scan_args(100, 1000, 20, 500 * scale), 1),
    ]


def best_time(fn, args, number, repeat):
    return min(timeit.repeat(lambda: fn(*args), number=number, repeat=repeat)) / number


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--scale", type=int, default=1, help="multiply the m'-scan sizes")
    args = p.parse_args(argv)

    backends = [("python", _pykernels)]
    if _ckernels is not None:
        backends.insert(0, ("cython", _ckernels))
    else:
        print("compiled backend not built; timing the Python fallback only")

    print(f"{'case':<36}" + "".join(f"{name:>14}" for name, _ in backends) + ("   speedup" if len(backends) > 1 else ""))
    for label, fname, fargs, number in cases(args.scale):
        results = [getattr(mod, fname)(*fargs) for _, mod in backends]
        if any(r != results[0] for r in results):
            raise SystemExit(f"backends disagree on {label}: {results}")
        times = [best_time(getattr(mod, fname), fargs, number, args.repeat) for _, mod in backends]
        row = f"{label:<36}" + "".join(f"{t * 1e6:>12.1f}us" for t in times)
        if len(times) > 1:
            row += f"  {times[1] / times[0]:>7.1f}x"
        print(row)


if __name__ == "__main__":
    main()

"""Compare the GMP tableau kernel with the pure-Python fallback.

    python3 benchmarks/bench_kernel.py [--sizes 8 16 32] [--repeat 3]

Both kernels solve the same random rational LPs and the same superhedging
programs from generated markets; the script checks that the answers agree.
"""

import argparse
import random
import statistics
import time
from fractions import Fraction

from knightmark.fuzz import GeneratorConfig, generate_market
from knightmark.io import build_setup
from knightmark.lp import LE, LinearProgram, available_backends, solve
from knightmark.superhedge import hedge_program


def random_lp(rng, m, n):
    rows = [[Fraction(rng.randint(-9, 9), rng.randint(1, 7)) for _ in range(n)] for _ in range(m)]
    rhs = [Fraction(rng.randint(0, 20), rng.randint(1, 5)) for _ in range(m)]
    obj = [Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(n)]
    bounds = [(Fraction(0), Fraction(10))] * n
    return LinearProgram.build(obj, rows, [LE] * m, rhs, bounds, "max")


def market_lps(count, seed):
    out = []
    rng = random.Random(seed)
    for i in range(count):
        s = build_setup(generate_market(GeneratorConfig(max_states=12, max_times=3), seed + i))
        x = [Fraction(rng.randint(-4, 4)) for _ in range(s.market.n)]
        out.append(hedge_program(s.market, s.order, x))
    return out


def time_kernel(cls, lps, repeat):
    samples, answers = [], None
    for _ in range(repeat):
        t0 = time.perf_counter()
        res = [solve(lp, tableau_cls=cls) for lp in lps]
        samples.append(time.perf_counter() - t0)
        answers = [(r.status, r.objective) for r in res]
    return min(samples), statistics.median(samples), answers


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[8, 16, 32])
    ap.add_argument("--count", type=int, default=20, help="LPs per workload")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    kernels = available_backends()
    if "gmp" not in kernels:
        print("compiled kernel not built; only the Python kernel is available")
    rng = random.Random(args.seed)
    workloads = [(f"random {k}x{k}", [random_lp(rng, k, k) for _ in range(args.count)]) for k in args.sizes]
    workloads.append(("superhedge, fuzz markets", market_lps(args.count, args.seed)))

    print(f"{'workload':<28}" + "".join(f"{name + ' best (s)':>18}" for name in kernels) + f"{'speed-up':>10}")
    for label, lps in workloads:
        timings, answers = {}, {}
        for name, cls in kernels.items():
            best, _, answers[name] = time_kernel(cls, lps, args.repeat)
            timings[name] = best
        if len(set(map(tuple, answers.values()))) != 1:
            raise SystemExit(f"kernels disagree on {label}")
        ratio = timings["python"] / timings["gmp"] if "gmp" in timings else float("nan")
        print(f"{label:<28}" + "".join(f"{timings[n]:>18.4f}" for n in kernels) + f"{ratio:>9.1f}x")


if __name__ == "__main__":
    main()

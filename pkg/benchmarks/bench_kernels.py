"""Compiled versus pure-Python kernels on enumeration and Gaussian sums.

Run ``python3 benchmarks/bench_kernels.py``; prints a CSV table. Both
backends must return the same point sets and sums agreeing to rounding.
"""
import argparse
import csv
import sys
import time

import numpy as np

from tubetheta import kernels
from tubetheta.lattice import enumerate_coefficients, norm_lex_order


def _best(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return out, best


def cases():
    rng = np.random.default_rng(0)
    for n, bound in ((2, 400.0), (3, 150.0), (4, 60.0), (6, 18.0)):
        B = np.eye(n) + 0.2 * rng.standard_normal((n, n))
        gram = B.T @ B
        A = gram * 1j * 0.05 + 0.1 * (rng.standard_normal((n, n)))
        A = (A + A.T) / 2
        b = 0.3 * rng.standard_normal(n) + 0.01j * rng.standard_normal(n)
        yield f"dim{n}", gram, bound, A, b


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if kernels.compiled is None:
        print("compiled extension not built; only the Python kernel is available", file=sys.stderr)
    backends = [k for k in ("python", "compiled") if k == "python" or kernels.compiled is not None]
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["case", "kernel", "points", "enumerate_s", "sum_s", "sum_re", "sum_im"])
    for label, gram, bound, A, b in cases():
        ref = None
        for name in backends:
            (ks, norms), t_enum = _best(lambda: enumerate_coefficients(gram, bound, 10**7, name), args.repeat)
            ks = np.ascontiguousarray(ks[norm_lex_order(ks, norms)])
            s, t_sum = _best(lambda: kernels.get(name).gauss_sum(ks, A, b), args.repeat)
            if ref is None:
                ref = (ks, s)
            else:
                assert np.array_equal(ref[0], ks), "backends enumerate different points"
                assert abs(ref[1] - s) <= 1e-12 * max(1.0, abs(s)) * len(ks) ** 0.5, "sums differ"
            w.writerow([label, name, len(ks), f"{t_enum:.6f}", f"{t_sum:.6f}", f"{s.real:.17g}", f"{s.imag:.17g}"])


if __name__ == "__main__":
    main()

"""Compare the compiled and numpy series kernels.

    python benchmarks/bench_kernels.py [--repeat N]

Times jet products and Taylor compositions over a range of variable
counts and truncation orders, checks that both backends agree, and prints
one row per case.
"""

import argparse
import timeit

import numpy as np

from halfheat import _kernels_py
from halfheat.series import _product_table, monomials

try:
    from halfheat import _kernels as _compiled
except ImportError:
    _compiled = None

CASES = [(1, 8), (2, 4), (2, 6), (2, 8), (3, 4), (3, 6), (3, 8)]


def _inputs(nvars, order, rng):
    n = len(monomials(nvars, order))
    p, q, r = _product_table(nvars, order)
    a, b = rng.normal(size=n), rng.normal(size=n)
    a[0] = 0.0
    taylor = rng.normal(size=order + 1)
    return n, p, q, r, a, b, taylor


def _best(stmt, repeat, number):
    return min(timeit.repeat(stmt, repeat=repeat, number=number)) / number


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--number", type=int, default=200)
    args = ap.parse_args(argv)
    if _compiled is None:
        print("compiled extension not built; only the numpy backend is timed")
    rng = np.random.default_rng(0)
    print(f"{'vars':>4} {'order':>5} {'terms':>6} {'kernel':>7} {'numpy us':>10} {'cython us':>10} {'speedup':>8}")
    for nvars, order in CASES:
        n, p, q, r, a, b, taylor = _inputs(nvars, order, rng)
        for name, py, cy in (
            ("mul", lambda: _kernels_py.mul(a, b, p, q, r, n),
             _compiled and (lambda: _compiled.mul(a, b, p, q, r, n))),
            ("horner", lambda: _kernels_py.horner(a, taylor, p, q, r, n),
             _compiled and (lambda: _compiled.horner(a, taylor, p, q, r, n))),
        ):
            t_py = _best(py, args.repeat, args.number)
            if cy:
                if not np.allclose(py(), cy(), rtol=1e-12, atol=1e-12):
                    raise SystemExit(f"backends disagree on {name} ({nvars} vars, order {order})")
                t_cy = _best(cy, args.repeat, args.number)
                print(f"{nvars:4d} {order:5d} {n:6d} {name:>7} {t_py * 1e6:10.2f} {t_cy * 1e6:10.2f} "
                      f"{t_py / t_cy:8.1f}")
            else:
                print(f"{nvars:4d} {order:5d} {n:6d} {name:>7} {t_py * 1e6:10.2f} {'-':>10} {'-':>8}")


if __name__ == "__main__":
    main()

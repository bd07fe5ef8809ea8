#!/usr/bin/env python3
"""Compare the named complex-multiplication decompositions: term count,
verification error against the structure tensor, and the coefficient-sum
stability measure (lower is numerically gentler; the 3-term 'cube' family
matches the 4-term schoolbook measure while using the minimum number of
multiplications)."""

import sys

import bilinear_kernels as bk


def main() -> int:
    T = bk.complex_mul_tensor()
    print(f"{'preset':8s} {'terms':>5s} {'measure':>12s} {'error':>10s}")
    ok = True
    for preset in ("usual", "gauss", "cube"):
        D = bk.complex_mul_decomposition(preset)
        rep = bk.verify_decomposition(T, D, 1e-9)
        ok &= rep.passed
        print(f"{preset:8s} {rep.term_count:5d} {bk.stability_measure(D):12.8f} "
              f"{rep.max_abs_error:10.2e}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())

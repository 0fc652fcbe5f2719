#!/usr/bin/env python3
"""Benchmark the pure-Python and compiled elimination kernels on real
differential matrices and on random sparse rational matrices.

Usage: python benchmarks/bench_backends.py [--quick]
"""

import argparse
import random
import time
from fractions import Fraction

from supercohom import kernels
from supercohom.algebra import AlgebraBasis, StructureTable, parse_algebra_spec
from supercohom.cochains import differential_matrix_between, enumerate_cell_basis


def differential_pairs(spec_str, k, g):
    spec = parse_algebra_spec(spec_str)
    basis = AlgebraBasis(spec)
    table = StructureTable(spec, basis)
    dom = enumerate_cell_basis(basis, k, g)
    tgt = enumerate_cell_basis(basis, k + 1, g)
    mat = differential_matrix_between(basis, table, dom, tgt)
    return mat.to_pairs(), len(dom), f"{spec_str} d_{k} at grade {g}"


def random_pairs(rng, nrows, ncols, density):
    rows = []
    for _ in range(nrows):
        row = {}
        for c in range(ncols):
            if rng.random() < density:
                f = Fraction(rng.randint(-9, 9), rng.randint(1, 6))
                if f:
                    row[c] = (f.numerator, f.denominator)
        rows.append(row)
    return rows, ncols, f"random {nrows}x{ncols} density {density}"


def bench(backends, rows, ncols, label):
    nnz = sum(len(r) for r in rows)
    print(f"\n{label}  ({len(rows)}x{ncols}, nnz={nnz})")
    base = None
    reference = None
    for name, mod in backends.items():
        start = time.perf_counter()
        out = mod.rref_pairs([dict(r) for r in rows], ncols, True, False)
        elapsed = time.perf_counter() - start
        if reference is None:
            reference = out
        else:
            assert out[0] == reference[0] and out[1] == reference[1], (
                "backends disagree!"
            )
        speedup = "" if base is None else f"  ({base / elapsed:.1f}x vs pure)"
        if base is None:
            base = elapsed
        print(f"  {name:>8}: {elapsed:8.3f}s  rank={len(out[1])}{speedup}")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true", help="small cases only")
    args = parser.parse_args()

    backends = kernels.available_backends()
    print("available backends:", ", ".join(backends))
    if len(backends) == 1:
        print("note: compiled kernel missing, timing the pure kernel only")

    rng = random.Random(12345)
    cases = [random_pairs(rng, 60, 80, 0.15)]
    cases.append(differential_pairs("SH(0|4)", 3, 0))
    if not args.quick:
        cases.append(differential_pairs("SH(0|4)", 4, 0))
        cases.append(differential_pairs("Po(0|4)", 4, 2))
        cases.append(random_pairs(rng, 250, 300, 0.05))
    for rows, ncols, label in cases:
        bench(backends, rows, ncols, label)


if __name__ == "__main__":
    main()

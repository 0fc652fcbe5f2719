"""Structural invariant suites: super skew-symmetry, the Jacobi identity,
d²=0 across cells, and the off-grade vanishing for grading-element
extensions.  Used by the CLI `check` command and by the test suite."""

from __future__ import annotations

import random

from .algebra import AlgebraBasis, StructureTable
from .cochains import TRIVIAL
from .engine import CohomologyEngine


def _bracket_raw(table, ea, eb):
    """Bracket straight from the defining formula (no symmetry shortcut)."""
    return table._bracket_elements(ea, eb)


def skew_symmetry_violations(spec, elements=None, samples=0, seed=0):
    """Pairs where [x,y] != -(-1)^(p(x)p(y)) [y,x], computed independently."""
    basis = AlgebraBasis(spec)
    table = StructureTable(spec, basis)
    if elements is None:
        elements = _default_elements(basis, samples, seed)
    bad = []
    for ea, eb in _pairs(elements, samples, seed):
        left = _bracket_raw(table, ea, eb)
        right = _bracket_raw(table, eb, ea)
        sign = 1 if (ea.parity and eb.parity) else -1
        flipped = {k: sign * v for k, v in right.items() if v}
        if left != flipped:
            bad.append((ea.key, eb.key))
    return bad


def jacobi_violations(spec, elements=None, samples=0, seed=0):
    """Triples violating [f,[g,h]] = [[f,g],h] + (-1)^(p(f)p(g)) [g,[f,h]]."""
    basis = AlgebraBasis(spec)
    table = StructureTable(spec, basis)
    if elements is None:
        elements = _default_elements(basis, samples, seed)
    bad = []
    for ef, eg, eh in _triples(elements, samples, seed):
        f = {ef.key: 1}
        g = {eg.key: 1}
        h = {eh.key: 1}
        lhs = table.bracket_combo(f, table.bracket_combo(g, h))
        rhs = table.bracket_combo(table.bracket_combo(f, g), h)
        sign = -1 if (ef.parity and eg.parity) else 1
        for k, v in table.bracket_combo(g, table.bracket_combo(f, h)).items():
            cur = rhs.get(k, 0) + sign * v
            if cur:
                rhs[k] = cur
            else:
                rhs.pop(k, None)
        if lhs != rhs:
            bad.append((ef.key, eg.key, eh.key))
    return bad


def _default_elements(basis, samples, seed):
    spec = basis.spec
    if spec.is_finite:
        return basis.all_elements()
    # weight window wide enough for interesting brackets
    lo = spec.min_weight
    return basis.window(lo, lo + 6)


def _pairs(elements, samples, seed):
    if not samples:
        return [(a, b) for a in elements for b in elements]
    rng = random.Random(seed)
    return [
        (rng.choice(elements), rng.choice(elements)) for _ in range(samples)
    ]


def _triples(elements, samples, seed):
    if not samples:
        return [
            (a, b, c) for a in elements for b in elements for c in elements
        ]
    rng = random.Random(seed)
    return [
        (rng.choice(elements), rng.choice(elements), rng.choice(elements))
        for _ in range(samples)
    ]


def d_square_violations(engine, degrees, grades):
    """Cells where the product of consecutive differentials is nonzero."""
    bad = []
    for g in range(grades[0], grades[1] + 1):
        for k in range(degrees[0], degrees[1] + 1):
            m1 = engine.dmatrix(k, g)
            m2 = engine.dmatrix(k + 1, g)
            if not m2.matmul(m1).is_zero():
                bad.append((k, g))
    return bad


def run_check_suites(spec, module=TRIVIAL, degrees=(0, 3), grades=(-3, 3),
                     samples=1000, seed=2024, max_cell=None):
    """Run all invariant suites; returns a list of (name, ok, detail)."""
    results = []
    exhaustive = spec.is_finite and spec.vars.m <= 4

    n_samples = 0 if exhaustive else samples
    skew = skew_symmetry_violations(spec, samples=n_samples, seed=seed)
    mode = "exhaustive" if exhaustive else f"{samples} samples"
    results.append(
        ("skew-symmetry", not skew, f"{mode}, {len(skew)} violations")
    )
    jac = jacobi_violations(spec, samples=n_samples, seed=seed)
    jac_mode = "exhaustive" if exhaustive else f"{samples} samples"
    results.append(("jacobi", not jac, f"{jac_mode}, {len(jac)} violations"))

    kwargs = {}
    if max_cell:
        kwargs["max_cell"] = max_cell
    engine = CohomologyEngine(spec, module, **kwargs)
    dsq = d_square_violations(engine, degrees, grades)
    results.append(
        (
            "d-squared",
            not dsq,
            f"degrees {degrees[0]}..{degrees[1]}, grades {grades[0]}..{grades[1]}, "
            f"{len(dsq)} violations",
        )
    )

    # the quotient procedure hard-fails on any rank/dimension mismatch, so
    # sweeping the window doubles as the dimension-formula cross-check
    cells = 0
    for g in range(grades[0], grades[1] + 1):
        for k in range(degrees[0], degrees[1] + 1):
            engine.compute_cell(k, g, representatives=False)
            cells += 1
    results.append(
        ("dimension-formula", True, f"{cells} cells cross-checked")
    )

    if spec.has_grading_element:
        rep = engine.grading_vanishing_check(4, range(-3, 4))
        results.append(
            (
                "grading-element-vanishing",
                rep.ok,
                f"{rep.cells_checked} off-grade cells, "
                f"{len(rep.failures)} nonzero",
            )
        )
    return results

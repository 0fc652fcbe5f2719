"""Shared test utilities: cochain builders and the printed-fixture matcher."""

from fractions import Fraction
from itertools import product

from supercohom.algebra import parse_monomial
from supercohom.cochains import Cochain


def build_cochain(engine, degree, terms, module="trivial"):
    """terms: list of (coeff, [monomial strings]) over engine's algebra."""
    basis = engine.basis
    vars = engine.spec.vars
    acc = {}
    for coeff, args in terms:
        tup = tuple(
            basis.grading_key() if a == "G" else basis.key_of(parse_monomial(vars, a))
            for a in args
        )
        acc[tup] = acc.get(tup, 0) + Fraction(coeff)
    return Cochain(engine.spec, degree, module, acc, basis=basis)


def random_cochain(engine, rng, degree, grade, max_terms=3, module="trivial"):
    cell = engine.cell(degree, grade)
    if not len(cell):
        return None
    picks = rng.sample(cell.items, min(max_terms, len(cell)))
    terms = {item: Fraction(rng.randint(-4, 4)) for item in picks}
    return Cochain(
        engine.spec, degree, module, terms, weight=grade, basis=engine.basis
    )


def match_printed_fixture(engine, rep, degree, printed_terms, chained=False):
    """Is the computed representative cohomologous (free scalar) to the
    printed expression?

    The printed forms are reproduced up to per-term sign flips (the odd
    derivative side convention is not pinned down by the source tables),
    so every sign pattern with the first term positive is tried; for
    chained equalities each single term is also accepted on its own.
    """
    candidates = []
    if chained:
        candidates.extend([t] for t in printed_terms)
    candidates.append(list(printed_terms))
    for cand in candidates:
        for signs in product((1, -1), repeat=len(cand) - 1):
            fixture = build_cochain(
                engine,
                degree,
                [
                    (coeff * s, args)
                    for (coeff, args), s in zip(cand, (1,) + signs)
                ],
            )
            if not engine.verify_cocycle(fixture):
                continue
            equal, lam = engine.equal_mod_coboundaries(rep, fixture)
            if equal and lam is not None:
                return True, lam
    return False, None


# printed generator expressions for SH(0|4)
SH04_A_TERMS = [(1, [f"U_{i}", f"U_{i}"]) for i in range(1, 5)]
SH04_B_TERMS = [
    (1, ["U_4", "U_1 U_2 U_3"]),
    (1, ["U_1", "U_2 U_3 U_4"]),
    (1, ["U_2", "U_1 U_3 U_4"]),
    (1, ["U_3", "U_1 U_2 U_4"]),
]
SH04_C_TERMS = [
    (1, ["U_2 U_3 U_4", "U_2 U_3 U_4"]),
    (1, ["U_1 U_2 U_3", "U_1 U_2 U_3"]),
    (1, ["U_1 U_2 U_4", "U_1 U_2 U_4"]),
    (1, ["U_1 U_3 U_4", "U_1 U_3 U_4"]),
]
SH04_F_TERMS = [
    (1, ["U_1 U_4", "U_2 U_4", "U_3 U_4"]),
    (Fraction(1, 2), ["U_1 U_4", "U_1", "U_1 U_2 U_3"]),
    (Fraction(1, 2), ["U_1 U_4", "U_4", "U_2 U_3 U_4"]),
    (Fraction(1, 2), ["U_2 U_4", "U_2", "U_1 U_2 U_3"]),
    (Fraction(-1, 2), ["U_2 U_4", "U_4", "U_1 U_3 U_4"]),
    (Fraction(1, 2), ["U_3 U_4", "U_3", "U_1 U_2 U_3"]),
    (Fraction(1, 2), ["U_3 U_4", "U_4", "U_1 U_2 U_4"]),
]

# SH(0|3) generators
SH03_A_TERMS = [(1, [f"U_{i}", f"U_{i}"]) for i in range(1, 4)]
SH03_F_TERMS = [(1, ["U_1 U_2", "U_1 U_3", "U_2 U_3"])]

# degree-7 generator of the hat Hamiltonian algebra
HHAT20_A7_TERMS = [
    (1, ["q", "p", "q^2", "pq", "p^2", "q^3", "p^3"]),
    (-3, ["q", "p", "q^2", "pq", "p^2", "pq^2", "p^2q"]),
]

import json
import random
from fractions import Fraction

import pytest

from helpers import (
    HHAT20_A7_TERMS,
    SH03_A_TERMS,
    SH03_F_TERMS,
    SH04_A_TERMS,
    SH04_B_TERMS,
    SH04_C_TERMS,
    SH04_F_TERMS,
    build_cochain,
    match_printed_fixture,
    random_cochain,
)
from supercohom.cochains import Cochain
from supercohom.engine import CohomologyEngine, compute_cell, compute_table
from supercohom.errors import ResourceCapExceeded


class TestComputeCell:
    def test_sh04_f_cell(self, engines):
        eng = engines("SH(0|4)")
        rec = eng.compute_cell(3, 0)
        assert rec.dim_H == 1
        ok, lam = match_printed_fixture(
            eng, rec.representatives[0], 3, SH04_F_TERMS
        )
        assert ok and lam

    def test_sh04_degree_one_row_empty(self, engines):
        eng = engines("SH(0|4)")
        for g in range(-6, 7):
            assert eng.compute_cell(1, g, representatives=False).dim_H == 0

    def test_hhat_degree_seven(self, engines):
        eng = engines("HHat(2|0)")
        assert eng.compute_cell(7, 0, representatives=False).dim_H == 1

    def test_h0_is_scalars(self, engines):
        eng = engines("SH(0|4)")
        rec = eng.compute_cell(0, 0)
        assert rec.dim_H == 1
        assert rec.representatives[0].terms == {(): Fraction(1)}
        assert eng.compute_cell(0, 2, representatives=False).dim_H == 0

    def test_every_representative_is_nontrivial_cocycle(self, engines):
        eng = engines("SH(0|4)")
        for (k, g) in [(2, -2), (2, 0), (2, 2), (3, 0), (4, 0)]:
            for rep in eng.compute_cell(k, g).representatives:
                assert eng.verify_cocycle(rep)
                assert eng.is_coboundary(rep) is None

    def test_resource_cap(self):
        eng = CohomologyEngine("SH(0|4)", max_cell=5)
        with pytest.raises(ResourceCapExceeded):
            eng.compute_cell(2, -2)

    def test_wrapper_function(self):
        rec = compute_cell("SH(0|3)", "trivial", 2, -2)
        assert rec.dim_H == 1


class TestPrintedFixtures:
    def test_generator_a(self, engines):
        eng = engines("SH(0|4)")
        rep = eng.compute_cell(2, -2).representatives[0]
        ok, lam = match_printed_fixture(eng, rep, 2, SH04_A_TERMS, chained=True)
        assert ok

    def test_generator_b(self, engines):
        eng = engines("SH(0|4)")
        rep = eng.compute_cell(2, 0).representatives[0]
        ok, lam = match_printed_fixture(eng, rep, 2, SH04_B_TERMS, chained=True)
        assert ok

    def test_generator_c(self, engines):
        eng = engines("SH(0|4)")
        rep = eng.compute_cell(2, 2).representatives[0]
        ok, lam = match_printed_fixture(eng, rep, 2, SH04_C_TERMS, chained=True)
        assert ok

    def test_sh03_generators(self, engines):
        eng = engines("SH(0|3)")
        ok, _ = match_printed_fixture(
            eng, eng.compute_cell(2, -2).representatives[0], 2,
            SH03_A_TERMS, chained=True,
        )
        assert ok
        ok, _ = match_printed_fixture(
            eng, eng.compute_cell(3, 0).representatives[0], 3, SH03_F_TERMS
        )
        assert ok


class TestCocycleChecks:
    def test_chained_sum_is_cocycle(self, engines):
        eng = engines("SH(0|4)")
        a = build_cochain(eng, 2, SH04_A_TERMS)
        assert eng.verify_cocycle(a)

    def test_random_two_cochain_generically_not_cocycle(self, engines):
        eng = engines("SH(0|4)")
        rng = random.Random(101)
        hits = 0
        for _ in range(20):
            c = random_cochain(eng, rng, 2, -2, max_terms=4)
            if eng.verify_cocycle(c):
                hits += 1
        assert hits <= 2  # the cocycle subspace is 1-dimensional out of 10

    def test_differential_output_is_cocycle(self, engines):
        eng = engines("SH(0|4)")
        rng = random.Random(61)
        for _ in range(10):
            c = random_cochain(eng, rng, 2, 0)
            assert eng.verify_cocycle(eng.differential(c))

    def test_is_coboundary_roundtrip(self, engines):
        eng = engines("SH(0|4)")
        rng = random.Random(71)
        w = random_cochain(eng, rng, 2, 0)
        c = eng.differential(w)
        witness = eng.is_coboundary(c)
        assert witness is not None
        assert eng.differential(witness) == c

    def test_is_coboundary_zero(self, engines):
        eng = engines("SH(0|4)")
        z = Cochain.zero(eng.spec, 2, weight=0)
        assert eng.is_coboundary(z) == Cochain.zero(eng.spec, 1)

    def test_is_coboundary_requires_cocycle(self, engines):
        eng = engines("SH(0|4)")
        rng = random.Random(3)
        c = random_cochain(eng, rng, 2, -2, max_terms=5)
        assert not eng.verify_cocycle(c)
        with pytest.raises(ValueError):
            eng.is_coboundary(c)


class TestEqualModCoboundaries:
    def test_shift_by_coboundary(self, engines):
        eng = engines("SH(0|4)")
        rng = random.Random(81)
        rep = eng.compute_cell(2, 0).representatives[0]
        w = random_cochain(eng, rng, 1, 0)
        shifted = rep + eng.differential(w)
        equal, lam = eng.equal_mod_coboundaries(shifted, rep)
        assert equal and lam == 1

    def test_scaled_comparison(self, engines):
        eng = engines("SH(0|4)")
        rep = eng.compute_cell(2, -2).representatives[0]
        equal, lam = eng.equal_mod_coboundaries(rep, rep.scaled(Fraction(2, 3)))
        assert equal and lam == Fraction(3, 2)

    def test_independent_classes_differ(self, engines):
        eng = engines("Po(0|4)")
        recs = eng.compute_cell(4, 2)
        assert recs.dim_H == 2
        r0, r1 = recs.representatives
        equal, _ = eng.equal_mod_coboundaries(r0, r1)
        assert not equal

    def test_zero_cochain_comparison(self, engines):
        eng = engines("SH(0|4)")
        rep = eng.compute_cell(2, -2).representatives[0]
        z = Cochain.zero(eng.spec, 2, weight=-2)
        assert eng.equal_mod_coboundaries(z, z) == (True, None)
        assert eng.equal_mod_coboundaries(rep, z)[0] is False


class TestCupProducts:
    def test_a_squared_represents_degree_four_class(self, engines):
        eng = engines("SH(0|4)")
        a = eng.compute_cell(2, -2).representatives[0]
        aa = eng.cup(a, a)
        assert eng.verify_cocycle(aa)
        equal, lam = eng.equal_mod_coboundaries(
            aa, eng.compute_cell(4, -4).representatives[0]
        )
        assert equal and lam

    def test_ring_relation_ac_equals_b_squared(self, engines):
        eng = engines("SH(0|4)")
        a = eng.compute_cell(2, -2).representatives[0]
        b = eng.compute_cell(2, 0).representatives[0]
        c = eng.compute_cell(2, 2).representatives[0]
        equal, lam = eng.equal_mod_coboundaries(eng.cup(a, c), eng.cup(b, b))
        assert equal and lam

    def test_f_squared_is_coboundary(self, engines):
        eng = engines("SH(0|4)")
        f = eng.compute_cell(3, 0).representatives[0]
        ff = eng.cup(f, f)
        assert eng.verify_cocycle(ff)
        assert ff.is_zero() or eng.is_coboundary(ff) is not None

    def test_top_cocycle_squares_to_coboundary(self, engines):
        eng = engines("Po(0|4)")
        e = build_cochain(eng, 1, [(1, ["U_1 U_2 U_3 U_4"])])
        assert eng.verify_cocycle(e)
        assert eng.is_coboundary(e) is None
        ee = eng.cup(e, e)
        assert ee.is_zero() or eng.is_coboundary(ee) is not None

    def test_leibniz_random(self, engines):
        eng = engines("SH(0|4)")
        rng = random.Random(99)
        for _ in range(40):
            k1, g1 = rng.randint(1, 2), rng.choice([-2, -1, 0, 1, 2])
            k2, g2 = rng.randint(1, 2), rng.choice([-2, -1, 0, 1, 2])
            x = random_cochain(eng, rng, k1, g1)
            y = random_cochain(eng, rng, k2, g2)
            if x is None or y is None:
                continue
            lhs = eng.differential(eng.cup(x, y))
            rhs = eng.cup(eng.differential(x), y) + eng.cup(
                x, eng.differential(y)
            ).scaled((-1) ** k1)
            assert lhs == rhs

    def test_supercommutativity_on_classes(self, engines):
        eng = engines("SH(0|4)")
        gens = [
            eng.compute_cell(2, -2).representatives[0],
            eng.compute_cell(2, 0).representatives[0],
            eng.compute_cell(3, 0).representatives[0],
        ]
        for x in gens:
            for y in gens:
                sign = (-1) ** (x.degree * y.degree + x.parity * y.parity)
                assert eng.cup(x, y) == eng.cup(y, x).scaled(sign)


class TestRingProbe:
    def test_sh04_full_generator_set(self, engines):
        eng = engines("SH(0|4)")
        gens = [
            ("a", eng.compute_cell(2, -2).representatives[0]),
            ("b", eng.compute_cell(2, 0).representatives[0]),
            ("c", eng.compute_cell(2, 2).representatives[0]),
            ("f", eng.compute_cell(3, 0).representatives[0]),
        ]
        probe = eng.ring_probe(gens, degree_cap=6)
        table_cells = {
            (2, -2), (2, 0), (2, 2), (3, 0),
            (4, -4), (4, -2), (4, 0), (4, 2), (4, 4),
            (5, -2), (5, 0), (5, 2),
            (6, -6), (6, -4), (6, -2), (6, 0), (6, 2), (6, 4), (6, 6),
        }
        for cell in table_cells:
            assert cell in probe.cells
            assert probe.cells[cell].covered, cell
        # relation ac - b^2 = 0 shows up as a dependency in cell (4, 0)
        c40 = probe.cells[(4, 0)]
        assert any(set(rel) == {"a c", "b^2"} for rel in c40.relations)
        # f^2 = 0: zero class at (6, 0)
        assert any(
            e.name == "f^2" and e.is_zero_class for e in probe.entries
        )

    def test_empty_generator_list(self, engines):
        eng = engines("SH(0|3)")
        probe = eng.ring_probe([], degree_cap=6)
        assert probe.entries == [] and probe.cells == {}
        dims = {
            (k, g): eng.compute_cell(k, g, representatives=False).dim_H
            for k in range(1, 6)
            for g in range(-6, 1)
        }
        nonzero = {cell for cell, d in dims.items() if d}
        assert set(probe.uncovered_against(dims)) == nonzero

    def test_rejects_non_cocycle_generator(self, engines):
        eng = engines("SH(0|4)")
        rng = random.Random(7)
        c = random_cochain(eng, rng, 2, -2, max_terms=5)
        with pytest.raises(ValueError, match="not a cocycle"):
            eng.ring_probe([("x", c)], degree_cap=4)


class TestStructuralChecks:
    def test_grading_vanishing_hhat(self, engines):
        eng = engines("HHat(2|0)")
        report = eng.grading_vanishing_check(4, range(-3, 4))
        assert report.ok and report.cells_checked == 30

    def test_grading_vanishing_pohat_small(self, engines):
        eng = engines("PoHat(2|0)")
        report = eng.grading_vanishing_check(3, (-1, 1))
        assert report.ok

    def test_grading_check_refuses_plain_families(self, engines):
        eng = engines("Po(2|0)")
        with pytest.raises(ValueError, match="grading element"):
            eng.grading_vanishing_check(2, (-1, 1))

    def test_euler_identity_sh03(self, engines):
        eng = engines("SH(0|3)")
        for g in range(-6, 2):
            assert eng.euler_check(g, 6).ok

    def test_euler_identity_with_boundary_term(self, engines):
        eng = engines("SH(0|4)")
        chk = eng.euler_check(-2, 4)
        assert chk.ok
        assert chk.boundary_rank > 0  # the complex does not truncate here


class TestReports:
    def test_table_and_json_deterministic(self):
        rep1 = compute_table("SH(0|3)", "trivial", (1, 4), (-4, 1))
        rep2 = compute_table("SH(0|3)", "trivial", (1, 4), (-4, 1))
        assert rep1.to_json() == rep2.to_json()
        data = json.loads(rep1.to_json())
        assert data["spec"] == "SH(0|3)"
        assert data["convention"] == {"weight_shift": -2, "derivative_side": "left"}
        cells = {(c["degree"], c["grade"]): c for c in data["cells"]}
        assert cells[(2, -2)]["dim_H"] == 1
        assert cells[(2, -2)]["representatives"]
        assert cells[(1, -1)]["dim_H"] == 0

    def test_text_render_blank_is_zero(self):
        rep = compute_table("SH(0|3)", "trivial", (2, 3), (-2, 0))
        txt = rep.render_text()
        lines = txt.splitlines()
        assert lines[1].endswith("-2  -1   0")
        row2 = lines[3]
        assert row2.startswith("   2 |   1")
        assert row2.endswith("    ")  # zero cells are blank

    def test_capped_cells_flagged(self):
        rep = compute_table("SH(0|4)", "trivial", (2, 2), (-2, -2), max_cell=5)
        assert rep.cells[0].capped
        assert "cap" in rep.render_text()
        assert json.loads(rep.to_json())["cells"][0]["capped"] is True

    def test_parallel_matches_sequential(self):
        seq = compute_table("SH(0|3)", "trivial", (0, 4), (-4, 0))
        par = compute_table("SH(0|3)", "trivial", (0, 4), (-4, 0), jobs=2)
        assert seq.to_json() == par.to_json()

    def test_record_round_trip(self):
        rec = compute_cell("SH(0|3)", "trivial", 2, -2)
        from supercohom.engine import CellRecord

        back = CellRecord.from_dict(rec.to_dict())
        assert back.to_dict() == rec.to_dict()

"""End-to-end cohomology computation per (degree, weight) cell, table sweeps,
and ring tools: cup products, coboundary membership, class comparison and
generator/relation probing.

Cells are independent; the engine only shares immutable caches (bases,
structure table, differential matrices and their echelon forms), so
distinct cells can also be computed in worker processes.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .algebra import AlgebraBasis, AlgebraSpec, StructureTable, parse_algebra_spec
from .cochains import (
    TRIVIAL,
    Cochain,
    cup_product,
    differential_matrix_between,
    enumerate_cell_basis,
)
from .errors import ConsistencyError, ResourceCapExceeded
from .linalg import (
    SparseMatrix,
    apply_record_vector,
    nullspace_basis,
    quotient_space,
    reduce_mod_rowspace,
    row_reduce,
    solve_from_echelon,
)

DEFAULT_MAX_CELL = 200_000


@dataclass
class CellRecord:
    """Everything computed for one (degree, grade) cell."""

    degree: int
    grade: int
    dim_C: int
    rank_Z: int | None
    rank_b: int | None
    dim_H: int | None
    representatives: list = field(default_factory=list)
    capped: bool = False

    def to_dict(self):
        out = {
            "degree": self.degree,
            "grade": self.grade,
            "dim_C": self.dim_C,
            "rank_Z": self.rank_Z,
            "rank_b": self.rank_b,
            "dim_H": self.dim_H,
            "representatives": [c.serialize() for c in self.representatives],
        }
        if self.capped:
            out["capped"] = True
        return out

    @classmethod
    def from_dict(cls, data):
        reps = [Cochain.deserialize(s) for s in data.get("representatives", ())]
        return cls(
            degree=data["degree"],
            grade=data["grade"],
            dim_C=data["dim_C"],
            rank_Z=data["rank_Z"],
            rank_b=data["rank_b"],
            dim_H=data["dim_H"],
            representatives=reps,
            capped=bool(data.get("capped")),
        )


@dataclass
class GradingCheckReport:
    """Off-grade vanishing check for grading-element extensions."""

    cells_checked: int
    failures: list

    @property
    def ok(self):
        return not self.failures


@dataclass
class EulerCheck:
    """Finite-truncation Euler characteristic identity at one grade.

    alternating_C - alternating_H telescopes to (-1)^K rank d_K; when the
    complex vanishes above K this is the plain equality of the two sums.
    """

    grade: int
    k_max: int
    alternating_C: int
    alternating_H: int
    boundary_rank: int

    @property
    def ok(self):
        expected = self.boundary_rank if self.k_max % 2 == 0 else -self.boundary_rank
        return self.alternating_C - self.alternating_H == expected


@dataclass
class RingProbeEntry:
    name: str
    degree: int
    grade: int
    is_zero_class: bool


@dataclass
class RingCellProbe:
    degree: int
    grade: int
    dim_H: int
    spanned: int
    monomials: list
    relations: list  # list of {name: Fraction} dependencies

    @property
    def covered(self):
        return self.spanned == self.dim_H


@dataclass
class RingProbeResult:
    entries: list
    cells: dict  # (degree, grade) -> RingCellProbe

    def uncovered_cells(self):
        return [c for c in self.cells.values() if not c.covered]

    def uncovered_against(self, dims):
        """Cells from an externally computed {(degree, grade): dim} map whose
        cohomology is not fully spanned by the probed monomials."""
        out = []
        for cell, dim in sorted(dims.items()):
            if not dim:
                continue
            probe = self.cells.get(cell)
            if probe is None or probe.spanned < dim:
                out.append(cell)
        return out


class CohomologyEngine:
    """Cohomology of one algebra family with one coefficient module."""

    def __init__(self, spec, module=TRIVIAL, max_cell=DEFAULT_MAX_CELL):
        if isinstance(spec, str):
            spec = parse_algebra_spec(spec)
        self.spec = spec
        self.module = module
        self.max_cell = max_cell
        self.basis = AlgebraBasis(spec)
        self.table = StructureTable(spec, self.basis)
        self._cells = {}
        self._mats = {}
        self._echs = {}
        self._bt_echs = {}
        self._solve_echs = {}

    # ----- cached building blocks -------------------------------------

    def cell(self, k, g):
        key = (k, g)
        cached = self._cells.get(key)
        if cached is None:
            cached = enumerate_cell_basis(self.basis, k, g, self.module)
            if len(cached) > self.max_cell:
                raise ResourceCapExceeded(
                    f"cell (degree {k}, grade {g}) has dimension "
                    f"{len(cached)} > cap {self.max_cell}; narrow the ranges "
                    "or raise the cap",
                    degree=k,
                    grade=g,
                    size=len(cached),
                )
            self._cells[key] = cached
        return cached

    def dmatrix(self, k, g):
        """Matrix of d on the (k, g) cell, rows indexed by the (k+1, g) cell."""
        key = (k, g)
        cached = self._mats.get(key)
        if cached is None:
            domain = self.cell(k, g) if k >= 0 else enumerate_cell_basis(
                self.basis, -1, g, self.module
            )
            target = self.cell(k + 1, g)
            cached = differential_matrix_between(
                self.basis, self.table, domain, target
            )
            self._mats[key] = cached
        return cached

    def echelon(self, k, g):
        """Reduced row echelon form of dmatrix(k, g)."""
        key = (k, g)
        cached = self._echs.get(key)
        if cached is None:
            cached = row_reduce(self.dmatrix(k, g), full=True)
            self._echs[key] = cached
        return cached

    def bt_echelon(self, k, g):
        """Reduced echelon of the transpose of dmatrix(k, g) (coboundary rows)."""
        key = (k, g)
        cached = self._bt_echs.get(key)
        if cached is None:
            cached = row_reduce(self.dmatrix(k, g).transpose(), full=True)
            self._bt_echs[key] = cached
        return cached

    def solve_echelon(self, k, g):
        """Recorded echelon of dmatrix(k, g), for solving b t = x."""
        key = (k, g)
        cached = self._solve_echs.get(key)
        if cached is None:
            cached = row_reduce(self.dmatrix(k, g), full=True, want_record=True)
            self._solve_echs[key] = cached
        return cached

    def rank_d(self, k, g):
        if k < 0:
            return 0
        return self.echelon(k, g).rank

    # ----- per-cell computation ----------------------------------------

    def compute_cell(self, k, g, representatives=True):
        """Dimensions, ranks and representative cocycles of one cell."""
        if k < 0:
            raise ValueError("cochain degree must be >= 0")
        cb = self.cell(k, g)
        Z = self.dmatrix(k, g)
        b = self.dmatrix(k - 1, g)
        qr = quotient_space(
            Z,
            b,
            z_ech=self.echelon(k, g),
            bt_ech=self.bt_echelon(k - 1, g),
        )
        reps = []
        if representatives:
            reps = [Cochain.from_coordinates(cb, vec) for vec in qr.representatives]
        return CellRecord(
            degree=k,
            grade=g,
            dim_C=len(cb),
            rank_Z=qr.rank_Z,
            rank_b=qr.rank_b,
            dim_H=qr.dimension,
            representatives=reps,
        )

    def capped_record(self, k, g, size):
        return CellRecord(
            degree=k,
            grade=g,
            dim_C=size,
            rank_Z=None,
            rank_b=None,
            dim_H=None,
            representatives=[],
            capped=True,
        )

    def compute_table(self, degrees, grades, representatives=True, jobs=1):
        """Grid of compute_cell results over inclusive (lo, hi) ranges."""
        k_lo, k_hi = degrees
        g_lo, g_hi = grades
        if k_lo > k_hi or g_lo > g_hi:
            raise ValueError("empty degree or grade range")
        if jobs > 1:
            records = self._compute_parallel(degrees, grades, representatives, jobs)
        else:
            records = []
            for g in range(g_lo, g_hi + 1):
                for k in range(k_lo, k_hi + 1):
                    try:
                        records.append(self.compute_cell(k, g, representatives))
                    except ResourceCapExceeded as exc:
                        records.append(self.capped_record(k, g, exc.size))
        records.sort(key=lambda r: (r.degree, r.grade))
        return CohomologyReport(
            spec=self.spec,
            module=self.module,
            degrees=tuple(degrees),
            grades=tuple(grades),
            cells=records,
        )

    def _compute_parallel(self, degrees, grades, representatives, jobs):
        g_lo, g_hi = grades
        args = [
            (
                self.spec.display(),
                self.module,
                degrees[0],
                degrees[1],
                g,
                representatives,
                self.max_cell,
            )
            for g in range(g_lo, g_hi + 1)
        ]
        records = []
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for chunk in pool.map(_grade_chunk_task, args):
                records.extend(chunk)
        return records

    # ----- cochain-level operations ------------------------------------

    def differential(self, c):
        """d(c) as a cochain; input must be degree/weight homogeneous."""
        if c.weight is None:
            return Cochain.zero(self.spec, c.degree + 1, self.module)
        domain = self.cell(c.degree, c.weight)
        target = self.cell(c.degree + 1, c.weight)
        mat = self.dmatrix(c.degree, c.weight)
        return Cochain.from_coordinates(target, mat.matvec(c.coordinates(domain)))

    def verify_cocycle(self, c):
        """True iff d(c) = 0 exactly."""
        if c.is_zero():
            return True
        mat = self.dmatrix(c.degree, c.weight)
        vec = c.coordinates(self.cell(c.degree, c.weight))
        return not any(mat.matvec(vec))

    def is_coboundary(self, c):
        """A witness w with d(w) = c, or None; c must be a cocycle."""
        if not self.verify_cocycle(c):
            raise ValueError("is_coboundary needs a cocycle")
        if c.degree == 0:
            return Cochain.zero(self.spec, -1, self.module) if c.is_zero() else None
        if c.is_zero():
            return Cochain.zero(self.spec, c.degree - 1, self.module)
        k, g = c.degree, c.weight
        ech = self.solve_echelon(k - 1, g)
        x = c.coordinates(self.cell(k, g))
        t = solve_from_echelon(ech, x)
        if t is None:
            return None
        return Cochain.from_coordinates(self.cell(k - 1, g), t)

    def equal_mod_coboundaries(self, c1, c2):
        """Is c1 ~ lambda * c2 modulo coboundaries for some lambda != 0?

        Returns (verdict, lambda); lambda is None when the verdict holds
        because both classes are zero.
        """
        if (c1.degree, c1.module) != (c2.degree, c2.module):
            raise ValueError("cochains live in different cells")
        if not c1.is_zero() and not c2.is_zero() and c1.weight != c2.weight:
            raise ValueError("cochains live in different cells")
        if not (self.verify_cocycle(c1) and self.verify_cocycle(c2)):
            raise ValueError("equal_mod_coboundaries needs cocycles")
        if c2.is_zero() or c1.is_zero():
            z1 = c1.is_zero() or self.is_coboundary(c1) is not None
            z2 = c2.is_zero() or self.is_coboundary(c2) is not None
            return (z1 and z2, None)
        k, g = c1.degree, c1.weight
        cb = self.cell(k, g)
        x1 = c1.coordinates(cb)
        x2 = c2.coordinates(cb)
        if k == 0:
            lam = None
            for a, b in zip(x1, x2):
                if b:
                    lam = a / b
                    break
            if lam is None:
                return (not any(x1), None)
            if lam and all(a == lam * b for a, b in zip(x1, x2)):
                return (True, lam)
            return (False, None)
        ech = self.solve_echelon(k - 1, g)
        u1 = apply_record_vector(ech.record, x1)
        u2 = apply_record_vector(ech.record, x2)
        tail = range(ech.rank, len(u1))
        lam = None
        for r in tail:
            if u2[r]:
                lam = u1[r] / u2[r]
                break
        if lam is None:
            # c2 is a coboundary: classes agree iff c1 is one as well
            return (all(not u1[r] for r in tail), None)
        if lam == 0 or any(u1[r] != lam * u2[r] for r in tail):
            return (False, None)
        return (True, lam)

    def cup(self, c1, c2):
        return cup_product(c1, c2, self.basis)

    def class_vector(self, c):
        """Coordinates of the class of c, reduced against the coboundary rows."""
        k, g = c.degree, c.weight
        vec = c.coordinates(self.cell(k, g))
        if k > 0:
            vec = reduce_mod_rowspace(vec, self.bt_echelon(k - 1, g))
        return vec

    # ----- ring probing -------------------------------------------------

    def ring_probe(self, generators, degree_cap):
        """Span of cup-product monomials in the generators, cell by cell.

        generators: list of (name, cochain) pairs, each a verified cocycle.
        Reports per cell the spanned dimension against the computed dim H,
        plus exact linear dependencies (candidate relations).
        """
        for name, c in generators:
            if not self.verify_cocycle(c):
                raise ValueError(f"generator {name} is not a cocycle")
        monomials = []
        cache = {(): None}

        def mono_name(expo):
            parts = []
            for (name, _), e in zip(generators, expo):
                if e == 1:
                    parts.append(name)
                elif e > 1:
                    parts.append(f"{name}^{e}")
            return " ".join(parts)

        def build(expo):
            if not any(expo):
                return None
            if expo in cache:
                return cache[expo]
            i = max(j for j, e in enumerate(expo) if e)
            prev = list(expo)
            prev[i] -= 1
            base = build(tuple(prev))
            factor = generators[i][1]
            prod = factor if base is None else self.cup(base, factor)
            cache[expo] = prod
            return prod

        def enum(expo, i, degree_left):
            if i == len(generators):
                if any(expo):
                    c = build(expo)
                    monomials.append((mono_name(expo), c))
                return
            d = generators[i][1].degree
            e = 0
            while e * d <= degree_left:
                enum(expo + (e,), i + 1, degree_left - e * d)
                e += 1
                if d == 0:
                    break

        enum((), 0, degree_cap)

        entries = []
        by_cell = {}
        for name, c in monomials:
            if not self.verify_cocycle(c):
                raise ConsistencyError(f"product {name} is not a cocycle")
            zero_class = c.is_zero() or self.is_coboundary(c) is not None
            entries.append(
                RingProbeEntry(
                    name=name,
                    degree=c.degree,
                    grade=c.weight if c.weight is not None else 0,
                    is_zero_class=zero_class,
                )
            )
            if c.weight is None:
                continue
            by_cell.setdefault((c.degree, c.weight), []).append((name, c))

        cells = {}
        for (k, g), monos in sorted(by_cell.items()):
            dim_h = self.compute_cell(k, g, representatives=False).dim_H
            vectors = [(name, self.class_vector(c)) for name, c in monos]
            mat = SparseMatrix(
                len(vectors),
                len(self.cell(k, g)),
                [{i: v for i, v in enumerate(vec) if v} for _, vec in vectors],
            )
            ech = row_reduce(mat, full=True)
            deps = nullspace_basis(row_reduce(mat.transpose(), full=True))
            relations = [
                {vectors[i][0]: coeff for i, coeff in sorted(dep.items())}
                for dep in deps
            ]
            cells[(k, g)] = RingCellProbe(
                degree=k,
                grade=g,
                dim_H=dim_h,
                spanned=ech.rank,
                monomials=[name for name, _ in vectors],
                relations=relations,
            )
        return RingProbeResult(entries=entries, cells=cells)

    # ----- structural checks ---------------------------------------------

    def grading_vanishing_check(self, k_max, grades):
        """All off-grade cells of a grading-element extension must vanish."""
        if not self.spec.has_grading_element:
            raise ValueError(
                f"{self.spec.display()} has no grading element; the vanishing "
                "check applies to PoHat/HHat only"
            )
        failures = []
        checked = 0
        for g in grades:
            if g == 0:
                continue
            for k in range(0, k_max + 1):
                rec = self.compute_cell(k, g, representatives=False)
                checked += 1
                if rec.dim_H:
                    failures.append((k, g, rec.dim_H))
        return GradingCheckReport(cells_checked=checked, failures=failures)

    def euler_check(self, g, k_max):
        """Exact truncated Euler characteristic identity at one grade."""
        alt_c = 0
        alt_h = 0
        for k in range(0, k_max + 1):
            rec = self.compute_cell(k, g, representatives=False)
            sign = -1 if k % 2 else 1
            alt_c += sign * rec.dim_C
            alt_h += sign * rec.dim_H
        return EulerCheck(
            grade=g,
            k_max=k_max,
            alternating_C=alt_c,
            alternating_H=alt_h,
            boundary_rank=self.rank_d(k_max, g),
        )


def _grade_chunk_task(args):
    spec_str, module, k_lo, k_hi, g, representatives, max_cell = args
    engine = CohomologyEngine(spec_str, module, max_cell=max_cell)
    out = []
    for k in range(k_lo, k_hi + 1):
        try:
            out.append(engine.compute_cell(k, g, representatives))
        except ResourceCapExceeded as exc:
            out.append(engine.capped_record(k, g, exc.size))
    return out


@dataclass
class CohomologyReport:
    """Cell grid plus the metadata needed to reproduce it byte for byte."""

    spec: AlgebraSpec
    module: str
    degrees: tuple
    grades: tuple
    cells: list

    def cell(self, k, g):
        for rec in self.cells:
            if rec.degree == k and rec.grade == g:
                return rec
        return None

    def dims(self):
        return {
            (rec.degree, rec.grade): rec.dim_H
            for rec in self.cells
            if not rec.capped
        }

    def to_dict(self):
        from . import CONVENTION, __version__

        return {
            "tool": "supercohom",
            "version": __version__,
            "spec": self.spec.display(),
            "module": self.module,
            "convention": dict(CONVENTION),
            "degrees": list(self.degrees),
            "grades": list(self.grades),
            "cells": [rec.to_dict() for rec in self.cells],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def render_text(self):
        """Table in the familiar layout: degree rows, grade columns, blank = 0."""
        g_lo, g_hi = self.grades
        k_lo, k_hi = self.degrees
        grades = list(range(g_lo, g_hi + 1))
        lines = [
            f"H^n_g({self.spec.display()})  module={self.module}",
            " n\\g |" + "".join(f"{g:>4}" for g in grades),
            "-----+" + "-" * (4 * len(grades)),
        ]
        for k in range(k_lo, k_hi + 1):
            cells = []
            for g in grades:
                rec = self.cell(k, g)
                if rec is None:
                    cells.append("   ?")
                elif rec.capped:
                    cells.append(" cap")
                elif rec.dim_H:
                    cells.append(f"{rec.dim_H:>4}")
                else:
                    cells.append("    ")
            lines.append(f"{k:>4} |" + "".join(cells))
        return "\n".join(lines) + "\n"


def compute_cell(spec, module, k, g, max_cell=DEFAULT_MAX_CELL, representatives=True):
    """One-off cell computation (convenience wrapper over CohomologyEngine)."""
    return CohomologyEngine(spec, module, max_cell).compute_cell(
        k, g, representatives
    )


def compute_table(
    spec,
    module,
    degrees,
    grades,
    max_cell=DEFAULT_MAX_CELL,
    representatives=True,
    jobs=1,
):
    """Grid computation over inclusive ranges (convenience wrapper)."""
    return CohomologyEngine(spec, module, max_cell).compute_table(
        degrees, grades, representatives=representatives, jobs=jobs
    )

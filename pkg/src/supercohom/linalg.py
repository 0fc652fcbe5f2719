"""Sparse exact rational matrices, Gaussian elimination, and the
cocycles-modulo-coboundaries quotient with explicit representatives.

Everything is over Fraction; ranks and dimensions are exact.  The quotient
runs the three-step procedure (derive constraints Bx = 0 from the
parametric coboundary form x = bt, compare ranks, substitute y = Bx) and
cross-checks its dimension against dim ker Z - rank b, aborting on any
mismatch.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import kernels
from .errors import ConsistencyError


class SparseMatrix:
    """Row-sparse matrix with Fraction entries (no stored zeros)."""

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, nrows, ncols, rows=None):
        self.nrows = nrows
        self.ncols = ncols
        if rows is None:
            self.rows = [dict() for _ in range(nrows)]
        else:
            if len(rows) != nrows:
                raise ValueError("row count mismatch")
            self.rows = [
                {c: Fraction(v) for c, v in row.items() if v} for row in rows
            ]
        for row in self.rows:
            for c in row:
                if not 0 <= c < ncols:
                    raise ValueError(f"column index {c} out of range")

    @classmethod
    def zeros(cls, nrows, ncols):
        return cls(nrows, ncols)

    @classmethod
    def from_dense(cls, data, ncols=None):
        nrows = len(data)
        if ncols is None:
            ncols = len(data[0]) if data else 0
        rows = [
            {c: Fraction(v) for c, v in enumerate(row) if v} for row in data
        ]
        return cls(nrows, ncols, rows)

    @classmethod
    def identity(cls, n):
        return cls(n, n, [{i: Fraction(1)} for i in range(n)])

    def entry(self, r, c):
        return self.rows[r].get(c, Fraction(0))

    def nnz(self):
        return sum(len(row) for row in self.rows)

    def is_zero(self):
        return all(not row for row in self.rows)

    def copy(self):
        return SparseMatrix(self.nrows, self.ncols, [dict(r) for r in self.rows])

    def transpose(self):
        rows = [dict() for _ in range(self.ncols)]
        for r, row in enumerate(self.rows):
            for c, v in row.items():
                rows[c][r] = v
        return SparseMatrix(self.ncols, self.nrows, rows)

    def matvec(self, vec):
        out = []
        for row in self.rows:
            s = Fraction(0)
            for c, v in row.items():
                x = vec[c]
                if x:
                    s += v * x
            out.append(s)
        return out

    def matmul(self, other):
        if self.ncols != other.nrows:
            raise ValueError("inner dimensions differ")
        rows = []
        for row in self.rows:
            acc = {}
            for c, v in row.items():
                for c2, v2 in other.rows[c].items():
                    cur = acc.get(c2, 0) + v * v2
                    if cur:
                        acc[c2] = cur
                    else:
                        del acc[c2]
            rows.append(acc)
        return SparseMatrix(self.nrows, other.ncols, rows)

    def column(self, c):
        return {r: row[c] for r, row in enumerate(self.rows) if c in row}

    def to_dense(self):
        return [
            [self.rows[r].get(c, Fraction(0)) for c in range(self.ncols)]
            for r in range(self.nrows)
        ]

    def to_pairs(self):
        return [
            {c: (v.numerator, v.denominator) for c, v in row.items()}
            for row in self.rows
        ]

    @classmethod
    def from_pairs(cls, nrows, ncols, pair_rows):
        rows = [
            {c: Fraction(n, d) for c, (n, d) in row.items()}
            for row in pair_rows
        ]
        return cls(nrows, ncols, rows)

    def dump_lines(self):
        """Debug dump: one row per line of col:num/den pairs."""
        out = []
        for row in self.rows:
            out.append(
                " ".join(
                    f"{c}:{v.numerator}/{v.denominator}"
                    for c, v in sorted(row.items())
                )
            )
        return out

    def __eq__(self, other):
        return (
            isinstance(other, SparseMatrix)
            and self.nrows == other.nrows
            and self.ncols == other.ncols
            and self.rows == other.rows
        )

    def __repr__(self):
        return f"SparseMatrix({self.nrows}x{self.ncols}, nnz={self.nnz()})"


@dataclass
class EchelonForm:
    """Result of row reduction; matrix is the canonical RREF when full."""

    matrix: SparseMatrix
    rank: int
    pivot_cols: tuple
    record: tuple | None
    full: bool

    @property
    def free_cols(self):
        pivots = set(self.pivot_cols)
        return tuple(c for c in range(self.matrix.ncols) if c not in pivots)


def row_reduce(matrix, full=True, want_record=False):
    """Gaussian elimination over exact rationals.

    With full=True the result is the (unique) reduced row echelon form;
    with full=False only a forward echelon, enough for ranks.
    """
    out_rows, pivots, rec = kernels.rref_pairs(
        matrix.to_pairs(), matrix.ncols, full, want_record
    )
    reduced = SparseMatrix.from_pairs(matrix.nrows, matrix.ncols, out_rows)
    return EchelonForm(
        matrix=reduced,
        rank=len(pivots),
        pivot_cols=tuple(pivots),
        record=tuple(rec) if rec is not None else None,
        full=full,
    )


def apply_record_rows(record, rows):
    """Replay elimination operations on a list of dict rows (in place)."""
    for op in record:
        if op[0] == "axpy":
            _, dst, src, (n, d) = op
            f = Fraction(n, d)
            rdst = rows[dst]
            for c, v in rows[src].items():
                cur = rdst.get(c, 0) + f * v
                if cur:
                    rdst[c] = cur
                else:
                    rdst.pop(c, None)
        elif op[0] == "scale":
            _, r, (n, d) = op
            f = Fraction(n, d)
            rows[r] = {c: v * f for c, v in rows[r].items()}
        else:
            _, i, j = op
            rows[i], rows[j] = rows[j], rows[i]
    return rows


def undo_record_rows(record, rows):
    """Invert a replay: undo_record_rows(rec, apply_record_rows(rec, M)) == M."""
    for op in reversed(record):
        if op[0] == "axpy":
            _, dst, src, (n, d) = op
            f = Fraction(n, d)
            rdst = rows[dst]
            for c, v in rows[src].items():
                cur = rdst.get(c, 0) - f * v
                if cur:
                    rdst[c] = cur
                else:
                    rdst.pop(c, None)
        elif op[0] == "scale":
            _, r, (n, d) = op
            f = Fraction(d, n)
            rows[r] = {c: v * f for c, v in rows[r].items()}
        else:
            _, i, j = op
            rows[i], rows[j] = rows[j], rows[i]
    return rows


def apply_record_vector(record, vec):
    """Replay elimination operations on a right-hand-side vector."""
    vec = list(vec)
    for op in record:
        if op[0] == "axpy":
            _, dst, src, (n, d) = op
            if vec[src]:
                vec[dst] += Fraction(n, d) * vec[src]
        elif op[0] == "scale":
            _, r, (n, d) = op
            vec[r] *= Fraction(n, d)
        else:
            _, i, j = op
            vec[i], vec[j] = vec[j], vec[i]
    return vec


def solve_from_echelon(ech, rhs):
    """One solution t of M t = rhs, where ech = row_reduce(M, want_record=True).

    Returns None when the system is inconsistent.  Free variables are set
    to zero.
    """
    if ech.record is None or not ech.full:
        raise ValueError("need a full reduction with a record to solve")
    y = apply_record_vector(ech.record, rhs)
    for r in range(ech.rank, ech.matrix.nrows):
        if y[r]:
            return None
    t = [Fraction(0)] * ech.matrix.ncols
    for r, c in enumerate(ech.pivot_cols):
        t[c] = y[r]
    return t


def nullspace_basis(matrix_or_ech):
    """Basis of the right null space; free coordinates get unit entries."""
    ech = (
        matrix_or_ech
        if isinstance(matrix_or_ech, EchelonForm)
        else row_reduce(matrix_or_ech, full=True)
    )
    if not ech.full:
        raise ValueError("nullspace needs a full reduction")
    reduced = ech.matrix
    out = []
    for f in ech.free_cols:
        vec = {f: Fraction(1)}
        for r, p in enumerate(ech.pivot_cols):
            v = reduced.rows[r].get(f)
            if v:
                vec[p] = -v
        out.append(vec)
    return out


def cokernel_constraints(b, bt_ech=None):
    """Full-row-rank B with B·b = 0 whose solution set is exactly col(b)."""
    if bt_ech is None:
        bt_ech = row_reduce(b.transpose(), full=True)
    rows = nullspace_basis(bt_ech)
    return SparseMatrix(len(rows), b.nrows, rows)


@dataclass
class QuotientResult:
    """ker Z modulo col b with explicit, canonically reduced representatives."""

    dimension: int
    representatives: list
    rank_Z: int
    rank_B: int
    rank_b: int
    dim_cell: int


def reduce_mod_rowspace(vec, ech):
    """Subtract row-space multiples so vec vanishes on the pivot columns.

    With ech the reduced echelon form of a spanning set, this is the
    canonical representative of vec modulo the row space.
    """
    vec = list(vec)
    for r, p in enumerate(ech.pivot_cols):
        v = vec[p]
        if v:
            for c, w in ech.matrix.rows[r].items():
                vec[c] -= v * w
    return vec


def _normalize_leading(vec):
    for v in vec:
        if v:
            inv = 1 / v
            return [x * inv for x in vec]
    return vec


def quotient_space(Z, b, z_ech=None, bt_ech=None, validate=True):
    """Cohomology of the pair (Z, b): solutions of Zx = 0 modulo columns of b.

    Follows the constraint-elimination procedure: build B with
    {x : Bx = 0} = col(b), compare rank B with rank Z, and when they
    differ substitute y = Bx into Zx = 0 to get relations Ay = 0 whose
    free coordinates are the nontrivial classes.  The rank-based dimension
    formula is recomputed as a mandatory cross-check.
    """
    n = Z.ncols
    if b.nrows != n:
        raise ConsistencyError(
            f"coboundary columns live in dimension {b.nrows}, expected {n}"
        )
    if validate:
        prod = Z.matmul(b)
        if not prod.is_zero():
            bad = next(
                c for row in prod.rows for c in row
            )
            raise ConsistencyError(
                f"column {bad} of the coboundary matrix is not a cocycle "
                "(d²=0 violated upstream)"
            )
    if bt_ech is None:
        bt_ech = row_reduce(b.transpose(), full=True)
    if z_ech is None:
        z_ech = row_reduce(Z, full=True)
    rank_b = bt_ech.rank
    rank_Z = z_ech.rank
    free_cols = bt_ech.free_cols
    rank_B = len(free_cols)  # = n - rank_b, B has full row rank
    expected = (n - rank_Z) - rank_b
    if rank_B == rank_Z:
        if expected != 0:
            raise ConsistencyError(
                "quotient procedure found dimension 0 but the rank formula "
                f"gives {expected}"
            )
        return QuotientResult(0, [], rank_Z, rank_B, rank_b, n)

    B_rows = nullspace_basis(bt_ech)
    # every reduced Z row lies in the row space of B; its coordinates are
    # read off the unit columns of B (the free columns of b^T)
    col_pos = {f: i for i, f in enumerate(free_cols)}
    a_rows = []
    for r in range(rank_Z):
        zr = z_ech.matrix.rows[r]
        u = {}
        for f, i in col_pos.items():
            v = zr.get(f)
            if v:
                u[i] = v
        # consistency: u·B must reproduce the Z row exactly
        recon = {}
        for i, coeff in u.items():
            for c, w in B_rows[i].items():
                cur = recon.get(c, 0) + coeff * w
                if cur:
                    recon[c] = cur
                else:
                    del recon[c]
        if recon != zr:
            raise ConsistencyError(
                "a cocycle constraint is not a combination of the "
                "coboundary constraints (d²=0 violated upstream)"
            )
        a_rows.append(u)
    A = SparseMatrix(rank_Z, rank_B, a_rows)
    a_ech = row_reduce(A, full=True)
    y_basis = nullspace_basis(a_ech)
    dimension = len(y_basis)
    if dimension != expected:
        raise ConsistencyError(
            f"quotient procedure dimension {dimension} disagrees with "
            f"dim ker Z - rank b = {expected}"
        )
    reps = []
    for y in y_basis:
        x = [Fraction(0)] * n
        for i, v in y.items():
            x[free_cols[i]] = v
        x = reduce_mod_rowspace(x, bt_ech)
        x = _normalize_leading(x)
        if any(Z.matvec(x)):
            raise ConsistencyError("computed representative is not a cocycle")
        reps.append(x)
    return QuotientResult(dimension, reps, rank_Z, rank_B, rank_b, n)

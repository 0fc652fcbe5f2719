"""Pure-Python elimination kernels.

This is the fallback for (and the behavioural reference of) the compiled
kernel in _speedups.pyx: both must produce identical output for identical
input.  Rows travel as dicts mapping column -> (numerator, denominator)
with positive denominators and reduced fractions.

Pivot rule: sparsest available row first, ties broken by lowest leading
column, then lowest row index.  A final left-to-right pass makes the
result the canonical reduced row echelon form, which is unique, so both
backends agree byte for byte.
"""

from fractions import Fraction

BACKEND_NAME = "pure"


def rref_pairs(rows, ncols, full=True, want_record=False):
    """Row-reduce; returns (out_rows, pivot_cols, record).

    out_rows lists pivot rows by ascending pivot column followed by zero
    rows in original order.  The record is a sequence of ("scale", r, f),
    ("axpy", dst, src, f), ("swap", i, j) operations that transforms the
    input into the output when replayed in order.
    """
    m = len(rows)
    work = [
        {c: Fraction(n, d) for c, (n, d) in row.items()} for row in rows
    ]
    rec = [] if want_record else None
    col_rows = {}
    for r, row in enumerate(work):
        for c in row:
            col_rows.setdefault(c, set()).add(r)
    lead = [min(row) if row else -1 for row in work]

    def refresh_lead(r):
        row = work[r]
        lead[r] = min(row) if row else -1

    def scale(r, f):
        row = work[r]
        for c in list(row):
            row[c] *= f
        if rec is not None:
            rec.append(("scale", r, (f.numerator, f.denominator)))

    def axpy(dst, src, f):
        rdst = work[dst]
        for c, v in work[src].items():
            cur = rdst.get(c)
            if cur is None:
                nv = f * v
                if nv:
                    rdst[c] = nv
                    col_rows.setdefault(c, set()).add(dst)
            else:
                nv = cur + f * v
                if nv:
                    rdst[c] = nv
                else:
                    del rdst[c]
                    col_rows[c].discard(dst)
        refresh_lead(dst)
        if rec is not None:
            rec.append(("axpy", dst, src, (f.numerator, f.denominator)))

    live = set(range(m))
    piv_col = {}
    while True:
        best = None
        for r in live:
            row = work[r]
            if not row:
                continue
            key = (len(row), lead[r], r)
            if best is None or key < best:
                best = key
        if best is None:
            break
        _, c, r = best
        live.discard(r)
        piv_col[r] = c
        a = work[r][c]
        if a != 1:
            scale(r, 1 / a)
        targets = sorted(
            t for t in col_rows.get(c, ()) if t != r and (full or t in live)
        )
        for t in targets:
            axpy(t, r, -work[t][c])

    if full and piv_col:
        # canonical left-to-right pass: guarantees the unique RREF
        remaining = set(piv_col)
        piv_col = {}
        while remaining:
            best = None
            for r in remaining:
                key = (lead[r], r)
                if best is None or key < best:
                    best = key
            c, r = best
            remaining.discard(r)
            piv_col[r] = c
            a = work[r][c]
            if a != 1:
                scale(r, 1 / a)
            for t in sorted(col_rows.get(c, ()) - {r}):
                axpy(t, r, -work[t][c])

    order = sorted(piv_col, key=piv_col.get) + sorted(
        r for r in range(m) if r not in piv_col
    )
    if rec is not None:
        perm = list(range(m))
        pos_of = {r: i for i, r in enumerate(perm)}
        for i, want in enumerate(order):
            j = pos_of[want]
            if j != i:
                other = perm[i]
                perm[i], perm[j] = want, other
                pos_of[want], pos_of[other] = i, j
                rec.append(("swap", i, j))
    out = [
        {c: (v.numerator, v.denominator) for c, v in work[r].items()}
        for r in order
    ]
    pivots = [piv_col[r] for r in order if r in piv_col]
    return out, pivots, rec


def dense_int_rank(rows, ncols):
    """Rank of a dense integer matrix by fraction-free elimination."""
    mat = [list(r) for r in rows]
    rank = 0
    prow = 0
    nrows = len(mat)
    for c in range(ncols):
        pr = -1
        for r in range(prow, nrows):
            if mat[r][c]:
                pr = r
                break
        if pr < 0:
            continue
        if pr != prow:
            mat[prow], mat[pr] = mat[pr], mat[prow]
        pivot_row = mat[prow]
        pv = pivot_row[c]
        for r in range(prow + 1, nrows):
            row = mat[r]
            v = row[c]
            if not v:
                continue
            g = 0
            for j in range(c, ncols):
                nv = row[j] * pv - pivot_row[j] * v
                row[j] = nv
                if nv:
                    g = _gcd(g, nv)
            if g > 1:
                for j in range(c, ncols):
                    if row[j]:
                        row[j] //= g
        rank += 1
        prow += 1
        if prow == nrows:
            break
    return rank


def _gcd(a, b):
    if b < 0:
        b = -b
    while b:
        a, b = b, a % b
    return a

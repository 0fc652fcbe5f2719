# cython: language_level=3
# cython: boundscheck=False, wraparound=False
"""Compiled elimination kernels.

Behavioural twin of _kernel_py (same pivot rule, same canonical RREF, same
record format); works on (numerator, denominator) int pairs directly
instead of Fraction objects.  tests/test_kernels.py checks the two
backends agree exactly.
"""

from math import gcd

BACKEND_NAME = "compiled"


cdef inline tuple rat_reduce(object n, object d):
    if n == 0:
        return (0, 1)
    if d < 0:
        n = -n
        d = -d
    g = gcd(n, d)
    if g != 1:
        n //= g
        d //= g
    return (n, d)


cdef inline tuple rat_add(tuple a, tuple b):
    an = a[0]; ad = a[1]; bn = b[0]; bd = b[1]
    if ad == 1 and bd == 1:
        return (an + bn, 1)
    return rat_reduce(an * bd + bn * ad, ad * bd)


cdef inline tuple rat_mul(tuple a, tuple b):
    an = a[0]; ad = a[1]; bn = b[0]; bd = b[1]
    if an == 0 or bn == 0:
        return (0, 1)
    g1 = gcd(an, bd) if bd != 1 else 1
    if g1 != 1:
        an //= g1
        bd //= g1
    g2 = gcd(bn, ad) if ad != 1 else 1
    if g2 != 1:
        bn //= g2
        ad //= g2
    return (an * bn, ad * bd)


cdef inline tuple rat_neg(tuple a):
    return (-a[0], a[1])


cdef inline tuple rat_inv(tuple a):
    an = a[0]; ad = a[1]
    if an < 0:
        return (-ad, -an)
    return (ad, an)


def rref_pairs(rows, long ncols, bint full=True, bint want_record=False):
    """See _kernel_py.rref_pairs; identical contract and output."""
    cdef long m = len(rows)
    cdef long r, t, i, j
    work = [dict(row) for row in rows]
    rec = [] if want_record else None
    col_rows = {}
    lead = [0] * m
    for r in range(m):
        for c in work[r]:
            s = col_rows.get(c)
            if s is None:
                col_rows[c] = {r}
            else:
                s.add(r)
        lead[r] = min(work[r]) if work[r] else -1

    def scale(long rr, tuple f):
        row = work[rr]
        for c in list(row):
            row[c] = rat_mul(row[c], f)
        if rec is not None:
            rec.append(("scale", rr, f))

    def axpy(long dst, long src, tuple f):
        rdst = work[dst]
        for c, v in work[src].items():
            cur = rdst.get(c)
            if cur is None:
                nv = rat_mul(f, v)
                if nv[0] != 0:
                    rdst[c] = nv
                    s = col_rows.get(c)
                    if s is None:
                        col_rows[c] = {dst}
                    else:
                        s.add(dst)
            else:
                nv = rat_add(cur, rat_mul(f, v))
                if nv[0] != 0:
                    rdst[c] = nv
                else:
                    del rdst[c]
                    col_rows[c].discard(dst)
        lead[dst] = min(rdst) if rdst else -1
        if rec is not None:
            rec.append(("axpy", dst, src, f))

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
        c = best[1]
        r = best[2]
        live.discard(r)
        piv_col[r] = c
        a = work[r][c]
        if a != (1, 1):
            scale(r, rat_inv(a))
        targets = sorted(
            t for t in col_rows.get(c, ()) if t != r and (full or t in live)
        )
        for t in targets:
            axpy(t, r, rat_neg(work[t][c]))

    if full and piv_col:
        remaining = set(piv_col)
        piv_col = {}
        while remaining:
            best = None
            for r in remaining:
                key = (lead[r], r)
                if best is None or key < best:
                    best = key
            c = best[0]
            r = best[1]
            remaining.discard(r)
            piv_col[r] = c
            a = work[r][c]
            if a != (1, 1):
                scale(r, rat_inv(a))
            for t in sorted(col_rows.get(c, ()) - {r}):
                axpy(t, r, rat_neg(work[t][c]))

    order = sorted(piv_col, key=piv_col.get) + sorted(
        r for r in range(m) if r not in piv_col
    )
    if rec is not None:
        perm = list(range(m))
        pos_of = {r: i for i, r in enumerate(perm)}
        for i in range(m):
            want = order[i]
            j = pos_of[want]
            if j != i:
                other = perm[i]
                perm[i] = want
                perm[j] = other
                pos_of[want] = i
                pos_of[other] = j
                rec.append(("swap", i, j))
    out = [work[r] for r in order]
    pivots = [piv_col[r] for r in order if r in piv_col]
    return out, pivots, rec


def dense_int_rank(rows, long ncols):
    """Rank of a dense integer matrix by fraction-free elimination."""
    mat = [list(row) for row in rows]
    cdef long nrows = len(mat)
    cdef long rank = 0, prow = 0, c, r, j
    cdef long pr
    for c in range(ncols):
        pr = -1
        for r in range(prow, nrows):
            if mat[r][c]:
                pr = r
                break
        if pr < 0:
            continue
        if pr != prow:
            tmp = mat[prow]
            mat[prow] = mat[pr]
            mat[pr] = tmp
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
                    g = gcd(g, nv)
            if g > 1:
                for j in range(c, ncols):
                    if row[j]:
                        row[j] //= g
        rank += 1
        prow += 1
        if prow == nrows:
            break
    return rank

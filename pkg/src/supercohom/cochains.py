"""Super skew-symmetric cochains, per-(degree, weight) cell bases, and the
graded differential.

A k-cochain argument list is kept in canonical form: even basis elements
first, strictly ascending, then odd ones non-decreasing (transposing two
odd arguments is symmetric, every other adjacent transposition is
antisymmetric).  All differential signs are Koszul signs of moving
arguments to the front under that rule; the convention is certified by the
exact d(d(c)) = 0 property tests rather than postulated.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb

from .algebra import AlgebraBasis, StructureTable, monomial_str, parse_monomial
from .errors import BasisError, SerializationError
from .linalg import SparseMatrix

TRIVIAL = "trivial"
ADJOINT = "adjoint"
MODULES = (TRIVIAL, ADJOINT)


def _as_basis(spec_or_basis):
    if isinstance(spec_or_basis, AlgebraBasis):
        return spec_or_basis
    return AlgebraBasis(spec_or_basis)


def canonicalize(basis, ids):
    """Sort an argument list into canonical order.

    Returns (sign, tuple) with the accumulated Koszul sign, or (0, None)
    when an even argument repeats.
    """
    basis = _as_basis(basis)
    sign = 1
    out = []  # list of (parity, key)
    for key in ids:
        p = basis.parity_of(key)
        item = (p, key)
        pos = len(out)
        dup = False
        while pos > 0:
            prev = out[pos - 1]
            if prev > item:
                if not (p and prev[0]):
                    sign = -sign
                pos -= 1
            else:
                dup = prev == item
                break
        if p == 0 and (
            dup or (pos < len(out) and out[pos] == item)
        ):
            return 0, None
        out.insert(pos, item)
    return sign, tuple(key for _, key in out)


def _insert_front(basis, key, parity, rest, rest_parities):
    """Canonicalize (key, *rest) where rest is already canonical."""
    item = (parity, key)
    sign = 1
    pos = 0
    for y, py in zip(rest, rest_parities):
        other = (py, y)
        if other < item:
            if not (parity and py):
                sign = -sign
            pos += 1
        else:
            if other == item and parity == 0:
                return 0, None
            break
    return sign, rest[:pos] + (key,) + rest[pos:]


class CellBasis:
    """Ordered basis of the cochain cell of fixed degree and weight.

    Items are canonical argument tuples for the trivial module, and
    (argument tuple, module element key) pairs for the adjoint module.
    """

    __slots__ = ("spec", "module", "degree", "weight", "items", "index")

    def __init__(self, spec, module, degree, weight, items):
        self.spec = spec
        self.module = module
        self.degree = degree
        self.weight = weight
        self.items = tuple(items)
        self.index = {item: i for i, item in enumerate(self.items)}

    def __len__(self):
        return len(self.items)

    def arg_tuples(self):
        if self.module == TRIVIAL:
            return self.items
        return tuple(sorted({args for args, _ in self.items}))


def _parity_min_weight(spec, parity):
    """A safe lower bound for weights carrying elements of this parity.

    Used only for pruning, so an unachievable bound is harmless; None
    means no element of that parity exists at all.
    """
    vars = spec.vars
    cands = []
    if parity == 0:
        if spec.min_degree == 0:
            cands.append(-vars.weight_shift)
        if vars.n >= 1:
            cands.append(min(vars.even_weights) - vars.weight_shift)
        if vars.m >= 2 and (spec.max_degree is None or spec.max_degree >= 2):
            low = sorted(vars.odd_weights)
            cands.append(low[0] + low[1] - vars.weight_shift)
        if spec.has_grading_element:
            cands.append(0)
    else:
        if vars.m >= 1:
            cands.append(min(vars.odd_weights) - vars.weight_shift)
    return min(cands) if cands else None


def _elements_from(basis, parity, start, cap_weight):
    """Elements of one parity with key >= start, weight <= cap_weight."""
    spec = basis.spec
    w, i = start
    if spec.max_weight is not None:
        cap_weight = min(cap_weight, spec.max_weight)
    while w <= cap_weight:
        level = basis.level(w)
        while i < len(level):
            e = level[i]
            if e.parity == parity:
                yield e
            i += 1
        w += 1
        i = 0


def _argument_tuples(basis, k, g):
    """All canonical k-tuples of basis elements with total weight g.

    Evens are chosen strictly ascending, odds non-decreasing; candidate
    weights are capped by what the remaining slots could still absorb,
    which keeps the recursion finite for infinite-dimensional algebras.
    """
    spec = basis.spec
    min_even = _parity_min_weight(spec, 0)
    min_odd = _parity_min_weight(spec, 1)
    results = []

    def extend_odd(prefix, start, slots, need):
        if slots == 0:
            if need == 0:
                results.append(prefix)
            return
        cap = need // slots  # every remaining weight >= the current one
        for e in _elements_from(basis, 1, start, cap):
            extend_odd(prefix + (e.key,), e.key, slots - 1, need - e.weight)

    def extend_even(prefix, start, slots, k_odd, weight_left):
        if slots == 0:
            if k_odd == 0:
                if weight_left == 0:
                    results.append(prefix)
            else:
                extend_odd(prefix, (spec.min_weight, 0), k_odd, weight_left)
            return
        reserve = k_odd * min_odd if k_odd else 0
        cap = (weight_left - reserve) // slots
        for e in _elements_from(basis, 0, start, cap):
            extend_even(
                prefix + (e.key,),
                (e.key[0], e.key[1] + 1),
                slots - 1,
                k_odd,
                weight_left - e.weight,
            )

    for k_even in range(k + 1):
        k_odd = k - k_even
        if k_even and min_even is None:
            continue
        if k_odd and min_odd is None:
            continue
        extend_even((), (spec.min_weight, 0), k_even, k_odd, g)
    results.sort()
    return results


def enumerate_cell_basis(spec_or_basis, k, g, module=TRIVIAL):
    """Canonical basis of the (degree k, weight g) cochain cell."""
    if k < 0:
        basis = _as_basis(spec_or_basis)
        return CellBasis(basis.spec, module, k, g, ())
    basis = _as_basis(spec_or_basis)
    spec = basis.spec
    if module not in MODULES:
        raise BasisError(f"unknown module tag {module!r}")
    if module == ADJOINT and not spec.is_finite:
        raise BasisError(
            "adjoint cells of algebras with even variables are "
            "infinite-dimensional; only n = 0 families are supported"
        )
    if module == TRIVIAL:
        return CellBasis(spec, module, k, g, _argument_tuples(basis, k, g))
    items = []
    lo = k * spec.min_weight
    hi = k * spec.max_weight
    for wt in range(lo, hi + 1):
        values = basis.level(wt - g)
        if not values:
            continue
        for args in _argument_tuples(basis, k, wt):
            for v in values:
                items.append((args, v.key))
    items.sort()
    return CellBasis(spec, module, k, g, items)


def _pair_extraction_sign(parities, i, j):
    """Koszul sign of moving arguments i < j to the two front slots."""
    s1 = sum(parities[:i])
    s2 = sum(parities[:j]) - parities[i]
    exp = i + j - 1 + parities[i] * s1 + parities[j] * s2
    return -1 if exp & 1 else 1


def _single_extraction_sign(parities, s):
    exp = s + parities[s] * sum(parities[:s])
    return -1 if exp & 1 else 1


# Relative sign of the module-action terms against the bracket-insertion
# terms, including the cochain-parity factor (-1)^{p(x) p(C)}.  This is the
# unique choice (out of the four sign/parity-factor variants) for which
# d(d(c)) = 0 holds exactly on adjoint cells; the property-test suite keeps
# certifying it.
_ACTION_SIGN = -1


def _boundary_terms(basis, table, args, parities):
    """Expansion of the bracket-insertion boundary of one argument tuple."""
    out = {}
    k1 = len(args)
    for i in range(k1):
        for j in range(i + 1, k1):
            br = table.bracket(args[i], args[j])
            if not br:
                continue
            kappa = _pair_extraction_sign(parities, i, j)
            rest = args[:i] + args[i + 1:j] + args[j + 1:]
            rest_par = parities[:i] + parities[i + 1:j] + parities[j + 1:]
            for bkey, c in br.items():
                s2, tup = _insert_front(
                    basis, bkey, basis.parity_of(bkey), rest, rest_par
                )
                if not s2:
                    continue
                coeff = kappa * s2 * c
                cur = out.get(tup, 0) + coeff
                if cur:
                    out[tup] = cur
                else:
                    del out[tup]
    return out


def differential_matrix_between(basis, table, domain, target):
    """Matrix of d: C^k -> C^(k+1) between two cell bases (rows = target)."""
    rows = [dict() for _ in range(len(target))]

    def acc(r, c, v):
        row = rows[r]
        cur = row.get(c, 0) + v
        if cur:
            row[c] = cur
        else:
            del row[c]

    if domain.module == TRIVIAL:
        for r, args in enumerate(target.items):
            parities = tuple(basis.parity_of(x) for x in args)
            for tup, coeff in _boundary_terms(basis, table, args, parities).items():
                acc(r, domain.index[tup], coeff)
    else:
        boundary_cache = {}
        for args, mkey in target.items:
            r = target.index[(args, mkey)]
            parities = tuple(basis.parity_of(x) for x in args)
            if args not in boundary_cache:
                boundary_cache[args] = _boundary_terms(basis, table, args, parities)
            for tup, coeff in boundary_cache[args].items():
                c = domain.index.get((tup, mkey))
                if c is not None:
                    acc(r, c, coeff)
        # module-action terms x_s . c(args minus x_s)
        seen_args = sorted({args for args, _ in target.items})
        for args in seen_args:
            parities = tuple(basis.parity_of(x) for x in args)
            for s, xkey in enumerate(args):
                sub = args[:s] + args[s + 1:]
                sub_par = sum(parities) - parities[s]
                kappa = _single_extraction_sign(parities, s)
                wval = sum(key[0] for key in sub) - domain.weight
                for v in basis.level(wval):
                    c = domain.index.get((sub, v.key))
                    if c is None:
                        continue
                    p_c = (v.parity + sub_par) & 1
                    factor = _ACTION_SIGN * kappa
                    if parities[s] and p_c:
                        factor = -factor
                    for mo, cv in table.bracket(xkey, v.key).items():
                        r = target.index.get((args, mo))
                        if r is not None:
                            acc(r, c, factor * cv)
    return SparseMatrix(len(target), len(domain), rows)


def differential_matrix(spec, k, g, module=TRIVIAL, basis=None, table=None):
    """Matrix of d on the (k, g) cell; rows indexed by the (k+1, g) cell."""
    basis = basis if basis is not None else AlgebraBasis(spec)
    table = table if table is not None else StructureTable(spec, basis)
    domain = enumerate_cell_basis(basis, k, g, module)
    target = enumerate_cell_basis(basis, k + 1, g, module)
    return differential_matrix_between(basis, table, domain, target)


class Cochain:
    """Sparse rational cochain over canonical argument tuples.

    Terms map cell items (argument tuple, or (argument tuple, value key)
    for the adjoint module) to nonzero rational coefficients.
    """

    __slots__ = ("spec", "module", "degree", "weight", "terms")

    def __init__(self, spec, degree, module, terms, weight=None, basis=None):
        self.spec = spec
        self.module = module
        self.degree = degree
        self.terms = {}
        for item, c in terms.items():
            if c:
                self.terms[item] = Fraction(c)
        w = weight
        parities = set()
        basis = basis if basis is not None else (
            AlgebraBasis(spec) if self.terms else None
        )
        for item in self.terms:
            args = item if module == TRIVIAL else item[0]
            if len(args) != degree:
                raise BasisError("argument count does not match cochain degree")
            tw = sum(key[0] for key in args)
            p = sum(basis.parity_of(key) for key in args)
            if module == ADJOINT:
                tw -= item[1][0]
                p += basis.parity_of(item[1])
            if w is None:
                w = tw
            elif tw != w:
                raise BasisError("cochain is not weight-homogeneous")
            parities.add(p & 1)
        if len(parities) > 1:
            raise BasisError("cochain is not parity-homogeneous")
        self.weight = w

    @classmethod
    def zero(cls, spec, degree, module=TRIVIAL, weight=None):
        return cls(spec, degree, module, {}, weight=weight)

    def is_zero(self):
        return not self.terms

    @property
    def parity(self):
        if not self.terms:
            return 0
        basis = AlgebraBasis(self.spec)
        item = next(iter(self.terms))
        args = item if self.module == TRIVIAL else item[0]
        p = sum(basis.parity_of(key) for key in args)
        if self.module == ADJOINT:
            p += basis.parity_of(item[1])
        return p & 1

    def _compatible(self, other):
        if (
            self.spec != other.spec
            or self.module != other.module
            or self.degree != other.degree
        ):
            raise BasisError("cochains live in different cells")

    def __add__(self, other):
        self._compatible(other)
        terms = dict(self.terms)
        for item, c in other.terms.items():
            cur = terms.get(item, 0) + c
            if cur:
                terms[item] = cur
            else:
                terms.pop(item, None)
        w = self.weight if self.weight is not None else other.weight
        return Cochain(self.spec, self.degree, self.module, terms, weight=w)

    def __sub__(self, other):
        return self + other.scaled(-1)

    def scaled(self, c):
        c = Fraction(c)
        terms = {item: v * c for item, v in self.terms.items()} if c else {}
        return Cochain(self.spec, self.degree, self.module, terms, weight=self.weight)

    def __eq__(self, other):
        return (
            isinstance(other, Cochain)
            and self.spec == other.spec
            and self.module == other.module
            and self.degree == other.degree
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash(
            (self.spec, self.module, self.degree, frozenset(self.terms.items()))
        )

    def coordinates(self, cell):
        """Coefficient vector with respect to a cell basis (list of Fractions)."""
        vec = [Fraction(0)] * len(cell)
        for item, c in self.terms.items():
            pos = cell.index.get(item)
            if pos is None:
                raise BasisError("cochain term outside the target cell")
            vec[pos] = c
        return vec

    @classmethod
    def from_coordinates(cls, cell, vec):
        terms = {}
        for pos, c in enumerate(vec):
            if c:
                terms[cell.items[pos]] = Fraction(c)
        return cls(
            cell.spec, cell.degree, cell.module, terms, weight=cell.weight
        )

    def pretty(self, basis=None):
        return cochain_pretty(self, basis)

    def serialize(self):
        lines = [
            "supercohom cochain v1",
            f"algebra: {self.spec.display()}",
            f"module: {self.module}",
            f"degree: {self.degree}",
            f"weight: {self.weight if self.weight is not None else 0}",
        ]
        basis = AlgebraBasis(self.spec)
        vars = self.spec.vars
        for item in sorted(self.terms):
            c = self.terms[item]
            args = item if self.module == TRIVIAL else item[0]
            arg_txt = " ; ".join(basis.element(key).text(vars) for key in args)
            line = f"term: {c} : {arg_txt}"
            if self.module == ADJOINT:
                line += f" -> {basis.element(item[1]).text(vars)}"
            lines.append(line)
        return "\n".join(lines) + "\n"

    @classmethod
    def deserialize(cls, text, expect_spec=None):
        from .algebra import parse_algebra_spec

        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines or lines[0] != "supercohom cochain v1":
            raise SerializationError("not a cochain record")
        head = {}
        terms_raw = []
        for ln in lines[1:]:
            key, _, value = ln.partition(":")
            key = key.strip()
            if key == "term":
                terms_raw.append(value)
            else:
                head[key] = value.strip()
        try:
            spec = parse_algebra_spec(head["algebra"])
            module = head["module"]
            degree = int(head["degree"])
            weight = int(head["weight"])
        except (KeyError, ValueError) as exc:
            raise SerializationError(f"bad cochain header: {exc}") from exc
        if module not in MODULES:
            raise SerializationError(f"unknown module tag {module!r}")
        if expect_spec is not None and spec != expect_spec:
            raise SerializationError(
                f"cochain is over {spec.display()}, expected {expect_spec.display()}"
            )
        basis = AlgebraBasis(spec)
        terms = {}
        for raw in terms_raw:
            coeff_txt, _, rest = raw.partition(":")
            try:
                coeff = Fraction(coeff_txt.strip())
            except ValueError as exc:
                raise SerializationError(f"bad coefficient {coeff_txt!r}") from exc
            value_key = None
            if module == ADJOINT:
                rest, _, val_txt = rest.partition("->")
                value_key = _parse_element_key(basis, val_txt.strip())
            arg_keys = [
                _parse_element_key(basis, part.strip())
                for part in rest.split(";")
                if part.strip()
            ]
            if len(arg_keys) != degree:
                raise SerializationError("term argument count != degree")
            sign, tup = canonicalize(basis, arg_keys)
            if sign == 0:
                continue
            item = tup if module == TRIVIAL else (tup, value_key)
            cur = terms.get(item, 0) + sign * coeff
            if cur:
                terms[item] = cur
            else:
                terms.pop(item, None)
        try:
            return cls(spec, degree, module, terms, weight=weight, basis=basis)
        except BasisError as exc:
            raise SerializationError(str(exc)) from exc


def _parse_element_key(basis, text):
    if text == "G":
        return basis.grading_key()
    try:
        mono = parse_monomial(basis.spec.vars, text)
        return basis.key_of(mono)
    except BasisError as exc:
        raise SerializationError(str(exc)) from exc


def cochain_pretty(c, basis=None):
    """Human-readable sum of C(...) terms, deterministic term order."""
    if c.is_zero():
        return "0"
    basis = basis if basis is not None else AlgebraBasis(c.spec)
    vars = c.spec.vars
    parts = []
    for item in sorted(c.terms):
        coeff = c.terms[item]
        args = item if c.module == TRIVIAL else item[0]
        if args:
            body = "C(" + ",".join(
                basis.element(key).text(vars) for key in args
            ) + ")"
        else:
            body = "1"
        if c.module == ADJOINT:
            body = body[:-1] + " | " + basis.element(item[1]).text(vars) + ")"
        if coeff == 1:
            parts.append(body)
        elif coeff == -1:
            parts.append(f"-{body}")
        else:
            parts.append(f"{coeff} {body}")
    return " + ".join(parts).replace("+ -", "- ")


def differential(c, basis=None, table=None, cells=None):
    """d(c) as a cochain of degree deg(c)+1 and the same weight."""
    basis = basis if basis is not None else AlgebraBasis(c.spec)
    table = table if table is not None else StructureTable(c.spec, basis)
    if c.weight is None:
        return Cochain.zero(c.spec, c.degree + 1, c.module)
    if cells is not None:
        domain, target = cells
    else:
        domain = enumerate_cell_basis(basis, c.degree, c.weight, c.module)
        target = enumerate_cell_basis(basis, c.degree + 1, c.weight, c.module)
    mat = differential_matrix_between(basis, table, domain, target)
    vec = mat.matvec(c.coordinates(domain))
    return Cochain.from_coordinates(target, vec)


def cup_product(c1, c2, basis=None):
    """Exterior product of trivial-coefficient cochains.

    On dual coordinates the product concatenates argument tuples with the
    Koszul sorting sign and a multiplicity factor C(a+b, a) for each odd
    argument occurring a and b times; that normalization is exactly the one
    for which d is a derivation (exact Leibniz rule).
    """
    if c1.module != TRIVIAL or c2.module != TRIVIAL:
        raise BasisError("cup products need trivial coefficients")
    if c1.spec != c2.spec:
        raise BasisError("cup product of cochains over different algebras")
    basis = basis if basis is not None else AlgebraBasis(c1.spec)
    terms = {}
    for s_args, cs in c1.terms.items():
        s_mult = {}
        for key in s_args:
            s_mult[key] = s_mult.get(key, 0) + 1
        for t_args, ct in c2.terms.items():
            sign, tup = canonicalize(basis, s_args + t_args)
            if not sign:
                continue
            factor = 1
            for key, a in s_mult.items():
                if basis.parity_of(key):
                    b = t_args.count(key)
                    if b:
                        factor *= comb(a + b, a)
            coeff = cs * ct * sign * factor
            cur = terms.get(tup, 0) + coeff
            if cur:
                terms[tup] = cur
            else:
                del terms[tup]
    w = None
    if c1.weight is not None and c2.weight is not None:
        w = c1.weight + c2.weight
    return Cochain(
        c1.spec, c1.degree + c2.degree, TRIVIAL, terms, weight=w, basis=basis
    )

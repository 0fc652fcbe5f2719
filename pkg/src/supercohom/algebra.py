"""Generating-function superalgebras of Hamiltonian vector fields.

The families built here are the Poisson algebras Po(2n|m), their quotients
by the center H(2n|m) = Po/Z, the special Hamiltonian ideals SH(0|m), and
the grading-element extensions PoHat/HHat obtained by adjoining an element
G with [G, x] = weight(x)*x.

Conventions, fixed once and relied on everywhere else:

* Even coordinates p_1..p_n, q_1..q_n (exponent vector slots 0..2n-1, the
  p block first); odd Grassmann variables U_1..U_m (bitmask bits 0..m-1).
  Odd factors are always written in ascending index order.
* Odd partial derivatives act from the left: d/dU_k removes bit k and
  multiplies by (-1)^(number of set bits below k).
* weight(monomial) = weighted degree - 2 (standard grading: every variable
  has degree 1), which makes the bracket weight-additive: constants sit at
  weight -2, linear monomials at -1.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import BasisError, SpecParseError

FAMILIES = ("Po", "H", "SH", "PoHat", "HHat")

_FAMILY_CANON = {f.lower(): f for f in FAMILIES}


class Monomial:
    """Product of even coordinate powers and an ascending set of odd factors."""

    __slots__ = ("evens", "mask")

    def __init__(self, evens=(), mask=0):
        self.evens = tuple(evens)
        self.mask = mask

    @property
    def degree(self):
        return sum(self.evens) + self.mask.bit_count()

    @property
    def parity(self):
        return self.mask.bit_count() & 1

    @property
    def is_constant(self):
        return self.mask == 0 and not any(self.evens)

    def sort_key(self):
        return (self.evens, self.mask)

    def __eq__(self, other):
        return (
            isinstance(other, Monomial)
            and self.mask == other.mask
            and self.evens == other.evens
        )

    def __hash__(self):
        return hash((self.evens, self.mask))

    def __repr__(self):
        return f"Monomial({self.evens}, {bin(self.mask)})"


def grassmann_inversions(amask, bmask):
    """Number of pairs (j in amask, i in bmask) with j > i."""
    count = 0
    mb = bmask
    while mb:
        low = mb & -mb
        i = low.bit_length() - 1
        count += (amask >> (i + 1)).bit_count()
        mb ^= low
    return count


def monomial_mul(a, b):
    """Signed product of monomials; sign 0 when odd factors collide.

    The sign is the Koszul sign of interleaving the two ascending odd
    factor lists, i.e. (-1)^(number of inversions).
    """
    if a.mask & b.mask:
        return 0, None
    sign = -1 if grassmann_inversions(a.mask, b.mask) & 1 else 1
    evens = tuple(x + y for x, y in zip(a.evens, b.evens))
    return sign, Monomial(evens, a.mask | b.mask)


def d_even(mono, slot):
    """d/d(even slot) of a monomial: (integer factor, monomial) or (0, None)."""
    e = mono.evens[slot]
    if e == 0:
        return 0, None
    evens = list(mono.evens)
    evens[slot] = e - 1
    return e, Monomial(tuple(evens), mono.mask)


def d_odd(mono, bit):
    """Left derivative d/dU_(bit+1): (sign, monomial) or (0, None)."""
    if not (mono.mask >> bit) & 1:
        return 0, None
    below = mono.mask & ((1 << bit) - 1)
    sign = -1 if below.bit_count() & 1 else 1
    return sign, Monomial(mono.evens, mono.mask & ~(1 << bit))


@dataclass(frozen=True)
class VariableSpec:
    """Variable counts and grading weights for a (2n|m) coordinate set."""

    n: int
    m: int
    even_weights: tuple = ()
    odd_weights: tuple = ()

    def __post_init__(self):
        if self.n < 0 or self.m < 0 or self.n + self.m < 1:
            raise SpecParseError("need n >= 0, m >= 0 and n + m >= 1")
        if self.m > 64:
            raise SpecParseError("at most 64 odd variables are supported")
        if not self.even_weights:
            object.__setattr__(self, "even_weights", (1,) * (2 * self.n))
        if not self.odd_weights:
            object.__setattr__(self, "odd_weights", (1,) * self.m)
        if len(self.even_weights) != 2 * self.n or len(self.odd_weights) != self.m:
            raise SpecParseError("weight vectors do not match variable counts")
        if any(w <= 0 for w in self.even_weights + self.odd_weights):
            raise SpecParseError("variable weights must be positive")
        shifts = {
            self.even_weights[i] + self.even_weights[self.n + i]
            for i in range(self.n)
        } | {2 * w for w in self.odd_weights}
        if len(shifts) != 1:
            raise SpecParseError(
                "gradedness of the bracket needs w(p_i)+w(q_i) = 2 w(U_k) "
                "constant across all variables"
            )
        object.__setattr__(self, "_shift", shifts.pop())

    @classmethod
    def standard(cls, n, m):
        return cls(n, m)

    @property
    def weight_shift(self):
        return self._shift

    @property
    def top_mask(self):
        return (1 << self.m) - 1

    def monomial_weight(self, mono):
        w = -self._shift
        for e, we in zip(mono.evens, self.even_weights):
            w += e * we
        mask = mono.mask
        k = 0
        while mask:
            if mask & 1:
                w += self.odd_weights[k]
            mask >>= 1
            k += 1
        return w

    def one(self):
        return Monomial((0,) * (2 * self.n), 0)


def _even_name(vars, slot):
    if slot < vars.n:
        return "p" if vars.n == 1 else f"p_{slot + 1}"
    return "q" if vars.n == 1 else f"q_{slot - vars.n + 1}"


def monomial_str(vars, mono):
    """Render a monomial the way the tables print them, e.g. "p^2q U_1 U_3"."""
    even_parts = []
    for slot, e in enumerate(mono.evens):
        if e == 0:
            continue
        name = _even_name(vars, slot)
        even_parts.append(name if e == 1 else f"{name}^{e}")
    odd_parts = [f"U_{k + 1}" for k in range(vars.m) if (mono.mask >> k) & 1]
    even_txt = ("" if vars.n == 1 else " ").join(even_parts)
    odd_txt = " ".join(odd_parts)
    if even_txt and odd_txt:
        return even_txt + " " + odd_txt
    return even_txt or odd_txt or "1"


_FACTOR_RE = re.compile(r"(p|q|U)(?:_(\d+))?(?:\^(\d+))?")


def parse_monomial(vars, text):
    """Inverse of monomial_str; also accepts "1" and "*"-separated factors."""
    s = text.replace("*", " ").strip()
    if s == "1":
        return vars.one()
    evens = [0] * (2 * vars.n)
    mask = 0
    covered = []
    for match in _FACTOR_RE.finditer(s):
        covered.append((match.start(), match.end()))
        name, idx, power = match.group(1), match.group(2), match.group(3)
        power = int(power) if power else 1
        if name == "U":
            if idx is None:
                raise BasisError(f"odd variable needs an index in {text!r}")
            bit = int(idx) - 1
            if not 0 <= bit < vars.m:
                raise BasisError(f"odd variable U_{idx} out of range in {text!r}")
            if power != 1 or (mask >> bit) & 1:
                raise BasisError(f"repeated odd variable in {text!r}")
            mask |= 1 << bit
        else:
            i = int(idx) - 1 if idx is not None else 0
            if not 0 <= i < vars.n:
                raise BasisError(f"even variable index out of range in {text!r}")
            slot = i if name == "p" else vars.n + i
            evens[slot] += power
    rest = s
    for start, end in sorted(covered, reverse=True):
        rest = rest[:start] + rest[end:]
    if rest.strip():
        raise BasisError(f"could not parse monomial {text!r}")
    return Monomial(tuple(evens), mask)


class SuperPolynomial:
    """Sparse rational combination of monomials over a fixed variable set."""

    __slots__ = ("vars", "terms")

    def __init__(self, vars, terms=None):
        self.vars = vars
        self.terms = {}
        if terms:
            for mono, c in terms.items():
                if c:
                    self.terms[mono] = Fraction(c)

    @classmethod
    def zero(cls, vars):
        return cls(vars)

    @classmethod
    def from_monomial(cls, vars, mono, coeff=1):
        return cls(vars, {mono: Fraction(coeff)})

    @classmethod
    def parse(cls, vars, text):
        return cls.from_monomial(vars, parse_monomial(vars, text))

    def is_zero(self):
        return not self.terms

    def _check_vars(self, other):
        if self.vars != other.vars:
            raise BasisError("polynomials over different variable sets")

    def __add__(self, other):
        self._check_vars(other)
        terms = dict(self.terms)
        for mono, c in other.terms.items():
            nc = terms.get(mono, 0) + c
            if nc:
                terms[mono] = nc
            else:
                terms.pop(mono, None)
        out = SuperPolynomial(self.vars)
        out.terms = terms
        return out

    def __neg__(self):
        return self.scaled(-1)

    def __sub__(self, other):
        return self + (-other)

    def scaled(self, c):
        c = Fraction(c)
        out = SuperPolynomial(self.vars)
        if c:
            out.terms = {mono: v * c for mono, v in self.terms.items()}
        return out

    def __eq__(self, other):
        return (
            isinstance(other, SuperPolynomial)
            and self.vars == other.vars
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.vars, frozenset(self.terms.items())))

    @property
    def parity(self):
        parities = {mono.parity for mono in self.terms}
        if not parities:
            return 0
        if len(parities) > 1:
            raise ValueError("polynomial is not parity-homogeneous")
        return parities.pop()

    @property
    def weight(self):
        weights = {self.vars.monomial_weight(mono) for mono in self.terms}
        if not weights:
            return None
        if len(weights) > 1:
            raise ValueError("polynomial is not weight-homogeneous")
        return weights.pop()

    def partial(self, var):
        """Partial derivative; var is "p", "q_2", "U_3" style."""
        kind, pos = _parse_variable(self.vars, var)
        out = {}
        for mono, c in self.terms.items():
            if kind == "even":
                f, dm = d_even(mono, pos)
            else:
                f, dm = d_odd(mono, pos)
            if f:
                nc = out.get(dm, 0) + c * f
                if nc:
                    out[dm] = nc
                else:
                    out.pop(dm, None)
        return SuperPolynomial(self.vars, out)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for mono in sorted(self.terms, key=Monomial.sort_key):
            c = self.terms[mono]
            txt = monomial_str(self.vars, mono)
            if c == 1:
                parts.append(txt)
            elif c == -1:
                parts.append(f"-{txt}")
            elif mono.is_constant:
                parts.append(str(c))
            else:
                parts.append(f"{c} {txt}")
        return " + ".join(parts).replace("+ -", "- ")

    __repr__ = __str__


def _parse_variable(vars, var):
    if isinstance(var, tuple):
        return var
    match = _FACTOR_RE.fullmatch(var.strip())
    if not match or match.group(3):
        raise BasisError(f"not a variable: {var!r}")
    name, idx = match.group(1), match.group(2)
    if name == "U":
        bit = int(idx) - 1
        if not 0 <= bit < vars.m:
            raise BasisError(f"odd variable out of range: {var!r}")
        return ("odd", bit)
    i = int(idx) - 1 if idx is not None else 0
    if not 0 <= i < vars.n:
        raise BasisError(f"even variable out of range: {var!r}")
    return ("even", i if name == "p" else vars.n + i)


def partial_derivative(f, var):
    return f.partial(var)


def poisson_bracket(f, g):
    """{f,g} = sum_i (df/dp_i dg/dq_i - df/dq_i dg/dp_i)
               - (-1)^p(f) sum_k df/dU_k dg/dU_k.

    Evaluated term by term, so parity-inhomogeneous inputs are handled by
    bilinear extension over their parity components.
    """
    vars = f.vars
    if vars != g.vars:
        raise BasisError("bracket of polynomials over different variable sets")
    n, m = vars.n, vars.m
    out = {}

    def _acc(mono, c):
        if not c:
            return
        nc = out.get(mono, 0) + c
        if nc:
            out[mono] = nc
        else:
            del out[mono]

    for mf, cf in f.terms.items():
        # -(-1)^p(f): +1 for odd f-terms, -1 for even ones
        odd_factor = 1 if mf.parity else -1
        for mg, cg in g.terms.items():
            c = cf * cg
            for i in range(n):
                e1, m1 = d_even(mf, i)
                if e1:
                    e2, m2 = d_even(mg, n + i)
                    if e2:
                        s, mm = monomial_mul(m1, m2)
                        if s:
                            _acc(mm, c * e1 * e2 * s)
                e1, m1 = d_even(mf, n + i)
                if e1:
                    e2, m2 = d_even(mg, i)
                    if e2:
                        s, mm = monomial_mul(m1, m2)
                        if s:
                            _acc(mm, -c * e1 * e2 * s)
            for k in range(m):
                s1, m1 = d_odd(mf, k)
                if s1:
                    s2, m2 = d_odd(mg, k)
                    if s2:
                        s, mm = monomial_mul(m1, m2)
                        if s:
                            _acc(mm, c * odd_factor * s1 * s2 * s)
    return SuperPolynomial(vars, out)


_SPEC_RE = re.compile(r"^\s*([A-Za-z]+)\s*\(\s*(\d+)\s*\|\s*(\d+)\s*\)\s*$")


@dataclass(frozen=True)
class AlgebraSpec:
    """One of the algebra families over a fixed variable set."""

    family: str
    vars: VariableSpec

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise SpecParseError(f"unknown family {self.family!r}")
        if self.base_family == "SH":
            if self.vars.n != 0:
                raise SpecParseError("SH requires n=0")
            if self.vars.m < 3:
                raise SpecParseError("SH(0|m) requires m >= 3")

    @property
    def base_family(self):
        return {"PoHat": "Po", "HHat": "H"}.get(self.family, self.family)

    @property
    def has_grading_element(self):
        return self.family in ("PoHat", "HHat")

    @property
    def drops_constant(self):
        return self.base_family in ("H", "SH")

    @property
    def drops_top(self):
        return self.base_family == "SH"

    @property
    def is_finite(self):
        return self.vars.n == 0

    @property
    def min_degree(self):
        return 0 if self.base_family == "Po" else 1

    @property
    def max_degree(self):
        if self.vars.n > 0:
            return None
        if self.base_family == "SH":
            return self.vars.m - 1
        return self.vars.m

    @property
    def min_weight(self):
        w = self.min_degree - self.vars.weight_shift
        if self.has_grading_element:
            w = min(w, 0)
        return w

    @property
    def max_weight(self):
        if self.max_degree is None:
            return None
        w = self.max_degree * max(
            self.vars.odd_weights, default=1
        ) - self.vars.weight_shift
        if self.has_grading_element:
            w = max(w, 0)
        return w

    def display(self):
        return f"{self.family}({2 * self.vars.n}|{self.vars.m})"


def parse_algebra_spec(text):
    """Parse "Po(2n|m)" / "H(2n|m)" / "SH(0|m)" / "PoHat" / "HHat" strings."""
    match = _SPEC_RE.match(text)
    if not match:
        raise SpecParseError(f"cannot parse algebra spec {text!r}")
    family = _FAMILY_CANON.get(match.group(1).lower())
    if family is None:
        raise SpecParseError(f"unknown algebra family in {text!r}")
    two_n, m = int(match.group(2)), int(match.group(3))
    if two_n % 2:
        raise SpecParseError(f"even variable count must be even in {text!r}")
    return AlgebraSpec(family, VariableSpec.standard(two_n // 2, m))


@dataclass(frozen=True)
class BasisElement:
    """Basis vector with a (weight, index) key; payload None means G."""

    key: tuple
    monomial: object
    parity: int
    weight: int

    @property
    def is_grading_element(self):
        return self.monomial is None

    def text(self, vars):
        return "G" if self.monomial is None else monomial_str(vars, self.monomial)


class AlgebraBasis:
    """Per-weight bases of an algebra family, built lazily and deterministically.

    Keys are (weight, index) pairs with indices dense inside each weight
    level, ordered by ascending even-exponent vector then odd mask, with
    the grading element last in its level.
    """

    def __init__(self, spec):
        self.spec = spec
        self._levels = {}
        self._mono_index = {}

    def level(self, weight):
        cached = self._levels.get(weight)
        if cached is not None:
            return cached
        monos = sorted(self._level_monomials(weight), key=Monomial.sort_key)
        elems = [
            BasisElement((weight, i), mono, mono.parity, weight)
            for i, mono in enumerate(monos)
        ]
        if self.spec.has_grading_element and weight == 0:
            elems.append(BasisElement((0, len(elems)), None, 0, 0))
        elems = tuple(elems)
        self._levels[weight] = elems
        self._mono_index[weight] = {
            e.monomial: e.key for e in elems if e.monomial is not None
        }
        return elems

    def _level_monomials(self, weight):
        spec = self.spec
        vars = spec.vars
        target = weight + vars.weight_shift
        if target < 0:
            return
        max_degree = spec.max_degree
        for mask in range(1 << vars.m):
            rem = target
            k = 0
            mm = mask
            while mm:
                if mm & 1:
                    rem -= vars.odd_weights[k]
                mm >>= 1
                k += 1
            if rem < 0:
                continue
            odd_deg = mask.bit_count()
            for evens in _exponent_vectors(vars.even_weights, rem):
                degree = sum(evens) + odd_deg
                if degree < spec.min_degree:
                    continue
                if max_degree is not None and degree > max_degree:
                    continue
                yield Monomial(evens, mask)

    def element(self, key):
        level = self.level(key[0])
        if not 0 <= key[1] < len(level):
            raise BasisError(f"no basis element with key {key}")
        return level[key[1]]

    def parity_of(self, key):
        return self.element(key).parity

    def key_of(self, mono, weight=None):
        if weight is None:
            weight = self.spec.vars.monomial_weight(mono)
        self.level(weight)
        key = self._mono_index[weight].get(mono)
        if key is None:
            raise BasisError(
                f"monomial {monomial_str(self.spec.vars, mono)} is not a basis "
                f"element of {self.spec.display()}"
            )
        return key

    def grading_key(self):
        if not self.spec.has_grading_element:
            raise BasisError(f"{self.spec.display()} has no grading element")
        return self.level(0)[-1].key

    def window(self, g_min, g_max):
        out = []
        for w in range(g_min, g_max + 1):
            out.extend(self.level(w))
        return out

    def all_elements(self):
        if not self.spec.is_finite:
            raise BasisError(f"{self.spec.display()} is infinite-dimensional")
        return self.window(self.spec.min_weight, self.spec.max_weight)


def _exponent_vectors(weights, total):
    """All exponent tuples e >= 0 with sum(e_i * weights_i) == total."""
    if not weights:
        if total == 0:
            yield ()
        return
    w = weights[0]
    for e in range(total // w + 1):
        for rest in _exponent_vectors(weights[1:], total - e * w):
            yield (e,) + rest


def enumerate_basis(spec, weight):
    """All basis elements of the given weight, in canonical order."""
    return list(AlgebraBasis(spec).level(weight))


class StructureTable:
    """Cache of brackets between basis elements, keyed (key_i, key_j), i <= j.

    The cache is filled idempotently; the bracket itself always comes from
    the generating-function Poisson bracket plus the family projection, so
    concurrent fills of the same cell produce identical entries.
    """

    def __init__(self, spec, basis=None):
        self.spec = spec
        self.basis = basis if basis is not None else AlgebraBasis(spec)
        self._cache = {}

    def bracket(self, ka, kb):
        """[x_ka, x_kb] expanded over basis keys (dict key -> Fraction)."""
        if ka <= kb:
            return self._pair(ka, kb)
        base = self._pair(kb, ka)
        pa = self.basis.parity_of(ka)
        pb = self.basis.parity_of(kb)
        sign = 1 if (pa and pb) else -1
        return {k: sign * c for k, c in base.items()}

    def _pair(self, ka, kb):
        cached = self._cache.get((ka, kb))
        if cached is not None:
            return cached
        ea = self.basis.element(ka)
        eb = self.basis.element(kb)
        result = self._bracket_elements(ea, eb)
        self._cache[(ka, kb)] = result
        return result

    def _bracket_elements(self, ea, eb):
        spec = self.spec
        if ea.is_grading_element and eb.is_grading_element:
            return {}
        if ea.is_grading_element:
            if eb.weight == 0:
                return {}
            return {eb.key: Fraction(eb.weight)}
        if eb.is_grading_element:
            if ea.weight == 0:
                return {}
            return {ea.key: Fraction(-ea.weight)}
        vars = spec.vars
        fa = SuperPolynomial.from_monomial(vars, ea.monomial)
        fb = SuperPolynomial.from_monomial(vars, eb.monomial)
        poly = poisson_bracket(fa, fb)
        return self.project(poly)

    def project(self, poly):
        """Family projection of a polynomial, expanded over basis keys."""
        spec = self.spec
        vars = spec.vars
        out = {}
        for mono, c in poly.terms.items():
            if spec.drops_constant and mono.is_constant:
                continue
            if (
                spec.drops_top
                and mono.mask == vars.top_mask
                and not any(mono.evens)
            ):
                continue
            out[self.basis.key_of(mono)] = c
        return out

    def bracket_combo(self, x, y):
        """Bracket of two combinations over basis keys."""
        out = {}
        for ka, ca in x.items():
            for kb, cb in y.items():
                c = ca * cb
                for k, v in self.bracket(ka, kb).items():
                    nv = out.get(k, 0) + c * v
                    if nv:
                        out[k] = nv
                    else:
                        del out[k]
        return out

    def fill_window(self, g_min, g_max):
        """Precompute all pairs from the window whose bracket stays at or
        below its top; pairs escaping the window are computed on demand."""
        elems = self.basis.window(g_min, g_max)
        for i, ea in enumerate(elems):
            for eb in elems[i:]:
                if ea.weight + eb.weight <= g_max:
                    self._pair(ea.key, eb.key)
        return self

    def cached_pairs(self):
        return dict(self._cache)


def build_structure_table(spec, weight_window):
    g_min, g_max = weight_window
    if g_min > g_max:
        raise SpecParseError("empty weight window")
    return StructureTable(spec).fill_window(g_min, g_max)


def algebra_bracket(spec_or_table, x, y):
    """Bracket of two basis-key combinations in the family's algebra."""
    table = (
        spec_or_table
        if isinstance(spec_or_table, StructureTable)
        else StructureTable(spec_or_table)
    )
    return table.bracket_combo(x, y)

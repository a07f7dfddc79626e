"""Exact sparse multivariate arithmetic for cluster dynamics.

MultiPoly is a sparse map from integer exponent vectors to arbitrary-precision
integer coefficients.  Negative exponents are allowed in general (coefficient
monomials live in a Laurent ring); division and gcd shift their inputs to
ordinary polynomials first, so results are exact.  RationalFn keeps a
numerator/denominator pair normalized to gcd one, no shared monomial factor,
and positive leading denominator coefficient, which makes equality and
Laurentness syntactic checks.
"""

from __future__ import annotations

from math import gcd as igcd


class NotDivisible(ArithmeticError):
    """Exact division was requested but the quotient is not polynomial."""


class ResourceLimit(RuntimeError):
    """A single polynomial operation exceeded the term-operation budget."""


TERM_OP_LIMIT = 1 << 32


class MultiPoly:
    """Sparse polynomial over a fixed variable roster of width `nvars`."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms=None):
        self.nvars = nvars
        clean = {}
        for exps, c in (terms or {}).items():
            if len(exps) != nvars:
                raise ValueError(f"exponent width {len(exps)} != {nvars}")
            if c:
                clean[tuple(exps)] = c
        self.terms = clean

    @classmethod
    def zero(cls, nvars: int) -> "MultiPoly":
        return cls(nvars)

    @classmethod
    def constant(cls, nvars: int, c: int) -> "MultiPoly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def monomial(cls, nvars: int, exps, c: int = 1) -> "MultiPoly":
        return cls(nvars, {tuple(exps): c})

    @classmethod
    def variable(cls, nvars: int, i: int) -> "MultiPoly":
        return cls(nvars, {tuple(1 if j == i else 0 for j in range(nvars)): 1})

    def is_zero(self) -> bool:
        return not self.terms

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def is_one(self) -> bool:
        return self.terms == {(0,) * self.nvars: 1}

    def items(self):
        """Terms in descending lexicographic exponent order."""
        return sorted(self.terms.items(), reverse=True)

    def leading(self):
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms)
        return e, self.terms[e]

    def coefficients(self):
        return [c for _, c in self.items()]

    def __eq__(self, other):
        return (isinstance(other, MultiPoly) and self.nvars == other.nvars
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def _check(self, other):
        if not isinstance(other, MultiPoly) or other.nvars != self.nvars:
            raise ValueError("variable rosters differ")

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return MultiPoly(self.nvars, out)

    def __neg__(self):
        return MultiPoly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return MultiPoly(self.nvars,
                             {e: c * other for e, c in self.terms.items()})
        self._check(other)
        if len(self.terms) * len(other.terms) > TERM_OP_LIMIT:
            raise ResourceLimit("product exceeds the term-operation budget")
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MultiPoly(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        out = MultiPoly.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    def shift(self, exps) -> "MultiPoly":
        """Multiply by the monomial with the given exponent vector."""
        return MultiPoly(self.nvars,
                         {tuple(a + b for a, b in zip(e, exps)): c
                          for e, c in self.terms.items()})

    def min_exponents(self):
        """Coordinatewise minimum exponent over all terms (zero if none)."""
        if not self.terms:
            return (0,) * self.nvars
        return tuple(min(e[i] for e in self.terms) for i in range(self.nvars))

    def substitute_monomials(self, nvars_out: int, images) -> "MultiPoly":
        """Map every variable to a monomial of a new roster.

        `images[i]` is the exponent vector (width nvars_out) that variable i
        becomes; the zero vector sends it to 1.  Coefficients are unchanged.
        """
        out = {}
        for e, c in self.terms.items():
            img = [0] * nvars_out
            for i, k in enumerate(e):
                if k:
                    for j, m in enumerate(images[i]):
                        img[j] += k * m
            key = tuple(img)
            out[key] = out.get(key, 0) + c
        return MultiPoly(nvars_out, out)

    def __repr__(self):
        if not self.terms:
            return "0"

        def fmt(e, c):
            vs = "*".join(f"v{i}^{k}" if k != 1 else f"v{i}"
                          for i, k in enumerate(e) if k)
            if not vs:
                return str(c)
            return vs if c == 1 else f"-{vs}" if c == -1 else f"{c}*{vs}"

        return " + ".join(fmt(e, c) for e, c in self.items())


def _to_poly_shift(p: MultiPoly):
    """Shift negative exponents away; returns (ordinary polynomial, shift)."""
    shift = tuple(min(0, m) for m in p.min_exponents())
    if any(shift):
        return p.shift(tuple(-s for s in shift)), shift
    return p, shift


def divide_exact(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    """The exact quotient a / b in the Laurent ring; NotDivisible otherwise.

    Both inputs are shifted monomial-free first, so monomials act as units:
    x / x^2 is x^-1, not an error.
    """
    a._check(b)
    if b.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if a.is_zero():
        return MultiPoly.zero(a.nvars)
    sa, sb = a.min_exponents(), b.min_exponents()
    pa = a.shift(tuple(-s for s in sa))
    pb = b.shift(tuple(-s for s in sb))
    q = {}
    rest = dict(pa.terms)
    eb, cb = pb.leading()
    while rest:
        er = max(rest)
        cr = rest[er]
        e = tuple(x - y for x, y in zip(er, eb))
        if any(k < 0 for k in e) or cr % cb:
            raise NotDivisible(f"{a!r} is not divisible by {b!r}")
        c = cr // cb
        q[e] = c
        for e2, c2 in pb.terms.items():
            key = tuple(x + y for x, y in zip(e, e2))
            nc = rest.get(key, 0) - c * c2
            if nc:
                rest[key] = nc
            else:
                rest.pop(key, None)
    return MultiPoly(a.nvars, q).shift(tuple(x - y for x, y in zip(sa, sb)))


def content(p: MultiPoly) -> int:
    """Nonnegative gcd of the integer coefficients."""
    g = 0
    for c in p.terms.values():
        g = igcd(g, c)
    return g


def _max_degree(p: MultiPoly, v: int) -> int:
    return max((e[v] for e in p.terms), default=0)


def _univariate(p: MultiPoly, v: int):
    """View as a univariate polynomial in variable v with MultiPoly
    coefficients (in which v's exponent is zeroed)."""
    coeffs: dict[int, dict] = {}
    for e, c in p.terms.items():
        base = tuple(0 if i == v else k for i, k in enumerate(e))
        coeffs.setdefault(e[v], {})[base] = c
    return {d: MultiPoly(p.nvars, t) for d, t in coeffs.items()}


def _from_univariate(nvars: int, v: int, coeffs) -> MultiPoly:
    out = {}
    for d, poly in coeffs.items():
        for e, c in poly.terms.items():
            key = tuple(d if i == v else k for i, k in enumerate(e))
            out[key] = c
    return MultiPoly(nvars, out)


def _poly_content(coeffs, nvars: int) -> MultiPoly:
    g = MultiPoly.zero(nvars)
    for poly in coeffs.values():
        g = gcd(g, poly)
    return g


def _pseudo_mod(a, b, v: int, nvars: int):
    """Pseudo-remainder of univariate views a mod b (leading b coefficient
    multiplied through), as a univariate view."""
    db = max(b)
    lb = b[db]
    r = dict(a)
    while r and max(r) >= db:
        dr = max(r)
        lr = r[dr]
        nr = {}
        for d, poly in r.items():
            nr[d] = poly * lb
        for d, poly in b.items():
            key = d + dr - db
            nr[key] = nr.get(key, MultiPoly.zero(nvars)) - poly * lr
        r = {d: poly for d, poly in nr.items() if not poly.is_zero()}
    return r


def gcd(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    """Polynomial gcd with positive leading coefficient, computed by the
    primitive pseudo-remainder scheme, recursing one variable at a time."""
    a._check(b)
    if a.is_zero():
        return _positive(b)
    if b.is_zero():
        return _positive(a)
    pa, _ = _to_poly_shift(a)
    pb, _ = _to_poly_shift(b)
    if pa.is_monomial() or pb.is_monomial():
        exps = tuple(min(x, y) for x, y in
                     zip(pa.min_exponents(), pb.min_exponents()))
        return MultiPoly.monomial(a.nvars, exps, igcd(content(pa), content(pb)))
    return _positive(_gcd_poly(pa, pb))


def _positive(p: MultiPoly) -> MultiPoly:
    if p.terms and p.leading()[1] < 0:
        return -p
    return p


def _gcd_poly(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    if a.is_zero():
        return b
    if b.is_zero():
        return a
    v = next((i for i in reversed(range(a.nvars))
              if _max_degree(a, i) or _max_degree(b, i)), None)
    if v is None:
        return MultiPoly.constant(a.nvars, igcd(a.terms[(0,) * a.nvars],
                                                b.terms[(0,) * b.nvars]))
    ua, ub = _univariate(a, v), _univariate(b, v)
    ca, cb = _poly_content(ua, a.nvars), _poly_content(ub, a.nvars)
    pa = {d: divide_exact(p, ca) for d, p in ua.items()}
    pb = {d: divide_exact(p, cb) for d, p in ub.items()}
    if max(pa) < max(pb):
        pa, pb = pb, pa
    while True:
        r = _pseudo_mod(pa, pb, v, a.nvars)
        if not r:
            break
        rc = _poly_content(r, a.nvars)
        pa, pb = pb, {d: divide_exact(p, rc) for d, p in r.items()}
        if max(pb) == 0:
            pb = {0: MultiPoly.constant(a.nvars, 1)}
            break
    prim = _from_univariate(a.nvars, v, pb)
    return _gcd_poly(ca, cb) * prim


class RationalFn:
    """A normalized quotient of MultiPolys.

    Normal form: no negative exponents, numerator and denominator coprime
    with no shared monomial factor, denominator leading coefficient positive.
    Two equal functions have identical representations.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: MultiPoly, den: MultiPoly):
        num._check(den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            self.num = MultiPoly.zero(num.nvars)
            self.den = MultiPoly.constant(num.nvars, 1)
            return
        joint = tuple(min(a, b) for a, b in
                      zip(num.min_exponents(), den.min_exponents()))
        if any(joint):
            num = num.shift(tuple(-s for s in joint))
            den = den.shift(tuple(-s for s in joint))
        g = gcd(num, den)
        if not g.is_one():
            num = divide_exact(num, g)
            den = divide_exact(den, g)
        if den.leading()[1] < 0:
            num, den = -num, -den
        self.num = num
        self.den = den

    @classmethod
    def from_poly(cls, p: MultiPoly) -> "RationalFn":
        return cls(p, MultiPoly.constant(p.nvars, 1))

    @classmethod
    def variable(cls, nvars: int, i: int) -> "RationalFn":
        return cls.from_poly(MultiPoly.variable(nvars, i))

    @classmethod
    def constant(cls, nvars: int, c: int) -> "RationalFn":
        return cls.from_poly(MultiPoly.constant(nvars, c))

    def __eq__(self, other):
        return (isinstance(other, RationalFn)
                and self.num == other.num and self.den == other.den)

    def __hash__(self):
        return hash((self.num, self.den))

    def __add__(self, other):
        return RationalFn(self.num * other.den + other.num * self.den,
                          self.den * other.den)

    def __sub__(self, other):
        return RationalFn(self.num * other.den - other.num * self.den,
                          self.den * other.den)

    def __mul__(self, other):
        return RationalFn(self.num * other.num, self.den * other.den)

    def __truediv__(self, other):
        if other.num.is_zero():
            raise ZeroDivisionError("division by the zero function")
        return RationalFn(self.num * other.den, self.den * other.num)

    def __pow__(self, k: int):
        if k < 0:
            return RationalFn(self.den ** -k, self.num ** -k)
        return RationalFn(self.num ** k, self.den ** k)

    def is_one(self) -> bool:
        return self.num.is_one() and self.den.is_one()

    def is_laurent(self) -> bool:
        """True when the function is a Laurent polynomial with integer
        coefficients: the normalized denominator is a single monic term."""
        return self.den.is_monomial() and self.den.leading()[1] == 1

    def has_nonnegative_coefficients(self) -> bool:
        return all(c > 0 for c in self.num.terms.values())

    def __repr__(self):
        return f"({self.num!r}) / ({self.den!r})"

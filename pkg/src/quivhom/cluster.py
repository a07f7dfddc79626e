"""Seed dynamics attached to tracked quiver mutation.

A seed carries one rational function per vertex (the cluster), one coefficient
per vertex drawn from a semifield, and a tracked quiver.  Mutation exchanges
one cluster variable using the arrow counts of the current quiver read off
before the quiver itself mutates, so walk-class deletions feed back into later
exchanges but never into the one being computed.

The variable roster of every polynomial in a seed is fixed: first the n
cluster variables of the basepoint, then one slot per semifield generator.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .mutation import TrackedQuiver, init_tracked, mutate
from .poly import MultiPoly, NotDivisible, RationalFn, divide_exact
from .quiver import Quiver, adjacency_matrix
from .walks import DecisionUnknown

MAX_RANK = 6
MAX_DEPTH = 8


class NotHomogeneous(ValueError):
    """A cluster variable fails to be homogeneous for the vertex grading."""


class TrivialSemifield:
    """The one-element semifield; every coefficient is 1."""

    size = 0

    def one(self):
        return ()

    def product(self, a, b):
        return ()

    def power(self, a, k: int):
        return ()

    def inverse(self, a):
        return ()

    def add(self, a, b):
        return ()

    def __eq__(self, other):
        return isinstance(other, TrivialSemifield)

    def __hash__(self):
        return hash(TrivialSemifield)

    def __repr__(self):
        return "TrivialSemifield()"


class TropicalSemifield:
    """Free tropical semifield on `size` generators.

    Elements are exponent tuples of Laurent monomials in the generators;
    addition takes coordinatewise minima.
    """

    def __init__(self, size: int):
        if size < 0:
            raise ValueError("need a nonnegative number of generators")
        self.size = size

    def one(self):
        return (0,) * self.size

    def generator(self, j: int):
        return tuple(1 if i == j else 0 for i in range(self.size))

    def product(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def power(self, a, k: int):
        return tuple(x * k for x in a)

    def inverse(self, a):
        return tuple(-x for x in a)

    def add(self, a, b):
        return tuple(min(x, y) for x, y in zip(a, b))

    def __eq__(self, other):
        return isinstance(other, TropicalSemifield) and other.size == self.size

    def __hash__(self):
        return hash((TropicalSemifield, self.size))

    def __repr__(self):
        return f"TropicalSemifield({self.size})"


@dataclass(frozen=True)
class Seed:
    """A cluster, a coefficient tuple, and the tracked quiver they follow."""

    semifield: object
    cluster: tuple
    coeffs: tuple
    tracked: TrackedQuiver

    @property
    def n(self) -> int:
        return len(self.cluster)

    @property
    def nvars(self) -> int:
        return self.n + self.semifield.size


def _coeff_monomial(s: Seed, elem) -> MultiPoly:
    """Embed a semifield element as a Laurent monomial in the seed's roster."""
    exps = (0,) * s.n + tuple(elem)
    return MultiPoly.monomial(s.nvars, exps)


def _coeff_fn(s: Seed, elem) -> RationalFn:
    return RationalFn(_coeff_monomial(s, elem), MultiPoly.constant(s.nvars, 1))


def initial_seed(q: Quiver, oracle, semifield=None, coeffs=None) -> Seed:
    """The seed at the basepoint: cluster variables are the roster variables.

    Coefficients default to the semifield's unit.
    """
    sf = semifield if semifield is not None else TrivialSemifield()
    if coeffs is None:
        coeffs = tuple(sf.one() for _ in range(q.n))
    coeffs = tuple(tuple(c) for c in coeffs)
    if len(coeffs) != q.n:
        raise ValueError(f"need {q.n} coefficients, got {len(coeffs)}")
    for c in coeffs:
        if len(c) != sf.size:
            raise ValueError("coefficient width does not match the semifield")
    nvars = q.n + sf.size
    cluster = tuple(RationalFn.variable(nvars, i) for i in range(q.n))
    return Seed(sf, cluster, coeffs, init_tracked(q, oracle))


def principal_seed(q: Quiver, oracle) -> Seed:
    """Initial seed with one tropical generator per vertex as coefficients."""
    sf = TropicalSemifield(q.n)
    return initial_seed(q, oracle, sf,
                        tuple(sf.generator(j) for j in range(q.n)))


def is_principal(s: Seed) -> bool:
    """True at a seed whose coefficient roster started out principal."""
    return (isinstance(s.semifield, TropicalSemifield)
            and s.semifield.size == s.n)


def at_basepoint(s: Seed) -> bool:
    nvars = s.nvars
    return (not s.tracked.log
            and s.cluster == tuple(RationalFn.variable(nvars, i)
                                   for i in range(s.n)))


def seed_mutate(s: Seed, k: int) -> Seed:
    """Mutate the seed at vertex k.

    Arrow counts are taken from the current quiver before it mutates.  The
    quiver mutation itself may raise DecisionUnknown; no seed is produced
    then.
    """
    if not 0 <= k < s.n:
        raise ValueError(f"vertex {k} out of range")
    counts = adjacency_matrix(s.tracked.current)
    tracked = mutate(s.tracked, k)
    sf = s.semifield
    y = s.coeffs[k]
    hedge = sf.add(y, sf.one())
    # both exchange monomials over a common denominator, normalized once
    one = MultiPoly.constant(s.nvars, 1)
    num_in, den_in = _coeff_monomial(s, y), one
    num_out, den_out = one, one
    for j in range(s.n):
        if counts[j][k]:
            num_in = num_in * s.cluster[j].num ** counts[j][k]
            den_in = den_in * s.cluster[j].den ** counts[j][k]
        if counts[k][j]:
            num_out = num_out * s.cluster[j].num ** counts[k][j]
            den_out = den_out * s.cluster[j].den ** counts[k][j]
    xk = s.cluster[k]
    total = num_in * den_out + num_out * den_in
    rest = den_in * den_out * _coeff_monomial(s, hedge)
    # the old numerator usually cancels completely; try that before handing
    # a large gcd to the normalizer
    try:
        new_x = RationalFn(divide_exact(total, xk.num) * xk.den, rest)
    except NotDivisible:
        new_x = RationalFn(total * xk.den, rest * xk.num)
    cluster = tuple(new_x if i == k else s.cluster[i] for i in range(s.n))
    coeffs = []
    for j in range(s.n):
        if j == k:
            coeffs.append(sf.inverse(y))
        else:
            adj = sf.product(sf.power(y, counts[k][j]),
                             sf.power(hedge, counts[j][k] - counts[k][j]))
            coeffs.append(sf.product(s.coeffs[j], adj))
    return Seed(sf, cluster, tuple(coeffs), tracked)


def mutate_path(s: Seed, path) -> Seed:
    for k in path:
        s = seed_mutate(s, k)
    return s


def y_hat(s: Seed) -> tuple:
    """Coefficients with the current quiver's arrow imbalance multiplied in.

    Mutating the seed and recomputing these equals mutating them directly by
    the coefficient rule with (1 + previous entry) in place of the semifield
    sum; see y_hat_commutes.
    """
    counts = adjacency_matrix(s.tracked.current)
    out = []
    for j in range(s.n):
        v = _coeff_fn(s, s.coeffs[j])
        for i in range(s.n):
            e = counts[i][j] - counts[j][i]
            if e:
                v = v * s.cluster[i] ** e
        out.append(v)
    return tuple(out)


def y_hat_commutes(s: Seed, k: int) -> bool:
    """Check the commutation square at one mutation step."""
    counts = adjacency_matrix(s.tracked.current)
    before = y_hat(s)
    after = y_hat(seed_mutate(s, k))
    one = RationalFn.constant(s.nvars, 1)
    for j in range(s.n):
        if j == k:
            expected = before[k] ** -1
        else:
            expected = (before[j] * before[k] ** counts[k][j]
                        * (one + before[k]) ** (counts[j][k] - counts[k][j]))
        if after[j] != expected:
            return False
    return True


def _specialized(s: Seed, i: int):
    """Numerator and denominator of cluster[i] with every x set to 1."""
    nvars = s.nvars
    images = [(0,) * nvars] * s.n
    images += [tuple(1 if j == nvars - s.semifield.size + m else 0
                     for j in range(nvars))
               for m in range(s.semifield.size)]
    x = s.cluster[i]
    return (x.num.substitute_monomials(nvars, images),
            x.den.substitute_monomials(nvars, images))


def f_polynomial(s0: Seed, path, i: int) -> MultiPoly:
    """Specialize the variable at `i` after `path` to x = 1, over a seed with
    principal coefficients.  Raises NotDivisible if the specialized
    denominator does not divide out."""
    if not (is_principal(s0) and at_basepoint(s0)):
        raise ValueError("need an initial seed with principal coefficients")
    st = mutate_path(s0, path)
    num, den = _specialized(st, i)
    return divide_exact(num, den)


def _evaluate_terms(s0: Seed, p: MultiPoly):
    """Evaluate a polynomial in the principal generators inside s0's
    semifield, sending generator j to s0.coeffs[j]."""
    sf = s0.semifield
    n = s0.n
    total = None
    for e, c in p.terms.items():
        if c < 0:
            raise ValueError("cannot evaluate a subtraction in a semifield")
        elem = sf.one()
        for j in range(n):
            k = e[n + j]
            if k:
                elem = sf.product(elem, sf.power(s0.coeffs[j], k))
        total = elem if total is None else sf.add(total, elem)
    if total is None:
        raise ZeroDivisionError("zero has no semifield value")
    return total


def separation_check(s0: Seed, path, i: int) -> bool:
    """Replay the path with principal coefficients and confirm that the
    specialized variable divided by the evaluated specialization reproduces
    cluster[i] of the actual seed."""
    if not at_basepoint(s0):
        raise ValueError("need a seed at the basepoint")
    st = mutate_path(s0, path)
    p0 = principal_seed(s0.tracked.base, s0.tracked.oracle)
    pt = mutate_path(p0, path)
    x = pt.cluster[i]
    f = f_polynomial(p0, path, i)

    nvars = s0.nvars
    images = [tuple(1 if j == m else 0 for j in range(nvars))
              for m in range(s0.n)]
    for j in range(s0.n):
        if s0.semifield.size == 0:
            images.append((0,) * nvars)
        else:
            images.append((0,) * s0.n + tuple(s0.coeffs[j]))
    lifted = RationalFn(x.num.substitute_monomials(nvars, images),
                        x.den.substitute_monomials(nvars, images))
    scale = _coeff_fn(s0, _evaluate_terms(s0, f))
    return lifted / scale == st.cluster[i]


def g_vector(s: Seed, i: int) -> tuple:
    """Degree of cluster[i] for the grading in which variable j of the
    basepoint has the j-th unit degree and principal generator j has the
    arrow imbalance of the base quiver at j.  Raises NotHomogeneous when
    numerator or denominator mixes degrees."""
    if not is_principal(s):
        raise ValueError("the grading needs principal coefficients")
    n = s.n
    counts = adjacency_matrix(s.tracked.base)
    ydeg = [tuple(counts[j][i2] - counts[i2][j] for i2 in range(n))
            for j in range(n)]

    def degree(p: MultiPoly):
        found = None
        for e in p.terms:
            d = list(e[:n])
            for j in range(n):
                k = e[n + j]
                if k:
                    for m in range(n):
                        d[m] += k * ydeg[j][m]
            d = tuple(d)
            if found is None:
                found = d
            elif found != d:
                raise NotHomogeneous(f"degrees {found} and {d} both occur")
        if found is None:
            raise ValueError("zero polynomial has no degree")
        return found

    x = s.cluster[i]
    du, dv = degree(x.num), degree(x.den)
    return tuple(a - b for a, b in zip(du, dv))


def is_laurent(r: RationalFn) -> bool:
    """True when the normalized denominator is a single monic monomial."""
    return r.is_laurent()


@dataclass(frozen=True)
class LaurentEntry:
    """One mutated variable: where it was made and what it looks like."""

    path: tuple
    vertex: int
    laurent: bool
    nonnegative: bool


@dataclass(frozen=True)
class LaurentReport:
    """Findings of an exploration; failures are reported, never raised."""

    entries: tuple
    undecided: tuple

    def all_laurent(self) -> bool:
        return all(e.laurent for e in self.entries)

    def all_nonnegative(self) -> bool:
        return all(e.nonnegative for e in self.entries)

    def failures(self) -> tuple:
        return tuple(e for e in self.entries
                     if not (e.laurent and e.nonnegative))


def explore_laurent(s0: Seed, depth: int, paths=None, rng=None):
    """Mutate along every non-stuttering path up to `depth` (or `paths`
    random ones of that length) and record, for each new variable, whether
    it is a Laurent polynomial with nonnegative coefficients.

    Paths on which a deletion decision comes back unknown are recorded and
    abandoned rather than raised.
    """
    if s0.n > MAX_RANK:
        raise ValueError(f"exploration is capped at rank {MAX_RANK}")
    if depth > MAX_DEPTH:
        raise ValueError(f"exploration is capped at depth {MAX_DEPTH}")
    entries = []
    undecided = []

    def record(s: Seed, path, k: int):
        x = s.cluster[k]
        ok = x.is_laurent()
        entries.append(LaurentEntry(path, k, ok,
                                    ok and x.has_nonnegative_coefficients()))

    if paths is None:
        def walk(s: Seed, path):
            if len(path) == depth:
                return
            for k in range(s.n):
                if path and path[-1] == k:
                    continue
                ext = path + (k,)
                try:
                    nxt = seed_mutate(s, k)
                except DecisionUnknown:
                    undecided.append(ext)
                    continue
                record(nxt, ext, k)
                walk(nxt, ext)

        walk(s0, ())
    else:
        gen = random.Random(rng)
        for _ in range(paths):
            s = s0
            path = ()
            while len(path) < depth:
                k = gen.choice([v for v in range(s0.n)
                                if not path or path[-1] != v])
                path = path + (k,)
                try:
                    s = seed_mutate(s, k)
                except DecisionUnknown:
                    undecided.append(path)
                    break
                record(s, path, k)
    return LaurentReport(tuple(entries), tuple(undecided))

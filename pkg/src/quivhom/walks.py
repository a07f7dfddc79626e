"""Walks in the double quiver, free reduction, and homotopy-membership oracles.

A walk stores its steps in traversal order (step i ends where step i+1 starts).
`compose(w1, w2)` is composition right-to-left: w2 is traversed first.  Closed
walks written multiplicatively ("abc") therefore traverse c, then b, then a;
`word_walk` accepts that notation directly.

Membership in a normal subgroupoid H is three-valued.  Verdicts are sound by
construction: In always carries a replayable witness, NotIn an independently
checkable certificate, and only the search-based backend may answer Unknown.
"""
from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass

from .quiver import Quiver

IN = "in"
NOT_IN = "not_in"
UNKNOWN = "unknown"

DEFAULT_SEARCH_BOUND = 100_000


class NotComposable(ValueError):
    pass


class NotClosed(ValueError):
    pass


class DecisionUnknown(RuntimeError):
    """Raised when an operation cannot proceed without a decided membership."""


@dataclass(frozen=True)
class Step:
    arrow: int
    sign: int  # +1 forward, -1 formal inverse

    def inverse(self) -> "Step":
        return Step(self.arrow, -self.sign)


class Walk:
    """A walk in the double quiver; not necessarily reduced."""

    __slots__ = ("q", "base", "steps")

    def __init__(self, q: Quiver, base: int, steps=()):
        self.q = q
        self.base = base  # source vertex (meaningful for the empty walk)
        self.steps = tuple(steps)
        v = base
        for s in self.steps:
            a = q.arrow(s.arrow)
            u, w = (a.src, a.tgt) if s.sign > 0 else (a.tgt, a.src)
            if u != v:
                raise NotComposable(f"step {a.name()}^{s.sign} starts at {u}, expected {v}")
            v = w

    def source(self) -> int:
        return self.base

    def target(self) -> int:
        v = self.base
        for s in self.steps:
            a = self.q.arrow(s.arrow)
            v = a.tgt if s.sign > 0 else a.src
        return v

    def vertex_at(self, i: int) -> int:
        """Vertex reached after the first i steps."""
        v = self.base
        for s in self.steps[:i]:
            a = self.q.arrow(s.arrow)
            v = a.tgt if s.sign > 0 else a.src
        return v

    def is_closed(self) -> bool:
        return self.source() == self.target()

    def is_trivial(self) -> bool:
        return not reduce(self).steps

    def __len__(self):
        return len(self.steps)

    def __eq__(self, other):
        if not isinstance(other, Walk):
            return NotImplemented
        return (self.q is other.q and self.source() == other.source()
                and reduce(self).steps == reduce(other).steps)

    def __hash__(self):
        return hash((id(self.q), self.source(), reduce(self).steps))

    def __repr__(self):
        if not self.steps:
            return f"e_{self.base}"
        names = []
        for s in reversed(self.steps):  # print multiplicatively
            a = self.q.arrow(s.arrow)
            names.append(a.name() if s.sign > 0 else a.name() + "~")
        return " ".join(names)


def _reduced_steps(steps) -> tuple:
    out = []
    for s in steps:
        if out and out[-1].arrow == s.arrow and out[-1].sign == -s.sign:
            out.pop()
        else:
            out.append(s)
    return tuple(out)


def reduce(w: Walk) -> Walk:
    """Free reduction; idempotent and independent of cancellation order."""
    red = _reduced_steps(w.steps)
    return w if red == w.steps else Walk(w.q, w.base, red)


def compose(w1: Walk, w2: Walk) -> Walk:
    """w1 after w2 (w2 traversed first); result reduced."""
    if w1.q is not w2.q:
        raise NotComposable("walks over different quivers")
    if w1.source() != w2.target():
        raise NotComposable(f"cannot compose: {w1.source()} != {w2.target()}")
    return Walk(w1.q, w2.base, _reduced_steps(w2.steps + w1.steps))


def inverse(w: Walk) -> Walk:
    return Walk(w.q, w.target(), tuple(s.inverse() for s in reversed(w.steps)))


def trivial_walk(q: Quiver, v: int) -> Walk:
    return Walk(q, v, ())


def arrow_walk(q: Quiver, aid: int, sign: int = 1) -> Walk:
    a = q.arrow(aid)
    return Walk(q, a.src if sign > 0 else a.tgt, (Step(aid, sign),))


def word_walk(q: Quiver, word: str) -> Walk:
    """Build a walk from arrow labels in multiplicative order: "a b c" means
    a o b o c (c traversed first).  A trailing ~ marks a formal inverse."""
    steps = []
    for tok in reversed(word.split()):
        sign = 1
        if tok.endswith("~"):
            sign, tok = -1, tok[:-1]
        steps.append(Step(q.arrow_by_label(tok).id, sign))
    if not steps:
        raise ValueError("empty word")
    a = q.arrow(steps[0].arrow)
    return Walk(q, a.src if steps[0].sign > 0 else a.tgt, steps)


def walk_on(q: Quiver, w: Walk) -> Walk:
    """Reinterpret a walk over a quiver sharing the referenced arrow ids."""
    return Walk(q, w.base, w.steps)


def enumerate_closed_walks(q: Quiver, base: int, max_len: int):
    """All nonempty reduced closed walks at `base` with at most max_len steps."""
    out = []
    stack = [(base, ())]
    while stack:
        v, steps = stack.pop()
        if steps and v == base:
            out.append(Walk(q, base, steps))
        if len(steps) == max_len:
            continue
        last = steps[-1] if steps else None
        for a in sorted(q.arrows_out(v) + q.arrows_in(v), key=lambda a: a.id):
            for sign in (1, -1):
                if sign > 0 and a.src != v:
                    continue
                if sign < 0 and a.tgt != v:
                    continue
                if last and last.arrow == a.id and last.sign == -sign:
                    continue  # immediate cancellation
                w = a.tgt if sign > 0 else a.src
                stack.append((w, steps + (Step(a.id, sign),)))
    out.sort(key=lambda w: (len(w.steps), tuple((s.arrow, s.sign) for s in w.steps)))
    return out


# ---------------------------------------------------------------------------
# membership verdicts


@dataclass
class Membership:
    verdict: str
    witness: object = None  # In: replayable decomposition (backend-specific)
    certificate: str | None = None  # NotIn: reason tag


def _require_closed(w: Walk):
    if not w.is_closed():
        raise NotClosed(f"walk from {w.source()} to {w.target()} is not closed")


def abelianization(w: Walk, index: dict[int, int], size: int) -> tuple:
    v = [0] * size
    for s in w.steps:
        v[index[s.arrow]] += s.sign
    return tuple(v)


def _arrow_index(q: Quiver) -> dict[int, int]:
    return {a.id: i for i, a in enumerate(sorted(q.arrows, key=lambda a: a.id))}


class IntLattice:
    """Integer row-echelon form of a sublattice of Z^n, with transformation
    tracking so membership answers carry generator coefficients."""

    __slots__ = ("n", "ngens", "rows")

    def __init__(self, n: int, vectors):
        self.n = n
        self.ngens = 0
        self.rows = []  # (pivot, vec, coeffs) sorted by pivot; vec[pivot] > 0
        for v in vectors:
            self.add(v)

    def add(self, vec):
        coeffs = [0] * self.ngens + [1]
        self.ngens += 1
        for row in self.rows:
            row[2].append(0)
        v = list(vec)
        i = 0
        while True:
            p = next((j for j, x in enumerate(v) if x), None)
            if p is None:
                return
            while i < len(self.rows) and self.rows[i][0] < p:
                i += 1
            if i == len(self.rows) or self.rows[i][0] > p:
                if v[p] < 0:
                    v = [-x for x in v]
                    coeffs = [-c for c in coeffs]
                self.rows.insert(i, [p, v, coeffs])
                return
            piv, rvec, rcf = self.rows[i]
            if v[p] % rvec[p] == 0:
                m = v[p] // rvec[p]
                v = [a - m * b for a, b in zip(v, rvec)]
                coeffs = [a - m * b for a, b in zip(coeffs, rcf)]
            else:
                g, x, y = _xgcd(rvec[p], v[p])
                new_vec = [x * a + y * b for a, b in zip(rvec, v)]
                new_cf = [x * a + y * b for a, b in zip(rcf, coeffs)]
                m_r, m_v = rvec[p] // g, v[p] // g
                v2 = [m_r * b - m_v * a for a, b in zip(rvec, v)]
                cf2 = [m_r * b - m_v * a for a, b in zip(rcf, coeffs)]
                self.rows[i] = [p, new_vec, new_cf]
                v, coeffs = v2, cf2

    def solve(self, vec):
        """Return generator coefficients expressing vec, or None."""
        v = list(vec)
        out = [0] * self.ngens
        for p, rvec, rcf in self.rows:
            if v[p] == 0:
                continue
            if v[p] % rvec[p] != 0:
                return None
            m = v[p] // rvec[p]
            v = [a - m * b for a, b in zip(v, rvec)]
            out = [a + m * b for a, b in zip(out, rcf)]
        if any(v):
            return None
        return out

    def __contains__(self, vec):
        return self.solve(vec) is not None


def _xgcd(a: int, b: int):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


# ---------------------------------------------------------------------------
# oracle backends


class TrivialOracle:
    """H is the trivial subgroupoid: only freely-trivial walks belong."""

    def __init__(self, q: Quiver):
        self.q = q

    def membership(self, w: Walk) -> Membership:
        _require_closed(w)
        r = reduce(w)
        if not r.steps:
            return Membership(IN, witness=())
        return Membership(NOT_IN, witness=r, certificate="nonempty_reduced_word")


class FullOracle:
    """H is all of the fundamental groupoid."""

    def __init__(self, q: Quiver):
        self.q = q

    def membership(self, w: Walk) -> Membership:
        _require_closed(w)
        return Membership(IN, witness=())


class AbelianQuotientOracle:
    """H is the full preimage of the relator lattice under abelianization.

    The quotient groupoid is abelian by construction, so both In and NotIn are
    complete.  Use only when the intended H is known to contain every
    commutator (e.g. kernels of maps onto abelian groups).
    """

    def __init__(self, q: Quiver, generators):
        self.q = q
        self.generators = tuple(reduce(g) for g in generators)
        for g in self.generators:
            _require_closed(g)
        self.index = _arrow_index(q)
        self.size = len(q.arrows)
        self.lattice = IntLattice(
            self.size, [abelianization(g, self.index, self.size) for g in self.generators])

    def membership(self, w: Walk) -> Membership:
        _require_closed(w)
        v = abelianization(w, self.index, self.size)
        coeffs = self.lattice.solve(v)
        if coeffs is None:
            return Membership(NOT_IN, witness=v, certificate="abelian_obstruction")
        return Membership(IN, witness=tuple(coeffs))


class GeneratedOracle:
    """H = normal closure of the given closed walks.

    In: found by iterative-deepening insertion of conjugated generators
    (witness = insertion script from reduce(w) to the empty walk).
    NotIn: only via the abelianization obstruction.  Otherwise Unknown.
    """

    def __init__(self, q: Quiver, generators, search_bound: int | None = None):
        self.q = q
        self.generators = tuple(g for g in (reduce(g) for g in generators) if g.steps)
        for g in self.generators:
            _require_closed(g)
        if search_bound is None:
            search_bound = int(os.environ.get("HQ_SEARCH_BOUND", DEFAULT_SEARCH_BOUND))
        self.search_bound = search_bound
        self.index = _arrow_index(q)
        self.size = len(q.arrows)
        self.lattice = IntLattice(
            self.size, [abelianization(g, self.index, self.size) for g in self.generators])

    def membership(self, w: Walk) -> Membership:
        _require_closed(w)
        r = reduce(w)
        if not r.steps:
            return Membership(IN, witness=())
        if not self.generators:
            return Membership(NOT_IN, witness=abelianization(r, self.index, self.size),
                              certificate="abelian_obstruction")
        if abelianization(r, self.index, self.size) not in self.lattice:
            return Membership(NOT_IN, witness=abelianization(r, self.index, self.size),
                              certificate="abelian_obstruction")
        script = self._search(r)
        if script is not None:
            return Membership(IN, witness=tuple(script))
        return Membership(UNKNOWN)

    def _search(self, r: Walk):
        base = r.source()
        start = tuple(r.steps)
        gen_data = []
        for gi, g in enumerate(self.generators):
            gen_data.append((gi, 1, g.source(), g.steps))
            inv = inverse(g)
            gen_data.append((gi, -1, inv.source(), inv.steps))
        maxg = max(len(g.steps) for g in self.generators)
        bound = len(start) + maxg
        expansions = 0
        while expansions < self.search_bound:
            seen = {start: None}  # state -> (parent, move)
            queue = deque([start])
            while queue and expansions < self.search_bound:
                state = queue.popleft()
                expansions += 1
                verts = [base]
                v = base
                for s in state:
                    a = self.q.arrow(s.arrow)
                    v = a.tgt if s.sign > 0 else a.src
                    verts.append(v)
                for pos in range(len(state) + 1):
                    for gi, sign, gsrc, gsteps in gen_data:
                        if verts[pos] != gsrc:
                            continue
                        child = _reduced_steps(state[:pos] + gsteps + state[pos:])
                        if len(child) > bound or child in seen:
                            continue
                        seen[child] = (state, (pos, gi, sign))
                        if not child:
                            return self._unwind(seen, child)
                        queue.append(child)
            bound += maxg
        return None

    @staticmethod
    def _unwind(seen, state):
        script = []
        while seen[state] is not None:
            state, move = seen[state]
            script.append(move)
        script.reverse()
        return script

    def replay(self, w: Walk, script) -> bool:
        """Check an In-witness: applying the insertion script to reduce(w)
        must end at the empty walk."""
        state = tuple(reduce(w).steps)
        base = reduce(w).source()
        for pos, gi, sign in script:
            g = self.generators[gi] if sign > 0 else inverse(self.generators[gi])
            if Walk(self.q, base, state).vertex_at(pos) != g.source():
                return False
            state = _reduced_steps(state[:pos] + g.steps + state[pos:])
        return not state


def membership(oracle, w: Walk) -> Membership:
    _require_closed(w)
    return oracle.membership(w)


# ---------------------------------------------------------------------------
# spanning trees, free generators, and presentations


def spanning_tree(q: Quiver) -> set[int]:
    """Arrow ids of a BFS spanning forest (root = lowest vertex per component,
    lowest arrow id first)."""
    return _tree_data(q)[0]


def _tree_data(q: Quiver):
    tree: set[int] = set()
    parent: dict[int, tuple] = {}  # vertex -> (parent vertex, Step into vertex)
    root: dict[int, int] = {}
    visited = [False] * q.n
    for r in range(q.n):
        if visited[r]:
            continue
        visited[r] = True
        root[r] = r
        queue = deque([r])
        while queue:
            v = queue.popleft()
            for a in sorted(q.arrows_out(v) + q.arrows_in(v), key=lambda a: a.id):
                for sign in (1, -1):
                    if sign > 0 and a.src != v:
                        continue
                    if sign < 0 and a.tgt != v:
                        continue
                    w = a.tgt if sign > 0 else a.src
                    if visited[w]:
                        continue
                    visited[w] = True
                    tree.add(a.id)
                    parent[w] = (v, Step(a.id, sign))
                    root[w] = root[v]
                    queue.append(w)
    return tree, parent, root


def _path_from_root(q: Quiver, parent, v: int) -> Walk:
    steps = []
    while v in parent:
        u, st = parent[v]
        steps.append(st)
        v = u
    steps.reverse()
    return Walk(q, v, steps)


def free_generators(q: Quiver):
    """Chord loops: for each non-tree arrow a, the loop (root -> s(a)) a (t(a) -> root).
    Returns list of (arrow, loop Walk based at the component root)."""
    tree, parent, root = _tree_data(q)
    out = []
    for a in sorted(q.arrows, key=lambda a: a.id):
        if a.id in tree:
            continue
        to_src = _path_from_root(q, parent, a.src)
        to_tgt = _path_from_root(q, parent, a.tgt)
        loop = compose(inverse(to_tgt), compose(arrow_walk(q, a.id), to_src))
        out.append((a, loop))
    return out


def fundamental_group_rank(q: Quiver) -> int:
    """|arrows| - |vertices| + number of connected components."""
    tree, parent, root = _tree_data(q)
    ncomp = q.n - len(parent)
    return len(q.arrows) - q.n + ncomp


def exponent_two_quotient_check(oracle, q: Quiver):
    """True iff every squared free generator and every commutator of free
    generators lies in H (the quotient group then has exponent <= 2, which
    forces pi(Q)^2 inside H).  Returns True/False, or None when undecided."""
    gens = free_generators(q)
    unknown = False
    for i, (_, g) in enumerate(gens):
        m = oracle.membership(compose(g, g))
        if m.verdict == NOT_IN:
            return False
        if m.verdict == UNKNOWN:
            unknown = True
        for j in range(i + 1, len(gens)):
            h = gens[j][1]
            if g.source() != h.source():
                continue  # different components never interact
            comm = compose(compose(g, h), compose(inverse(g), inverse(h)))
            m = oracle.membership(comm)
            if m.verdict == NOT_IN:
                return False
            if m.verdict == UNKNOWN:
                unknown = True
    return None if unknown else True


@dataclass
class CellComplex2:
    """A 2-complex: the quiver's 1-skeleton plus one polygon per boundary word."""

    q: Quiver
    faces: tuple[Walk, ...]

    def euler_characteristic(self) -> int:
        return self.q.n - len(self.q.arrows) + len(self.faces)


def build_complex(q: Quiver, walks) -> CellComplex2:
    ws = tuple(reduce(w) for w in walks)
    for w in ws:
        _require_closed(w)
    return CellComplex2(q, ws)


def _word_reduce(word):
    out = []
    for g, s in word:
        if out and out[-1][0] == g and out[-1][1] == -s:
            out.pop()
        else:
            out.append((g, s))
    return tuple(out)


def _word_inverse(word):
    return tuple((g, -s) for g, s in reversed(word))


def _cyclic_reduce(word):
    w = list(_word_reduce(word))
    while len(w) >= 2 and w[0][0] == w[-1][0] and w[0][1] == -w[-1][1]:
        w = w[1:-1]
    return tuple(w)


def walk_to_chord_word(q: Quiver, w: Walk, tree: set[int]):
    """Image of a walk under collapsing the spanning tree: the sequence of
    chord crossings (well-defined up to conjugation for closed walks)."""
    word = [(s.arrow, s.sign) for s in reduce(w).steps if s.arrow not in tree]
    return _word_reduce(word)


def eliminate_arrow(relators, aid: int):
    """Tietze-eliminate arrow `aid` from a set of closed relator walks.

    Uses the first relator (in list order) whose reduced form crosses the arrow
    exactly once: rotating that relator isolates the crossing and solves the
    arrow as a path over the remaining arrows, which is substituted everywhere
    else.  Returns (remaining relators, replacement walk for the forward arrow).
    The normal closure is unchanged; raises ValueError when no relator crosses
    the arrow exactly once.
    """
    use = None
    for idx, w in enumerate(relators):
        r = reduce(w)
        occ = [i for i, s in enumerate(r.steps) if s.arrow == aid]
        if len(occ) == 1:
            use = (idx, r, occ[0])
            break
    if use is None:
        raise ValueError(f"no relator crosses arrow {aid} exactly once")
    idx, r, i = use
    q = r.q
    d = r.steps[i]
    rest = r.steps[i + 1:] + r.steps[:i]
    a = q.arrow(aid)
    start = a.tgt if d.sign > 0 else a.src
    rest_walk = Walk(q, start, rest)
    path = inverse(rest_walk) if d.sign > 0 else rest_walk
    out = []
    for j, w in enumerate(relators):
        if j == idx:
            continue
        steps = []
        for s in reduce(w).steps:
            if s.arrow == aid:
                steps.extend(path.steps if s.sign > 0 else inverse(path).steps)
            else:
                steps.append(s)
        out.append(Walk(q, reduce(w).base, _reduced_steps(tuple(steps))))
    return out, path


class Presentation:
    """Group presentation with Tietze simplification for eliminable generators."""

    __slots__ = ("generators", "relators", "substitution")

    def __init__(self, generators, relators):
        self.generators = list(generators)
        self.relators = [_cyclic_reduce(r) for r in relators]
        self.substitution: dict = {}
        self._simplify()

    def _simplify(self):
        changed = True
        while changed:
            changed = False
            self.relators = [r for r in (_cyclic_reduce(r) for r in self.relators) if r]
            for ri, r in enumerate(self.relators):
                for gen in self.generators:
                    occ = [i for i, (g, _) in enumerate(r) if g == gen]
                    if len(occ) != 1:
                        continue
                    i = occ[0]
                    sign = r[i][1]
                    before, after = r[:i], r[i + 1:]
                    expr = _word_reduce(_word_inverse(before) + _word_inverse(after))
                    if sign < 0:
                        expr = _word_inverse(expr)
                    self.substitution[gen] = expr
                    self.generators.remove(gen)
                    del self.relators[ri]
                    self.relators = [self._apply_sub(x, gen, expr) for x in self.relators]
                    for k in list(self.substitution):
                        if k != gen:
                            self.substitution[k] = self._apply_sub(
                                self.substitution[k], gen, expr)
                    changed = True
                    break
                if changed:
                    break

    @staticmethod
    def _apply_sub(word, gen, expr):
        out = []
        for g, s in word:
            if g == gen:
                out.extend(expr if s > 0 else _word_inverse(expr))
            else:
                out.append((g, s))
        return _word_reduce(tuple(out))

    def rewrite(self, word):
        """Rewrite a chord word over the surviving generators."""
        w = _word_reduce(word)
        changed = True
        while changed:
            changed = False
            out = []
            for g, s in w:
                if g in self.substitution:
                    out.extend(self.substitution[g] if s > 0 else
                               _word_inverse(self.substitution[g]))
                    changed = True
                else:
                    out.append((g, s))
            w = _word_reduce(tuple(out))
        return w

    def is_free(self) -> bool:
        return not self.relators

    def rank_if_free(self):
        return len(self.generators) if self.is_free() else None


def component_presentation(q: Quiver, relator_walks, base: int) -> Presentation:
    """Presentation of pi_1 of the 2-complex (q, relator_walks) at the component
    of `base`: tree collapse, then Tietze simplification."""
    tree, parent, root = _tree_data(q)
    comp_root = root[base]
    gens = [a.id for a, _ in free_generators(q)
            if root[a.src] == comp_root]
    rels = []
    for w in relator_walks:
        if root[w.source()] == comp_root:
            rels.append(walk_to_chord_word(q, w, tree))
    return Presentation(gens, rels)

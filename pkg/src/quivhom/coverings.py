"""Quiver coverings, deck groups, and orbit mutation.

A covering restricts to a bijection on the in-arrows and on the out-arrows of
every total vertex.  Orbit (pre-)mutation premutates a whole fibre at once;
the new 2-cycles are then deleted equivariantly under the deck group, so the
deletion descends to the quotient.  The quotient is built alongside with arrow
ids aligned to the plain premutation of the base (loop composites, which
witness lost admissibility, are numbered last), so results compare directly
against homotopy mutation.
"""
from __future__ import annotations

from collections import defaultdict
from itertools import product

from .quiver import (Arrow, Quiver, LoopPresent, adjacency_matrix,
                     is_loop_free, is_two_acyclic)
from .walks import (IN, NOT_IN, Membership, Step, Walk, _require_closed,
                    arrow_walk, compose)
from .mutation import TrackedQuiver, mutate

DECK_ARROW_CAP = 10_000


class NotWeaklyAdmissible(ValueError):
    """Total quiver not 2-acyclic, or base quiver not loop-free."""


class NonTransitive(ValueError):
    """The permutations do not act transitively on the fibre set."""


class Covering:
    """A covering projection from `total` onto `base`.

    `vertex_map` is indexed by total vertex; `arrow_map` maps total arrow ids
    to base arrow ids.  Instances are immutable; orbit mutations build new
    coverings.
    """

    __slots__ = ("total", "base", "vertex_map", "arrow_map")

    def __init__(self, total: Quiver, base: Quiver, vertex_map, arrow_map):
        self.total = total
        self.base = base
        self.vertex_map = tuple(vertex_map)
        self.arrow_map = dict(arrow_map)

    def fiber(self, v: int) -> tuple[int, ...]:
        return tuple(u for u in range(self.total.n) if self.vertex_map[u] == v)

    def __repr__(self):
        return (f"Covering({self.total.n}->{self.base.n} vertices, "
                f"{len(self.total.arrows)}->{len(self.base.arrows)} arrows)")


def identity_covering(q: Quiver) -> Covering:
    return Covering(q, q, range(q.n), {a.id: a.id for a in q.arrows})


def covering_violation(c: Covering) -> str | None:
    """First violated covering condition, or None for a valid covering."""
    if len(c.vertex_map) != c.total.n:
        return "vertex_map must assign every total vertex"
    if any(not 0 <= v < c.base.n for v in c.vertex_map):
        return "vertex_map image outside the base"
    if set(c.arrow_map) != {a.id for a in c.total.arrows}:
        return "arrow_map keys must be exactly the total arrow ids"
    if any(not c.base.has_arrow(b) for b in c.arrow_map.values()):
        return "arrow_map image outside the base"
    for a in c.total.arrows:
        b = c.base.arrow(c.arrow_map[a.id])
        if (c.vertex_map[a.src], c.vertex_map[a.tgt]) != (b.src, b.tgt):
            return f"arrow {a.name()} does not commute with s,t"
    if set(c.vertex_map) != set(range(c.base.n)):
        return "vertex_map is not surjective"
    for v in range(c.total.n):
        w = c.vertex_map[v]
        if sorted(c.arrow_map[a.id] for a in c.total.arrows_out(v)) != \
                sorted(a.id for a in c.base.arrows_out(w)):
            return f"out-arrows at {v} do not biject onto out-arrows at {w}"
        if sorted(c.arrow_map[a.id] for a in c.total.arrows_in(v)) != \
                sorted(a.id for a in c.base.arrows_in(w)):
            return f"in-arrows at {v} do not biject onto in-arrows at {w}"
    return None


def validate_covering(c: Covering) -> bool:
    return covering_violation(c) is None


def _require_valid(c: Covering):
    reason = covering_violation(c)
    if reason is not None:
        raise ValueError(f"not a covering: {reason}")


class DeckTransform:
    """Automorphism of the total quiver commuting with the projection."""

    __slots__ = ("vperm", "aperm")

    def __init__(self, vperm, aperm):
        self.vperm = tuple(vperm)
        self.aperm = dict(aperm)

    def vertex(self, v: int) -> int:
        return self.vperm[v]

    def arrow(self, aid: int) -> int:
        return self.aperm[aid]

    def is_identity(self) -> bool:
        return all(self.vperm[v] == v for v in range(len(self.vperm)))

    def __eq__(self, other):
        if not isinstance(other, DeckTransform):
            return NotImplemented
        return self.vperm == other.vperm and self.aperm == other.aperm

    def __hash__(self):
        return hash(self.vperm)

    def __repr__(self):
        return f"DeckTransform({self.vperm})"


class DeckGroup:
    __slots__ = ("elements",)

    def __init__(self, elements):
        self.elements = tuple(elements)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __repr__(self):
        return f"DeckGroup({len(self.elements)} elements)"


def _lift_maps(c: Covering):
    """(base arrow id, total vertex) -> total arrow, keyed at source/target."""
    out_by, in_by = {}, {}
    for a in c.total.arrows:
        out_by[(c.arrow_map[a.id], a.src)] = a
        in_by[(c.arrow_map[a.id], a.tgt)] = a
    return out_by, in_by


def _components(q: Quiver):
    seen = [False] * q.n
    comps = []
    for r in range(q.n):
        if seen[r]:
            continue
        comp = [r]
        seen[r] = True
        stack = [r]
        while stack:
            v = stack.pop()
            for a in q.arrows_out(v) + q.arrows_in(v):
                for u in (a.src, a.tgt):
                    if not seen[u]:
                        seen[u] = True
                        comp.append(u)
                        stack.append(u)
        comps.append(comp)
    return comps


def deck_transformations(c: Covering) -> DeckGroup:
    """All deck transformations, by propagating a root image per component."""
    _require_valid(c)
    if len(c.total.arrows) > DECK_ARROW_CAP:
        raise ValueError(f"deck search capped at {DECK_ARROW_CAP} arrows; "
                         "supply the action explicitly")
    out_by, in_by = _lift_maps(c)
    roots = [min(comp) for comp in _components(c.total)]
    candidates = [c.fiber(c.vertex_map[r]) for r in roots]
    elements = []
    for images in product(*candidates):
        tau = _propagate(c, out_by, in_by, roots, images)
        if tau is not None:
            elements.append(tau)
    return DeckGroup(elements)


def _propagate(c, out_by, in_by, roots, images):
    vperm = [None] * c.total.n
    stack = []
    for r, img in zip(roots, images):
        vperm[r] = img
        stack.append(r)
    aperm = {}
    while stack:
        v = stack.pop()
        w = vperm[v]
        for a in c.total.arrows_out(v):
            b = out_by[(c.arrow_map[a.id], w)]
            if aperm.setdefault(a.id, b.id) != b.id:
                return None
            if vperm[a.tgt] is None:
                vperm[a.tgt] = b.tgt
                stack.append(a.tgt)
            elif vperm[a.tgt] != b.tgt:
                return None
        for a in c.total.arrows_in(v):
            b = in_by[(c.arrow_map[a.id], w)]
            if aperm.setdefault(a.id, b.id) != b.id:
                return None
            if vperm[a.src] is None:
                vperm[a.src] = b.src
                stack.append(a.src)
            elif vperm[a.src] != b.src:
                return None
    if sorted(vperm) != list(range(c.total.n)):
        return None
    if sorted(aperm.values()) != sorted(aperm):
        return None
    return DeckTransform(vperm, aperm)


def is_regular(c: Covering, deck: DeckGroup | None = None) -> bool:
    """Deck group transitive on every fibre."""
    if deck is None:
        deck = deck_transformations(c)
    for v in range(c.base.n):
        fib = c.fiber(v)
        if {tau.vertex(fib[0]) for tau in deck} != set(fib):
            return False
    return True


def is_weakly_admissible(c: Covering) -> bool:
    """Total quiver 2-acyclic and base quiver loop-free."""
    return is_two_acyclic(c.total) and is_loop_free(c.base)


def is_admissible(c: Covering) -> bool:
    """Total and base quivers both 2-acyclic."""
    return is_two_acyclic(c.total) and is_two_acyclic(c.base)


def _premutate_fiber(q: Quiver, fiber: set, keep_loops: bool):
    """Premutation at a whole vertex set: reverse every arrow incident to the
    set, then add one composite per in/out pair through the same set vertex.

    Loop composites (possible only with keep_loops) are numbered after the
    proper ones so that ids line up with the single-vertex premutation.
    """
    if any(a.src in fiber and a.tgt in fiber for a in q.arrows):
        raise LoopPresent(f"arrows inside the premutated set {sorted(fiber)}")
    arrows: list[Arrow] = []
    origins: dict[int, tuple] = {}
    nid = q.next_id()
    for a in sorted(q.arrows, key=lambda a: a.id):
        if a.src in fiber or a.tgt in fiber:
            arrows.append(Arrow(nid, a.tgt, a.src, f"{a.name()}*"))
            origins[nid] = ("rev", a)
            nid += 1
        else:
            arrows.append(a)
            origins[a.id] = ("keep", a)
    outs = sorted((a for a in q.arrows if a.src in fiber), key=lambda a: a.id)
    ins = sorted((a for a in q.arrows if a.tgt in fiber), key=lambda a: a.id)
    comps = [(b, c) for b in outs for c in ins
             if c.tgt == b.src and c.src != b.tgt]
    if keep_loops:
        comps += [(b, c) for b in outs for c in ins
                  if c.tgt == b.src and c.src == b.tgt]
    for b, c in comps:
        arrows.append(Arrow(nid, c.src, b.tgt, f"[{b.name()}{c.name()}]"))
        origins[nid] = ("comp", b, c)
        nid += 1
    return Quiver(q.n, arrows), origins


def _origin_key(rec) -> tuple:
    if rec[0] == "comp":
        return ("comp", rec[1].id, rec[2].id)
    return (rec[0], rec[1].id)


def _orbit_premutate_data(c: Covering, k: int):
    _require_valid(c)
    if not is_weakly_admissible(c):
        raise NotWeaklyAdmissible("total must be 2-acyclic and base loop-free")
    if not 0 <= k < c.base.n:
        raise ValueError(f"vertex {k} outside 0..{c.base.n - 1}")
    deck = deck_transformations(c)
    if not is_regular(c, deck):
        raise ValueError("orbit mutation needs a regular covering")
    total2, torig = _premutate_fiber(c.total, set(c.fiber(k)), keep_loops=True)
    base2, borig = _premutate_fiber(c.base, {k}, keep_loops=True)

    base_by_key = {_origin_key(rec): bid for bid, rec in borig.items()}
    total_by_key = {_origin_key(rec): tid for tid, rec in torig.items()}
    amap2 = {}
    for tid, rec in torig.items():
        if rec[0] == "comp":
            amap2[tid] = base_by_key[("comp", c.arrow_map[rec[1].id],
                                      c.arrow_map[rec[2].id])]
        else:
            amap2[tid] = base_by_key[(rec[0], c.arrow_map[rec[1].id])]

    elements = []
    for tau in deck:  # deck extends: kept/reversed/composite arrows map alike
        aperm = {}
        for tid, rec in torig.items():
            if rec[0] == "comp":
                img = total_by_key[("comp", tau.arrow(rec[1].id),
                                    tau.arrow(rec[2].id))]
            else:
                img = total_by_key[(rec[0], tau.arrow(rec[1].id))]
            aperm[tid] = img
        elements.append(DeckTransform(tau.vperm, aperm))
    cov2 = Covering(total2, base2, c.vertex_map, amap2)
    return cov2, DeckGroup(elements)


def orbit_premutate(c: Covering, k: int) -> Covering:
    """Premutate every vertex of the fibre over k.  The base becomes the
    quotient and keeps loop composites: they witness lost admissibility."""
    return _orbit_premutate_data(c, k)[0]


def orbit_mutate(c: Covering, k: int) -> Covering:
    """Orbit premutation followed by deck-equivariant maximal 2-cycle deletion.

    Vertex pairs swapped by a deck element lose every arrow in between (the
    swap pairs them off); pairs with a free orbit get the lowest-id maximal
    deletion at the lexicographically least pair, copied around the orbit.
    """
    cov2, deck = _orbit_premutate_data(c, k)
    fwd = defaultdict(list)
    for a in sorted(cov2.total.arrows, key=lambda a: a.id):
        if a.src != a.tgt:
            fwd[(a.src, a.tgt)].append(a)
    cyclic = {frozenset(p) for p in fwd if (p[1], p[0]) in fwd}
    deleted: set[int] = set()
    processed: set[frozenset] = set()
    for pair in sorted(cyclic, key=sorted):
        if pair in processed:
            continue
        i, j = sorted(pair)
        orbit = {frozenset((tau.vertex(i), tau.vertex(j))) for tau in deck}
        processed |= orbit
        swap = any(tau.vertex(i) == j and tau.vertex(j) == i for tau in deck)
        if swap:
            chosen = [a.id for a in fwd[(i, j)]] + [a.id for a in fwd[(j, i)]]
        else:
            x, y = sorted(min(orbit, key=sorted))
            f = [a.id for a in fwd.get((x, y), [])]
            b = [a.id for a in fwd.get((y, x), [])]
            m = min(len(f), len(b))
            chosen = f[:m] + b[:m]
        for tau in deck:
            deleted.update(tau.arrow(aid) for aid in chosen)
    survivors = [a for a in cov2.total.arrows if a.id not in deleted]
    keep_base = {cov2.arrow_map[a.id] for a in survivors}
    total3 = Quiver(cov2.total.n, survivors)
    base3 = Quiver(cov2.base.n,
                   [a for a in cov2.base.arrows if a.id in keep_base])
    amap3 = {a.id: cov2.arrow_map[a.id] for a in survivors}
    return Covering(total3, base3, c.vertex_map, amap3)


def is_k_mutable(c: Covering, k: int) -> bool:
    """Does the covering stay weakly admissible after orbit mutation at k?"""
    return is_weakly_admissible(orbit_mutate(c, k))


def sufficient_k_mutable(c: Covering, k: int) -> bool:
    """Closure test for lifts of squared 2-cycles through k: sufficient for
    k-mutability, but not necessary."""
    out_by, _ = _lift_maps(c)
    for beta in c.base.arrows_out(k):
        j = beta.tgt
        for alpha in c.base.arrows_in(k):
            if alpha.src != j:
                continue
            for start in c.fiber(j):
                v = start
                for aid in (alpha.id, beta.id, alpha.id, beta.id):
                    v = out_by[(aid, v)].tgt
                if v != start:
                    return False
    return True


def check_global_bounded(c: Covering, depth: int):
    """(True, None) if weak admissibility survives every orbit-mutation
    sequence of length <= depth, else (False, offending sequence)."""
    frontier = [(c, ())]
    for _ in range(depth):
        nxt = []
        for cov, path in frontier:
            for k in range(cov.base.n):
                m = orbit_mutate(cov, k)
                seq = path + (k,)
                if not is_weakly_admissible(m):
                    return False, seq
                nxt.append((m, seq))
        frontier = nxt
    return True, None


def build_regular_cover(q: Quiver, hom) -> Covering:
    """Total quiver on (base vertex, fibre element) pairs: each arrow listed in
    `hom` (arrow id -> permutation of the fibre set) twists its lifts by that
    permutation; every other arrow lifts straight.

    Leaving a spanning tree untwisted realizes the quotient of the fundamental
    group that sends each chord loop to its permutation; the permutations must
    act transitively or the total would fall apart.
    """
    m = 1
    for perm in hom.values():
        m = len(perm)
        break
    perms = {}
    for aid, perm in hom.items():
        if not q.has_arrow(aid):
            raise ValueError(f"no arrow with id {aid}")
        perm = tuple(perm)
        if sorted(perm) != list(range(m)):
            raise ValueError(f"not a permutation of 0..{m - 1}: {perm}")
        perms[aid] = perm
    reached = {0}
    stack = [0]
    while stack:
        g = stack.pop()
        for perm in perms.values():
            for h in (perm[g], perm.index(g)):
                if h not in reached:
                    reached.add(h)
                    stack.append(h)
    if reached != set(range(m)):
        raise NonTransitive(f"fibre orbit of 0 is only {sorted(reached)}")
    arrows = []
    amap = {}
    for a in sorted(q.arrows, key=lambda a: a.id):
        perm = perms.get(a.id, tuple(range(m)))
        for g in range(m):
            lab = a.name() if m == 1 else f"{a.name()}{g}"
            lift = Arrow(a.id * m + g, a.src * m + g, a.tgt * m + perm[g], lab)
            arrows.append(lift)
            amap[lift.id] = a.id
    total = Quiver(q.n * m, arrows)
    vmap = [v for v in range(q.n) for _ in range(m)]
    return Covering(total, q, vmap, amap)


class CoveringOracle:
    """H = closed base walks whose lift to the covering closes.

    Lifts start at the lowest vertex of the source fibre; for a regular
    covering the verdict does not depend on that choice.  Complete, so never
    Unknown.  In-witness: the lifted walk.  NotIn-certificate: non_closed_lift
    (the witness is the open lift)."""

    def __init__(self, c: Covering):
        _require_valid(c)
        self.covering = c
        self.q = c.base
        self._out, self._in = _lift_maps(c)

    def lift(self, w: Walk, start: int) -> Walk:
        steps = []
        v = start
        for s in w.steps:
            if s.sign > 0:
                a = self._out[(s.arrow, v)]
                v = a.tgt
            else:
                a = self._in[(s.arrow, v)]
                v = a.src
            steps.append(Step(a.id, s.sign))
        return Walk(self.covering.total, start, steps)

    def membership(self, w: Walk) -> Membership:
        _require_closed(w)
        start = min(self.covering.fiber(w.source()))
        lifted = self.lift(w, start)
        if lifted.target() == start:
            return Membership(IN, witness=lifted)
        return Membership(NOT_IN, witness=lifted, certificate="non_closed_lift")


def check_orbit_compatibility(c: Covering, k: int, t: TrackedQuiver) -> bool:
    """Orbit mutation against homotopy mutation with the covering's oracle.

    True iff the quotient of orbit_mutate(c, k) equals mutate(t, k).current
    vertexwise, and both sides give the same verdict multiset on every 2-cycle
    slot of the result.  Slots are compared by verdict multiset because the two
    deletions may legitimately pick different representatives."""
    if sorted((a.id, a.src, a.tgt) for a in t.base.arrows) != \
            sorted((a.id, a.src, a.tgt) for a in c.base.arrows):
        raise ValueError("tracked quiver and covering must share the base")
    mt = mutate(t, k)
    cm = orbit_mutate(c, k)
    if cm.base.n != mt.current.n:
        return False
    if adjacency_matrix(cm.base) != adjacency_matrix(mt.current):
        return False
    oracle2 = CoveringOracle(cm)
    for i in range(mt.current.n):
        for j in range(mt.current.n):
            if i == j:
                continue
            fwd_t = [a for a in mt.current.arrows_out(i) if a.tgt == j]
            bwd_t = [a for a in mt.current.arrows_out(j) if a.tgt == i]
            if not fwd_t or not bwd_t:
                continue
            got_t = sorted(
                mt.verdict(compose(arrow_walk(mt.current, d.id),
                                   arrow_walk(mt.current, g.id))).verdict
                for g in fwd_t for d in bwd_t)
            fwd_c = [a for a in cm.base.arrows_out(i) if a.tgt == j]
            bwd_c = [a for a in cm.base.arrows_out(j) if a.tgt == i]
            got_c = sorted(
                oracle2.membership(compose(arrow_walk(cm.base, d.id),
                                           arrow_walk(cm.base, g.id))).verdict
                for g in fwd_c for d in bwd_c)
            if got_t != got_c:
                return False
    return True

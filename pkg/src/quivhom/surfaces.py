"""Triangulated colored surfaces and their quivers with homotopy.

Punctures carry one of two colors, "I" or "II", which control how folded
(self-folded) triangles interact with quiver mutation.  A triangulation is
stored at half-edge granularity: every triangle lists three directed sides
in cyclic order, a side being (label, end) where `end` selects the traversal
direction of the arc or boundary segment.  A single ends table records which
marked point each end of each label sits at, so loops, folded triangles, and
puncture rotations are all unambiguous.

The quiver of a triangulation has one vertex per arc and one arrow per
triangle corner between two arcs.  Corners next to the loop of a folded
triangle around an "I"-puncture are duplicated onto the enclosed radius;
folded triangles around "II"-punctures contribute a 2-cycle between loop and
radius instead.  Valency-2 "I"-punctures then drop their two corner arrows.
The generating walks retained alongside the quiver (triangle cycles plus
puncture circles) present the homotopy that makes arc flips commute with
mutation; `verify_flip_mutation` checks that commutation on the nose.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field

from .quiver import Arrow, Quiver, quiver_equal_fixed_vertices
from .walks import (IN, NOT_IN, UNKNOWN, CellComplex2, DecisionUnknown, Membership,
                    NotClosed, Presentation, Step, Walk, AbelianQuotientOracle,
                    build_complex, component_presentation, eliminate_arrow, reduce,
                    spanning_tree, walk_on, walk_to_chord_word)
from .mutation import init_tracked, mutate

PLAIN = "plain"
NOTCHED = "notched"
COLOR_I = "I"
COLOR_II = "II"

_ALPHABET = "abcdefghijklmnopqrstuvwxyz"


class UnsupportedSurface(ValueError):
    """The surface admits no triangulation under the supported catalogue."""


class InvalidGluing(ValueError):
    """Triangle sides do not assemble into a surface triangulation."""


class UnknownConfiguration(RuntimeError):
    """A flip hit a configuration the case analysis does not normalize."""


def _arrow_label(i: int) -> str:
    return _ALPHABET[i] if i < 26 else f"{_ALPHABET[i % 26]}{i // 26}"


def _is_arc(label) -> bool:
    return isinstance(label, int)


# ---------------------------------------------------------------------------
# surfaces


@dataclass(frozen=True)
class ColoredSurface:
    """Oriented surface with marked boundary points and colored punctures.

    `boundaries` lists the number of marked points on each boundary
    component; `punctures` lists one color ("I" or "II") per puncture.
    """

    genus: int
    boundaries: tuple[int, ...]
    punctures: tuple[str, ...]


def _require_supported(s: ColoredSurface):
    p = len(s.punctures)
    marks = sum(s.boundaries)
    solid = s.punctures.count(COLOR_I)
    if s.genus < 0 or any(m < 0 for m in s.boundaries):
        raise UnsupportedSurface("negative genus or mark count")
    if any(c not in (COLOR_I, COLOR_II) for c in s.punctures):
        raise UnsupportedSurface(f"unknown puncture color in {s.punctures}")
    if p == 0 and marks == 0:
        raise UnsupportedSurface("no marked points at all")
    if any(m == 0 for m in s.boundaries):
        raise UnsupportedSurface("boundary component without marked points")
    if not s.boundaries and s.genus == 0:
        if p <= 2:
            raise UnsupportedSurface("sphere with fewer than three punctures")
        if p == 3 and solid:
            raise UnsupportedSurface('thrice-punctured sphere with an "I"-puncture')
        if p == 4 and solid >= 3:
            raise UnsupportedSurface(
                'four-punctured sphere with three or more "I"-punctures')
    if s.genus == 0 and s.boundaries == (1,) and p <= 1:
        raise UnsupportedSurface("monogon needs at least two punctures")
    if s.genus == 0 and len(s.boundaries) == 1 and marks in (2, 3) and p == 0:
        raise UnsupportedSurface("unpunctured digon or triangle")


def arc_count(s: ColoredSurface) -> int:
    """Number of arcs in any triangulation: 6g + 3b + 3p + marks - 6."""
    _require_supported(s)
    return 6 * s.genus + 3 * len(s.boundaries) + 3 * len(s.punctures) + sum(s.boundaries) - 6


# ---------------------------------------------------------------------------
# triangulations


class Triangulation:
    """An ideal triangulation given by directed triangle sides and an ends table.

    arcs: int labels; boundary: string labels for boundary segments.
    ends maps every label to its (end-0 point, end-1 point).  A triangle is a
    cyclic triple of sides (label, end) traversed from its `end` point to the
    other one, so consecutive sides chain head to tail.  Every arc appears on
    exactly two sides with opposite direction flags (twice in one triangle for
    a folded radius), every boundary segment on exactly one.
    """

    __slots__ = ("arcs", "boundary", "ends", "triangles", "punctures",
                 "_occurrence", "_folds")

    def __init__(self, arcs, boundary, ends, triangles, punctures):
        self.arcs = tuple(sorted(arcs))
        self.boundary = tuple(sorted(boundary))
        self.ends = {lab: tuple(pts) for lab, pts in ends.items()}
        self.triangles = tuple(tuple((lab, o) for lab, o in tri) for tri in triangles)
        self.punctures = dict(punctures)
        self._validate()
        self._folds = self._find_folds()
        self._check_rotations()

    # -- structure queries

    def head(self, side):
        lab, o = side
        return self.ends[lab][1 - o]

    def tail(self, side):
        lab, o = side
        return self.ends[lab][o]

    def occurrences(self, label):
        """The one or two (triangle, position) slots carrying this label."""
        return tuple(pos for (lab, _), pos in self._occurrence.items() if lab == label)

    def folds(self):
        """triangle index -> (loop, radius, enclosed puncture, color) for
        every folded (self-folded) triangle."""
        return self._folds

    def fold_loops(self):
        """loop arc -> (radius, enclosed puncture, color)."""
        return {loop: (radius, enc, color)
                for loop, radius, enc, color in self._folds.values()}

    def enclosed_arcs(self):
        """Radii of folded triangles (the arcs hidden inside a fold)."""
        return {radius for _, radius, _, _ in self._folds.values()}

    def valency(self, point) -> int:
        return sum(1 for a in self.arcs for i in (0, 1) if self.ends[a][i] == point)

    def surface(self) -> ColoredSurface:
        """The underlying colored surface, recovered from the gluing."""
        mark_comp = {}
        for b in self.boundary:
            for pt in self.ends[b]:
                mark_comp.setdefault(pt, pt)

        def find(x):
            while mark_comp[x] != x:
                mark_comp[x] = mark_comp[mark_comp[x]]
                x = mark_comp[x]
            return x

        for b in self.boundary:
            p, q = self.ends[b]
            mark_comp[find(p)] = find(q)
        comps = {}
        for pt in mark_comp:
            comps.setdefault(find(pt), []).append(pt)
        boundaries = tuple(sorted(len(pts) for pts in comps.values()))
        npoints = len(self.punctures) + len(mark_comp)
        nedges = len(self.arcs) + len(self.boundary)
        chi = npoints - nedges + len(self.triangles)
        genus2 = 2 - len(boundaries) - chi
        if genus2 % 2:
            raise InvalidGluing(f"gluing has non-integer genus (chi={chi})")
        colors = tuple(self.punctures[p] for p in sorted(self.punctures))
        return ColoredSurface(genus2 // 2, boundaries, colors)

    def pieces(self):
        """Decompose into the four puzzle-piece kinds of the serialization
        format: P1 plain triangle, P2 triangle with one folded "I"-pocket,
        P3 triangle with two, P4 folded triangle around a "II"-puncture.
        Pocket folds are merged into the triangle carrying their loop, with
        each radius listed right after its loop."""
        folds = self._folds
        fold_of_loop = {}
        for ti, (loop, radius, enc, color) in folds.items():
            if color == COLOR_I:
                fold_of_loop[loop] = (ti, radius, enc)
        consumed = set()
        out = []
        for ti, tri in enumerate(self.triangles):
            if ti in folds:
                loop, radius, enc, color = folds[ti]
                if color == COLOR_II:
                    out.append(("P4", (loop, radius), {"punctures": (enc,)}))
                    consumed.add(ti)
                continue
            labels = [lab for lab, _ in tri]
            pockets = [lab for lab in labels if lab in fold_of_loop]
            if not pockets:
                out.append(("P1", tuple(labels), {}))
                consumed.add(ti)
                continue
            if len(pockets) == 3:
                raise UnsupportedSurface(
                    "triangle with three folded pockets has no piece decomposition")
            lead = 3 - len(pockets)
            for i in range(3):
                r = [labels[(i + j) % 3] for j in range(3)]
                if all(lab not in fold_of_loop for lab in r[:lead]):
                    labels = r
                    break
            arcs, punctures = [], []
            for lab in labels:
                arcs.append(lab)
                if lab in fold_of_loop:
                    fi, radius, enc = fold_of_loop[lab]
                    arcs.append(radius)
                    punctures.append(enc)
                    consumed.add(fi)
            consumed.add(ti)
            out.append(("P2" if len(pockets) == 1 else "P3",
                        tuple(arcs), {"punctures": tuple(punctures)}))
        leftover = [ti for ti in folds if ti not in consumed]
        if leftover:
            raise UnsupportedSurface(
                "folded triangles not attached to any piece: "
                f"{sorted(leftover)}")
        return out

    def __repr__(self):
        return (f"Triangulation({len(self.arcs)} arcs, {len(self.triangles)} "
                f"triangles, punctures {self.punctures})")

    # -- validation

    def _validate(self):
        if any(not _is_arc(a) for a in self.arcs):
            raise InvalidGluing("arc labels must be integers")
        if any(_is_arc(b) for b in self.boundary):
            raise InvalidGluing("boundary labels must not be integers")
        labels = set(self.arcs) | set(self.boundary)
        if len(labels) != len(self.arcs) + len(self.boundary):
            raise InvalidGluing("duplicate labels")
        if set(self.ends) != labels:
            raise InvalidGluing("ends table does not match the label set")
        occurrence = {}
        for ti, tri in enumerate(self.triangles):
            if len(tri) != 3:
                raise InvalidGluing(f"triangle {ti} does not have three sides")
            for i, (lab, o) in enumerate(tri):
                if lab not in labels or o not in (0, 1):
                    raise InvalidGluing(f"bad side ({lab!r}, {o}) in triangle {ti}")
                if (lab, o) in occurrence:
                    raise InvalidGluing(f"side ({lab!r}, {o}) used twice")
                occurrence[(lab, o)] = (ti, i)
        for a in self.arcs:
            if ((a, 0) in occurrence) != ((a, 1) in occurrence) or (a, 0) not in occurrence:
                raise InvalidGluing(f"arc {a} must appear once in each direction")
        for b in self.boundary:
            if ((b, 0) in occurrence) + ((b, 1) in occurrence) != 1:
                raise InvalidGluing(f"boundary segment {b!r} must appear exactly once")
        for ti, tri in enumerate(self.triangles):
            for i in range(3):
                if self.head(tri[i]) != self.tail(tri[(i + 1) % 3]):
                    raise InvalidGluing(f"sides of triangle {ti} do not chain at "
                                        f"corner {i}")
        self._occurrence = occurrence
        marks = {pt for b in self.boundary for pt in self.ends[b]}
        if marks & set(self.punctures):
            raise InvalidGluing("a puncture lies on the boundary")
        for lab in labels:
            for pt in self.ends[lab]:
                if pt not in marks and pt not in self.punctures:
                    raise InvalidGluing(f"unknown marked point {pt!r}")
        for p, color in self.punctures.items():
            if color not in (COLOR_I, COLOR_II):
                raise InvalidGluing(f"unknown color {color!r} for puncture {p!r}")
            if self.valency(p) == 0:
                raise InvalidGluing(f"puncture {p!r} meets no arc")

    def _find_folds(self):
        folds = {}
        for ti, tri in enumerate(self.triangles):
            labels = [lab for lab, _ in tri]
            if len(set(labels)) == 3:
                continue
            counts = {lab: labels.count(lab) for lab in labels}
            doubled = [lab for lab, c in counts.items() if c == 2]
            if len(doubled) != 1 or len(set(labels)) != 2:
                raise InvalidGluing(f"triangle {ti} repeats sides but is not folded")
            radius = doubled[0]
            loop = next(lab for lab in labels if lab != radius)
            if self.ends[loop][0] != self.ends[loop][1]:
                raise InvalidGluing(f"folded triangle {ti} has a non-loop outer side")
            base = self.ends[loop][0]
            rp, rq = self.ends[radius]
            if base not in (rp, rq) or rp == rq:
                raise InvalidGluing(f"radius {radius} of triangle {ti} misses the base")
            enclosed = rq if rp == base else rp
            if enclosed not in self.punctures:
                raise InvalidGluing(f"folded triangle {ti} encloses no puncture")
            folds[ti] = (loop, radius, enclosed, self.punctures[enclosed])
        return folds

    # -- puncture rotations

    def _corners_at(self, point):
        return [(ti, i) for ti, tri in enumerate(self.triangles)
                for i in range(3) if self.head(tri[i]) == point]

    def _corner_successor(self, corner):
        ti, i = corner
        lab, o = self.triangles[ti][(i + 1) % 3]
        return self._occurrence[(lab, 1 - o)]

    def _rotation(self, point):
        """Corners at an interior point in rotation order, from the first
        corner in (triangle, position) order."""
        corners = self._corners_at(point)
        if not corners:
            return []
        start = min(corners)
        out = [start]
        cur = self._corner_successor(start)
        while cur != start:
            out.append(cur)
            cur = self._corner_successor(cur)
        return out

    def _check_rotations(self):
        for p in self.punctures:
            if len(self._rotation(p)) != len(self._corners_at(p)):
                raise InvalidGluing(f"corners at {p!r} do not close a single cycle")


# ---------------------------------------------------------------------------
# the quiver of a triangulation


@dataclass
class TriangulationQuiver:
    """The parallel quiver (all corner arrows) and the reduced quiver (after
    dropping the two corner arrows at every valency-2 "I"-puncture), sharing
    vertex numbering and arrow ids."""

    triangulation: Triangulation
    full: Quiver
    quiver: Quiver
    vertex_arcs: tuple[int, ...]
    vertex_of: dict[int, int]
    deleted: tuple[Arrow, ...]
    corner_arrows: dict = field(repr=False)


def _fold_substitutes(t: Triangulation):
    """arc -> instances it stands for in corner arrows: the loop of an
    "I"-fold is doubled onto its radius, everything else is itself."""
    sub = {}
    for loop, radius, _, color in t.folds().values():
        if color == COLOR_I:
            sub[loop] = (loop, radius)
    return sub


def triangulation_quiver(t: Triangulation) -> TriangulationQuiver:
    vertex_arcs = t.arcs
    vertex_of = {a: i for i, a in enumerate(vertex_arcs)}
    sub = _fold_substitutes(t)
    folds = t.folds()
    arrows = []
    corner_arrows = {}

    def add(ti, i, x, y):
        aid = len(arrows)
        arrows.append(Arrow(aid, vertex_of[x], vertex_of[y], _arrow_label(aid)))
        corner_arrows[(ti, i, x, y)] = aid

    for ti, tri in enumerate(t.triangles):
        fold = folds.get(ti)
        for i in range(3):
            x, y = tri[i][0], tri[(i + 1) % 3][0]
            if not (_is_arc(x) and _is_arc(y)):
                continue
            if fold is not None:
                if fold[3] == COLOR_II and x != y:
                    add(ti, i, x, y)
                continue
            for xs in sub.get(x, (x,)):
                for ys in sub.get(y, (y,)):
                    add(ti, i, xs, ys)

    full = Quiver(len(vertex_arcs), arrows)
    deleted_ids = []
    for p in sorted(t.punctures):
        if t.punctures[p] != COLOR_I or t.valency(p) != 2:
            continue
        for ti, i in t._corners_at(p):
            x, y = t.triangles[ti][i][0], t.triangles[ti][(i + 1) % 3][0]
            deleted_ids.append(corner_arrows[(ti, i, x, y)])
    deleted_ids.sort()
    quiver = Quiver(len(vertex_arcs),
                    [a for a in arrows if a.id not in set(deleted_ids)])
    return TriangulationQuiver(t, full, quiver, vertex_arcs, vertex_of,
                               tuple(full.arrow(i) for i in deleted_ids),
                               corner_arrows)


def cycle_generators(t: Triangulation, tq: TriangulationQuiver | None = None):
    """Generating walks of the homotopy over the parallel quiver: one 3-cycle
    per corner-instance triple of each unfolded all-arc triangle, then one
    puncture circle per "I"-puncture of valency at least two."""
    tq = tq if tq is not None else triangulation_quiver(t)
    sub = _fold_substitutes(t)
    folds = t.folds()
    out = []
    for ti, tri in enumerate(t.triangles):
        if ti in folds:
            continue
        x, y, z = (tri[i][0] for i in range(3))
        if not (_is_arc(x) and _is_arc(y) and _is_arc(z)):
            continue
        for xs in sub.get(x, (x,)):
            for ys in sub.get(y, (y,)):
                for zs in sub.get(z, (z,)):
                    ids = (tq.corner_arrows[(ti, 0, xs, ys)],
                           tq.corner_arrows[(ti, 1, ys, zs)],
                           tq.corner_arrows[(ti, 2, zs, xs)])
                    verts = (tq.vertex_of[xs], tq.vertex_of[ys], tq.vertex_of[zs])
                    r = verts.index(min(verts))
                    steps = tuple(Step(ids[(r + j) % 3], 1) for j in range(3))
                    out.append(Walk(tq.full, min(verts), steps))
    for p in sorted(t.punctures):
        if t.punctures[p] == COLOR_I and t.valency(p) >= 2:
            out.append(puncture_cycle(t, p, tq))
    return tuple(out)


def puncture_cycle(t: Triangulation, point, tq: TriangulationQuiver | None = None) -> Walk:
    """The circle walk around an "I"-puncture: corner arrows in rotation
    order, entering and leaving the radius of every "II"-fold and skipping
    "I"-folds entirely.  Starts at the lowest arc at the puncture that is not
    enclosed in a fold."""
    tq = tq if tq is not None else triangulation_quiver(t)
    folds = t.folds()
    enclosed = t.enclosed_arcs()
    rotation = t._rotation(point)

    def arcs_of(corner):
        ti, i = corner
        return t.triangles[ti][i][0], t.triangles[ti][(i + 1) % 3][0]

    def contributes(corner):
        fold = folds.get(corner[0])
        return fold is None or fold[3] == COLOR_II

    candidates = {a for a in t.arcs if point in t.ends[a] and a not in enclosed}
    if not candidates:
        raise InvalidGluing(f"no unenclosed arc at puncture {point!r}")
    base_arc = min(candidates)
    starts = [j for j, c in enumerate(rotation)
              if contributes(c) and arcs_of(c)[0] == base_arc]
    if not starts:
        raise InvalidGluing(f"no corner walk starts at arc {base_arc} of {point!r}")
    j0 = min(starts, key=lambda j: rotation[j])
    steps = []
    for j in range(len(rotation)):
        corner = rotation[(j0 + j) % len(rotation)]
        if not contributes(corner):
            continue
        ti, i = corner
        x, y = arcs_of(corner)
        steps.append(Step(tq.corner_arrows[(ti, i, x, y)], 1))
    return Walk(tq.full, tq.vertex_of[base_arc], tuple(steps))


def transported_generators(t: Triangulation, tq: TriangulationQuiver | None = None):
    """The homotopy generators rewritten over the reduced quiver: each dropped
    corner arrow is eliminated against a generator crossing it once, which
    substitutes its complementary path everywhere else."""
    tq = tq if tq is not None else triangulation_quiver(t)
    gens = list(cycle_generators(t, tq))
    for a in tq.deleted:
        if not any(s.arrow == a.id for g in gens for s in reduce(g).steps):
            continue
        gens, _ = eliminate_arrow(gens, a.id)
    return tuple(gens)


def surface_complex(t: Triangulation, tq: TriangulationQuiver | None = None) -> CellComplex2:
    """The 2-complex with the parallel quiver as 1-skeleton and one face per
    homotopy generator."""
    tq = tq if tq is not None else triangulation_quiver(t)
    return build_complex(tq.full, cycle_generators(t, tq))


def pi1_report(x: CellComplex2, base: int = 0) -> dict:
    """Euler characteristic plus the fundamental group presentation of the
    component of `base` (rank_if_free is None when relators survive)."""
    pres = component_presentation(x.q, x.faces, base)
    return {"euler_char": x.euler_characteristic(),
            "rank_if_free": pres.rank_if_free(),
            "presentation": pres}


# ---------------------------------------------------------------------------
# the membership oracle of a triangulation


class SurfaceOracle:
    """Membership in the homotopy subgroupoid of a triangulation.

    Generators are collapsed onto the chords of a spanning tree of the
    parallel quiver and Tietze-simplified.  A free quotient is decided
    exactly by free reduction.  The rank-2 abelian pattern (two generators,
    one commutator relator) is decided exactly by an integer lattice solve,
    since the quotient is then abelian and the homotopy is the full preimage
    of the generator span.  Other quotients answer In only when the rewrite
    reaches the empty word, and Unknown otherwise.
    """

    def __init__(self, t: Triangulation, tq: TriangulationQuiver | None = None):
        self.tq = tq if tq is not None else triangulation_quiver(t)
        self.q = self.tq.quiver
        self.full = self.tq.full
        self.generators = cycle_generators(t, self.tq)
        self.tree = spanning_tree(self.full)
        chords = [a.id for a in sorted(self.full.arrows, key=lambda a: a.id)
                  if a.id not in self.tree]
        relators = [walk_to_chord_word(self.full, g, self.tree)
                    for g in self.generators]
        self.presentation = Presentation(chords, relators)
        self._lattice = None
        if self.presentation.is_free():
            self.mode = "free"
        elif self._rank2_commutator():
            self.mode = "abelian"
            self._lattice = AbelianQuotientOracle(self.full, self.generators)
        else:
            self.mode = "unknown"

    def _rank2_commutator(self) -> bool:
        pres = self.presentation
        if len(pres.generators) != 2 or len(pres.relators) != 1:
            return False
        r = pres.relators[0]
        return (len(r) == 4
                and r[0][0] == r[2][0] and r[0][1] == -r[2][1]
                and r[1][0] == r[3][0] and r[1][1] == -r[3][1]
                and {r[0][0], r[1][0]} == set(pres.generators))

    def membership(self, w: Walk) -> Membership:
        if not w.is_closed():
            raise NotClosed(f"walk from {w.source()} to {w.target()} is not closed")
        lifted = walk_on(self.full, w)
        if self.mode == "abelian":
            return self._lattice.membership(lifted)
        word = self.presentation.rewrite(
            walk_to_chord_word(self.full, lifted, self.tree))
        if not word:
            return Membership(IN, witness=())
        if self.mode == "free":
            return Membership(NOT_IN, witness=word, certificate="nonempty_reduced_word")
        return Membership(UNKNOWN)


# ---------------------------------------------------------------------------
# tagged triangulations and flips


@dataclass(frozen=True)
class TaggedArc:
    """An arc with a tag at each endpoint.  The loop of an "I"-fold is
    reported over the radius endpoints with a notch at the enclosed
    puncture, which is the pairing folds encode."""

    label: int
    endpoints: tuple
    tags: tuple[str, str]


class TaggedTriangulation:
    """An ideal triangulation plus one tag per puncture.

    A notched puncture means every arc end there is notched.  Punctures
    enclosed in an "I"-fold are normalized to plain because the fold itself
    carries both the plain and the notched copy of its radius.
    """

    __slots__ = ("triangulation", "tags")

    def __init__(self, triangulation: Triangulation, tags=None):
        self.triangulation = triangulation
        t = (dict.fromkeys(triangulation.punctures, PLAIN) if tags is None
             else dict(tags))
        if set(t) != set(triangulation.punctures):
            raise ValueError("tags must cover exactly the punctures")
        if any(v not in (PLAIN, NOTCHED) for v in t.values()):
            raise ValueError(f"bad tag in {t}")
        for _, _, enclosed, color in triangulation.folds().values():
            if color == COLOR_I:
                t[enclosed] = PLAIN
        self.tags = t

    def __repr__(self):
        return f"TaggedTriangulation({self.triangulation!r}, tags={self.tags})"


def untag(tt: TaggedTriangulation) -> Triangulation:
    """Forget the tags; the underlying ideal triangulation is stored as-is."""
    return tt.triangulation


def tagged_arcs(tt: TaggedTriangulation):
    t = tt.triangulation
    fold_of_loop = {loop: (radius, enc, color)
                    for loop, radius, enc, color in t.folds().values()}
    out = []

    def tag_at(pt):
        return tt.tags.get(pt, PLAIN)

    for a in t.arcs:
        p, q = t.ends[a]
        if a in fold_of_loop:
            radius, enc, color = fold_of_loop[a]
            rp, rq = t.ends[radius]
            if color == COLOR_I:
                tags = (NOTCHED if rp == enc else tag_at(rp),
                        NOTCHED if rq == enc else tag_at(rq))
                out.append(TaggedArc(a, (rp, rq), tags))
                continue
        out.append(TaggedArc(a, (p, q), (tag_at(p), tag_at(q))))
    return tuple(out)


def _swap_labels(t: Triangulation, x: int, y: int) -> Triangulation:
    m = {x: y, y: x}
    ends = {m.get(lab, lab): pts for lab, pts in t.ends.items()}
    tris = [tuple((m.get(lab, lab), o) for lab, o in tri) for tri in t.triangles]
    return Triangulation(t.arcs, t.boundary, ends, tris, t.punctures)


def _quad_flip(t: Triangulation, k: int) -> Triangulation:
    """Replace arc k by the other diagonal of the quadrilateral formed by its
    two triangles.  The label is reused; folded triangles may appear when the
    quadrilateral has repeated sides."""
    (t1, i1), (t2, i2) = sorted(t.occurrences(k))
    if t1 == t2:
        raise InvalidGluing(f"arc {k} is a folded radius; flip its loop instead")

    def rotated(ti, i):
        tri = t.triangles[ti]
        return tri[i], tri[(i + 1) % 3], tri[(i + 2) % 3]

    _, a, b = rotated(t1, i1)
    _, c, d = rotated(t2, i2)
    ends = dict(t.ends)
    ends[k] = (t.head(c), t.head(a))
    tris = list(t.triangles)
    tris[t1] = (b, c, (k, 0))
    tris[t2] = (d, a, (k, 1))
    return Triangulation(t.arcs, t.boundary, ends, tris, t.punctures)


def flip(tt: TaggedTriangulation, k: int) -> TaggedTriangulation:
    """Flip the tagged arc pair at arc k.  Folded triangles follow the case
    analysis: a "II"-fold radius toggles the enclosed tag in place, an
    "I"-fold radius unfolds through the loop and comes back notched, a fold
    loop unfolds directly, and a flip that creates an "I"-fold around a
    notched puncture renames the new loop onto the radius."""
    t = tt.triangulation
    if k not in t.arcs:
        raise ValueError(f"no arc {k} in {t!r}")
    tags = dict(tt.tags)
    folds = t.folds()
    occ = sorted(t.occurrences(k))
    if occ[0][0] == occ[1][0]:
        loop, radius, enclosed, color = folds[occ[0][0]]
        if color == COLOR_II:
            tags[enclosed] = NOTCHED if tags[enclosed] == PLAIN else PLAIN
            return TaggedTriangulation(t, tags)
        ambient = [ti for ti, _ in t.occurrences(loop) if ti != occ[0][0]]
        if ambient[0] in folds:
            raise UnknownConfiguration(
                f"radius {k}: loop {loop} bounds a second fold")
        new = _swap_labels(_quad_flip(t, loop), loop, radius)
        tags[enclosed] = NOTCHED
        return TaggedTriangulation(new, tags)
    unfolds = [ti for ti, _ in occ if ti in folds and folds[ti][0] == k]
    new = _quad_flip(t, k)
    if unfolds:
        for ti in unfolds:
            _, _, enclosed, color = folds[ti]
            if color == COLOR_I:
                tags[enclosed] = PLAIN
        return TaggedTriangulation(new, tags)
    swaps = []
    for ti, _ in occ:
        fold = new.folds().get(ti)
        if fold is None:
            continue
        _, radius, enclosed, color = fold
        if color == COLOR_I and tags[enclosed] == NOTCHED:
            swaps.append(radius)
    if len(swaps) == 2:
        raise UnknownConfiguration(
            f"flip at {k} folds around two notched punctures at once")
    if swaps:
        new = _swap_labels(new, k, swaps[0])
    return TaggedTriangulation(new, tags)


# ---------------------------------------------------------------------------
# canonical forms and flip graphs


def _normalize_orientations(t: Triangulation) -> Triangulation:
    """Reorient non-loop arcs to (lower point, higher point) and boundary
    segments to direction 0, so orientation choices never split canonical
    classes."""
    flipped = set()
    ends = dict(t.ends)
    for a in t.arcs:
        p, q = ends[a]
        if p > q:
            ends[a] = (q, p)
            flipped.add(a)
    for b in t.boundary:
        if (b, 1) in t._occurrence:
            p, q = ends[b]
            ends[b] = (q, p)
            flipped.add(b)
    tris = [tuple((lab, o ^ (lab in flipped)) for lab, o in tri)
            for tri in t.triangles]
    return Triangulation(t.arcs, t.boundary, ends, tris, t.punctures)


def canonical_key(tt: TaggedTriangulation):
    """A relabeling-invariant key for flip-graph deduplication.

    Arcs are renamed to canonical slots grouped by their (normalized)
    endpoints; the key is the minimal serialization over all within-group
    renamings and loop reorientations.  Marked point names and boundary
    labels stay fixed, so only arc relabelings are quotiented out."""
    t = _normalize_orientations(tt.triangulation)
    groups: dict[tuple, list[int]] = {}
    for a in t.arcs:
        groups.setdefault(t.ends[a], []).append(a)
    ordered = sorted(groups.items())
    slot_base = {}
    start = 0
    for pts, group in ordered:
        slot_base[pts] = start
        start += len(group)
    loops = [a for a in t.arcs if t.ends[a][0] == t.ends[a][1]]
    ends_part = tuple((pts, len(group)) for pts, group in ordered)
    punct_part = tuple(sorted(t.punctures.items()))
    tag_part = tuple(sorted(tt.tags.items()))
    best = None
    for combo in itertools.product(*(itertools.permutations(range(len(group)))
                                     for _, group in ordered)):
        mapping = {}
        for (pts, group), perm in zip(ordered, combo):
            for arc, slot in zip(group, perm):
                mapping[arc] = slot_base[pts] + slot
        for nflip in range(1 << len(loops)):
            reversed_loops = {a for j, a in enumerate(loops) if nflip >> j & 1}

            def side_key(lab, o):
                if _is_arc(lab):
                    return (0, mapping[lab], o ^ (lab in reversed_loops))
                return (1, lab, o)

            tris = []
            for tri in t.triangles:
                sides = [side_key(lab, o) for lab, o in tri]
                tris.append(min(tuple(sides[(i + j) % 3] for j in range(3))
                                for i in range(3)))
            key = (tuple(sorted(tris)), ends_part, punct_part, tag_part)
            if best is None or key < best:
                best = key
    return best


@dataclass
class FlipGraph:
    """Canonical triangulation classes reachable by flips.  Nodes are
    representatives in discovery order; edges are index pairs."""

    nodes: tuple
    edges: tuple
    start: int = 0

    def degrees(self):
        deg = [0] * len(self.nodes)
        for i, j in self.edges:
            deg[i] += 1
            if j != i:
                deg[j] += 1
        return deg


def flip_graph(tt: TaggedTriangulation, max_nodes: int = 2000) -> FlipGraph:
    start = canonical_key(tt)
    index = {start: 0}
    reps = [tt]
    edges = set()
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for k in reps[i].triangulation.arcs:
            neighbor = flip(reps[i], k)
            key = canonical_key(neighbor)
            j = index.get(key)
            if j is None:
                if len(reps) >= max_nodes:
                    raise RuntimeError(f"flip graph exceeds {max_nodes} nodes")
                j = len(reps)
                index[key] = j
                reps.append(neighbor)
                queue.append(j)
            edges.add((min(i, j), max(i, j)))
    return FlipGraph(tuple(reps), tuple(sorted(edges)), 0)


# ---------------------------------------------------------------------------
# flips against mutation


def _slot_assignments(target: Quiver, image: Quiver):
    """All bijections target-arrows -> image-arrows preserving (src, tgt)."""
    slots_t, slots_i = {}, {}
    for a in sorted(target.arrows, key=lambda a: a.id):
        slots_t.setdefault((a.src, a.tgt), []).append(a.id)
    for a in sorted(image.arrows, key=lambda a: a.id):
        slots_i.setdefault((a.src, a.tgt), []).append(a.id)
    keys = sorted(slots_t)
    for combo in itertools.product(*(itertools.permutations(slots_i[k])
                                     for k in keys)):
        phi = {}
        for key, permed in zip(keys, combo):
            phi.update(zip(slots_t[key], permed))
        yield phi


def verify_flip_mutation(tt: TaggedTriangulation, k: int) -> bool:
    """Check that mutation with the triangulation's homotopy matches the arc
    flip at k: the reduced quivers agree vertexwise, and some matching of
    parallel arrows sends every homotopy generator of the flipped
    triangulation to an In-verdict walk."""
    t = tt.triangulation
    tq = triangulation_quiver(t)
    tracked = init_tracked(tq.quiver, SurfaceOracle(t, tq))
    mutated = mutate(tracked, tq.vertex_of[k])
    flipped = flip(tt, k).triangulation
    if flipped.arcs != t.arcs:
        return False
    tq2 = triangulation_quiver(flipped)
    if not quiver_equal_fixed_vertices(tq2.quiver, mutated.current):
        return False
    generators = transported_generators(flipped, tq2)
    undecided = False
    for phi in _slot_assignments(tq2.quiver, mutated.current):
        verdicts = []
        for g in generators:
            w = Walk(mutated.current, g.base,
                     tuple(Step(phi[s.arrow], s.sign) for s in g.steps))
            verdicts.append(mutated.verdict(w).verdict)
        if all(v == IN for v in verdicts):
            return True
        if any(v == UNKNOWN for v in verdicts):
            undecided = True
    if undecided:
        raise DecisionUnknown(f"flip at {k}: generator membership undecided")
    return False

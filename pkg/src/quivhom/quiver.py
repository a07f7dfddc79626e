"""Finite multi-digraphs with identified arrows, and the classical mutation rules.

Arrows are first-class objects (not just multiplicities) because walks and
homotopy words refer to individual arrows.  Adjacency and exchange matrices
are derived views.
"""
from __future__ import annotations

from dataclasses import dataclass

MAX_VERTICES = 64


class LoopPresent(ValueError):
    pass


@dataclass(frozen=True)
class Arrow:
    id: int
    src: int
    tgt: int
    label: str | None = None

    def name(self) -> str:
        return self.label if self.label is not None else f"#{self.id}"


class Quiver:
    """A finite quiver.  Vertices are 0..n-1, arrows carry stable ids."""

    __slots__ = ("n", "arrows", "_by_id", "_out", "_in")

    def __init__(self, n: int, arrows: list[Arrow] | tuple[Arrow, ...] = ()):
        if not 0 <= n <= MAX_VERTICES:
            raise ValueError(f"vertex count {n} outside 0..{MAX_VERTICES}")
        self.n = n
        self.arrows = tuple(arrows)
        self._by_id = {}
        self._out = [[] for _ in range(n)]
        self._in = [[] for _ in range(n)]
        for a in self.arrows:
            if not (0 <= a.src < n and 0 <= a.tgt < n):
                raise ValueError(f"arrow {a.name()} endpoints outside 0..{n - 1}")
            if a.id in self._by_id:
                raise ValueError(f"duplicate arrow id {a.id}")
            self._by_id[a.id] = a
            self._out[a.src].append(a)
            self._in[a.tgt].append(a)

    @classmethod
    def from_pairs(cls, n: int, pairs, labels: str | None = None) -> "Quiver":
        """Build from (src, tgt) pairs; ids are positional.  `labels` gives one
        character per arrow (defaults a, b, c, ...)."""
        arrows = []
        for i, (s, t) in enumerate(pairs):
            lab = labels[i] if labels else chr(ord("a") + i) if i < 26 else f"a{i}"
            arrows.append(Arrow(i, s, t, lab))
        return cls(n, arrows)

    def arrow(self, aid: int) -> Arrow:
        return self._by_id[aid]

    def has_arrow(self, aid: int) -> bool:
        return aid in self._by_id

    def arrows_out(self, v: int) -> list[Arrow]:
        return self._out[v]

    def arrows_in(self, v: int) -> list[Arrow]:
        return self._in[v]

    def arrow_by_label(self, label: str) -> Arrow:
        for a in self.arrows:
            if a.label == label:
                return a
        raise KeyError(label)

    def next_id(self) -> int:
        return 1 + max((a.id for a in self.arrows), default=-1)

    def opposite(self) -> "Quiver":
        return Quiver(self.n, [Arrow(a.id, a.tgt, a.src, a.label) for a in self.arrows])

    def __repr__(self):
        body = ", ".join(f"{a.name()}:{a.src}->{a.tgt}" for a in self.arrows)
        return f"Quiver({self.n}; {body})"


def is_loop_free(q: Quiver) -> bool:
    return all(a.src != a.tgt for a in q.arrows)


def is_two_acyclic(q: Quiver) -> bool:
    """No loops and no pair of opposite arrows."""
    pairs = set()
    for a in q.arrows:
        if a.src == a.tgt:
            return False
        pairs.add((a.src, a.tgt))
    return not any((t, s) in pairs for (s, t) in pairs)


def adjacency_matrix(q: Quiver) -> list[list[int]]:
    p = [[0] * q.n for _ in range(q.n)]
    for a in q.arrows:
        p[a.src][a.tgt] += 1
    return p


def exchange_matrix(q: Quiver) -> list[list[int]]:
    """b[i][j] = (arrows j->i) - (arrows i->j); skew-symmetric."""
    p = adjacency_matrix(q)
    return [[p[j][i] - p[i][j] for j in range(q.n)] for i in range(q.n)]


def quiver_equal_fixed_vertices(q1: Quiver, q2: Quiver) -> bool:
    """Equality as multi-digraphs with the vertex set held pointwise fixed."""
    if q1.n != q2.n:
        raise ValueError(f"vertex counts differ: {q1.n} vs {q2.n}")
    return adjacency_matrix(q1) == adjacency_matrix(q2)


# Arrow origin records used by premutate: ("keep", arrow), ("rev", arrow),
# ("comp", out_arrow, in_arrow).  Word-tracking layers consume these.

def premutate_with_origin(q: Quiver, k: int):
    """Premutation at k: reverse every arrow incident to k and add one composite
    arrow per (in-arrow, out-arrow) pair through k whose endpoints differ.

    Returns (quiver, origins) where origins maps each new arrow id to its record.
    """
    if not is_loop_free(q):
        raise LoopPresent(f"premutation needs a loop-free quiver: {q}")
    if not 0 <= k < q.n:
        raise ValueError(f"vertex {k} outside 0..{q.n - 1}")
    arrows: list[Arrow] = []
    origins: dict[int, tuple] = {}
    nid = q.next_id()
    for a in sorted(q.arrows, key=lambda a: a.id):
        if a.src == k or a.tgt == k:
            rev = Arrow(nid, a.tgt, a.src, f"{a.name()}*")
            arrows.append(rev)
            origins[nid] = ("rev", a)
            nid += 1
        else:
            arrows.append(a)
            origins[a.id] = ("keep", a)
    ins = sorted(q.arrows_in(k), key=lambda a: a.id)
    outs = sorted(q.arrows_out(k), key=lambda a: a.id)
    for b in outs:  # composite ordering: (out id, in id)
        for c in ins:
            if c.src == b.tgt:
                continue  # would be a loop
            comp = Arrow(nid, c.src, b.tgt, f"[{b.name()}{c.name()}]")
            arrows.append(comp)
            origins[nid] = ("comp", b, c)
            nid += 1
    return Quiver(q.n, arrows), origins


def premutate(q: Quiver, k: int) -> Quiver:
    return premutate_with_origin(q, k)[0]


def mutate_matrix(b: list[list[int]], k: int) -> list[list[int]]:
    """Matrix mutation rule; involutive, preserves skew-symmetry."""
    n = len(b)
    if not 0 <= k < n:
        raise ValueError(f"vertex {k} outside 0..{n - 1}")
    out = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i == k or j == k:
                out[i][j] = -b[i][j]
            else:
                out[i][j] = b[i][j] + (abs(b[i][k]) * b[k][j] + b[i][k] * abs(b[k][j])) // 2
    return out

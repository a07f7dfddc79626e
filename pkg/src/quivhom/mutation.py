"""Mutation of quivers with homotopies.

A mutation step is a premutation followed by oracle-driven deletion of the new
2-cycles.  Every arrow of the current quiver carries a walk on the base quiver;
all membership questions are asked there, so the homotopy itself never needs to
be re-presented after a mutation.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .quiver import (Quiver, Arrow, LoopPresent, premutate_with_origin,
                     adjacency_matrix, exchange_matrix, mutate_matrix,
                     is_two_acyclic, quiver_equal_fixed_vertices)
from .walks import (Walk, Step, Membership, DecisionUnknown, arrow_walk, compose,
                    inverse, reduce, membership, IN, NOT_IN, UNKNOWN,
                    fundamental_group_rank)


class NotReduced(ValueError):
    """The homotopy contains a 2-cycle of the quiver."""


@dataclass(frozen=True)
class DeletionRecord:
    pair: tuple[int, int]  # vertex pair (i, j), i < j
    forward: Arrow  # removed arrow i -> j
    backward: Arrow  # removed arrow j -> i
    witness: Membership  # the In verdict for word(forward) . word(backward)


class TrackedQuiver:
    """A quiver with homotopy, tracked against the base it was mutated from."""

    __slots__ = ("current", "base", "oracle", "arrow_word", "log", "deletions")

    def __init__(self, current, base, oracle, arrow_word, log=(), deletions=()):
        self.current = current
        self.base = base
        self.oracle = oracle
        self.arrow_word = dict(arrow_word)
        self.log = tuple(log)
        self.deletions = tuple(deletions)

    def word(self, aid: int) -> Walk:
        return self.arrow_word[aid]

    def translate(self, w: Walk) -> Walk:
        """Rewrite a walk on the current quiver as a walk on the base."""
        out = None
        for s in w.steps:
            piece = self.arrow_word[s.arrow]
            if s.sign < 0:
                piece = inverse(piece)
            out = piece if out is None else compose(piece, out)
        if out is None:
            return Walk(self.base, w.base, ())
        return out

    def verdict(self, w: Walk) -> Membership:
        """Membership of a closed current-quiver walk, asked on the base."""
        return membership(self.oracle, self.translate(w))


def _two_cycle_pairs(q: Quiver, skip=None):
    for i in range(q.n):
        for j in range(i + 1, q.n):
            if skip is not None and skip in (i, j):
                continue
            fwd = sorted((a for a in q.arrows_out(i) if a.tgt == j), key=lambda a: a.id)
            bwd = sorted((a for a in q.arrows_out(j) if a.tgt == i), key=lambda a: a.id)
            if fwd and bwd:
                yield i, j, fwd, bwd


def init_tracked(q: Quiver, oracle) -> TrackedQuiver:
    """Start tracking at a base quiver.  The quiver must be loop-free and the
    homotopy reduced: no 2-cycle of q may lie in H."""
    if not all(a.src != a.tgt for a in q.arrows):
        raise LoopPresent(f"base quiver has a loop: {q}")
    words = {a.id: arrow_walk(q, a.id) for a in q.arrows}
    for i, j, fwd, bwd in _two_cycle_pairs(q):
        for g in fwd:
            for d in bwd:
                m = membership(oracle, compose(words[g.id], words[d.id]))
                if m.verdict == IN:
                    raise NotReduced(f"2-cycle {g.name()}{d.name()} lies in the homotopy")
                if m.verdict == UNKNOWN:
                    raise DecisionUnknown(
                        f"2-cycle {g.name()}{d.name()} membership undecided")
    return TrackedQuiver(q, q, oracle, words)


def pre_mutate(t: TrackedQuiver, k: int) -> TrackedQuiver:
    """Reverse arrows at k and add composites, extending the tracked words."""
    new_q, origins = premutate_with_origin(t.current, k)
    words = {}
    for aid, origin in origins.items():
        if origin[0] == "keep":
            words[aid] = t.arrow_word[aid]
        elif origin[0] == "rev":
            words[aid] = inverse(t.arrow_word[origin[1].id])
        else:
            _, b, c = origin
            words[aid] = compose(t.arrow_word[b.id], t.arrow_word[c.id])
    return TrackedQuiver(new_q, t.base, t.oracle, words, t.log, t.deletions)


def delete_two_cycles(t: TrackedQuiver, k: int) -> TrackedQuiver:
    """Greedy maximal deletion of 2-cycles away from k whose words lie in H.

    Pairs are scanned in ascending arrow id; the lowest forward arrow takes the
    lowest backward partner whose pair word is In.  Any Unknown verdict aborts
    the whole deletion (no partial state escapes).
    """
    removed: set[int] = set()
    records = []
    for i, j, fwd, bwd in _two_cycle_pairs(t.current, skip=k):
        for g in fwd:
            for d in bwd:
                if d.id in removed:
                    continue
                m = membership(t.oracle,
                               compose(t.arrow_word[g.id], t.arrow_word[d.id]))
                if m.verdict == UNKNOWN:
                    raise DecisionUnknown(
                        f"2-cycle ({g.name()}, {d.name()}) at pair ({i},{j}) undecided")
                if m.verdict == IN:
                    removed.add(g.id)
                    removed.add(d.id)
                    records.append(DeletionRecord((i, j), g, d, m))
                    break
    new_q = Quiver(t.current.n, [a for a in t.current.arrows if a.id not in removed])
    words = {aid: w for aid, w in t.arrow_word.items() if aid not in removed}
    return TrackedQuiver(new_q, t.base, t.oracle, words, t.log,
                         t.deletions + tuple(records))


def mutate(t: TrackedQuiver, k: int) -> TrackedQuiver:
    out = delete_two_cycles(pre_mutate(t, k), k)
    return TrackedQuiver(out.current, out.base, out.oracle, out.arrow_word,
                         t.log + (k,), out.deletions)


def mutation_sequence(t: TrackedQuiver, ks) -> TrackedQuiver:
    for k in ks:
        t = mutate(t, k)
    return t


def _max_matching(nleft: int, nright: int, adj) -> int:
    """Kuhn's augmenting-path maximum matching; adj[l] lists right neighbours."""
    match_r = [-1] * nright
    size = 0

    def try_augment(l, seen):
        for r in adj[l]:
            if r in seen:
                continue
            seen.add(r)
            if match_r[r] == -1 or try_augment(match_r[r], seen):
                match_r[r] = l
                return True
        return False

    for l in range(nleft):
        if try_augment(l, set()):
            size += 1
    return size


def check_involution(t: TrackedQuiver, k: int) -> bool:
    """Mutate twice at k and certify the result equals t: same quiver on the
    nose, plus a per-slot bijection of arrows with In pair-words."""
    tt = mutate(mutate(t, k), k)
    if not quiver_equal_fixed_vertices(tt.current, t.current):
        return False
    undecided = False
    for i in range(t.current.n):
        for j in range(t.current.n):
            if i == j:
                continue
            left = sorted((a for a in t.current.arrows_out(i) if a.tgt == j),
                          key=lambda a: a.id)
            if not left:
                continue
            right = sorted((a for a in tt.current.arrows_out(i) if a.tgt == j),
                           key=lambda a: a.id)
            adj_in = [[] for _ in left]
            adj_maybe = [[] for _ in left]
            for li, a in enumerate(left):
                for ri, b in enumerate(right):
                    m = membership(t.oracle,
                                   compose(t.arrow_word[a.id], inverse(tt.arrow_word[b.id])))
                    if m.verdict == IN:
                        adj_in[li].append(ri)
                        adj_maybe[li].append(ri)
                    elif m.verdict == UNKNOWN:
                        adj_maybe[li].append(ri)
            if _max_matching(len(left), len(right), adj_in) == len(left):
                continue
            if _max_matching(len(left), len(right), adj_maybe) == len(left):
                undecided = True
            else:
                return False
    if undecided:
        raise DecisionUnknown("involution matching blocked on undecided pair words")
    return True


def _canonical_probe_walks(q: Quiver, max_len: int = 4):
    """Closed reduced step sequences at the canonical base point, described by
    canonical arrow positions so they transfer between equal-shaped quivers."""
    order = sorted(q.arrows, key=lambda a: (a.src, a.tgt, a.id))
    base = min((a.src for a in q.arrows), default=0)
    out = []
    stack = [(base, ())]
    while stack:
        v, steps = stack.pop()
        if steps and v == base:
            out.append(steps)
        if len(steps) == max_len:
            continue
        last = steps[-1] if steps else None
        for idx, a in enumerate(order):
            for sign in (1, -1):
                if (a.src if sign > 0 else a.tgt) != v:
                    continue
                if last and last[0] == idx and last[1] == -sign:
                    continue
                stack.append((a.tgt if sign > 0 else a.src, steps + ((idx, sign),)))
    out.sort()
    return order, base, out


def oracle_fingerprint(t: TrackedQuiver, max_len: int = 4):
    """Adjacency matrix plus verdicts on all short closed walks at the
    canonical base point.  Approximate: fingerprint collisions merge nodes."""
    order, base, probes = _canonical_probe_walks(t.current, max_len)
    verdicts = []
    for steps in probes:
        w = Walk(t.current, base, tuple(Step(order[i].id, s) for i, s in steps))
        verdicts.append(t.verdict(w).verdict)
    adj = tuple(tuple(row) for row in adjacency_matrix(t.current))
    return adj, tuple(verdicts)


def explore_pattern(t: TrackedQuiver, depth: int):
    """BFS over mutation sequences (no immediate μ_k μ_k backtracking),
    returning every visited address.  Expansion is deduplicated by
    oracle_fingerprint; recorded nodes are exact."""
    result = {(): t}
    seen = {oracle_fingerprint(t)}
    queue = deque([((), t)])
    while queue:
        addr, node = queue.popleft()
        if len(addr) == depth:
            continue
        for k in range(node.current.n):
            if addr and addr[-1] == k:
                continue
            try:
                child = mutate(node, k)
            except DecisionUnknown as e:
                err = DecisionUnknown(f"undecided at address {addr + (k,)}: {e}")
                err.address = addr + (k,)
                raise err from e
            child_addr = addr + (k,)
            result[child_addr] = child
            fp = oracle_fingerprint(child)
            if fp not in seen:
                seen.add(fp)
                queue.append((child_addr, child))
    return result


def maximal_homotopy_fz_equivalence(q: Quiver, ks) -> bool:
    """Mutation with the full homotopy reproduces classical matrix mutation."""
    from .walks import FullOracle
    if not is_two_acyclic(q):
        raise ValueError("needs a 2-acyclic quiver")
    t = init_tracked(q, FullOracle(q))
    b = exchange_matrix(q)
    for k in ks:
        t = mutate(t, k)
        b = mutate_matrix(b, k)
        expected = [[max(-b[i][j], 0) for j in range(q.n)] for i in range(q.n)]
        if adjacency_matrix(t.current) != expected:
            return False
    return True


def _rank_of_matrix(b) -> int:
    n = len(b)
    arrows = sum(abs(b[i][j]) for i in range(n) for j in range(i + 1, n))
    seen = [False] * n
    ncomp = 0
    for r in range(n):
        if seen[r]:
            continue
        ncomp += 1
        stack = [r]
        seen[r] = True
        while stack:
            v = stack.pop()
            for w in range(n):
                if not seen[w] and b[v][w] != 0:
                    seen[w] = True
                    stack.append(w)
    return arrows - n + ncomp


def _is_acyclic(q: Quiver) -> bool:
    indeg = [0] * q.n
    for a in q.arrows:
        indeg[a.tgt] += 1
    queue = deque(v for v in range(q.n) if indeg[v] == 0)
    seen = 0
    while queue:
        v = queue.popleft()
        seen += 1
        for a in q.arrows_out(v):
            indeg[a.tgt] -= 1
            if indeg[a.tgt] == 0:
                queue.append(a.tgt)
    return seen == q.n


def pi1_rank_monotonicity_check(q: Quiver, depth: int) -> bool:
    """Within the FZ mutation class to the given depth, the fundamental group
    rank never drops below the rank of the acyclic seed."""
    if not _is_acyclic(q):
        raise ValueError("needs an acyclic quiver")
    rank0 = fundamental_group_rank(q)
    b0 = exchange_matrix(q)
    seen = {tuple(map(tuple, b0))}
    queue = deque([(b0, 0)])
    while queue:
        b, d = queue.popleft()
        if _rank_of_matrix(b) < rank0:
            return False
        if d == depth:
            continue
        for k in range(q.n):
            nb = mutate_matrix(b, k)
            key = tuple(map(tuple, nb))
            if key not in seen:
                seen.add(key)
                queue.append((nb, d + 1))
    return True

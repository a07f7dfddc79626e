import pytest
from hypothesis import given, strategies as st

from quivhom.quiver import Quiver
from quivhom.walks import (Walk, Step, reduce, compose, inverse, word_walk,
                           arrow_walk, trivial_walk, walk_on, enumerate_closed_walks,
                           NotComposable, NotClosed, membership,
                           TrivialOracle, FullOracle, GeneratedOracle,
                           AbelianQuotientOracle, IntLattice, IN, NOT_IN, UNKNOWN,
                           abelianization, spanning_tree, free_generators,
                           fundamental_group_rank, exponent_two_quotient_check,
                           build_complex, Presentation, component_presentation,
                           walk_to_chord_word, eliminate_arrow, _arrow_index)


def triangle():
    return Quiver.from_pairs(3, [(2, 0), (1, 2), (0, 1)], labels=["a", "b", "c"])


TRI = triangle()


def theta(k=3):
    # k parallel arrows 0 -> 1; fundamental group is free of rank k - 1
    return Quiver.from_pairs(2, [(0, 1)] * k)


def test_walk_construction_and_endpoints():
    q = triangle()
    w = word_walk(q, "a b c")
    assert (w.source(), w.target()) == (0, 0)
    assert w.is_closed()
    assert [s.arrow for s in w.steps] == [2, 1, 0]  # c traversed first
    assert w.vertex_at(0) == 0 and w.vertex_at(1) == 1 and w.vertex_at(2) == 2
    with pytest.raises(NotComposable):
        Walk(q, 0, (Step(0, 1),))  # a starts at 2, not 0
    v = word_walk(q, "b c")
    assert (v.source(), v.target()) == (0, 2)
    assert not v.is_closed()


def test_inverse_and_notation():
    q = triangle()
    w = word_walk(q, "b~ a~")
    assert (w.source(), w.target()) == (0, 1)
    assert w == inverse(word_walk(q, "a b"))
    assert repr(word_walk(q, "a b c")) == "a b c"


def test_reduce_and_compose():
    q = triangle()
    w = word_walk(q, "a a~ a b c")
    r = reduce(w)
    assert len(r.steps) == 3
    assert r == word_walk(q, "a b c")
    assert reduce(r) == r
    u = compose(word_walk(q, "a b"), word_walk(q, "c"))
    assert u == word_walk(q, "a b c")
    with pytest.raises(NotComposable):
        compose(word_walk(q, "c"), word_walk(q, "b"))
    assert compose(word_walk(q, "a b c"), inverse(word_walk(q, "a b c"))).is_trivial()
    e = trivial_walk(q, 1)
    assert compose(word_walk(q, "b"), e) == word_walk(q, "b")


def test_walk_on_transfers_by_id():
    q = triangle()
    q2 = Quiver(3, q.arrows)
    w = walk_on(q2, word_walk(q, "a b c"))
    assert w.q is q2 and w.is_closed()


def test_enumerate_closed_walks():
    q = triangle()
    ws = enumerate_closed_walks(q, 0, 3)
    assert len(ws) == 2  # the triangle loop and its inverse
    assert word_walk(q, "a b c") in ws
    assert inverse(word_walk(q, "a b c")) in ws
    single = Quiver.from_pairs(2, [(0, 1)])
    assert enumerate_closed_walks(single, 0, 4) == []


@st.composite
def random_walks(draw):
    q = TRI
    base = draw(st.integers(0, 2))
    picks = draw(st.lists(st.integers(0, 3), max_size=8))
    v, steps = base, []
    for p in picks:
        opts = []
        for a in q.arrows_out(v):
            opts.append(Step(a.id, 1))
        for a in q.arrows_in(v):
            opts.append(Step(a.id, -1))
        s = opts[p % len(opts)]
        steps.append(s)
        a = q.arrow(s.arrow)
        v = a.tgt if s.sign > 0 else a.src
    return Walk(q, base, steps)


@given(random_walks())
def test_reduce_idempotent(w):
    assert reduce(reduce(w)) == reduce(w)
    assert reduce(w).source() == w.source() and reduce(w).target() == w.target()


@given(random_walks(), random_walks())
def test_compose_inverse_laws(w1, w2):
    if w1.source() == w2.target():
        u = compose(w1, w2)
        assert (u.source(), u.target()) == (w2.source(), w1.target())
        assert compose(inverse(w2), compose(inverse(w1), u)).is_trivial()
    assert compose(w1, inverse(w1)).is_trivial()


@given(random_walks(), random_walks(), random_walks())
def test_compose_associative(w1, w2, w3):
    if w2.source() == w3.target() and w1.source() == w2.target():
        assert compose(compose(w1, w2), w3) == compose(w1, compose(w2, w3))


def test_int_lattice():
    lat = IntLattice(2, [(2, 0), (0, 2)])
    assert lat.solve((2, 2)) == [1, 1]
    assert (1, 1) not in lat
    assert (4, -2) in lat
    lat2 = IntLattice(1, [(2,), (3,)])
    assert (1,) in lat2
    c = lat2.solve((1,))
    assert 2 * c[0] + 3 * c[1] == 1
    lat3 = IntLattice(2, [(2, 4)])
    assert (1, 2) not in lat3
    assert (-2, -4) in lat3


def test_trivial_and_full_oracles():
    q = triangle()
    w = word_walk(q, "a b c")
    triv = TrivialOracle(q)
    m = membership(triv, w)
    assert m.verdict == NOT_IN and m.certificate == "nonempty_reduced_word"
    assert membership(triv, compose(w, inverse(w))).verdict == IN
    assert membership(FullOracle(q), w).verdict == IN
    with pytest.raises(NotClosed):
        membership(triv, word_walk(q, "b c"))


def test_generated_oracle_triangle():
    q = triangle()
    gen = word_walk(q, "a b c")
    orc = GeneratedOracle(q, [gen])
    m = orc.membership(gen)
    assert m.verdict == IN
    assert orc.replay(gen, m.witness)
    # inverse, powers, and conjugates are found too
    assert orc.membership(inverse(gen)).verdict == IN
    sq = compose(gen, gen)
    m = orc.membership(sq)
    assert m.verdict == IN and orc.replay(sq, m.witness)
    conj = compose(compose(word_walk(q, "c"), gen), inverse(word_walk(q, "c")))
    assert conj.source() == 1
    m = orc.membership(conj)
    assert m.verdict == IN and orc.replay(conj, m.witness)
    # the single loop direction not in the closure: abelianization blocks it
    m = orc.membership(compose(sq, gen))  # (abc)^3 is in, check replay depth
    assert m.verdict == IN and orc.replay(compose(sq, gen), m.witness)


def test_generated_oracle_not_in_via_abelianization():
    q = Quiver.from_pairs(2, [(0, 1), (1, 0)], labels=["a", "b"])
    ab2 = compose(word_walk(q, "a b"), word_walk(q, "a b"))
    orc = GeneratedOracle(q, [ab2])
    m = orc.membership(word_walk(q, "a b"))
    assert m.verdict == NOT_IN and m.certificate == "abelian_obstruction"
    four = compose(ab2, ab2)
    m = orc.membership(four)
    assert m.verdict == IN and orc.replay(four, m.witness)


def test_generated_oracle_unknown():
    # pi_1 is free on x = b~ a and y = c~ a; in <x | x^2> * <y | >, the
    # commutator [x, y] is nontrivial but invisible to abelianization
    q = theta(3)
    x = word_walk(q, "b~ a")
    y = word_walk(q, "c~ a")
    orc = GeneratedOracle(q, [compose(x, x)], search_bound=2000)
    comm = compose(compose(x, y), compose(inverse(x), inverse(y)))
    assert orc.membership(comm).verdict == UNKNOWN
    # empty generating set: everything nontrivial is rejected
    none = GeneratedOracle(q, [])
    assert none.membership(comm).verdict == NOT_IN
    assert none.membership(trivial_walk(q, 0)).verdict == IN


def test_abelian_quotient_oracle():
    q = theta(3)
    x = word_walk(q, "b~ a")
    y = word_walk(q, "c~ a")
    orc = AbelianQuotientOracle(q, [compose(x, x)])
    comm = compose(compose(x, y), compose(inverse(x), inverse(y)))
    # commutators always belong: the quotient is abelian by construction
    assert orc.membership(comm).verdict == IN
    m = orc.membership(x)
    assert m.verdict == NOT_IN and m.certificate == "abelian_obstruction"
    m = orc.membership(compose(x, x))
    assert m.verdict == IN
    idx = _arrow_index(q)
    assert abelianization(compose(x, x), idx, 3) == (2, -2, 0)


def test_generated_and_abelian_agree_on_rank_one():
    # with cyclic fundamental group the two backends decide identically
    q = Quiver.from_pairs(2, [(0, 1), (1, 0)], labels=["a", "b"])
    ab2 = compose(word_walk(q, "a b"), word_walk(q, "a b"))
    gen = GeneratedOracle(q, [ab2])
    abq = AbelianQuotientOracle(q, [ab2])
    for w in enumerate_closed_walks(q, 0, 6):
        v1 = gen.membership(w).verdict
        v2 = abq.membership(w).verdict
        assert v1 == v2 and v1 in (IN, NOT_IN)


def test_spanning_tree_and_free_generators():
    q = triangle()
    assert spanning_tree(q) == {0, 2}
    gens = free_generators(q)
    assert len(gens) == 1
    a, loop = gens[0]
    assert a.label == "b"
    assert loop == word_walk(q, "a b c")
    assert fundamental_group_rank(q) == 1
    assert fundamental_group_rank(theta(3)) == 2
    from quivhom.quiver import Arrow
    two = Quiver(6, triangle().arrows + tuple(
        Arrow(x.id + 3, x.src + 3, x.tgt + 3, x.label + "'") for x in triangle().arrows))
    assert fundamental_group_rank(two) == 2


def test_exponent_two_quotient_check():
    q = triangle()
    loop = word_walk(q, "a b c")
    sq = compose(loop, loop)
    assert exponent_two_quotient_check(AbelianQuotientOracle(q, [sq]), q) is True
    cube = compose(sq, loop)
    assert exponent_two_quotient_check(AbelianQuotientOracle(q, [cube]), q) is False
    # rank two: squares alone leave the commutator undecided under search
    t = theta(3)
    x = word_walk(t, "b~ a")
    y = word_walk(t, "c~ a")
    sqs = [compose(x, x), compose(y, y)]
    assert exponent_two_quotient_check(GeneratedOracle(t, sqs, search_bound=2000), t) is None
    comm = compose(compose(x, y), compose(inverse(x), inverse(y)))
    full = GeneratedOracle(t, sqs + [comm], search_bound=50_000)
    assert exponent_two_quotient_check(full, t) is True
    assert exponent_two_quotient_check(AbelianQuotientOracle(t, sqs), t) is True


def test_build_complex_euler():
    q = triangle()
    cx = build_complex(q, [word_walk(q, "a b c")])
    assert cx.euler_characteristic() == 3 - 3 + 1
    with pytest.raises(NotClosed):
        build_complex(q, [word_walk(q, "a b")])


def test_presentation_tietze():
    # <x, y, z | x y z> is free of rank 2
    p = Presentation(["x", "y", "z"], [(("x", 1), ("y", 1), ("z", 1))])
    assert p.is_free() and p.rank_if_free() == 2
    assert p.rewrite((("x", 1),)) == (("z", -1), ("y", -1))
    assert p.rewrite((("x", 1), ("y", 1), ("z", 1))) == ()
    # <x | x^2> cannot be simplified
    p2 = Presentation(["x"], [(("x", 1), ("x", 1))])
    assert not p2.is_free()
    assert p2.relators == [(("x", 1), ("x", 1))]


def test_component_presentation_and_chord_words():
    q = triangle()
    loop = word_walk(q, "a b c")
    tree = spanning_tree(q)
    assert walk_to_chord_word(q, loop, tree) == ((1, 1),)
    pres = component_presentation(q, [loop], 0)
    assert pres.generators == [] or pres.is_free()
    assert pres.rank_if_free() == 0  # killing the only generator leaves nothing


def test_eliminate_arrow():
    q = triangle()
    loop = word_walk(q, "a b c")
    other = compose(loop, loop)
    remaining, path = eliminate_arrow([loop, other], 0)  # solve for a
    assert path.source() == 2 and path.target() == 0
    assert path == inverse(word_walk(q, "b c"))
    assert len(remaining) == 1
    assert remaining[0].is_trivial()  # (abc)^2 collapses once a = (bc)^-1
    with pytest.raises(ValueError):
        eliminate_arrow([other], 0)  # crosses a twice

import pytest

from quivhom.quiver import (Arrow, Quiver, adjacency_matrix, premutate)
from quivhom.walks import (IN, NOT_IN, AbelianQuotientOracle, compose,
                           enumerate_closed_walks, exponent_two_quotient_check,
                           inverse, word_walk)
from quivhom.mutation import init_tracked, mutate
from quivhom.coverings import (Covering, CoveringOracle, NonTransitive,
                               NotWeaklyAdmissible, build_regular_cover,
                               check_global_bounded, check_orbit_compatibility,
                               covering_violation, deck_transformations,
                               identity_covering, is_admissible, is_k_mutable,
                               is_regular, is_weakly_admissible, orbit_mutate,
                               orbit_premutate, sufficient_k_mutable,
                               validate_covering)


def triangle() -> Quiver:
    return Quiver.from_pairs(3, [(2, 0), (1, 2), (0, 1)], labels=["a", "b", "c"])


def two_cycle() -> Quiver:
    return Quiver.from_pairs(2, [(0, 1), (1, 0)], labels="ab")


def double_cover() -> Covering:
    # fibre Z/2, the chord b swaps the sheets: total is a directed 4-cycle
    return build_regular_cover(two_cycle(), {1: (1, 0)})


def hexagon_cover() -> Covering:
    # fibre Z/3: total is a directed 6-cycle over the 2-cycle quiver
    return build_regular_cover(two_cycle(), {1: (1, 2, 0)})


def strand_cover() -> Covering:
    # doubled forward arrow; both chords shift a Z/3 fibre
    base = Quiver.from_pairs(2, [(0, 1), (0, 1), (1, 0)], labels=["a1", "a2", "b"])
    return build_regular_cover(base, {1: (1, 2, 0), 2: (1, 2, 0)})


XOR1 = (1, 0, 3, 2)
XOR2 = (2, 3, 0, 1)


def klein_base() -> Quiver:
    return Quiver.from_pairs(
        3, [(0, 1), (1, 0), (1, 2), (2, 1), (0, 2), (2, 0)], labels="abcdef")


def klein_cover() -> Covering:
    # chords b, d act by xor 1 and c, f by xor 2 on a Klein four-group fibre
    return build_regular_cover(klein_base(), {1: XOR1, 2: XOR2, 3: XOR1, 5: XOR2})


KLEIN_RELATORS = ("a b a b", "c d c d", "e f e f", "f c a", "e b d")


def grid_cover() -> Covering:
    # non-regular 4-sheeted cover of 1 <=> 2 <=> 3 (two kinds of 2-vertex)
    base = Quiver.from_pairs(3, [(0, 1), (1, 0), (1, 2), (2, 1)], labels="abcd")
    pairs = [(0, 1), (1, 2), (2, 3), (3, 0), (2, 4), (4, 0), (0, 5), (5, 6),
             (6, 7), (6, 8), (8, 9), (7, 9), (9, 10), (10, 6), (9, 11), (11, 2)]
    over = [2, 3, 1, 0, 2, 3, 1, 0, 1, 2, 3, 0, 2, 3, 1, 0]
    total = Quiver(12, [Arrow(i, s, t) for i, (s, t) in enumerate(pairs)])
    vmap = [1, 2, 1, 0, 2, 0, 1, 0, 2, 1, 2, 0]
    return Covering(total, base, vmap, dict(enumerate(over)))


def shapes(q: Quiver):
    return sorted((a.src, a.tgt) for a in q.arrows)


def test_identity_covering():
    c = identity_covering(triangle())
    assert validate_covering(c)
    deck = deck_transformations(c)
    assert len(deck) == 1
    assert next(iter(deck)).is_identity()
    assert is_regular(c)
    assert is_weakly_admissible(c)
    assert is_admissible(c)


def test_validate_rejects_broken_covers():
    c = double_cover()
    short = Covering(Quiver(c.total.n, c.total.arrows[:-1]), c.base,
                     c.vertex_map, {a.id: c.arrow_map[a.id] for a in c.total.arrows[:-1]})
    assert not validate_covering(short)
    assert "biject" in covering_violation(short)
    lopsided = Covering(Quiver(1), Quiver(2), [0], {})
    assert not validate_covering(lopsided)
    skewed = Covering(c.total, c.base, [1 - v for v in c.vertex_map], c.arrow_map)
    assert not validate_covering(skewed)


def test_grid_cover_is_non_regular():
    c = grid_cover()
    assert validate_covering(c)
    deck = deck_transformations(c)
    assert len(deck) == 2
    rho = next(tau for tau in deck if not tau.is_identity())
    assert all(rho.vertex(rho.vertex(v)) == v for v in range(12))
    # vertices 0 and 2 sit over the same base vertex but in different orbits
    assert all(tau.vertex(0) != 2 for tau in deck)
    assert not is_regular(c)
    assert is_weakly_admissible(c)


def test_double_cover_shape():
    c = double_cover()
    assert validate_covering(c)
    assert shapes(c.total) == [(0, 2), (1, 3), (2, 1), (3, 0)]
    assert c.fiber(0) == (0, 1) and c.fiber(1) == (2, 3)
    deck = deck_transformations(c)
    assert len(deck) == 2
    assert is_regular(c, deck)
    assert is_weakly_admissible(c)


def test_build_regular_cover_trivial_group():
    c = build_regular_cover(triangle(), {})
    assert validate_covering(c)
    assert c.vertex_map == (0, 1, 2)
    assert c.arrow_map == {0: 0, 1: 1, 2: 2}
    assert adjacency_matrix(c.total) == adjacency_matrix(c.base)


def test_build_regular_cover_rejects_nontransitive():
    with pytest.raises(NonTransitive):
        build_regular_cover(two_cycle(), {1: (0, 1)})


def test_identity_orbit_premutation_is_plain_premutation():
    q = triangle()
    for k in range(3):
        pm = orbit_premutate(identity_covering(q), k)
        want = premutate(q, k)
        assert sorted((a.id, a.src, a.tgt, a.label) for a in pm.total.arrows) == \
            sorted((a.id, a.src, a.tgt, a.label) for a in want.arrows)
        assert sorted((a.id, a.src, a.tgt, a.label) for a in pm.base.arrows) == \
            sorted((a.id, a.src, a.tgt, a.label) for a in want.arrows)


def test_double_cover_orbit_mutation_reverses_everything():
    c = double_cover()
    pm = orbit_premutate(c, 0)
    assert len(pm.total.arrows) == 6  # four reversals plus one swapped 2-cycle
    assert validate_covering(pm)
    m = orbit_mutate(c, 0)
    assert validate_covering(m)
    assert shapes(m.total) == sorted((t, s) for (s, t) in shapes(c.total))
    assert shapes(m.base) == [(0, 1), (1, 0)]
    assert is_weakly_admissible(m)
    assert is_k_mutable(c, 0) and is_k_mutable(c, 1)
    assert check_global_bounded(c, 4) == (True, None)


def test_double_cover_sufficiency():
    c = double_cover()
    for k in (0, 1):
        assert sufficient_k_mutable(c, k)
        assert is_k_mutable(c, k)


def test_hexagon_cover_gains_a_loop():
    c = hexagon_cover()
    assert is_weakly_admissible(c)
    pm = orbit_premutate(c, 0)
    assert len(pm.total.arrows) == 9
    assert validate_covering(pm)
    assert any(a.src == a.tgt for a in pm.base.arrows)  # the quotient loop
    m = orbit_mutate(c, 0)
    assert len(m.total.arrows) == 9  # nothing pairs off: free orbit, one-way
    assert not is_weakly_admissible(m)
    assert not is_k_mutable(c, 0) and not is_k_mutable(c, 1)
    assert not sufficient_k_mutable(c, 0)
    assert check_global_bounded(c, 1) == (False, (0,))


def test_strand_cover_mutable_without_sufficiency():
    c = strand_cover()
    assert is_weakly_admissible(c)
    assert not sufficient_k_mutable(c, 0)
    assert is_k_mutable(c, 0) and is_k_mutable(c, 1)
    ok, path = check_global_bounded(c, 3)
    assert ok and path is None


def test_sufficiency_implies_mutability():
    covers = [identity_covering(triangle()), double_cover(), hexagon_cover(),
              strand_cover(), klein_cover()]
    for c in covers:
        for k in range(c.base.n):
            if sufficient_k_mutable(c, k):
                assert is_k_mutable(c, k)


def test_premutation_quotient_matches_base_premutation():
    # away from the loop composites, the quotient of the orbit premutation is
    # the plain premutation of the base, arrow ids included
    covers = [double_cover(), hexagon_cover(), strand_cover(), klein_cover()]
    for c in covers:
        for k in range(c.base.n):
            pm = orbit_premutate(c, k)
            got = sorted((a.id, a.src, a.tgt) for a in pm.base.arrows
                         if a.src != a.tgt)
            want = sorted((a.id, a.src, a.tgt) for a in premutate(c.base, k).arrows)
            assert got == want


def test_orbit_mutation_preserves_deck_action():
    for c in (double_cover(), strand_cover(), klein_cover()):
        before = {tau.vperm for tau in deck_transformations(c)}
        for k in range(c.base.n):
            m = orbit_mutate(c, k)
            assert validate_covering(m)
            after = {tau.vperm for tau in deck_transformations(m)}
            assert before <= after
            assert is_regular(m)


def test_klein_cover_shape_and_deck():
    c = klein_cover()
    assert validate_covering(c)
    assert c.total.n == 12 and len(c.total.arrows) == 24
    assert is_weakly_admissible(c)
    deck = deck_transformations(c)
    assert len(deck) == 4
    assert all(tau.vertex(tau.vertex(v)) == v for tau in deck for v in range(12))
    assert is_regular(c, deck)


def test_covering_oracle_double_cover():
    c = double_cover()
    oracle = CoveringOracle(c)
    q = c.base
    ab = word_walk(q, "a b")
    m = oracle.membership(ab)
    assert m.verdict == NOT_IN and m.certificate == "non_closed_lift"
    assert not m.witness.is_closed()
    abab = compose(ab, ab)
    m = oracle.membership(abab)
    assert m.verdict == IN
    assert m.witness.is_closed()
    # the witness projects back onto the query, step for step
    assert [c.arrow_map[s.arrow] for s in m.witness.steps] == \
        [s.arrow for s in abab.steps]
    assert [s.sign for s in m.witness.steps] == [s.sign for s in abab.steps]
    reference = AbelianQuotientOracle(q, [abab])
    for v in range(q.n):
        for w in enumerate_closed_walks(q, v, 6):
            assert oracle.membership(w).verdict == reference.membership(w).verdict


def test_covering_oracle_matches_abelian_quotient_on_klein_cover():
    c = klein_cover()
    oracle = CoveringOracle(c)
    q = c.base
    relators = [word_walk(q, w) for w in KLEIN_RELATORS]
    for r in relators:
        assert oracle.membership(r).verdict == IN
        assert oracle.membership(inverse(r)).verdict == IN
    reference = AbelianQuotientOracle(q, relators)
    for v in range(q.n):
        for w in enumerate_closed_walks(q, v, 4):
            assert oracle.membership(w).verdict == reference.membership(w).verdict


def test_orbit_compatibility_identity_cover():
    q = triangle()
    c = identity_covering(q)
    for k in range(3):
        t = init_tracked(q, CoveringOracle(c))
        assert check_orbit_compatibility(c, k, t)


def test_orbit_compatibility_double_cover():
    c = double_cover()
    t = init_tracked(c.base, CoveringOracle(c))
    assert check_orbit_compatibility(c, 0, t)
    assert check_orbit_compatibility(c, 1, t)
    # both sides just reverse the 2-cycle
    assert shapes(mutate(t, 0).current) == [(0, 1), (1, 0)]


def test_orbit_compatibility_klein_cover_all_directions():
    c = klein_cover()
    t = init_tracked(c.base, CoveringOracle(c))
    for k in range(3):
        assert check_orbit_compatibility(c, k, t)


def test_orbit_compatibility_rejects_hexagon():
    c = hexagon_cover()
    t = init_tracked(c.base, CoveringOracle(c))
    assert not check_orbit_compatibility(c, 0, t)


def test_exponent_two_quotients_are_globally_mutable():
    for c in (double_cover(), klein_cover()):
        assert exponent_two_quotient_check(CoveringOracle(c), c.base) is True
        assert check_global_bounded(c, 3)[0]
    hexa = hexagon_cover()
    assert exponent_two_quotient_check(CoveringOracle(hexa), hexa.base) is False


def test_orbit_mutation_needs_weak_admissibility():
    cyclic = Quiver.from_pairs(2, [(0, 1), (1, 0), (0, 1)], labels="abc")
    c = identity_covering(cyclic)  # total has a 2-cycle
    with pytest.raises(NotWeaklyAdmissible):
        orbit_premutate(c, 0)
    with pytest.raises(ValueError):
        orbit_mutate(grid_cover(), 0)  # defined only for regular coverings


def test_deck_search_cap():
    wide = Quiver(2, [Arrow(i, 0, 1) for i in range(10_001)])
    with pytest.raises(ValueError):
        deck_transformations(identity_covering(wide))

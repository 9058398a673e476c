"""Permutation engine tests. Expected values come from brute-force closure
oracles computed in this file, never from the engine under test."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from retrakit.permcore import (BudgetError, GroupHomPerm, Perm, PermGroup,
                               contains, derived_subgroup, element_to_word,
                               group_to_text, image, is_p_group, is_soluble,
                               kernel, order, parse_group, parse_perm,
                               perm_to_text, product_embedding)


def _closure(gens):
    """Brute-force group closure, the oracle for small orders."""
    if not gens:
        return set()
    ident = Perm.identity(gens[0].degree)
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = g * x
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def _dihedral8_gens():
    # two reflections of a square, product is the rotation of order 4
    a = parse_perm("(1 3)", 4)
    b = parse_perm("(0 1)(2 3)", 4)
    return a, b


def test_perm_basic_arithmetic():
    a = parse_perm("(0 1 2)", 3)
    assert a * a * a == Perm.identity(3)
    assert a.inv() * a == Perm.identity(3)
    assert a(0) == 1 and a(2) == 0
    assert a.order() == 3


def test_perm_rejects_non_bijection():
    with pytest.raises(ValueError):
        Perm([0, 0, 1])
    with pytest.raises(ValueError):
        Perm([0, 3, 1])


def test_perm_text_roundtrip():
    g = parse_perm("(0 1)(2 4 3)", 5)
    assert parse_perm(perm_to_text(g), 5) == g
    assert perm_to_text(Perm.identity(4)) == "()"
    assert parse_perm("()", 4) == Perm.identity(4)


def test_order_sym3():
    G = PermGroup(3, [parse_perm("(0 1)", 3), parse_perm("(0 1 2)", 3)])
    assert order(G) == 6


def test_order_trivial_group():
    assert order(PermGroup.trivial(1)) == 1
    assert order(PermGroup(5, [Perm.identity(5)])) == 1


def test_order_dihedral8_matches_closure():
    a, b = _dihedral8_gens()
    G = PermGroup(4, [a, b])
    assert len(_closure([a, b])) == 8
    assert order(G) == 8


def test_contains_basics():
    G = PermGroup(3, [parse_perm("(0 1)", 3)])
    assert contains(G, parse_perm("(0 1)", 3))
    assert not contains(G, parse_perm("(0 1 2)", 3))


def test_contains_rotation_in_dihedral():
    a, b = _dihedral8_gens()
    G = PermGroup(4, [a, b])
    rot2 = parse_perm("(0 2)(1 3)", 4)
    assert rot2 in _closure([a, b])
    assert contains(G, rot2)


def test_membership_agrees_with_closure_exhaustively():
    a, b = _dihedral8_gens()
    G = PermGroup(4, [a, b])
    elems = _closure([a, b])
    import itertools
    for imgs in itertools.permutations(range(4)):
        g = Perm(list(imgs))
        assert contains(G, g) == (g in elems)


def test_elements_enumeration():
    a, b = _dihedral8_gens()
    G = PermGroup(4, [a, b])
    assert set(G.elements()) == _closure([a, b])
    assert G.elements()[0] == Perm.identity(4)


def test_kernel_dihedral_to_z2():
    # D_8 -> Z_2 killing b; oracle: enumerate all 8 elements and evaluate
    a, b = _dihedral8_gens()
    G = PermGroup(4, [a, b])
    Z2 = PermGroup(2, [parse_perm("(0 1)", 2)])
    h = GroupHomPerm(G, Z2, [parse_perm("(0 1)", 2), Perm.identity(2)],
                     verified=True)
    K = kernel(h)
    expected = {g for g in _closure([a, b])
                if h.apply(g).is_identity()}
    assert len(expected) == 4
    assert order(K) == 4
    assert set(K.elements()) == expected


def test_kernel_identity_hom_is_trivial():
    a, b = _dihedral8_gens()
    G = PermGroup(4, [a, b])
    h = GroupHomPerm(G, G, [a, b], verified=True)
    assert order(kernel(h)) == 1


def test_kernel_to_trivial_group_is_everything():
    a, b = _dihedral8_gens()
    G = PermGroup(4, [a, b])
    T = PermGroup.trivial(1)
    h = GroupHomPerm(G, T, [Perm.identity(1), Perm.identity(1)], verified=True)
    assert order(kernel(h)) == 8


def test_kernel_rejects_unverified():
    G = PermGroup(2, [parse_perm("(0 1)", 2)])
    h = GroupHomPerm(G, G, [parse_perm("(0 1)", 2)], verified=False)
    with pytest.raises(ValueError):
        kernel(h)


def test_kernel_image_order_law():
    # |source| = |kernel| * |image| on a few homs
    a, b = _dihedral8_gens()
    G = PermGroup(4, [a, b])
    Z2 = PermGroup(2, [parse_perm("(0 1)", 2)])
    for imgs in ([parse_perm("(0 1)", 2), Perm.identity(2)],
                 [parse_perm("(0 1)", 2), parse_perm("(0 1)", 2)]):
        h = GroupHomPerm(G, Z2, imgs, verified=True)
        assert order(G) == order(kernel(h)) * order(image(h))


def test_element_to_word_identity_and_generator():
    a, b = _dihedral8_gens()
    G = PermGroup(4, [a, b])
    assert element_to_word(G, Perm.identity(4)).letters == ()
    assert element_to_word(G, a).letters == (1,)


def test_element_to_word_klein_ab():
    a = parse_perm("(0 1)", 4)
    b = parse_perm("(2 3)", 4)
    G = PermGroup(4, [a, b])
    w = element_to_word(G, a * b)
    assert len(w.letters) == 2
    assert set(abs(x) for x in w.letters) == {1, 2}


def test_element_to_word_evaluates_back():
    a, b = _dihedral8_gens()
    G = PermGroup(4, [a, b])
    rng = np.random.default_rng(7)
    elems = sorted(_closure([a, b]), key=lambda g: g._key)
    for _ in range(100):
        g = elems[rng.integers(len(elems))]
        w = element_to_word(G, g)
        acc = Perm.identity(4)
        for ltr in w.letters:
            s = G.generators[abs(ltr) - 1]
            acc = acc * (s if ltr > 0 else s.inv())
        assert acc == g


def test_element_to_word_minimal_length():
    # BFS guarantees: word length equals Cayley-graph distance
    a, b = _dihedral8_gens()
    G = PermGroup(4, [a, b])
    dist = {Perm.identity(4): 0}
    frontier = [Perm.identity(4)]
    while frontier:
        nxt = []
        for x in frontier:
            for s in (a, b):
                y = s * x
                if y not in dist:
                    dist[y] = dist[x] + 1
                    nxt.append(y)
        frontier = nxt
    for g, d in dist.items():
        assert len(element_to_word(G, g).letters) == d


def test_is_p_group():
    a, b = _dihedral8_gens()
    D8 = PermGroup(4, [a, b])
    S3 = PermGroup(3, [parse_perm("(0 1)", 3), parse_perm("(0 1 2)", 3)])
    assert is_p_group(D8, 2)
    assert not is_p_group(S3, 2)
    assert not is_p_group(S3, 3)
    assert is_p_group(PermGroup.trivial(1), 2)


def test_is_soluble():
    a, b = _dihedral8_gens()
    assert is_soluble(PermGroup(4, [a, b]))
    S3 = PermGroup(3, [parse_perm("(0 1)", 3), parse_perm("(0 1 2)", 3)])
    assert is_soluble(S3)
    A5 = PermGroup(5, [parse_perm("(0 1 2)", 5), parse_perm("(0 1 2 3 4)", 5)])
    assert order(A5) == 60
    assert not is_soluble(A5)


def test_derived_subgroup_dihedral():
    # oracle: commutator subgroup of D_8 is the rotation subgroup of order 2
    a, b = _dihedral8_gens()
    G = PermGroup(4, [a, b])
    elems = _closure([a, b])
    comms = {g * h * g.inv() * h.inv() for g in elems for h in elems}
    expected = _closure(list(comms))
    D = derived_subgroup(G)
    assert order(D) == len(expected) == 2


def test_product_embedding_klein():
    Z2 = parse_perm("(0 1)", 2)
    e = Perm.identity(2)
    G = product_embedding([[Z2, e], [e, Z2]])
    assert G.degree == 4
    assert order(G) == 4
    # oracle: the image is elementary abelian
    for g in G.elements():
        assert (g * g).is_identity()


def test_product_embedding_single_and_empty():
    Z2 = parse_perm("(0 1)", 2)
    assert order(product_embedding([[Z2]])) == 2
    T = product_embedding([])
    assert T.degree == 1 and order(T) == 1


def test_product_embedding_diagonal_has_intersection_order():
    # two copies of the same map: image is the diagonal, order 2 not 4
    Z2 = parse_perm("(0 1)", 2)
    G = product_embedding([[Z2], [Z2]])
    assert order(G) == 2


def test_group_text_roundtrip():
    a, b = _dihedral8_gens()
    G = PermGroup(4, [a, b])
    G2 = parse_group(group_to_text(G))
    assert G2.degree == 4
    assert order(G2) == 8
    with pytest.raises(ValueError):
        parse_group("(0 1)\n")


def test_degree_cap_is_loud():
    with pytest.raises(BudgetError):
        PermGroup(10**6 + 1, [])


@settings(max_examples=40, deadline=None)
@given(st.permutations(list(range(6))))
def test_order_invariant_under_generator_conjugation(images):
    c = Perm(images)
    a = parse_perm("(0 1)(2 3)", 6)
    b = parse_perm("(0 2)(4 5)", 6)
    G = PermGroup(6, [a, b])
    Gc = PermGroup(6, [c * a * c.inv(), c * b * c.inv()])
    assert order(G) == order(Gc)


@settings(max_examples=20, deadline=None)
@given(st.randoms(use_true_random=False))
def test_order_invariant_under_generator_shuffle(rnd):
    gens = [parse_perm("(0 1)", 5), parse_perm("(1 2 3)", 5),
            parse_perm("(3 4)", 5)]
    base = order(PermGroup(5, gens))
    shuffled = gens[:]
    rnd.shuffle(shuffled)
    assert order(PermGroup(5, shuffled)) == base

"""Presentation and coset-enumeration tests with hand-checkable oracles."""

import pytest

from retrakit.fpres import (Presentation, Word, cyclic_reduce, evaluate_word,
                            free_reduce, hom_from_images_exists,
                            parse_presentation, present_finite_group,
                            presentation_to_text, todd_coxeter_bounded)
from retrakit.permcore import (Perm, PermGroup, contains, order, parse_perm)


def _sym3():
    return PermGroup(3, [parse_perm("(0 1)", 3), parse_perm("(0 1 2)", 3)])


def _coxeter_s3():
    # <a,b | a^2, b^2, (ab)^3>
    return Presentation(
        ["a", "b"],
        [Word([1, 1]), Word([2, 2]), Word([1, 2] * 3)])


def test_free_reduce():
    assert free_reduce(Word([1, -1])).letters == ()
    assert free_reduce(Word([1, 2, -2, 1])).letters == (1, 1)
    w = Word([1, 2, -1])
    assert free_reduce(w) == w
    assert free_reduce(free_reduce(w)) == free_reduce(w)


def test_cyclic_reduce():
    assert cyclic_reduce(Word([-1, 2, 1])).letters == (2,)
    assert cyclic_reduce(Word([1, 2])).letters == (1, 2)


def test_word_rejects_zero():
    with pytest.raises(ValueError):
        Word([0])


def test_presentation_normalizes_relators():
    P = Presentation(["a"], [Word([1, -1]), Word([1, 1]), Word([1, 1])])
    assert len(P.relators) == 1
    assert P.relators[0].letters == (1, 1)


def test_presentation_rejects_bad_letters():
    with pytest.raises(ValueError):
        Presentation(["a"], [Word([2])])


def test_hom_exists_coxeter_to_sym3():
    P = _coxeter_s3()
    S3 = _sym3()
    h = hom_from_images_exists(P, S3, [parse_perm("(0 1)", 3),
                                       parse_perm("(1 2)", 3)])
    assert h is not None and h.verified


def test_hom_exists_collapse_to_z2():
    P = _coxeter_s3()
    Z2 = PermGroup(2, [parse_perm("(0 1)", 2)])
    x = parse_perm("(0 1)", 2)
    assert hom_from_images_exists(P, Z2, [x, x]) is not None


def test_hom_blocked_by_surviving_relator():
    P = Presentation(["a"], [Word([1, 1])])
    Z4 = PermGroup(4, [parse_perm("(0 1 2 3)", 4)])
    assert hom_from_images_exists(P, Z4, [parse_perm("(0 1 2 3)", 4)]) is None


def test_hom_stability_under_relator_shuffle():
    S3 = _sym3()
    imgs = [parse_perm("(0 1)", 3), parse_perm("(1 2)", 3)]
    rel = [Word([1, 1]), Word([2, 2]), Word([1, 2] * 3)]
    for perm_rel in (rel, rel[::-1], [rel[1], rel[2], rel[0]]):
        P = Presentation(["a", "b"], perm_rel)
        assert hom_from_images_exists(P, S3, imgs) is not None


def test_present_z2():
    Z2 = PermGroup(2, [parse_perm("(0 1)", 2)])
    P = present_finite_group(Z2)
    assert any(r.letters == (1, 1) for r in P.relators)
    t = todd_coxeter_bounded(P, [], 10)
    assert t is not None and t.num_cosets == 2


def test_present_klein_four():
    a = parse_perm("(0 1)", 4)
    b = parse_perm("(2 3)", 4)
    G = PermGroup(4, [a, b])
    P = present_finite_group(G)
    # compare normal closures both ways against the textbook presentation
    ref = Presentation(["a", "b"], [Word([1, 1]), Word([2, 2]),
                                    Word([1, 2, 1, 2])])
    assert hom_from_images_exists(P, G, [a, b]) is not None
    assert hom_from_images_exists(ref, G, [a, b]) is not None
    t = todd_coxeter_bounded(P, [], 20)
    assert t is not None and t.num_cosets == 4


def test_present_sym3_order_via_tc():
    G = _sym3()
    P = present_finite_group(G)
    t = todd_coxeter_bounded(P, [], 50)
    assert t is not None and t.num_cosets == 6


def test_present_rejects_non_generating_selection():
    G = _sym3()
    with pytest.raises(ValueError):
        present_finite_group(G, gens=[parse_perm("(0 1)", 3)])


def test_tc_sym3_mod_a():
    t = todd_coxeter_bounded(_coxeter_s3(), [Word([1])], 100)
    assert t is not None and t.complete
    assert t.num_cosets == 3


def test_tc_trivial_quotient():
    P = Presentation(["a"], [Word([1])])
    t = todd_coxeter_bounded(P, [], 10)
    assert t is not None and t.num_cosets == 1


def test_tc_infinite_dihedral_does_not_complete():
    P = Presentation(["a", "b"], [Word([1, 1]), Word([2, 2])])
    assert todd_coxeter_bounded(P, [Word([1])], 1000) is None


def test_tc_subgroup_words_fix_coset_zero():
    t = todd_coxeter_bounded(_coxeter_s3(), [Word([1])], 100)
    assert t is not None
    a_action = t.action[0]
    assert a_action(0) == 0


def test_tc_action_is_genuine_quotient_action():
    # completed table over the trivial subgroup: regular action, order 6
    P = _coxeter_s3()
    t = todd_coxeter_bounded(P, [], 100)
    assert t is not None and t.num_cosets == 6
    G = PermGroup(t.num_cosets, list(t.action))
    assert order(G) == 6
    for r in P.relators:
        assert evaluate_word(r, list(t.action), t.num_cosets).is_identity()


def test_tc_dihedral_family_indices():
    # <a,b | a^2, b^2, (ab)^k> mod <a> has index k
    for k in (2, 4, 8):
        P = Presentation(["a", "b"],
                         [Word([1, 1]), Word([2, 2]), Word([1, 2] * k)])
        t = todd_coxeter_bounded(P, [Word([1])], 200)
        assert t is not None and t.num_cosets == k


def test_presentation_text_roundtrip():
    P = _coxeter_s3()
    text = presentation_to_text(P)
    assert text.splitlines()[0] == "gens: a b"
    P2 = parse_presentation(text)
    assert P2.generator_names == ("a", "b")
    assert set(r.letters for r in P2.relators) == set(r.letters for r in P.relators)


def test_presentation_text_uses_uppercase_inverses():
    P = Presentation(["a", "b"], [Word([1, -2])])
    assert "aB" in presentation_to_text(P)
    P2 = parse_presentation("gens: a b\naB\n")
    assert P2.relators[0].letters == (1, -2)


def test_present_roundtrip_on_suite_groups():
    rot = parse_perm("(0 1 2 3)", 4)
    flip = parse_perm("(1 3)", 4)
    for G in (PermGroup(4, [rot]), PermGroup(4, [rot, flip]), _sym3()):
        P = present_finite_group(G)
        assert hom_from_images_exists(P, G, list(G.generators)) is not None
        t = todd_coxeter_bounded(P, [], 2 * order(G) + 8)
        assert t is not None and t.num_cosets == order(G)

"""Blocks of groups: retractions, unfoldings, developments, minimal
extensions and retra-products, all at desk scale with hand-checked values."""

import pytest

from retrakit.cog import (
    EMPTY,
    DegenerateLink,
    ExtendedBlockOfGroups,
    default_side_generators,
    direct_limit_presentation,
    letter_images_in_top,
    link_cog,
    retraction,
    retraction_family,
)
from retrakit.develop import development, is_n_retractible, unfold
from retrakit.fpres import evaluate_word
from retrakit.homcalc import reduced_betti
from retrakit.minimal import minimal_extension
from retrakit.permcore import (Perm, PermGroup, contains, element_to_word,
                               image, is_p_group, is_soluble, order,
                               subgroup_order)
from retrakit.retra import (cyclic_group, dihedral_edge_extension,
                            free_retra_product_presentation, retra_product)
from retrakit.scx import is_k_large, link


def _apply(h, x):
    """Apply a verified hom to an arbitrary element of its source."""
    w = element_to_word(h.source, x)
    return evaluate_word(w, h.gen_images, h.target.degree)


def _two_regular_cycle(complex):
    """True when the complex is a single cycle through all its vertices."""
    if any(len(f) != 2 for f in complex.facets):
        return False
    deg = {v: 0 for v in complex.vertices}
    for a, b in complex.facets:
        deg[a] += 1
        deg[b] += 1
    if any(d != 2 for d in deg.values()):
        return False
    seen = {complex.vertices[0]}
    frontier = [complex.vertices[0]]
    adj = {v: [] for v in complex.vertices}
    for a, b in complex.facets:
        adj[a].append(b)
        adj[b].append(a)
    while frontier:
        nxt = []
        for v in frontier:
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return len(seen) == len(complex.vertices)


# ---------------------------------------------------------------- groups


def test_cyclic_group_orders():
    assert order(cyclic_group(1)) == 1
    assert order(cyclic_group(5)) == 5
    with pytest.raises(ValueError):
        cyclic_group(0)


def test_default_side_generators_enumerates_small_groups():
    assert len(default_side_generators(cyclic_group(2))) == 1
    assert len(default_side_generators(cyclic_group(3))) == 2


def test_dihedral_edge_extension_rejects_k1():
    with pytest.raises(ValueError):
        dihedral_edge_extension(1)


# ------------------------------------------------------------ retractions


def test_retraction_keeps_own_side_and_kills_the_other():
    ext = dihedral_edge_extension(4)
    r = retraction(ext, EMPTY, ("a",))
    assert r is not None
    assert r.gen_images[0] == Perm([1, 0])
    assert r.gen_images[1] == Perm.identity(2)
    # left inverse of the inclusion: the side generator comes back
    assert r.gen_images[0] == ext.core.side_generators[("a",)][0]


def test_retraction_onto_chamber_is_trivial():
    ext = dihedral_edge_extension(4)
    r = retraction(ext, EMPTY, ("a", "b"))
    assert r is not None
    assert all(g.is_identity() for g in r.gen_images)


def test_retraction_missing_exactly_for_odd_rotation():
    assert retraction(dihedral_edge_extension(3), EMPTY, ("a",)) is None
    fam = retraction_family(dihedral_edge_extension(3))
    assert fam.missing == (((), ("a",)), ((), ("b",)))
    assert retraction_family(dihedral_edge_extension(4)).missing == ()


@pytest.mark.parametrize("k", [2, 4, 8])
def test_retraction_left_inverse_on_side_groups(k):
    ext = dihedral_edge_extension(k)
    for s in (("a",), ("b",)):
        r = retraction(ext, EMPTY, s)
        for g in ext.core.group(s).elements():
            assert _apply(r, _apply(ext.phi[s], g)) == g


def test_retraction_composition_on_triangle():
    ext = retra_product(2, [cyclic_group(2)] * 3, 1)
    tau = ("v0",)
    sigma = ("v0", "v1")
    r1 = retraction(ext, EMPTY, tau)
    r2 = retraction(ext, tau, sigma)
    r3 = retraction(ext, EMPTY, sigma)
    assert r1 is not None and r2 is not None and r3 is not None
    for x, y in zip(r1.gen_images, r3.gen_images):
        assert _apply(r2, x) == y


def test_retraction_rejects_foreign_simplex():
    ext = dihedral_edge_extension(2)
    with pytest.raises(ValueError):
        retraction(ext, EMPTY, ("c",))


# ------------------------------------------------------------- unfoldings


def test_unfold_klein_is_a_two_edge_path():
    ext = dihedral_edge_extension(2)
    u = unfold(ext, ("a",))
    assert sorted(u.base.complex.facets) == [("a.0", "b.0"), ("a.0", "b.1")]
    assert order(u.top) == 2
    orders = {v: order(u.core.group((v,))) for v in u.base.complex.vertices}
    assert orders == {"a.0": 1, "b.0": 2, "b.1": 2}


def test_unfold_d8_halves_the_top():
    ext = dihedral_edge_extension(4)
    u = unfold(ext, ("a",))
    assert sorted(u.base.complex.facets) == [("a.0", "b.0"), ("a.0", "b.1")]
    assert order(u.top) == 4
    orders = {v: order(u.core.group((v,))) for v in u.base.complex.vertices}
    assert orders == {"a.0": 1, "b.0": 2, "b.1": 2}


def test_unfold_rejects_non_boundary_simplex():
    ext = dihedral_edge_extension(4)
    with pytest.raises(ValueError):
        unfold(ext, ("a", "b"))


def test_unfold_triangle_top_is_kernel_of_retraction():
    ext = retra_product(2, [cyclic_group(2)] * 3, 1)
    u = unfold(ext, ("v0",))
    assert order(u.top) == order(ext.top) // order(ext.core.group(("v0",)))
    assert order(u.top) == 2


@pytest.mark.parametrize("k,n", [(2, 1), (3, 0), (4, 2), (6, 1)])
def test_dihedral_retractibility_ladder(k, n):
    ext = dihedral_edge_extension(k)
    assert is_n_retractible(ext, n)
    assert not is_n_retractible(ext, n + 1)


def test_triangle_minimal_extension_is_exactly_1_retractible():
    ext = retra_product(2, [cyclic_group(2)] * 3, 1)
    assert is_n_retractible(ext, 1)
    assert not is_n_retractible(ext, 2)


# ----------------------------------------------------------- developments


def test_klein_development_is_a_4_cycle():
    dev = development(dihedral_edge_extension(2))
    assert len(dev.complex.vertices) == 4
    assert len(dev.complex.facets) == 4
    assert _two_regular_cycle(dev.complex)
    assert is_k_large(dev.complex, 4)


def test_d8_development_is_an_8_cycle():
    dev = development(dihedral_edge_extension(4))
    assert len(dev.complex.vertices) == 8
    assert len(dev.complex.facets) == 8
    assert _two_regular_cycle(dev.complex)
    assert is_k_large(dev.complex, 6)
    assert is_k_large(dev.complex, 8)
    assert not is_k_large(dev.complex, 10)


def test_triangle_development_is_the_octahedron():
    ext = retra_product(2, [cyclic_group(2)] * 3, 1)
    dev = development(ext)
    assert len(dev.complex.vertices) == 6
    assert len(dev.complex.facets) == 8
    assert reduced_betti(dev.complex, 2) == (0, 0, 1)
    assert is_k_large(dev.complex, 4)
    assert not is_k_large(dev.complex, 6)
    # every vertex link is a 4-cycle
    for v in dev.complex.vertices:
        assert _two_regular_cycle(link(dev.complex, (v,)))


def test_development_tiles_are_simply_transitive():
    for ext in (dihedral_edge_extension(2), dihedral_edge_extension(4),
                retra_product(2, [cyclic_group(2)] * 3, 1)):
        dev = development(ext)
        assert len(dev.elements) == order(ext.top)
        assert (len(dev.complex.facets)
                == len(ext.base.chambers) * len(dev.elements))


def test_development_vertex_orbits_match_cosets():
    ext = retra_product(2, [cyclic_group(2)] * 3, 1)
    dev = development(ext)
    A = PermGroup(len(dev.complex.vertices), list(dev.action))
    assert order(A) == order(ext.top)
    # vertices over the same base vertex form one orbit of size |top|/|G(v)|
    idx = {v: i for i, v in enumerate(dev.complex.vertices)}
    for v in ("v0", "v1", "v2"):
        labels = [w for w in dev.complex.vertices
                  if w.rsplit(".", 1)[0] == v]
        assert len(labels) == order(ext.top) // order(ext.core.group((v,)))
        seen = {idx[labels[0]]}
        frontier = [idx[labels[0]]]
        while frontier:
            nxt = []
            for i in frontier:
                for a in dev.action:
                    j = int(a.images[i])
                    if j not in seen:
                        seen.add(j)
                        nxt.append(j)
            frontier = nxt
        assert seen == {idx[w] for w in labels}


# -------------------------------------------------- presentations and links


def test_edge_direct_limit_presentation():
    ext = dihedral_edge_extension(2)
    P = direct_limit_presentation(ext.core)
    assert P.generator_names == ("s0.g0", "s1.g0")
    assert sorted(w.letters for w in P.relators) == [(1, 1), (2, 2)]


def test_free_retra_product_presentation_dim1_ignores_n():
    P1 = free_retra_product_presentation(1, [cyclic_group(2)] * 2, 1)
    P5 = free_retra_product_presentation(1, [cyclic_group(2)] * 2, 5)
    assert P1.generator_names == P5.generator_names == ("s0.g0", "s1.g0")
    assert sorted(w.letters for w in P1.relators) == [(1, 1), (2, 2)]
    assert sorted(w.letters for w in P5.relators) == [(1, 1), (2, 2)]


def test_direct_limit_relators_die_in_every_suite_top():
    exts = [dihedral_edge_extension(2), dihedral_edge_extension(4),
            dihedral_edge_extension(8),
            retra_product(1, [cyclic_group(3)] * 2, 1),
            retra_product(2, [cyclic_group(2)] * 3, 1)]
    for ext in exts:
        P = direct_limit_presentation(ext.core)
        images = letter_images_in_top(ext)
        for w in P.relators:
            assert evaluate_word(w, images, ext.top.degree).is_identity()


def test_link_cog_of_triangle_vertex_is_an_edge_extension():
    ext = retra_product(2, [cyclic_group(2)] * 3, 1)
    lk = link_cog(ext.core, ("v0",))
    assert isinstance(lk, ExtendedBlockOfGroups)
    assert sorted(lk.base.complex.facets) == [("v1", "v2")]
    assert order(lk.top) == 4
    assert order(lk.core.group(("v1",))) == 2
    assert order(lk.core.group(("v2",))) == 2


def test_link_cog_of_triangle_edge_degenerates():
    ext = retra_product(2, [cyclic_group(2)] * 3, 1)
    lk = link_cog(ext.core, ("v0", "v1"))
    assert isinstance(lk, DegenerateLink)
    assert order(lk.top) == 2


# ------------------------------------------------------ minimal extensions


def test_minimal_edge_extension_orders_double():
    for n in range(1, 6):
        ext = retra_product(1, [cyclic_group(2)] * 2, n)
        a = ext.phi[("v0",)].gen_images[0]
        b = ext.phi[("v1",)].gen_images[0]
        assert order(ext.top) == 2 ** (n + 1)
        assert a.order() == 2 and b.order() == 2
        assert (a * b).order() == 2 ** n


def test_minimal_edge_extension_n2_coset_action():
    # the first product block is the 4-point coset action of the order-8 top
    ext = retra_product(1, [cyclic_group(2)] * 2, 2)
    a = ext.phi[("v0",)].gen_images[0]
    b = ext.phi[("v1",)].gen_images[0]
    assert ext.top.degree == 8
    assert tuple(a.images[:4]) == (2, 3, 0, 1)
    assert tuple(b.images[:4]) == (1, 0, 2, 3)


def test_minimal_z3_edge_extension_orders():
    assert order(retra_product(1, [cyclic_group(3)] * 2, 1).top) == 9
    ext = retra_product(1, [cyclic_group(3)] * 2, 2)
    assert order(ext.top) == 243
    assert ext.top.degree == 18


def test_minimal_extension_state_shape():
    ext = retra_product(2, [cyclic_group(2)] * 3, 2)
    assert ext.state.level == 2
    assert len(ext.state.sequences) == 24
    assert ext.top.degree == 360


def test_minimal_extension_rejects_level_zero():
    ext = dihedral_edge_extension(2)
    with pytest.raises(ValueError):
        minimal_extension(ext.core, 0)


def test_minimal_top_covers_every_retractible_extension():
    # the D_8 edge extension is 1-retractible, so its top maps onto the
    # minimal 1-retractible top (the Klein group) over the same letters
    from retrakit.fpres import hom_from_images_exists, present_finite_group
    big = dihedral_edge_extension(4)
    small = retra_product(1, [cyclic_group(2)] * 2, 1)
    P = present_finite_group(big.top, list(letter_images_in_top(big)))
    h = hom_from_images_exists(P, small.top, letter_images_in_top(small))
    assert h is not None
    assert subgroup_order(small.top, list(h.gen_images)) == 4


def test_local_maps_are_injective_across_the_suite():
    exts = [dihedral_edge_extension(2), dihedral_edge_extension(4),
            retra_product(1, [cyclic_group(3)] * 2, 1),
            retra_product(2, [cyclic_group(2)] * 3, 1)]
    for ext in exts:
        for t, h in ext.phi.items():
            assert order(image(h)) == order(ext.core.group(t))


def test_tops_inherit_p_group_and_solubility():
    cases = [(dihedral_edge_extension(2), 2),
             (dihedral_edge_extension(4), 2),
             (retra_product(1, [cyclic_group(2)] * 2, 3), 2),
             (retra_product(2, [cyclic_group(2)] * 3, 1), 2),
             (retra_product(1, [cyclic_group(3)] * 2, 2), 3)]
    for ext, p in cases:
        assert is_p_group(ext.top, p)
        assert is_soluble(ext.top)


def test_retra_product_validates_input_counts():
    with pytest.raises(ValueError):
        retra_product(1, [cyclic_group(2)], 1)
    with pytest.raises(ValueError):
        retra_product(0, [cyclic_group(2)], 1)

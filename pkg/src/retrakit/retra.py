"""Retra-products: simplices of groups built from prescribed side groups.

The construction walks the faces of a simplex by decreasing dimension:
the chamber carries the trivial group, the sides carry the given groups,
and every deeper face carries the minimal n-retractible extension of the
simplex of groups induced on its link.  The top of the resulting
extension is the n-retra-product of the side groups; its direct limit
presentation is the free n-retra-product.
"""

from .permcore import Perm, PermGroup, order, is_p_group, BudgetError
from .fpres import Presentation
from .scx import SimplicialComplex, require_block
from .cog import (BlockOfGroups, ExtendedBlockOfGroups,
                  default_side_generators, direct_limit_presentation,
                  validate)
from .minimal import minimal_extension


def cyclic_group(k: int) -> PermGroup:
    """The cyclic group of order k as the rotations of k points."""
    if k < 1:
        raise ValueError("the order must be positive")
    if k == 1:
        return PermGroup.trivial(1)
    return PermGroup(k, [Perm([(i + 1) % k for i in range(k)])])


def dihedral_edge_extension(k: int) -> ExtendedBlockOfGroups:
    """Two reflections spanning the dihedral group of order 2k on an edge.

    The edge's vertices carry the two-element groups generated by the
    reflections i -> -i and i -> 2-i on 2k points; their product is a
    rotation of order k, so the top has order 2k.
    """
    if k < 2:
        raise ValueError("need k >= 2 for a faithful pair of reflections")
    n = 2 * k
    ra = Perm([(-i) % n for i in range(n)])
    rb = Perm([(2 - i) % n for i in range(n)])
    top = PermGroup(n, [ra, rb])
    if order(top) != 2 * k:
        raise AssertionError("reflection pair has the wrong span")
    swap = Perm([1, 0])
    Ga = PermGroup(2, [swap])
    Gb = PermGroup(2, [swap])
    blk = require_block(SimplicialComplex([("a", "b")]))
    core = BlockOfGroups(blk, {("a",): Ga, ("b",): Gb})
    phi = {("a",): _gen_hom(Ga, top, [ra]),
           ("b",): _gen_hom(Gb, top, [rb])}
    return ExtendedBlockOfGroups(core, top, phi)


def _gen_hom(source, target, images):
    from .permcore import GroupHomPerm
    return GroupHomPerm(source, target, images, verified=True)


def _retra_cog(dim: int, side_groups, n: int) -> BlockOfGroups:
    """The simplex of groups underlying the n-retra-product."""
    if dim < 1:
        raise ValueError("the simplex dimension must be at least 1")
    side_groups = list(side_groups)
    if len(side_groups) != dim + 1:
        raise ValueError(f"need {dim + 1} side groups, got "
                         f"{len(side_groups)}")
    for G in side_groups:
        if not isinstance(G, PermGroup):
            raise TypeError("side groups must be permutation groups")
    verts = tuple(f"v{i}" for i in range(dim + 1))
    blk = require_block(SimplicialComplex([verts]))
    local = {verts: PermGroup.trivial(1)}
    for s, G in zip(blk.sides, side_groups):
        local[s] = G
    side_gens = {s: default_side_generators(local[s]) for s in blk.sides}
    incl = {}
    cache = {}
    for t in sorted(blk.complex.all_faces(), key=lambda f: (-len(f), f)):
        if len(t) >= dim:
            continue
        rest = tuple(sorted(set(verts) - set(t)))

        def above(r):
            return tuple(sorted(set(r) | set(t)))

        signature = tuple(id(local[above((w,))]) for w in rest)
        hit = cache.get(signature)
        if hit is None:
            lk_blk = require_block(SimplicialComplex([rest]))
            lk_local = {r: local[above(r)] for r in lk_blk.complex.all_faces()}
            lk_incl = {}
            for big in lk_blk.complex.all_faces():
                for small in lk_blk.complex.all_faces():
                    if set(small) < set(big):
                        lk_incl[(big, small)] = incl.get(
                            (above(big), above(small)))
            lk_incl = {p: h for p, h in lk_incl.items() if h is not None}
            lk_gens = {w: side_gens[above(w)] for w in lk_blk.sides}
            lk_cog = BlockOfGroups(lk_blk, lk_local, lk_incl, lk_gens)
            lk_ext = minimal_extension(lk_cog, n)
            hit = (rest, lk_ext)
            cache[signature] = hit
        canon_rest, lk_ext = hit
        unrename = dict(zip(canon_rest, rest))
        local[t] = lk_ext.top
        for r in lk_ext.core.base.complex.all_faces():
            actual = tuple(sorted(unrename[w] for w in r))
            incl[(above(actual), t)] = lk_ext.phi[r]
    return BlockOfGroups(blk, local, incl, side_gens)


def retra_product(dim: int, side_groups, n: int) -> ExtendedBlockOfGroups:
    """The n-retra-product of dim+1 finite groups.

    Builds the full simplex of groups by codimension recursion, extends
    it minimally, and certifies the p-group closure property when all the
    side groups share a prime.
    """
    cog = _retra_cog(dim, side_groups, n)
    report = validate(cog)
    if not report.ok:
        raise AssertionError(f"constructed simplex of groups is invalid: "
                             f"{report.messages}")
    ext = minimal_extension(cog, n)
    p = _common_prime(side_groups)
    if p is not None:
        for t in cog.base.complex.all_faces():
            if not is_p_group(cog.group(t), p):
                raise AssertionError(f"the group at {t} is not a "
                                     f"{p}-group")
        # The top is then automatically a p-group: every generator of a
        # chain action respects the tower of fiber projections behind the
        # coset tables and acts inside each fiber by left multiplication
        # in that fiber's group (a subgroup of a local group).  So each
        # chain action embeds in an iterated wreath product of p-groups,
        # and the top embeds in the product of the chain actions.  Confirm
        # directly on the factors small enough to afford an exact order;
        # degree alone does not bound the order, so overruns are tolerated.
        for perms in ext.state.coset_actions:
            if perms[0].degree > 512:
                continue
            A = PermGroup(perms[0].degree, perms)
            try:
                certified = is_p_group(A, p)
            except BudgetError:
                continue
            if not certified:
                raise AssertionError(f"a chain action is not a {p}-group")
    return ext


def _common_prime(groups):
    """The prime p if every group is a nontrivial p-group, else None."""
    primes = set()
    for G in groups:
        k = order(G)
        if k == 1:
            return None
        p = 2
        while p * p <= k:
            if k % p == 0:
                break
            p += 1
        else:
            p = k
        while k % p == 0:
            k //= p
        if k != 1:
            return None
        primes.add(p)
    return primes.pop() if len(primes) == 1 else None


def free_retra_product_presentation(dim: int, side_groups,
                                    n: int) -> Presentation:
    """Presentation of the free n-retra-product of the side groups."""
    return direct_limit_presentation(_retra_cog(dim, side_groups, n))

"""Developments and unfoldings of extended blocks of groups.

The development spreads the base block over the top group: one tile per
group element, glued along the local groups.  Unfolding restricts the
development to the tiles of one boundary simplex's group and keeps the
kernel of its retraction as the new top; that is how retractibility is
checked, tile by tile, with no reference to how the extension was built.
"""

from typing import Optional

from .permcore import (Perm, PermGroup, GroupHomPerm, BudgetError, order,
                       contains, kernel, image, ELEMENT_CAP)
from .scx import SimplicialComplex, normalize_simplex, require_block
from .cog import (EMPTY, BlockOfGroups, ExtendedBlockOfGroups,
                  default_side_generators, retraction, validate)

DEVELOPMENT_ORDER_CAP = ELEMENT_CAP


class Development:
    """The development of an extension: complex, tiles and top action.

    ``tiles`` maps (base simplex, element index) to a simplex of the
    complex; element indices point into ``elements``, the top group in
    breadth-first order.  ``action`` gives one vertex permutation per top
    generator, indexed along ``complex.vertices``.
    """

    def __init__(self, complex: SimplicialComplex, tiles: dict,
                 action: tuple, elements: list):
        self.complex = complex
        self.tiles = tiles
        self.action = action
        self.elements = elements

    def tile(self, s, g: Perm) -> tuple:
        idx = next(i for i, e in enumerate(self.elements) if e == g)
        return self.tiles[(s, idx)]

    def __repr__(self):
        return (f"Development(nvertices={len(self.complex.vertices)}, "
                f"ntiles={len(self.elements)})")


def _coset_labels(prefix, elems, sub_elems):
    """Label left cosets g*H among elems deterministically.

    Returns (label per element key, representative per label).  Cosets are
    named by the byte-least element they contain, then ranked in sorted
    order, so labels do not depend on enumeration order.
    """
    minkey = {}
    for e in elems:
        k = min((e * h)._key for h in sub_elems)
        minkey[e._key] = k
    ranks = {k: i for i, k in enumerate(sorted(set(minkey.values())))}
    label = {ek: f"{prefix}.{ranks[k]}" for ek, k in minkey.items()}
    reps = {}
    for e in elems:
        reps.setdefault(label[e._key], e)
    return label, reps


def development(ext: ExtendedBlockOfGroups,
                order_cap: int = DEVELOPMENT_ORDER_CAP) -> Development:
    """Build the development of an extension.

    Vertices are cosets of the vertex groups inside the top, tiles are
    translated chambers, and the top acts by left translation.  The tiles
    of the chambers must cover the complex simply transitively; anything
    else means the extension data was inconsistent.
    """
    top = ext.top
    n = order(top)
    if n > order_cap:
        raise BudgetError(f"top order {n} exceeds development cap {order_cap}")
    elems = top.elements()
    base = ext.base.complex

    label = {}
    for v in base.vertices:
        sub = image(ext.phi[(v,)]).elements()
        label[v], _ = _coset_labels(v, elems, sub)

    def placed(s, e):
        return tuple(sorted(label[v][e._key] for v in s))

    facets = []
    for c in ext.base.chambers:
        for e in elems:
            facets.append(placed(c, e))
    distinct = set(facets)
    if len(distinct) != len(ext.base.chambers) * len(elems):
        raise ValueError("tiles are not simply transitive; the extension "
                         "data is inconsistent")
    complex = SimplicialComplex(facets)

    tiles = {}
    for s in base.all_faces():
        for i, e in enumerate(elems):
            tiles[(s, i)] = placed(s, e)

    vertex_index = {v: i for i, v in enumerate(complex.vertices)}
    rep_of = {}
    for v in base.vertices:
        for e in elems:
            rep_of.setdefault(label[v][e._key], (v, e))
    action = []
    for a in top.generators:
        images = [0] * len(complex.vertices)
        for lab, i in vertex_index.items():
            v, e = rep_of[lab]
            images[i] = vertex_index[label[v][(a * e)._key]]
        action.append(Perm(images))
    return Development(complex, tiles, tuple(action), elems)


def unfold(ext: ExtendedBlockOfGroups, s) -> ExtendedBlockOfGroups:
    """Unfold an extension at a boundary simplex.

    The new base consists of the tiles of G(s), the new top is the kernel
    of the retraction onto G(s), and the group at a tile simplex is the
    conjugated part of the old local group that survives in that kernel.
    Raises if no retraction onto G(s) exists or the tiles fail to form a
    block.
    """
    s = normalize_simplex(s)
    if not ext.base.boundary.has_face(s):
        raise ValueError(f"simplex {s} is not on the boundary")
    r = retraction(ext, EMPTY, s)
    if r is None:
        raise ValueError(f"no retraction onto the group at {s}")
    T = kernel(r)
    base = ext.base.complex
    reps = [ext.into_top(s, y) for y in ext.core.group(s).elements()]

    label = {}
    for v in base.vertices:
        sub = image(ext.phi[(v,)]).elements()
        label[v], _ = _coset_labels(v, reps, sub)

    def placed(t, e):
        return tuple(sorted(label[v][e._key] for v in t))

    facets = [placed(c, e) for c in ext.base.chambers for e in reps]
    blk = require_block(SimplicialComplex(facets))

    local_group = {}
    phi = {}
    for t in base.all_faces():
        kern = [x for x in image(ext.phi[t]).elements()
                if not x.is_identity() and contains(T, x)]
        for e in reps:
            key = placed(t, e)
            einv = e.inv()
            conj = [e * x * einv for x in kern]
            G = PermGroup(T.degree, conj)
            old = local_group.get(key)
            if old is None:
                local_group[key] = G
                if conj:
                    phi[key] = GroupHomPerm(G, T, G.generators, verified=True)
            elif order(old) != order(G) or not all(contains(old, g)
                                                   for g in G.generators):
                raise ValueError(f"tile groups disagree on the shared "
                                 f"simplex {key}")

    inclusion = {}
    for big in blk.complex.all_faces():
        if order(local_group[big]) == 1:
            continue
        for small in blk.complex.all_faces():
            if set(small) < set(big):
                src = local_group[big]
                inclusion[(big, small)] = GroupHomPerm(
                    src, local_group[small], src.generators, verified=True)

    core = BlockOfGroups(blk, local_group, inclusion)
    out = ExtendedBlockOfGroups(core, T, phi)
    report = validate(out)
    if not report.ok:
        raise ValueError(f"unfolding is not a valid extension: "
                         f"{report.messages}")
    return out


def is_n_retractible(ext: ExtendedBlockOfGroups, n: int) -> bool:
    """Whether retractions onto every boundary simplex exist, recursively.

    Level zero is vacuous.  Level n needs a retraction onto every
    nonempty boundary simplex and every unfolding to be retractible at
    level n - 1.
    """
    if n < 0:
        raise ValueError("the level must not be negative")
    if n == 0:
        return True
    spots = ext.base.boundary.all_faces()
    for t in spots:
        if retraction(ext, EMPTY, t) is None:
            return False
    for t in spots:
        if not is_n_retractible(unfold(ext, t), n - 1):
            return False
    return True

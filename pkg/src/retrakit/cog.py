"""Blocks of groups: finite group data spread over a block complex.

A block of groups assigns a finite permutation group to every simplex of
a block, together with an injective homomorphism from the group of each
simplex into the group of each of its faces.  Groups are supported on the
boundary, and every group is generated by the side groups sitting above
it.  An extended block of groups adds a global "top" group that every
local group embeds into compatibly.

Everything here treats validation failure as a value: ``validate``
returns a report with one verdict per condition instead of raising.
"""

from typing import Mapping, Optional, Sequence

from .permcore import (Perm, PermGroup, GroupHomPerm, order, contains,
                       subgroup_order, generates_at_least, image,
                       BudgetError)
from .fpres import Presentation, Word, present_finite_group, \
    hom_from_images_exists
from .scx import Block, SimplicialComplex, link, normalize_simplex, \
    validate_block

EMPTY = ()


def default_side_generators(G: PermGroup) -> tuple:
    """Generating set used for a side group when none is supplied.

    Small groups (order at most 8) use every non-identity element, in
    byte order, so that words and presentations come out the same on
    every run; larger groups keep their own generator list.
    """
    if order(G) <= 8:
        return tuple(sorted((g for g in G.elements() if not g.is_identity()),
                            key=lambda g: g._key))
    return G.generators


def _trivial_hom(source: PermGroup, target: PermGroup) -> GroupHomPerm:
    return GroupHomPerm(source, target,
                        [Perm.identity(target.degree)] * len(source.generators),
                        verified=True)


def rebase_hom(h: GroupHomPerm, source: PermGroup) -> GroupHomPerm:
    """The same homomorphism written on another generating list.

    ``source`` must carry the same elements as h.source (a different
    generator choice for one group); images are transported by words.
    """
    if source.degree != h.source.degree:
        raise ValueError("rebased source must live on the same points")
    images = [h.apply(g) for g in source.generators]
    return GroupHomPerm(source, h.target, images, verified=h.verified)


class BlockOfGroups:
    """Group data on a block: local groups plus face inclusions.

    ``local_group`` maps each simplex to its group; simplices left out get
    the trivial group.  ``inclusion`` maps a pair (simplex, face) to the
    homomorphism from the simplex's group into the face's group; pairs
    whose source is trivial may be omitted.  ``side_generators`` fixes the
    generating set of each side group used for presentations and words.
    """

    def __init__(self, base: Block, local_group: Mapping,
                 inclusion: Mapping = (), side_generators: Mapping = ()):
        self.base = base
        groups = {}
        for s, G in dict(local_group).items():
            groups[normalize_simplex(s)] = G
        for s in base.complex.all_faces():
            if s not in groups:
                groups[s] = PermGroup.trivial(1)
        self.local_group = groups
        incl = {}
        for (big, small), h in dict(inclusion).items():
            incl[(normalize_simplex(big), normalize_simplex(small))] = h
        for big in base.complex.all_faces():
            for small in base.complex.all_faces():
                if small == big or not set(small) < set(big):
                    continue
                if (big, small) not in incl and order(self.group(big)) == 1:
                    incl[(big, small)] = _trivial_hom(self.group(big),
                                                      self.group(small))
        self.inclusion = incl
        gens = {}
        supplied = dict(side_generators)
        for s in base.sides:
            if s in supplied:
                gens[s] = tuple(supplied[s])
            else:
                gens[s] = default_side_generators(self.group(s))
        self.side_generators = gens

    def group(self, s) -> PermGroup:
        return self.local_group[normalize_simplex(s)]

    def sides_above(self, s) -> tuple:
        """Sides of the base containing the given simplex."""
        s = normalize_simplex(s)
        return tuple(t for t in self.base.sides if set(s) <= set(t))

    def include(self, big, small, g: Perm) -> Perm:
        """Carry an element of the big simplex's group into a face's group."""
        big = normalize_simplex(big)
        small = normalize_simplex(small)
        if big == small:
            return g
        return self.inclusion[(big, small)].apply(g)

    def __repr__(self):
        return (f"BlockOfGroups(dim={self.base.dim}, "
                f"nsides={len(self.base.sides)})")


class ExtendedBlockOfGroups:
    """A block of groups together with a top group above everything.

    ``phi`` maps each simplex to the embedding of its local group into
    ``top``; the maps commute with the inclusions, and the side images
    generate the top.
    """

    def __init__(self, core: BlockOfGroups, top: PermGroup, phi: Mapping,
                 state=None):
        self.core = core
        self.top = top
        maps = {}
        for s, h in dict(phi).items():
            maps[normalize_simplex(s)] = h
        for s in core.base.complex.all_faces():
            if s not in maps:
                if order(core.group(s)) != 1:
                    raise ValueError(f"missing top map for simplex {s}")
                maps[s] = _trivial_hom(core.group(s), top)
        self.phi = maps
        self.state = state
        self._present_cache = {}

    @property
    def base(self) -> Block:
        return self.core.base

    def group(self, s) -> PermGroup:
        return self.top if s == EMPTY else self.core.group(s)

    def into_top(self, s, g: Perm) -> Perm:
        """Image of a local group element inside the top."""
        if s == EMPTY:
            return g
        return self.phi[normalize_simplex(s)].apply(g)

    def __repr__(self):
        try:
            top = str(order(self.top))
        except BudgetError:
            top = "huge"
        return (f"ExtendedBlockOfGroups(dim={self.base.dim}, "
                f"top_order={top})")


class DegenerateLink:
    """Link data at a side or other non-block locus.

    Carries the link complex, the would-be top group and the local groups,
    plus the reason the complex fails to be a block.
    """

    __slots__ = ("complex", "top", "local_group", "reason")

    def __init__(self, complex: SimplicialComplex, top: PermGroup,
                 local_group: dict, reason: str):
        self.complex = complex
        self.top = top
        self.local_group = local_group
        self.reason = reason

    def __repr__(self):
        return f"DegenerateLink(reason={self.reason!r})"


class ValidationReport:
    """Per-condition verdicts for a (possibly extended) block of groups."""

    def __init__(self):
        self.checks = {}
        self.messages = []

    def record(self, name: str, ok: bool, message: str = ""):
        self.checks[name] = self.checks.get(name, True) and ok
        if not ok and message:
            self.messages.append(f"{name}: {message}")

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def __bool__(self):
        return self.ok

    def __repr__(self):
        bad = [k for k, v in self.checks.items() if not v]
        return f"ValidationReport(ok={self.ok}, failed={bad})"


def _letters_of(cog: BlockOfGroups) -> list:
    """Flattened side generators: (side, index, element, name) per letter."""
    out = []
    for i, s in enumerate(cog.base.sides):
        for j, b in enumerate(cog.side_generators[s]):
            out.append((s, j, b, f"s{i}.g{j}"))
    return out


def _generating_data(cog: BlockOfGroups, s) -> list:
    """Side-generator images inside the group of a simplex.

    Returns (side, j, element of G(s)) triples, one per letter of a side
    containing s, in side order.  These generate G(s) whenever the block
    of groups is locally surjective.
    """
    s = normalize_simplex(s)
    out = []
    for t in cog.sides_above(s):
        for j, b in enumerate(cog.side_generators[t]):
            out.append((t, j, cog.include(t, s, b)))
    return out


def validate(obj) -> ValidationReport:
    """Check every structural condition; failure is a value, not an error."""
    if isinstance(obj, ExtendedBlockOfGroups):
        report = validate(obj.core)
        _validate_extension(obj, report)
        return report
    if not isinstance(obj, BlockOfGroups):
        raise TypeError(f"cannot validate {type(obj).__name__}")
    cog = obj
    report = ValidationReport()
    base = cog.base

    check = validate_block(base.complex)
    report.record("base block", bool(check),
                  check.reason or "")
    faces = base.complex.all_faces()
    report.record("groups present",
                  all(s in cog.local_group for s in faces),
                  "some simplex has no group entry")

    boundary_faces = set(base.boundary.all_faces())
    for s in faces:
        if s not in boundary_faces and order(cog.group(s)) != 1:
            report.record("boundary supported", False,
                          f"interior simplex {s} has a nontrivial group")
    report.record("boundary supported", True)

    for s in faces:
        G = cog.group(s)
        data = _generating_data(cog, s)
        if not data:
            report.record("locally surjective", order(G) == 1,
                          f"no sides above {s} but its group is nontrivial")
            continue
        gens = [g for (_, _, g) in data]
        report.record("locally surjective",
                      subgroup_order(G, gens) == order(G),
                      f"side images do not generate the group at {s}")

    for (big, small), h in sorted(cog.inclusion.items()):
        if h.source is not cog.group(big) or h.target is not cog.group(small):
            report.record("inclusions are homomorphisms", False,
                          f"map for {big} > {small} not between those groups")
            continue
        if not all(contains(h.target, g) for g in h.gen_images):
            report.record("inclusions are homomorphisms", False,
                          f"map for {big} > {small} leaves the face group")
            continue
        if not h.verified:
            P = present_finite_group(h.source)
            ok = hom_from_images_exists(P, h.target, h.gen_images,
                                        source=h.source) is not None
            report.record("inclusions are homomorphisms", ok,
                          f"map for {big} > {small} breaks a relation")
            if not ok:
                continue
        report.record("inclusions injective",
                      generates_at_least(h.target.degree,
                                         list(h.gen_images),
                                         order(h.source)),
                      f"map for {big} > {small} is not injective")
    report.record("inclusions are homomorphisms", True)
    report.record("inclusions injective", True)

    for big in faces:
        if order(cog.group(big)) == 1:
            continue
        for mid in faces:
            if not set(mid) < set(big):
                continue
            for small in faces:
                if not set(small) < set(mid):
                    continue
                ok = all(cog.include(mid, small, cog.include(big, mid, g))
                         == cog.include(big, small, g)
                         for g in cog.group(big).generators)
                report.record("inclusions functorial", ok,
                              f"composition through {mid} disagrees "
                              f"for {big} > {small}")
    report.record("inclusions functorial", True)
    return report


def _validate_extension(ext: ExtendedBlockOfGroups, report: ValidationReport):
    cog = ext.core
    side_images = []
    for s in cog.base.sides:
        for b in cog.side_generators[s]:
            side_images.append(ext.into_top(s, b))
    img_keys = {g._key for g in side_images}
    topgen_keys = {g._key for g in ext.top.generators}
    if all(k in img_keys for k in topgen_keys):
        # the side images include every listed generator of the top, so
        # they span it exactly when they all lie inside it
        report.record("top generated by sides",
                      all(g._key in topgen_keys or contains(ext.top, g)
                          for g in side_images),
                      "side images fail to generate the top")
    else:
        report.record("top generated by sides",
                      subgroup_order(ext.top, side_images) == order(ext.top),
                      "side images fail to generate the top")

    for s in cog.base.complex.all_faces():
        G = cog.group(s)
        h = ext.phi[s]
        if h.source is not G or h.target is not ext.top:
            report.record("top maps are homomorphisms", False,
                          f"top map at {s} not from that group into the top")
            continue
        if not all(g._key in topgen_keys or contains(ext.top, g)
                   for g in h.gen_images):
            report.record("top maps are homomorphisms", False,
                          f"top map at {s} leaves the top group")
            continue
        if not h.verified:
            P = present_finite_group(G)
            ok = hom_from_images_exists(P, ext.top, h.gen_images,
                                        source=G) is not None
            report.record("top maps are homomorphisms", ok,
                          f"top map at {s} breaks a relation")
            if not ok:
                continue
        report.record("top maps injective",
                      generates_at_least(ext.top.degree,
                                         list(h.gen_images), order(G)),
                      f"top map at {s} is not injective")
    report.record("top maps are homomorphisms", True)
    report.record("top maps injective", True)

    for (big, small), h in sorted(cog.inclusion.items()):
        ok = all(ext.into_top(small, h.apply(g)) == ext.into_top(big, g)
                 for g in cog.group(big).generators)
        report.record("compatible with top", ok,
                      f"top maps disagree across {big} > {small}")
    report.record("compatible with top", True)


def link_cog(cog: BlockOfGroups, s):
    """Block of groups induced on the link of a simplex, extended by the
    simplex's own group as top.

    The link of a chamber is empty and rejected.  A link that is not a
    block (a single point, say, at a side) comes back as a DegenerateLink
    carrying the same data un-assembled.
    """
    s = normalize_simplex(s)
    if not cog.base.complex.has_face(s):
        raise ValueError(f"simplex {s} is not in the base")
    L = link(cog.base.complex, s)
    if L.is_empty():
        raise ValueError(f"link at {s} is empty")
    top = cog.group(s)

    def joined(t):
        return normalize_simplex(tuple(t) + s)

    check = validate_block(L)
    if not check:
        locals_ = {t: cog.group(joined(t)) for t in L.all_faces()}
        return DegenerateLink(L, top, locals_, check.reason)
    blk = check.block
    local_group = {t: cog.group(joined(t)) for t in L.all_faces()}
    inclusion = {}
    for big in L.all_faces():
        for small in L.all_faces():
            if set(small) < set(big):
                inclusion[(big, small)] = cog.inclusion[(joined(big),
                                                         joined(small))]
    side_gens = {w: cog.side_generators[joined(w)] for w in blk.sides}
    core = BlockOfGroups(blk, local_group, inclusion, side_gens)
    phi = {t: cog.inclusion[(joined(t), s)] for t in L.all_faces()
           if order(core.group(t)) != 1}
    return ExtendedBlockOfGroups(core, top, phi)


def direct_limit_presentation(cog: BlockOfGroups) -> Presentation:
    """Presentation of the universal group of the block of groups.

    One generator per side-group generator, named "s{i}.g{j}" with sides
    in sorted order, and the relations of every local group written in
    those letters.  No other relations: this is the free product of the
    side groups amalgamated along all the local groups at once.
    """
    letters = _letters_of(cog)
    names = tuple(name for (_, _, _, name) in letters)
    index = {(s, j): pos + 1 for pos, (s, j, _, _) in enumerate(letters)}
    relators = []
    for t in cog.base.complex.all_faces():
        data = _generating_data(cog, t)
        if not data:
            continue
        G = cog.group(t)
        gens = [g for (_, _, g) in data]
        P = present_finite_group(G, gens=gens)
        lift = [index[(s, j)] for (s, j, _) in data]
        for rel in P.relators:
            moved = tuple(lift[abs(x) - 1] * (1 if x > 0 else -1)
                          for x in rel.letters)
            relators.append(Word(moved))
    return Presentation(names, relators)


def letter_images_in_top(ext: ExtendedBlockOfGroups) -> list:
    """Top-group images of the direct limit generators, letter for letter."""
    return [ext.into_top(s, b)
            for (s, j, b, _) in _letters_of(ext.core)]


def _presented_on_side_data(ext: ExtendedBlockOfGroups, s):
    """Presentation of G(s) (the top for the empty simplex) on the side
    letters above s, cached per simplex."""
    key = normalize_simplex(s) if s != EMPTY else EMPTY
    hit = ext._present_cache.get(key)
    if hit is not None:
        return hit
    if key == EMPTY:
        data = [(t, j, ext.into_top(t, b))
                for (t, j, b, _) in _letters_of(ext.core)]
        G = ext.top
    else:
        data = _generating_data(ext.core, key)
        G = ext.core.group(key)
    gens = [g for (_, _, g) in data]
    if gens:
        P = present_finite_group(G, gens=gens)
        carrier = PermGroup(G.degree, gens)
    else:
        P = Presentation((), ())
        carrier = PermGroup.trivial(G.degree)
    ext._present_cache[key] = (data, P, carrier)
    return ext._present_cache[key]


def retraction(ext: ExtendedBlockOfGroups, rho, tau) -> Optional[GroupHomPerm]:
    """The retraction from the group at rho onto the group at tau, if any.

    The empty tuple stands for the top group on either end.  The map is
    pinned on side generators: a side containing both simplices keeps its
    elements, a side containing rho but not tau dies.  There is at most
    one such homomorphism; None means the defining values break some
    relation, so no retraction exists.
    """
    rho = EMPTY if rho == EMPTY else normalize_simplex(rho)
    tau = EMPTY if tau == EMPTY else normalize_simplex(tau)
    for s in (rho, tau):
        if s != EMPTY and not ext.base.complex.has_face(s):
            raise ValueError(f"simplex {s} is not in the base")
    data, P, carrier = _presented_on_side_data(ext, rho)
    target = ext.top if tau == EMPTY else ext.core.group(tau)
    images = []
    for (s, j, _) in data:
        b = ext.core.side_generators[s][j]
        if tau == EMPTY:
            images.append(ext.into_top(s, b))
        elif set(tau) <= set(s):
            images.append(ext.core.include(s, tau, b))
        else:
            images.append(Perm.identity(target.degree))
    return hom_from_images_exists(P, target, images, source=carrier)


class RetractionFamily:
    """All retractions of an extension, indexed by (source, target) pairs.

    ``maps`` holds the retractions that exist; pairs that admit none are
    listed in ``missing``.  The empty tuple denotes the top group.
    """

    def __init__(self, maps: dict, missing: tuple):
        self.maps = maps
        self.missing = missing

    def defined(self, rho, tau) -> bool:
        return (rho, tau) in self.maps

    def __getitem__(self, pair):
        return self.maps[pair]

    def __repr__(self):
        return (f"RetractionFamily(ndefined={len(self.maps)}, "
                f"nmissing={len(self.missing)})")


def retraction_family(ext: ExtendedBlockOfGroups) -> RetractionFamily:
    """Compute every retraction between simplex groups and the top."""
    spots = [EMPTY] + list(ext.base.complex.all_faces())
    maps = {}
    missing = []
    for rho in spots:
        for tau in spots:
            h = retraction(ext, rho, tau)
            if h is None:
                missing.append((rho, tau))
            else:
                maps[(rho, tau)] = h
    return RetractionFamily(maps, tuple(missing))

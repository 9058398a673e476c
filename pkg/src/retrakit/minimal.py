"""Minimal retractible extensions via towers of coset actions.

The universal group of a block of groups is infinite, so its minimal
n-retractible quotient is computed without ever enumerating it: every
admissible chain of n unfolding loci yields a finite coset action of the
universal group, described by one permutation table per presentation
letter plus bookkeeping that says where each Schreier element sits inside
the local structure.  The product of all these actions realizes the
quotient by the level-n kernel, which is the minimal top.

Chains are pruned up to tile translation: unfolding copies of the same
simplex give conjugate subgroups, hence equal normal cores.
"""

import numpy as np

from .permcore import (Perm, PermGroup, order, contains, kernel,
                       generates_at_least, product_embedding, BudgetError)
from .fpres import (Word, evaluate_word, present_finite_group,
                    hom_from_images_exists)
from .permcore import element_to_word
from .cog import (EMPTY, BlockOfGroups, ExtendedBlockOfGroups,
                  _generating_data, _letters_of, direct_limit_presentation,
                  link_cog, rebase_hom, validate)


class MinimalExtensionState:
    """Receipt of a minimal-extension computation.

    ``coset_actions`` holds one tuple of letter permutations per maximal
    chain of unfolding loci, ``sequences`` the chains themselves, and
    ``Nk_image`` the image of the universal group inside the product of
    all the actions: the minimal top at this level.
    """

    def __init__(self, level: int, coset_actions: list, sequences: list,
                 Nk_image: PermGroup):
        self.level = level
        self.coset_actions = coset_actions
        self.sequences = sequences
        self.Nk_image = Nk_image

    def __repr__(self):
        try:
            top = str(order(self.Nk_image))
        except BudgetError:
            top = "huge"
        return (f"MinimalExtensionState(level={self.level}, "
                f"nactions={len(self.coset_actions)}, "
                f"top_order={top})")


class _Local:
    """Local group of an unfolded domain, generated by tagged side images.

    ``tagged`` maps (side key, generator index) to the element realizing
    that side generator here; ``group`` is generated by the tagged values
    in sorted key order, so words over it line up with the keys.
    """

    __slots__ = ("key", "group", "tagged", "tagged_keys", "sides_above",
                 "is_side", "canonical")

    def __init__(self, key, degree, tagged, sides_above, is_side, canonical,
                 expect_order=None):
        self.key = key
        self.tagged = tagged
        self.tagged_keys = tuple(sorted(tagged))
        gens = [tagged[k] for k in self.tagged_keys]
        if any(g.is_identity() for g in gens):
            raise AssertionError(f"identity tagged generator at {key}")
        self.group = PermGroup(degree, gens)
        if expect_order is not None and order(self.group) != expect_order:
            raise AssertionError(
                f"side images at {key} generate order {order(self.group)}, "
                f"expected {expect_order}")
        self.sides_above = tuple(sorted(sides_above))
        self.is_side = is_side
        self.canonical = canonical


def _embed(src: _Local, dst: _Local, z: Perm) -> Perm:
    """Carry an element of one local group into a smaller simplex's group
    along the shared tagged generators."""
    w = element_to_word(src.group, z)
    images = [dst.tagged[k] for k in src.tagged_keys]
    return evaluate_word(w, images, dst.group.degree)


class _Stage:
    """One level of the tower: a coset action plus its local structure."""

    __slots__ = ("npoints", "tables", "schreier", "locals")

    def __init__(self, npoints, tables, schreier, locals_):
        self.npoints = npoints
        self.tables = tables
        self.schreier = schreier
        self.locals = locals_


def _stage0(cog: BlockOfGroups, letters) -> _Stage:
    tables = [np.zeros(1, dtype=np.int32) for _ in letters]
    schreier = [[(s, b)] for (s, j, b, _) in letters]
    locals_ = {}
    side_set = {s for s in cog.base.sides if order(cog.group(s)) > 1}
    for t in cog.base.boundary.all_faces():
        G = cog.group(t)
        if order(G) == 1:
            continue
        tagged = {}
        for s in cog.sides_above(t):
            for j, b in enumerate(cog.side_generators[s]):
                tagged[(s, j)] = cog.include(s, t, b)
        locals_[t] = _Local(t, G.degree, tagged,
                            tuple(s for s in cog.sides_above(t)
                                  if s in side_set),
                            t in side_set, True, expect_order=order(G))
    return _Stage(1, tables, schreier, locals_)


def _step(stage: _Stage, sigma_key) -> _Stage:
    """Unfold the tower at one locus: extend every point by the fiber."""
    sig = stage.locals[sigma_key]
    L = sig.group
    elems = L.elements()
    m = len(elems)
    eidx = {e._key: i for i, e in enumerate(elems)}
    inv_idx = [eidx[e.inv()._key] for e in elems]
    sig_sides = set(sig.sides_above)
    n_old = stage.npoints

    new_tables = []
    new_schreier = []
    embed_cache = {}
    for a in range(len(stage.tables)):
        tbl = np.empty(n_old * m, dtype=np.int32)
        sch = [None] * (n_old * m)
        old = stage.tables[a]
        for x in range(n_old):
            base = int(old[x]) * m
            u = stage.schreier[a][x]
            if u is not None and u[0] in sig_sides:
                ck = (u[0], u[1]._key)
                d = embed_cache.get(ck)
                if d is None:
                    d = _embed(stage.locals[u[0]], sig, u[1])
                    embed_cache[ck] = d
                for y in range(m):
                    tbl[x * m + y] = base + eidx[(d * elems[y])._key]
            elif u is None:
                for y in range(m):
                    tbl[x * m + y] = base + y
            else:
                skey, z = u
                for y in range(m):
                    tbl[x * m + y] = base + y
                    sch[x * m + y] = ((skey, inv_idx[y]), z)
        new_tables.append(tbl)
        new_schreier.append(sch)

    new_locals = {}
    for key, loc in sorted(stage.locals.items()):
        if key in sig_sides or key == sigma_key:
            continue
        if loc.is_side:
            for h in range(m):
                tagged = {((key, h), j): g
                          for j, g in enumerate(loc.group.generators)}
                new_locals[(key, h)] = _Local(
                    (key, h), loc.group.degree, tagged, (((key, h)),),
                    True, h == 0, expect_order=order(loc.group))
            continue
        images = []
        for tk in loc.tagged_keys:
            if tk[0] in sig_sides:
                images.append(sig.tagged[tk])
            else:
                images.append(Perm.identity(L.degree))
        P = present_finite_group(loc.group)
        q = hom_from_images_exists(P, L, images, source=loc.group)
        if q is None:
            raise ValueError(
                f"the group at {key} admits no retraction toward "
                f"{sigma_key}; the local data is not retractible enough")
        K = kernel(q)
        if order(K) == 1:
            continue
        jkeys = [tk for tk in loc.tagged_keys if tk[0] in sig_sides]
        Jgroup = PermGroup(L.degree, [sig.tagged[tk] for tk in jkeys])
        jreal = [loc.tagged[tk] for tk in jkeys]
        members = sorted(eidx[je._key] for je in Jgroup.elements())
        tagged = {}
        for tk in loc.tagged_keys:
            skey, j = tk
            if skey in sig_sides:
                continue
            for h in members:
                w = element_to_word(Jgroup, elems[h])
                jhat = evaluate_word(w, jreal, loc.group.degree)
                tagged[((skey, h), j)] = jhat * loc.tagged[tk] * jhat.inv()
        newloc = _Local((key, 0), loc.group.degree, tagged,
                        sorted({tk[0] for tk in tagged}),
                        False, True, expect_order=order(K))
        for g in newloc.group.generators:
            if not contains(K, g):
                raise AssertionError(
                    f"side copy at {key} leaves the unfolding kernel")
        new_locals[(key, 0)] = newloc
    return _Stage(n_old * m, new_tables, new_schreier, new_locals)


def _collect_actions(stage: _Stage, depth: int, trail, out):
    candidates = sorted(k for k, loc in stage.locals.items() if loc.canonical)
    if depth == 0 or not candidates:
        perms = tuple(Perm(t) for t in stage.tables)
        out.append((tuple(trail), perms, stage.npoints))
        return
    for key in candidates:
        fiber = order(stage.locals[key].group)
        child = _step(stage, key)
        if child.npoints != stage.npoints * fiber:
            raise AssertionError("unfolded degree is not the local index "
                                 "times the old degree")
        _collect_actions(child, depth - 1, trail + [key], out)


def minimal_extension(cog: BlockOfGroups, n: int,
                      check_links: bool = True) -> ExtendedBlockOfGroups:
    """The minimal n-retractible extension of a block of groups.

    Requires n >= 1 and, when ``check_links`` is on, that the extension
    induced on every link that forms a block is itself n-retractible.
    The returned extension carries a MinimalExtensionState in ``state``.
    """
    from .develop import is_n_retractible

    if n < 1:
        raise ValueError("the level must be at least 1")
    report = validate(cog)
    if not report.ok:
        raise ValueError(f"not a valid block of groups: {report.messages}")
    if check_links:
        for t in cog.base.complex.all_faces():
            if len(t) > cog.base.dim - 1:
                continue
            lk = link_cog(cog, t)
            if isinstance(lk, ExtendedBlockOfGroups):
                if not is_n_retractible(lk, n):
                    raise ValueError(f"the link at {t} is not "
                                     f"{n}-retractible")

    letters = _letters_of(cog)
    out = []
    _collect_actions(_stage0(cog, letters), n, [], out)
    # small blocks first so stabilizer-chain base points capture the cheap
    # structure before entering the large coset spaces
    actions = [perms for (_, perms, _)
               in sorted(out, key=lambda rec: rec[2])]
    M = product_embedding(actions)
    if len(M.generators) != len(letters):
        raise AssertionError("a side generator acts trivially in every "
                             "chain; the extension would not be faithful")
    letter_perm = {(s, j): M.generators[i]
                   for i, (s, j, _, _) in enumerate(letters)}

    P = direct_limit_presentation(cog)
    for rel in P.relators:
        if not evaluate_word(rel, M.generators, M.degree).is_identity():
            raise AssertionError("a local relation survives in the tower")

    phi = {}
    for t in cog.base.complex.all_faces():
        G = cog.group(t)
        if order(G) == 1:
            continue
        data = _generating_data(cog, t)
        gens = [g for (_, _, g) in data]
        images = [letter_perm[(s, j)] for (s, j, _) in data]
        carrier = PermGroup(G.degree, gens)
        Pt = present_finite_group(G, gens=gens)
        h = hom_from_images_exists(Pt, M, images, source=carrier)
        if h is None:
            raise AssertionError(f"local relations at {t} break in the top")
        # the hom caps the image order at order(G); reaching it on some
        # orbit of the product action certifies faithfulness
        if not generates_at_least(M.degree, images, order(G)):
            raise ValueError(f"the minimal top does not embed the group "
                             f"at {t} faithfully")
        phi[t] = rebase_hom(h, G)

    state = MinimalExtensionState(n, actions,
                                  [list(tr) for (tr, _, _) in out], M)
    ext = ExtendedBlockOfGroups(cog, M, phi, state=state)
    report = validate(ext)
    if not report.ok:
        raise AssertionError(f"constructed extension fails validation: "
                             f"{report.messages}")
    return ext

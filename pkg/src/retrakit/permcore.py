"""Deterministic finite permutation group engine.

Permutations are dense image arrays over {0..d-1}. Groups carry a
stabilizer chain built by a deterministic Schreier-Sims procedure
(base points are the lexicographically smallest moved points), so
orders, membership tests and certificates are reproducible run to run.
"""

from __future__ import annotations

import hashlib
import threading
from typing import Iterable, Optional, Sequence

import numpy as np


def _digest(key: bytes) -> bytes:
    return hashlib.blake2b(key, digest_size=16).digest()

DEGREE_CAP = 10**6
ORDER_CAP = 2**40
# element enumeration refuses past this many elements (kernel carriers, fibers)
ELEMENT_CAP = 1 << 16


class BudgetError(RuntimeError):
    """Instance exceeds a configured size cap. Failing loudly is the contract."""


def _as_images(images) -> np.ndarray:
    arr = np.asarray(images, dtype=np.int32)
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError("permutation needs a 1-d nonempty image array")
    if arr.size > DEGREE_CAP:
        raise BudgetError(f"degree {arr.size} exceeds cap {DEGREE_CAP}")
    seen = np.zeros(arr.size, dtype=bool)
    if (arr < 0).any() or (arr >= arr.size).any():
        raise ValueError("image out of range")
    seen[arr] = True
    if not seen.all():
        raise ValueError("images are not a bijection")
    return arr


_IDENT_CACHE: dict[int, np.ndarray] = {}


def _ident_arr(degree: int) -> np.ndarray:
    arr = _IDENT_CACHE.get(degree)
    if arr is None:
        arr = np.arange(degree, dtype=np.int32)
        arr.setflags(write=False)
        if len(_IDENT_CACHE) < 64:
            _IDENT_CACHE[degree] = arr
    return arr


class Perm:
    """A permutation of {0..d-1}, stored as its image array."""

    __slots__ = ("images", "_key_cache")

    def __init__(self, images):
        arr = _as_images(images)
        arr.setflags(write=False)
        object.__setattr__(self, "images", arr)

    @staticmethod
    def _wrap(arr: np.ndarray) -> "Perm":
        """Adopt an image array already known to be a permutation
        (products, inverses and identities of valid permutations)."""
        p = object.__new__(Perm)
        arr.setflags(write=False)
        object.__setattr__(p, "images", arr)
        return p

    @property
    def _key(self) -> bytes:
        try:
            return self._key_cache
        except AttributeError:
            k = self.images.tobytes()
            object.__setattr__(self, "_key_cache", k)
            return k

    def __setattr__(self, name, value):
        raise AttributeError("Perm is immutable")

    @property
    def degree(self) -> int:
        return int(self.images.size)

    @staticmethod
    def identity(degree: int) -> "Perm":
        return Perm._wrap(_ident_arr(degree))

    @staticmethod
    def from_cycles(degree: int, cycles: Sequence[Sequence[int]]) -> "Perm":
        imgs = np.arange(degree, dtype=np.int32)
        for cyc in cycles:
            if len(set(cyc)) != len(cyc):
                raise ValueError(f"repeated point in cycle {cyc}")
            for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
                imgs[a] = b
        return Perm(imgs)

    def __mul__(self, other: "Perm") -> "Perm":
        # (g*h)(x) = g(h(x)); h acts first
        if self.degree != other.degree:
            raise ValueError("degree mismatch in product")
        return Perm._wrap(self.images[other.images])

    def inv(self) -> "Perm":
        out = np.empty(self.degree, dtype=np.int32)
        out[self.images] = _ident_arr(self.degree)
        return Perm._wrap(out)

    def __call__(self, point: int) -> int:
        return int(self.images[point])

    def is_identity(self) -> bool:
        return bool((self.images == _ident_arr(self.degree)).all())

    def order(self) -> int:
        n = 1
        for cyc in self.cycles():
            n = int(np.lcm(n, len(cyc)))
        return n

    def cycles(self) -> list[tuple[int, ...]]:
        """Nontrivial cycles, each starting at its smallest point, sorted."""
        seen = [False] * self.degree
        out = []
        for start in range(self.degree):
            if seen[start]:
                continue
            cyc = [start]
            seen[start] = True
            x = int(self.images[start])
            while x != start:
                cyc.append(x)
                seen[x] = True
                x = int(self.images[x])
            if len(cyc) > 1:
                out.append(tuple(cyc))
        return out

    def moved_points(self) -> np.ndarray:
        return np.nonzero(self.images != _ident_arr(self.degree))[0]

    def __eq__(self, other) -> bool:
        return isinstance(other, Perm) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        return f"Perm({perm_to_text(self)!r}, degree={self.degree})"


def perm_to_text(g: Perm) -> str:
    cycs = g.cycles()
    if not cycs:
        return "()"
    return "".join("(" + " ".join(str(p) for p in c) + ")" for c in cycs)


def parse_perm(text: str, degree: int) -> Perm:
    """Parse disjoint-cycle notation like "(0 1)(2 3)"; "()" is the identity."""
    text = text.strip()
    if text in ("()", ""):
        return Perm.identity(degree)
    if not (text.startswith("(") and text.endswith(")")):
        raise ValueError(f"bad cycle notation: {text!r}")
    cycles = []
    for part in text[1:-1].split(")("):
        pts = [int(tok) for tok in part.replace(",", " ").split()]
        if any(p < 0 or p >= degree for p in pts):
            raise ValueError(f"point out of range in {text!r} (degree {degree})")
        cycles.append(pts)
    return Perm.from_cycles(degree, cycles)


# above this degree, transversals are stored as Schreier forests (parent
# and edge-generator arrays) instead of explicit permutations, trading
# repeated path multiplications for O(degree) memory per level
_VECTOR_DEGREE = 4096


class _Level:
    __slots__ = ("base", "gens", "transversal", "parent", "edge",
                 "snap", "snap_inv")

    def __init__(self, base: int):
        self.base = base
        self.gens: list[Perm] = []
        self.transversal: dict[int, Perm] = {}
        self.parent = None
        self.edge = None
        self.snap: list[Perm] = []
        self.snap_inv: list[Perm] = []

    def size(self) -> int:
        if self.parent is None:
            return len(self.transversal)
        return int((self.parent >= 0).sum())

    def points_sorted(self) -> list[int]:
        if self.parent is None:
            return sorted(self.transversal)
        return [int(x) for x in np.flatnonzero(self.parent >= 0)]

    def has(self, x: int) -> bool:
        if self.parent is None:
            return x in self.transversal
        return bool(self.parent[x] >= 0)

    def u(self, x: int, degree: int) -> Perm:
        """The transversal element carrying the base point to x."""
        if self.parent is None:
            return self.transversal[x]
        acc = None
        p = x
        while p != self.base:
            s = self.snap[int(self.edge[p])]
            acc = s if acc is None else acc * s
            p = int(self.parent[p])
        return Perm.identity(degree) if acc is None else acc

    def reduce(self, g: Perm) -> Optional[Perm]:
        """u_x^{-1} * g for x = g(base), or None if x is off the orbit."""
        x = g(self.base)
        if x == self.base:
            return g
        if self.parent is None:
            u = self.transversal.get(x)
            if u is None:
                return None
            return u.inv() * g
        if self.parent[x] < 0:
            return None
        p = x
        while p != self.base:
            g = self.snap_inv[int(self.edge[p])] * g
            p = int(self.parent[p])
        return g


def _rebuild_orbit(levels: list[_Level], i: int, degree: int) -> None:
    lvl = levels[i]
    gens = [g for j in range(i, len(levels)) for g in levels[j].gens]
    if degree > _VECTOR_DEGREE:
        parent = np.full(degree, -1, dtype=np.int32)
        edge = np.full(degree, -1, dtype=np.int32)
        parent[lvl.base] = lvl.base
        frontier = [lvl.base]
        while frontier:
            nxt = []
            for x in frontier:
                for k, g in enumerate(gens):
                    y = g(x)
                    if parent[y] < 0:
                        parent[y] = x
                        edge[y] = k
                        nxt.append(y)
            frontier = nxt
        lvl.transversal = {}
        lvl.parent = parent
        lvl.edge = edge
        lvl.snap = list(gens)
        lvl.snap_inv = [g.inv() for g in gens]
        return
    tr = {lvl.base: Perm.identity(degree)}
    frontier = [lvl.base]
    while frontier:
        nxt = []
        for x in frontier:
            ux = tr[x]
            for g in gens:
                y = g(x)
                if y not in tr:
                    tr[y] = g * ux
                    nxt.append(y)
        frontier = nxt
    lvl.transversal = tr
    lvl.parent = None


def _sift(levels: list[_Level], g: Perm, start: int) -> tuple[int, Perm] | None:
    """Reduce g through levels[start:]; None if it reaches the identity."""
    for i in range(start, len(levels)):
        red = levels[i].reduce(g)
        if red is None:
            return i, g
        g = red
    if g.is_identity():
        return None
    return len(levels), g


def _build_chain(degree: int, generators: Sequence[Perm],
                 base_prefix: Sequence[int] = ()) -> list[_Level]:
    """Deterministic Schreier-Sims, deepest level first. base_prefix points
    get eager levels so the pointwise stabilizer of the prefix is readable
    off the chain."""
    levels = [_Level(b) for b in base_prefix]
    for i in range(len(levels)):
        _rebuild_orbit(levels, i, degree)

    def insert(i: int, g: Perm) -> bool:
        if i < len(levels) and any(g == h for h in levels[i].gens):
            return False
        if i == len(levels):
            moved = g.moved_points()
            levels.append(_Level(int(moved[0])))
        levels[i].gens.append(g)
        _rebuild_orbit(levels, i, degree)
        return True

    for g in generators:
        res = _sift(levels, g, 0)
        if res is not None:
            insert(*res)

    # close Schreier generators, working from the deepest level up; an
    # insertion at level j only invalidates levels <= j, so restart there
    big = degree > _VECTOR_DEGREE
    i = len(levels) - 1
    while i >= 0:
        _rebuild_orbit(levels, i, degree)
        lvl = levels[i]
        gens_i = [g for j in range(i, len(levels)) for g in levels[j].gens]
        tested: set[bytes] = set()
        inserted_at = None
        for x in lvl.points_sorted():
            ux = lvl.u(x, degree)
            for g in gens_i:
                y = g(x)
                uy = lvl.u(y, degree)
                sch = uy.inv() * (g * ux)
                key = _digest(sch._key) if big else sch._key
                if key in tested:
                    continue
                tested.add(key)
                res = _sift(levels, sch, i + 1)
                if res is not None and insert(*res):
                    inserted_at = res[0]
                    break
            if inserted_at is not None:
                break
        if inserted_at is not None:
            i = inserted_at
        else:
            i -= 1
    n = 1
    for lvl in levels:
        n *= max(lvl.size(), 1)
        if n > ORDER_CAP:
            raise BudgetError(f"group order exceeds cap {ORDER_CAP}")
    return levels


class PermGroup:
    """Finite permutation group with a lazily built deterministic chain."""

    def __init__(self, degree: int, generators: Iterable[Perm]):
        if degree < 1:
            raise ValueError("degree must be at least 1")
        if degree > DEGREE_CAP:
            raise BudgetError(f"degree {degree} exceeds cap {DEGREE_CAP}")
        gens = tuple(generators)
        for g in gens:
            if g.degree != degree:
                raise ValueError("generator degree mismatch")
        self.degree = degree
        self.generators = tuple(g for g in gens if not g.is_identity())
        self.chain: Optional[list[_Level]] = None
        self.order_cache: Optional[int] = None
        self._lock = threading.Lock()
        self._elements: Optional[list[Perm]] = None

    @staticmethod
    def trivial(degree: int = 1) -> "PermGroup":
        return PermGroup(degree, ())

    def _ensure_chain(self) -> list[_Level]:
        with self._lock:
            if self.chain is None:
                self.chain = _build_chain(self.degree, self.generators)
                n = 1
                for lvl in self.chain:
                    n *= max(lvl.size(), 1)
                self.order_cache = n
            return self.chain

    def identity(self) -> Perm:
        return Perm.identity(self.degree)

    def elements(self, cap: int = ELEMENT_CAP) -> list[Perm]:
        """All elements in BFS discovery order from the identity."""
        with self._lock:
            if self._elements is not None:
                return self._elements
        seen = {self.identity()._key}
        out = [self.identity()]
        frontier = [self.identity()]
        while frontier:
            nxt = []
            for x in frontier:
                for g in self.generators:
                    y = g * x
                    if y._key not in seen:
                        if len(out) >= cap:
                            raise BudgetError(f"element enumeration exceeds cap {cap}")
                        seen.add(y._key)
                        out.append(y)
                        nxt.append(y)
            frontier = nxt
        with self._lock:
            self._elements = out
        return out

    def __repr__(self) -> str:
        return f"PermGroup(degree={self.degree}, ngens={len(self.generators)})"


def order(G: PermGroup) -> int:
    G._ensure_chain()
    assert G.order_cache is not None
    return G.order_cache


def contains(G: PermGroup, g: Perm) -> bool:
    if g.degree != G.degree:
        raise ValueError(f"degree mismatch: group {G.degree}, perm {g.degree}")
    return _sift(G._ensure_chain(), g, 0) is None


class GroupHomPerm:
    """Homomorphism between permutation groups, given on generators.

    verified=True promises that every relator of a presentation of the
    source maps to the identity; operations that rely on h being a genuine
    homomorphism (kernel) insist on it.
    """

    def __init__(self, source: PermGroup, target: PermGroup,
                 gen_images: Sequence[Perm], verified: bool = False):
        gen_images = tuple(gen_images)
        if len(gen_images) != len(source.generators):
            raise ValueError("need one image per source generator")
        for im in gen_images:
            if im.degree != target.degree:
                raise ValueError("image degree mismatch")
        self.source = source
        self.target = target
        self.gen_images = gen_images
        self.verified = verified

    def apply_word(self, letters: Sequence[int]) -> Perm:
        """Evaluate a word in source generators (1-based signed letters)."""
        out = Perm.identity(self.target.degree)
        for ltr in letters:
            g = self.gen_images[abs(ltr) - 1]
            out = out * (g if ltr > 0 else g.inv())
        return out

    def apply(self, g: Perm) -> Perm:
        w = element_to_word(self.source, g)
        return self.apply_word(w.letters)

    def __repr__(self) -> str:
        return (f"GroupHomPerm({self.source.degree}->{self.target.degree}, "
                f"verified={self.verified})")


def image(h: GroupHomPerm) -> PermGroup:
    return PermGroup(h.target.degree, h.gen_images)


def kernel(h: GroupHomPerm) -> PermGroup:
    """Kernel via the coset-action trick: act on source points plus the
    image's element list (left multiplication through h), then take the
    pointwise stabilizer of the appended block."""
    if not h.verified:
        raise ValueError("kernel requires a verified homomorphism")
    img = image(h)
    elems = img.elements()
    index = {e._key: i for i, e in enumerate(elems)}
    d0 = h.source.degree
    m = len(elems)
    combined = []
    for g, gi in zip(h.source.generators, h.gen_images):
        imgs = np.empty(d0 + m, dtype=np.int32)
        imgs[:d0] = g.images
        for j, e in enumerate(elems):
            imgs[d0 + j] = d0 + index[(gi * e)._key]
        combined.append(Perm(imgs))
    prefix = list(range(d0, d0 + m))
    levels = _build_chain(d0 + m, combined, base_prefix=prefix)
    gens = []
    seen = set()
    for lvl in levels[m:]:
        for g in lvl.gens:
            if (g.images[d0:] != np.arange(d0, d0 + m, dtype=np.int32)).any():
                raise AssertionError("stabilizer level leaked image motion")
            rest = Perm(g.images[:d0])
            if not rest.is_identity() and rest._key not in seen:
                seen.add(rest._key)
                gens.append(rest)
    return PermGroup(d0, gens)


def element_to_word(G: PermGroup, g: Perm, cap: int = ELEMENT_CAP):
    """Minimal-length word for g over G's generators, BFS order with
    ties broken by generator index. Returns an fpres Word (1-based letters)."""
    from .fpres import Word

    if not contains(G, g):
        raise ValueError("element is not in the group")
    ident = G.identity()
    if g == ident:
        return Word(())
    words = {ident._key: ()}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            wx = words[x._key]
            for i, s in enumerate(G.generators):
                y = s * x
                if y._key not in words:
                    if len(words) >= cap:
                        raise BudgetError(f"word search exceeds cap {cap}")
                    words[y._key] = (i + 1,) + wx
                    if y == g:
                        return Word(words[y._key])
                    nxt.append(y)
        frontier = nxt
    raise AssertionError("unreachable: membership was checked")


def is_p_group(G: PermGroup, p: int) -> bool:
    if p < 2:
        raise ValueError("p must be a prime >= 2")
    n = order(G)
    while n % p == 0:
        n //= p
    return n == 1


def _normal_closure_in(G: PermGroup, seeds: list[Perm]) -> PermGroup:
    gens = []
    seen = set()
    for s in seeds:
        if not s.is_identity() and s._key not in seen:
            seen.add(s._key)
            gens.append(s)
    H = PermGroup(G.degree, gens)
    while True:
        new = []
        for g in G.generators:
            for h in H.generators:
                c = g * h * g.inv()
                if not contains(H, c):
                    new.append(c)
        if not new:
            return H
        H = PermGroup(G.degree, H.generators + tuple(new))


def derived_subgroup(G: PermGroup) -> PermGroup:
    gens = G.generators
    comms = []
    for i in range(len(gens)):
        for j in range(len(gens)):
            if i != j:
                a, b = gens[i], gens[j]
                comms.append(a * b * a.inv() * b.inv())
    return _normal_closure_in(G, comms)


def is_soluble(G: PermGroup) -> bool:
    H = G
    prev = order(H)
    while prev > 1:
        H = derived_subgroup(H)
        n = order(H)
        if n == prev:
            return False
        prev = n
    return True


def product_embedding(actions) -> PermGroup:
    """Subgroup of a direct product of targets generated by tuples of
    generator images, acting on the disjoint union of the domains.

    Each action is a GroupHomPerm or a plain sequence of Perms (the images
    of the common abstract generators in one target). Empty list gives the
    trivial group on one point.
    """
    tuples = []
    for a in actions:
        tuples.append(tuple(a.gen_images) if isinstance(a, GroupHomPerm) else tuple(a))
    if not tuples:
        return PermGroup.trivial(1)
    ngens = len(tuples[0])
    for t in tuples:
        if len(t) != ngens:
            raise ValueError("generator-count mismatch across factors")
    degrees = [t[0].degree if ngens else 1 for t in tuples]
    total = sum(degrees)
    if total > DEGREE_CAP:
        raise BudgetError(f"product degree {total} exceeds cap {DEGREE_CAP}")
    gens = []
    for k in range(ngens):
        imgs = np.empty(total, dtype=np.int32)
        off = 0
        for t, d in zip(tuples, degrees):
            imgs[off:off + d] = t[k].images + off
            off += d
        gens.append(Perm(imgs))
    return PermGroup(total, gens)


def subgroup_order(G: PermGroup, elems: Sequence[Perm]) -> int:
    """Order of the subgroup of G's symmetric group generated by elems."""
    if not elems:
        return 1
    return order(PermGroup(elems[0].degree, elems))


def orbit_partition(degree: int, elems: Sequence[Perm]) -> list[np.ndarray]:
    """Orbits of the group generated by elems, each a sorted point array."""
    parent = np.arange(degree, dtype=np.int64)

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for g in elems:
        for x in range(degree):
            ra, rb = find(x), find(int(g.images[x]))
            if ra != rb:
                parent[rb] = ra
    roots = np.array([find(x) for x in range(degree)])
    out = []
    for r in np.unique(roots):
        out.append(np.flatnonzero(roots == r))
    return out


def restrict_to_orbit(pts: np.ndarray, g: Perm) -> Perm:
    """g transported to the points of one of its invariant orbits."""
    return Perm(np.searchsorted(pts, g.images[pts]))


def generates_at_least(degree: int, elems: Sequence[Perm],
                       bound: int) -> bool:
    """Whether the group generated by elems has order at least bound.

    The restriction to a single orbit is a quotient of the group, so any
    orbit whose restriction already reaches the bound certifies it without
    a stabilizer chain on the full degree; the full chain is the fallback.
    """
    if bound <= 1:
        return True
    elems = [g for g in elems if not g.is_identity()]
    if not elems:
        return False
    orbits = sorted(orbit_partition(degree, elems), key=len)
    for pts in orbits:
        if len(pts) < 2:
            continue
        sub = PermGroup(len(pts), [restrict_to_orbit(pts, g) for g in elems])
        if order(sub) >= bound:
            return True
    return order(PermGroup(degree, elems)) >= bound


def group_to_text(G: PermGroup) -> str:
    lines = [f"degree {G.degree}"]
    if not G.generators:
        lines.append("()")
    for g in G.generators:
        lines.append(perm_to_text(g))
    return "\n".join(lines) + "\n"


def parse_group(text: str) -> PermGroup:
    """Parse the group file format: a degree header then one cycle-form
    generator per line. '#' starts a comment."""
    degree = None
    gens = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if degree is None:
            parts = line.split()
            if len(parts) != 2 or parts[0] != "degree":
                raise ValueError(f"expected 'degree N' header, got {raw!r}")
            degree = int(parts[1])
            if degree < 1:
                raise ValueError("degree must be positive")
            continue
        gens.append(parse_perm(line, degree))
    if degree is None:
        raise ValueError("empty group file")
    return PermGroup(degree, gens)

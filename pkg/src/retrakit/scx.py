"""Finite abstract simplicial complexes and the systolic largeness checks.

A simplex is a sorted tuple of distinct vertex identifiers.  Identifiers are
opaque: the only requirement is that any two vertices of the same complex
compare under ``<`` (file formats use strings; in-memory complexes may use
anything orderable).  Every derived ordering is lexicographic, so verdicts,
boundaries and cycle witnesses are deterministic.

A cycle witness is reported as the ordered vertex cycle, starting at its
smallest vertex and continuing toward the smaller of that vertex's two
cycle neighbours.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Optional

REASON_NOT_PURE = "not pure"
REASON_NOT_GALLERY_CONNECTED = "not gallery connected"
REASON_NON_NORMAL_LINK = "non-normal link"
REASON_EMPTY_BOUNDARY = "empty boundary"


def normalize_simplex(simplex) -> tuple:
    """Sort a simplex and reject empties and repeated vertices."""
    vs = tuple(sorted(simplex))
    if not vs:
        raise ValueError("empty simplex")
    for a, b in zip(vs, vs[1:]):
        if a == b:
            raise ValueError(f"repeated vertex {a!r} in simplex {vs!r}")
    return vs


class SimplicialComplex:
    """A finite abstract simplicial complex, stored by its maximal faces.

    The constructor accepts any iterable of simplices, drops duplicates and
    non-maximal entries, and precomputes the full (nonempty) face set, so
    membership queries answer for all faces.  Instances are immutable and
    hashable.
    """

    __slots__ = ("_facets", "_faces", "_vertices", "_adj")

    def __init__(self, facets: Iterable = ()):
        cand = {normalize_simplex(f) for f in facets}
        faces = set()
        kept = []
        for f in sorted(cand, key=lambda t: (-len(t), t)):
            if f in faces:
                continue
            kept.append(f)
            for r in range(1, len(f) + 1):
                faces.update(itertools.combinations(f, r))
        object.__setattr__(self, "_facets", tuple(sorted(kept)))
        object.__setattr__(self, "_faces", frozenset(faces))
        object.__setattr__(self, "_vertices",
                           tuple(sorted({v for f in kept for v in f})))
        object.__setattr__(self, "_adj", None)

    def __setattr__(self, name, value):
        raise AttributeError("SimplicialComplex is immutable")

    @property
    def facets(self) -> tuple:
        return self._facets

    @property
    def vertices(self) -> tuple:
        return self._vertices

    @property
    def dim(self) -> int:
        """Largest simplex dimension; -1 for the empty complex."""
        if not self._facets:
            return -1
        return max(len(f) for f in self._facets) - 1

    def is_empty(self) -> bool:
        return not self._facets

    def has_face(self, simplex) -> bool:
        return normalize_simplex(simplex) in self._faces

    def faces(self, d: int) -> tuple:
        """All d-dimensional faces, sorted."""
        return tuple(sorted(f for f in self._faces if len(f) == d + 1))

    def all_faces(self) -> tuple:
        """Every nonempty face, sorted by (dimension, lexicographic)."""
        return tuple(sorted(self._faces, key=lambda f: (len(f), f)))

    def face_counts(self) -> tuple:
        """Number of faces in each dimension 0..dim."""
        counts = [0] * (self.dim + 1)
        for f in self._faces:
            counts[len(f) - 1] += 1
        return tuple(counts)

    def adjacency(self) -> dict:
        """Vertex -> set of neighbours in the 1-skeleton (cached)."""
        if self._adj is None:
            adj = {v: set() for v in self._vertices}
            for u, v in self.faces(1):
                adj[u].add(v)
                adj[v].add(u)
            object.__setattr__(self, "_adj", adj)
        return self._adj

    def __eq__(self, other):
        if not isinstance(other, SimplicialComplex):
            return NotImplemented
        return self._facets == other._facets

    def __hash__(self):
        return hash(self._facets)

    def __repr__(self):
        return (f"SimplicialComplex({len(self._facets)} facets, "
                f"{len(self._vertices)} vertices, dim {self.dim})")


def link(K: SimplicialComplex, simplex) -> SimplicialComplex:
    """The link of a simplex: all faces disjoint from it whose union with
    it is again a face.  The link of the empty simplex is the complex
    itself."""
    s = tuple(sorted(simplex))
    if not s:
        return K
    if not K.has_face(s):
        raise ValueError(f"simplex {s!r} not in complex")
    sset = set(s)
    residues = []
    for f in K.facets:
        if sset.issubset(f):
            rest = tuple(v for v in f if v not in sset)
            if rest:
                residues.append(rest)
    return SimplicialComplex(residues)


def full_subcomplex(K: SimplicialComplex, vertices) -> SimplicialComplex:
    """The full (induced) subcomplex on a vertex subset."""
    vs = set(vertices)
    cand = []
    for f in K.facets:
        rest = tuple(v for v in f if v in vs)
        if rest:
            cand.append(rest)
    return SimplicialComplex(cand)


def union(K1: SimplicialComplex, K2: SimplicialComplex) -> SimplicialComplex:
    return SimplicialComplex(K1.facets + K2.facets)


def intersection(K1: SimplicialComplex, K2: SimplicialComplex) -> SimplicialComplex:
    a, b = K1, K2
    if len(a._faces) > len(b._faces):
        a, b = b, a
    return SimplicialComplex(f for f in a._faces if f in b._faces)


def is_subcomplex(A: SimplicialComplex, K: SimplicialComplex) -> bool:
    return all(f in K._faces for f in A.facets)


def cone(K: SimplicialComplex, apex) -> SimplicialComplex:
    """The cone over a complex with a fresh apex vertex."""
    if apex in K.vertices:
        raise ValueError(f"apex {apex!r} already a vertex")
    if K.is_empty():
        return SimplicialComplex([(apex,)])
    return SimplicialComplex([f + (apex,) for f in K.facets])


def barycentric_subdivision(K: SimplicialComplex) -> SimplicialComplex:
    """First barycentric subdivision.  Vertices of the result are the faces
    of the input, as sorted tuples; facets are the maximal flags."""
    facets = []
    for f in K.facets:
        for perm in itertools.permutations(f):
            facets.append(tuple(tuple(sorted(perm[:i]))
                                for i in range(1, len(f) + 1)))
    return SimplicialComplex(facets)


# ---------------------------------------------------------------------------
# blocks


class Block:
    """A normal chamber complex with nonempty boundary.

    ``sides`` are the codimension-1 faces lying in exactly one chamber and
    ``boundary`` is the subcomplex they span.  Build instances through
    validate_block, which checks every condition.
    """

    __slots__ = ("complex", "dim", "boundary", "sides")

    def __init__(self, complex: SimplicialComplex, dim: int,
                 boundary: SimplicialComplex, sides: tuple):
        self.complex = complex
        self.dim = dim
        self.boundary = boundary
        self.sides = sides

    @property
    def chambers(self) -> tuple:
        return self.complex.facets

    def __repr__(self):
        return (f"Block(dim {self.dim}, {len(self.chambers)} chambers, "
                f"{len(self.sides)} sides)")


class BlockCheck:
    """Outcome of validate_block: either a Block or a rejection reason."""

    __slots__ = ("block", "reason")

    def __init__(self, block: Optional[Block], reason: Optional[str]):
        self.block = block
        self.reason = reason

    def __bool__(self):
        return self.block is not None

    def __repr__(self):
        if self.block is not None:
            return f"BlockCheck({self.block!r})"
        return f"BlockCheck(rejected: {self.reason})"


def _chambers_gallery_connected(facets: tuple) -> bool:
    """Connectivity of the dual graph on top-dimensional faces, two being
    adjacent when they share a codimension-1 face."""
    if len(facets) <= 1:
        return True
    by_wall = {}
    for i, f in enumerate(facets):
        for wall in itertools.combinations(f, len(f) - 1):
            by_wall.setdefault(wall, []).append(i)
    seen = {0}
    queue = [0]
    while queue:
        i = queue.pop()
        for wall in itertools.combinations(facets[i], len(facets[i]) - 1):
            for j in by_wall[wall]:
                if j not in seen:
                    seen.add(j)
                    queue.append(j)
    return len(seen) == len(facets)


def validate_block(K: SimplicialComplex) -> BlockCheck:
    """Check the chamber-complex conditions and assemble the Block.

    Failure is a value: the result carries a machine-readable reason, one
    of "not pure", "not gallery connected", "non-normal link",
    "empty boundary".
    """
    dim = K.dim
    if any(len(f) != dim + 1 for f in K.facets):
        return BlockCheck(None, REASON_NOT_PURE)
    if not _chambers_gallery_connected(K.facets):
        return BlockCheck(None, REASON_NOT_GALLERY_CONNECTED)
    # normality: the link of every simplex must again be gallery connected.
    # Links of links are links of unions, so one flat pass over all faces
    # covers the recursion.  Links of dimension <= 0 are vacuously fine.
    for s in K.all_faces():
        if len(s) <= dim - 1:
            L = link(K, s)
            if L.dim >= 1 and not _chambers_gallery_connected(L.facets):
                return BlockCheck(None, REASON_NON_NORMAL_LINK)
    if dim < 1:
        return BlockCheck(None, REASON_EMPTY_BOUNDARY)
    wall_count = {}
    for f in K.facets:
        for wall in itertools.combinations(f, dim):
            wall_count[wall] = wall_count.get(wall, 0) + 1
    sides = tuple(sorted(w for w, c in wall_count.items() if c == 1))
    if not sides:
        return BlockCheck(None, REASON_EMPTY_BOUNDARY)
    boundary = SimplicialComplex(sides)
    return BlockCheck(Block(K, dim, boundary, sides), None)


def require_block(K: SimplicialComplex) -> Block:
    """validate_block, raising on rejection."""
    check = validate_block(K)
    if check.block is None:
        raise ValueError(f"not a block: {check.reason}")
    return check.block


# ---------------------------------------------------------------------------
# systoles and largeness


def _best_cycle(best, cand):
    key = (len(cand), cand)
    if best is None or key < (len(best), best):
        return cand
    return best


def systole_at_least(K: SimplicialComplex, k: int):
    """Decide whether every full subcomplex homeomorphic to a circle has at
    least k edges.  Returns (verdict, witness); the witness is the
    lexicographically least shortest offending cycle, or None.

    A triangle counts only when its 2-simplex is absent; longer cycles
    count when chordless.  A complex with no circle subcomplex at all
    passes for every k.
    """
    if k < 3:
        raise ValueError(f"k must be at least 3, got {k}")
    adj = K.adjacency()
    best = None
    if k >= 4:
        for u, v in K.faces(1):
            for w in sorted(adj[u] & adj[v]):
                if w > v and not K.has_face((u, v, w)):
                    best = _best_cycle(best, (u, v, w))
                    break
    if best is not None:
        return False, best
    if k >= 5:
        # Chordless cycles of length 4..k-1.  Paths grow only through
        # vertices larger than their start, which enumerates each cycle
        # from its smallest vertex; the closing constraint path[1] < w
        # fixes the direction.  Searching starts in increasing order, so
        # once a cycle of length L is found only strictly shorter ones
        # can still displace it.
        max_len = k - 1
        for p0 in K.vertices:
            if best is not None:
                max_len = len(best) - 1
                if max_len < 4:
                    break
            found = None
            stack = [(p0, q) for q in sorted(adj[p0], reverse=True) if q > p0]
            while stack:
                path = stack.pop()
                last = path[-1]
                interior = set(path[:-1])
                for w in sorted(adj[last], reverse=True):
                    if w <= p0 or w in path or w == last:
                        continue
                    hits = adj[w] & interior
                    if p0 in hits:
                        if len(hits) == 1 and len(path) >= 3 and path[1] < w:
                            if len(path) + 1 <= max_len:
                                found = _best_cycle(found, path + (w,))
                        continue
                    if hits:
                        continue
                    if len(path) + 1 <= max_len - 1:
                        stack.append(path + (w,))
            if found is not None:
                best = _best_cycle(best, found)
    return best is None, best


def largeness_report(K: SimplicialComplex, k: int):
    """Locate the first systole failure among K and all its links.

    Returns (verdict, failing_simplex, witness).  The failing simplex is ()
    when the complex itself fails, and None when nothing does.
    """
    if k < 4:
        raise ValueError(f"k must be at least 4, got {k}")
    ok, wit = systole_at_least(K, k)
    if not ok:
        return False, (), wit
    for s in K.all_faces():
        L = link(K, s)
        if L.dim < 1:
            continue
        ok, wit = systole_at_least(L, k)
        if not ok:
            return False, s, wit
    return True, None, None


def is_k_large(K: SimplicialComplex, k: int) -> bool:
    """True when the systole of the complex and of the link of every
    nonempty simplex is at least k."""
    return largeness_report(K, k)[0]


def is_flag(K: SimplicialComplex) -> bool:
    """True when every clique of the 1-skeleton spans a simplex."""
    adj = K.adjacency()
    stack = [(v,) for v in K.vertices]
    while stack:
        c = stack.pop()
        common = set.intersection(*(adj[v] for v in c)) if c else set()
        for w in common:
            if w <= c[-1]:
                continue
            ext = c + (w,)
            if not K.has_face(ext):
                return False
            stack.append(ext)
    return True


# ---------------------------------------------------------------------------
# file format: one facet per line, whitespace separated, '#' comments


def complex_to_text(K: SimplicialComplex, header: str = "") -> str:
    lines = []
    if header:
        for h in header.splitlines():
            lines.append(f"# {h}")
    for f in K.facets:
        parts = []
        for v in f:
            s = str(v)
            if not s or "#" in s or any(ch.isspace() for ch in s):
                raise ValueError(f"vertex {v!r} not printable in complex files")
            parts.append(s)
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def parse_complex(text: str) -> SimplicialComplex:
    facets = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        facets.append(tuple(line.split()))
    return SimplicialComplex(facets)

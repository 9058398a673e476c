"""Reduced mod-p simplicial cohomology, fixed subcomplexes, Helly shifts.

Everything here is finite and works over the field with p elements, where
cohomology and homology ranks agree, so all functions in this module report
reduced betti numbers computed from boundary-matrix ranks.  Augmented chain
complexes are used throughout: the degree-0 boundary map is the augmentation,
so a point has all ranks zero.

Fixed subcomplexes of a simplicial action live in the first barycentric
subdivision.  A vertex of the subdivision is a face of the original complex
(as a sorted tuple) and the fixed subcomplex is spanned by the faces that the
group keeps setwise invariant; one subdivision suffices because a chain of
faces mapped to itself is fixed degreewise.
"""

from __future__ import annotations

import itertools
from functools import reduce
from typing import Iterable, Optional, Sequence

import numpy as np

from .permcore import Perm
from .scx import (
    SimplicialComplex,
    barycentric_subdivision,
    cone,
    intersection,
    is_subcomplex,
    union,
)

SCOPE_NOTE = ("finite simplicial model: ranks are reduced cohomology "
              "dimensions over the p-element field")


def _require_prime(p: int):
    if p < 2 or any(p % d == 0 for d in range(2, int(p ** 0.5) + 1)):
        raise ValueError(f"p must be prime, got {p}")


def rank_mod_p(matrix, p: int) -> int:
    """Rank of an integer matrix over the p-element field, by Gaussian
    elimination with first-nonzero pivoting."""
    _require_prime(p)
    M = np.array(matrix, dtype=np.int64) % p
    rows, cols = M.shape
    rank = 0
    for c in range(cols):
        pivot = -1
        for r in range(rank, rows):
            if M[r, c]:
                pivot = r
                break
        if pivot < 0:
            continue
        if pivot != rank:
            M[[rank, pivot]] = M[[pivot, rank]]
        inv = pow(int(M[rank, c]), p - 2, p)
        M[rank] = (M[rank] * inv) % p
        if rank + 1 < rows:
            col = M[rank + 1:, c]
            hit = col.nonzero()[0]
            if hit.size:
                M[rank + 1 + hit] = (M[rank + 1 + hit]
                                     - np.outer(col[hit], M[rank])) % p
        rank += 1
        if rank == rows:
            break
    return rank


class ChainComplexFp:
    """An augmented chain complex over the p-element field.

    boundary_matrices[d] is the matrix of the boundary map out of degree d;
    index 0 holds the augmentation row.  Consecutive maps are checked to
    compose to zero.
    """

    __slots__ = ("p", "boundary_matrices")

    def __init__(self, p: int, boundary_matrices: Sequence):
        _require_prime(p)
        mats = tuple(np.array(M, dtype=np.int64) % p for M in boundary_matrices)
        for d, (A, B) in enumerate(zip(mats, mats[1:])):
            if A.shape[1] != B.shape[0]:
                raise ValueError(f"boundary shapes mismatch at degree {d + 1}")
            if ((A @ B) % p).any():
                raise ValueError(
                    f"boundary maps at degrees {d} and {d + 1} do not "
                    f"compose to zero mod {p}")
        self.p = p
        self.boundary_matrices = mats

    def reduced_ranks(self) -> tuple:
        ranks = [rank_mod_p(M, self.p) for M in self.boundary_matrices]
        out = []
        for d, M in enumerate(self.boundary_matrices):
            up = ranks[d + 1] if d + 1 < len(ranks) else 0
            out.append(M.shape[1] - ranks[d] - up)
        return tuple(out)


def chain_complex(K: SimplicialComplex, p: int) -> ChainComplexFp:
    """Assemble the augmented mod-p chain complex of a nonempty complex."""
    if K.is_empty():
        raise ValueError("empty complex has no augmented chain complex here")
    by_dim = [K.faces(d) for d in range(K.dim + 1)]
    index = [{f: i for i, f in enumerate(fs)} for fs in by_dim]
    mats = [np.ones((1, len(by_dim[0])), dtype=np.int64)]
    for d in range(1, K.dim + 1):
        M = np.zeros((len(by_dim[d - 1]), len(by_dim[d])), dtype=np.int64)
        for j, f in enumerate(by_dim[d]):
            for i in range(d + 1):
                M[index[d - 1][f[:i] + f[i + 1:]], j] = (-1) ** i % p
        mats.append(M)
    return ChainComplexFp(p, mats)


def reduced_betti(K: SimplicialComplex, p: int) -> tuple:
    """Reduced betti numbers over the p-element field, degrees 0..dim.

    The empty complex is rejected: its reduced cohomology sits in degree -1
    and is handled only inside helly_shift_check.
    """
    return chain_complex(K, p).reduced_ranks()


def is_mod_p_acyclic(K: SimplicialComplex, p: int) -> bool:
    """True when every reduced betti number vanishes."""
    return all(b == 0 for b in reduced_betti(K, p))


# ---------------------------------------------------------------------------
# simplicial actions and fixed subcomplexes


def _require_simplicial(K: SimplicialComplex, g: Perm):
    verts = K.vertices
    if g.degree != len(verts):
        raise ValueError(
            f"permutation degree {g.degree} does not match "
            f"{len(verts)} vertices")
    index = {v: i for i, v in enumerate(verts)}
    for f in K.facets:
        image = tuple(sorted(verts[g(index[v])] for v in f))
        if not K.has_face(image):
            raise ValueError(f"non-simplicial action: facet {f!r} maps to "
                             f"{image!r}")


def automorphism_from_vertex_map(K: SimplicialComplex, mapping: dict) -> Perm:
    """Turn a vertex dictionary into a checked automorphism permutation,
    acting on positions in K.vertices."""
    verts = K.vertices
    index = {v: i for i, v in enumerate(verts)}
    images = [0] * len(verts)
    for v in verts:
        if v not in mapping:
            raise ValueError(f"mapping misses vertex {v!r}")
        images[index[v]] = index[mapping[v]]
    g = Perm(images)
    _require_simplicial(K, g)
    return g


def induced_subdivision_action(K: SimplicialComplex, g: Perm):
    """The action induced on the first barycentric subdivision.

    Returns (subdivision, permutation of its vertices).
    """
    _require_simplicial(K, g)
    verts = K.vertices
    index = {v: i for i, v in enumerate(verts)}
    sd = barycentric_subdivision(K)
    sd_index = {v: i for i, v in enumerate(sd.vertices)}
    images = [0] * len(sd.vertices)
    for face, i in sd_index.items():
        image = tuple(sorted(verts[g(index[v])] for v in face))
        images[i] = sd_index[image]
    return sd, Perm(images)


def cone_action(K: SimplicialComplex, g: Perm, apex):
    """Extend an automorphism over the cone, fixing the apex.

    Returns (cone complex, permutation of its vertices).
    """
    _require_simplicial(K, g)
    C = cone(K, apex)
    verts = K.vertices
    index = {v: i for i, v in enumerate(verts)}
    c_index = {v: i for i, v in enumerate(C.vertices)}
    images = list(range(len(C.vertices)))
    for v in verts:
        images[c_index[v]] = c_index[verts[g(index[v])]]
    return C, Perm(images)


def _maximal_chains(nodes):
    """Maximal chains of a family of faces ordered by strict inclusion."""
    sets = {f: frozenset(f) for f in nodes}
    above = {}
    for f in nodes:
        fs = sets[f]
        above[f] = [g for g in nodes if len(g) > len(f) and fs < sets[g]]
    covers = {}
    has_below = set()
    for f in nodes:
        ups = above[f]
        covers[f] = [g for g in ups
                     if not any(sets[h] < sets[g] for h in ups if h is not g)]
        has_below.update(ups)
    chains = []
    stack = [(f,) for f in nodes if f not in has_below]
    while stack:
        chain = stack.pop()
        ups = covers[chain[-1]]
        if not ups:
            chains.append(chain)
            continue
        for g in ups:
            stack.append(chain + (g,))
    return chains


def fixed_subcomplex(K: SimplicialComplex,
                     generators: Iterable[Perm]) -> SimplicialComplex:
    """The fixed subcomplex of the group generated by vertex permutations.

    The result lives in the first barycentric subdivision: its vertices are
    the setwise-invariant faces of K and its facets are the maximal chains
    of such faces.  It triangulates the topological fixed-point set.
    """
    gens = tuple(generators)
    for g in gens:
        _require_simplicial(K, g)
    if K.is_empty():
        return SimplicialComplex()
    verts = K.vertices
    index = {v: i for i, v in enumerate(verts)}
    invariant = []
    for f in K.all_faces():
        idx = frozenset(index[v] for v in f)
        if all(frozenset(g(i) for i in idx) == idx for g in gens):
            invariant.append(f)
    if not invariant:
        return SimplicialComplex()
    return SimplicialComplex(_maximal_chains(invariant))


# ---------------------------------------------------------------------------
# the Helly degree shift


class HellyVerdict:
    """Outcome of helly_shift_check.

    hypothesis_ok reports whether every proper sub-intersection is mod-p
    acyclic; when it fails the shift is not evaluated and shift_ok is None.
    Betti vectors are None for empty complexes; the reduced cohomology of an
    empty intersection is taken as one dimension in degree -1.
    """

    __slots__ = ("n", "p", "hypothesis_ok", "failing_subsets",
                 "union_betti", "intersection_betti", "intersection_empty",
                 "shift_ok", "scope")

    def __init__(self, n, p, hypothesis_ok, failing_subsets, union_betti,
                 intersection_betti, intersection_empty, shift_ok):
        self.n = n
        self.p = p
        self.hypothesis_ok = hypothesis_ok
        self.failing_subsets = failing_subsets
        self.union_betti = union_betti
        self.intersection_betti = intersection_betti
        self.intersection_empty = intersection_empty
        self.shift_ok = shift_ok
        self.scope = SCOPE_NOTE

    @property
    def ok(self) -> bool:
        return self.hypothesis_ok and self.shift_ok is True

    def __repr__(self):
        if not self.hypothesis_ok:
            return (f"HellyVerdict(n={self.n}, p={self.p}, hypothesis failed "
                    f"on {self.failing_subsets})")
        return (f"HellyVerdict(n={self.n}, p={self.p}, "
                f"shift_ok={self.shift_ok})")


def _rank_in_degree(empty: bool, betti, m: int) -> int:
    if empty:
        return 1 if m == -1 else 0
    if 0 <= m < len(betti):
        return betti[m]
    return 0


def helly_shift_check(X: SimplicialComplex, Ys: Sequence[SimplicialComplex],
                      p: int) -> HellyVerdict:
    """Verify the degree shift between a union and its full intersection.

    Checks that every proper sub-intersection of the given closed
    subcomplexes of X is mod-p acyclic, then compares reduced ranks of
    Y = union(Ys) and A = intersection(Ys) under the degree shift n-1:
    rank H^m(Y) must equal rank H^(m-n+1)(A) for every m.
    """
    _require_prime(p)
    n = len(Ys)
    if n == 0:
        raise ValueError("need at least one subcomplex")
    for i, Y in enumerate(Ys):
        if not is_subcomplex(Y, X):
            raise ValueError(f"entry {i} is not a subcomplex of the ambient "
                             f"complex")

    def acyclic(K):
        return not K.is_empty() and all(b == 0 for b in reduced_betti(K, p))

    failing = []
    for size in range(1, n):
        for subset in itertools.combinations(range(n), size):
            part = reduce(intersection, (Ys[i] for i in subset))
            if not acyclic(part):
                failing.append(subset)
    hypothesis_ok = not failing

    Y = reduce(union, Ys)
    A = reduce(intersection, Ys)
    y_empty, a_empty = Y.is_empty(), A.is_empty()
    union_betti = None if y_empty else reduced_betti(Y, p)
    intersection_betti = None if a_empty else reduced_betti(A, p)

    shift_ok = None
    if hypothesis_ok:
        top = max(Y.dim, A.dim + n - 1, 0) + 1
        shift_ok = all(
            _rank_in_degree(y_empty, union_betti, m)
            == _rank_in_degree(a_empty, intersection_betti, m - n + 1)
            for m in range(-2, top + 1))
    return HellyVerdict(n, p, hypothesis_ok, tuple(failing), union_betti,
                        intersection_betti, a_empty, shift_ok)

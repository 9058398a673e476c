"""Words, finite presentations, bounded coset enumeration.

Letters are 1-based signed generator indices: +k means generator k-1,
-k its inverse. Presentations normalize relators to freely and
cyclically reduced form at construction.
"""

from __future__ import annotations

from typing import Optional, Sequence

from .permcore import GroupHomPerm, Perm, PermGroup, contains, order

TC_VERIFY_CAP = 4096


class Word:
    """An ordered list of signed generator indices."""

    __slots__ = ("letters",)

    def __init__(self, letters: Sequence[int] = ()):
        letters = tuple(int(x) for x in letters)
        if any(x == 0 for x in letters):
            raise ValueError("letter 0 is not a valid signed index")
        object.__setattr__(self, "letters", letters)

    def __setattr__(self, name, value):
        raise AttributeError("Word is immutable")

    def __len__(self) -> int:
        return len(self.letters)

    def __eq__(self, other) -> bool:
        return isinstance(other, Word) and self.letters == other.letters

    def __hash__(self) -> int:
        return hash(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def inv(self) -> "Word":
        return Word(tuple(-x for x in reversed(self.letters)))

    def __repr__(self) -> str:
        return f"Word({list(self.letters)})"


def free_reduce(w: Word) -> Word:
    stack: list[int] = []
    for x in w.letters:
        if stack and stack[-1] == -x:
            stack.pop()
        else:
            stack.append(x)
    return Word(tuple(stack))


def cyclic_reduce(w: Word) -> Word:
    w = free_reduce(w)
    ltrs = list(w.letters)
    while len(ltrs) >= 2 and ltrs[0] == -ltrs[-1]:
        ltrs = ltrs[1:-1]
    return Word(tuple(ltrs))


def evaluate_word(w: Word, images: Sequence[Perm], degree: int) -> Perm:
    out = Perm.identity(degree)
    for x in w.letters:
        g = images[abs(x) - 1]
        out = out * (g if x > 0 else g.inv())
    return out


class Presentation:
    """Finite presentation on named generators."""

    def __init__(self, generator_names: Sequence[str], relators: Sequence[Word]):
        names = tuple(generator_names)
        if len(set(names)) != len(names):
            raise ValueError("generator names must be distinct")
        self.generator_names = names
        norm = []
        seen = set()
        for r in relators:
            for x in r.letters:
                if abs(x) > len(names):
                    raise ValueError(f"letter {x} references no declared generator")
            rr = cyclic_reduce(r)
            if rr.letters and rr.letters not in seen:
                seen.add(rr.letters)
                norm.append(rr)
        self.relators = tuple(norm)

    def __repr__(self) -> str:
        return (f"Presentation(gens={list(self.generator_names)}, "
                f"nrel={len(self.relators)})")


def hom_from_images_exists(P: Presentation, target: PermGroup,
                           images: Sequence[Perm],
                           source: Optional[PermGroup] = None
                           ) -> Optional[GroupHomPerm]:
    """Verified homomorphism from the presented group iff every relator
    dies in the target. When no source group is supplied, the image
    subgroup stands in as the source carrier."""
    images = list(images)
    if len(images) != len(P.generator_names):
        raise ValueError("need one image per presentation generator")
    for im in images:
        if im.degree != target.degree:
            raise ValueError("image degree inconsistent with target")
    for r in P.relators:
        if not evaluate_word(r, images, target.degree).is_identity():
            return None
    if source is None:
        source = PermGroup(target.degree, images)
        # align: PermGroup drops identity generators, so rebuild images list
        return GroupHomPerm(source, target, source.generators, verified=True)
    if len(source.generators) != len(images):
        raise ValueError("source generators do not align with presentation")
    return GroupHomPerm(source, target, images, verified=True)


def present_finite_group(G: PermGroup, gens: Optional[Sequence[Perm]] = None,
                         names: Optional[Sequence[str]] = None,
                         verify: bool = True) -> Presentation:
    """Cayley-graph presentation of G on the given generators: one relator
    per non-tree edge of a breadth-first spanning tree, no simplification.
    """
    gens = list(G.generators if gens is None else gens)
    if not gens:
        return Presentation(names or (), ())
    H = PermGroup(G.degree, gens)
    if order(H) != order(G):
        raise ValueError("selected generators do not generate the group")
    if names is None:
        names = tuple(f"g{i}" for i in range(len(gens)))
    if len(names) != len(gens):
        raise ValueError("one name per generator")

    ident = Perm.identity(G.degree)
    words: dict[bytes, tuple[int, ...]] = {ident._key: ()}
    elems: dict[bytes, Perm] = {ident._key: ident}
    frontier = [ident]
    relators: list[Word] = []
    while frontier:
        nxt = []
        for x in frontier:
            wx = words[x._key]
            for i, g in enumerate(gens):
                y = g * x
                if y._key not in words:
                    words[y._key] = (i + 1,) + wx
                    elems[y._key] = y
                    nxt.append(y)
                else:
                    wy = words[y._key]
                    rel = Word(tuple(-v for v in reversed(wy)) + (i + 1,) + wx)
                    relators.append(rel)
        frontier = nxt
    P = Presentation(names, relators)
    if verify:
        if hom_from_images_exists(P, G, gens, source=H) is None:
            raise AssertionError("extracted relators fail on the source group")
        if order(G) <= TC_VERIFY_CAP:
            table = todd_coxeter_bounded(P, [], max_cosets=2 * order(G) + 8)
            if table is None or table.num_cosets != order(G):
                raise AssertionError("presented order disagrees with group order")
    return P


class CosetTable:
    """Completed coset table: per-generator permutations of cosets."""

    def __init__(self, num_cosets: int, action: Sequence[Perm], complete: bool):
        self.num_cosets = num_cosets
        self.action = tuple(action)
        self.complete = complete

    def __repr__(self) -> str:
        return f"CosetTable(num_cosets={self.num_cosets}, complete={self.complete})"


def todd_coxeter_bounded(P: Presentation, subgroup: Sequence[Word],
                         max_cosets: int) -> Optional[CosetTable]:
    """HLT coset enumeration, relator-driven, no lookahead, cosets numbered
    by first definition. Returns None once more than max_cosets live cosets
    would be needed; that is resource exhaustion, not a verdict.
    """
    if max_cosets < 1:
        raise ValueError("max_cosets must be at least 1")
    ngens = len(P.generator_names)
    ncols = 2 * ngens

    def col(letter: int) -> int:
        return 2 * (letter - 1) if letter > 0 else 2 * (-letter - 1) + 1

    def inv_col(c: int) -> int:
        return c ^ 1

    table: list[list[Optional[int]]] = [[None] * ncols]
    parent = [0]  # union-find for coincidences
    live_count = 1

    def find(c: int) -> int:
        while parent[c] != c:
            parent[c] = parent[parent[c]]
            c = parent[c]
        return c

    def define(c: int, cc: int) -> Optional[int]:
        nonlocal live_count
        if live_count >= max_cosets:
            return None
        d = len(table)
        table.append([None] * ncols)
        parent.append(d)
        table[c][cc] = d
        table[d][inv_col(cc)] = c
        live_count += 1
        return d

    pending: list[tuple[int, int]] = []

    def merge(a: int, b: int) -> None:
        a, b = find(a), find(b)
        if a != b:
            if a > b:
                a, b = b, a
            parent[b] = a
            pending.append((a, b))

    def process_coincidences() -> None:
        nonlocal live_count
        while pending:
            a, b = pending.pop()
            a = find(a)
            live_count -= 1
            row = table[b]
            # transfer the dead row; stale entries elsewhere resolve via find
            for cc in range(ncols):
                d = row[cc]
                if d is None:
                    continue
                d = find(d)
                cur = table[a][cc]
                if cur is None:
                    table[a][cc] = d
                    back = table[d][inv_col(cc)]
                    if back is None:
                        table[d][inv_col(cc)] = a
                    elif find(back) != a:
                        merge(back, a)
                elif find(cur) != d:
                    merge(cur, d)

    def set_entry(f: int, cc: int, b: int) -> None:
        table[f][cc] = b
        back = table[b][inv_col(cc)]
        if back is None:
            table[b][inv_col(cc)] = f
        elif find(back) != f:
            merge(back, f)
            process_coincidences()

    def scan_and_fill(start: int, letters: Sequence[int]) -> bool:
        """Scan word at coset start, defining cosets to close it.
        Returns False when the coset budget runs out."""
        n = len(letters)
        while True:
            start = find(start)
            f, i = start, 0
            while i < n:
                nxt = table[f][col(letters[i])]
                if nxt is None:
                    break
                f, i = find(nxt), i + 1
            if i == n:
                if f != start:
                    merge(f, start)
                    process_coincidences()
                return True
            # f sits before letters[i]; trace backward from the end
            b, j = start, n
            while j > i:
                prv = table[b][inv_col(col(letters[j - 1]))]
                if prv is None:
                    break
                b, j = find(prv), j - 1
            if j == i:
                # both scans reached position i: closure forces f = b
                if f != b:
                    merge(f, b)
                    process_coincidences()
                return True
            if j == i + 1:
                # one-letter gap: deduce the bridging entry, scan closes
                set_entry(f, col(letters[i]), b)
                return True
            d = define(f, col(letters[i]))
            if d is None:
                return False

    for w in subgroup:
        if not scan_and_fill(0, free_reduce(w).letters):
            return None

    c = 0
    while c < len(table):
        if find(c) != c:
            c += 1
            continue
        for r in P.relators:
            if not scan_and_fill(c, r.letters):
                return None
            if find(c) != c:
                break  # this coset merged away mid-scan
        if find(c) == c:
            # fill any columns no relator touched so the table can complete
            for cc in range(ncols):
                if table[c][cc] is None:
                    d = define(c, cc)
                    if d is None:
                        return None
        c += 1

    live = [c for c in range(len(table)) if find(c) == c]
    renum = {c: i for i, c in enumerate(live)}
    m = len(live)
    action = []
    for gi in range(ngens):
        imgs = []
        for c in live:
            d = table[c][2 * gi]
            if d is None:
                raise AssertionError("incomplete row survived enumeration")
            imgs.append(renum[find(d)])
        action.append(Perm(imgs) if m else Perm.identity(1))
    return CosetTable(m, action, complete=True)


def presentation_to_text(P: Presentation) -> str:
    """Serialize with single-letter juxtaposition; uppercase = inverse.
    Generator names that are not single lowercase letters are re-lettered
    a, b, c ... in order (at most 26 supported by this format)."""
    n = len(P.generator_names)
    if n > 26:
        raise ValueError("juxtaposition format supports at most 26 generators")
    ok = all(len(s) == 1 and s.islower() for s in P.generator_names)
    letters = list(P.generator_names) if ok else [chr(ord("a") + i) for i in range(n)]
    lines = ["gens: " + " ".join(letters)]
    for r in P.relators:
        lines.append("".join(
            letters[x - 1] if x > 0 else letters[-x - 1].upper()
            for x in r.letters))
    return "\n".join(lines) + "\n"


def parse_presentation(text: str) -> Presentation:
    names: Optional[list[str]] = None
    relators = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if names is None:
            if not line.startswith("gens:"):
                raise ValueError(f"expected 'gens:' header, got {raw!r}")
            names = line[len("gens:"):].split()
            for s in names:
                if len(s) != 1 or not s.islower():
                    raise ValueError(f"generator name {s!r} is not a lowercase letter")
            continue
        idx = {s: i + 1 for i, s in enumerate(names)}
        letters = []
        for ch in line:
            if ch.islower():
                if ch not in idx:
                    raise ValueError(f"unknown generator {ch!r}")
                letters.append(idx[ch])
            elif ch.isupper():
                if ch.lower() not in idx:
                    raise ValueError(f"unknown generator {ch!r}")
                letters.append(-idx[ch.lower()])
            else:
                raise ValueError(f"bad character {ch!r} in relator {line!r}")
        relators.append(Word(letters))
    if names is None:
        raise ValueError("empty presentation file")
    return Presentation(names, relators)


def word_order_in(images: Sequence[Perm], degree: int, w: Word) -> int:
    return evaluate_word(w, images, degree).order()


def generator_word(i: int) -> Word:
    """Single-letter word for generator index i (0-based)."""
    return Word((i + 1,))

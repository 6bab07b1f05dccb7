"""Simply-laced root systems and their Weyl groups.

Everything is exact: roots and weights live in simple-root coordinates
(ints, or ``fractions.Fraction`` for weight-lattice points), Weyl elements
carry the integer matrix of their action on those coordinates together with a
reduced word.

Node numbering of the Dynkin diagrams (1-based in documentation and CLI
output, 0-based in code):

* A_r: the path 1 - 2 - ... - r.
* D_r: the path 1 - ... - (r-2) with both r-1 and r attached to r-2.
* E_6/E_7/E_8: the path 1 - 3 - 4 - 5 - 6 (- 7 (- 8)) with 2 attached to 4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import GroupTooLarge, UnsupportedType

DEFAULT_GROUP_CAP = 10**6

_E_DATA = {
    6: (36, 51840),
    7: (63, 2903040),
    8: (120, 696729600),
}


def _edges(family: str, rank: int) -> list[tuple[int, int]]:
    if family == "A":
        if rank < 1:
            raise UnsupportedType(f"A_{rank}")
        return [(i, i + 1) for i in range(rank - 1)]
    if family == "D":
        if rank < 4:
            raise UnsupportedType(f"D_{rank} (use A_3 for the rank-3 coincidence)")
        chain = [(i, i + 1) for i in range(rank - 3)]
        return chain + [(rank - 3, rank - 2), (rank - 3, rank - 1)]
    if family == "E":
        if rank not in (6, 7, 8):
            raise UnsupportedType(f"E_{rank}")
        chain = [(0, 2), (2, 3), (3, 4), (4, 5)]
        chain += [(5, 6)] if rank >= 7 else []
        chain += [(6, 7)] if rank == 8 else []
        return chain + [(1, 3)]
    raise UnsupportedType(f"family {family!r}")


def weyl_order(family: str, rank: int) -> int:
    if family == "A":
        return math.factorial(rank + 1)
    if family == "D":
        return 2 ** (rank - 1) * math.factorial(rank)
    return _E_DATA[rank][1]


def positive_root_count(family: str, rank: int) -> int:
    if family == "A":
        return rank * (rank + 1) // 2
    if family == "D":
        return rank * (rank - 1)
    return _E_DATA[rank][0]


def _mat_mul(a, b):
    n = len(a)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n))
        for i in range(n)
    )


def _mat_vec(a, v):
    return tuple(sum(row[j] * v[j] for j in range(len(v))) for row in a)


def _identity(n):
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


@dataclass(frozen=True)
class RootSystem:
    family: str
    rank: int
    adjacency: tuple  # tuple[frozenset[int]]
    cartan: tuple  # tuple[tuple[int, ...], ...]
    positive_roots: tuple  # tuple[tuple[int, ...], ...] sorted by (height, lex)
    reflections: tuple  # simple-reflection matrices on root coordinates
    rho: tuple  # Fractions, root coordinates
    order: int

    # -- basic geometry ------------------------------------------------------

    def height(self, coords: Sequence) -> int:
        return sum(coords)

    def pairing(self, left: Sequence, right: Sequence):
        """<left, right> in root coordinates (simply laced: roots = coroots)."""
        return sum(
            l * r for l, r in zip(_mat_vec(self.cartan, tuple(left)), right)
        )

    def coroot_pairing(self, coords: Sequence, i: int):
        """<coords, alpha_i-check> = (C . coords)_i."""
        return sum(self.cartan[i][j] * coords[j] for j in range(self.rank))

    def is_dominant(self, coords: Sequence) -> bool:
        return all(self.coroot_pairing(coords, i) >= 0 for i in range(self.rank))

    def reflect(self, i: int, coords: Sequence) -> tuple:
        c = self.coroot_pairing(coords, i)
        return tuple(v - c * int(j == i) for j, v in enumerate(coords))

    def fundamental_weight(self, i: int) -> tuple:
        """Root coordinates of the i-th fundamental weight (exact)."""
        return _fundamental_weights(self)[i]

    def simple_root(self, i: int) -> tuple:
        return tuple(int(j == i) for j in range(self.rank))

    def antidominant(self, coords: Sequence) -> tuple:
        """The minimal element w0 . coords of the orbit (reflect down to it)."""
        v = tuple(coords)
        while True:
            for i in range(self.rank):
                if self.coroot_pairing(v, i) > 0:
                    v = self.reflect(i, v)
                    break
            else:
                return v

    def descriptor(self) -> dict:
        return {
            "schema": "wmds/rootsystem/v1",
            "family": self.family,
            "rank": self.rank,
            "nodes": list(range(1, self.rank + 1)),
            "edges": sorted([a + 1, b + 1] for a, b in _edges(self.family, self.rank)),
            "cartan": [list(row) for row in self.cartan],
            "positive_roots": [list(r) for r in self.positive_roots],
            "weyl_order": self.order,
        }

    def __str__(self) -> str:
        return f"{self.family}{self.rank}"


_ROOT_SYSTEMS: dict = {}
_FUNDAMENTAL: dict = {}


def root_system(family: str, rank: int) -> RootSystem:
    """Build (and cache) the root system of the given simply-laced type."""
    key = (family, rank)
    cached = _ROOT_SYSTEMS.get(key)
    if cached is not None:
        return cached

    edges = _edges(family, rank)
    adjacency = [set() for _ in range(rank)]
    for a, b in edges:
        adjacency[a].add(b)
        adjacency[b].add(a)
    cartan = tuple(
        tuple(2 if i == j else (-1 if j in adjacency[i] else 0) for j in range(rank))
        for i in range(rank)
    )
    reflections = tuple(
        tuple(
            tuple(int(k == j) - int(k == i) * cartan[i][j] for j in range(rank))
            for k in range(rank)
        )
        for i in range(rank)
    )

    # Positive roots: close the simple roots under the simple reflections,
    # keeping the vectors with nonnegative coordinates.
    seen = {tuple(int(j == i) for j in range(rank)) for i in range(rank)}
    frontier = list(seen)
    while frontier:
        nxt = []
        for v in frontier:
            for i in range(rank):
                w = _mat_vec(reflections[i], v)
                if w not in seen and all(c >= 0 for c in w):
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    roots = tuple(sorted(seen, key=lambda v: (sum(v), v)))
    expected = positive_root_count(family, rank)
    if len(roots) != expected:
        raise AssertionError(
            f"{family}{rank}: closure found {len(roots)} positive roots, expected {expected}"
        )

    rho = _solve_weight(cartan, (1,) * rank)
    rs = RootSystem(
        family=family,
        rank=rank,
        adjacency=tuple(frozenset(s) for s in adjacency),
        cartan=cartan,
        positive_roots=roots,
        reflections=reflections,
        rho=rho,
        order=weyl_order(family, rank),
    )
    _ROOT_SYSTEMS[key] = rs
    return rs


def _solve_weight(cartan, pairings) -> tuple:
    """Root coordinates of the weight with <w, alpha_i-check> = pairings[i]."""
    n = len(cartan)
    aug = [[Fraction(cartan[i][j]) for j in range(n)] + [Fraction(pairings[i])] for i in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [v - f * w for v, w in zip(aug[r], aug[col])]
    return tuple(row[n] for row in aug)


def _fundamental_weights(rs: RootSystem) -> tuple:
    key = (rs.family, rs.rank)
    cached = _FUNDAMENTAL.get(key)
    if cached is None:
        cached = tuple(
            _solve_weight(rs.cartan, tuple(int(j == i) for j in range(rs.rank)))
            for i in range(rs.rank)
        )
        _FUNDAMENTAL[key] = cached
    return cached


@dataclass(frozen=True)
class WeylElt:
    """A Weyl group element: reduced word plus exact matrices.

    ``word`` is a tuple of 0-based generator indices; the element is the
    product of the corresponding simple reflections applied left to right, so
    ``act`` applies the last letter to the vector first.
    """

    word: tuple
    mat: tuple
    inv: tuple

    @property
    def length(self) -> int:
        return len(self.word)

    @property
    def sign(self) -> int:
        return -1 if self.length % 2 else 1

    def act(self, coords: Sequence) -> tuple:
        return _mat_vec(self.mat, tuple(coords))

    def act_inverse(self, coords: Sequence) -> tuple:
        return _mat_vec(self.inv, tuple(coords))

    def word_label(self) -> str:
        """1-based word string, e.g. '121'; 'id' for the identity."""
        if not self.word:
            return "id"
        return "".join(str(i + 1) for i in self.word)

    def inversions(self, rs: RootSystem) -> tuple:
        """Indices (into rs.positive_roots) of alpha > 0 with w.alpha < 0."""
        out = []
        for idx, alpha in enumerate(rs.positive_roots):
            img = _mat_vec(self.mat, alpha)
            if any(c < 0 for c in img):
                out.append(idx)
        return tuple(out)

    def right_descents(self, rs: RootSystem) -> tuple:
        """Generators i with length(w s_i) < length(w)."""
        out = []
        for i in range(rs.rank):
            col = tuple(self.mat[k][i] for k in range(rs.rank))
            if any(c < 0 for c in col):
                out.append(i)
        return tuple(out)

    def left_descents(self, rs: RootSystem) -> tuple:
        out = []
        for i in range(rs.rank):
            col = tuple(self.inv[k][i] for k in range(rs.rank))
            if any(c < 0 for c in col):
                out.append(i)
        return tuple(out)


class WeylGroup:
    """Fully enumerated Weyl group, ordered by (length, lexicographic word)."""

    def __init__(self, rs: RootSystem, elements: list):
        self.rs = rs
        self.elements = elements
        self._by_mat = {e.mat: e for e in elements}

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def identity(self) -> WeylElt:
        return self.elements[0]

    def longest(self) -> WeylElt:
        return self.elements[-1]

    def from_mat(self, mat) -> WeylElt:
        return self._by_mat[mat]

    def from_word(self, word: Iterable[int]) -> WeylElt:
        mat = _identity(self.rs.rank)
        for i in word:
            mat = _mat_mul(mat, self.rs.reflections[i])
        return self._by_mat[mat]

    def inverse(self, w: WeylElt) -> WeylElt:
        return self._by_mat[w.inv]

    def mul_gen(self, w: WeylElt, i: int, left: bool = False) -> WeylElt:
        """w * s_i (or s_i * w when ``left``)."""
        s = self.rs.reflections[i]
        mat = _mat_mul(s, w.mat) if left else _mat_mul(w.mat, s)
        return self._by_mat[mat]

    def coset_max(self, w: WeylElt, parabolic: Iterable[int]) -> WeylElt:
        """The unique longest element of the coset w * W_P.

        Greedy ascent: keep appending parabolic generators while the length
        grows; the maximal-length coset element is the unique fixed point.
        """
        gens = tuple(parabolic)
        cur = w
        while True:
            for i in gens:
                # length increases iff cur . alpha_i > 0
                col = tuple(cur.mat[k][i] for k in range(self.rs.rank))
                if all(c >= 0 for c in col):
                    cur = self.mul_gen(cur, i)
                    break
            else:
                return cur


_WEYL_GROUPS: dict = {}


def enumerate_weyl(rs: RootSystem, cap: int = DEFAULT_GROUP_CAP) -> WeylGroup:
    """Enumerate W by BFS on reduced words, deduplicating on the matrix.

    Raises GroupTooLarge when |W| exceeds ``cap`` (checked up front from the
    closed-form order, so no partial enumeration is attempted).
    """
    if rs.order > cap:
        raise GroupTooLarge(
            f"|W({rs})| = {rs.order} exceeds the cap {cap}; raise the cap to proceed"
        )
    key = (rs.family, rs.rank)
    cached = _WEYL_GROUPS.get(key)
    if cached is not None:
        return cached

    ident = WeylElt(word=(), mat=_identity(rs.rank), inv=_identity(rs.rank))
    elements = [ident]
    seen = {ident.mat}
    level = [ident]
    while level:
        nxt = []
        for w in level:
            for i in range(rs.rank):
                # keep only length-increasing products: w . alpha_i > 0
                col = tuple(w.mat[k][i] for k in range(rs.rank))
                if any(c < 0 for c in col):
                    continue
                mat = _mat_mul(w.mat, rs.reflections[i])
                if mat in seen:
                    continue
                seen.add(mat)
                child = WeylElt(
                    word=w.word + (i,),
                    mat=mat,
                    inv=_mat_mul(rs.reflections[i], w.inv),
                )
                nxt.append(child)
        nxt.sort(key=lambda e: e.word)
        elements.extend(nxt)
        level = nxt
    if len(elements) != rs.order:
        raise AssertionError(
            f"BFS enumerated {len(elements)} elements of W({rs}), expected {rs.order}"
        )
    group = WeylGroup(rs, elements)
    _WEYL_GROUPS[key] = group
    return group


# -- twisted weights ---------------------------------------------------------


def twist_shifted_weight(rs: RootSystem, ell: Sequence[int]) -> tuple:
    """Root coordinates of rho + sum_i ell_i * (i-th fundamental weight).

    This is the dominant weight whose i-th coroot pairing is ell_i + 1.
    """
    if len(ell) != rs.rank:
        raise UnsupportedType(f"twist {ell} for rank {rs.rank}")
    if any(l < 0 for l in ell):
        raise UnsupportedType(f"twist entries must be nonnegative: {ell}")
    return _solve_weight(rs.cartan, tuple(l + 1 for l in ell))


def twist_pairing(ell: Sequence[int], coords: Sequence) -> int:
    """<theta, mu> where theta is the twist-shifted weight and mu has the
    given root coordinates: sum_i (ell_i + 1) * mu_i."""
    total = sum((l + 1) * c for l, c in zip(ell, coords))
    if isinstance(total, Fraction):
        if total.denominator != 1:
            raise ValueError(f"non-integral pairing {total}")
        return int(total)
    return int(total)


def dominant_weights_below(rs: RootSystem, theta: Sequence) -> list:
    """Dominant weights <= theta congruent to theta mod the root lattice.

    These are exactly the dominant weights of the irreducible representation
    with highest weight theta, sorted by descending height (so any prefix is
    closed upward in the dominance order).
    """
    theta = tuple(Fraction(c) for c in theta)
    bottom = rs.antidominant(theta)
    box = tuple(theta[i] - bottom[i] for i in range(rs.rank))
    if any(b.denominator != 1 for b in box):
        raise AssertionError(f"non-integral orbit span {box}")
    box = tuple(int(b) for b in box)

    found = []

    def rec(i, drop):
        if i == rs.rank:
            xi = tuple(theta[j] - drop[j] for j in range(rs.rank))
            if rs.is_dominant(xi):
                found.append(xi)
            return
        for c in range(box[i] + 1):
            rec(i + 1, drop + (c,))

    rec(0, ())
    found.sort(key=lambda xi: (-sum(xi), xi))
    return found


def stabilizer_generators(rs: RootSystem, xi: Sequence) -> tuple:
    """Simple reflections fixing xi (a parabolic generating set)."""
    return tuple(i for i in range(rs.rank) if rs.coroot_pairing(xi, i) == 0)

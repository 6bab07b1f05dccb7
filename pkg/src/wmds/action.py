"""Twisted Weyl-group action on rational functions.

The objects here are rational functions in x_1..x_r over Z[t, 1/t] whose
denominators stay in *factored* form: a multiset of :class:`~wmds.laurent.Binomial`
factors ``(1 - sign * t^k * x^v)``.  Keeping the factorisation explicit is what
makes the simple-reflection action exact and fast — every substitution maps a
factor to (unit) * (factor), and cancellation is a sequence of exact binomial
divisions rather than a gcd computation.

The group relevant here acts on the right: ``act_word(f, rs, (i, j), ell)``
computes ``(f | s_i) | s_j``.

Conventions (with q = t^2):

* the change of variables attached to the i-th simple reflection sends a
  monomial ``x^lam`` to ``t^(height(s_i lam) - height(lam)) * x^(s_i lam)``;
  on the variables themselves this reads ``x_i -> 1/(q x_i)`` and
  ``x_j -> t x_i x_j`` for j adjacent to i,
* the sign twist ``eps_i`` negates the variables adjacent to node i,
* the twisted action of the i-th reflection with twist entry ``l = ell[i]``
  splits f into the parts f_plus/f_minus with
  ``f_pm = (f(x) +- (-1)^l f(eps_i x)) / 2`` and maps

  ``f  ->  -(1 - t^2 x_i) * t^(l-2) * x_i^(l-1) / (1 - x_i) * f_plus(s_i x)
           + t^(l-1) * x_i^(l-1) * f_minus(s_i x)``.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .errors import RankMismatch
from .laurent import Binomial, LaurentPoly
from .roots import RootSystem, WeylElt


class RationalFn:
    """num / prod(den factors), den a multiset {Binomial: multiplicity}."""

    __slots__ = ("num", "den")

    def __init__(self, num: LaurentPoly, den: dict | None = None):
        self.num = num
        self.den = {b: m for b, m in (den or {}).items() if m}
        for b, m in self.den.items():
            if m < 0:
                raise ValueError(f"negative multiplicity for {b}")
            if len(b.xexp) != num.rank:
                raise RankMismatch(f"factor {b} under rank-{num.rank} numerator")

    # -- constructors --------------------------------------------------------

    @classmethod
    def from_poly(cls, p: LaurentPoly) -> "RationalFn":
        return cls(p, {})

    @classmethod
    def one(cls, rank: int) -> "RationalFn":
        return cls(LaurentPoly.one(rank), {})

    @property
    def rank(self) -> int:
        return self.num.rank

    def is_zero(self) -> bool:
        return self.num.is_zero()

    # -- ring operations -----------------------------------------------------

    def scaled(self, coeff: int, texp: int = 0, xexp: Sequence[int] | None = None) -> "RationalFn":
        return RationalFn(self.num.scaled(coeff, texp, xexp), self.den)

    def __neg__(self) -> "RationalFn":
        return self.scaled(-1)

    def times_poly(self, p: LaurentPoly) -> "RationalFn":
        return RationalFn(self.num * p, self.den)

    def over_binomial(self, b: Binomial, mult: int = 1) -> "RationalFn":
        den = dict(self.den)
        den[b] = den.get(b, 0) + mult
        return RationalFn(self.num, den)

    def __mul__(self, other: "RationalFn") -> "RationalFn":
        den = dict(self.den)
        for b, m in other.den.items():
            den[b] = den.get(b, 0) + m
        return RationalFn(self.num * other.num, den)

    def _common_den(self, other: "RationalFn"):
        """Multiset max of the denominators.

        Returns (common, extra_self, extra_other) where the extras are the
        factors each numerator must absorb.
        """
        common: dict = dict(self.den)
        for b, m in other.den.items():
            if common.get(b, 0) < m:
                common[b] = m
        extra_self = {b: m - self.den.get(b, 0) for b, m in common.items() if m > self.den.get(b, 0)}
        extra_other = {b: m - other.den.get(b, 0) for b, m in common.items() if m > other.den.get(b, 0)}
        return common, extra_self, extra_other

    @staticmethod
    def _absorb(num: LaurentPoly, extra: dict) -> LaurentPoly:
        for b, m in extra.items():
            p = b.as_poly(num.rank)
            for _ in range(m):
                num = num * p
        return num

    def __add__(self, other: "RationalFn") -> "RationalFn":
        common, ex_s, ex_o = self._common_den(other)
        num = self._absorb(self.num, ex_s) + self._absorb(other.num, ex_o)
        return RationalFn(num, common)

    def __sub__(self, other: "RationalFn") -> "RationalFn":
        return self + (-other)

    # -- normalisation and comparison ----------------------------------------

    def normalized(self) -> "RationalFn":
        """Cancel denominator factors dividing the numerator exactly."""
        if self.num.is_zero():
            return RationalFn(self.num, {})
        num = self.num
        den = dict(self.den)
        progress = True
        while progress:
            progress = False
            for b in list(den):
                while den.get(b, 0) > 0:
                    quot = num.try_divide(b)
                    if quot is None:
                        break
                    num = quot
                    den[b] -= 1
                    if den[b] == 0:
                        del den[b]
                    progress = True
        return RationalFn(num, den)

    def den_product(self) -> LaurentPoly:
        return self._absorb(LaurentPoly.one(self.rank), self.den)

    def as_laurent(self) -> LaurentPoly:
        """The numerator after full cancellation; the denominator must clear."""
        f = self.normalized()
        if f.den:
            left = " * ".join(
                b.pretty() if m == 1 else f"({b.pretty()})^{m}" for b, m in sorted(
                    f.den.items(), key=lambda bm: (bm[0].xexp, bm[0].texp, bm[0].sign)
                )
            )
            raise ValueError(f"not a Laurent polynomial; denominator {left} remains")
        return f.num

    def equal(self, other: "RationalFn") -> bool:
        if self.rank != other.rank:
            raise RankMismatch(f"rank {self.rank} vs {other.rank}")
        _, ex_s, ex_o = self._common_den(other)
        return self._absorb(self.num, ex_s) == self._absorb(other.num, ex_o)

    def t_flipped(self) -> "RationalFn":
        den: dict = {}
        for b, m in self.den.items():
            nb = b.sign_flipped(b.texp % 2)
            den[nb] = den.get(nb, 0) + m
        return RationalFn(self.num.t_flipped(), den)

    def substituted(self, images, signs) -> "RationalFn":
        """Apply a monomial substitution to numerator and denominator.

        ``images``/``signs`` are as in :meth:`LaurentPoly.substitute`; each
        denominator factor contributes its substituted factor plus the unit it
        spits out (see :meth:`Binomial.substituted`).
        """
        num = self.num.substitute(images, signs)
        den: dict = {}
        for b, m in self.den.items():
            nb, ucoef, ukey = b.substituted(images, signs)
            den[nb] = den.get(nb, 0) + m
            if ucoef != 1 or any(ukey):
                for _ in range(m):
                    num = num.scaled(ucoef, ukey[0], ukey[1:])
        return RationalFn(num, den)

    def __repr__(self) -> str:
        return f"RationalFn({self.pretty()})"

    def pretty(self, names: Sequence[str] | None = None) -> str:
        top = self.num.pretty(names)
        if not self.den:
            return top
        bits = []
        for b, m in sorted(self.den.items(), key=lambda bm: (bm[0].xexp, bm[0].texp, bm[0].sign)):
            s = f"({b.pretty(names)})"
            bits.append(s if m == 1 else f"{s}^{m}")
        return f"({top}) / ({' '.join(bits)})"


# -- substitutions attached to the Weyl group --------------------------------


def weyl_images(rs: RootSystem, w: WeylElt):
    """Substitution data for the change of variables x -> w(x).

    Sends x^lam to t^(height(w lam) - height(lam)) x^(w lam); the image of the
    j-th variable is read off the j-th column of the matrix of w.
    """
    images = []
    for j in range(rs.rank):
        vec = tuple(w.mat[k][j] for k in range(rs.rank))
        images.append((sum(vec) - 1, *vec))
    return images, (1,) * rs.rank


def generator_images(rs: RootSystem, i: int):
    """The substitution for a single simple reflection, written directly:
    x_i -> 1/(t^2 x_i), and x_j -> t x_i x_j for j adjacent to i."""
    images = []
    for j in range(rs.rank):
        if j == i:
            images.append((-2,) + tuple(-int(k == i) for k in range(rs.rank)))
        elif j in rs.adjacency[i]:
            images.append((1,) + tuple(int(k in (i, j)) for k in range(rs.rank)))
        else:
            images.append((0,) + tuple(int(k == j) for k in range(rs.rank)))
    return images, (1,) * rs.rank


def _identity_images(rank: int):
    return [(0,) + tuple(int(k == j) for k in range(rank)) for j in range(rank)]


def epsilon_data(rs: RootSystem, i: int):
    """Sign twist eps_i: negate the variables adjacent to node i."""
    signs = tuple(-1 if j in rs.adjacency[i] else 1 for j in range(rs.rank))
    return _identity_images(rs.rank), signs


def _epsilon_applied(f: RationalFn, rs: RootSystem, i: int) -> RationalFn:
    images, signs = epsilon_data(rs, i)
    num = f.num.substitute(images, signs)
    den: dict = {}
    for b, m in f.den.items():
        parity = sum(b.xexp[j] for j in rs.adjacency[i]) % 2
        nb = b.sign_flipped(parity)
        den[nb] = den.get(nb, 0) + m
    return RationalFn(num, den)


def parity_split(f: RationalFn, rs: RootSystem, i: int, twist_entry: int):
    """(f_plus, f_minus) with f_pm = (f +- (-1)^twist_entry f(eps_i x)) / 2.

    The halving is exact: the common denominator is eps_i-symmetric, so the
    combined numerator has even coefficients (OddIntegerCoefficient otherwise
    — that would be a bug, not an input problem).
    """
    g = _epsilon_applied(f, rs, i)
    if twist_entry % 2:
        g = -g
    common, ex_f, ex_g = f._common_den(g)
    nf = RationalFn._absorb(f.num, ex_f)
    ng = RationalFn._absorb(g.num, ex_g)
    plus = RationalFn((nf + ng).halved(), common).normalized()
    minus = RationalFn((nf - ng).halved(), common).normalized()
    return plus, minus


def act_generator(f: RationalFn, rs: RootSystem, i: int, ell: Sequence[int]) -> RationalFn:
    """Apply the twisted action of the i-th simple reflection to f."""
    li = ell[i]
    plus, minus = parity_split(f, rs, i, li)
    images, signs = generator_images(rs, i)
    p_sub = plus.substituted(images, signs)
    m_sub = minus.substituted(images, signs)

    e_i = tuple(int(k == i) for k in range(rs.rank))
    shift = tuple((li - 1) * c for c in e_i)
    # -(1 - t^2 x_i) * t^(li-2) * x_i^(li-1) / (1 - x_i) * f_plus(s_i x)
    one_minus_qxi = LaurentPoly.from_terms(
        rs.rank, [((0,) * (rs.rank + 1), 1), ((2, *e_i), -1)]
    )
    term_plus = (
        p_sub.times_poly(one_minus_qxi)
        .scaled(-1, li - 2, shift)
        .over_binomial(Binomial(sign=1, texp=0, xexp=e_i))
    )
    # t^(li-1) * x_i^(li-1) * f_minus(s_i x)
    term_minus = m_sub.scaled(1, li - 1, shift)
    return (term_plus + term_minus).normalized()


def act_word(f: RationalFn, rs: RootSystem, word: Iterable[int], ell: Sequence[int]) -> RationalFn:
    """Right action along a word: successive generators applied in order."""
    for i in word:
        f = act_generator(f, rs, i, ell)
    return f

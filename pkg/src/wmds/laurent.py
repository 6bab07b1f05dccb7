"""Sparse Laurent polynomials in x_1..x_r and an auxiliary variable t.

t tracks half-powers of the residue-field size: t^2 = q.  Coefficients are
arbitrary-precision integers, exponents may be negative.  Internally a
polynomial is a term map handled by the selected kernel backend (exponent
keys packed into single integers); instances are treated as immutable.
Public interfaces speak exponent tuples ``(texp, e1, ..., er)``.

``Binomial`` is the factored-denominator atom (1 - sign * t^texp * x^xexp)
with a nonnegative, nonzero exponent vector (or a pure-t power), which keeps
every denominator a unit in the power-series ring at the origin.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from . import kernel
from .errors import NotDivisible, OddIntegerCoefficient, PolarAtZero, RankMismatch

Key = tuple  # (texp, e1, ..., er)

_TPARITY = kernel.SLOT_BIAS % 2  # slot bias is even: parity(texp) == packed & 1


def _term_order(item):
    key = item[0]
    xexp = key[1:]
    return (sum(xexp), xexp, key[0])


class LaurentPoly:
    __slots__ = ("rank", "terms")

    def __init__(self, rank: int, terms: dict | None = None):
        self.rank = rank
        self.terms = terms if terms is not None else {}

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, rank: int) -> "LaurentPoly":
        return cls(rank, {})

    @classmethod
    def one(cls, rank: int) -> "LaurentPoly":
        return cls(rank, {kernel.zero_key(rank + 1): 1})

    @classmethod
    def monomial(cls, rank: int, coeff: int, texp: int = 0, xexp: Sequence[int] | None = None) -> "LaurentPoly":
        if coeff == 0:
            return cls.zero(rank)
        xexp = tuple(xexp) if xexp is not None else (0,) * rank
        if len(xexp) != rank:
            raise RankMismatch(f"exponent vector {xexp} for rank {rank}")
        return cls(rank, {kernel.pack_key((texp, *xexp)): coeff})

    @classmethod
    def from_terms(cls, rank: int, items: Iterable[tuple[Key, int]]) -> "LaurentPoly":
        terms: dict = {}
        for key, coeff in items:
            if len(key) != rank + 1:
                raise RankMismatch(f"key {key} for rank {rank}")
            pk = kernel.pack_key(key)
            c = terms.get(pk, 0) + coeff
            if c:
                terms[pk] = c
            elif pk in terms:
                del terms[pk]
        return cls(rank, terms)

    # -- basic ring structure ---------------------------------------------

    def _check(self, other: "LaurentPoly"):
        if self.rank != other.rank:
            raise RankMismatch(f"rank {self.rank} vs {other.rank}")

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        self._check(other)
        out = dict(self.terms)
        kernel.axpy_terms(out, other.terms, 0, 1, self.rank + 1)
        return LaurentPoly(self.rank, out)

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        self._check(other)
        out = dict(self.terms)
        kernel.axpy_terms(out, other.terms, 0, -1, self.rank + 1)
        return LaurentPoly(self.rank, out)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(self.rank, {k: -c for k, c in self.terms.items()})

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        self._check(other)
        return LaurentPoly(
            self.rank,
            kernel.mul_terms(self.terms, other.terms, self.rank + 1),
        )

    def scaled(self, coeff: int, texp: int = 0, xexp: Sequence[int] | None = None) -> "LaurentPoly":
        """self * coeff * t^texp * x^xexp."""
        if coeff == 0:
            return LaurentPoly.zero(self.rank)
        shift = (texp, *(tuple(xexp) if xexp is not None else (0,) * self.rank))
        delta = kernel.pack_key(shift) - kernel.zero_key(self.rank + 1)
        out: dict = {}
        kernel.axpy_terms(out, self.terms, delta, coeff, self.rank + 1)
        return LaurentPoly(self.rank, out)

    def axpy_into(self, acc: dict, coeff: int, texp: int = 0, xexp: Sequence[int] | None = None) -> None:
        """Accumulate coeff * t^texp * x^xexp * self into a packed-term dict.

        Low-level building block for long summations: ``acc`` is a plain
        dict of packed keys as produced by :meth:`raw_terms` peers, updated
        in place with zero results removed.  Wrap the finished accumulator
        with :meth:`from_packed`.
        """
        if coeff == 0:
            return
        shift = (texp, *(tuple(xexp) if xexp is not None else (0,) * self.rank))
        delta = kernel.pack_key(shift) - kernel.zero_key(self.rank + 1)
        kernel.axpy_terms(acc, self.terms, delta, coeff, self.rank + 1)

    @classmethod
    def from_packed(cls, rank: int, terms: dict) -> "LaurentPoly":
        """Wrap a packed-term dict built by :meth:`axpy_into` accumulation."""
        return cls(rank, terms)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, LaurentPoly)
            and self.rank == other.rank
            and self.terms == other.terms
        )

    def __hash__(self):
        raise TypeError("LaurentPoly is not hashable")

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __repr__(self) -> str:
        return f"LaurentPoly({self.pretty()})"

    # -- iteration -----------------------------------------------------------

    def unpacked_items(self):
        """Iterate (exponent tuple, coefficient) pairs in arbitrary order."""
        nslots = self.rank + 1
        unpack = kernel.unpack_key
        for pk, c in self.terms.items():
            yield unpack(pk, nslots), c

    def __len__(self) -> int:
        return len(self.terms)

    # -- substitution and evaluation ---------------------------------------

    def substitute(self, images: Sequence[Key], signs: Sequence[int]) -> "LaurentPoly":
        """Monomial substitution x_i -> signs[i] * monomial(images[i]).

        ``images[i]`` is a full key (t slot first); t itself is untouched.
        """
        zk = kernel.zero_key(self.rank + 1)
        deltas = (1, *(kernel.pack_key(img) - zk for img in images))
        flips = (0, *(1 if s < 0 else 0 for s in signs))
        return LaurentPoly(
            self.rank,
            kernel.substitute_terms(self.terms, deltas, flips, self.rank + 1),
        )

    def eval_zero(self, variables: Iterable[int]) -> "LaurentPoly":
        """Set the given variables (0-based) to zero; exponents stay in place."""
        slots = tuple(i + 1 for i in sorted(set(variables)))
        try:
            out = kernel.eval_zero_terms(self.terms, slots, self.rank + 1)
        except ValueError as exc:
            raise PolarAtZero(str(exc)) from None
        return LaurentPoly(self.rank, out)

    def constant_coefficient(self) -> dict:
        """Coefficient of x^0 as a t-exponent map."""
        zero = self.eval_zero(range(self.rank))
        return {key[0]: c for key, c in zero.unpacked_items()}

    # -- division ------------------------------------------------------------

    def try_divide(self, factor: "Binomial") -> "LaurentPoly | None":
        quotient = kernel.divide_binomial_terms(
            self.terms, factor.ukey, factor.sign, self.rank + 1
        )
        if quotient is None:
            return None
        return LaurentPoly(self.rank, quotient)

    def divide_exact(self, factor: "Binomial") -> "LaurentPoly":
        quotient = self.try_divide(factor)
        if quotient is None:
            raise NotDivisible(f"{factor} does not divide {self.pretty()}")
        return quotient

    def halved(self) -> "LaurentPoly":
        out = {}
        for key, c in self.terms.items():
            if c % 2:
                raise OddIntegerCoefficient(f"odd coefficient {c}")
            out[key] = c // 2
        return LaurentPoly(self.rank, out)

    # -- structure queries ----------------------------------------------------

    def support(self) -> list[tuple]:
        """Sorted x-exponent vectors carrying a nonzero t-coefficient."""
        seen = {pk >> kernel.SLOT_BITS for pk in self.terms}
        vecs = (kernel.unpack_key(pk, self.rank) for pk in seen)
        return sorted(vecs, key=lambda v: (sum(v), v))

    def coefficient_q(self, xexp: Sequence[int]) -> dict:
        """t-exponent map of the coefficient of x^xexp."""
        target = kernel.pack_key((0, *xexp)) >> kernel.SLOT_BITS
        bias = kernel.SLOT_BIAS
        mask = kernel.SLOT_MASK
        return {
            (pk & mask) - bias: c
            for pk, c in self.terms.items()
            if pk >> kernel.SLOT_BITS == target
        }

    def min_exponents(self) -> tuple | None:
        """Slotwise minimum of all keys (t slot first); None for 0."""
        if not self.terms:
            return None
        its = self.unpacked_items()
        lo = list(next(its)[0])
        for key, _ in its:
            for i, e in enumerate(key):
                if e < lo[i]:
                    lo[i] = e
        return tuple(lo)

    def max_exponents(self) -> tuple | None:
        if not self.terms:
            return None
        its = self.unpacked_items()
        hi = list(next(its)[0])
        for key, _ in its:
            for i, e in enumerate(key):
                if e > hi[i]:
                    hi[i] = e
        return tuple(hi)

    def is_q_integral(self) -> bool:
        """True when every t-exponent is even and nonnegative."""
        bias = kernel.SLOT_BIAS
        mask = kernel.SLOT_MASK
        return all(
            (pk & 1) == _TPARITY and (pk & mask) >= bias for pk in self.terms
        )

    def t_flipped(self) -> "LaurentPoly":
        """t -> -t (negates coefficients with odd t-exponent)."""
        return LaurentPoly(
            self.rank,
            {
                pk: (-c if (pk & 1) != _TPARITY else c)
                for pk, c in self.terms.items()
            },
        )

    # -- presentation ---------------------------------------------------------

    def sorted_terms(self) -> list[tuple[Key, int]]:
        """Terms in graded-lex order on the x-exponents, then t-exponent."""
        return sorted(self.unpacked_items(), key=_term_order)

    def to_json_terms(self) -> list[dict]:
        return [
            {"x": list(key[1:]), "t": key[0], "c": coeff}
            for key, coeff in self.sorted_terms()
        ]

    @classmethod
    def from_json_terms(cls, rank: int, items: Iterable[dict]) -> "LaurentPoly":
        return cls.from_terms(
            rank, (((item["t"], *item["x"]), item["c"]) for item in items)
        )

    def pretty(self, names: Sequence[str] | None = None) -> str:
        """Render with q = t^2; odd t-powers print as s^k with s = sqrt(q)."""
        if not self.terms:
            return "0"
        if names is None:
            names = variable_names(self.rank)
        groups: dict[tuple, dict] = {}
        for key, coeff in self.sorted_terms():
            groups.setdefault(key[1:], {})[key[0]] = coeff
        pieces = []
        for xexp, tmap in groups.items():
            mono = "*".join(
                f"{names[i]}" + (f"^{e}" if e != 1 else "")
                for i, e in enumerate(xexp)
                if e
            )
            coeff_str = _tpoly_str(tmap)
            if mono:
                if coeff_str == "1":
                    pieces.append(mono)
                elif coeff_str == "-1":
                    pieces.append(f"-{mono}")
                elif "+" in coeff_str or (coeff_str.count("-") - coeff_str.startswith("-")) > 0:
                    pieces.append(f"({coeff_str})*{mono}")
                else:
                    pieces.append(f"{coeff_str}*{mono}")
            else:
                pieces.append(coeff_str)
        out = pieces[0]
        for piece in pieces[1:]:
            out += f" - {piece[1:]}" if piece.startswith("-") else f" + {piece}"
        return out


def variable_names(rank: int) -> tuple[str, ...]:
    """x, y (rank 2) or x1..xr — the names used by all text output."""
    if rank == 2:
        return ("x", "y")
    return tuple(f"x{i + 1}" for i in range(rank))


def _tpoly_str(tmap: dict) -> str:
    parts = []
    for texp in sorted(tmap):
        coeff = tmap[texp]
        if texp == 0:
            parts.append(str(coeff))
            continue
        if texp % 2 == 0:
            var = "q" if texp == 2 else f"q^{texp // 2}"
        else:
            var = "s" if texp == 1 else f"s^{texp}"
        if coeff == 1:
            parts.append(var)
        elif coeff == -1:
            parts.append(f"-{var}")
        else:
            parts.append(f"{coeff}*{var}")
    out = parts[0]
    for part in parts[1:]:
        out += f" - {part[1:]}" if part.startswith("-") else f" + {part}"
    return out


@dataclass(frozen=True, slots=True)
class Binomial:
    """(1 - sign * t^texp * x^xexp) with xexp >= 0 and (xexp != 0 or texp > 0)."""

    sign: int
    texp: int
    xexp: tuple

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +-1, got {self.sign}")
        if any(e < 0 for e in self.xexp):
            raise ValueError(f"negative exponent in {self.xexp}")
        if not any(self.xexp) and self.texp <= 0:
            raise ValueError("constant binomial must carry a positive t-power")

    @property
    def ukey(self) -> Key:
        return (self.texp, *self.xexp)

    def as_poly(self, rank: int) -> LaurentPoly:
        if len(self.xexp) != rank:
            raise RankMismatch(f"binomial over {len(self.xexp)} variables, rank {rank}")
        return LaurentPoly.from_terms(
            rank, [((0,) * (rank + 1), 1), (self.ukey, -self.sign)]
        )

    def sign_flipped(self, parity: int) -> "Binomial":
        """Image under a sign substitution that flips this monomial iff parity is odd."""
        if parity % 2 == 0:
            return self
        return Binomial(-self.sign, self.texp, self.xexp)

    def substituted(self, images: Sequence[Key], signs: Sequence[int]):
        """Image under a monomial substitution, renormalised to the invariant.

        Returns ``(binomial, unit_coeff, unit_key)`` with
        1/self_image == unit_coeff * monomial(unit_key) / binomial.
        """
        rank = len(self.xexp)
        image = LaurentPoly.monomial(rank, 1, self.texp, self.xexp).substitute(
            images, signs
        )
        (key, coeff), = image.unpacked_items()
        s = self.sign * coeff
        xpart = key[1:]
        if all(e >= 0 for e in xpart) and (any(xpart) or key[0] > 0):
            return Binomial(s, key[0], xpart), 1, (0,) * (rank + 1)
        if all(e <= 0 for e in xpart) and (any(xpart) or key[0] < 0):
            # 1 - s*m = -s*m * (1 - s/m): divide by the flipped factor and
            # push the invertible monomial -s/m into the numerator.
            flipped = Binomial(s, -key[0], tuple(-e for e in xpart))
            unit_key = (-key[0], *(-e for e in xpart))
            return flipped, -s, unit_key
        raise ValueError(f"mixed-sign exponent vector {xpart} in denominator image")

    def pretty(self, names: Sequence[str] | None = None) -> str:
        rank = len(self.xexp)
        return self.as_poly(rank).pretty(names)

    def __str__(self) -> str:
        return self.pretty()

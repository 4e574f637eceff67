"""Exact expansions of the form  sum c_{j,e} z^j q^(e/2)  with symbolic constants.

Coefficients are rational combinations of  pi^p * i^s * log(2)^t, which covers
every transcendental constant produced by the E2 and log-lambda
transformation laws (6/(pi i), -36/pi^2, pi i, 4 log 2).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping

import mpmath

from .qseries import HalfSeries, InsufficientPrecision, Scalar

Monomial = tuple[int, int, int]  # (pi power, i power mod 4, log2 power)


class SymbolicCoeff:
    """Finite rational combination of pi^p i^s log(2)^t."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Monomial, Scalar] | None = None):
        merged: dict[Monomial, Fraction] = {}
        for (p, s, t), c in (terms or {}).items():
            s %= 4
            # i^2 = -1 folds into the rational part
            if s >= 2:
                s -= 2
                c = -c
            key = (p, s, t)
            merged[key] = merged.get(key, Fraction(0)) + Fraction(c)
        self._terms = {k: v for k, v in sorted(merged.items()) if v != 0}

    @classmethod
    def rational(cls, c: Scalar) -> "SymbolicCoeff":
        return cls({(0, 0, 0): c})

    @property
    def terms(self) -> dict[Monomial, Fraction]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __add__(self, other: "SymbolicCoeff") -> "SymbolicCoeff":
        out = dict(self._terms)
        for k, v in other._terms.items():
            out[k] = out.get(k, Fraction(0)) + v
        return SymbolicCoeff(out)

    def __neg__(self) -> "SymbolicCoeff":
        return SymbolicCoeff({k: -v for k, v in self._terms.items()})

    def __sub__(self, other: "SymbolicCoeff") -> "SymbolicCoeff":
        return self + (-other)

    def __mul__(self, other) -> "SymbolicCoeff":
        if isinstance(other, (int, Fraction)):
            return SymbolicCoeff({k: v * other for k, v in self._terms.items()})
        out: dict[Monomial, Fraction] = {}
        for (p1, s1, t1), a in self._terms.items():
            for (p2, s2, t2), b in other._terms.items():
                key = (p1 + p2, s1 + s2, t1 + t2)
                out[key] = out.get(key, Fraction(0)) + a * b
        return SymbolicCoeff(out)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = SymbolicCoeff.rational(other)
        if not isinstance(other, SymbolicCoeff):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(tuple(self._terms.items()))

    def value(self) -> mpmath.mpc:
        """Numeric value at the current mpmath precision."""
        total = mpmath.mpc(0)
        for (p, s, t), c in self._terms.items():
            term = mpmath.mpf(c.numerator) / c.denominator * mpmath.pi ** p * mpmath.log(2) ** t
            total += term * (1j if s == 1 else 1)
        return total

    def __repr__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for (p, s, t), c in self._terms.items():
            f = [str(c)]
            if p:
                f.append("pi" if p == 1 else f"pi^{p}")
            if s:
                f.append("i")
            if t:
                f.append("log2")
            parts.append("*".join(f))
        return " + ".join(parts)


PI_I = SymbolicCoeff({(1, 1, 0): 1})
FOUR_LOG2 = SymbolicCoeff({(0, 0, 1): 4})
SIX_OVER_PI_I = SymbolicCoeff({(-1, 3, 0): 6})  # 6/(pi i) = -6i/pi
MINUS_36_OVER_PI2 = SymbolicCoeff({(-2, 0, 0): -36})


@dataclass(frozen=True)
class GeneralizedExpansion:
    """Mapping (z-degree j, doubled exponent e) -> SymbolicCoeff, known for e < trunc."""

    terms: Mapping[tuple[int, int], SymbolicCoeff]
    trunc: int

    def __post_init__(self):
        clean = {k: v for k, v in sorted(self.terms.items()) if not v.is_zero() and k[1] < self.trunc}
        object.__setattr__(self, "terms", clean)

    @classmethod
    def from_blocks(cls, blocks) -> "GeneralizedExpansion":
        """Sum of  const * z^j * series  over (j, const, series) triples."""
        trunc = min(s.trunc for _, _, s in blocks)
        acc: dict[tuple[int, int], SymbolicCoeff] = {}
        for j, const, series in blocks:
            for e, c in series.terms():
                if e >= trunc:
                    continue
                key = (j, e)
                acc[key] = acc.get(key, SymbolicCoeff()) + const * c
        return cls(acc, trunc)

    def coeff(self, j: int, e: int) -> SymbolicCoeff:
        if e >= self.trunc:
            raise InsufficientPrecision(f"insufficient precision: q^({e}/2) beyond {self.trunc}")
        return self.terms.get((j, e), SymbolicCoeff())

    def support(self, j: int | None = None) -> set[int]:
        return {e for (jj, e) in self.terms if j is None or jj == j}

    def z_degrees(self) -> set[int]:
        return {j for j, _ in self.terms}

    def items(self) -> Iterator[tuple[tuple[int, int], SymbolicCoeff]]:
        return iter(self.terms.items())

    def __add__(self, other: "GeneralizedExpansion") -> "GeneralizedExpansion":
        trunc = min(self.trunc, other.trunc)
        acc = dict(self.terms)
        for k, v in other.terms.items():
            acc[k] = acc.get(k, SymbolicCoeff()) + v
        return GeneralizedExpansion(acc, trunc)

    def __neg__(self) -> "GeneralizedExpansion":
        return GeneralizedExpansion({k: -v for k, v in self.terms.items()}, self.trunc)

    def __sub__(self, other: "GeneralizedExpansion") -> "GeneralizedExpansion":
        return self + (-other)

    def scale(self, c) -> "GeneralizedExpansion":
        return GeneralizedExpansion({k: v * c for k, v in self.terms.items()}, self.trunc)

    def is_zero(self) -> bool:
        return not self.terms

    def shift_z(self, delta: int) -> "GeneralizedExpansion":
        """The expansion of z -> f(z + delta) for integer delta.

        z^j becomes (z + delta)^j and q^(e/2) picks up (-1)^(e*delta).
        """
        from math import comb

        acc: dict[tuple[int, int], SymbolicCoeff] = {}
        for (j, e), c in self.terms.items():
            sign = -1 if (e * delta) % 2 else 1
            for k in range(j + 1):
                key = (k, e)
                acc[key] = acc.get(key, SymbolicCoeff()) + c * (sign * comb(j, k) * delta ** (j - k))
        return GeneralizedExpansion(acc, self.trunc)

    def truncate(self, trunc: int) -> "GeneralizedExpansion":
        if trunc > self.trunc:
            raise InsufficientPrecision("cannot extend truncation")
        return GeneralizedExpansion(self.terms, trunc)

    def agrees(self, other: "GeneralizedExpansion") -> bool:
        trunc = min(self.trunc, other.trunc)
        return self.truncate(trunc).terms == other.truncate(trunc).terms

    def to_json(self) -> list:
        return [
            {"j": j, "e2": e, "c": {f"{p},{s},{t}": str(v) for (p, s, t), v in c.terms.items()}}
            for (j, e), c in self.terms.items()
        ]

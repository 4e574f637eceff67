"""Truncated Laurent series in q^(1/2) with exact rational coefficients.

A term ``c * q^(e/2)`` is stored under the integer index ``e`` (the doubled
exponent), so level-1 expansions (even ``e`` only) and level-2 expansions
(theta functions, the lambda function) live in the same type.

A series knows its coefficients for ``lead <= e < trunc``.  Reading a
coefficient at or beyond ``trunc`` raises :class:`InsufficientPrecision`;
nothing past the truncation is ever silently treated as zero.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

Scalar = Union[int, Fraction]


class InsufficientPrecision(ValueError):
    """A coefficient beyond the known truncation was requested."""


class NonInvertible(ZeroDivisionError):
    pass


def _lcm_denominators(values: Iterable[Fraction]) -> int:
    den = 1
    for v in values:
        d = v.denominator
        if d != 1:
            den = den * d // math.gcd(den, d)
    return den


def _as_fraction(x: Scalar) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"exact rational expected, got {type(x).__name__}")


class HalfSeries:
    """Immutable truncated series  sum_{lead <= e < trunc} c_e q^(e/2)."""

    __slots__ = ("_lead", "_coeffs", "_trunc")

    def __init__(self, start: int, coeffs: Sequence[Scalar], trunc: int):
        if start + len(coeffs) > trunc:
            coeffs = list(coeffs)[: max(trunc - start, 0)]
        cs = [_as_fraction(c) for c in coeffs]
        k = 0
        while k < len(cs) and cs[k] == 0:
            k += 1
        if k == len(cs):
            # zero to the known order; lead == trunc by convention
            self._lead = trunc
            self._coeffs: tuple[Fraction, ...] = ()
        else:
            j = len(cs)
            while cs[j - 1] == 0:
                j -= 1
            self._lead = start + k
            self._coeffs = tuple(cs[k:j])
        self._trunc = trunc

    # -- construction -----------------------------------------------------

    @classmethod
    def from_dict(cls, terms: Mapping[int, Scalar], trunc: int) -> "HalfSeries":
        terms = {e: c for e, c in terms.items() if e < trunc and c != 0}
        if not terms:
            return cls(trunc, [], trunc)
        lo = min(terms)
        dense = [0] * (max(terms) - lo + 1)
        for e, c in terms.items():
            dense[e - lo] = c
        return cls(lo, dense, trunc)

    @classmethod
    def constant(cls, c: Scalar, trunc: int) -> "HalfSeries":
        return cls(0, [c], trunc)

    @classmethod
    def one(cls, trunc: int) -> "HalfSeries":
        return cls(0, [1], trunc)

    @classmethod
    def zero(cls, trunc: int) -> "HalfSeries":
        return cls(trunc, [], trunc)

    @classmethod
    def monomial(cls, e: int, c: Scalar, trunc: int) -> "HalfSeries":
        return cls(e, [c], trunc)

    # -- accessors ----------------------------------------------------------

    @property
    def lead(self) -> int:
        return self._lead

    @property
    def trunc(self) -> int:
        return self._trunc

    def is_zero(self) -> bool:
        return not self._coeffs

    def coeff(self, e: int) -> Fraction:
        """Coefficient of q^(e/2)."""
        if e >= self._trunc:
            raise InsufficientPrecision(
                f"insufficient precision: q^({e}/2) requested, series known below q^({self._trunc}/2)"
            )
        i = e - self._lead
        if i < 0 or i >= len(self._coeffs):
            return Fraction(0)
        return self._coeffs[i]

    def terms(self) -> list[tuple[int, Fraction]]:
        """Nonzero terms as (doubled exponent, coefficient) pairs."""
        return [(self._lead + i, c) for i, c in enumerate(self._coeffs) if c]

    def dense(self, start: int, stop: int) -> list[Fraction]:
        return [self.coeff(e) for e in range(start, stop)]

    def support(self) -> set[int]:
        return {e for e, _ in self.terms()}

    def truncate(self, trunc: int) -> "HalfSeries":
        if trunc > self._trunc:
            raise InsufficientPrecision(f"cannot extend truncation {self._trunc} to {trunc}")
        return HalfSeries(self._lead, self._coeffs, trunc)

    # -- ring operations ----------------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = HalfSeries.constant(other, self._trunc)
        if not isinstance(other, HalfSeries):
            return NotImplemented
        trunc = min(self._trunc, other._trunc)
        lo = min(self._lead, other._lead)
        if lo >= trunc:
            return HalfSeries.zero(trunc)
        out = [Fraction(0)] * (trunc - lo)
        for src in (self, other):
            base = src._lead - lo
            for i, c in enumerate(src._coeffs):
                if base + i < len(out):
                    out[base + i] += c
        return HalfSeries(lo, out, trunc)

    __radd__ = __add__

    def __neg__(self) -> "HalfSeries":
        return HalfSeries(self._lead, [-c for c in self._coeffs], self._trunc)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = HalfSeries.constant(other, self._trunc)
        if not isinstance(other, HalfSeries):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: Scalar) -> "HalfSeries":
        c = _as_fraction(c)
        return HalfSeries(self._lead, [c * x for x in self._coeffs], self._trunc)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, HalfSeries):
            return NotImplemented
        trunc = min(self._trunc + other._lead, other._trunc + self._lead)
        if self.is_zero() or other.is_zero():
            return HalfSeries.zero(trunc)
        lead = self._lead + other._lead
        n = trunc - lead
        if n <= 0:
            return HalfSeries.zero(trunc)
        da = _lcm_denominators(self._coeffs)
        db = _lcm_denominators(other._coeffs)
        a = [c.numerator * (da // c.denominator) for c in self._coeffs[:n]]
        b = [c.numerator * (db // c.denominator) for c in other._coeffs[:n]]
        out = [0] * n
        bnz = [(j, y) for j, y in enumerate(b) if y]
        for i, x in enumerate(a):
            if not x:
                continue
            lim = n - i
            for j, y in bnz:
                if j >= lim:
                    break
                out[i + j] += x * y
        den = da * db
        return HalfSeries(lead, [Fraction(v, den) for v in out], trunc)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "HalfSeries":
        if not isinstance(k, int) or k < 0:
            raise ValueError("natural exponent expected (use invert for negative powers)")
        if k == 0:
            return HalfSeries.one(self._trunc - self._lead)
        result = None
        base = self
        while True:
            if k & 1:
                result = base if result is None else result * base
            k >>= 1
            if not k:
                return result
            base = base * base

    def invert(self) -> "HalfSeries":
        """Multiplicative inverse with the same relative precision."""
        if self.is_zero():
            raise NonInvertible("non-invertible: zero series")
        prec = self._trunc - self._lead
        u = list(self._coeffs[:prec]) + [Fraction(0)] * max(0, prec - len(self._coeffs))
        den = _lcm_denominators(u)
        ints = [c.numerator * (den // c.denominator) for c in u]
        u0 = ints[0]
        nz = [(j, y) for j, y in enumerate(ints) if y and j]
        if u0 in (1, -1):
            # 1/(U/den) = den / U with U an integer series of unit lead
            b = [0] * prec
            b[0] = u0
            for k in range(1, prec):
                acc = 0
                for j, y in nz:
                    if j > k:
                        break
                    acc += y * b[k - j]
                b[k] = -acc * u0
            out = [Fraction(den * x) for x in b]
        else:
            inv0 = Fraction(1, u0)
            b = [Fraction(0)] * prec
            b[0] = inv0
            for k in range(1, prec):
                acc = Fraction(0)
                for j, y in nz:
                    if j > k:
                        break
                    acc += y * b[k - j]
                b[k] = -acc * inv0
            out = [den * x for x in b]
        return HalfSeries(-self._lead, out, -self._lead + prec)

    def log1p(self) -> "HalfSeries":
        """log(1 + a) for a series without constant term (strictly positive lead).

        Computed as the integral of a' / (1 + a) in the variable q^(1/2).
        """
        if self.is_zero():
            return HalfSeries.zero(self._trunc)
        if self._lead <= 0:
            raise ValueError("log1p needs strictly positive exponents (no constant term)")
        trunc = self._trunc
        deriv = HalfSeries(self._lead - 1, [(self._lead + i) * c for i, c in enumerate(self._coeffs)], trunc - 1)
        quotient = deriv * (self + 1).invert()
        terms = {e + 1: c / (e + 1) for e, c in quotient.terms()}
        return HalfSeries.from_dict(terms, trunc)

    def twist(self) -> "HalfSeries":
        """Substitute q^(1/2) -> -q^(1/2), i.e. z -> z + 1 on the q-side."""
        return HalfSeries(
            self._lead,
            [c if (self._lead + i) % 2 == 0 else -c for i, c in enumerate(self._coeffs)],
            self._trunc,
        )

    def shift(self, k: int) -> "HalfSeries":
        """Multiply by q^(k/2)."""
        return HalfSeries(self._lead + k, self._coeffs, self._trunc + k)

    # -- comparison ---------------------------------------------------------

    def agrees(self, other: "HalfSeries") -> bool:
        """Coefficientwise equality up to the smaller truncation."""
        trunc = min(self._trunc, other._trunc)
        lo = min(self._lead, other._lead, trunc)
        return all(self.coeff(e) == other.coeff(e) for e in range(lo, trunc))

    def __eq__(self, other) -> bool:
        if not isinstance(other, HalfSeries):
            return NotImplemented
        return (
            self._trunc == other._trunc
            and self._lead == other._lead
            and self._coeffs == other._coeffs
        )

    def __hash__(self) -> int:
        return hash((self._lead, self._coeffs, self._trunc))

    def __repr__(self) -> str:
        shown = self.terms()[:6]
        body = " + ".join(f"({c})q^({e}/2)" for e, c in shown) or "0"
        return f"HalfSeries({body} + O(q^({self._trunc}/2)))"

    # -- serialization --------------------------------------------------------

    def to_json(self) -> dict:
        terms = self.terms()
        return {
            "e2": [e for e, _ in terms],
            "c": [str(c) for _, c in terms],
            "trunc": self._trunc,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "HalfSeries":
        if len(data["e2"]) != len(data["c"]):
            raise ValueError("e2 and c must have equal length")
        terms = {int(e): Fraction(c) for e, c in zip(data["e2"], data["c"])}
        return cls.from_dict(terms, int(data["trunc"]))

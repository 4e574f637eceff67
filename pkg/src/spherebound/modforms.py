"""q-expansions of the level-1 and level-2 forms used by the constructions.

All expansions are exact :class:`HalfSeries` truncated at a doubled-exponent
index ``order`` (coefficients known for q^(e/2), e < order).
"""

from __future__ import annotations

import enum
import math
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

import mpmath

from .qseries import HalfSeries


class ConsistencyError(RuntimeError):
    """Two independent computations of the same object disagree."""


class GeneratorId(str, enum.Enum):
    E2 = "E2"
    E4 = "E4"
    E6 = "E6"
    Delta = "Delta"
    U = "U"
    V = "V"
    W = "W"
    Lambda = "Lambda"
    EllS = "EllS"
    EllTail = "EllTail"


class Level1Monomial(NamedTuple):
    a: int  # power of E4
    b: int  # power of E6

    @property
    def weight(self) -> int:
        return 4 * self.a + 6 * self.b


# Slash-action table.  Theta fourth powers map to +-(another theta power) in
# weight 2; the logarithms carry additive constants in weight 0.
THETA_SLASH = {
    "T": {"U": (1, "W"), "V": (-1, "V"), "W": (1, "U")},
    "S": {"U": (-1, "U"), "V": (-1, "W"), "W": (-1, "V")},
}
# L|T^{+-1} = L - L_S +- pi i ;  L_S|T = -L_S ;  L|S = L_S ;  L_S|S = L
LOG_SLASH = {
    "T": {"L": {"L": 1, "LS": -1, "pi_i": 1}, "LS": {"LS": -1}},
    "Tinv": {"L": {"L": 1, "LS": -1, "pi_i": -1}, "LS": {"LS": -1}},
    "S": {"L": {"LS": 1}, "LS": {"L": 1}},
}
# z^-2 E2(-1/z) = E2(z) + 6/(pi i z) ;  lambda|S = 1 - lambda ;  lambda|T = -lambda/(1 - lambda)
E2_S_ANOMALY = Fraction(6)  # coefficient of 1/(pi i z)


@lru_cache(maxsize=None)
def bernoulli(k: int) -> Fraction:
    """B_k from sum_{j=0}^{n} C(n+1, j) B_j = 0 with B_0 = 1 (so B_1 = -1/2)."""
    if k < 2 or k % 2:
        raise ValueError("bernoulli: even k >= 2 required")
    b = [Fraction(1)]
    for n in range(1, k + 1):
        b.append(-sum(math.comb(n + 1, j) * b[j] for j in range(n)) / (n + 1))
    return b[k]


def _sigma_table(power: int, m: int) -> list[int]:
    sig = [0] * m
    for d in range(1, m):
        dp = d ** power
        for multiple in range(d, m, d):
            sig[multiple] += dp
    return sig


def _level1(int_coeffs: list[int], order: int) -> HalfSeries:
    """Place integer-exponent coefficients c_0, c_1, ... on the doubled grid."""
    terms = {2 * n: c for n, c in enumerate(int_coeffs) if c and 2 * n < order}
    return HalfSeries.from_dict(terms, order)


@lru_cache(maxsize=None)
def eisenstein(k: int, order: int) -> HalfSeries:
    """E_k = 1 - (2k/B_k) sum sigma_{k-1}(n) q^n, for even k >= 2."""
    if k < 2 or k % 2:
        raise ValueError("eisenstein: even k >= 2 required")
    m = (order + 1) // 2
    factor = -Fraction(2 * k) / bernoulli(k)
    sig = _sigma_table(k - 1, m)
    coeffs = [Fraction(1)] + [factor * sig[n] for n in range(1, m)]
    return _level1(coeffs, order)


def _poly_mul_int(a: list[int], b: list[int], m: int) -> list[int]:
    out = [0] * m
    for i, x in enumerate(a[:m]):
        if x:
            for j, y in enumerate(b[: m - i]):
                if y:
                    out[i + j] += x * y
    return out


def _delta_product(order: int) -> HalfSeries:
    # q * prod (1 - q^n)^24, expanded over integer exponents
    m = (order + 1) // 2
    prod = [0] * m
    prod[0] = 1
    for n in range(1, m):
        for i in range(m - 1, n - 1, -1):
            prod[i] -= prod[i - n]
    result = [1] + [0] * (m - 1)
    base = prod
    e = 24
    while e:
        if e & 1:
            result = _poly_mul_int(result, base, m)
        e >>= 1
        if e:
            base = _poly_mul_int(base, base, m)
    return _level1([0] + result[: m - 1], order)


@lru_cache(maxsize=None)
def delta(order: int) -> HalfSeries:
    """The discriminant, computed from the product and from (E4^3 - E6^2)/1728."""
    prod = _delta_product(order)
    e4 = eisenstein(4, order)
    e6 = eisenstein(6, order)
    quotient = (e4 ** 3 - e6 ** 2).scale(Fraction(1, 1728))
    if not quotient.agrees(prod) or quotient.trunc != order:
        raise ConsistencyError("Delta: product formula and (E4^3 - E6^2)/1728 disagree")
    return prod


def _theta_1d(kind: str, order: int) -> HalfSeries:
    # doubled-exponent index of a theta term e^{pi i n^2 z} is n^2
    terms: dict[int, int] = {}
    if kind == "2":
        # theta_2 = s^(1/4) * sum s^(n^2+n);  the s^(1/4) is restored after the 4th power
        n = 0
        while n * n + n < order:
            terms[n * n + n] = terms.get(n * n + n, 0) + 2
            n += 1
    else:
        n = 0
        while n * n < order:
            sign = -1 if (kind == "4" and n % 2) else 1
            terms[n * n] = terms.get(n * n, 0) + (1 if n == 0 else 2) * sign
            n += 1
    return HalfSeries.from_dict(terms, order)


@lru_cache(maxsize=None)
def theta_pow4(which: str, order: int) -> HalfSeries:
    """U = theta_3^4, V = theta_2^4, W = theta_4^4 by direct four-fold lattice sums."""
    kind = {"U": "3", "V": "2", "W": "4"}[which]
    base = _theta_1d(kind, order)
    fourth = (base * base) * (base * base)
    if kind == "2":
        fourth = fourth.shift(1).truncate(order)
    return fourth


@lru_cache(maxsize=None)
def lambda_series(order: int) -> HalfSeries:
    """lambda = V / U, the Hauptmodul for Gamma(2)."""
    return theta_pow4("V", order) * theta_pow4("U", order).invert()


@lru_cache(maxsize=None)
def ell_s(order: int) -> HalfSeries:
    """L_S = log(1 - lambda) as a q-series."""
    return (-lambda_series(order)).log1p()


@lru_cache(maxsize=None)
def ell_tail(order: int) -> HalfSeries:
    """The rational tail l(q) in  L(z) = pi i z + 4 log 2 + l(q)."""
    lam = lambda_series(order + 1)
    return (lam.shift(-1).scale(Fraction(1, 16)) - 1).log1p()


def generator(tag: str | GeneratorId, order: int) -> HalfSeries:
    tag = GeneratorId(tag)
    if tag is GeneratorId.E2:
        return eisenstein(2, order)
    if tag is GeneratorId.E4:
        return eisenstein(4, order)
    if tag is GeneratorId.E6:
        return eisenstein(6, order)
    if tag is GeneratorId.Delta:
        return delta(order)
    if tag in (GeneratorId.U, GeneratorId.V, GeneratorId.W):
        return theta_pow4(tag.value, order)
    if tag is GeneratorId.Lambda:
        return lambda_series(order)
    if tag is GeneratorId.EllS:
        return ell_s(order)
    return ell_tail(order)


def level1_basis(k: int) -> list[Level1Monomial]:
    """All E4^a E6^b of weight k, ordered by decreasing a."""
    if k < 0 or k % 2:
        return []
    return [Level1Monomial(a, (k - 4 * a) // 6) for a in range(k // 4, -1, -1) if (k - 4 * a) % 6 == 0]


def dim_m(k: int) -> int:
    if k < 0 or k % 2:
        return 0
    if k % 12 == 2:
        return k // 12
    return k // 12 + 1


@lru_cache(maxsize=None)
def level1_form(a: int, b: int, order: int, e2_power: int = 0) -> HalfSeries:
    """E2^c E4^a E6^b as an exact series."""
    out = HalfSeries.one(order)
    if a:
        out = out * eisenstein(4, order) ** a
    if b:
        out = out * eisenstein(6, order) ** b
    if e2_power:
        out = out * eisenstein(2, order) ** e2_power
    return out


# -- numerical evaluation ----------------------------------------------------


class InsufficientTruncation(ArithmeticError):
    pass


def fit_envelope(points: list[tuple[int, float]]) -> tuple[float, float]:
    """Fit log|c_e| <= log C + alpha sqrt(e) to (e, log|c_e|) pairs with e > 0.

    Returns (log C, alpha) with C inflated by a safety factor of 10.
    """
    pts = [(math.sqrt(e), lc) for e, lc in points if e > 0]
    if len(pts) < 2:
        lc = pts[0][1] if pts else 0.0
        return lc + math.log(10), 0.0
    # slope from the upper half of the computed range, envelope over all points
    upper = pts[len(pts) // 2 :]
    alpha = 0.0
    if len(upper) >= 2:
        xs = [p[0] for p in upper]
        ys = [p[1] for p in upper]
        mx = sum(xs) / len(xs)
        my = sum(ys) / len(ys)
        var = sum((x - mx) ** 2 for x in xs)
        if var:
            alpha = max(sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / var, 0.0)
    log_c = max(y - alpha * x for x, y in pts)
    return log_c + math.log(10), alpha


def _log_abs(c: Fraction) -> float:
    return math.log(abs(c.numerator)) - math.log(c.denominator)


def growth_envelope(series: HalfSeries) -> tuple[float, float]:
    """Envelope (log C, alpha) of the positive-index coefficients of an exact series."""
    return fit_envelope([(e, _log_abs(c)) for e, c in series.terms() if e > 0])


def tail_bound(series: HalfSeries, abs_s: float) -> float:
    """Bound on sum_{e >= trunc} |c_e| |s|^e from the fitted growth envelope."""
    log_c, alpha = growth_envelope(series)
    n = max(series.trunc, 1)
    log_x = math.log(abs_s)
    log_ratio = alpha / (2 * math.sqrt(n)) + log_x
    if log_ratio >= 0:
        return math.inf
    log_first = log_c + alpha * math.sqrt(n) + n * log_x
    if log_first < -700:
        return 0.0
    return math.exp(log_first) / (1 - math.exp(log_ratio))


def numeric_eval(
    series: HalfSeries,
    z: complex,
    prec: int = 128,
    eta_min: float = 0.4,
    tol: float = 1e-20,
) -> tuple[mpmath.mpc, float]:
    """Evaluate sum c_e e^{pi i e z}; returns (value, tail-bound estimate)."""
    z = mpmath.mpc(z)
    if z.imag < eta_min:
        raise InsufficientTruncation(f"Im(z) = {float(z.imag):.3g} below threshold {eta_min}")
    with mpmath.workprec(prec):
        s = mpmath.exp(mpmath.pi * 1j * z)
        total = mpmath.mpc(0)
        for e, c in series.terms():
            total += (mpmath.mpf(c.numerator) / c.denominator) * s ** e
        tail = tail_bound(series, float(abs(s)))
        if tail > tol * max(1.0, float(abs(total))):
            raise InsufficientTruncation(f"insufficient truncation: tail bound {tail:.3g}")
        return total, tail

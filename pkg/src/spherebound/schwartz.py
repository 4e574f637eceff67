"""Numerical evaluation of the radial eigenfunctions built from a candidate.

With g the integrand on the imaginary axis (g(u) = u^(d/2-2) h(-1/u), where h
is phi on the plus side and psi_S on the minus side), the radial profile is

    f(r) = -4 sin^2(pi r^2 / 2) * int_0^inf g(it) exp(-pi r^2 t) dt.

Two independent routes are implemented:

* ``closed``: split the integral at t = 1.  On [0, 1] integrate numerically
  using the rapidly convergent expansion of h at i/t; on [1, inf) integrate
  the expansion of g termwise in closed form.  The termwise pieces are entire
  in r away from r^2 = -e, which gives the continuation below sqrt(2n).
* ``contour``: the four-piece contour integral through -1, 0, 1 and i, i inf,
  valid for every r >= 0.
"""

from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass
from functools import cached_property

import mpmath
from mpmath.calculus.quadrature import GaussLegendre

from .construct import MinusCandidate, PlusCandidate, g_expansion_plus, psi_expansions
from .expansion import GeneralizedExpansion
from .modforms import InsufficientTruncation, fit_envelope, growth_envelope
from .qseries import HalfSeries

log = logging.getLogger(__name__)

PRECISION_ENV = "SPHEREBOUND_PRECISION"


class EvaluationError(ArithmeticError):
    pass


@dataclass(frozen=True)
class EvalConfig:
    prec: int = 128  # working precision in bits
    panels: int = 16  # Gauss-Legendre panels per unit interval
    gl_degree: int = 4  # mpmath degree: 3 * 2^(degree-1) nodes per panel
    numeric_order: int | None = None  # doubled-exponent truncation of the numeric tables
    hankel_radius: float = 7.0
    hankel_panels: int = 40

    @classmethod
    def from_env(cls, **overrides) -> "EvalConfig":
        env = os.environ.get(PRECISION_ENV)
        if env and "prec" not in overrides:
            overrides["prec"] = int(env)
        return cls(**overrides)


def _gl_rule(degree: int, prec: int) -> list[tuple[mpmath.mpf, mpmath.mpf]]:
    return GaussLegendre(mpmath.mp).calc_nodes(degree, prec)


def _panel_nodes(a, b, rule):
    half = (b - a) / 2
    mid = (b + a) / 2
    return [(mid + half * x, half * w) for x, w in rule]


def _laplace_tail(j: int, a):
    """int_1^inf t^j exp(-a t) dt = exp(-a) sum_k j!/k! a^-(j-k+1), any a != 0."""
    total = mpmath.mpf(0)
    fact_j = math.factorial(j)
    for k in range(j + 1):
        total += mpmath.mpf(fact_j // math.factorial(k)) / a ** (j - k + 1)
    return mpmath.exp(-a) * total


def sin2_half_pi(r2):
    """sin^2(pi r^2 / 2) with the argument reduced modulo 2 first."""
    red = r2 - 2 * mpmath.nint(r2 / 2)
    return mpmath.sin(mpmath.pi * red / 2) ** 2


class MagicFunction:
    """Radial Schwartz eigenfunction attached to a plus or minus candidate."""

    def __init__(self, candidate: PlusCandidate | MinusCandidate, config: EvalConfig | None = None):
        self.candidate = candidate
        self.config = config or EvalConfig.from_env()
        self.side = candidate.side
        self.d = candidate.d
        self.n = candidate.n
        self.weight_shift = self.d // 2 - 2  # g(u) = u^k h(-1/u)
        self.sigma = 1 if self.side == "plus" else -1
        self.r0 = math.sqrt(2 * self.n)
        self.order = self.config.numeric_order or 2 * (40 + 25 * self.n)
        self._load_series(self.order)
        self._node_cache: dict[tuple, list] = {}
        self._value_cache: dict[tuple, mpmath.mpf] = {}

    def _load_series(self, order: int) -> None:
        if self.side == "plus":
            self.near: GeneralizedExpansion = g_expansion_plus(self.candidate, order)
            self.far: HalfSeries = self.candidate.phi(order)
        else:
            self.near = psi_expansions(self.candidate, order, ("I",))["I"]
            self.far = self.candidate.psi_s(order)
        if any(e <= 0 for e in self.far.support()):
            raise EvaluationError("the far expansion must vanish at the cusp")
        self.order = order
        self._tables: dict[int, tuple] = {}
        self._checked: set[tuple[int, float]] = set()
        self._node_cache = {}

    # -- numeric coefficient tables ----------------------------------------

    def _numeric(self, prec: int):
        if prec not in self._tables:
            with mpmath.workprec(prec):
                near = {}
                for j in sorted(self.near.z_degrees()):
                    es = sorted(self.near.support(j))
                    lo = es[0]
                    dense = [mpmath.mpc(0)] * (es[-1] - lo + 1)
                    for e in es:
                        dense[e - lo] = self.near.coeff(j, e).value()
                    near[j] = (lo, dense)
                terms = self.far.terms()
                lo = terms[0][0]
                far = [mpmath.mpf(0)] * (terms[-1][0] - lo + 1)
                for e, c in terms:
                    far[e - lo] = mpmath.mpf(c.numerator) / c.denominator
                self._tables[prec] = (near, (lo, far))
        return self._tables[prec]

    def _truncation_ok(self, prec: int, eta: float) -> bool:
        log_x = -math.pi * eta
        fits = [growth_envelope(self.far)]
        for j in self.near.z_degrees():
            pts = [(e, float(mpmath.log(abs(self.near.coeff(j, e).value())))) for e in self.near.support(j) if e > 0]
            if pts:
                fits.append(fit_envelope(pts))
        e = min(self.far.trunc, self.near.trunc)
        return all(lc + alpha * math.sqrt(e) + e * log_x <= -prec * math.log(2) + 10 for lc, alpha in fits)

    def ensure_truncation(self, prec: int, eta: float, max_order: int = 4000) -> None:
        """Grow the exact expansions until the tail at Im = eta is below 2^-prec."""
        if (prec, eta) in self._checked:
            return
        order = self.order
        while not self._truncation_ok(prec, eta):
            if order >= max_order:
                raise InsufficientTruncation(f"insufficient truncation: order {order} too low for {prec} bits")
            order = int(order * 1.5)
            log.info("extending numeric order to %d for %d bits", order, prec)
            self._load_series(order)
        self._checked.add((prec, eta))

    # -- the integrand --------------------------------------------------------

    def g_near(self, u):
        near, _ = self._numeric(mpmath.mp.prec)
        x = mpmath.expjpi(u)
        total = mpmath.mpc(0)
        for j, (lo, dense) in near.items():
            acc = mpmath.mpc(0)
            for c in reversed(dense):
                acc = acc * x + c
            total += u ** j * acc * x ** lo
        return total

    def h(self, z):
        """phi (plus side) or psi_S (minus side) from its q-expansion."""
        _, (lo, dense) = self._numeric(mpmath.mp.prec)
        x = mpmath.expjpi(z)
        acc = mpmath.mpc(0)
        for c in reversed(dense):
            acc = acc * x + c
        return acc * x ** lo

    def g_far(self, u):
        return u ** self.weight_shift * self.h(-1 / u)

    def g(self, u):
        """The integrand at u, from whichever expansion converges faster."""
        u = mpmath.mpc(u)
        if u.imag <= 0:
            raise EvaluationError("g is defined on the upper half-plane only")
        if max(u.imag, u.imag / abs(u) ** 2) < 0.5:
            raise InsufficientTruncation(f"u = {u} is too close to the real axis")
        return self.g_near(u) if abs(u) >= 1 else self.g_far(u)

    # -- closed route ---------------------------------------------------------

    def _rule(self, prec: int):
        key = ("rule", prec)
        if key not in self._node_cache:
            self._node_cache[key] = _gl_rule(self.config.gl_degree, prec)
        return self._node_cache[key]

    def _unit_nodes(self, prec: int, breaks=()):
        rule = self._rule(prec)
        m = self.config.panels
        pts = sorted({mpmath.mpf(i) / m for i in range(m + 1)} | {mpmath.mpf(b) for b in breaks})
        out = []
        for a, b in zip(pts, pts[1:]):
            out.extend(_panel_nodes(a, b, rule))
        return out

    def _q_nodes(self, prec: int):
        """(t, weight * g(it)) on (0, 1]."""
        key = ("Q", prec)
        self.ensure_truncation(prec, 1.0)
        if key not in self._node_cache:
            with mpmath.workprec(prec):
                self._node_cache[key] = [(t, w * self.g_far(mpmath.mpc(0, t))) for t, w in self._unit_nodes(prec)]
        return self._node_cache[key]

    def _extra_bits(self, r2) -> int:
        # the two halves of the closed route cancel down to exp(-pi r^2);
        # quantized so node caches are shared between nearby radii
        bits = int(5 * max(float(r2), 0.0)) + 16
        return 64 * -(-bits // 64)

    def eval_closed(self, r) -> mpmath.mpf:
        with mpmath.workprec(self.config.prec):
            r2 = mpmath.mpf(r) ** 2
        prec = self.config.prec + self._extra_bits(r2)
        with mpmath.workprec(prec):
            r2 = mpmath.mpf(r) ** 2
            poles = [e for e in {e for _, e in self.near.terms} if r2 + e == 0]
            if poles:
                raise EvaluationError(f"r^2 = {-poles[0]} is a removable point; use eval_limit_even")
            q = mpmath.fsum(gv * mpmath.exp(-mpmath.pi * r2 * t) for t, gv in self._q_nodes(prec))
            near, _ = self._numeric(prec)
            tail = mpmath.mpc(0)
            for j, (lo, dense) in near.items():
                ij = mpmath.mpc(0, 1) ** j
                for i, c in enumerate(dense):
                    if c:
                        tail += c * ij * _laplace_tail(j, mpmath.pi * (r2 + lo + i))
            val = -4 * sin2_half_pi(r2) * (q + tail)
            if abs(val.imag) > mpmath.mpf(2) ** (-self.config.prec // 2) * max(1, abs(val)):
                raise EvaluationError(f"closed form has imaginary residue {mpmath.nstr(val.imag, 5)}")
            result = +val.real
        with mpmath.workprec(self.config.prec):
            return +result

    def eval_limit_even(self, k: int) -> mpmath.mpf:
        """f(sqrt(2k)) from the principal-part coefficient of z q^-k."""
        if k < 0:
            raise ValueError("k must be nonnegative")
        with mpmath.workprec(self.config.prec):
            if k > self.n:
                return mpmath.mpf(0)
            if not self.near.coeff(2, -2 * k).is_zero():
                raise EvaluationError(f"z^2 term at q^-{k}: f is not finite at sqrt(2k)")
            return +(mpmath.mpc(0, -1) * self.near.coeff(1, -2 * k).value()).real

    def deriv_at_r0(self) -> mpmath.mpf:
        """f'(sqrt(2n)) = -2 pi r0 c0 (the z-top coefficient vanishes)."""
        with mpmath.workprec(self.config.prec):
            c0 = self.near.coeff(0, -2 * self.n).value()
            return -2 * mpmath.pi * mpmath.sqrt(2 * self.n) * c0.real

    def derivative(self, r) -> mpmath.mpf:
        with mpmath.workprec(self.config.prec):
            return mpmath.diff(self.eval_closed, mpmath.mpf(r))

    # -- contour route -------------------------------------------------------

    def _segment_nodes(self, prec: int):
        key = ("contour", prec)
        self.ensure_truncation(prec, 1 / math.sqrt(2))
        if key not in self._node_cache:
            with mpmath.workprec(prec):
                nodes = self._unit_nodes(prec, breaks=(1 / mpmath.sqrt(2),))
                dirs = (mpmath.mpc(1, 1), mpmath.mpc(-1, 1), mpmath.mpc(0, 1))
                segs = []
                for direction in dirs:
                    vals = []
                    for s, w in nodes:
                        u = s * direction
                        gv = self.g_near(u) if abs(u) >= 1 else self.g_far(u)
                        vals.append((u, w * direction * gv))
                    segs.append(vals)
                self._node_cache[key] = segs
        return self._node_cache[key]

    def eval_contour(self, r) -> mpmath.mpf:
        prec = self.config.prec + self._extra_bits(float(r) ** 2)
        with mpmath.workprec(prec):
            r2 = mpmath.mpf(r) ** 2
            seg_p, seg_m, seg_0 = self._segment_nodes(prec)
            shift = mpmath.expjpi(r2)
            # u = z + 1 on the first piece, u = z - 1 on the second, u = z on the third
            s1 = mpmath.fsum(v * mpmath.expjpi(r2 * u) for u, v in seg_p) / shift
            s2 = mpmath.fsum(v * mpmath.expjpi(r2 * u) for u, v in seg_m) * shift
            s3 = mpmath.fsum(v * mpmath.expjpi(r2 * u) for u, v in seg_0)
            _, (lo, dense) = self._numeric(prec)
            ray = mpmath.mpc(0)
            for i, c in enumerate(dense):
                if c:
                    a = mpmath.pi * (lo + i + r2)
                    ray += c * mpmath.exp(-a) / a
            ray *= mpmath.mpc(0, 1)
            total = mpmath.mpc(0, -1) * (s1 + s2 - 2 * s3 + 2 * self.sigma * ray)
            if abs(total.imag) > mpmath.mpf(2) ** (-self.config.prec // 3) * max(1, abs(total)):
                raise EvaluationError(f"contour value has imaginary residue {mpmath.nstr(total.imag, 5)}")
            result = +total.real
        with mpmath.workprec(self.config.prec):
            return +result

    # -- dispatch -----------------------------------------------------------------

    def evaluate(self, r, method: str = "auto") -> mpmath.mpf:
        if r < 0:
            raise ValueError("radius must be nonnegative")
        if method == "contour":
            return self.eval_contour(r)
        with mpmath.workprec(self.config.prec + 16):
            r2 = mpmath.mpf(r) ** 2
            k = int(mpmath.nint(r2 / 2))
            exact_even = r2 == 2 * k
        if method == "limit" or (method == "auto" and exact_even):
            if not exact_even:
                raise ValueError("the limit formula applies only at r = sqrt(2k)")
            return self.eval_limit_even(k)
        if method in ("auto", "closed"):
            return self.eval_closed(r)
        raise ValueError(f"unknown method {method!r}")

    def __call__(self, r) -> mpmath.mpf:
        key = ("f", mpmath.mpf(r))
        if key not in self._value_cache:
            self._value_cache[key] = self.evaluate(r)
        return self._value_cache[key]

    def value_at_origin(self) -> mpmath.mpf:
        return self.eval_limit_even(0)

    # -- Fourier oracle ---------------------------------------------------------

    @cached_property
    def _hankel_nodes(self):
        cfg = self.config
        with mpmath.workprec(cfg.prec):
            rule = _gl_rule(3, cfg.prec)
            R = mpmath.mpf(cfg.hankel_radius)
            pts = [R * i / cfg.hankel_panels for i in range(cfg.hankel_panels + 1)]
            out = []
            for a, b in zip(pts, pts[1:]):
                for r, w in _panel_nodes(a, b, rule):
                    out.append((r, w * self.eval_closed(r) * r ** (self.d // 2)))
            return out

    def fourier_transform(self, s) -> mpmath.mpf:
        """Radial Fourier transform by direct Hankel quadrature (Bessel kernel)."""
        nu = self.d // 2 - 1
        with mpmath.workprec(self.config.prec):
            s = mpmath.mpf(s)
            total = mpmath.mpf(0)
            for r, v in self._hankel_nodes:
                if s == 0:
                    kern = mpmath.pi ** nu * r ** nu / mpmath.gamma(nu + 1)
                else:
                    kern = mpmath.besselj(nu, 2 * mpmath.pi * r * s) / s ** nu
                total += v * kern
            return 2 * mpmath.pi * total

    def fourier_residual(self, s) -> float:
        """|f^(s) - sigma f(s)|; zero for an exact eigenfunction."""
        return float(abs(self.fourier_transform(s) - self.sigma * self(s)))


_cache: dict[tuple, MagicFunction] = {}


def build(candidate, config: EvalConfig | None = None) -> MagicFunction:
    """Memoized constructor keyed on the candidate and the configuration."""
    config = config or EvalConfig.from_env()
    key = (candidate.digest, config)
    if key not in _cache:
        _cache[key] = MagicFunction(candidate, config)
    return _cache[key]

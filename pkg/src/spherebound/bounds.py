"""Linear-programming packing bounds from the constructed eigenfunction pairs."""

from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Iterable, Sequence

import mpmath

from .construct import n_minus, n_plus, solve_minus, solve_plus
from .schwartz import EvalConfig, MagicFunction, build

log = logging.getLogger(__name__)

ORIGIN_REL_TOL = 1e-6


class BoundError(RuntimeError):
    pass


@dataclass
class Verification:
    checked_grid: int = 0
    violations: int = 0
    max_violation: float = 0.0
    worst_r: float | None = None
    tol: float = 1e-8

    def to_json(self) -> dict:
        return {
            "checkedGrid": self.checked_grid,
            "violations": self.violations,
            "maxViolation": self.max_violation,
            "worstR": self.worst_r,
            "tol": self.tol,
        }


@dataclass
class BoundReport:
    d: int
    n_plus: int
    n_minus: int
    r0: float
    bound: float
    log_bound: float
    mix_c: Fraction | None = None
    verify: Verification | None = None
    f_plus_origin: float | None = None
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        out = asdict(self)
        out["mix_c"] = None if self.mix_c is None else str(self.mix_c)
        out["verify"] = None if self.verify is None else self.verify.to_json()
        return out


def n_pair(d: int) -> tuple[int, int]:
    if d <= 0 or d % 8:
        raise ValueError(f"dimension must be a positive multiple of 8, got {d}")
    return n_plus(d), n_minus(d)


def log_bound_formula(d: int) -> float:
    """log of pi^(d/2) / Gamma(d/2 + 1) * (sqrt(2 n_minus) / 2)^d."""
    _, nm = n_pair(d)
    with mpmath.workdps(30):
        val = (
            mpmath.mpf(d) / 2 * mpmath.log(mpmath.pi)
            - mpmath.loggamma(mpmath.mpf(d) / 2 + 1)
            + d * mpmath.log(mpmath.sqrt(2 * nm) / 2)
        )
        return float(val)


def bound_formula(d: int) -> float:
    return math.exp(log_bound_formula(d))


def asymptotic_rate(d: int) -> float:
    """-log2(bound(d)) / d, via log-Gamma so that huge d cannot overflow."""
    return -log_bound_formula(d) / (d * math.log(2))


def build_pair(d: int, config: EvalConfig | None = None) -> tuple[MagicFunction, MagicFunction]:
    return build(solve_plus(d), config), build(solve_minus(d), config)


def packing_bound(d: int, config: EvalConfig | None = None, construct: bool = True) -> BoundReport:
    """The bound for dimension d; with ``construct`` the pair is built and f+(0) cross-checked."""
    np_, nm = n_pair(d)
    notes: list[str] = []
    if nm < np_:
        raise BoundError("n_minus < n_plus violates the floor-formula ordering")
    report = BoundReport(d, np_, nm, math.sqrt(2 * nm), bound_formula(d), log_bound_formula(d), notes=notes)
    if not construct:
        return report
    fp, fm = build_pair(d, config)
    if (fp.n, fm.n) != (np_, nm):
        notes.append(f"constructive minimum (n+, n-) = ({fp.n}, {fm.n}) differs from the floor formulas ({np_}, {nm})")
    limit = fp.eval_limit_even(0)
    contour = fp.eval_contour(0)
    if limit <= 0:
        raise BoundError(f"f+(0) = {mpmath.nstr(limit, 8)} is not positive after normalization")
    rel = abs(contour - limit) / abs(limit)
    if rel > ORIGIN_REL_TOL:
        raise BoundError(f"f+(0): limit {mpmath.nstr(limit, 12)} vs contour {mpmath.nstr(contour, 12)}")
    if fm.eval_limit_even(0) != 0:
        notes.append("f-(0) is nonzero; the bound assumes it vanishes")
    report.f_plus_origin = float(limit)
    return report


def table(dims: Iterable[int], config: EvalConfig | None = None, construct: bool = True) -> list[BoundReport]:
    return [packing_bound(d, config, construct) for d in dims]


def format_bound(x: float, digits: int = 4) -> str:
    return f"{x:.{digits}g}"


# -- sign verification ------------------------------------------------------


def _grid(start: float, stop: float, step: float) -> list[float]:
    if step <= 0:
        raise ValueError("grid step must be positive")
    count = int(math.floor((stop - start) / step + 1e-9))
    return [round(start + i * step, 12) for i in range(count + 1)] if stop >= start else []


def _values(f: MagicFunction, grid: Sequence[float]) -> list[float]:
    return [float(f(r)) for r in grid]


def sign_verify(
    d: int,
    c: Fraction | float,
    r_max: float = 6.0,
    step: float = 0.01,
    tol: float = 1e-8,
    config: EvalConfig | None = None,
) -> Verification:
    """Grid check of f = f+ + c f- <= tol on [r0, r_max] and f^ = f+ - c f- >= -tol on [0, r_max]."""
    fp, fm = build_pair(d, config)
    r0 = math.sqrt(2 * n_pair(d)[1])
    grid = _grid(0.0, r_max, step)
    rec = Verification(tol=tol)
    if not grid:
        return rec
    vp, vm = _values(fp, grid), _values(fm, grid)
    cf = float(c)
    for r, a, b in zip(grid, vp, vm):
        excess = []
        if r >= r0 - 1e-12:
            excess.append(a + cf * b)  # f must be <= 0
        excess.append(-(a - cf * b))  # f^ must be >= 0
        worst = max(excess)
        rec.checked_grid += 1
        if worst > tol:
            rec.violations += 1
        if rec.worst_r is None or worst > rec.max_violation:
            rec.max_violation, rec.worst_r = worst, r
    rec.max_violation = max(rec.max_violation, 0.0)
    return rec


def _feasible_bracket(grid, vp, vm, r0, tol) -> tuple[float, float]:
    lo, hi = -math.inf, math.inf
    for r, a, b in zip(grid, vp, vm):
        if b == 0:
            continue
        # f^: a - c b >= -tol
        bound = (a + tol) / b
        if b > 0:
            hi = min(hi, bound)
        else:
            lo = max(lo, bound)
        if r >= r0 - 1e-12:
            # f: a + c b <= tol
            bound = (tol - a) / b
            if b > 0:
                hi = min(hi, bound)
            else:
                lo = max(lo, bound)
    return lo, hi


def _simple_rational(lo: float, hi: float) -> Fraction:
    mid = (lo + hi) / 2
    den = 1
    while True:
        c = Fraction(mid).limit_denominator(den)
        if lo <= c <= hi:
            return c
        den *= 10


def choose_mix(
    d: int,
    r_max: float = 6.0,
    step: float = 0.05,
    tol: float = 1e-8,
    config: EvalConfig | None = None,
) -> tuple[Fraction, Verification]:
    """Mixing coefficient c for f+ + c f-; deterministic for a fixed grid."""
    fp, fm = build_pair(d, config)
    r0 = math.sqrt(2 * n_pair(d)[1])
    grid = _grid(0.0, r_max, step)
    vp, vm = _values(fp, grid), _values(fm, grid)
    lo, hi = _feasible_bracket(grid, vp, vm, r0, tol)
    if lo <= hi and math.isfinite(lo) and math.isfinite(hi):
        c = _simple_rational(lo, hi)
    else:
        # no violation-free c on this grid: minimize the worst violation
        def worst(cv: float) -> float:
            out = -math.inf
            for r, a, b in zip(grid, vp, vm):
                if r >= r0 - 1e-12:
                    out = max(out, a + cv * b)
                out = max(out, -(a - cv * b))
            return out

        a_, b_ = sorted(x for x in (lo, hi) if math.isfinite(x)) or [-1.0, 1.0]
        if a_ == b_:
            a_, b_ = a_ - 1, b_ + 1
        width = b_ - a_
        a_, b_ = a_ - width, b_ + width
        phi = (math.sqrt(5) - 1) / 2
        x1, x2 = b_ - phi * (b_ - a_), a_ + phi * (b_ - a_)
        f1, f2 = worst(x1), worst(x2)
        for _ in range(100):
            if f1 <= f2:
                b_, x2, f2 = x2, x1, f1
                x1 = b_ - phi * (b_ - a_)
                f1 = worst(x1)
            else:
                a_, x1, f1 = x1, x2, f2
                x2 = a_ + phi * (b_ - a_)
                f2 = worst(x2)
        c = Fraction((a_ + b_) / 2).limit_denominator(10**6)
    return c, sign_verify(d, c, r_max, step, tol, config)


# -- literature annotations ---------------------------------------------------


def literature_annotations() -> dict:
    """Static reference values (labelled as literature, never recomputed)."""
    text = resources.files("spherebound").joinpath("data/literature_bounds.json").read_text()
    return json.loads(text)

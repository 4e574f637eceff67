"""Candidate spaces, vanishing conditions and exact kernels for both eigen-sides.

Plus side: phi~ = A E2^2 + B E2 + C with level-1 forms A, B, C, and the
integrand  g(z) = phi(-1/z) z^(d/2-2)  expanded through the E2 anomaly.

Minus side: psi~ = (U^2 - V^2) G1 + W G2 + L G3 with level-1 forms G_i and
L(z) = pi i z + 4 log 2 + l(q) the holomorphic logarithm of lambda.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .expansion import (
    FOUR_LOG2,
    MINUS_36_OVER_PI2,
    PI_I,
    SIX_OVER_PI_I,
    GeneralizedExpansion,
    SymbolicCoeff,
)
from .kernel import rank, rational_kernel
from .modforms import (
    LOG_SLASH,
    THETA_SLASH,
    ConsistencyError,
    Level1Monomial,
    delta,
    dim_m,
    eisenstein,
    ell_s,
    ell_tail,
    level1_basis,
    level1_form,
    theta_pow4,
)
from .qseries import HalfSeries

log = logging.getLogger(__name__)

PlusMonomial = tuple[int, int, int]  # E2^a E4^b E6^c


class Infeasible(ValueError):
    """The candidate space for (d, n) is empty."""


class ConstructionFailed(RuntimeError):
    def __init__(self, message: str, diagnostics: list[str]):
        super().__init__(message + "\n  " + "\n  ".join(diagnostics))
        self.diagnostics = diagnostics


def n_plus(d: int) -> int:
    return (d + 8) // 16


def n_minus(d: int) -> int:
    return (d + 16) // 16


def _check_dim(d: int) -> None:
    if d <= 0 or d % 4:
        raise ValueError(f"dimension must be a positive multiple of 4, got {d}")


def monomial_label(m: PlusMonomial) -> str:
    parts = [f"E{k}" + (f"^{p}" if p > 1 else "") for k, p in zip((2, 4, 6), m) if p]
    return "*".join(parts) or "1"


def level1_label(m: Level1Monomial) -> str:
    return monomial_label((0, m.a, m.b))


# -- profile --------------------------------------------------------------


@dataclass(frozen=True)
class Profile:
    n: int
    r0: float
    c0: SymbolicCoeff
    pairs: tuple[tuple[SymbolicCoeff, SymbolicCoeff], ...]  # m = 0..n-1: (z^1 q^-m, z^0 q^-m)
    z_top: SymbolicCoeff
    c0_nonzero: bool
    z_top_zero: bool
    no_z2_nonpositive: bool
    z_flags: tuple[bool, ...]

    @property
    def sz_compatible(self) -> bool:
        """Simple zero at sqrt(2n) and double zeros beyond it."""
        return self.c0_nonzero and self.z_top_zero and self.no_z2_nonpositive

    @property
    def score(self) -> int:
        return int(self.c0_nonzero) + int(self.z_top_zero) + int(self.no_z2_nonpositive) + sum(self.z_flags)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "r0": self.r0,
            "c0": repr(self.c0),
            "zTop": repr(self.z_top),
            "pairs": [[repr(a), repr(b)] for a, b in self.pairs],
            "c0Nonzero": self.c0_nonzero,
            "zTopZero": self.z_top_zero,
            "noZ2Nonpositive": self.no_z2_nonpositive,
            "zFlags": list(self.z_flags),
            "szCompatible": self.sz_compatible,
        }


def profile(gexp: GeneralizedExpansion, n: int) -> Profile:
    """Principal part data of an integrand with pole order n."""
    c0 = gexp.coeff(0, -2 * n)
    z_top = gexp.coeff(1, -2 * n)
    pairs = tuple((gexp.coeff(1, -2 * m), gexp.coeff(0, -2 * m)) for m in range(n))
    no_z2 = all(e > 0 for e in gexp.support(2))
    return Profile(
        n=n,
        r0=math.sqrt(2 * n),
        c0=c0,
        pairs=pairs,
        z_top=z_top,
        c0_nonzero=not c0.is_zero(),
        z_top_zero=z_top.is_zero(),
        no_z2_nonpositive=no_z2,
        z_flags=tuple(not p[0].is_zero() for p in pairs),
    )


@lru_cache(maxsize=None)
def delta_inverse_power(n: int, order: int) -> HalfSeries:
    """Delta^-n with coefficients known below q^(order/2) (needs Delta to order + 4n)."""
    if n == 0:
        return HalfSeries.one(order)
    return (delta(order + 4 * n) ** n).invert().truncate(order)


# -- plus side --------------------------------------------------------------


def plus_space(d: int, n: int) -> list[PlusMonomial]:
    _check_dim(d)
    k = -d // 2 + 4 + 12 * n
    out: list[PlusMonomial] = []
    for a in (2, 1, 0):
        out.extend((a, m.a, m.b) for m in level1_basis(k - 2 * a))
    if not out:
        raise Infeasible(f"infeasible (d, n) = ({d}, {n}): empty candidate space")
    if d % 8 == 0:
        expected = 3 * n - d // 8 + 2
        if expected >= 0 and len(out) != expected:
            raise ConsistencyError(f"plus space size {len(out)} != 3n - d/8 + 2 = {expected}")
    return out


def plus_system(d: int, n: int, extra: bool = False) -> list[list[Fraction]]:
    """Rows: coefficients of q^0..q^n of each monomial; optional z-top row."""
    mons = plus_space(d, n)
    order = 2 * n + 2
    cols = [level1_form(b, c, order, e2_power=a) for a, b, c in mons]
    rows = [[s.coeff(2 * m) for s in cols] for m in range(n + 1)]
    if extra:
        # constant term of 2A + B, i.e. the z q^-n coefficient of g
        rows.append([Fraction({2: 2, 1: 1, 0: 0}[a]) for a, _, _ in mons])
    return rows


def _plus_blocks(mons: Sequence[PlusMonomial], coeffs: Sequence[Fraction], order: int):
    blocks = {2: HalfSeries.zero(order), 1: HalfSeries.zero(order), 0: HalfSeries.zero(order)}
    for (a, b, c), x in zip(mons, coeffs):
        if x:
            blocks[a] = blocks[a] + level1_form(b, c, order).scale(x)
    return blocks[2], blocks[1], blocks[0]


def _digest(payload: dict) -> str:
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()[:16]


@dataclass(frozen=True)
class PlusCandidate:
    d: int
    n: int
    monomials: tuple[PlusMonomial, ...]
    coeffs: tuple[Fraction, ...]
    extra_row: bool = False
    log: tuple[str, ...] = field(default=(), compare=False)

    side = "plus"

    def blocks(self, order: int) -> tuple[HalfSeries, HalfSeries, HalfSeries]:
        """(A, B, C) with phi~ = A E2^2 + B E2 + C."""
        return _plus_blocks(self.monomials, self.coeffs, order)

    def phi_tilde(self, order: int) -> HalfSeries:
        a, b, c = self.blocks(order)
        e2 = eisenstein(2, order)
        return a * e2 * e2 + b * e2 + c

    def phi(self, order: int) -> HalfSeries:
        """phi = phi~ / Delta^n, the integrand on the vertical ray."""
        return (self.phi_tilde(order + 2 * self.n) * delta_inverse_power(self.n, order + 2 * self.n)).truncate(order)

    def labels(self) -> list[str]:
        return [monomial_label(m) for m in self.monomials]

    def to_json(self) -> dict:
        return {
            "side": "plus",
            "d": self.d,
            "n": self.n,
            "monomials": [list(m) for m in self.monomials],
            "labels": self.labels(),
            "coeffs": [str(c) for c in self.coeffs],
            "extraRow": self.extra_row,
        }

    @property
    def digest(self) -> str:
        return _digest(self.to_json())


def g_expansion_plus(c: PlusCandidate, order: int) -> GeneralizedExpansion:
    """g = [z^2 phi~ + (6/(pi i)) z (2A E2 + B) - (36/pi^2) A] / Delta^n."""
    work = order + 2 * c.n
    a, b, cc = c.blocks(work)
    e2 = eisenstein(2, work)
    phit = a * e2 * e2 + b * e2 + cc
    dinv = delta_inverse_power(c.n, work)
    z2 = (phit * dinv).truncate(order)
    z1 = ((a * e2).scale(2) + b) * dinv
    z0 = a * dinv
    if z2.lead <= 0 and not z2.is_zero():
        raise ConsistencyError(
            f"z^2 block has support at q^({z2.lead}/2); the integrand would not be Schwartz"
        )
    return GeneralizedExpansion.from_blocks(
        [
            (2, SymbolicCoeff.rational(1), z2),
            (1, SIX_OVER_PI_I, z1.truncate(order)),
            (0, MINUS_36_OVER_PI2, z0.truncate(order)),
        ]
    )


def _kernel_candidates(basis: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
    cands = list(basis)
    if len(basis) > 1:
        total = tuple(sum(col) for col in zip(*basis))
        if any(total):
            cands.append(total)
    return cands


def _flip(v: Sequence[Fraction]) -> tuple[Fraction, ...]:
    return tuple(-x for x in v)


def _plus_origin_sign(gexp: GeneralizedExpansion) -> int:
    """Sign of f(0) = Re(-i * c(z^1 q^0)) evaluated exactly."""
    # the z^1 coefficients on the plus side are y * i / pi, so -i * c = y / pi
    y = gexp.coeff(1, 0).terms.get((-1, 1, 0), Fraction(0))
    return (y > 0) - (y < 0)


def solve_plus(d: int, n: int | None = None, budget: int = 4) -> PlusCandidate:
    """Minimal-n plus-side candidate with a usable zero profile."""
    _check_dim(d)
    start = n_plus(d) if n is None else n
    stop = start + (budget if n is None else 0)
    diag: list[str] = []
    for nn in range(start, stop + 1):
        try:
            mons = plus_space(d, nn)
        except Infeasible as exc:
            diag.append(f"n={nn}: {exc}")
            continue
        base = plus_system(d, nn)
        basis = rational_kernel(base, len(mons))
        note = f"n={nn}: {len(base)}x{len(mons)} system, rank {rank(base)}, kernel dim {len(basis)}"
        diag.append(note)
        log.info(note)
        extra = False
        if len(basis) > 1:
            sys2 = plus_system(d, nn, extra=True)
            basis = rational_kernel(sys2, len(mons))
            extra = True
            diag.append(f"n={nn}: z-top row added, kernel dim {len(basis)}")
        if not basis:
            continue
        best = None
        for vec in _kernel_candidates(basis):
            coeffs = tuple(Fraction(x) for x in vec)
            if not any(x for (a, _, _), x in zip(mons, coeffs) if a == 2):
                continue  # depth < 2
            cand = PlusCandidate(d, nn, tuple(mons), coeffs, extra)
            prof = profile(g_expansion_plus(cand, 2), nn)
            if not (prof.c0_nonzero and prof.no_z2_nonpositive):
                continue
            # a nonzero z-top coefficient only moves f(sqrt(2n)) off zero; that
            # radius lies inside sqrt(2 n_minus) whenever the kernel is a line
            key = (prof.z_top_zero, prof.score)
            if best is None or key > best[0]:
                best = (key, cand, prof)
        if best is None:
            diag.append(f"n={nn}: no kernel element passes profile validation")
            continue
        if not best[2].z_top_zero:
            diag.append(f"n={nn}: z-top coefficient nonzero, f(sqrt(2n)) != 0")
        cand = best[1]
        gexp = g_expansion_plus(cand, 2)
        sign = _plus_origin_sign(gexp)
        if sign < 0:
            cand = PlusCandidate(d, nn, cand.monomials, _flip(cand.coeffs), extra)
        elif sign == 0:
            diag.append(f"n={nn}: f(0) vanishes exactly; sign normalized on c0 instead")
            if best[2].c0.value().real < 0:
                cand = PlusCandidate(d, nn, cand.monomials, _flip(cand.coeffs), extra)
        return PlusCandidate(cand.d, cand.n, cand.monomials, cand.coeffs, extra, tuple(diag))
    raise ConstructionFailed(f"construction failed for plus side, d={d}", diag)


# -- minus side ---------------------------------------------------------------

ThetaPoly = dict  # {(u, v, w): coefficient} for U^u V^v W^w

MINUS_THETA_BLOCKS: tuple[ThetaPoly, ThetaPoly] = (
    {(2, 0, 0): 1, (0, 2, 0): -1},  # U^2 - V^2
    {(0, 0, 1): 1},  # W
)


def theta_slash(poly: ThetaPoly, gamma: str) -> ThetaPoly:
    """Apply the slash action of S, T (or T^-1 = T on these forms) to a theta polynomial."""
    table = THETA_SLASH["T" if gamma == "Tinv" else gamma]
    idx = {"U": 0, "V": 1, "W": 2}
    out: dict[tuple[int, int, int], int] = {}
    for mono, c in poly.items():
        new = [0, 0, 0]
        sign = 1
        for name, power in zip("UVW", mono):
            s, target = table[name]
            sign *= s ** power
            new[idx[target]] += power
        key = tuple(new)
        out[key] = out.get(key, 0) + sign * c
    return {k: v for k, v in out.items() if v}


def theta_poly_series(poly: ThetaPoly, order: int) -> HalfSeries:
    u, v, w = (theta_pow4(x, order) for x in "UVW")
    total = HalfSeries.zero(order)
    for powers, x in poly.items():
        term = HalfSeries.one(order)
        for base, k in zip((u, v, w), powers):
            if k:
                term = term * base ** k
        total = total + term.scale(x)
    return total


def minus_space(d: int, n: int) -> tuple[list[Level1Monomial], list[Level1Monomial], list[Level1Monomial]]:
    _check_dim(d)
    k = -d // 2 + 12 * n
    blocks = (level1_basis(k - 2), level1_basis(k), level1_basis(k + 2))
    total = sum(len(b) for b in blocks)
    if total == 0:
        raise Infeasible(f"infeasible (d, n) = ({d}, {n}): empty candidate space")
    if d % 8 == 0:
        expected = 3 * n - d // 8 + 1
        if expected >= 0 and total != expected:
            raise ConsistencyError(f"minus space size {total} != 3n - d/8 + 1 = {expected}")
    return blocks


def _minus_columns(d: int, n: int, order: int) -> list[HalfSeries]:
    """psi~_S contribution of each basis element (block order 1, 2, 3)."""
    b1, b2, b3 = minus_space(d, n)
    t1 = theta_poly_series(theta_slash(MINUS_THETA_BLOCKS[0], "S"), order)
    t2 = theta_poly_series(theta_slash(MINUS_THETA_BLOCKS[1], "S"), order)
    ls = ell_s(order)
    cols = [t1 * level1_form(m.a, m.b, order) for m in b1]
    cols += [t2 * level1_form(m.a, m.b, order) for m in b2]
    cols += [ls * level1_form(m.a, m.b, order) for m in b3]
    return cols


def minus_system(d: int, n: int) -> list[list[Fraction]]:
    """Rows: psi~_S at q^(1/2), ..., q^(n-1/2), then constant term of G3 = 0."""
    b1, b2, b3 = minus_space(d, n)
    cols = _minus_columns(d, n, 2 * n + 1)
    rows = [[s.coeff(2 * m + 1) for s in cols] for m in range(n)]
    rows.append([Fraction(0)] * (len(b1) + len(b2)) + [Fraction(1)] * len(b3))
    return rows


def minus_origin_row(d: int, n: int) -> list[Fraction]:
    """Coefficient of q^0 in G3/Delta^n: f-(0) is proportional to it (the z*q^0 term of psi)."""
    b1, b2, b3 = minus_space(d, n)
    inv = delta_inverse_power(n, 2)
    return [Fraction(0)] * (len(b1) + len(b2)) + [(level1_form(m.a, m.b, 2 * n + 2) * inv).coeff(0) for m in b3]


@dataclass(frozen=True)
class MinusCandidate:
    d: int
    n: int
    blocks_basis: tuple[tuple[Level1Monomial, ...], tuple[Level1Monomial, ...], tuple[Level1Monomial, ...]]
    coeffs: tuple[Fraction, ...]
    log: tuple[str, ...] = field(default=(), compare=False)

    side = "minus"

    def split(self) -> tuple[tuple[Fraction, ...], ...]:
        sizes = [len(b) for b in self.blocks_basis]
        out, pos = [], 0
        for s in sizes:
            out.append(self.coeffs[pos : pos + s])
            pos += s
        return tuple(out)

    def g_blocks(self, order: int) -> tuple[HalfSeries, HalfSeries, HalfSeries]:
        res = []
        for basis, cs in zip(self.blocks_basis, self.split()):
            acc = HalfSeries.zero(order)
            for m, x in zip(basis, cs):
                if x:
                    acc = acc + level1_form(m.a, m.b, order).scale(x)
            res.append(acc)
        return tuple(res)

    def labels(self) -> list[str]:
        names = ("(U^2-V^2)", "W", "L")
        return [f"{names[i]}*{level1_label(m)}" for i, b in enumerate(self.blocks_basis) for m in b]

    def to_json(self) -> dict:
        return {
            "side": "minus",
            "d": self.d,
            "n": self.n,
            "blocks": [[list(m) for m in b] for b in self.blocks_basis],
            "labels": self.labels(),
            "coeffs": [str(c) for c in self.coeffs],
        }

    @property
    def digest(self) -> str:
        return _digest(self.to_json())

    def psi_s(self, order: int) -> HalfSeries:
        """psi_S = psi~_S / Delta^n, a pure q-series."""
        work = order + 2 * self.n
        return (s_transform_minus(self, work) * delta_inverse_power(self.n, work)).truncate(order)


def s_transform_minus(c: MinusCandidate, order: int) -> HalfSeries:
    """psi~_S = (U^2 - W^2) G1 - V G2 + L_S G3; supported on odd exponents."""
    g1, g2, g3 = c.g_blocks(order)
    t1 = theta_poly_series(theta_slash(MINUS_THETA_BLOCKS[0], "S"), order)
    t2 = theta_poly_series(theta_slash(MINUS_THETA_BLOCKS[1], "S"), order)
    image = LOG_SLASH["S"]["L"]
    log_part = HalfSeries.zero(order)
    if image.get("LS"):
        log_part = ell_s(order).scale(image["LS"])
    out = t1 * g1 + t2 * g2 + log_part * g3
    leak = [e for e in out.support() if e % 2 == 0]
    if leak:
        raise ConsistencyError(f"psi~_S leaks onto integer exponents {sorted(leak)[:5]}")
    return out


def psi_expansions(
    c: MinusCandidate, order: int, which: Sequence[str] = ("I", "T", "Tinv", "S")
) -> dict[str, GeneralizedExpansion]:
    """psi_I, psi_T, psi_Tinv, psi_S as generalized expansions, from the slash tables."""
    work = order + 2 * c.n
    g1, g2, g3 = c.g_blocks(work)
    dinv = delta_inverse_power(c.n, work)
    g3d = g3 * dinv
    tail = ell_tail(work)
    ls = ell_s(work)
    out = {}
    for gamma in which:
        if gamma == "I":
            p1, p2 = MINUS_THETA_BLOCKS
            image = {"L": 1}
        else:
            p1 = theta_slash(MINUS_THETA_BLOCKS[0], gamma)
            p2 = theta_slash(MINUS_THETA_BLOCKS[1], gamma)
            image = LOG_SLASH[gamma]["L"]
        theta = (theta_poly_series(p1, work) * g1 + theta_poly_series(p2, work) * g2) * dinv
        blocks = [(0, SymbolicCoeff.rational(1), theta.truncate(order))]
        a = image.get("L", 0)
        if a:
            blocks += [
                (1, PI_I * a, g3d.truncate(order)),
                (0, FOUR_LOG2 * a, g3d.truncate(order)),
                (0, SymbolicCoeff.rational(a), (tail * g3d).truncate(order)),
            ]
        if image.get("LS"):
            blocks.append((0, SymbolicCoeff.rational(image["LS"]), (ls * g3d).truncate(order)))
        if image.get("pi_i"):
            blocks.append((0, PI_I * image["pi_i"], g3d.truncate(order)))
        out[gamma] = GeneralizedExpansion.from_blocks(blocks)
    return out


def psi_i_expansion(c: MinusCandidate, order: int) -> GeneralizedExpansion:
    return psi_expansions(c, order, ("I",))["I"]


def solve_minus(d: int, n: int | None = None, budget: int = 4) -> MinusCandidate:
    """Minimal-n minus-side candidate (n vanishing rows plus the z-top row).

    The row forcing f-(0) = 0 is added whenever the kernel survives it.
    """
    _check_dim(d)
    start = n_minus(d) if n is None else n
    stop = start + (budget if n is None else 0)
    diag: list[str] = []
    for nn in range(start, stop + 1):
        try:
            blocks = minus_space(d, nn)
        except Infeasible as exc:
            diag.append(f"n={nn}: {exc}")
            continue
        ncols = sum(len(b) for b in blocks)
        system = minus_system(d, nn)
        basis = rational_kernel(system, ncols)
        note = f"n={nn}: {len(system)}x{ncols} system, rank {rank(system)}, kernel dim {len(basis)}"
        diag.append(note)
        log.info(note)
        if not basis:
            continue
        origin = rational_kernel(system + [minus_origin_row(d, nn)], ncols)
        if origin:
            basis = origin
            note = f"n={nn}: f-(0)=0 row added, kernel dim {len(basis)}"
        else:
            note = f"n={nn}: f-(0)=0 row infeasible; keeping f-(0) != 0"
        diag.append(note)
        log.info(note)
        bb = tuple(tuple(b) for b in blocks)
        best = None
        for vec in _kernel_candidates(basis):
            cand = MinusCandidate(d, nn, bb, tuple(Fraction(x) for x in vec))
            prof = profile(psi_i_expansion(cand, 2), nn)
            key = (prof.sz_compatible, prof.score)
            if best is None or key > best[0]:
                best = (key, cand, prof)
        if not best[2].sz_compatible:
            diag.append(f"n={nn}: no kernel element passes profile validation")
            continue
        cand, prof = best[1], best[2]
        coeffs = cand.coeffs
        if prof.c0.value().real < 0:
            coeffs = _flip(coeffs)
        return MinusCandidate(d, nn, bb, coeffs, tuple(diag))
    raise ConstructionFailed(f"construction failed for minus side, d={d}", diag)


def solve(d: int, side: str, n: int | None = None):
    if side == "plus":
        return solve_plus(d, n)
    if side == "minus":
        return solve_minus(d, n)
    raise ValueError(f"side must be 'plus' or 'minus', got {side!r}")


def candidate_from_json(data: dict):
    if data["side"] == "plus":
        return PlusCandidate(
            int(data["d"]),
            int(data["n"]),
            tuple(tuple(m) for m in data["monomials"]),
            tuple(Fraction(x) for x in data["coeffs"]),
            bool(data.get("extraRow", False)),
        )
    blocks = tuple(tuple(Level1Monomial(*m) for m in b) for b in data["blocks"])
    return MinusCandidate(int(data["d"]), int(data["n"]), blocks, tuple(Fraction(x) for x in data["coeffs"]))

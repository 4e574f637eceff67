"""Acceptance gate: one test per criterion, each printing a single PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the verdict lines.
"""

import random
import time
from fractions import Fraction

import mpmath

from spherebound import bounds
from spherebound.construct import (
    ConstructionFailed,
    PlusCandidate,
    g_expansion_plus,
    minus_space,
    plus_space,
    plus_system,
    s_transform_minus,
    solve,
    solve_minus,
    solve_plus,
)
from spherebound.kernel import rational_kernel
from spherebound.modforms import delta, dim_m, eisenstein, ell_s, theta_pow4
from spherebound.qseries import HalfSeries
from spherebound.schwartz import build


def verdict(number: int, ok: bool, detail: str) -> None:
    print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")
    assert ok, detail


def _proportional(u, v) -> bool:
    u, v = [Fraction(x) for x in u], [Fraction(x) for x in v]
    k = next(i for i, x in enumerate(v) if x)
    if not u[k]:
        return False
    ratio = u[k] / v[k]
    return all(a == ratio * b for a, b in zip(u, v))


def test_criterion_1_series_regression():
    t = time.perf_counter()
    ls = ell_s(16)
    head = ls.dense(1, 4) == [-16, 0, Fraction(-64, 3)]
    u, v, w = (theta_pow4(x, 64) for x in "UVW")
    jacobi = (u - v - w).is_zero() and u.trunc == 64
    disc = (eisenstein(4, 64) ** 3 - eisenstein(6, 64) ** 2).agrees(delta(64).scale(1728))
    elapsed = time.perf_counter() - t
    ok = head and jacobi and disc and elapsed < 1
    verdict(1, ok, f"L_S head={head} U=V+W={jacobi} E4^3-E6^2=1728Delta={disc} ({elapsed:.2f}s)")


def test_criterion_2_d8_plus():
    t = time.perf_counter()
    c = solve_plus(8, n=1)
    elapsed = time.perf_counter() - t
    labels = c.labels() == ["E2^2*E4^2", "E2*E4*E6", "E4^3", "E6^2"]
    ok = labels and _proportional(c.coeffs, (1, -2, 0, 1)) and elapsed < 1
    verdict(2, ok, f"coeffs={[str(x) for x in c.coeffs]} labels ok={labels} ({elapsed:.2f}s)")


def test_criterion_3_d48_plus():
    t = time.perf_counter()
    published = {
        "E2^2*E4^3": 1556796748,
        "E2*E4^2*E6": -704733786,
        "E4^4": -1029088507,
        "E4*E6^2": 254261020,
        "E2^2*E6^2": -77235475,
    }
    c = solve_plus(48, n=3)
    target = [published[label] for label in c.labels()]
    matches = _proportional(c.coeffs, target)
    ref = PlusCandidate(48, 3, c.monomials, tuple(Fraction(x) for x in target))
    series = ref.phi_tilde(10)
    q4 = series.coeff(8)
    vanishes = series.lead >= 8
    elapsed = time.perf_counter() - t
    ok = matches and vanishes and q4 == -1673465440313507328 and elapsed < 10
    verdict(
        3,
        ok,
        f"solver line={[str(x) for x in c.coeffs]}; published vector proportional={matches}; "
        f"published vector vanishes through q^3={vanishes} (lead q^{series.lead // 2}), "
        f"its q^4 coefficient={q4} vs -1673465440313507328 ({elapsed:.2f}s)",
    )


def test_criterion_4_minus_side():
    t = time.perf_counter()
    c8 = solve_minus(8, n=1)
    shape = [len(b) for b in c8.blocks_basis] == [1, 1, 1]
    ok8 = shape and _proportional(c8.coeffs, (Fraction(1, 3), Fraction(2, 3), 0))
    try:
        solve_minus(48, n=3)
        infeasible3 = False
    except ConstructionFailed:
        infeasible3 = True
    feasible4 = solve_minus(48, n=4).n == 4
    elapsed = time.perf_counter() - t
    ok = ok8 and infeasible3 and feasible4 and elapsed < 10
    verdict(4, ok, f"d=8 coeffs={[str(x) for x in c8.coeffs]}; d=48 n=3 infeasible={infeasible3}, n=4 feasible={feasible4} ({elapsed:.2f}s)")


def _sig_digits(literal: str) -> int:
    mantissa = literal.lower().split("e")[0].replace(".", "").lstrip("0")
    return len(mantissa)


def test_criterion_5_bound_table():
    t = time.perf_counter()
    printed = {8: "0.2537", 16: "0.23533", 24: "0.0019", 48: "2.310e-5", 72: "4.495e-10", 96: "7.666e-12"}
    rows = bounds.table(printed)
    results = []
    for rep in rows:
        lit = printed[rep.d]
        k = _sig_digits(lit)
        results.append((rep.d, float(f"{rep.bound:.{k}g}") == float(lit) and rep.f_plus_origin > 0))
    elapsed = time.perf_counter() - t
    ok = all(r for _, r in results) and elapsed < 60
    verdict(5, ok, f"rows={results} ({elapsed:.1f}s)")


def test_criterion_6_zero_structure():
    t = time.perf_counter()
    worst = {"f_r0": 0.0, "min_fp_r0": float("inf"), "beyond": 0.0}
    for d in (8, 24):
        for side in ("plus", "minus"):
            f = build(solve(d, side))
            with mpmath.workprec(f.config.prec):
                r0 = mpmath.sqrt(2 * f.n)
                worst["f_r0"] = max(worst["f_r0"], float(abs(f.evaluate(r0))))
                fp = f.deriv_at_r0()
                assert abs(fp - f.derivative(r0)) <= 1e-8 * abs(fp)
                worst["min_fp_r0"] = min(worst["min_fp_r0"], float(abs(fp)))
                for m in range(f.n + 1, f.n + 5):
                    r = mpmath.sqrt(2 * m)
                    worst["beyond"] = max(worst["beyond"], float(abs(f.evaluate(r)) + abs(f.derivative(r))))
    elapsed = time.perf_counter() - t
    ok = worst["f_r0"] < 1e-9 and worst["min_fp_r0"] > 1e-3 and worst["beyond"] < 1e-6 and elapsed < 120
    verdict(6, ok, f"max|f(r0)|={worst['f_r0']:.2e} min|f'(r0)|={worst['min_fp_r0']:.3g} max(|f|+|f'|) beyond={worst['beyond']:.2e} ({elapsed:.1f}s)")


def test_criterion_7_cross_method():
    t = time.perf_counter()
    radii = [0.1 + i * 2.9 / 39 for i in range(40)]
    worst = 0.0
    for d in (8, 24):
        for side in ("plus", "minus"):
            f = build(solve(d, side))
            for r in radii:
                a, b = f.eval_closed(r), f.eval_contour(r)
                worst = max(worst, float(abs(a - b) / max(abs(a), abs(b))))
    origin = 0.0
    for d in (8, 24):
        f = build(solve(d, "plus"))
        lim = f.eval_limit_even(0)
        origin = max(origin, float(abs(f.eval_contour(0) - lim) / abs(lim)))
    elapsed = time.perf_counter() - t
    ok = worst < 1e-7 and origin < 1e-6 and elapsed < 300
    verdict(7, ok, f"max relative closed/contour gap={worst:.2e} on 4x40 radii; f+(0) gap={origin:.2e} ({elapsed:.1f}s)")


def test_criterion_8_hankel_oracle():
    t = time.perf_counter()
    worst = 0.0
    for side in ("plus", "minus"):
        f = build(solve(8, side))
        for s in (0.0, 0.7, 1.3, 2.1):
            worst = max(worst, f.fourier_residual(s))
    elapsed = time.perf_counter() - t
    ok = worst < 1e-4 and elapsed < 300
    verdict(8, ok, f"max |f^ -+ f| = {worst:.2e} at s in {{0, 0.7, 1.3, 2.1}} ({elapsed:.1f}s)")


def test_criterion_9_asymptotics():
    t = time.perf_counter()
    rate = bounds.asymptotic_rate(640000)
    elapsed = time.perf_counter() - t
    ok = 0.448 <= rate <= 0.458 and elapsed < 1
    verdict(9, ok, f"-log2(bound)/d at d=640000 = {rate:.6f} ({elapsed:.3f}s)")


def _random_series(rng: random.Random, trunc: int = 10) -> HalfSeries:
    lead = rng.randint(-3, 3)
    cs = [Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(trunc - lead)]
    return HalfSeries(lead, cs, trunc)


def test_criterion_10_property_suites():
    t = time.perf_counter()
    rng = random.Random(20240601)
    ring = True
    for _ in range(200):
        a, b, c = (_random_series(rng) for _ in range(3))
        ring &= (a * b).agrees(b * a) and ((a * b) * c).agrees(a * (b * c))
        ring &= (a * (b + c)).agrees(a * b + a * c) and ((a + b) + c).agrees(a + (b + c))
    inv = True
    for _ in range(200):
        u = _random_series(rng)
        if u.is_zero():
            continue
        inv &= (u * u.invert()).agrees(HalfSeries.one(u.trunc - u.lead))
    counts = True
    half_integer = True
    z2_positive = True
    for d in range(8, 65, 8):
        for n in range(1, 8):
            k = -d // 2 + 12 * n
            if k >= 0 and 3 * n - d // 8 + 2 >= 0:
                counts &= len(plus_space(d, n)) == dim_m(k) + dim_m(k + 2) + dim_m(k + 4) == 3 * n - d // 8 + 2
            if k - 2 >= 0 and 3 * n - d // 8 + 1 >= 0:
                counts &= sum(map(len, minus_space(d, n))) == 3 * n - d // 8 + 1
        cm = solve_minus(d)
        half_integer &= all(e % 2 for e in s_transform_minus(cm, 2 * cm.n + 8).support())
        cp = solve_plus(d)
        z2_positive &= min(g_expansion_plus(cp, 4).support(2)) > 0
        # every kernel element of the base system keeps the z^2 block off q^(<=0)
        for vec in rational_kernel(plus_system(d, cp.n), len(cp.monomials)):
            cand = PlusCandidate(d, cp.n, cp.monomials, tuple(Fraction(x) for x in vec))
            z2_positive &= all(e > 0 for e in g_expansion_plus(cand, 4).support(2))
    elapsed = time.perf_counter() - t
    ok = ring and inv and counts and half_integer and z2_positive and elapsed < 60
    verdict(10, ok, f"ring={ring} invert={inv} counts={counts} half-integer={half_integer} z2>0={z2_positive} ({elapsed:.1f}s)")

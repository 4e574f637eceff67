import math
from fractions import Fraction

import pytest

from spherebound import bounds


def test_n_pair_examples():
    assert bounds.n_pair(8) == (1, 1)
    assert bounds.n_pair(24) == (2, 2)
    assert bounds.n_pair(48) == (3, 4)
    with pytest.raises(ValueError):
        bounds.n_pair(12)


def test_n_minus_dominates_n_plus():
    assert all(bounds.n_pair(d)[1] >= bounds.n_pair(d)[0] for d in range(8, 10**6 + 1, 8))


def test_bound_formula_closed_forms():
    assert bounds.bound_formula(8) == pytest.approx(math.pi**4 / 384, rel=1e-14)
    assert bounds.bound_formula(16) == pytest.approx(math.pi**8 / math.factorial(8), rel=1e-14)
    assert bounds.bound_formula(24) == pytest.approx(math.pi**12 / math.factorial(12), rel=1e-14)


def test_asymptotic_rate_trends_to_limit():
    limit = -math.log2(math.sqrt(math.pi * math.e / 16))
    rates = [bounds.asymptotic_rate(8 * 2**k) for k in range(5, 14)]
    gaps = [abs(r - limit) for r in rates]
    assert all(a > b for a, b in zip(gaps, gaps[1:]))
    assert abs(bounds.asymptotic_rate(10**9) - limit) < 1e-6


def test_packing_bound_with_cross_check():
    rep = bounds.packing_bound(24)
    assert rep.bound > 0 and rep.n_minus >= rep.n_plus
    assert rep.f_plus_origin > 0
    assert not rep.notes
    assert bounds.format_bound(rep.bound) == "0.00193"


def test_sign_verify_empty_grid_and_c_zero():
    empty = bounds.sign_verify(8, Fraction(1), r_max=-1.0)
    assert empty.checked_grid == 0 and empty.violations == 0
    alone = bounds.sign_verify(8, 0, r_max=3.0, step=0.1)
    assert alone.violations > 0  # f+ alone is not <= 0 beyond sqrt(2)


@pytest.mark.parametrize("d", [8, 24])
def test_choose_mix_finds_violation_free_combination(d):
    c, rec = bounds.choose_mix(d, r_max=5.0, step=0.1)
    assert rec.violations == 0
    assert c != 0 and c.denominator <= 1000


def test_choose_mix_is_deterministic_at_zero_tolerance():
    c1, rec1 = bounds.choose_mix(8, r_max=4.0, step=0.1, tol=0.0)
    c2, rec2 = bounds.choose_mix(8, r_max=4.0, step=0.1, tol=0.0)
    assert c1 == c2 and rec1 == rec2
    assert rec1.tol == 0.0 and rec1.checked_grid == 41


def test_literature_annotations_are_labelled():
    lit = bounds.literature_annotations()
    assert "literature" in lit["description"].lower() or "published" in lit["description"].lower()
    assert set(lit["rows"]) == {"8", "16", "24", "48", "72", "96"}

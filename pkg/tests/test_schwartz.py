import mpmath
import pytest

from spherebound.construct import solve
from spherebound.schwartz import EvalConfig, EvaluationError, MagicFunction, build, sin2_half_pi


@pytest.fixture(scope="module", params=[("plus", 8), ("minus", 8), ("plus", 24), ("minus", 24)], ids=str)
def f(request):
    side, d = request.param
    return build(solve(d, side))


def test_two_expansions_of_g_agree(f):
    with mpmath.workprec(128):
        for u in (mpmath.mpc(0.2, 1.05), mpmath.mpc(-0.6, 0.9), mpmath.mpc(0, 1)):
            a, b = f.g_near(u), f.g_far(u)
            assert abs(a - b) <= 1e-25 * max(1, abs(a))


def test_g_is_real_on_imaginary_axis(f):
    with mpmath.workprec(128):
        for t in (0.4, 1.0, 1.7):
            v = f.g(mpmath.mpc(0, t))
            assert abs(v.imag) <= 1e-25 * max(1, abs(v))


@pytest.mark.parametrize("r", [0.25, 1.1, 1.9, 2.6])
def test_closed_and_contour_agree(f, r):
    a, b = f.eval_closed(r), f.eval_contour(r)
    assert abs(a - b) <= 1e-12 * abs(a)


def test_limit_formula_is_the_closed_form_limit(f):
    for k in range(0, f.n + 2):
        lim = f.eval_limit_even(k)
        near = f.eval_closed(mpmath.sqrt(2 * k) + mpmath.mpf("1e-15")) if k else f.eval_closed(1e-12)
        assert abs(lim - near) <= 1e-9 * max(1, abs(lim))
    # r^2 is an exact even integer here, so the dispatcher takes the limit route
    assert f.evaluate(0.0) == f.eval_limit_even(0)
    assert f.evaluate(2.0) == f.eval_limit_even(2)


def test_derivative_at_r0(f):
    analytic = f.deriv_at_r0()
    numeric = f.derivative(f.r0)
    assert analytic < 0
    assert abs(analytic - numeric) <= 1e-8 * abs(analytic)


def test_double_zeros_beyond_r0(f):
    for m in range(f.n + 1, f.n + 4):
        r = mpmath.sqrt(2 * m)
        assert abs(f.eval_closed(r)) < 1e-20
        assert abs(f.derivative(r)) < 1e-10


def test_sign_normalization(f):
    if f.side == "plus":
        assert f.value_at_origin() > 0
    else:
        assert f.value_at_origin() == 0


def test_sin2_reduction_is_exact_at_even_squares():
    with mpmath.workprec(128):
        assert sin2_half_pi(mpmath.mpf(1e6)) == 0
        assert abs(sin2_half_pi(mpmath.mpf(1)) - 1) < 1e-30


def test_errors_and_config(monkeypatch):
    fp = build(solve(8, "plus"))
    with pytest.raises(ValueError):
        fp.evaluate(-1.0)
    with pytest.raises(ValueError):
        fp.evaluate(1.0, method="limit")
    with pytest.raises(EvaluationError):
        fp.g(mpmath.mpc(0.3, -1))
    monkeypatch.setenv("SPHEREBOUND_PRECISION", "96")
    assert EvalConfig.from_env().prec == 96
    assert EvalConfig.from_env(prec=200).prec == 200


def test_precision_independence():
    c = solve(8, "minus")
    lo = MagicFunction(c, EvalConfig(prec=96))
    hi = MagicFunction(c, EvalConfig(prec=192))
    for r in (0.5, 1.7, 3.2):
        a, b = lo.eval_closed(r), hi.eval_closed(r)
        assert abs(a - b) <= 1e-20 * abs(b)


def test_order_grows_when_truncation_is_too_low():
    c = solve(8, "plus")
    f = MagicFunction(c, EvalConfig(numeric_order=20))
    val = f.eval_closed(1.0)
    assert f.order > 20
    assert abs(val - build(c).eval_closed(1.0)) < 1e-20

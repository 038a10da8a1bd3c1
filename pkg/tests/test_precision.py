from fractions import Fraction

import mpmath
import pytest
from hypothesis import assume, given, strategies as st

from zeta5.precision import (
    ErrorBoundedValue,
    PrecisionError,
    Verdict,
    certified_pi,
    constants_table,
    eval_zeta_form,
    linear_combination,
    zeta_direct,
    zeta_even_via_pi,
    zeta_int,
)
from zeta5.zeta_forms import ZetaForm

from . import strategies


def _mpf_fraction(x) -> Fraction:
    sign, man, exp, _ = x._mpf_
    return (-1) ** sign * Fraction(int(man)) * Fraction(2) ** int(exp)


def _ball(mid, rad, bits=128):
    return ErrorBoundedValue(Fraction(mid), Fraction(rad), bits)


@given(strategies.rationals, strategies.radii, strategies.rationals, strategies.radii, st.data())
def test_ball_ops_contain_exact_results(a, ra, b, rb, data):
    x, y = _ball(a, ra), _ball(b, rb)
    # any points inside the inputs map into the outputs
    ta = a + data.draw(st.sampled_from([-ra, 0, ra]))
    tb = b + data.draw(st.sampled_from([-rb, 0, rb]))
    assert (x + y).contains(ta + tb)
    assert (x - y).contains(ta - tb)
    assert (x * y).contains(ta * tb)
    if y.lo > 0 or y.hi < 0:
        assert (x / y).contains(ta / tb)
    assert abs(x).contains(abs(ta))


@given(strategies.positive_rationals, st.sampled_from([Fraction(1, 2), Fraction(-1, 3), Fraction(5, 7), Fraction(3)]))
def test_power_contains_mpmath_value(a, e):
    x = ErrorBoundedValue.exact(a, 128)
    with mpmath.workprec(400):
        ref = _mpf_fraction(mpmath.power(mpmath.mpf(a.numerator) / a.denominator, mpmath.mpf(e.numerator) / e.denominator))
    got = x.power(e)
    assert abs(got.estimate - ref) <= got.radius + Fraction(1, 2**380)
    assert got.radius < Fraction(1, 2**100) * max(1, abs(ref))


@given(strategies.positive_rationals)
def test_log_contains_mpmath_value(a):
    with mpmath.workprec(400):
        ref = _mpf_fraction(mpmath.log(mpmath.mpf(a.numerator) / a.denominator))
    got = ErrorBoundedValue.exact(a, 128).log()
    assert abs(got.estimate - ref) <= got.radius + Fraction(1, 2**380)


def test_power_requires_positive_ball():
    with pytest.raises(PrecisionError):
        _ball(0, Fraction(1, 10)).power(Fraction(1, 2))
    with pytest.raises(PrecisionError):
        _ball(-1, 0).log()


def test_three_valued_compare():
    one = ErrorBoundedValue.exact(1, 64)
    fuzzy = _ball(1, Fraction(1, 100), 64)
    assert one.compare("<", 2).verdict is Verdict.HOLDS
    assert one.compare(">", 2).verdict is Verdict.FAILS
    assert fuzzy.compare("<", 1).verdict is Verdict.UNDECIDABLE
    assert fuzzy.compare(">=", Fraction(98, 100)).verdict is Verdict.HOLDS
    assert one.compare("<=", 1).verdict is Verdict.HOLDS
    d = one.compare("<", 2, "x")
    assert d.lhs == one and d.rhs.estimate == 2


def test_uncertified_never_decides():
    mc = ErrorBoundedValue(Fraction(1), Fraction(1, 10**6), 64, certified=False)
    assert mc.compare("<", 5).verdict is Verdict.UNDECIDABLE


def test_json_is_deterministic_strings():
    x = ErrorBoundedValue.exact(Fraction(1, 3), 128)
    assert x.to_json() == x.to_json()
    assert all(isinstance(s, str) for s in x.to_json())


@pytest.mark.parametrize("s", [2, 3, 4, 5])
@pytest.mark.parametrize("bits", [64, 256, 512])
def test_zeta_contains_mpmath_reference(s, bits):
    z = zeta_int(s, bits)
    with mpmath.workprec(bits + 200):
        ref = _mpf_fraction(mpmath.zeta(s))
    assert z.contains(ref)
    assert z.radius <= Fraction(2) ** (1 - bits)


def test_even_zeta_via_pi_overlaps():
    for k, s in ((1, 2), (2, 4)):
        assert zeta_even_via_pi(k, 256).overlaps(zeta_int(s, 256))


def test_direct_tail_method_contains_value():
    z = zeta_direct(5, 1000, 128)
    assert z.contains_ball(zeta_int(5, 128)) or z.overlaps(zeta_int(5, 128))


def test_pi_contains_reference():
    with mpmath.workprec(500):
        ref = _mpf_fraction(mpmath.pi)
    assert certified_pi(256).contains(ref)


@pytest.mark.parametrize("s", [1, 6])
def test_zeta_domain(s):
    with pytest.raises(ValueError):
        zeta_int(s, 128)


def test_eval_zeta_form_example():
    v = eval_zeta_form(ZetaForm(c5=Fraction(1)), constants_table(256))
    assert abs(float(v) - 1.0369277551433699) < 1e-15


@given(st.lists(strategies.rationals, min_size=4, max_size=4), strategies.rationals)
def test_linear_combination_contains_exact_evaluation(coeffs, c0):
    t = constants_table(128)
    vals = [t.zeta(s) for s in (2, 3, 4, 5)]
    got = linear_combination(c0, coeffs, vals, 128)
    with mpmath.workprec(400):
        ref = mpmath.mpf(c0.numerator) / c0.denominator + sum(
            mpmath.mpf(c.numerator) / c.denominator * mpmath.zeta(s) for c, s in zip(coeffs, (2, 3, 4, 5))
        )
        ref = _mpf_fraction(ref)
    assert abs(got.estimate - ref) <= got.radius + Fraction(1, 2**380)


def test_constants_table_is_cached_per_precision():
    assert constants_table(192) is constants_table(192)

import math
from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from zeta5.exact_core import lcm_upto
from zeta5.linear_forms import (
    MAX_N,
    CapacityError,
    IntegerLinearForm,
    expand_In,
    integer_forms,
    legendre_coeffs,
    legendre_rodrigues,
    monomial_terms,
    quadrature_In,
    to_integer_form,
)
from zeta5.precision import constants_table, eval_zeta_form
from zeta5.zeta_forms import ZetaForm

TABLE = constants_table(256)


def _beta_series_In(n: int, terms: int = 400) -> mpmath.mpf:
    """Independent value of the expanded integral, term by term in k:
    int x^k (1-x)^n dx = B(k+1, n+1) for x1..x4 and sum_j p_j / (k+j+1) for x5."""
    p = [(-1) ** j * math.comb(n, j) * math.comb(n + j, j) for j in range(n + 1)]
    with mpmath.workprec(200):
        total = mpmath.mpf(0)
        for k in range(terms):
            b = mpmath.beta(k + 1, n + 1)
            total += b**4 * mpmath.fsum(mpmath.mpf(c) / (k + j + 1) for j, c in enumerate(p))
        return total


@pytest.mark.parametrize("n", range(0, 9))
def test_legendre_matches_sympy(n):
    x = sympy.symbols("x")
    poly = sympy.Poly(sympy.expand(sympy.legendre(n, 1 - 2 * x)), x)
    expected = [int(poly.coeff_monomial(x**j)) for j in range(n + 1)]
    assert list(legendre_coeffs(n).coeffs) == expected
    assert legendre_rodrigues(n) == tuple(expected)


def test_legendre_is_callable():
    p = legendre_coeffs(2)
    assert p(Fraction(1, 2)) == Fraction(-1, 2)
    assert p(0) == 1 and p(1) == 1


def test_n0_is_zeta5():
    assert expand_In(0) == ZetaForm(c5=Fraction(1))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_expansion_matches_beta_series(n):
    v = float(eval_zeta_form(expand_In(n), TABLE))
    ref = float(_beta_series_In(n))
    assert v == pytest.approx(ref, rel=1e-12, abs=0)


@pytest.mark.parametrize("n", range(0, 8))
def test_oriented_value_positive(n):
    assert eval_zeta_form(expand_In(n).scale((-1) ** n), TABLE).compare(">", 0).holds


def test_monomial_multiplicities_cover_full_product():
    n = 3
    total = sum(t.multiplicity for t in monomial_terms(n)) // (n + 1)
    assert total == (n + 1) ** 4


@pytest.mark.parametrize(
    "n,expected",
    [
        (0, (0, 0, 0, 1, 0, 1)),
        (1, (-105, -5, -15, -1, 196, 1)),
        (2, (23100, -9320, 3600, -2848, -27738, 2)),
    ],
)
def test_small_integer_forms(n, expected):
    f = to_integer_form(n)
    assert (f.a, f.b, f.c, f.d, f.e, f.lcm) == expected


@pytest.mark.parametrize("n", range(0, 8))
def test_integrality_and_scaling(n):
    f = to_integer_form(n)
    m = lcm_upto(max(n, 1))[max(n, 1)] if n else 1
    assert f.lcm == m
    assert f.zeta_form().scale(Fraction(1, m**5)) == expand_In(n)


def test_capacity_error():
    with pytest.raises(CapacityError):
        to_integer_form(MAX_N + 1)
    with pytest.raises(ValueError):
        expand_In(-1)


def test_form_json_and_csv():
    f = to_integer_form(3)
    assert IntegerLinearForm.from_json(f.to_json()) == f
    assert f.csv_row()[0] == "3"
    assert all(isinstance(v, str) for k, v in f.to_json().items() if k != "n")


def test_parallel_forms_match_serial():
    assert integer_forms(range(5), workers=2) == integer_forms(range(5), workers=1)


@pytest.mark.parametrize("n", [0, 1, 2])
def test_monte_carlo_contains_oriented_value(n):
    mc = quadrature_In(n, samples=200_000, seed=7)
    target = eval_zeta_form(expand_In(n).scale((-1) ** n), TABLE)
    assert mc.contains_ball(target) or mc.overlaps(target)
    assert mc.certified is False


def test_monte_carlo_is_seed_deterministic():
    a = quadrature_In(1, samples=50_000, seed=3)
    b = quadrature_In(1, samples=50_000, seed=3)
    assert a == b and quadrature_In(1, samples=50_000, seed=4) != a


@settings(max_examples=5)
@given(st.integers(min_value=1, max_value=6))
def test_alpha_plus_d_zeta5_plus_e_is_the_whole_form(n):
    f = to_integer_form(n)
    assert f.alpha_form() + ZetaForm(c0=Fraction(f.e), c5=Fraction(f.d)) == f.zeta_form()

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from biharmonic_maps.errors import DomainError
from biharmonic_maps.specfun import beta_integral, gamma, lgamma, log_beta_integral, sphere_volume


@given(st.floats(min_value=1e-3, max_value=170.0))
def test_lgamma_matches_math(x):
    expected = math.lgamma(x)
    # Absolute near the zeros at x = 1 and x = 2, relative elsewhere.
    assert abs(lgamma(x) - expected) <= 1e-12 * max(1.0, abs(expected))


@pytest.mark.parametrize("n", range(1, 15))
def test_gamma_factorial(n):
    assert gamma(n) == pytest.approx(math.factorial(n - 1), rel=1e-13)


def test_gamma_half():
    assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)


@pytest.mark.parametrize("x", [0.0, -1.0, -2.5, math.inf, math.nan])
def test_lgamma_domain(x):
    with pytest.raises(DomainError):
        lgamma(x)


@pytest.mark.parametrize(
    "n, value",
    [(0, 2.0), (1, 2 * math.pi), (2, 4 * math.pi), (3, 2 * math.pi**2), (4, 8 * math.pi**2 / 3)],
)
def test_sphere_volume_known(n, value):
    assert sphere_volume(n) == pytest.approx(value, rel=1e-14)


def test_sphere_volume_recursion_and_peak():
    for n in range(2, 40):
        assert sphere_volume(n) == pytest.approx(2 * math.pi / (n - 1) * sphere_volume(n - 2), rel=1e-13)
    vols = [sphere_volume(n) for n in range(0, 30)]
    assert max(range(30), key=vols.__getitem__) == 6


def test_sphere_volume_negative():
    with pytest.raises(DomainError):
        sphere_volume(-1)


def test_beta_integral_exact_rational():
    # int (1-x^2)^4 x^4 = sum_k (-1)^k C(4,k) / (2k + 5)
    exact = sum(Fraction((-1) ** k * math.comb(4, k), 2 * k + 5) for k in range(5))
    assert beta_integral(4, 4) == pytest.approx(float(exact), rel=1e-13)
    assert float(exact) == pytest.approx(8.5254e-3, rel=1e-4)


def test_beta_integral_simple_cases():
    assert beta_integral(0, 0) == pytest.approx(1.0, rel=1e-14)
    assert beta_integral(1, 0) == pytest.approx(2 / 3, rel=1e-14)
    assert beta_integral(0, 1) == pytest.approx(0.5, rel=1e-14)


@given(st.floats(min_value=-0.9, max_value=50), st.floats(min_value=-0.9, max_value=50))
def test_log_beta_consistent(a, b):
    assert math.exp(log_beta_integral(a, b)) == pytest.approx(beta_integral(a, b), rel=1e-12)


@pytest.mark.parametrize("a, b", [(-1.0, 1.0), (1.0, -1.0), (-2.0, 3.0)])
def test_beta_integral_domain(a, b):
    with pytest.raises(DomainError):
        beta_integral(a, b)


@pytest.mark.parametrize(
    "x, value",
    [(6.0, 4.787491742782046), (0.5, 0.5723649429247001), (2.5, math.log(1.5 * 0.5 * math.sqrt(math.pi)))],
)
def test_lgamma_examples(x, value):
    assert lgamma(x) == pytest.approx(value, rel=1e-14)


def test_lgamma_recurrence():
    for x in np.linspace(0.5, 50.0, 300):
        assert math.exp(lgamma(x + 1)) == pytest.approx(x * math.exp(lgamma(x)), rel=1e-12)


def test_beta_integral_examples():
    assert beta_integral(1, 1) == pytest.approx(0.25, rel=1e-14)
    assert beta_integral(0, 4) == pytest.approx(0.2, rel=1e-14)


def test_sphere_volume_positive():
    assert all(sphere_volume(n) > 0 for n in range(0, 200))

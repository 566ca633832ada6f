import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from biharmonic_maps.energy import bienergy
from biharmonic_maps.errors import DomainError
from biharmonic_maps.maps import MapSpec
from biharmonic_maps.quadrature import gauss_legendre
from biharmonic_maps.specfun import beta_integral, sphere_volume
from biharmonic_maps.stability import (
    RadialProfile,
    bienergy_along_variation,
    evaluate,
    fifth_coefficient,
    instability_scan,
    minimise_p,
    potential_coefficient,
    printed_second_variation,
    radial_terms,
    second_variation_beta_sum,
    second_variation_gamma,
    second_variation_quadrature,
    second_variation_sfd,
)


def test_profile_admissibility():
    prof = RadialProfile.power(3.0)
    r = np.array([0.2, 0.5])
    assert np.allclose(prof.V(r), (1 - r * r) ** 3)
    with pytest.raises(DomainError):
        RadialProfile.power(2.0)
    with pytest.raises(DomainError):
        RadialProfile(V=lambda r: 1 - r * r, dV=lambda r: -2 * r, d2V=lambda r: -2 + 0 * r)


def test_profile_laplacian_matches_fd():
    prof = RadialProfile.power(4.5)
    m, r, h = 6, 0.4, 1e-4
    V = lambda t: float(prof.V(np.array([t]))[0])
    fd = (V(r + h) - 2 * V(r) + V(r - h)) / h**2 + (m - 1) / r * (V(r + h) - V(r - h)) / (2 * h)
    assert float(prof.laplacian(np.array([r]), m)[0]) == pytest.approx(fd, rel=1e-6)


@pytest.mark.parametrize("m", range(5, 61))
def test_coefficient_identities_exact(m):
    assert 4 * (m - 4) ** 2 + potential_coefficient("mn2-rot", m) == fifth_coefficient("mn2-rot", m)
    assert 4 * (m - 4) ** 2 + potential_coefficient("mn3-rot", m) == fifth_coefficient("mn3-rot", m)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["mn2-rot", "mn3-rot"]), st.integers(5, 30), st.floats(2.5, 40.0))
def test_gamma_equals_beta_sum(family, m, p):
    g = second_variation_gamma(family, m, p)
    b = second_variation_beta_sum(family, m, p)
    # relative to the largest row, since rows cancel heavily for large p
    scale = max(abs(c) * beta_integral(a, b_) for c, a, b_ in radial_terms(family, m, p))
    assert abs(g - b) <= 1e-12 * scale * sphere_volume(m - 1)


@pytest.mark.parametrize("family, m, p", [("mn2-rot", 5, 5.0), ("mn2-rot", 9, 3.5), ("mn3-rot", 7, 12.0)])
def test_three_routes(family, m, p):
    rep = evaluate(family, m, p)
    assert rep.gap("quadrature") < 1e-10
    assert rep.gap("sfd") < 1e-6
    assert rep.sign == ("negative" if rep.value_gamma < 0 else "nonnegative")


def test_scale_is_quadratic():
    assert second_variation_gamma("mn2-rot", 6, 6, scale=3.0) == pytest.approx(
        9 * second_variation_gamma("mn2-rot", 6, 6), rel=1e-13
    )


@pytest.mark.parametrize("family", ["mn2-rot", "mn3-rot"])
@pytest.mark.parametrize("m", [5, 8, 11])
def test_printed_display_is_four_times(family, m):
    assert printed_second_variation(family, m, m) == pytest.approx(4 * second_variation_gamma(family, m, m), rel=1e-12)


def test_bienergy_along_variation_at_zero():
    spec = MapSpec.critical("mn2-rot", 6)
    e0 = bienergy_along_variation("mn2-rot", 6, 6.0, 0.0)
    assert e0 == pytest.approx(bienergy(spec), rel=1e-12)


def test_sfd_matches_plain_second_difference():
    s = 1e-2
    rule = gauss_legendre(64)
    e = [bienergy_along_variation("mn3-rot", 6, 6.0, t, rule) for t in (-s, 0.0, s)]
    naive = (e[0] - 2 * e[1] + e[2]) / s**2
    ref = second_variation_sfd("mn3-rot", 6, 6.0, 1e-3)
    assert naive == pytest.approx(ref, rel=1e-3)


def test_alternate_profile_quadrature():
    # V = (1 - r^2)^3 (1 + r^2), expanded
    prof = RadialProfile(
        V=lambda r: 1 - 2 * r**2 + 2 * r**6 - r**8,
        dV=lambda r: -4 * r + 12 * r**5 - 8 * r**7,
        d2V=lambda r: -4 + 60 * r**4 - 56 * r**6,
    )
    q = second_variation_quadrature("mn2-rot", 6, prof)
    sfd = second_variation_sfd("mn2-rot", 6, prof)
    assert sfd == pytest.approx(q, rel=1e-5)


def test_domain_checks():
    with pytest.raises(DomainError):
        second_variation_gamma("mn2-rot", 4, 5)
    with pytest.raises(DomainError):
        second_variation_gamma("fmr", 5, 5)
    with pytest.raises(DomainError):
        second_variation_gamma("mn2-rot", 5, 1.5)
    with pytest.raises(DomainError):
        second_variation_sfd("mn2-rot", 5, 5.0, s_step=0.1)
    with pytest.raises(DomainError):
        evaluate("mn2-rot", 5, 5.0, methods=("gamma", "magic"))


def test_scan_p_equals_m_boundary():
    reports = instability_scan("mn2-rot", range(11, 15))
    assert [r.sign for r in reports] == ["negative", "negative", "nonnegative", "nonnegative"]
    reports = instability_scan("mn3-rot", [18, 19])
    assert [r.sign for r in reports] == ["negative", "nonnegative"]


def test_scan_grid_and_minimize():
    rows = instability_scan("mn2-rot", [6, 5], "grid", [4.0, 3.0])
    assert [(r.m, r.p) for r in rows] == [(5, 3.0), (5, 4.0), (6, 3.0), (6, 4.0)]
    p = minimise_p("mn2-rot", 13)
    assert 2.0 < p <= 39.0
    rows = instability_scan("mn2-rot", [13], "minimize")
    assert rows[0].exploratory and rows[0].p == pytest.approx(p)
    with pytest.raises(DomainError):
        instability_scan("mn2-rot", [61])
    with pytest.raises(DomainError):
        instability_scan("mn2-rot", [6], "grid")
    with pytest.raises(DomainError):
        instability_scan("mn2-rot", [6], "random")


def test_large_arguments_do_not_overflow():
    v = second_variation_gamma("mn3-rot", 60, 180.0)
    assert math.isfinite(v)


def test_zero_profile_gives_zero():
    zero = RadialProfile(V=lambda r: 0 * r, dV=lambda r: 0 * r, d2V=lambda r: 0 * r)
    assert second_variation_quadrature("mn2-rot", 5, zero) == 0.0
    assert second_variation_gamma("mn2-rot", 5, 5, scale=0.0) == 0.0


@pytest.mark.parametrize("family, m", [("mn2-rot", 5), ("mn2-rot", 12), ("mn3-rot", 5), ("mn3-rot", 18)])
def test_sign_examples(family, m):
    g = second_variation_gamma(family, m, m)
    assert g < 0
    assert second_variation_quadrature(family, m, float(m)) == pytest.approx(g, rel=1e-8)


@pytest.mark.parametrize("family, m", [("mn2-rot", 5), ("mn3-rot", 6)])
def test_sfd_examples(family, m):
    assert second_variation_sfd(family, m, float(m), 1e-3) == pytest.approx(second_variation_gamma(family, m, m), rel=1e-3)


def test_gamma_only_near_lower_p():
    rep = evaluate("mn2-rot", 5, 2.5, methods=("gamma",))
    assert rep.value_quadrature is None and rep.sign in ("negative", "nonnegative")

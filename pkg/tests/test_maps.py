import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from biharmonic_maps.diffops import fd_gradient
from biharmonic_maps.errors import DomainError, SingularPointError
from biharmonic_maps.maps import (
    MapKind,
    MapSpec,
    analytic_jet,
    critical_angle,
    critical_sin2,
    eigenvalue,
    eval_map,
    evaluator,
)

BASE_CASES = [("equator", 3), ("equator", 6), ("mn2", 2), ("mn2", 5), ("mn3", 2), ("mn3", 4)]


def _point(m, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(m)
    return 0.6 * x / np.linalg.norm(x)


def test_parse_aliases():
    assert MapKind.parse("mn2-rot") is MapKind.MN2_ROTATED
    assert MapKind.parse("MN3_ROTATED") is MapKind.MN3_ROTATED
    assert MapKind.parse(MapKind.FMR) is MapKind.FMR
    assert MapKind.FMR.base is MapKind.EQUATOR and not MapKind.MN2.rotated
    with pytest.raises(DomainError):
        MapKind.parse("torus")


@pytest.mark.parametrize("kind, m, dim", [("equator", 4, 4), ("mn2", 3, 9), ("mn3", 3, 27), ("mn2-rot", 5, 26), ("mn3-rot", 5, 126), ("fmr", 5, 6)])
def test_codomain_dim(kind, m, dim):
    spec = MapSpec.critical(kind, m) if MapKind.parse(kind).rotated else MapSpec(kind, m)
    assert spec.codomain_dim == dim
    assert eval_map(spec, _point(m)).shape == (dim,)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(BASE_CASES + [("mn2-rot", 6), ("mn3-rot", 5)]), st.integers(0, 10_000))
def test_unit_norm(case, seed):
    kind, m = case
    spec = MapSpec.critical(kind, m) if MapKind.parse(kind).rotated else MapSpec(kind, m)
    X = np.random.default_rng(seed).uniform(-1, 1, (7, m))
    assert np.allclose(np.linalg.norm(eval_map(spec, X), axis=-1), 1.0, atol=1e-14)


@pytest.mark.parametrize("kind, m", BASE_CASES)
def test_zero_homogeneous(kind, m):
    spec = MapSpec(kind, m)
    x = _point(m)
    assert np.allclose(eval_map(spec, x), eval_map(spec, 0.37 * x), atol=1e-15)


def test_mn2_is_symmetric_traceless():
    m = 4
    u = eval_map(MapSpec("mn2", m), _point(m)).reshape(m, m)
    assert np.allclose(u, u.T) and abs(np.trace(u)) < 1e-14


def test_mn3_is_symmetric_and_trace_free():
    m = 3
    v = eval_map(MapSpec("mn3", m), _point(m)).reshape(m, m, m)
    assert np.allclose(v, v.transpose(1, 0, 2)) and np.allclose(v, v.transpose(0, 2, 1))
    assert np.allclose(np.einsum("iik->k", v), 0.0, atol=1e-14)


@pytest.mark.parametrize("kind, m", BASE_CASES)
def test_jet_identities(kind, m):
    spec = MapSpec(kind, m)
    x = _point(m, seed=3)
    r2 = float(x @ x)
    lam = eigenvalue(kind, m)
    jet = analytic_jet(spec, x)
    assert jet.density == pytest.approx(lam / r2, rel=1e-13)
    assert np.allclose(jet.jacobian, fd_gradient(evaluator(spec), x), atol=1e-7)
    assert np.allclose(jet.laplacian, -lam / r2 * jet.value, atol=1e-12)


def test_eigenvalues():
    assert [eigenvalue(k, 6) for k in ("equator", "mn2", "mn3", "fmr")] == [5, 12, 21, 5]


@pytest.mark.parametrize("m", range(3, 12))
def test_critical_sin2(m):
    assert critical_sin2("mn2-rot", m) == pytest.approx(1 - 2 / m)
    assert critical_sin2("mn3-rot", m) == pytest.approx(5 * (m - 1) / (6 * (m + 1)))


def test_critical_edge_cases():
    assert critical_sin2("mn2-rot", 2) is None
    assert critical_angle("fmr", 5) == pytest.approx(math.pi / 3)
    assert critical_angle("fmr", 6) == pytest.approx(0.5 * math.acos(-0.8))
    assert math.sin(critical_angle("fmr", 6)) ** 2 == pytest.approx(0.9)
    assert critical_angle("fmr", 7) is None
    with pytest.raises(DomainError):
        critical_sin2("mn2", 5)


def test_spec_validation():
    with pytest.raises(DomainError):
        MapSpec("mn2", 5, angle=0.3)
    with pytest.raises(DomainError):
        MapSpec("mn2-rot", 5)
    with pytest.raises(DomainError):
        MapSpec("mn2-rot", 5, angle=2.0)
    with pytest.raises(DomainError):
        MapSpec("mn2-rot", 5, sin2=1.0)
    with pytest.raises(DomainError):
        MapSpec("mn2", 1)
    with pytest.raises(DomainError):
        MapSpec.critical("fmr", 8)


def test_spec_exact_sin2():
    spec = MapSpec("mn2-rot", 5, sin2=0.6)
    assert spec.sin2 == 0.6 and spec.is_critical
    assert MapSpec("mn2-rot", 5, angle=math.pi / 4).is_critical is False
    assert "sin2=0.6" in spec.label()


def test_origin_is_singular():
    with pytest.raises(SingularPointError):
        eval_map(MapSpec("mn2", 3), np.zeros(3))
    with pytest.raises(SingularPointError):
        analytic_jet(MapSpec("equator", 3), np.zeros(3))
    with pytest.raises(DomainError):
        eval_map(MapSpec("mn2", 3), np.ones(4))


def test_eval_examples():
    assert np.allclose(eval_map(MapSpec("equator", 3), [0, 0, 2.0]), [0, 0, 1])
    s = 1 / math.sqrt(2)
    assert np.allclose(eval_map(MapSpec("mn2", 2), [1.0, 0.0]), [s, 0, 0, -s], atol=1e-15)
    e1 = np.eye(5)[0]
    rot = eval_map(MapSpec("mn2-rot", 5, sin2=0.6), e1)
    assert np.allclose(rot[:25], math.sqrt(0.6) * eval_map(MapSpec("mn2", 5), e1), atol=1e-15)
    assert rot[25] == pytest.approx(math.sqrt(0.4), abs=1e-15)


def test_critical_angle_values():
    assert critical_angle("mn2-rot", 5) == pytest.approx(0.8860771238, abs=1e-10)
    assert critical_angle("mn3-rot", 5) == pytest.approx(0.8410686706, abs=1e-10)
    assert critical_angle("fmr", 6) == pytest.approx(1.2490457724, abs=1e-10)


@pytest.mark.parametrize("kind, m", [(k, m) for k in ("equator", "mn2", "mn2-rot", "mn3-rot") for m in range(2, 9)] + [("mn3", m) for m in range(2, 7)])
def test_unit_norm_100_points(kind, m):
    spec = MapSpec(kind, m, sin2=0.3) if MapKind.parse(kind).rotated else MapSpec(kind, m)
    if kind == "mn3-rot" and m > 6:
        return
    X = np.random.default_rng(m).uniform(-1, 1, (100, m))
    assert np.max(np.abs(np.linalg.norm(eval_map(spec, X), axis=1) - 1)) <= 1e-12


@pytest.mark.parametrize("kind, m", BASE_CASES)
def test_homogeneity_factors(kind, m):
    spec = MapSpec(kind, m)
    x = _point(m, 5)
    for lam in (0.5, 2.0, 10.0):
        assert np.max(np.abs(eval_map(spec, lam * x) - eval_map(spec, x))) <= 1e-12


@pytest.mark.parametrize("kind, m", BASE_CASES + [("mn3-rot", 5)])
def test_radial_transversality(kind, m):
    spec = MapSpec.critical(kind, m) if MapKind.parse(kind).rotated else MapSpec(kind, m)
    x = _point(m, 9)
    jet = analytic_jet(spec, x)
    assert np.max(np.abs(jet.jacobian @ x)) <= 1e-10
    assert np.max(np.abs(jet.value - eval_map(spec, x))) <= 1e-14


def test_mn3_all_contractions_vanish():
    m = 4
    v = eval_map(MapSpec("mn3", m), _point(m, 2)).reshape(m, m, m)
    for sub in ("iik->k", "iki->k", "kii->k"):
        assert np.allclose(np.einsum(sub, v), 0.0, atol=1e-14)

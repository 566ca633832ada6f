"""Pointwise residuals of the harmonic and biharmonic map equations.

For a map ``u`` into the unit sphere of ``R^d``:

* harmonic:   ``Lap u + |grad u|^2 u``  (the tension field);
* biharmonic, short form:
  ``Lap^2 u + 2 div(|grad u|^2 grad u) - (<Lap^2 u, u> - 2|grad u|^4) u``;
* biharmonic, long form:
  ``Lap^2 u + 2 div(|grad u|^2 grad u)
  + (|Lap u|^2 + Lap|grad u|^2 + 2<grad u, grad Lap u> + 2|grad u|^4) u``.

Residuals of the catalog maps are homogeneous of degree -2 (harmonic) and
-4 (biharmonic), so reports use the scaled norms ``|res| r^2`` and
``|res| r^4``, which are constant along rays.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .diffops import (
    FDConfig,
    Jet,
    divergence_term,
    fd_density_gradient,
    fd_density_laplacian,
    fd_jet,
    fd_laplacian_gradient,
)
from .errors import DomainError, SingularPointError
from .maps import MapKind, MapSpec, analytic_jet, evaluator

ANALYTIC = "analytic"
FD = "fd"
METHODS = (ANALYTIC, FD)
HARMONIC = "harmonic"
BIHARMONIC = "biharmonic"
EQUATIONS = (HARMONIC, BIHARMONIC)

DEFAULT_TOLERANCE = {ANALYTIC: 1e-10, FD: 1e-4}
# "proper" needs the scaled tension norm above this fraction of its closed form.
PROPERNESS_FRACTION = 0.1
ANNULUS = (0.2, 0.9)


def _check(spec: MapSpec, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (spec.m,):
        raise DomainError(f"expected a point of shape ({spec.m},), got {x.shape}")
    if not np.any(x):
        raise SingularPointError("residuals are undefined at the origin")
    return x


def _check_method(method):
    if method not in METHODS:
        raise DomainError(f"method must be one of {METHODS}, got {method!r}")


def _jet(spec, x, method, cfg, bilaplacian=True) -> Jet:
    if method == ANALYTIC:
        return analytic_jet(spec, x)
    return fd_jet(evaluator(spec), x, cfg, bilaplacian=bilaplacian)


def harmonic_residual(spec: MapSpec, x, method: str = ANALYTIC, cfg: FDConfig | None = None) -> np.ndarray:
    """Tension field ``Lap u + |grad u|^2 u`` at ``x``."""
    _check_method(method)
    x = _check(spec, x)
    jet = _jet(spec, x, method, cfg, bilaplacian=False)
    return jet.laplacian + jet.density * jet.value


def _density_gradient(spec, x, jet, method, cfg):
    if method == ANALYTIC:
        # |grad u|^2 is radial and homogeneous of degree -2.
        return -2.0 * jet.density * x / float(x @ x)
    return fd_density_gradient(evaluator(spec), x, cfg)


def biharmonic_residual(
    spec: MapSpec,
    x,
    method: str = ANALYTIC,
    cfg: FDConfig | None = None,
    form: str = "short",
) -> np.ndarray:
    """Residual of the biharmonic sphere-map equation at ``x``.

    ``form="short"`` is the form with ``<Lap^2 u, u> - 2|grad u|^4``;
    ``form="long"`` expands that scalar through the fourth-order identity
    obtained from ``Lap^2 |u|^2 = 0``.
    """
    _check_method(method)
    if form not in ("short", "long"):
        raise DomainError(f"form must be 'short' or 'long', got {form!r}")
    x = _check(spec, x)
    jet = _jet(spec, x, method, cfg)
    e = jet.density
    div = divergence_term(jet, _density_gradient(spec, x, jet, method, cfg), e)
    head = jet.bilaplacian + 2.0 * div
    if form == "short":
        return head - (float(jet.bilaplacian @ jet.value) - 2.0 * e * e) * jet.value
    scalar = _long_form_scalar(spec, x, jet, method, cfg)
    return head + (scalar + 2.0 * e * e) * jet.value


def _long_form_scalar(spec, x, jet, method, cfg) -> float:
    """``|Lap u|^2 + Lap|grad u|^2 + 2 <grad u, grad Lap u>``."""
    if method == ANALYTIC:
        lap_density = (8.0 - 2.0 * spec.m) * jet.density / float(x @ x)
        lap_grad = jet.laplacian_gradient
    else:
        f = evaluator(spec)
        lap_density = fd_density_laplacian(f, x, cfg)
        lap_grad = fd_laplacian_gradient(f, x, cfg)
    cross = float(np.sum(jet.jacobian * lap_grad))
    return float(jet.laplacian @ jet.laplacian) + lap_density + 2.0 * cross


def sphere_identity(spec: MapSpec, x, method: str = ANALYTIC, cfg: FDConfig | None = None) -> tuple[float, float]:
    """``Lap|grad u|^2 + |Lap u|^2 + 2<grad Lap u, grad u> + <u, Lap^2 u>`` and its scale.

    The first value vanishes for every unit-norm map. The second is the
    largest absolute summand, for relative comparisons.
    """
    _check_method(method)
    x = _check(spec, x)
    jet = _jet(spec, x, method, cfg)
    if method == ANALYTIC:
        lap_density = (8.0 - 2.0 * spec.m) * jet.density / float(x @ x)
        lap_grad = jet.laplacian_gradient
    else:
        f = evaluator(spec)
        lap_density = fd_density_laplacian(f, x, cfg)
        lap_grad = fd_laplacian_gradient(f, x, cfg)
    terms = [
        lap_density,
        float(jet.laplacian @ jet.laplacian),
        2.0 * float(np.sum(jet.jacobian * lap_grad)),
        float(jet.value @ jet.bilaplacian),
    ]
    return sum(terms), max(abs(t) for t in terms)


def rotation_constraint(spec: MapSpec, x, method: str = ANALYTIC, cfg: FDConfig | None = None) -> float:
    """``<Lap^2 u, u> - 2 |grad u|^4`` for a rotated map.

    For ``mn2-rotated`` this equals ``8 m sin^2(a) (m - 2 - m sin^2(a)) / r^4``;
    it vanishes exactly at the critical angle.
    """
    if not spec.rotated:
        raise DomainError(f"rotation constraint needs a rotated map, got {spec.kind}")
    _check_method(method)
    x = _check(spec, x)
    jet = _jet(spec, x, method, cfg)
    return float(jet.bilaplacian @ jet.value) - 2.0 * jet.density**2


def closed_form_tension(spec: MapSpec) -> float:
    """Scaled tension norm ``|tau| r^2 = lam sin(a) cos(a)`` (zero for base maps)."""
    if not spec.rotated:
        return 0.0
    return spec.eigenvalue * spec.sin * spec.cos


def closed_form_biharmonic(spec: MapSpec) -> float:
    """Scaled norm ``|res| r^4`` of the biharmonic residual of a rotated map.

    Equals ``lam |lam + 2m - 8 - 2 lam sin^2(a)| sin(a) cos(a)``; for mn2 this
    is ``8m |m - 2 - m sin^2(a)| sin(a) cos(a)``.
    """
    if not spec.rotated:
        return 0.0
    lam, m = spec.eigenvalue, spec.m
    return lam * abs(lam + 2 * m - 8 - 2 * lam * spec.sin2) * spec.sin * spec.cos


def annulus_points(m: int, n: int, seed: int, r_min: float = ANNULUS[0], r_max: float = ANNULUS[1]) -> np.ndarray:
    """``n`` seeded points with uniform direction and radius uniform in ``[r_min, r_max]``."""
    rng = np.random.default_rng(seed)
    d = rng.standard_normal((n, m))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    r = rng.uniform(r_min, r_max, size=n)
    return d * r[:, None]


@dataclass
class ResidualReport:
    """Outcome of certifying one equation for one map over sample points."""

    spec: MapSpec
    equation: str
    method: str
    points: np.ndarray
    scaled_norms: np.ndarray
    tolerance: float
    properness: float | None = None
    properness_floor: float | None = None
    extra: dict = field(default_factory=dict)

    @property
    def max(self) -> float:
        return float(np.max(self.scaled_norms))

    @property
    def mean(self) -> float:
        return float(np.mean(self.scaled_norms))

    @property
    def verified(self) -> bool:
        return self.max <= self.tolerance

    @property
    def verdict(self) -> str:
        return "verified" if self.verified else "refuted"

    @property
    def proper(self) -> bool | None:
        if self.properness is None:
            return None
        return self.properness > self.properness_floor


def _scaled(spec, x, equation, method, cfg):
    r = float(np.linalg.norm(x))
    if equation == HARMONIC:
        return float(np.linalg.norm(harmonic_residual(spec, x, method, cfg))) * r**2
    return float(np.linalg.norm(biharmonic_residual(spec, x, method, cfg))) * r**4


def certify(
    spec: MapSpec,
    equation: str = BIHARMONIC,
    samples: int = 100,
    seed: int = 0,
    tolerance: float | None = None,
    method: str = ANALYTIC,
    cfg: FDConfig | None = None,
    workers: int = 1,
) -> ResidualReport:
    """Evaluate a residual at seeded annulus points and compare with a tolerance.

    For the biharmonic equation on rotated maps the report also carries the
    properness margin: the smallest scaled tension norm over the samples,
    to be compared with 10% of its closed-form value.
    """
    if equation not in EQUATIONS:
        raise DomainError(f"equation must be one of {EQUATIONS}, got {equation!r}")
    _check_method(method)
    if samples < 1:
        raise DomainError("samples must be >= 1")
    tol = DEFAULT_TOLERANCE[method] if tolerance is None else float(tolerance)
    pts = annulus_points(spec.m, samples, seed)

    def one(x):
        return _scaled(spec, x, equation, method, cfg)

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            norms = list(pool.map(one, pts))
    else:
        norms = [one(x) for x in pts]
    report = ResidualReport(spec, equation, method, pts, np.array(norms), tol)
    if equation == BIHARMONIC and spec.rotated:
        tension = [
            float(np.linalg.norm(harmonic_residual(spec, x, method, cfg))) * float(x @ x) for x in pts
        ]
        report.properness = min(tension)
        report.properness_floor = PROPERNESS_FRACTION * closed_form_tension(spec)
        report.extra["tension_closed_form"] = closed_form_tension(spec)
    return report


def expected_scaled_tension(kind, m: int) -> float:
    """Closed-form ``|tau| r^2`` at the critical angle: sqrt(8(m-2)) or sqrt(5/4 (m-1)(m+11))."""
    kind = MapKind.parse(kind)
    if kind is MapKind.MN2_ROTATED:
        return math.sqrt(8.0 * (m - 2))
    if kind is MapKind.MN3_ROTATED:
        return math.sqrt(1.25 * (m - 1) * (m + 11))
    return closed_form_tension(MapSpec.critical(kind, m))

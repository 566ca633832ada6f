"""Energy densities, bienergy and Sobolev integrals of the catalog maps.

Every quantity has two independent paths: a closed form built from the
eigenvalue ``lam`` of the base map (``|grad u|^2 = lam/r^2``), and a
quadrature of the density read off the analytic jet at ``r e_1``. A
divergent integral is represented by ``math.inf``; the verdict comes from
the radial power, never from a numerical blow-up.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DivergentIntegral, DomainError
from .maps import MapKind, MapSpec, analytic_jet
from .quadrature import QuadratureRule, ball_integral, gauss_legendre
from .specfun import sphere_volume

CLOSED = "closed"
QUADRATURE = "quadrature"
DIVERGENT = math.inf

ENERGY = "energy"
BIENERGY = "bienergy"
GRAD_L2 = "grad-L2"
LAPLACIAN_L2 = "laplacian-L2"
DENSITY = "density-at-r"

# The published bienergy of the rotated maps at their critical angles, as
# printed; mn3-rotated carries the coefficient (11m + 1).
PUBLISHED_BIENERGY_FORMULA = {
    MapKind.MN2_ROTATED: "4 (m-2)/(m-4) vol(S^(m-1))",
    MapKind.MN3_ROTATED: "5/8 (m-1)(11m+1)/(m-4) vol(S^(m-1))",
}
AGREEMENT_RTOL = 1e-8


@dataclass
class EnergyReport:
    """Closed form versus quadrature for one integrated quantity."""

    spec: MapSpec
    quantity: str
    closed_form: float
    quadrature: float
    published: float | None = None

    @property
    def divergent(self) -> bool:
        return math.isinf(self.closed_form)

    @property
    def relative_gap(self) -> float:
        c, q = self.closed_form, self.quadrature
        if math.isinf(c) or math.isinf(q):
            return 0.0 if c == q else math.inf
        return abs(c - q) / max(abs(c), 1e-300)

    @property
    def published_agrees(self) -> bool | None:
        """Whether the published value matches quadrature to ``AGREEMENT_RTOL``."""
        if self.published is None:
            return None
        if math.isinf(self.quadrature):
            return math.isinf(self.published)
        return abs(self.published - self.quadrature) <= AGREEMENT_RTOL * abs(self.quadrature)


def _radial_points(spec: MapSpec, r: np.ndarray) -> list:
    pts = np.zeros((len(r), spec.m))
    pts[:, 0] = r
    return [analytic_jet(spec, p) for p in pts]


def _jet_density(spec: MapSpec, fn):
    def density(r):
        r = np.atleast_1d(np.asarray(r, dtype=float))
        return np.array([fn(j) for j in _radial_points(spec, r)])

    return density


def _integrate(spec, fn, power, rule):
    try:
        return ball_integral(_jet_density(spec, fn), spec.m, rule, singular_power=power)
    except DivergentIntegral:
        return DIVERGENT


def _closed(spec: MapSpec, coef: float, power: int) -> float:
    """``vol(S^(m-1)) * coef * int_0^1 r^(power + m - 1) dr``."""
    if coef == 0.0:
        return 0.0
    net = power + spec.m
    if net <= 0:
        return DIVERGENT
    return coef * sphere_volume(spec.m - 1) / net


def gradient_coefficient(spec: MapSpec) -> float:
    """``|grad u|^2 r^2``."""
    return spec.eigenvalue * spec.sin2 if spec.rotated else float(spec.eigenvalue)


def laplacian_coefficient(spec: MapSpec) -> float:
    """``|Lap u|^2 r^4``."""
    return spec.eigenvalue**2 * (spec.sin2 if spec.rotated else 1.0)


def tension_coefficient(spec: MapSpec) -> float:
    """``|tau|^2 r^4``; ``8(m-2)`` and ``5/4 (m-1)(m+11)`` at the critical angles."""
    if not spec.rotated:
        return 0.0
    return spec.eigenvalue**2 * spec.sin2 * (1.0 - spec.sin2)


def energy_density(spec: MapSpec, r: float) -> float:
    """``|grad u|^2 / 2`` at radius ``r``, from the analytic jet."""
    if not r > 0:
        raise DomainError(f"radius must be positive, got {r!r}")
    x = np.zeros(spec.m)
    x[0] = r
    return 0.5 * analytic_jet(spec, x).density


def density_report(spec: MapSpec, r: float) -> EnergyReport:
    closed = 0.5 * gradient_coefficient(spec) / r**2
    return EnergyReport(spec, DENSITY, closed, energy_density(spec, r))


def energy(spec: MapSpec, method: str = CLOSED, rule: QuadratureRule | None = None) -> float:
    """Dirichlet energy ``1/2 int |grad u|^2`` over the ball (``inf`` for m = 2)."""
    if method == CLOSED:
        return 0.5 * _closed(spec, gradient_coefficient(spec), -2)
    return 0.5 * _integrate(spec, lambda j: j.density, -2, rule)


def bienergy(spec: MapSpec, method: str = CLOSED, rule: QuadratureRule | None = None) -> float:
    """Bienergy ``1/2 int |tau|^2 = 1/2 int (|Lap u|^2 - |grad u|^4)`` over the ball.

    Harmonic kinds give 0. Rotated maps diverge (``inf``) for m <= 4.
    """
    if method == CLOSED:
        return 0.5 * _closed(spec, tension_coefficient(spec), -4)
    if method != QUADRATURE:
        raise DomainError(f"method must be {CLOSED!r} or {QUADRATURE!r}, got {method!r}")
    if not spec.rotated:
        return 0.0
    integrand = lambda j: float(j.laplacian @ j.laplacian) - j.density**2
    return 0.5 * _integrate(spec, integrand, -4, rule)


def published_bienergy(spec: MapSpec) -> float | None:
    """Printed bienergy for mn2/mn3-rotated at the critical angle, else ``None``."""
    if spec.kind not in PUBLISHED_BIENERGY_FORMULA or not spec.is_critical:
        return None
    m = spec.m
    if m <= 4:
        return DIVERGENT
    vol = sphere_volume(m - 1)
    if spec.kind is MapKind.MN2_ROTATED:
        return 4.0 * (m - 2) / (m - 4) * vol
    return 5.0 / 8.0 * (m - 1) * (11 * m + 1) / (m - 4) * vol


def bienergy_report(spec: MapSpec, rule: QuadratureRule | None = None) -> EnergyReport:
    return EnergyReport(
        spec,
        BIENERGY,
        bienergy(spec, CLOSED),
        bienergy(spec, QUADRATURE, rule),
        published=published_bienergy(spec),
    )


def energy_report(spec: MapSpec, rule: QuadratureRule | None = None) -> EnergyReport:
    return EnergyReport(spec, ENERGY, energy(spec, CLOSED), energy(spec, QUADRATURE, rule))


@dataclass
class SobolevReport:
    """``int |grad u|^2`` and ``int |Lap u|^2``; W^{2,2} membership iff both finite."""

    grad: EnergyReport
    laplacian: EnergyReport

    @property
    def member(self) -> bool:
        return not (self.grad.divergent or self.laplacian.divergent)


def sobolev_report(spec: MapSpec, rule: QuadratureRule | None = None) -> SobolevReport:
    """Sobolev integrals of a rotated map (finite exactly when m >= 5)."""
    if not spec.rotated:
        raise DomainError(f"sobolev_report needs a rotated map, got {spec.kind}")
    rule = rule or gauss_legendre()
    grad = EnergyReport(
        spec,
        GRAD_L2,
        _closed(spec, gradient_coefficient(spec), -2),
        _integrate(spec, lambda j: j.density, -2, rule),
    )
    lap = EnergyReport(
        spec,
        LAPLACIAN_L2,
        _closed(spec, laplacian_coefficient(spec), -4),
        _integrate(spec, lambda j: float(j.laplacian @ j.laplacian), -4, rule),
    )
    return SobolevReport(grad, lap)

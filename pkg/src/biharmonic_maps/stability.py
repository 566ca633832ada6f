"""Second variation of the bienergy along rotation variations.

The critical rotated map ``(sin(a) u, cos(a))`` is varied as
``(sin(a + s V(r)) u, cos(a + s V(r)))`` with a radial profile ``V``
vanishing to first order at ``r = 1``. Along this family

    |Lap u_s|^2 - |grad u_s|^4 = (s Lap V - sin(2a + 2 s V) k / r^2)^2,

with ``k = |grad u|^2 r^2 / 2`` (``m`` for mn2, ``3(m+1)/2`` for mn3). Three
independent routes give ``d^2/ds^2 E_2`` at ``s = 0``:

* ``quadrature``: the quadratic form
  ``int (V'' + (m-1) V'/r + 2(m-4) V/r^2)^2 + c int V^2 / r^4`` with
  ``c = 32(2-m)`` (mn2) or ``-5(m-1)(m+11)`` (mn3);
* ``gamma``: for ``V = (1-r^2)^p`` the form expands into five integrals
  ``int_0^1 (1-r^2)^a r^b dr`` evaluated with Gamma functions;
* ``sfd``: a symmetric second difference in ``s`` of ``E_2(s)``.

The gamma route is the reference for signs.
"""

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DomainError
from .maps import MapKind, critical_sin2
from .quadrature import QuadratureRule, ball_integral, gauss_legendre
from .specfun import beta_integral, lgamma, sphere_volume

FAMILIES = (MapKind.MN2_ROTATED, MapKind.MN3_ROTATED)
GAMMA, QUAD, SFD = "gamma", "quadrature", "sfd"
METHODS = (GAMMA, QUAD, SFD)
DEFAULT_S_STEP = 1e-3
SCAN_M_RANGE = (5, 60)


def _family(family) -> MapKind:
    kind = MapKind.parse(family)
    if kind not in FAMILIES:
        raise DomainError(f"second variation is defined for {[str(f) for f in FAMILIES]}, got {kind}")
    return kind


def _check_m(m):
    if int(m) != m or m < 5:
        raise DomainError(f"m must be an integer >= 5 (the critical map is in W^(2,2) only then), got {m!r}")
    return int(m)


def half_gradient_coefficient(family, m: int) -> float:
    """``k = |grad u|^2 r^2 / 2`` of the unrotated base map."""
    return float(m) if _family(family) is MapKind.MN2_ROTATED else 1.5 * (m + 1)


def potential_coefficient(family, m: int) -> int:
    """Coefficient of ``int V^2 / r^4`` in the quadratic form (exact integer)."""
    if _family(family) is MapKind.MN2_ROTATED:
        return 32 * (2 - m)
    return -5 * (m - 1) * (m + 11)


def fifth_coefficient(family, m: int) -> int:
    """Coefficient of ``int (1-r^2)^(2p) r^(m-5)``: ``4(m-4)^2`` plus the potential one."""
    if _family(family) is MapKind.MN2_ROTATED:
        return 4 * (m * m - 16 * m + 32)
    return -(m * m + 82 * m - 119)


@dataclass(frozen=True)
class RadialProfile:
    """Variation profile ``V`` with derivatives, admissible if ``V(1) = V'(1) = 0``."""

    V: Callable[[np.ndarray], np.ndarray]
    dV: Callable[[np.ndarray], np.ndarray]
    d2V: Callable[[np.ndarray], np.ndarray]
    p: float | None = None
    scale: float = 1.0

    def __post_init__(self):
        one = np.array([1.0])
        if abs(float(self.V(one)[0])) > 1e-12 or abs(float(self.dV(one)[0])) > 1e-12:
            raise DomainError("profile must satisfy V(1) = V'(1) = 0")

    @classmethod
    def power(cls, p: float, scale: float = 1.0) -> "RadialProfile":
        """``V(r) = scale * (1 - r^2)^p`` with ``p > 2``."""
        p = float(p)
        if not p > 2.0:
            raise DomainError(f"power profile needs p > 2, got {p!r}")
        c = float(scale)
        return cls(
            V=lambda r: c * (1.0 - r * r) ** p,
            dV=lambda r: -2.0 * c * p * r * (1.0 - r * r) ** (p - 1.0),
            d2V=lambda r: c
            * (-2.0 * p * (1.0 - r * r) ** (p - 1.0) + 4.0 * p * (p - 1.0) * r * r * (1.0 - r * r) ** (p - 2.0)),
            p=p,
            scale=c,
        )

    def laplacian(self, r: np.ndarray, m: int) -> np.ndarray:
        """``Lap V = V'' + (m-1) V'/r`` for the radial function on R^m."""
        return self.d2V(r) + (m - 1) * self.dV(r) / r


def _profile(profile_or_p) -> RadialProfile:
    if isinstance(profile_or_p, RadialProfile):
        return profile_or_p
    return RadialProfile.power(profile_or_p)


def second_variation_quadrature(family, m: int, profile, rule: QuadratureRule | None = None) -> float:
    """Quadratic form of the second variation integrated over the ball."""
    kind = _family(family)
    m = _check_m(m)
    prof = _profile(profile)
    c = potential_coefficient(kind, m)

    def density(r):
        V = prof.V(r)
        lead = prof.laplacian(r, m) + 2.0 * (m - 4) * V / r**2
        return lead**2 + c * V**2 / r**4

    return ball_integral(density, m, rule or gauss_legendre(), singular_power=-4)


def radial_terms(family, m: int, p: float) -> list[tuple[float, float, float]]:
    """Rows ``(coefficient, a, b)`` with the form equal to ``vol * sum coef * int (1-r^2)^a r^b``."""
    kind = _family(family)
    c5 = fifth_coefficient(kind, m)
    return [
        (16.0 * p * p * (p - 1.0) ** 2, 2 * p - 4, m + 3),
        (-16.0 * m * p * p * (p - 1.0), 2 * p - 3, m + 1),
        (4.0 * p * (m * m * p + 4.0 * (p - 1.0) * (m - 4)), 2 * p - 2, m - 1),
        (-8.0 * m * p * (m - 4), 2 * p - 1, m - 3),
        (float(c5), 2 * p, m - 5),
    ]


def _check_p(p):
    p = float(p)
    if not p > 2.0:
        raise DomainError(f"p must exceed 2, got {p!r}")
    return p


def second_variation_gamma(family, m: int, p: float, scale: float = 1.0) -> float:
    """Second variation for ``V = scale (1-r^2)^p`` from the Gamma-function expansion.

    Each row contributes ``coef * Gamma(a+1) Gamma((b+1)/2)``; all rows share
    the denominator ``2 Gamma(2p - 1 + m/2)``. Products are formed in log
    space against a common offset so that large ``p, m`` do not overflow.
    """
    kind = _family(family)
    m = _check_m(m)
    p = _check_p(p)
    rows = radial_terms(kind, m, p)
    logs = [lgamma(a + 1.0) + lgamma(0.5 * (b + 1.0)) for _, a, b in rows]
    offset = max(logs)
    bracket = sum(c * math.exp(L - offset) for (c, _, _), L in zip(rows, logs))
    log_pref = offset - lgamma(2.0 * p - 1.0 + 0.5 * m) - math.log(2.0)
    return scale**2 * sphere_volume(m - 1) * bracket * math.exp(log_pref)


def second_variation_beta_sum(family, m: int, p: float) -> float:
    """Same quantity as :func:`second_variation_gamma`, summed row by row with :func:`beta_integral`."""
    kind = _family(family)
    m = _check_m(m)
    p = _check_p(p)
    total = sum(c * beta_integral(a, b) for c, a, b in radial_terms(kind, m, p))
    return sphere_volume(m - 1) * total


# Gamma rows as printed next to the prefactor Gamma(2p-1+m/2) / (K vol(S^(m-1))).
_PRINTED_PREFACTOR = {MapKind.MN2_ROTATED: 8.0, MapKind.MN3_ROTATED: 2.0}


def printed_gamma_rows(family, m: int, p: float) -> list[tuple[float, float, float]]:
    """Printed ``(coefficient, Gamma arg 1, Gamma arg 2)`` rows of the published display."""
    kind = _family(family)
    if kind is MapKind.MN2_ROTATED:
        coefs = [
            4 * p * p * (p - 1) ** 2,
            -4 * m * p * p * (p - 1),
            p * (m * m * p + 4 * (p - 1) * (m - 4)),
            -2 * m * p * (m - 4),
            m * m - 16 * m + 32,
        ]
    else:
        coefs = [c for c, _, _ in radial_terms(kind, m, p)]
    args = [(m / 2 + 2, 2 * p - 3), (m / 2 + 1, 2 * p - 2), (m / 2, 2 * p - 1), (m / 2 - 1, 2 * p), (m / 2 - 2, 2 * p + 1)]
    return [(float(c), a1, a2) for c, (a1, a2) in zip(coefs, args)]


def printed_second_variation(family, m: int, p: float) -> float:
    """The published Gamma display multiplied back by ``K vol / Gamma(2p-1+m/2)``.

    Both published displays come out 4 times larger than the quadratic form
    they expand (the sign is unaffected); :func:`second_variation_gamma`
    carries the consistent normalisation.
    """
    kind = _family(family)
    m = _check_m(m)
    p = _check_p(p)
    rows = printed_gamma_rows(kind, m, p)
    logs = [lgamma(a1) + lgamma(a2) for _, a1, a2 in rows]
    offset = max(logs)
    bracket = sum(c * math.exp(L - offset) for (c, _, _), L in zip(rows, logs))
    log_pref = offset - lgamma(2.0 * p - 1.0 + 0.5 * m)
    return _PRINTED_PREFACTOR[kind] * sphere_volume(m - 1) * bracket * math.exp(log_pref)


def _critical_double_angle(kind, m):
    s2 = critical_sin2(kind, m)
    return 2.0 * math.asin(math.sqrt(s2))


def bienergy_along_variation(family, m: int, profile, s: float, rule: QuadratureRule | None = None) -> float:
    """``E_2`` of the varied map ``(sin(a + sV) u, cos(a + sV))`` at parameter ``s``."""
    kind = _family(family)
    m = _check_m(m)
    prof = _profile(profile)
    k = half_gradient_coefficient(kind, m)
    two_a = _critical_double_angle(kind, m)

    def density(r):
        f = s * prof.laplacian(r, m) - np.sin(two_a + 2.0 * s * prof.V(r)) * k / r**2
        return 0.5 * f * f

    return ball_integral(density, m, rule or gauss_legendre(), singular_power=-4)


def _second_difference(kind, m, prof, s, rule):
    """``(E(s) + E(-s) - 2 E(0)) / s^2`` with the differences formed pointwise."""
    k = half_gradient_coefficient(kind, m)
    two_a = _critical_double_angle(kind, m)

    def density(r):
        V = prof.V(r)
        lapV = prof.laplacian(r, m)
        f0 = -math.sin(two_a) * k / r**2
        total = 0.0
        for t in (s, -s):
            # f(t) - f(0), with sin(2a + 2tV) - sin(2a) = 2 cos(2a + tV) sin(tV)
            df = t * lapV - 2.0 * k / r**2 * np.cos(two_a + t * V) * np.sin(t * V)
            total = total + df * (df + 2.0 * f0)
        return 0.5 * total

    return ball_integral(density, m, rule, singular_power=-4) / (s * s)


def second_variation_sfd(
    family, m: int, profile, s_step: float = DEFAULT_S_STEP, rule: QuadratureRule | None = None
) -> float:
    """Second derivative of ``s -> E_2(s)`` at 0 by symmetric differences.

    One Richardson level in ``s`` (steps ``s`` and ``s/2``).
    """
    kind = _family(family)
    m = _check_m(m)
    if not 1e-4 <= s_step <= 1e-2:
        raise DomainError(f"s_step must lie in [1e-4, 1e-2], got {s_step!r}")
    prof = _profile(profile)
    rule = rule or gauss_legendre()
    d_s = _second_difference(kind, m, prof, s_step, rule)
    d_half = _second_difference(kind, m, prof, 0.5 * s_step, rule)
    return (4.0 * d_half - d_s) / 3.0


@dataclass
class StabilityReport:
    """Second-variation values for one ``(family, m, p)``; sign from the gamma route."""

    family: MapKind
    m: int
    p: float | None
    value_gamma: float | None
    value_quadrature: float | None = None
    value_sfd: float | None = None
    exploratory: bool = False
    extra: dict = field(default_factory=dict)

    @property
    def reference(self) -> float:
        for v in (self.value_gamma, self.value_quadrature, self.value_sfd):
            if v is not None:
                return v
        raise ValueError("report holds no values")

    @property
    def sign(self) -> str:
        return "negative" if self.reference < 0 else "nonnegative"

    def gap(self, method: str) -> float | None:
        other = {QUAD: self.value_quadrature, SFD: self.value_sfd}[method]
        if other is None or self.value_gamma is None:
            return None
        return abs(self.value_gamma - other) / abs(self.value_gamma)


def evaluate(
    family,
    m: int,
    p: float,
    methods=METHODS,
    s_step: float = DEFAULT_S_STEP,
    rule: QuadratureRule | None = None,
) -> StabilityReport:
    """Second variation for ``V = (1-r^2)^p`` by the requested routes."""
    kind = _family(family)
    m = _check_m(m)
    p = _check_p(p)
    for meth in methods:
        if meth not in METHODS:
            raise DomainError(f"unknown method {meth!r}; choose from {METHODS}")
    prof = RadialProfile.power(p)
    return StabilityReport(
        family=kind,
        m=m,
        p=p,
        value_gamma=second_variation_gamma(kind, m, p) if GAMMA in methods else None,
        value_quadrature=second_variation_quadrature(kind, m, prof, rule) if QUAD in methods else None,
        value_sfd=second_variation_sfd(kind, m, prof, s_step, rule) if SFD in methods else None,
    )


def _normalised(kind, m, p):
    """Second variation divided by ``vol * int (1-r^2)^(2p) r^(m-5)``: same sign, O(1) size."""
    return second_variation_gamma(kind, m, p) / (sphere_volume(m - 1) * beta_integral(2 * p, m - 5))


def minimise_p(family, m: int, p_max: float | None = None, grid: int = 200) -> float:
    """``p`` in ``(2, p_max]`` minimising the normalised second variation.

    A coarse grid locates the basin, then a bounded Brent search (golden
    section with parabolic steps) refines it. ``p_max`` defaults to ``3m``.
    """
    kind = _family(family)
    m = _check_m(m)
    lo, hi = 2.0 + 1e-6, float(p_max if p_max is not None else 3 * m)
    ps = np.linspace(lo, hi, grid)
    vals = [_normalised(kind, m, p) for p in ps]
    i = int(np.argmin(vals))
    a, b = ps[max(i - 1, 0)], ps[min(i + 1, grid - 1)]
    res = minimize_scalar(lambda p: _normalised(kind, m, p), bounds=(a, b), method="bounded",
                          options={"xatol": 1e-10})
    return float(res.x) if res.fun <= vals[i] else float(ps[i])


def instability_scan(family, m_values, strategy: str = "p=m", p_grid=None) -> list[StabilityReport]:
    """Gamma-route second variation over ``m`` for one p-strategy.

    ``strategy`` is ``"p=m"``, ``"grid"`` (evaluate every ``p`` in
    ``p_grid``) or ``"minimize"`` (see :func:`minimise_p`). Rows are ordered
    by ``m`` then ``p``.
    """
    kind = _family(family)
    ms = [int(m) for m in m_values]
    for m in ms:
        if not SCAN_M_RANGE[0] <= m <= SCAN_M_RANGE[1]:
            raise DomainError(f"scan m must lie in {SCAN_M_RANGE}, got {m}")
    out = []
    for m in sorted(ms):
        if strategy == "p=m":
            ps = [float(m)]
        elif strategy == "grid":
            if p_grid is None:
                raise DomainError("grid strategy needs p_grid")
            ps = sorted(float(p) for p in p_grid)
        elif strategy == "minimize":
            ps = [minimise_p(kind, m)]
        else:
            raise DomainError(f"unknown p-strategy {strategy!r}")
        for p in ps:
            out.append(
                StabilityReport(kind, m, p, second_variation_gamma(kind, m, p), exploratory=strategy == "minimize")
            )
    return out

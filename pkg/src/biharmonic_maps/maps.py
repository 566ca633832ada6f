"""Catalog of explicit sphere-valued maps on the punctured ball.

Base maps (all harmonic, zero-homogeneous, singular at the origin):

* ``equator``: ``x / r`` into ``S^(m-1)``;
* ``mn2``: ``u_ij = (-delta_ij + m x_i x_j / r^2) / sqrt(m(m-1))`` into
  ``S^(m^2-1)``, flattened row-major as ``i*m + j``;
* ``mn3``: ``v_ijk = (delta_ij x_k/r + delta_jk x_i/r + delta_ik x_j/r
  - (m+2) x_i x_j x_k / r^3) / sqrt((m-1)(m+2))`` into ``S^(m^3-1)``,
  flattened as ``(i*m + j)*m + k``.

Rotated maps ``(sin(a) u, cos(a))`` append one constant coordinate, so
``mn2-rotated`` lands in ``R^(m^2+1)`` and ``mn3-rotated`` in
``R^(m^3+1)``; ``fmr`` is the rotated equator map.

Each base map ``u`` satisfies ``|grad u|^2 = lam / r^2``, ``Lap u = -lam/r^2 u``
and ``Lap^2 u = lam (lam + 2m - 8) / r^4 u`` with ``lam = m - 1, 2m, 3(m+1)``
for equator, mn2 and mn3.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .diffops import Jet
from .errors import DomainError, SingularPointError


class MapKind(str, Enum):
    EQUATOR = "equator"
    FMR = "fmr"
    MN2 = "mn2"
    MN3 = "mn3"
    MN2_ROTATED = "mn2-rotated"
    MN3_ROTATED = "mn3-rotated"

    @classmethod
    def parse(cls, name) -> "MapKind":
        """Accept canonical names plus the short forms ``mn2-rot``/``mn3-rot``."""
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("_", "-")
        key = {"mn2-rot": "mn2-rotated", "mn3-rot": "mn3-rotated"}.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise DomainError(f"unknown map kind {name!r}") from None

    @property
    def rotated(self) -> bool:
        return self in _BASE_OF

    @property
    def base(self) -> "MapKind":
        return _BASE_OF.get(self, self)

    def __str__(self):
        return self.value


_BASE_OF = {
    MapKind.FMR: MapKind.EQUATOR,
    MapKind.MN2_ROTATED: MapKind.MN2,
    MapKind.MN3_ROTATED: MapKind.MN3,
}


def eigenvalue(kind: MapKind, m: int) -> int:
    """``lam`` with ``|grad u|^2 = lam / r^2`` for the (unrotated) base map."""
    base = MapKind.parse(kind).base
    if base is MapKind.EQUATOR:
        return m - 1
    if base is MapKind.MN2:
        return 2 * m
    return 3 * (m + 1)


def base_dim(kind: MapKind, m: int) -> int:
    base = MapKind.parse(kind).base
    return {MapKind.EQUATOR: m, MapKind.MN2: m * m, MapKind.MN3: m**3}[base]


def critical_sin2(kind, m: int) -> float | None:
    """``sin^2`` of the angle at which the rotated map is proper biharmonic.

    ``None`` when no angle in (0, pi/2) exists. For ``fmr`` only m = 5, 6
    qualify (the rotated equator map is a weak proper biharmonic map only in
    those dimensions).
    """
    kind = MapKind.parse(kind)
    if not kind.rotated:
        raise DomainError(f"{kind} has no rotation angle")
    if m < 2:
        raise DomainError(f"m must be >= 2, got {m}")
    if kind is MapKind.FMR:
        return {5: 0.75, 6: 0.9}.get(m)
    if kind is MapKind.MN2_ROTATED:
        s2 = 1.0 - 2.0 / m
    else:
        s2 = 5.0 * (m - 1) / (6.0 * (m + 1))
    return s2 if 0.0 < s2 < 1.0 else None


def critical_angle(kind, m: int) -> float | None:
    """Critical rotation angle in (0, pi/2), or ``None`` if there is none."""
    kind = MapKind.parse(kind)
    s2 = critical_sin2(kind, m)
    if s2 is None:
        return None
    if kind is MapKind.FMR:
        return math.pi / 3.0 if m == 5 else 0.5 * math.acos(-0.8)
    return math.asin(math.sqrt(s2))


@dataclass(frozen=True)
class MapSpec:
    """Which map, on which ball, with which rotation.

    Rotated kinds carry both ``sin2`` (exact when given) and ``angle``;
    pass either one. Base kinds carry neither.
    """

    kind: MapKind
    m: int
    sin2: float | None = None
    angle: float | None = None

    def __post_init__(self):
        kind = MapKind.parse(self.kind)
        object.__setattr__(self, "kind", kind)
        if int(self.m) != self.m or self.m < 2:
            raise DomainError(f"domain dimension must be an integer >= 2, got {self.m!r}")
        object.__setattr__(self, "m", int(self.m))
        if not kind.rotated:
            if self.sin2 is not None or self.angle is not None:
                raise DomainError(f"{kind} takes no rotation angle")
            return
        sin2, angle = self.sin2, self.angle
        if sin2 is None and angle is None:
            raise DomainError(f"{kind} needs an angle or sin^2 value")
        if angle is not None:
            angle = float(angle)
            if not 0.0 < angle < math.pi / 2:
                raise DomainError(f"angle must lie in (0, pi/2), got {angle!r}")
            if sin2 is None:
                sin2 = math.sin(angle) ** 2
        sin2 = float(sin2)
        if not 0.0 < sin2 < 1.0:
            raise DomainError(f"sin^2 of the angle must lie in (0, 1), got {sin2!r}")
        if angle is None:
            angle = math.asin(math.sqrt(sin2))
        object.__setattr__(self, "sin2", sin2)
        object.__setattr__(self, "angle", angle)

    @classmethod
    def critical(cls, kind, m: int) -> "MapSpec":
        """The rotated map at its critical angle (base kinds are returned as-is)."""
        kind = MapKind.parse(kind)
        if not kind.rotated:
            return cls(kind, m)
        s2 = critical_sin2(kind, m)
        if s2 is None:
            raise DomainError(f"{kind} has no critical angle for m={m}")
        return cls(kind, m, sin2=s2, angle=critical_angle(kind, m))

    @property
    def rotated(self) -> bool:
        return self.kind.rotated

    @property
    def sin(self) -> float:
        return math.sqrt(self.sin2) if self.rotated else 1.0

    @property
    def cos(self) -> float:
        return math.sqrt(1.0 - self.sin2) if self.rotated else 0.0

    @property
    def eigenvalue(self) -> int:
        return eigenvalue(self.kind, self.m)

    @property
    def codomain_dim(self) -> int:
        return base_dim(self.kind, self.m) + (1 if self.rotated else 0)

    @property
    def is_critical(self) -> bool:
        if not self.rotated:
            return False
        s2 = critical_sin2(self.kind, self.m)
        return s2 is not None and abs(s2 - self.sin2) <= 1e-14

    def label(self) -> str:
        if self.rotated:
            return f"{self.kind}(m={self.m}, sin2={self.sin2!r})"
        return f"{self.kind}(m={self.m})"


def _radius(X: np.ndarray) -> np.ndarray:
    r = np.linalg.norm(X, axis=-1)
    if np.any(r == 0.0):
        raise SingularPointError("catalog maps are undefined at the origin")
    return r


def _base_values(kind: MapKind, m: int, X: np.ndarray) -> np.ndarray:
    r = _radius(X)[..., None]
    n = X / r
    lead = X.shape[:-1]
    if kind is MapKind.EQUATOR:
        return n
    eye = np.eye(m)
    if kind is MapKind.MN2:
        u = (-eye + m * n[..., :, None] * n[..., None, :]) / math.sqrt(m * (m - 1))
        return u.reshape(lead + (m * m,))
    ni = n[..., :, None, None]
    nj = n[..., None, :, None]
    nk = n[..., None, None, :]
    v = (
        eye[:, :, None] * nk
        + eye[None, :, :] * ni
        + eye[:, None, :] * nj
        - (m + 2) * ni * nj * nk
    ) / math.sqrt((m - 1) * (m + 2))
    return v.reshape(lead + (m**3,))


def eval_map(spec: MapSpec, x) -> np.ndarray:
    """Evaluate a catalog map at one point ``(m,)`` or a batch ``(..., m)``.

    The result has unit Euclidean norm along the last axis.
    """
    X = np.asarray(x, dtype=float)
    if X.shape[-1] != spec.m:
        raise DomainError(f"points must have {spec.m} coordinates, got shape {X.shape}")
    u = _base_values(spec.kind.base, spec.m, X)
    if not spec.rotated:
        return u
    tail = np.full(u.shape[:-1] + (1,), spec.cos)
    return np.concatenate([spec.sin * u, tail], axis=-1)


def evaluator(spec: MapSpec):
    """Batched callable ``(N, m) -> (N, d)`` for the finite-difference module."""

    def f(X):
        return eval_map(spec, X)

    return f


def _base_jacobian(kind: MapKind, m: int, x: np.ndarray) -> np.ndarray:
    r = float(np.linalg.norm(x))
    n = x / r
    eye = np.eye(m)
    # dn[k, a] = d n_k / d x_a
    dn = (eye - np.outer(n, n)) / r
    if kind is MapKind.EQUATOR:
        return dn
    if kind is MapKind.MN2:
        c = m / math.sqrt(m * (m - 1))
        J = c * (np.einsum("ia,j->ija", dn, n) + np.einsum("i,ja->ija", n, dn))
        return J.reshape(m * m, m)
    c = 1.0 / math.sqrt((m - 1) * (m + 2))
    J = (
        np.einsum("ij,ka->ijka", eye, dn)
        + np.einsum("jk,ia->ijka", eye, dn)
        + np.einsum("ik,ja->ijka", eye, dn)
        - (m + 2)
        * (
            np.einsum("ia,j,k->ijka", dn, n, n)
            + np.einsum("i,ja,k->ijka", n, dn, n)
            + np.einsum("i,j,ka->ijka", n, n, dn)
        )
    )
    return (c * J).reshape(m**3, m)


def analytic_jet(spec: MapSpec, x) -> Jet:
    """Closed-form value, Jacobian, Laplacian, bilaplacian and grad(Laplacian)."""
    x = np.asarray(x, dtype=float)
    if x.shape != (spec.m,):
        raise DomainError(f"expected a point of shape ({spec.m},), got {x.shape}")
    r2 = float(x @ x)
    if r2 == 0.0:
        raise SingularPointError("catalog maps are undefined at the origin")
    m, lam = spec.m, spec.eigenvalue
    base = spec.kind.base
    u = _base_values(base, m, x)
    J = _base_jacobian(base, m, x)
    lap = -lam / r2 * u
    bilap = lam * (lam + 2 * m - 8) / r2**2 * u
    # grad(Lap u) = grad(-lam/r^2) (x) u - lam/r^2 grad u
    lap_grad = np.outer(u, 2.0 * lam * x / r2**2) - lam / r2 * J
    if spec.rotated:
        s = spec.sin
        pad = np.zeros((1,))
        u = np.concatenate([s * u, [spec.cos]])
        J = np.vstack([s * J, np.zeros((1, m))])
        lap = np.concatenate([s * lap, pad])
        bilap = np.concatenate([s * bilap, pad])
        lap_grad = np.vstack([s * lap_grad, np.zeros((1, m))])
    return Jet(value=u, jacobian=J, laplacian=lap, bilaplacian=bilap, laplacian_gradient=lap_grad)

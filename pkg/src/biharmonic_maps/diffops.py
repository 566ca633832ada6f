"""Finite-difference differential operators for vector-valued maps on R^m.

All operators take a *batched* evaluator ``f: (N, m) -> (N, d)`` and one
point ``x`` of shape ``(m,)`` or a batch of shape ``(N, m)``. Steps are
relative: the absolute step at ``x`` is ``h * |x|``, because the catalog
maps vary on the length scale ``r = |x|`` and are singular at the origin.

Central stencils of order 2 or 4 are combined with Richardson
extrapolation over the steps ``h, h/2, h/4``. The bilaplacian is the
composition of two axis Laplacian stencils (so ``d^4/dx_a^4`` is the 1-d
second-difference stencil convolved with itself), which avoids an
``m^4``-point stencil.
"""

from dataclasses import dataclass
from functools import lru_cache
from math import factorial
from typing import Callable

import numpy as np

from .errors import DomainError, SingularPointError, StencilTooLargeError

Evaluator = Callable[[np.ndarray], np.ndarray]

_MIN_STEP, _MAX_STEP = 1e-4, 1e-1


@dataclass(frozen=True)
class FDConfig:
    """Finite-difference settings.

    ``h``/``levels`` drive first and second derivatives. ``outer_h`` and
    ``outer_levels`` drive the fourth-order operator and every derivative
    taken of an already finite-differenced quantity; a 1e-3 step there
    would drown in round-off (eps / h^4).
    """

    h: float = 1e-3
    order: int = 2
    levels: int = 2
    outer_h: float = 5e-2
    outer_levels: int = 3

    def __post_init__(self):
        for name in ("h", "outer_h"):
            step = getattr(self, name)
            if not _MIN_STEP <= step <= _MAX_STEP:
                raise DomainError(f"{name}={step!r} outside [{_MIN_STEP}, {_MAX_STEP}]")
        if self.order not in (2, 4):
            raise DomainError(f"scheme order must be 2 or 4, got {self.order!r}")
        for name in ("levels", "outer_levels"):
            if getattr(self, name) not in (1, 2, 3):
                raise DomainError(f"{name} must be 1, 2 or 3, got {getattr(self, name)!r}")


@dataclass
class Jet:
    """Value and derivatives of a map at one point.

    ``jacobian[i, k]`` is the partial derivative of component ``i`` along
    ``x_k``. ``bilaplacian`` and ``laplacian_gradient`` (shape ``(d, m)``)
    are optional extras that not every producer fills in.
    """

    value: np.ndarray
    jacobian: np.ndarray
    laplacian: np.ndarray
    bilaplacian: np.ndarray | None = None
    laplacian_gradient: np.ndarray | None = None

    @property
    def codomain_dim(self) -> int:
        return self.value.shape[0]

    @property
    def m(self) -> int:
        return self.jacobian.shape[1]

    @property
    def density(self) -> float:
        """Squared Frobenius norm of the Jacobian, ``|grad u|^2``."""
        return float(np.sum(self.jacobian**2))


@dataclass(frozen=True)
class _Stencil:
    offsets: np.ndarray  # (S, m), in units of the step
    weights: np.ndarray  # (S, *out_shape)
    power: int  # derivative order; result is divided by step**power

    @property
    def radius(self) -> float:
        return float(np.max(np.linalg.norm(self.offsets, axis=1)))


@lru_cache(maxsize=None)
def central_weights(deriv: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Offsets and weights of the central difference for ``d^deriv/dx^deriv``.

    The stencil has accuracy ``O(h^order)`` (order even).
    """
    half = (deriv + order - 1) // 2
    offsets = np.arange(-half, half + 1)
    vander = np.vander(offsets, increasing=True).T.astype(float)
    rhs = np.zeros(len(offsets))
    rhs[deriv] = factorial(deriv)
    weights = np.linalg.solve(vander, rhs)
    weights[np.abs(weights) < 1e-13] = 0.0
    return offsets, weights


def _merge(entries, m, out_shape):
    acc = {}
    for offset, weight in entries:
        key = tuple(float(o) for o in offset)
        acc[key] = acc.get(key, 0.0) + weight
    keys = sorted(acc)
    offsets = np.array(keys, dtype=float).reshape(len(keys), m)
    weights = np.array([acc[k] for k in keys], dtype=float).reshape((len(keys),) + out_shape)
    return offsets, weights


def _axis(m, a, o):
    e = np.zeros(m)
    e[a] = o
    return e


@lru_cache(maxsize=None)
def _gradient_stencil(m: int, order: int) -> _Stencil:
    offs, ws = central_weights(1, order)
    entries = []
    for a in range(m):
        for o, w in zip(offs, ws):
            if w != 0.0:
                entries.append((_axis(m, a, o), w * _axis(m, a, 1.0)))
    offsets, weights = _merge(entries, m, (m,))
    return _Stencil(offsets, weights, 1)


@lru_cache(maxsize=None)
def _laplacian_stencil(m: int, order: int) -> _Stencil:
    offs, ws = central_weights(2, order)
    entries = [(_axis(m, a, o), w) for a in range(m) for o, w in zip(offs, ws)]
    offsets, weights = _merge(entries, m, ())
    return _Stencil(offsets, weights, 2)


@lru_cache(maxsize=None)
def _bilaplacian_stencil(m: int, order: int) -> _Stencil:
    offs, ws = central_weights(2, order)
    entries = []
    for a in range(m):
        # Laplacian of the Laplacian, diagonal part: D2 convolved with D2.
        for o1, w1 in zip(offs, ws):
            for o2, w2 in zip(offs, ws):
                entries.append((_axis(m, a, o1 + o2), w1 * w2))
        for b in range(a + 1, m):
            for o1, w1 in zip(offs, ws):
                for o2, w2 in zip(offs, ws):
                    entries.append((_axis(m, a, o1) + _axis(m, b, o2), 2.0 * w1 * w2))
    offsets, weights = _merge(entries, m, ())
    return _Stencil(offsets, weights, 4)


@lru_cache(maxsize=None)
def _hessian_stencil(m: int, order: int) -> _Stencil:
    o1s, w1s = central_weights(1, order)
    o2s, w2s = central_weights(2, order)
    entries = []
    for a in range(m):
        for o, w in zip(o2s, w2s):
            wt = np.zeros((m, m))
            wt[a, a] = w
            entries.append((_axis(m, a, o), wt))
        for b in range(a + 1, m):
            for oa, wa in zip(o1s, w1s):
                for ob, wb in zip(o1s, w1s):
                    if wa * wb == 0.0:
                        continue
                    wt = np.zeros((m, m))
                    wt[a, b] = wt[b, a] = wa * wb
                    entries.append((_axis(m, a, oa) + _axis(m, b, ob), wt))
    offsets, weights = _merge(entries, m, (m, m))
    return _Stencil(offsets, weights, 2)


def _richardson(values: list[np.ndarray], order: int) -> np.ndarray:
    """Extrapolate estimates at steps h, h/2, h/4 with error series h^order, h^(order+2)."""
    table = list(values)
    for j in range(1, len(values)):
        q = 2.0 ** (order + 2 * (j - 1))
        table = [(q * table[i + 1] - table[i]) / (q - 1.0) for i in range(len(table) - 1)]
    return table[0]


def _points(x) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    X = np.atleast_2d(x)
    if np.any(np.linalg.norm(X, axis=1) == 0.0):
        raise SingularPointError("finite differences requested at the origin")
    return X, single


def _apply(f: Evaluator, X: np.ndarray, st: _Stencil, step: np.ndarray) -> np.ndarray:
    n, m = X.shape
    P = X[:, None, :] + st.offsets[None, :, :] * step[:, None, None]
    F = np.asarray(f(P.reshape(-1, m)), dtype=float)
    F = F.reshape(n, st.offsets.shape[0], -1)
    out = np.tensordot(F, st.weights, axes=([1], [0]))  # (n, d, *out_shape)
    scale = step ** st.power
    return out / scale.reshape((n,) + (1,) * (out.ndim - 1))


def _fd(f: Evaluator, x, stencil_fn, h: float, order: int, levels: int) -> np.ndarray:
    X, single = _points(x)
    st = stencil_fn(X.shape[1], order)
    if st.radius * h * 4.0 >= 1.0:
        raise StencilTooLargeError(
            f"stencil radius {st.radius:g} with relative step {h:g} reaches within r/4 of the origin"
        )
    r = np.linalg.norm(X, axis=1)
    estimates = [_apply(f, X, st, h * r / 2.0**i) for i in range(levels)]
    out = _richardson(estimates, order)
    return out[0] if single else out


def fd_gradient(f: Evaluator, x, h: float = 1e-3, order: int = 2, levels: int = 2) -> np.ndarray:
    """Jacobian, shape ``(d, m)`` (or ``(N, d, m)`` for a batch)."""
    return _fd(f, x, _gradient_stencil, h, order, levels)


def fd_laplacian(f: Evaluator, x, h: float = 1e-3, order: int = 2, levels: int = 2) -> np.ndarray:
    """Component-wise Laplacian, shape ``(d,)``."""
    return _fd(f, x, _laplacian_stencil, h, order, levels)


def fd_bilaplacian(f: Evaluator, x, h: float = 5e-2, order: int = 2, levels: int = 3) -> np.ndarray:
    """Component-wise bilaplacian, shape ``(d,)``."""
    return _fd(f, x, _bilaplacian_stencil, h, order, levels)


def fd_hessian(f: Evaluator, x, h: float = 1e-3, order: int = 2, levels: int = 2) -> np.ndarray:
    """Second-derivative tensor, shape ``(d, m, m)``."""
    return _fd(f, x, _hessian_stencil, h, order, levels)


def fd_jet(evaluate: Evaluator, x, cfg: FDConfig | None = None, bilaplacian: bool = True) -> Jet:
    """Jet of ``evaluate`` at a single point ``x`` by finite differences.

    Raises :class:`StencilTooLargeError` if a stencil would come within
    ``r/4`` of the origin.
    """
    cfg = cfg or FDConfig()
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise DomainError("fd_jet expects a single point of shape (m,)")
    _points(x)
    value = np.asarray(evaluate(x[None, :]), dtype=float)[0]
    jac = fd_gradient(evaluate, x, cfg.h, cfg.order, cfg.levels)
    lap = fd_laplacian(evaluate, x, cfg.h, cfg.order, cfg.levels)
    bilap = None
    if bilaplacian:
        bilap = fd_bilaplacian(evaluate, x, cfg.outer_h, cfg.order, cfg.outer_levels)
    return Jet(value=value, jacobian=jac, laplacian=lap, bilaplacian=bilap)


def fd_density(evaluate: Evaluator, cfg: FDConfig | None = None) -> Evaluator:
    """Batched evaluator of ``|grad u|^2`` built from finite-difference Jacobians."""
    cfg = cfg or FDConfig()

    def density(Y: np.ndarray) -> np.ndarray:
        J = fd_gradient(evaluate, np.atleast_2d(Y), cfg.h, cfg.order, cfg.levels)
        return np.sum(J**2, axis=(1, 2))[:, None]

    return density


def fd_density_gradient(evaluate: Evaluator, x, cfg: FDConfig | None = None) -> np.ndarray:
    """Gradient of ``|grad u|^2`` at ``x``, shape ``(m,)``."""
    cfg = cfg or FDConfig()
    g = fd_gradient(fd_density(evaluate, cfg), x, cfg.outer_h, cfg.order, cfg.outer_levels)
    return g[0] if np.ndim(x) == 1 else g[:, 0]


def fd_density_laplacian(evaluate: Evaluator, x, cfg: FDConfig | None = None) -> float:
    """Laplacian of ``|grad u|^2`` at a single point ``x``."""
    cfg = cfg or FDConfig()
    lap = fd_laplacian(fd_density(evaluate, cfg), x, cfg.outer_h, cfg.order, cfg.outer_levels)
    return float(lap[0])


def fd_laplacian_gradient(evaluate: Evaluator, x, cfg: FDConfig | None = None) -> np.ndarray:
    """Jacobian of the finite-difference Laplacian, shape ``(d, m)``."""
    cfg = cfg or FDConfig()

    def lap(Y):
        return fd_laplacian(evaluate, np.atleast_2d(Y), cfg.h, cfg.order, cfg.levels)

    return fd_gradient(lap, x, cfg.outer_h, cfg.order, cfg.outer_levels)


def divergence_term(jet: Jet, grad_density: np.ndarray, density: float) -> np.ndarray:
    """``div(|grad u|^2 grad u)`` assembled from a jet.

    Equals ``density * laplacian + jacobian @ grad_density`` where
    ``density = |grad u|^2`` and ``grad_density`` is its spatial gradient.
    """
    grad_density = np.asarray(grad_density, dtype=float)
    d, m = jet.jacobian.shape
    if grad_density.shape != (m,) or jet.laplacian.shape != (d,):
        raise DomainError(
            f"shape mismatch: jacobian {jet.jacobian.shape}, laplacian "
            f"{jet.laplacian.shape}, density gradient {grad_density.shape}"
        )
    return float(density) * jet.laplacian + jet.jacobian @ grad_density

"""Reaction terms of the bacteria-nutrient model and their Taylor data.

The kinetics are

    g(u, v) =  a(u) u r(v) - m u + eps
    h(u, v) = -a(u) u r(v) + sigma (v0 - v)

with the activity fraction a(u) = gamma + (1 - gamma) u / (k + u) and the
nutrient uptake r(v) = v / (1 + v).  Writing P(u) = a(u) u, every partial
derivative of order two or three factorizes as P^(a)(u) r^(b)(v), which is
what :func:`derivatives` exploits.

All functions accept scalars or numpy arrays for ``u`` and ``v``.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from .errors import KineticsDomainError

__all__ = [
    "ParameterSet",
    "StateVector",
    "DerivativeTensor",
    "reaction",
    "derivatives",
    "bilinear_B",
    "trilinear_C",
]


@dataclass(frozen=True)
class ParameterSet:
    """Kinetic and diffusion parameters.

    Defaults are the main parameter set of the model; ``sigma`` and ``gamma``
    are the two parameters varied throughout.  ``delta`` is derived from the
    diffusion coefficients and cannot be set.
    """

    k: float = 1.0
    v0: float = 4.125
    eps: float = 0.005
    m: float = 0.3175
    delta_u: float = 2e-5
    delta_v: float = 1e-3
    sigma: float = 0.1
    gamma: float = 0.25
    delta: float = field(init=False, repr=False)

    def __post_init__(self):
        for name in ("k", "v0", "eps", "m", "delta_u", "delta_v", "sigma", "gamma"):
            val = getattr(self, name)
            if not np.isfinite(val) or val <= 0:
                raise ValueError(f"parameter {name} must be positive, got {val!r}")
        if self.gamma > 1:
            raise ValueError(f"gamma must lie in (0, 1], got {self.gamma}")
        if self.delta_u >= self.delta_v:
            raise ValueError("delta_u < delta_v is required")
        object.__setattr__(self, "delta", self.delta_v / self.delta_u)

    def replace(self, **changes) -> "ParameterSet":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in dataclasses.fields(self) if f.init}


@dataclass(frozen=True)
class StateVector:
    u: float
    v: float

    def __iter__(self):
        yield self.u
        yield self.v

    def as_array(self) -> np.ndarray:
        return np.array([self.u, self.v], dtype=float)


def _check_domain(u, v, k, guard=True):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if not (np.all(np.isfinite(u)) and np.all(np.isfinite(v))):
        bad = np.flatnonzero(~(np.isfinite(u) & np.isfinite(v)).ravel())
        raise KineticsDomainError("non-finite state", node=int(bad[0]) if u.ndim else None)
    if guard:
        bad = (u <= -0.5 * k) | (v <= -0.5)
    else:
        bad = (u == -k) | (v == -1.0)
    if np.any(bad):
        idx = np.flatnonzero(np.ravel(bad))
        raise KineticsDomainError(
            "state outside guarded domain u > -k/2, v > -1/2",
            node=int(idx[0]) if u.ndim else None,
        )
    return u, v


def _uptake(u, v, p):
    # P(u) = (gamma + (1-gamma) u/(k+u)) u
    return (p.gamma + (1.0 - p.gamma) * u / (p.k + u)) * u * v / (1.0 + v)


def reaction(w, p: ParameterSet, guard: bool = True):
    """Evaluate the kinetics (g, h) at ``w = (u, v)``.

    Array inputs give a tuple of arrays, scalars a :class:`StateVector`.
    With ``guard=False`` only the poles u = -k, v = -1 are rejected (used
    for the algebra of non-physical homogeneous roots).
    """
    u, v = w
    u, v = _check_domain(u, v, p.k, guard)
    up = _uptake(u, v, p)
    g = up - p.m * u + p.eps
    h = -up + p.sigma * (p.v0 - v)
    if g.ndim == 0:
        return StateVector(float(g), float(h))
    return g, h


@dataclass
class DerivativeTensor:
    """Partials of (g, h) through third order.

    ``table[c, a, b]`` holds d^a/du^a d^b/dv^b of component ``c`` (0 for g,
    1 for h); entries with a + b > 3 are zero.  Works elementwise when the
    expansion point is an array of nodes (trailing axes).
    """

    table: np.ndarray
    xi: np.ndarray
    theta: np.ndarray

    def f(self, a: int, b: int) -> np.ndarray:
        """2-vector (g, h) partial of order (a, b)."""
        return self.table[:, a, b]

    @property
    def jacobian(self) -> np.ndarray:
        """2x2 kinetics Jacobian [[g_u, g_v], [h_u, h_v]] (leading axes)."""
        t = self.table
        return np.array([[t[0, 1, 0], t[0, 0, 1]], [t[1, 1, 0], t[1, 0, 1]]])


def derivatives(w, p: ParameterSet, guard: bool = True) -> DerivativeTensor:
    """Closed-form partials of the kinetics through third order at ``w``."""
    u, v = w
    u, v = _check_domain(u, v, p.k, guard)
    k, gam = p.k, p.gamma
    ku = k + u
    c = (1.0 - gam) * k * k
    P = u - (1.0 - gam) * k + c / ku
    dP = [P, 1.0 - c / ku**2, 2.0 * c / ku**3, -6.0 * c / ku**4]
    onev = 1.0 + v
    dr = [v / onev, 1.0 / onev**2, -2.0 / onev**3, 6.0 / onev**4]

    shape = np.broadcast(u, v).shape
    table = np.zeros((2, 4, 4) + shape)
    for a in range(4):
        for b in range(4 - a):
            if a + b < 1:
                continue
            table[0, a, b] = dP[a] * dr[b]
            table[1, a, b] = -dP[a] * dr[b]
    xi = dP[1] * dr[0]
    theta = dP[0] * dr[1]
    table[0, 1, 0] = xi - p.m
    table[1, 1, 0] = -xi
    table[0, 0, 1] = theta
    table[1, 0, 1] = -theta - p.sigma
    return DerivativeTensor(table=table, xi=np.asarray(xi), theta=np.asarray(theta))


def bilinear_B(p1, p2, d: DerivativeTensor) -> np.ndarray:
    """Symmetric bilinear Taylor form B(p, q) of the kinetics.

    f(w* + x) = f(w*) + J x + B(x, x) + C(x, x, x) + O(|x|^4).
    Arguments may be complex 2-vectors.
    """
    p1 = np.asarray(p1)
    p2 = np.asarray(p2)
    t = d.table
    return 0.5 * t[:, 1, 1] * (p1[0] * p2[1] + p1[1] * p2[0]) + 0.5 * (
        t[:, 2, 0] * p1[0] * p2[0] + t[:, 0, 2] * p1[1] * p2[1]
    )


def trilinear_C(p1, p2, p3, d: DerivativeTensor) -> np.ndarray:
    """Symmetric trilinear Taylor form C(p, q, r) of the kinetics."""
    p, q, r = np.asarray(p1), np.asarray(p2), np.asarray(p3)
    t = d.table
    return (
        t[:, 3, 0] * p[0] * q[0] * r[0]
        + t[:, 0, 3] * p[1] * q[1] * r[1]
        + t[:, 2, 1] * (p[0] * q[0] * r[1] + r[0] * p[0] * q[1] + q[0] * r[0] * p[1])
        + t[:, 1, 2] * (p[0] * q[1] * r[1] + r[0] * p[1] * q[1] + q[0] * r[1] * p[1])
    ) / 6.0

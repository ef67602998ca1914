"""Homogeneous steady states, their stability and the dispersion relation.

Eliminating ``v`` with the linear relation v = v0 - (m u - eps) / sigma
turns f(u, v) = 0 into the monic cubic u^3 + b u^2 + c u + d = 0 whose
coefficients are affine in gamma and sigma.  Roots are labelled 1, 2, 3 by
descending ``u`` when all three are real; a lone real root is labelled 1 and
the complex pair 2 (positive imaginary part) and 3.
"""
from __future__ import annotations

import csv
import dataclasses
import enum
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import (
    CriticalPointNotFound,
    NoNeutralWavenumberError,
    SingularParameterError,
)
from .kinetics import ParameterSet, derivatives

__all__ = [
    "CubicCoefficients",
    "StabilityClass",
    "Stability",
    "HomogeneousState",
    "DispersionSample",
    "cubic_coefficients",
    "homogeneous_states",
    "classify_stability",
    "dispersion",
    "dispersion_matrix",
    "neutral_wavenumbers",
    "critical_point",
    "plane_scan",
    "write_scan_csv",
]

INDETERMINATE_TOL = 1e-10
ARCCOS_CLAMP = 1e-12


@dataclass(frozen=True)
class CubicCoefficients:
    """Decomposition b = b_g gamma + b_s sigma + b_0, etc., plus the assembled cubic."""

    b_g: float
    b_s: float
    b_0: float
    c_g: float
    c_s: float
    c_sg: float
    c_0: float
    d_s: float
    d_0: float
    sigma: float
    gamma: float

    def at(self, sigma: float, gamma: float) -> tuple[float, float, float]:
        b = self.b_g * gamma + self.b_s * sigma + self.b_0
        c = self.c_g * gamma + self.c_s * sigma + self.c_sg * sigma * gamma + self.c_0
        d = self.d_s * sigma + self.d_0
        return b, c, d

    @property
    def b(self):
        return self.at(self.sigma, self.gamma)[0]

    @property
    def c(self):
        return self.at(self.sigma, self.gamma)[1]

    @property
    def d(self):
        return self.at(self.sigma, self.gamma)[2]

    @property
    def p(self):
        b, c, _ = self.at(self.sigma, self.gamma)
        return c - b * b / 3.0

    @property
    def q(self):
        b, c, d = self.at(self.sigma, self.gamma)
        return 2.0 * b**3 / 27.0 + d - b * c / 3.0

    def residual(self, u):
        b, c, d = self.at(self.sigma, self.gamma)
        return ((u + b) * u + c) * u + d


def cubic_coefficients(p: ParameterSet) -> CubicCoefficients:
    k, v0, eps, m = p.k, p.v0, p.eps, p.m
    if m == 1.0:
        raise SingularParameterError("m = 1 makes the cubic reduction singular")
    mm = m * (m - 1.0)
    return CubicCoefficients(
        b_g=-k / (m - 1.0),
        b_s=(v0 - v0 * m - m) / mm,
        b_0=(m * m * k + eps - 2.0 * m * eps) / mm,
        c_g=eps * k / mm,
        c_s=(v0 + 1.0) * (eps - m * k) / mm,
        c_sg=v0 * k / mm,
        c_0=(-2.0 * m * eps * k + eps * eps) / mm,
        d_s=eps * k * (v0 + 1.0) / mm,
        d_0=eps * eps * k / mm,
        sigma=p.sigma,
        gamma=p.gamma,
    )


class StabilityClass(enum.Enum):
    STABLE = "Stable"
    TURING_UNSTABLE = "TuringUnstable"
    SPACE_INDEPENDENT_UNSTABLE = "SpaceIndependentUnstable"
    NOT_REAL = "NotReal"
    NOT_POSITIVE = "NotPositive"
    INDETERMINATE = "Indeterminate"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Stability:
    """A stability class together with the diagnostics b1..b4."""

    cls: StabilityClass
    b1: float = math.nan
    b2: float = math.nan
    b3: float = math.nan
    b4: float = math.nan


@dataclass(frozen=True)
class HomogeneousState:
    u: float
    v: float
    index: int
    is_real: bool = True
    is_positive: bool = True
    stability: Stability | None = None
    u_complex: complex | None = None

    @property
    def w(self) -> tuple[float, float]:
        return (self.u, self.v)


@dataclass(frozen=True)
class DispersionSample:
    k: float
    mu_plus: complex
    mu_minus: complex


def _v_from_u(u, p: ParameterSet):
    return p.v0 - (p.m * u - p.eps) / p.sigma


def _polish(u, b, c, d, steps=3):
    for _ in range(steps):
        f = ((u + b) * u + c) * u + d
        df = (3.0 * u + 2.0 * b) * u + c
        if df == 0:
            break
        du = f / df
        u -= du
        if abs(du) <= 1e-16 * max(1.0, abs(u)):
            break
    return u


def _cubic_roots(b, c, d):
    """Return ``[(index, root)]`` with complex roots where not all are real."""
    pp = c - b * b / 3.0
    qq = 2.0 * b**3 / 27.0 + d - b * c / 3.0
    if pp < 0:
        arg = -qq / 2.0 * math.sqrt(-27.0 / pp**3)
        if abs(arg) <= 1.0 + ARCCOS_CLAMP:
            arg = min(1.0, max(-1.0, arg))
            amp = math.sqrt(-4.0 * pp / 3.0)
            th = math.acos(arg) / 3.0
            roots = [
                amp * math.cos(th) - b / 3.0,
                -amp * math.cos(th + math.pi / 3.0) - b / 3.0,
                -amp * math.cos(th - math.pi / 3.0) - b / 3.0,
            ]
            return [(i + 1, _polish(r, b, c, d)) for i, r in enumerate(roots)]
    # one real root and a complex-conjugate pair
    r = np.roots([1.0, b, c, d])
    j = int(np.argmin(np.abs(r.imag)))
    real = _polish(float(r[j].real), b, c, d)
    pair = [complex(z) for i, z in enumerate(r) if i != j]
    pair.sort(key=lambda z: z.imag, reverse=True)
    # a lone real root is always labelled 1 (Cardano convention)
    return [(1, real), (2, pair[0]), (3, pair[1])]


def homogeneous_states(p: ParameterSet, *, classify: bool = True) -> list[HomogeneousState]:
    """All three roots of the reduced cubic as :class:`HomogeneousState`.

    Non-real roots are included with ``is_real=False`` and NaN ``u``/``v`` so
    that a state's index is always meaningful; filter on ``is_real``.
    """
    cc = cubic_coefficients(p)
    b, c, d = cc.at(p.sigma, p.gamma)
    out = []
    roots = _cubic_roots(b, c, d)
    reals = [r for _, r in roots if not isinstance(r, complex)]
    for idx, r in roots:
        if isinstance(r, complex):
            out.append(
                HomogeneousState(
                    u=math.nan, v=math.nan, index=idx, is_real=False, is_positive=False,
                    stability=Stability(StabilityClass.NOT_REAL), u_complex=r,
                )
            )
            continue
        v = _v_from_u(r, p)
        pos = r > 0 and v > 0
        s = HomogeneousState(u=r, v=v, index=idx, is_real=True, is_positive=pos)
        double = sum(1 for o in reals if abs(o - r) <= 1e-9 * max(1.0, abs(r))) > 1
        if double:
            st = Stability(StabilityClass.INDETERMINATE)
        elif classify:
            st = classify_stability(s, p)
        else:
            st = None
        out.append(dataclasses.replace(s, stability=st))
    return out


def real_states(p: ParameterSet) -> list[HomogeneousState]:
    return [s for s in homogeneous_states(p) if s.is_real]


def state_by_index(p: ParameterSet, index: int) -> HomogeneousState:
    for s in homogeneous_states(p):
        if s.index == index:
            return s
    raise KeyError(index)


def _bcoeffs(s, p: ParameterSet):
    J = derivatives((s.u, s.v), p, guard=False).jacobian
    gu, gv, hu, hv = J[0, 0], J[0, 1], J[1, 0], J[1, 1]
    dl = p.delta
    b1 = -gu - hv
    b2 = gu * hv - gv * hu
    b3 = dl * gu + hv
    b4 = b3 * b3 - 4.0 * dl * b2
    return float(b1), float(b2), float(b3), float(b4)


def classify_stability(s: HomogeneousState, p: ParameterSet) -> Stability:
    """Stable / Turing-unstable / space-independent-unstable classification."""
    if not s.is_real:
        return Stability(StabilityClass.NOT_REAL)
    b1, b2, b3, b4 = _bcoeffs(s, p)
    tol = INDETERMINATE_TOL
    if b1 < -tol or b2 < -tol:
        cls = StabilityClass.SPACE_INDEPENDENT_UNSTABLE
    elif abs(b1) <= tol or abs(b2) <= tol:
        cls = StabilityClass.INDETERMINATE
    elif b3 < -tol or b4 < -tol:
        cls = StabilityClass.STABLE
    elif b3 > tol and b4 > tol:
        cls = StabilityClass.TURING_UNSTABLE
    else:
        cls = StabilityClass.INDETERMINATE
    return Stability(cls, b1, b2, b3, b4)


def dispersion_matrix(s: HomogeneousState, p: ParameterSet, k: float) -> np.ndarray:
    """L(k) = J_f - diag(1, delta) k^2 at the state."""
    J = derivatives((s.u, s.v), p, guard=False).jacobian
    return J - np.diag([1.0, p.delta]) * k * k


def dispersion(s: HomogeneousState, p: ParameterSet, k: float) -> DispersionSample:
    L = dispersion_matrix(s, p, k)
    half_tr = 0.5 * (L[0, 0] + L[1, 1])
    det = L[0, 0] * L[1, 1] - L[0, 1] * L[1, 0]
    root = np.sqrt(complex(half_tr * half_tr - det))
    return DispersionSample(k=float(k), mu_plus=half_tr + root, mu_minus=half_tr - root)


def det_dispersion(s: HomogeneousState, p: ParameterSet, k):
    L = dispersion_matrix(s, p, 0.0)
    gu, gv, hu, hv = L[0, 0], L[0, 1], L[1, 0], L[1, 1]
    q = np.asarray(k) ** 2
    return (gu - q) * (hv - p.delta * q) - gv * hu


def neutral_wavenumbers(s: HomogeneousState, p: ParameterSet) -> tuple[float, float]:
    """Positive roots k_- <= k_+ of det L(k) = 0."""
    _, b2, b3, _ = _bcoeffs(s, p)
    dl = p.delta
    half = b3 / (2.0 * dl)
    rad = half * half - b2 / dl
    if rad < 0:
        raise NoNeutralWavenumberError(f"complex radicand {rad:.3e}")
    sq = math.sqrt(rad)
    qm, qp = half - sq, half + sq
    if qm < 0:
        raise NoNeutralWavenumberError(f"k_-^2 = {qm:.3e} < 0")
    return math.sqrt(qm), math.sqrt(qp)


def _turing_indicator(sigma, p: ParameterSet, index: int):
    q = p.replace(sigma=sigma)
    s = state_by_index(q, index)
    if not s.is_real:
        return math.nan
    _, _, b3, b4 = _bcoeffs(s, q)
    return min(b3, b4)


def critical_point(
    p: ParameterSet, bracket: tuple[float, float], *, index: int = 1, xtol: float = 1e-12
) -> tuple[float, float]:
    """Turing bifurcation point (sigma_c, k_c) for fixed gamma.

    Solves for the double root of det L(k) in sigma, i.e. b4 = 0 with b3 > 0,
    using Brent's method on min(b3, b4) over ``bracket``.
    """
    lo, hi = bracket
    flo = _turing_indicator(lo, p, index)
    fhi = _turing_indicator(hi, p, index)
    if not (np.isfinite(flo) and np.isfinite(fhi)) or flo * fhi > 0:
        raise CriticalPointNotFound(f"no stability transition in sigma bracket {bracket}")
    sc = brentq(_turing_indicator, lo, hi, args=(p, index), xtol=xtol, rtol=4 * np.finfo(float).eps)
    q = p.replace(sigma=sc)
    s = state_by_index(q, index)
    _, _, b3, _ = _bcoeffs(s, q)
    kc = math.sqrt(max(b3, 0.0) / (2.0 * q.delta))
    return float(sc), kc


def find_critical_points(p: ParameterSet, sigma_range=(1e-3, 0.25), n: int = 500, index: int = 1):
    """All Turing points of root ``index`` in ``sigma_range`` located by a scan."""
    grid = np.linspace(*sigma_range, n)
    vals = np.array([_turing_indicator(s, p, index) for s in grid])
    out = []
    for i in range(n - 1):
        a, b = vals[i], vals[i + 1]
        if np.isfinite(a) and np.isfinite(b) and a * b < 0:
            out.append(critical_point(p, (grid[i], grid[i + 1]), index=index))
    return out


@dataclass(frozen=True)
class ScanRecord:
    sigma: float
    gamma: float
    root_index: int
    u: float
    v: float
    is_real: bool
    is_positive: bool
    stability: StabilityClass

    @property
    def label(self) -> str:
        if not self.is_real:
            return str(StabilityClass.NOT_REAL)
        if not self.is_positive:
            return str(StabilityClass.NOT_POSITIVE)
        return str(self.stability)


def _scan_cell(base: ParameterSet, sigma: float, gamma: float) -> list[ScanRecord]:
    q = base.replace(sigma=sigma, gamma=gamma)
    return [
        ScanRecord(sigma, gamma, s.index, s.u, s.v, s.is_real, s.is_positive, s.stability.cls)
        for s in homogeneous_states(q)
    ]


def _centres(rng, n):
    lo, hi = rng
    if n < 1 or not hi > lo:
        raise ValueError(f"bad scan range {rng} with {n} cells")
    return lo + (np.arange(n) + 0.5) * (hi - lo) / n


def plane_scan(sigma_range, gamma_range, resolution, base: ParameterSet | None = None,
               *, order: str = "row", workers: int = 1):
    """Classify all three roots over a sigma-gamma grid.

    ``sigma_range``/``gamma_range`` are (lo, hi) pairs split into
    ``resolution`` = (n_sigma, n_gamma) cells (or a single int); each cell is
    sampled at its centre, so open ranges starting at zero are fine.  Returns ``(sigmas, gammas, records)``
    where ``records[j][i]`` is the list of three :class:`ScanRecord` at
    (sigmas[i], gammas[j]) (row-major: one row per gamma).
    """
    base = base or ParameterSet()
    if isinstance(resolution, int):
        resolution = (resolution, resolution)
    ns, ng = resolution
    sigmas = _centres(sigma_range, ns)
    gammas = _centres(gamma_range, ng)
    if order == "row":
        cells = [(j, i) for j in range(ng) for i in range(ns)]
    elif order == "column":
        cells = [(j, i) for i in range(ns) for j in range(ng)]
    else:
        raise ValueError(f"unknown scan order {order!r}")
    grid = [[None] * ns for _ in range(ng)]

    def work(cell):
        j, i = cell
        grid[j][i] = _scan_cell(base, float(sigmas[i]), float(gammas[j]))

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            list(ex.map(work, cells))
    else:
        for cell in cells:
            work(cell)
    return sigmas, gammas, grid


def write_scan_csv(scan, fh=None) -> str:
    """Write the raster as CSV: ``sigma,gamma,root_index,u,v,class``."""
    sigmas, gammas, grid = scan
    buf = fh if fh is not None else io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["sigma", "gamma", "root_index", "u", "v", "class"])
    for row in grid:
        for cell in row:
            for r in cell:
                w.writerow([repr(r.sigma), repr(r.gamma), r.root_index, repr(r.u), repr(r.v), r.label])
    return buf.getvalue() if fh is None else ""

"""Semi-implicit time stepping and pattern labelling of horizontal strips.

One step of the first-order IMEX scheme reads

    (I - dt L) u+ = u + dt g(u, v)
    (I - dt delta L) v+ = v + dt h(u, v)

with both matrices factored once per run.  A run is called quiescent once
the relative change over a window of ``window`` time units drops below
``quiescence_tol``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import IntegrationBlowUp
from .kinetics import ParameterSet
from .pde import Field, _laplacian, _reaction_nodes

__all__ = [
    "IntegrationRun",
    "Trajectory",
    "integrate",
    "perturb",
    "StripLabel",
    "classify_strips",
    "write_layering_csv",
]


@dataclass
class IntegrationRun:
    """Configuration of one integration.

    ``initial.sigma`` (scalar or per node) overrides ``p.sigma``.  ``seed``
    only records how the initial state was perturbed.
    """

    initial: Field
    dt: float = 0.1
    T: float = 1000.0
    snapshot_times: tuple = ()
    quiescence_tol: float = 1e-7
    window: float = 100.0
    seed: int | None = None
    stop_when_quiescent: bool = True

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.T >= self.dt:
            raise ValueError("T must be at least dt")
        snaps = tuple(float(t) for t in self.snapshot_times)
        if list(snaps) != sorted(snaps):
            raise ValueError("snapshot times must be sorted")
        if any(t < 0 or t > self.T for t in snaps):
            raise ValueError("snapshot times must lie in [0, T]")
        self.snapshot_times = snaps
        if not self.window > 0:
            raise ValueError("quiescence window must be positive")


@dataclass
class Trajectory:
    times: list
    snapshots: list
    final: Field
    t_final: float
    quiescent: bool
    t_quiescent: float | None = None
    changes: list = field(default_factory=list)


def _norm2(x):
    return float(np.sqrt(x @ x))


def integrate(run: IntegrationRun, p: ParameterSet) -> Trajectory:
    """IMEX integration of the reaction-diffusion system.

    Returns the snapshots at ``run.snapshot_times`` (times are rounded to
    the step grid), the final state and the quiescence report.  Raises
    :class:`IntegrationBlowUp` with the time of the first non-finite state.
    """
    w0 = run.initial
    d = w0.domain
    n = d.size
    sig = p.sigma if w0.sigma is None else (np.ravel(w0.sigma) if np.ndim(w0.sigma) else float(w0.sigma))
    L = _laplacian(d).tocsc()
    I = sp.identity(n, format="csc")
    lu_u = spla.splu((I - run.dt * L).tocsc())
    lu_v = spla.splu((I - run.dt * p.delta * L).tocsc())

    u = w0.u.ravel().copy()
    v = w0.v.ravel().copy()
    n_steps = int(round(run.T / run.dt))
    n_win = max(1, int(round(run.window / run.dt)))
    snap_steps = [int(round(t / run.dt)) for t in run.snapshot_times]
    times, snaps = [], []
    si = 0

    def take(step):
        times.append(step * run.dt)
        snaps.append(Field(d, u.copy(), v.copy(), w0.sigma))

    while si < len(snap_steps) and snap_steps[si] == 0:
        take(0)
        si += 1
    ref = np.concatenate([u, v])
    changes = []
    quiet, t_quiet = False, None
    step = 0
    for step in range(1, n_steps + 1):
        g, h = _reaction_nodes(u, v, p, sig)
        u = lu_u.solve(u + run.dt * g)
        v = lu_v.solve(v + run.dt * h)
        if not (np.all(np.isfinite(u)) and np.all(np.isfinite(v))):
            raise IntegrationBlowUp(step * run.dt)
        while si < len(snap_steps) and snap_steps[si] == step:
            take(step)
            si += 1
        if step % n_win == 0:
            cur = np.concatenate([u, v])
            base = _norm2(ref)
            rel = _norm2(cur - ref) / base if base > 0 else _norm2(cur - ref)
            changes.append((step * run.dt, rel))
            ref = cur
            if rel < run.quiescence_tol and not quiet:
                quiet, t_quiet = True, step * run.dt
            if quiet and run.stop_when_quiescent:
                break
    final = Field(d, u, v, w0.sigma)
    return Trajectory(times, snaps, final, step * run.dt, quiet, t_quiet, changes)


def perturb(base: Field, amplitude: float, seed: int | None = None) -> Field:
    """Add independent uniform noise in [-amplitude, amplitude] to u and v."""
    if amplitude < 0:
        raise ValueError("amplitude must be non-negative")
    if amplitude == 0:
        return base.copy()
    rng = np.random.default_rng(seed)
    du = rng.uniform(-amplitude, amplitude, base.u.shape)
    dv = rng.uniform(-amplitude, amplitude, base.v.shape)
    sig = base.sigma.copy() if isinstance(base.sigma, np.ndarray) else base.sigma
    return Field(base.domain, base.u + du, base.v + dv, sig)


# -- strip classifier ---------------------------------------------------------

@dataclass(frozen=True)
class StripLabel:
    index: int
    y_center: float
    label: str


def _skewness(a):
    a = a - a.mean()
    s = np.sqrt(np.mean(a * a))
    return float(np.mean(a**3) / s**3) if s > 0 else 0.0


def _sector_energy(P, theta, center, half_width):
    # angular distance modulo pi
    dth = np.abs((theta - center + 0.5 * np.pi) % np.pi - 0.5 * np.pi)
    return float(P[dth <= half_width].sum())


def _signature(a, hx, hy, dominance, skew_tol, flat_tol):
    if np.std(a) < flat_tol:
        return "homogeneous"
    b = a - a.mean()
    # Hann taper in both directions limits leakage from the strip edges
    b = b * np.outer(np.hanning(b.shape[0]), np.hanning(b.shape[1]))
    nx, ny = b.shape
    pad = (4 * nx, 4 * ny)
    P = np.abs(np.fft.fft2(b, s=pad)) ** 2
    kx = 2 * np.pi * np.fft.fftfreq(pad[0], hx)
    ky = 2 * np.pi * np.fft.fftfreq(pad[1], hy)
    KX, KY = np.meshgrid(kx, ky, indexing="ij")
    K = np.hypot(KX, KY)
    P[K == 0] = 0.0
    j = np.unravel_index(np.argmax(P), P.shape)
    k1 = K[j]
    ring = (K > 0.6 * k1) & (K < 1.4 * k1)
    P = np.where(ring, P, 0.0)
    theta = np.arctan2(KY, KX) % np.pi
    t1 = theta[j]
    hw = np.pi / 12
    e0 = _sector_energy(P, theta, t1, hw)
    e60 = _sector_energy(P, theta, t1 + np.pi / 3, hw)
    e120 = _sector_energy(P, theta, t1 + 2 * np.pi / 3, hw)
    if e0 >= dominance * max(e60, e120):
        return "stripes"
    if min(e60, e120) * dominance >= e0:
        sk = _skewness(a)
        if sk > skew_tol:
            return "spots_hot"
        if sk < -skew_tol:
            return "spots_cold"
    return "mixed"


def classify_strips(w: Field, strip_height: float, *, window: float | None = None,
                    dominance: float = 3.0, skew_tol: float = 0.1, flat_tol: float = 1e-3) -> list:
    """Label horizontal strips of a 2D field by their Fourier signature.

    Strips are cut along the last axis (y) from the lower edge.  Each strip
    is analysed on a window of height ``window`` (default: the strip
    height) centred on it and clipped to the domain, which lets short
    strips still resolve a few wavelengths.

    Labels: ``homogeneous`` (u standard deviation below ``flat_tol``),
    ``stripes`` (one direction carries ``dominance`` times the energy of
    the directions rotated by 60 and 120 degrees), ``spots_hot`` /
    ``spots_cold`` (all three directions within that ratio, sign of the u
    skewness beyond ``skew_tol``) and ``mixed`` otherwise.
    """
    d = w.domain
    if d.dim != 2:
        raise ValueError("strip classification needs a 2D field")
    if strip_height <= 0:
        raise ValueError("strip height must be positive")
    window = strip_height if window is None else window
    y = d.axes()[1]
    hx, hy = d.spacing
    y_lo, y_hi = d.extents[1]
    n_strips = max(1, int(math.floor((y_hi - y_lo) / strip_height + 1e-9)))
    out = []
    for i in range(n_strips):
        yc = y_lo + (i + 0.5) * strip_height
        lo, hi = yc - 0.5 * window, yc + 0.5 * window
        if lo < y_lo:
            lo, hi = y_lo, y_lo + window
        if hi > y_hi:
            lo, hi = y_hi - window, y_hi
        sel = (y >= lo - 1e-9) & (y <= hi + 1e-9)
        a = w.u[:, sel]
        out.append(StripLabel(i, float(yc), _signature(a, hx, hy, dominance, skew_tol, flat_tol)))
    return out


def write_layering_csv(labels, fh=None) -> str:
    buf = fh if fh is not None else io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["strip_index", "y_center", "label"])
    for s in labels:
        wr.writerow([s.index, repr(s.y_center), s.label])
    return buf.getvalue() if fh is None else ""

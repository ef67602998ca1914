"""Finite-difference discretization on rectangles with zero-flux boundaries.

Nodes sit on the boundary (spacing ``(hi - lo)/(n - 1)``) and the Neumann
condition is closed with a mirror ghost node, so the first row of the 1D
operator reads ``(-2, 2)/h^2``.  The resulting matrix annihilates constants
and is self-adjoint with respect to the trapezoid inner product, which makes
its spectrum real.

Unknowns are ordered ``[u.ravel(), v.ravel()]`` with row-major (C order)
node arrays of shape ``domain.shape``.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import EigenSolverError
from .kinetics import ParameterSet, derivatives, reaction

__all__ = [
    "Domain",
    "Field",
    "assemble_laplacian",
    "residual",
    "residual_vector",
    "jacobian",
    "norms",
    "sigma_profile",
    "transverse_spectrum",
    "leading_eigenpairs",
    "cosine_coefficient",
    "write_field",
    "read_field",
]


@dataclass(frozen=True)
class Domain:
    """Rectangular grid in rescaled coordinates.

    Parameters
    ----------
    extents : sequence of (lower, upper)
        One pair per axis (one or two axes).
    shape : sequence of int
        Grid points per axis, at least 3 each.
    """

    extents: tuple
    shape: tuple

    def __post_init__(self):
        ext = tuple((float(a), float(b)) for a, b in self.extents)
        shp = tuple(int(n) for n in self.shape)
        if len(ext) not in (1, 2) or len(ext) != len(shp):
            raise ValueError("domain must be 1D or 2D with one extent per axis")
        for (a, b), n in zip(ext, shp):
            if not b > a:
                raise ValueError(f"empty extent ({a}, {b})")
            if n < 3:
                raise ValueError("at least 3 grid points per axis are required")
        object.__setattr__(self, "extents", ext)
        object.__setattr__(self, "shape", shp)

    @property
    def dim(self) -> int:
        return len(self.shape)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    @property
    def spacing(self) -> tuple:
        return tuple((b - a) / (n - 1) for (a, b), n in zip(self.extents, self.shape))

    def axes(self) -> list[np.ndarray]:
        return [np.linspace(a, b, n) for (a, b), n in zip(self.extents, self.shape)]

    def coords(self) -> list[np.ndarray]:
        return np.meshgrid(*self.axes(), indexing="ij")

    @property
    def volume(self) -> float:
        return float(np.prod([b - a for a, b in self.extents]))

    def weights(self) -> np.ndarray:
        """Trapezoid quadrature weights on the node array."""
        ws = []
        for h, n in zip(self.spacing, self.shape):
            w = np.full(n, h)
            w[0] = w[-1] = 0.5 * h
            ws.append(w)
        if self.dim == 1:
            return ws[0]
        return np.outer(ws[0], ws[1])

    @classmethod
    def for_wavenumber(cls, k: float, half_periods, points_per_wavelength: int = 16,
                       hexagonal: bool = False) -> "Domain":
        """Centered domain sized in units of the wavelength 2 pi / k.

        In 1D ``half_periods`` is the number of half wavelengths on each side
        of the origin (so ``4`` gives (-4 pi/k, 4 pi/k)).  With
        ``hexagonal=True`` a 2D rectangle (-2 pi/k, 2 pi/k) x
        (-2 pi/(sqrt 3 k), 2 pi/(sqrt 3 k)) scaled by ``half_periods`` / 2 is
        returned.
        """
        lam = 2.0 * math.pi / k
        if not hexagonal:
            L = half_periods * math.pi / k
            n = int(round(2 * L / lam * points_per_wavelength)) + 1
            return cls(((-L, L),), (max(n, 3),))
        s = half_periods / 2.0
        lx = s * 2.0 * math.pi / k
        ly = s * 2.0 * math.pi / (math.sqrt(3.0) * k)
        nx = int(round(2 * lx / lam * points_per_wavelength)) + 1
        ny = int(round(2 * ly / lam * points_per_wavelength)) + 1
        return cls(((-lx, lx), (-ly, ly)), (max(nx, 3), max(ny, 3)))


@dataclass
class Field:
    domain: Domain
    u: np.ndarray
    v: np.ndarray
    sigma: np.ndarray | float | None = None
    meta: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.u = np.array(self.u, dtype=float).reshape(self.domain.shape)
        self.v = np.array(self.v, dtype=float).reshape(self.domain.shape)
        if self.sigma is not None and np.ndim(self.sigma) > 0:
            self.sigma = np.array(self.sigma, dtype=float).reshape(self.domain.shape)

    @classmethod
    def constant(cls, domain: Domain, u: float, v: float, sigma=None) -> "Field":
        return cls(domain, np.full(domain.shape, u), np.full(domain.shape, v), sigma)

    @classmethod
    def from_vector(cls, domain: Domain, x, sigma=None) -> "Field":
        x = np.asarray(x, dtype=float)
        n = domain.size
        return cls(domain, x[:n], x[n:], sigma)

    def vector(self) -> np.ndarray:
        return np.concatenate([self.u.ravel(), self.v.ravel()])

    def copy(self) -> "Field":
        sig = self.sigma.copy() if isinstance(self.sigma, np.ndarray) else self.sigma
        return Field(self.domain, self.u.copy(), self.v.copy(), sig)

    def with_sigma(self, sigma) -> "Field":
        return Field(self.domain, self.u, self.v, sigma)


def _lap1d(n: int, h: float) -> sp.csr_matrix:
    main = np.full(n, -2.0)
    off = np.ones(n - 1)
    T = sp.diags([off, main, off], [-1, 0, 1], format="lil")
    T[0, 1] = 2.0
    T[n - 1, n - 2] = 2.0
    return (T.tocsr() / (h * h)).tocsr()


def assemble_laplacian(d: Domain) -> sp.csr_matrix:
    """Second-order Neumann Laplacian on the node grid (N x N, CSR)."""
    mats = [_lap1d(n, h) for n, h in zip(d.shape, d.spacing)]
    if d.dim == 1:
        return mats[0]
    nx, ny = d.shape
    return (sp.kron(mats[0], sp.identity(ny)) + sp.kron(sp.identity(nx), mats[1])).tocsr()


_LAP_CACHE: dict = {}


def _laplacian(d: Domain) -> sp.csr_matrix:
    L = _LAP_CACHE.get(d)
    if L is None:
        if len(_LAP_CACHE) > 32:
            _LAP_CACHE.clear()
        L = _LAP_CACHE[d] = assemble_laplacian(d)
    return L


def _params_for(w: Field, p: ParameterSet):
    if w.sigma is None:
        return p, p.sigma
    sig = np.asarray(w.sigma, dtype=float)
    return p, sig


def _reaction_nodes(u, v, p: ParameterSet, sigma):
    # same kinetics with a (possibly per-node) balancing rate
    g, h = reaction((u, v), p)
    g = np.asarray(g, dtype=float)
    h = np.asarray(h, dtype=float)
    if np.ndim(sigma) > 0 or sigma != p.sigma:
        h = h + (sigma - p.sigma) * (p.v0 - v)
    return g, h


def residual_vector(x: np.ndarray, d: Domain, p: ParameterSet, sigma=None) -> np.ndarray:
    """Residual f(w) + D Lap w on a flat state vector."""
    n = d.size
    u, v = x[:n], x[n:]
    sig = p.sigma if sigma is None else np.ravel(sigma) if np.ndim(sigma) else float(sigma)
    g, h = _reaction_nodes(u, v, p, sig)
    L = _laplacian(d)
    return np.concatenate([g + L @ u, h + p.delta * (L @ v)])


def residual(w: Field, p: ParameterSet) -> Field:
    """Pointwise kinetics plus diffusion with D = diag(1, delta).

    A per-node ``w.sigma`` overrides ``p.sigma``.
    """
    sig = None if w.sigma is None else w.sigma
    r = residual_vector(w.vector(), w.domain, p, sig)
    return Field.from_vector(w.domain, r, w.sigma)


def jacobian_matrix(x: np.ndarray, d: Domain, p: ParameterSet, sigma=None) -> sp.csc_matrix:
    n = d.size
    u, v = x[:n], x[n:]
    dt = derivatives((u, v), p)
    t = dt.table
    gu, gv, hu, hv = t[0, 1, 0], t[0, 0, 1], t[1, 1, 0], t[1, 0, 1]
    if sigma is not None:
        sig = np.ravel(sigma) if np.ndim(sigma) else float(sigma)
        hv = hv - (sig - p.sigma)
    L = _laplacian(d)
    return sp.bmat(
        [[sp.diags(gu) + L, sp.diags(gv)], [sp.diags(hu), sp.diags(hv) + p.delta * L]],
        format="csc",
    )


def jacobian(w: Field, p: ParameterSet) -> sp.csc_matrix:
    """Sparse 2N x 2N Jacobian of :func:`residual`."""
    return jacobian_matrix(w.vector(), w.domain, p, w.sigma)


def _avg_norm(a: np.ndarray, wts: np.ndarray, q: float) -> float:
    tot = wts.sum()
    m = np.max(np.abs(a))
    if m == 0:
        return 0.0
    # scale to avoid overflow in the eighth power
    return float(m * (np.sum(wts * (np.abs(a) / m) ** q) / tot) ** (1.0 / q))


def norms(w: Field) -> dict:
    """Domain-averaged l1, l2, l8 norms of u and v (trapezoid quadrature)."""
    wts = w.domain.weights()
    out = {}
    for name, a in (("u", w.u), ("v", w.v)):
        for q in (1, 2, 8):
            out[f"{name}_l{q}"] = _avg_norm(a, wts, q)
    return out


def sigma_profile(d: Domain, s0: float = 0.128, rate: float = 0.011, y0: float = 480.0) -> np.ndarray:
    """Depth-dependent balancing rate s0 / (1 + exp(rate (y - y0))).

    The last axis is the depth coordinate y; values are constant along x.
    """
    if s0 <= 0:
        raise ValueError("profile amplitude must be positive")
    y = d.coords()[-1]
    return s0 / (1.0 + np.exp(rate * (y - y0)))


def leading_eigenpairs(A, k: int = 8, *, target: float = 0.1, dense_below: int = 600,
                       seed: int = 0, vectors: bool = False):
    """Eigenvalues of largest real part of a sparse matrix.

    Small systems use a dense solver.  Larger ones use shift-invert Arnoldi
    around ``target`` (which should exceed the relevant real parts), with a
    seeded start vector.  Results are sorted by descending real part.
    """
    n = A.shape[0]
    k = min(k, n - 2)
    if n <= dense_below:
        M = A.toarray() if sp.issparse(A) else np.asarray(A)
        if vectors:
            ev, V = np.linalg.eig(M)
        else:
            ev, V = np.linalg.eigvals(M), None
    else:
        rng = np.random.default_rng(seed)
        v0 = rng.standard_normal(n)
        try:
            ev, V = spla.eigs(sp.csc_matrix(A), k=min(2 * k + 4, n - 2), sigma=target, v0=v0,
                              which="LM", tol=1e-12, maxiter=5000, return_eigenvectors=True)
        except (spla.ArpackNoConvergence, RuntimeError) as exc:
            raise EigenSolverError(f"eigensolver failed: {exc}") from exc
    order = np.lexsort((ev.imag, -np.round(ev.real, 12)))[:k]
    ev = ev[order]
    if vectors:
        return ev, V[:, order]
    return ev


def transverse_spectrum(w: Field, p: ParameterSet, kz_list, *, k: int = 4, seed: int = 0) -> np.ndarray:
    """Largest real eigenvalue of J - diag(1, delta) kz^2 for each kz."""
    if w.domain.dim != 2:
        raise ValueError("transverse spectrum needs a 2D field")
    J = jacobian(w, p)
    n = w.domain.size
    Ddiag = np.concatenate([np.ones(n), np.full(n, p.delta)])
    out = []
    for kz in kz_list:
        A = J - sp.diags(Ddiag * kz * kz)
        try:
            ev = leading_eigenpairs(A, k, seed=seed)
        except EigenSolverError as exc:
            raise EigenSolverError(str(exc), kz=kz) from exc
        out.append(float(np.max(ev.real)))
    return np.array(out)


def quantized_kz(l_z: float, kz_max: float) -> np.ndarray:
    """Transverse wavenumbers n pi / (2 l_z) up to ``kz_max`` (Neumann slab)."""
    step = math.pi / (2.0 * l_z)
    return step * np.arange(int(kz_max / step) + 1)


def cosine_coefficient(w: Field, kvec, component: str = "u", center: float | None = None) -> float:
    """Least-squares coefficient of cos(k . x) in a field component.

    The mean (or ``center``) is removed first; the weights are trapezoid weights.
    """
    a = getattr(w, component)
    ref = float(np.sum(w.domain.weights() * a) / w.domain.weights().sum()) if center is None else center
    X = w.domain.coords()
    kvec = np.atleast_1d(np.asarray(kvec, dtype=float))
    phase = sum(kvec[i] * X[i] for i in range(w.domain.dim))
    c = np.cos(phase)
    wts = w.domain.weights()
    return float(np.sum(wts * (a - ref) * c) / np.sum(wts * c * c))


def dominant_wavenumber(w: Field, component: str = "u", axis: int = 0) -> float:
    """Wavenumber of the largest Neumann cosine mode along ``axis``."""
    a = getattr(w, component)
    a = a - a.mean()
    if w.domain.dim == 2:
        a = a.mean(axis=1 - axis)
    n = a.size
    # DCT-I matches node-centred Neumann grids
    from scipy.fft import dct

    spec = np.abs(dct(a, type=1))
    spec[0] = 0.0
    j = int(np.argmax(spec))
    lo, hi = w.domain.extents[axis]
    return j * math.pi / (hi - lo)


def write_field(w: Field, fh=None) -> str:
    """Text dump: header lines then ``x [y] u v [sigma]`` per node."""
    buf = fh if fh is not None else io.StringIO()
    d = w.domain
    buf.write(f"# dim {d.dim}\n")
    buf.write("# extents " + " ".join(f"{a:.17g} {b:.17g}" for a, b in d.extents) + "\n")
    buf.write("# shape " + " ".join(str(n) for n in d.shape) + "\n")
    X = [c.ravel() for c in d.coords()]
    cols = X + [w.u.ravel(), w.v.ravel()]
    if w.sigma is not None:
        cols.append(np.broadcast_to(np.asarray(w.sigma, dtype=float), d.shape).ravel())
    for row in zip(*cols):
        buf.write(" ".join(f"{x:.17g}" for x in row) + "\n")
    return buf.getvalue() if fh is None else ""


def read_field(src) -> Field:
    """Inverse of :func:`write_field`; accepts a string or a file object."""
    text = src if isinstance(src, str) else src.read()
    lines = text.splitlines()
    hdr = {}
    body = []
    for ln in lines:
        if ln.startswith("#"):
            key, *vals = ln[1:].split()
            hdr[key] = vals
        elif ln.strip():
            body.append([float(t) for t in ln.split()])
    dim = int(hdr["dim"][0])
    ev = [float(t) for t in hdr["extents"]]
    extents = tuple((ev[2 * i], ev[2 * i + 1]) for i in range(dim))
    shape = tuple(int(t) for t in hdr["shape"])
    d = Domain(extents, shape)
    arr = np.array(body, dtype=float)
    if arr.shape[0] != d.size:
        raise ValueError(f"expected {d.size} nodes, found {arr.shape[0]}")
    u = arr[:, dim]
    v = arr[:, dim + 1]
    sigma = arr[:, dim + 2] if arr.shape[1] > dim + 2 else None
    return Field(d, u, v, sigma)

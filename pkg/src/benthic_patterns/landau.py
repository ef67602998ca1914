"""Amplitude (Landau) reduction on the hexagonal lattice.

Perturbations of a homogeneous state w* are written as

    w - w* = sum_i A_i e_i Phi + A_i^2 e_i^2 phi_ii + 1/2 |A_i|^2 phi_0
             + sum_{i<j} A_i conj(A_j) e_i conj(e_j) phi_ij + c.c.

with e_i = exp(i k_i . x) and k_1 + k_2 + k_3 = 0.  Projecting the cubic
residual onto the adjoint eigenvector gives the amplitude system

    dA_1/dt = c1 A_1 + c2 conj(A_2 A_3) + c3 A_1 |A_1|^2 + c4 A_1 (|A_2|^2 + |A_3|^2)

and its cyclic permutations.  The inner product is <a, b> = sum a_i conj(b_i).
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateCubicError,
    DegenerateEigenvalueError,
    DomainMismatchError,
    NoAmplitudeSolution,
    ResonanceError,
)
from .homogeneous import HomogeneousState, dispersion_matrix, state_by_index
from .kinetics import ParameterSet, bilinear_B, derivatives, trilinear_C

__all__ = [
    "HexLattice",
    "LandauCoefficients",
    "AmplitudeTriple",
    "critical_eigenpair",
    "quadratic_corrections",
    "landau_coefficients",
    "amplitude_rhs",
    "stripe_amplitudes",
    "hexagon_amplitudes",
    "mixed_mode_amplitudes",
    "amplitude_jacobian",
    "amplitude_stability",
    "translation_modes",
    "subcriticality_index",
    "reconstruct_field",
    "coefficient_sweep",
]

SQRT3 = math.sqrt(3.0)


def inner(a, b) -> complex:
    return complex(np.sum(np.asarray(a) * np.conj(np.asarray(b))))


@dataclass(frozen=True)
class HexLattice:
    k: float

    @property
    def vectors(self) -> np.ndarray:
        k = self.k
        return np.array([[k, 0.0], [-0.5 * k, 0.5 * SQRT3 * k], [-0.5 * k, -0.5 * SQRT3 * k]])


@dataclass
class LandauCoefficients:
    c1: complex
    c2: complex
    c3: complex
    c4: complex
    Phi: np.ndarray
    PhiStar: np.ndarray
    phi_ii: np.ndarray
    phi_0: np.ndarray
    phi_ij: np.ndarray
    k: float
    sigma_eval: float
    sigma_c: float
    mode: str = "classical"
    state: tuple[float, float] = (math.nan, math.nan)
    d: list = field(default_factory=list, repr=False)

    @property
    def real(self) -> tuple[float, float, float, float]:
        return (self.c1.real, self.c2.real, self.c3.real, self.c4.real)


@dataclass(frozen=True)
class AmplitudeTriple:
    A1: complex
    A2: complex
    A3: complex
    pattern: str = "mixed"
    kind: str = ""

    def __iter__(self):
        yield self.A1
        yield self.A2
        yield self.A3

    def as_array(self) -> np.ndarray:
        return np.array([self.A1, self.A2, self.A3], dtype=complex)


def _normalize_phase(vec: np.ndarray) -> np.ndarray:
    vec = vec / np.linalg.norm(vec)
    for comp in vec:
        if abs(comp) > 1e-14:
            return vec * (abs(comp) / comp)
    return vec


def critical_eigenpair(s: HomogeneousState, p: ParameterSet, k: float):
    """Leading eigenvalue mu of L(k) with eigenvector Phi and adjoint PhiStar.

    Phi has unit Euclidean norm and a real positive first nonzero component;
    PhiStar solves L^H PhiStar = conj(mu) PhiStar with <Phi, PhiStar> = 1.
    """
    L = dispersion_matrix(s, p, k).astype(complex)
    evals, evecs = np.linalg.eig(L)
    order = np.argsort(-evals.real)
    mu, other = evals[order[0]], evals[order[1]]
    if abs(mu - other) < 1e-10:
        raise DegenerateEigenvalueError(f"double eigenvalue {mu} of L(k={k})")
    Phi = _normalize_phase(evecs[:, order[0]])
    aevals, aevecs = np.linalg.eig(L.conj().T)
    j = int(np.argmin(np.abs(aevals - np.conj(mu))))
    PhiStar = aevecs[:, j]
    PhiStar = PhiStar / np.conj(inner(Phi, PhiStar))
    if np.all(np.abs(Phi.imag) < 1e-14):
        Phi = Phi.real.astype(complex)
    return complex(mu), Phi, PhiStar


def _solve(L, rhs, label):
    det = np.linalg.det(L)
    if abs(det) < 1e-12:
        raise ResonanceError(f"L({label}) is singular (det={det:.3e})")
    return np.linalg.solve(L, rhs)


def quadratic_corrections(s: HomogeneousState, p: ParameterSet, k: float, Phi: np.ndarray, d=None):
    """Second-order correction vectors (phi_ii, phi_0, phi_ij)."""
    d = d if d is not None else derivatives((s.u, s.v), p, guard=False)
    L2k = dispersion_matrix(s, p, 2.0 * k).astype(complex)
    L0 = dispersion_matrix(s, p, 0.0).astype(complex)
    L3k = dispersion_matrix(s, p, SQRT3 * k).astype(complex)
    Bpp = bilinear_B(Phi, Phi, d)
    Bpc = bilinear_B(Phi, np.conj(Phi), d)
    phi_ii = -_solve(L2k, Bpp, "2k")
    phi_0 = -2.0 * _solve(L0, Bpc, "0")
    phi_ij = -2.0 * _solve(L3k, Bpc, "sqrt(3)k")
    return phi_ii, phi_0, phi_ij


def _expansion(p, sigma, index):
    q = p.replace(sigma=sigma)
    s = state_by_index(q, index)
    if not s.is_real:
        raise NoAmplitudeSolution(f"homogeneous root {index} not real at sigma={sigma}")
    return q, s


def landau_coefficients(
    p: ParameterSet,
    k: float,
    sigma_c: float,
    sigma: float | None = None,
    *,
    mode: str = "classical",
    index: int = 1,
    d4: str = "printed",
) -> LandauCoefficients:
    """Coefficients c1..c4 of the amplitude system.

    ``mode='classical'`` expands at ``sigma_c`` and evaluates only c1 = mu(k)
    at ``sigma``; ``mode='uniform'`` evaluates everything at ``sigma``.
    ``d4='printed'`` uses 6 C(Phi, Phi, Phi) in the cross-coupling term,
    ``d4='conjugate'`` uses 6 C(Phi, Phi, conj Phi); the two agree whenever
    Phi is real, which is the case at a Turing point.
    """
    sigma = sigma_c if sigma is None else sigma
    if mode not in ("classical", "uniform"):
        raise ValueError(f"unknown mode {mode!r}")
    if d4 not in ("printed", "conjugate"):
        raise ValueError(f"unknown d4 variant {d4!r}")
    q_exp, s_exp = _expansion(p, sigma_c if mode == "classical" else sigma, index)
    d = derivatives((s_exp.u, s_exp.v), q_exp, guard=False)
    mu, Phi, PhiStar = critical_eigenpair(s_exp, q_exp, k)
    phi_ii, phi_0, phi_ij = quadratic_corrections(s_exp, q_exp, k, Phi, d)
    cPhi = np.conj(Phi)
    d1 = mu * Phi
    d2 = 2.0 * bilinear_B(cPhi, cPhi, d)
    d3 = 3.0 * trilinear_C(Phi, Phi, cPhi, d) + 2.0 * bilinear_B(cPhi, phi_ii, d) + 2.0 * bilinear_B(Phi, phi_0, d)
    third = Phi if d4 == "printed" else cPhi
    dd4 = 6.0 * trilinear_C(Phi, Phi, third, d) + 2.0 * bilinear_B(Phi, phi_ij, d) + 2.0 * bilinear_B(Phi, phi_0, d)
    c1 = inner(d1, PhiStar)
    if mode == "classical" and sigma != sigma_c:
        q1, s1 = _expansion(p, sigma, index)
        L = dispersion_matrix(s1, q1, k)
        ev = np.linalg.eigvals(L).astype(complex)
        c1 = complex(ev[np.argmax(ev.real)])
    return LandauCoefficients(
        c1=c1,
        c2=inner(d2, PhiStar),
        c3=inner(d3, PhiStar),
        c4=inner(dd4, PhiStar),
        Phi=Phi,
        PhiStar=PhiStar,
        phi_ii=phi_ii,
        phi_0=phi_0,
        phi_ij=phi_ij,
        k=float(k),
        sigma_eval=float(sigma),
        sigma_c=float(sigma_c),
        mode=mode,
        state=(s_exp.u, s_exp.v),
        d=[d1, d2, d3, dd4],
    )


def amplitude_rhs(A, lc: LandauCoefficients, real: bool = True) -> np.ndarray:
    """(f1, f2, f3) of the amplitude system at complex amplitudes ``A``."""
    c1, c2, c3, c4 = lc.real if real else (lc.c1, lc.c2, lc.c3, lc.c4)
    A = np.asarray(A, dtype=complex)
    a2 = np.abs(A) ** 2
    out = np.empty(3, dtype=complex)
    for i in range(3):
        j, l = (i + 1) % 3, (i + 2) % 3
        out[i] = c1 * A[i] + c2 * np.conj(A[j] * A[l]) + c3 * A[i] * a2[i] + c4 * A[i] * (a2[j] + a2[l])
    return out


def stripe_amplitudes(lc: LandauCoefficients) -> tuple[float, float]:
    c1, _, c3, _ = lc.real
    if c3 == 0:
        raise DegenerateCubicError("c3 = 0")
    rad = -c1 / c3
    if rad < 0:
        raise NoAmplitudeSolution("no stripes: -c1/c3 < 0")
    s = math.sqrt(rad)
    return s, -s


def hexagon_amplitudes(lc: LandauCoefficients) -> tuple[float, float]:
    c1, c2, c3, c4 = lc.real
    g = c3 + 2.0 * c4
    if abs(g) < 1e-12:
        raise DegenerateCubicError("c3 + 2 c4 vanishes")
    rad = c2 * c2 / (4.0 * g * g) - c1 / g
    if rad < 0:
        raise NoAmplitudeSolution("no hexagons: negative radicand")
    base = -c2 / (2.0 * g)
    r = math.sqrt(rad)
    return base + r, base - r


def subcriticality_index(lc: LandauCoefficients) -> float:
    _, c2, c3, c4 = lc.real
    g = c3 + 2.0 * c4
    if abs(g) < 1e-12:
        raise DegenerateCubicError("c3 + 2 c4 vanishes")
    return c2 * c2 / (4.0 * g * g)


def _mixed_system(x, c):
    c1, c2, c3, c4 = c
    A, B = x
    return np.array([
        c1 * A + c2 * B * B + c3 * A**3 + 2.0 * c4 * A * B * B,
        c1 * B + c2 * A * B + c3 * B**3 + c4 * B * (A * A + B * B),
    ])


def mixed_mode_amplitudes(lc: LandauCoefficients, tol: float = 1e-9) -> list[AmplitudeTriple]:
    """All real steady states of the form (A, B, B).

    For B != 0 the second equation gives B^2 = -(c1 + c2 A + c4 A^2) / (c3 + c4);
    substituting into the first leaves a cubic in A.  Hexagons (A = B) are
    among its roots; stripes and the trivial state come from B = 0.
    """
    c1, c2, c3, c4 = c = lc.real
    sols: list[tuple[float, float]] = [(0.0, 0.0)]
    if c3 != 0 and -c1 / c3 >= 0:
        s = math.sqrt(-c1 / c3)
        sols += [(s, 0.0), (-s, 0.0)]
    if c3 + c4 != 0:
        P = np.polynomial.Polynomial
        num = P([c1, c2, c4])  # c1 + c2 A + c4 A^2
        poly = P([0.0, c1, 0.0, c3]) * (c3 + c4) - P([c2, 2.0 * c4]) * num
        for r in poly.roots():
            if abs(r.imag) > 1e-9 * max(1.0, abs(r)):
                continue
            A = float(r.real)
            B2 = -num(A) / (c3 + c4)
            if B2 < -tol:
                continue
            B = math.sqrt(max(B2, 0.0))
            if B == 0.0:
                continue
            for sgn in (1.0, -1.0):
                x = np.array([A, sgn * B])
                # polish against rounding of the polynomial roots
                for _ in range(3):
                    J = _mixed_jac(x, c)
                    try:
                        x = x - np.linalg.solve(J, _mixed_system(x, c))
                    except np.linalg.LinAlgError:
                        break
                sols.append((float(x[0]), float(x[1])))
    out: list[AmplitudeTriple] = []
    for A, B in sols:
        t = _tag(A, B)
        if any(np.allclose(t.as_array(), o.as_array(), atol=1e-8) for o in out):
            continue
        out.append(t)
    return out


def _mixed_jac(x, c):
    c1, c2, c3, c4 = c
    A, B = x
    return np.array([
        [c1 + 3 * c3 * A * A + 2 * c4 * B * B, 2 * c2 * B + 4 * c4 * A * B],
        [c2 * B + 2 * c4 * A * B, c1 + c2 * A + 3 * c3 * B * B + c4 * (A * A + 3 * B * B)],
    ])


def _tag(A, B, tol=1e-8) -> AmplitudeTriple:
    # (A, B, B) and (A, -B, -B) differ by a lattice translation; B >= 0 is
    # the representative, and |A| = |B| is a translated hexagon.
    if abs(A) < tol and abs(B) < tol:
        return AmplitudeTriple(0j, 0j, 0j, "homogeneous")
    if abs(B) < tol:
        return AmplitudeTriple(complex(A), 0j, 0j, "stripe")
    if abs(abs(A) - abs(B)) < tol:
        return AmplitudeTriple(complex(A), complex(A), complex(A), "hexagon_plus" if A > 0 else "hexagon_minus")
    kind = "bean" if abs(A) > abs(B) else "rectangle"
    B = abs(B)
    return AmplitudeTriple(complex(A), complex(B), complex(B), "mixed", kind)


def amplitude_jacobian(A, lc: LandauCoefficients, real: bool = True) -> np.ndarray:
    """6x6 real Jacobian in coordinates (Re A1, Im A1, Re A2, Im A2, Re A3, Im A3)."""
    c1, c2, c3, c4 = lc.real if real else (lc.c1, lc.c2, lc.c3, lc.c4)
    A = np.asarray(A, dtype=complex)
    a2 = np.abs(A) ** 2
    J = np.zeros((6, 6))
    for i in range(3):
        j, l = (i + 1) % 3, (i + 2) % 3
        # Wirtinger derivatives (d/dz, d/dconj z) of f_i
        dz = {
            i: (c1 + 2 * c3 * a2[i] + c4 * (a2[j] + a2[l]), c3 * A[i] ** 2),
            j: (c4 * A[i] * np.conj(A[j]), c2 * np.conj(A[l]) + c4 * A[i] * A[j]),
            l: (c4 * A[i] * np.conj(A[l]), c2 * np.conj(A[j]) + c4 * A[i] * A[l]),
        }
        for col, (a, b) in dz.items():
            J[2 * i, 2 * col] = (a + b).real
            J[2 * i, 2 * col + 1] = -(a - b).imag
            J[2 * i + 1, 2 * col] = (a + b).imag
            J[2 * i + 1, 2 * col + 1] = (a - b).real
    return J


def translation_modes(A) -> np.ndarray:
    """Tangent vectors of the lattice-translation orbit through ``A``.

    A shift by ``a`` maps A_j to A_j exp(i k_j . a); the derivatives for
    a = (1, 0) and (0, 1), in the real 6-vector coordinates, are returned as
    columns of an orthonormal basis (0, 1 or 2 columns).
    """
    A = np.asarray(A, dtype=complex)
    kv = HexLattice(1.0).vectors
    cols = []
    for ax in range(2):
        t = 1j * kv[:, ax] * A
        cols.append(np.column_stack([t.real, t.imag]).ravel())
    M = np.array(cols).T
    U, sv, _ = np.linalg.svd(M, full_matrices=False)
    return U[:, sv > 1e-10 * max(1.0, np.abs(A).max())]


def amplitude_stability(t: AmplitudeTriple, lc: LandauCoefficients, tol: float = 1e-10):
    """Eigenvalues of the amplitude-system linearization and a stability flag.

    The flag requires Re < -tol for every eigenvalue except the zero
    eigenvalues forced by translation invariance.  It is a prediction from
    the reduced system only.
    """
    J = amplitude_jacobian(t.as_array(), lc)
    ev = np.linalg.eigvals(J)
    ev = ev[np.argsort(-ev.real)]
    G = translation_modes(t.as_array())
    if G.shape[1]:
        # restrict to the orthogonal complement of the neutral directions
        Q, _ = np.linalg.qr(np.hstack([G, np.eye(6)]))
        Qc = Q[:, G.shape[1]:6]
        # J G = 0, so J is block upper triangular in the basis [G, Qc]
        Jr = Qc.T @ J @ Qc
        rest = np.linalg.eigvals(Jr)
    else:
        rest = ev
    return ev, bool(np.all(rest.real < -tol))


def _check_compat(domain, k, modes):
    x_lo, x_hi = domain.extents[0]
    checks = []
    if domain.dim == 1:
        checks = [(k * x_lo / math.pi), (k * x_hi / math.pi)]
    else:
        y_lo, y_hi = domain.extents[1]
        if modes == "stripe":
            checks = [k * x_lo / math.pi, k * x_hi / math.pi]
        else:
            checks = [k * x_lo / (2 * math.pi), k * x_hi / (2 * math.pi),
                      SQRT3 * k * y_lo / (2 * math.pi), SQRT3 * k * y_hi / (2 * math.pi)]
    for c in checks:
        if abs(c - round(c)) > 1e-6:
            raise DomainMismatchError(
                f"domain {domain.extents} incompatible with lattice wavenumber {k:g}"
            )


def reconstruct_field(t: AmplitudeTriple, lc: LandauCoefficients, domain, *, check: bool = True,
                      sigma: float | None = None):
    """Evaluate the extended ansatz on ``domain`` around the expansion state.

    Only the real part of each amplitude enters the cosine form; amplitudes
    are assumed real (phase zero).
    """
    from .pde import Field

    A = np.array([complex(a) for a in t], dtype=complex)
    active = "stripe" if (abs(A[1]) == 0 and abs(A[2]) == 0) else "hex"
    if domain.dim == 1 and active != "stripe":
        raise DomainMismatchError("a 1D domain only supports stripe amplitudes")
    if check and np.any(A != 0):
        _check_compat(domain, lc.k, active)
    X = domain.coords()
    if domain.dim == 1:
        pts = np.stack([X[0], np.zeros_like(X[0])])
    else:
        pts = np.stack([X[0], X[1]])
    kv = HexLattice(lc.k).vectors
    e = [np.exp(1j * np.tensordot(kv[i], pts, axes=1)) for i in range(3)]
    w = np.zeros((2,) + pts.shape[1:], dtype=complex)
    sh = (2,) + (1,) * (pts.ndim - 1)
    Phi = lc.Phi.reshape(sh)
    for i in range(3):
        w += A[i] * e[i] * Phi
        w += A[i] ** 2 * e[i] ** 2 * lc.phi_ii.reshape(sh)
        w += 0.5 * abs(A[i]) ** 2 * lc.phi_0.reshape(sh)
    for i in range(3):
        for j in range(i + 1, 3):
            w += A[i] * np.conj(A[j]) * e[i] * np.conj(e[j]) * lc.phi_ij.reshape(sh)
    w = 2.0 * w.real
    u0, v0 = lc.state
    sig = lc.sigma_eval if sigma is None else sigma
    return Field(domain, u0 + w[0], v0 + w[1], sigma=sig)


def coefficient_sweep(p: ParameterSet, gammas, sigma_bracket=(0.05, 0.25), *, index: int = 1,
                      mode: str = "classical", n_scan: int = 400):
    """Critical point and Landau coefficients per gamma (right-most Turing point).

    Returns a list of dict rows; rows where no critical point is found carry
    NaN values and ``ok=False``.
    """
    from .homogeneous import find_critical_points

    rows = []
    for g in gammas:
        q = p.replace(gamma=float(g))
        row = {"gamma": float(g)}
        try:
            pts = find_critical_points(q, sigma_bracket, n_scan, index=index)
            if not pts:
                raise NoAmplitudeSolution("no critical point")
            sc, kc = max(pts)
            lc = landau_coefficients(q, kc, sc, mode=mode, index=index)
            try:
                cf = subcriticality_index(lc)
            except DegenerateCubicError:
                cf = math.inf
            row.update(sigma_c=sc, k_c=kc, c1=lc.c1.real, c2=lc.c2.real, c3=lc.c3.real,
                       c4=lc.c4.real, c_f=cf, ok=True)
        except Exception:  # noqa: BLE001 - reported as NA rows
            row.update(sigma_c=math.nan, k_c=math.nan, c1=math.nan, c2=math.nan, c3=math.nan,
                       c4=math.nan, c_f=math.nan, ok=False)
        rows.append(row)
    return rows


def write_sweep_csv(rows, fh=None) -> str:
    buf = fh if fh is not None else io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    cols = ["gamma", "sigma_c", "k_c", "c1", "c2", "c3", "c4", "c_f"]
    w.writerow(cols)
    for r in rows:
        w.writerow([repr(r[c]) if r.get("ok", True) or c == "gamma" else "NA" for c in cols])
    return buf.getvalue() if fh is None else ""

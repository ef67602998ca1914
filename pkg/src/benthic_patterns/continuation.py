"""Steady-state continuation in the balancing rate sigma.

The extended unknown is X = (x, sigma) with x the flat state vector of a
:class:`~benthic_patterns.pde.Field`.  Distances use the scaled norm
``|X|^2 = |x|^2 / n + sigma^2`` where n is the length of x.  Points are
found with a pseudo-arclength predictor-corrector (secant predictor,
bordered Newton corrector with sparse LU), tagged with the leading spectrum,
and folds and bifurcations in between are located by bisection.
"""
from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.optimize as opt
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import BranchSwitchError, ConvergenceError, DegenerateEigenvalueError, NumericFailure
from .kinetics import ParameterSet
from .pde import Field, jacobian_matrix, leading_eigenpairs, norms, residual_vector, write_field

__all__ = [
    "BranchPoint",
    "Branch",
    "ContinuationSettings",
    "newton_correct",
    "make_point",
    "leading_spectrum",
    "continue_branch",
    "locate_bifurcation",
    "locate_bifurcations",
    "locate_fold",
    "load_resume_state",
    "switch_branch",
    "write_branch_csv",
    "homogeneous_stop",
]


@dataclass
class ContinuationSettings:
    newton_tol: float = 1e-8
    max_iter: int = 12
    ds: float = 0.005
    ds_min: float = 1e-6
    ds_max: float = 0.01
    n_eigs: int = 8
    locate: bool = True
    seed: int = 0
    sigma_min: float = 1e-4
    sigma_max: float = 1.0


@dataclass
class BranchPoint:
    sigma: float
    field: Field
    n_unstable: int
    eigenvalues: np.ndarray
    tag: str = "regular"
    norms: dict = field(default_factory=dict)
    eigenvectors: np.ndarray | None = field(default=None, repr=False)
    tangent: np.ndarray | None = field(default=None, repr=False)
    crossing: np.ndarray | None = field(default=None, repr=False)
    s: float = 0.0

    @property
    def X(self) -> np.ndarray:
        return np.append(self.field.vector(), self.sigma)


@dataclass
class Branch:
    points: list
    label: str = ""
    parent: str | None = None
    bif_index: int | None = None
    sign: int | None = None
    reason: str = ""

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def sigmas(self) -> np.ndarray:
        return np.array([pt.sigma for pt in self.points])

    def tagged(self, tag: str) -> list:
        return [pt for pt in self.points if pt.tag == tag]

    def regular(self) -> list:
        return [pt for pt in self.points if pt.tag == "regular"]


# -- linear algebra -----------------------------------------------------------

def _F(x, sigma, d, p):
    return residual_vector(x, d, p.replace(sigma=sigma))


def _Fsigma(x, d, p):
    # h contains sigma (v0 - v); g does not depend on sigma
    n = d.size
    out = np.zeros(2 * n)
    out[n:] = p.v0 - x[n:]
    return out


def _J(x, sigma, d, p):
    return jacobian_matrix(x, d, p.replace(sigma=sigma))


def _wvec(t: np.ndarray) -> np.ndarray:
    # weighted row for the scaled inner product <t, .>
    n = t.size - 1
    w = t.copy()
    w[:n] /= n
    return w


def _wnorm(X: np.ndarray) -> float:
    n = X.size - 1
    return math.sqrt(float(X[:n] @ X[:n]) / n + X[n] ** 2)


def _bordered(J, Fs, row):
    n = J.shape[0]
    top = sp.hstack([J, sp.csc_matrix(Fs.reshape(-1, 1))])
    bot = sp.csc_matrix(row.reshape(1, -1))
    return sp.vstack([top, bot], format="csc")


def _lu(M):
    try:
        return spla.splu(M)
    except RuntimeError as exc:  # exactly singular
        raise ConvergenceError(f"singular linear system: {exc}", residual=math.inf, iterations=0) from exc


def newton_correct(guess: Field, sigma: float, p: ParameterSet, tol: float = 1e-8, max_iter: int = 30):
    """Damped Newton for residual(., sigma) = 0 with sigma held fixed.

    Returns ``(field, iterations)``.  Raises :class:`ConvergenceError` when
    the max-norm residual does not drop below ``tol`` within ``max_iter``.
    """
    d = guess.domain
    q = p.replace(sigma=sigma)
    x = guess.vector().copy()
    if not np.all(np.isfinite(x)):
        raise ValueError("initial guess has non-finite entries")
    r = residual_vector(x, d, q)
    res = float(np.max(np.abs(r)))
    it = 0
    while res >= tol:
        if it >= max_iter:
            raise ConvergenceError("Newton did not converge", residual=res, iterations=it)
        J = jacobian_matrix(x, d, q)
        try:
            dx = spla.spsolve(J.tocsc(), -r)
        except RuntimeError as exc:
            raise ConvergenceError(str(exc), residual=res, iterations=it) from exc
        if not np.all(np.isfinite(dx)):
            raise ConvergenceError("singular Jacobian", residual=res, iterations=it)
        lam = 1.0
        while True:
            xn = x + lam * dx
            try:
                rn = residual_vector(xn, d, q)
                resn = float(np.max(np.abs(rn)))
            except (ValueError, FloatingPointError):
                resn = math.inf
            if resn < res or lam < 1.0 / 64:
                break
            lam *= 0.5
        if not math.isfinite(resn):
            raise ConvergenceError("Newton left the kinetics domain", residual=res, iterations=it)
        x, r, res = xn, rn, resn
        it += 1
    return Field.from_vector(d, x), it


def _arclength_correct(Xp, tvec, d, p, tol, max_iter, target=0.0, X0=None):
    """Solve F(X) = 0, <t, X - X0>_w = target starting from predictor Xp."""
    X = Xp.copy()
    X0 = Xp if X0 is None else X0
    wt = _wvec(tvec)
    n = X.size - 1
    res = math.inf
    for it in range(max_iter + 1):
        try:
            F = _F(X[:n], X[n], d, p)
        except ValueError as exc:
            raise ConvergenceError(f"corrector left the domain: {exc}", residual=math.inf, iterations=it) from exc
        g = float(wt @ (X - X0)) - target
        res = float(np.max(np.abs(F)))
        if res < tol and abs(g) < tol:
            return X, it
        if it == max_iter or not math.isfinite(res) or X[n] <= 0:
            break
        M = _bordered(_J(X[:n], X[n], d, p), _Fsigma(X[:n], d, p), wt)
        dX = _lu(M).solve(-np.append(F, g))
        X = X + dX
    raise ConvergenceError("arclength corrector did not converge", residual=res, iterations=max_iter)


def _tangent(X, prev_t, d, p):
    n = X.size - 1
    M = _bordered(_J(X[:n], X[n], d, p), _Fsigma(X[:n], d, p), _wvec(prev_t))
    rhs = np.zeros(n + 1)
    rhs[n] = 1.0
    t = _lu(M).solve(rhs)
    t /= _wnorm(t)
    if float(_wvec(prev_t) @ t) < 0:
        t = -t
    return t


def _initial_tangent(X, d, p, direction):
    # solve J xdot = -F_sigma with sigma-dot = 1, then orient
    n = X.size - 1
    J = _J(X[:n], X[n], d, p)
    xdot = spla.spsolve(J.tocsc(), -_Fsigma(X[:n], d, p))
    t = np.append(xdot, 1.0)
    t /= _wnorm(t)
    return t * (1.0 if direction >= 0 else -1.0)


# -- spectra ------------------------------------------------------------------

def _spectrum(x, sigma, d, p, settings, vectors=False):
    J = _J(x, sigma, d, p)
    return leading_eigenpairs(J, settings.n_eigs, seed=settings.seed, vectors=vectors)


def _count(ev) -> int:
    return int(np.sum(np.real(ev) > 0))


def make_point(f: Field, sigma: float, p: ParameterSet, settings: ContinuationSettings | None = None,
               tag: str = "regular", vectors: bool = False) -> BranchPoint:
    """Wrap a converged field into a :class:`BranchPoint` with its spectrum."""
    settings = settings or ContinuationSettings()
    x = f.vector()
    res = float(np.max(np.abs(residual_vector(x, f.domain, p.replace(sigma=sigma)))))
    if res >= settings.newton_tol:
        raise ConvergenceError("field is not a converged steady state", residual=res, iterations=0)
    out = _spectrum(x, sigma, f.domain, p, settings, vectors)
    ev, V = out if vectors else (out, None)
    return BranchPoint(sigma=float(sigma), field=Field(f.domain, f.u, f.v), n_unstable=_count(ev),
                       eigenvalues=ev, tag=tag, norms=norms(f), eigenvectors=V)


def leading_spectrum(point: BranchPoint, p: ParameterSet, settings: ContinuationSettings | None = None):
    """The leading eigenvalues (largest real part first) at a branch point."""
    settings = settings or ContinuationSettings()
    return _spectrum(point.field.vector(), point.sigma, point.field.domain, p, settings)


def _point_from_X(X, d, p, settings, tag="regular", tangent=None, s=0.0, vectors=False):
    n = X.size - 1
    f = Field.from_vector(d, X[:n])
    out = _spectrum(X[:n], X[n], d, p, settings, vectors)
    ev, V = out if vectors else (out, None)
    return BranchPoint(sigma=float(X[n]), field=f, n_unstable=_count(ev), eigenvalues=ev, tag=tag,
                       norms=norms(f), eigenvectors=V, tangent=tangent, s=s)


# -- localization -------------------------------------------------------------

def _walk(a: BranchPoint, sval, d, p, settings):
    Xp = a.X + sval * a.tangent
    X, _ = _arclength_correct(Xp, a.tangent, d, p, settings.newton_tol * 0.1, settings.max_iter,
                              target=sval, X0=a.X)
    return X


def locate_fold(a: BranchPoint, b: BranchPoint, p: ParameterSet,
                settings: ContinuationSettings | None = None, xtol: float = 1e-10) -> BranchPoint:
    """Turning point between two points whose tangents have opposite dsigma/ds."""
    settings = settings or ContinuationSettings()
    d = a.field.domain
    sb = float(_wvec(a.tangent) @ (b.X - a.X))
    sgn_a = math.copysign(1.0, a.tangent[-1])
    lo, hi = 0.0, sb
    Xbest, tbest = b.X, b.tangent
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        X = _walk(a, mid, d, p, settings)
        t = _tangent(X, a.tangent, d, p)
        if math.copysign(1.0, t[-1]) == sgn_a:
            lo = mid
        else:
            hi = mid
        Xbest, tbest = X, t
    return _point_from_X(Xbest, d, p, settings, tag="fold", tangent=tbest, s=a.s + 0.5 * (lo + hi), vectors=True)


def locate_bifurcation(a: BranchPoint, b: BranchPoint, p: ParameterSet,
                       settings: ContinuationSettings | None = None, eig_tol: float = 1e-8) -> BranchPoint:
    """Point between ``a`` and ``b`` where an eigenvalue crosses the imaginary axis.

    The crossing eigenvector (real part, scaled to unit weighted norm) is
    stored in ``crossing``.
    """
    settings = settings or ContinuationSettings()
    d = a.field.domain
    na, nb = a.n_unstable, b.n_unstable
    if na == nb:
        raise ValueError("no change of unstable count in bracket")
    if abs(nb - na) > 1:
        raise DegenerateEigenvalueError("several eigenvalues cross in the bracket; use locate_bifurcations")
    sb = float(_wvec(a.tangent) @ (b.X - a.X))
    m = max(na, nb)  # 1-based rank of the crossing eigenvalue

    cache = {}

    def g(sval):
        X = _walk(a, sval, d, p, settings) if sval != 0.0 else a.X
        ev = _spectrum(X[:-1], X[-1], d, p, settings)
        cache[sval] = X
        return float(np.sort(np.real(ev))[::-1][m - 1])

    g0, g1 = g(0.0), g(sb)
    if g0 * g1 > 0:
        raise DegenerateEigenvalueError("crossing eigenvalue does not change sign in bracket")
    sc = opt.brentq(g, 0.0, sb, xtol=1e-13, rtol=1e-14, maxiter=200)
    X = cache.get(sc)
    if X is None:
        g(sc)
        X = cache[sc]
    # the bordered system is near singular here, so keep the parent tangent
    pt = _point_from_X(X, d, p, settings, tag="bifurcation", tangent=a.tangent.copy(),
                       s=a.s + sc, vectors=True)
    ev = pt.eigenvalues
    j = int(np.argmin(np.abs(ev)))
    if abs(ev[j].real) > max(eig_tol, 1e-6):
        raise DegenerateEigenvalueError(f"crossing eigenvalue not resolved ({ev[j]})")
    vec = np.real(pt.eigenvectors[:, j])
    vec /= math.sqrt(vec @ vec / vec.size)
    pt.crossing = vec
    return pt


def locate_bifurcations(a: BranchPoint, b: BranchPoint, p: ParameterSet,
                        settings: ContinuationSettings | None = None, depth: int = 0) -> list:
    """All crossings between ``a`` and ``b``, splitting the bracket as needed.

    Brackets whose count changes by more than one are bisected in arclength;
    crossings that stay together below ``ds_min / 100`` are reported as one
    point tagged with the combined multiplicity in ``crossing`` rows.
    """
    settings = settings or ContinuationSettings()
    if a.n_unstable == b.n_unstable:
        return []
    if abs(a.n_unstable - b.n_unstable) == 1:
        return [locate_bifurcation(a, b, p, settings)]
    d = a.field.domain
    sb = float(_wvec(a.tangent) @ (b.X - a.X))
    if sb < settings.ds_min * 1e-2 or depth > 40:
        raise DegenerateEigenvalueError("multiple eigenvalue crossings could not be separated")
    X = _walk(a, 0.5 * sb, d, p, settings)
    mid = _point_from_X(X, d, p, settings, tangent=_tangent(X, a.tangent, d, p), s=a.s + 0.5 * sb)
    return (locate_bifurcations(a, mid, p, settings, depth + 1)
            + locate_bifurcations(mid, b, p, settings, depth + 1))


def _probe(a: BranchPoint, sval: float, p, settings) -> BranchPoint:
    d = a.field.domain
    X = _walk(a, sval, d, p, settings)
    return _point_from_X(X, d, p, settings, tangent=_tangent(X, a.tangent, d, p), s=a.s + sval)


def _fold_interval(a: BranchPoint, b: BranchPoint, p, settings) -> list:
    """Fold between ``a`` and ``b`` plus any other crossings in the same step.

    One eigenvalue passes through zero at the fold itself; crossings on
    either side are located separately so that they are not absorbed.
    """
    fold = locate_fold(a, b, p, settings)
    out = [fold]
    sf = fold.s - a.s
    sb = float(_wvec(a.tangent) @ (b.X - a.X))
    eps = 1e-4 * max(sb, 1e-12)
    try:
        left = _probe(a, sf - eps, p, settings)
        right = _probe(a, sf + eps, p, settings) if sf + eps < sb else b
    except NumericFailure:
        return out
    before = locate_bifurcations(a, left, p, settings) if left.n_unstable != a.n_unstable else []
    after = locate_bifurcations(right, b, p, settings) if right.n_unstable != b.n_unstable else []
    return before + out + after


# -- branches -----------------------------------------------------------------

def continue_branch(
    start: BranchPoint,
    p: ParameterSet,
    n_steps: int,
    *,
    direction: int = -1,
    settings: ContinuationSettings | None = None,
    prev: BranchPoint | None = None,
    stop: Callable | None = None,
    label: str = "",
    snapshot_dir: str | None = None,
    snapshot_every: int = 0,
    resume: dict | None = None,
) -> Branch:
    """Pseudo-arclength continuation from ``start``.

    Parameters
    ----------
    direction : int
        Initial sign of dsigma/ds when no ``prev`` point is given.
    prev : BranchPoint, optional
        Earlier point on the same branch; the secant to ``start`` fixes the
        initial tangent direction.
    stop : callable, optional
        ``stop(branch, point)`` returning a reason string ends the run.
    snapshot_dir, snapshot_every : optional
        Every ``snapshot_every``-th point is written as a field file, together
        with a ``.state.npz`` file holding the predictor state.
    resume : dict, optional
        Predictor state (``Xprev``, ``t``, ``ds``) as saved next to a
        snapshot; continuing from the snapshot with it retraces the original
        run.
    """
    settings = settings or ContinuationSettings()
    d = start.field.domain
    X = start.X
    if resume is not None:
        t = np.asarray(resume["t"], dtype=float)
    elif prev is not None:
        sec = X - prev.X
        t = _tangent(X, sec / _wnorm(sec), d, p)
    else:
        t = _initial_tangent(X, d, p, direction)
    cur = BranchPoint(**{**start.__dict__, "tangent": t, "s": 0.0})
    branch = Branch([cur], label=label)
    ds = min(settings.ds, settings.ds_max)
    Xprev = None
    if resume is not None:
        ds = float(resume["ds"])
        xp = resume.get("Xprev")
        Xprev = None if xp is None or np.size(xp) == 0 else np.asarray(xp, dtype=float)
    reason = "max_steps"
    for step in range(n_steps):
        if Xprev is not None:
            sec = X - Xprev
            tpred = sec / _wnorm(sec)
        else:
            tpred = t
        while True:
            try:
                Xn, its = _arclength_correct(X + ds * tpred, tpred, d, p, settings.newton_tol,
                                             settings.max_iter)
                # guard against jumping branches: stay close to the prediction
                if _wnorm(Xn - X) > 2.5 * ds:
                    raise ConvergenceError("step jumped", residual=0.0, iterations=its)
                break
            except ConvergenceError:
                ds *= 0.5
                if ds < settings.ds_min:
                    branch.reason = "ds_min"
                    return branch
        tn = _tangent(Xn, t, d, p)
        pt = _point_from_X(Xn, d, p, settings, tangent=tn, s=cur.s + _wnorm(Xn - X))
        fold = math.copysign(1.0, tn[-1]) != math.copysign(1.0, t[-1])
        extra = []
        if settings.locate:
            try:
                if fold:
                    extra.extend(_fold_interval(cur, pt, p, settings))
                elif pt.n_unstable != cur.n_unstable:
                    extra.extend(locate_bifurcations(cur, pt, p, settings))
            except NumericFailure:
                pass
        branch.points.extend(extra)
        branch.points.append(pt)
        Xprev, X, t, cur = X, Xn, tn, pt
        if its <= 3:
            ds = min(1.5 * ds, settings.ds_max)
        elif its >= 6:
            ds = max(0.5 * ds, settings.ds_min)
        if snapshot_dir and snapshot_every and (len(branch.points) - 1) % snapshot_every == 0:
            _write_snapshot(snapshot_dir, f"{label or 'branch'}_{len(branch.points) - 1:05d}", pt,
                            Xprev, t, ds)
        if not (settings.sigma_min <= pt.sigma <= settings.sigma_max):
            reason = "sigma_bounds"
            break
        if stop is not None:
            r = stop(branch, pt)
            if r:
                reason = r
                break
    branch.reason = reason
    return branch


def _write_snapshot(folder, stem, pt, Xprev, t, ds):
    os.makedirs(folder, exist_ok=True)
    with open(os.path.join(folder, stem + ".dat"), "w") as fh:
        write_field(pt.field.with_sigma(pt.sigma), fh)
    np.savez(os.path.join(folder, stem + ".state.npz"), Xprev=Xprev, t=t, ds=ds)


def load_resume_state(field_path: str) -> dict | None:
    """Predictor state saved next to a snapshot, or None if there is none."""
    base = field_path[:-4] if field_path.endswith(".dat") else field_path
    path = base + ".state.npz"
    if not os.path.exists(path):
        return None
    with np.load(path) as z:
        return {"Xprev": z["Xprev"], "t": z["t"], "ds": float(z["ds"])}


def _project_out(vec, tvec):
    # remove the component of vec (field part) along the parent tangent
    n = vec.size
    tf = tvec[:n]
    nn = float(tf @ tf)
    if nn > 0:
        vec = vec - (float(vec @ tf) / nn) * tf
    return vec / math.sqrt(vec @ vec / n)


def switch_branch(
    bif: BranchPoint,
    p: ParameterSet,
    sign: int = 1,
    amplitude: float = 1e-3,
    *,
    parent: Branch | None = None,
    settings: ContinuationSettings | None = None,
    vector: np.ndarray | None = None,
) -> BranchPoint:
    """First point on the branch emanating from a bifurcation point.

    The predictor adds ``sign * amplitude`` times the crossing eigenvector;
    the corrector fixes that projection and lets sigma adjust.  Falling back
    onto the parent branch triggers up to three amplitude doublings.
    """
    settings = settings or ContinuationSettings()
    vec = bif.crossing if vector is None else np.asarray(vector, dtype=float)
    if vec is None:
        raise BranchSwitchError("bifurcation point carries no crossing eigenvector")
    d = bif.field.domain
    if bif.tangent is not None:
        vec = _project_out(vec, bif.tangent)
    else:
        vec = vec / math.sqrt(vec @ vec / vec.size)
    t = np.append(vec, 0.0)
    amp = amplitude
    for _ in range(4):
        Xp = bif.X + sign * amp * t
        try:
            X, _ = _arclength_correct(Xp, t, d, p, settings.newton_tol, 2 * settings.max_iter,
                                      target=sign * amp, X0=bif.X)
        except ConvergenceError:
            amp *= 2.0
            continue
        pt = _point_from_X(X, d, p, settings)
        ref = parent.points if parent is not None else [bif]
        dist = min(_wnorm(np.append(X[:-1] - q.X[:-1], 0.0)) for q in ref)
        if dist > 0.5 * amp:
            return pt
        amp *= 2.0
    raise BranchSwitchError("could not leave the parent branch")


def homogeneous_stop(p: ParameterSet | None = None, settings: ContinuationSettings | None = None,
                     ref: np.ndarray | None = None, amp_tol: float = 1e-5):
    """Stop criterion: the branch returns to a spatially uniform state.

    This fires when the peak-to-peak amplitude of u drops below ``amp_tol``
    (the sigma of contact is extrapolated from the pitchfork law
    A^2 ~ sigma - sigma_e) or when the projection on ``ref`` changes sign.

    ``ref`` defaults to the mean-free u-profile of the first branch point.
    The returned reason reads ``homogeneous@<sigma>``; with ``p`` given the
    crossing sigma is refined by bisection along the arclength, otherwise it
    is linearly interpolated.
    """
    state = {"ref": ref, "last": None}
    settings = settings or ContinuationSettings()

    def proj_u(u):
        return float((u - u.mean()) @ state["ref"])

    def stop(branch, pt):
        if state["ref"] is None:
            u = branch.points[0].field.u.ravel()
            state["ref"] = u - u.mean()
        a = proj_u(pt.field.u.ravel())
        amp = float(np.ptp(pt.field.u))
        prev = state["last"]
        state["last"] = (a, pt.sigma)
        state.setdefault("amps", []).append((amp, pt.sigma))
        amps = state["amps"]
        if amp < amp_tol and len(amps) > 1:
            # landed on the homogeneous branch: extrapolate A^2 ~ (sigma - sigma_e)
            big = [(x, sg) for x, sg in amps if x > 10 * amp_tol]
            if len(big) >= 2:
                (a1, s1), (a2, s2) = big[-1], big[-2]
                sig = s1 - a1 * a1 * (s2 - s1) / (a2 * a2 - a1 * a1)
            else:
                sig = pt.sigma
            return f"homogeneous@{sig:.10f}"
        if prev is None or prev[0] * a >= 0:
            return None
        a0, s0 = prev
        sig = s0 + (pt.sigma - s0) * a0 / (a0 - a)
        before = [q for q in branch.points[:-1] if q.tangent is not None and q.tag == "regular"]
        if p is not None and before:
            q0 = before[-1]
            d = q0.field.domain
            n = d.size
            lo, hi = 0.0, float(_wvec(q0.tangent) @ (pt.X - q0.X))
            try:
                for _ in range(50):
                    mid = 0.5 * (lo + hi)
                    X = _walk(q0, mid, d, p, settings)
                    if proj_u(X[:n]) * a0 > 0:
                        lo = mid
                    else:
                        hi = mid
                    sig = float(X[-1])
                    if hi - lo < 1e-12:
                        break
            except NumericFailure:
                pass
        return f"homogeneous@{sig:.10f}"

    return stop


def write_branch_csv(branch: Branch, fh=None) -> str:
    buf = fh if fh is not None else io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["idx", "sigma", "u_l1", "u_l2", "u_l8", "v_l1", "v_l2", "v_l8", "n_unstable", "tag"])
    for i, pt in enumerate(branch.points):
        nm = pt.norms
        w.writerow([i, repr(pt.sigma)] + [repr(nm[k]) for k in
                   ("u_l1", "u_l2", "u_l8", "v_l1", "v_l2", "v_l8")] + [pt.n_unstable, pt.tag])
    return buf.getvalue() if fh is None else ""

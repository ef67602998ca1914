"""Command-line front end.

Every command writes its outputs into one run directory together with
``config.txt``, the fully resolved configuration.  Feeding that file back
through ``--config`` reproduces the run byte for byte.

Configuration precedence: command-line flags, then the ``--config`` file,
then built-in defaults.  Config files hold ``key = value`` lines; keys are
either model parameters (``k``, ``v0``, ``eps``, ``m``, ``delta_u``,
``delta_v``, ``sigma``, ``gamma``) or option names of the command with
dashes replaced by underscores.  Unknown keys are rejected.

Exit codes: 0 success, 2 usage or input error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from .errors import BenthicError, KineticsDomainError, NumericFailure
from .kinetics import ParameterSet

OUT_ENV = "BENTHIC_PATTERNS_OUT"
PARAM_KEYS = ("k", "v0", "eps", "m", "delta_u", "delta_v", "sigma", "gamma")
_NOT_OPTIONS = {"config", "out", "command", "func"}

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3


class UsageError(Exception):
    pass


# -- value types ----------------------------------------------------------------

@dataclass(frozen=True)
class Range:
    lo: float
    hi: float
    n: int

    def __str__(self):
        return f"{self.lo!r}:{self.hi!r}:{self.n}"

    def linspace(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.n)


def parse_range(text: str) -> Range:
    """``a:b:n`` with a < b (or a == b when n == 1) and n >= 1."""
    parts = str(text).split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected a:b:n, got {text!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a:b:n, got {text!r}") from None
    if n < 1 or not (math.isfinite(lo) and math.isfinite(hi)) or hi < lo or (hi == lo and n > 1):
        raise argparse.ArgumentTypeError(f"malformed range {text!r}")
    return Range(lo, hi, n)


@dataclass(frozen=True)
class FloatList:
    values: tuple

    def __str__(self):
        return ",".join(repr(v) for v in self.values)


def parse_floats(text: str) -> FloatList:
    text = str(text).strip()
    if not text:
        return FloatList(())
    try:
        return FloatList(tuple(float(t) for t in text.split(",")))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def parse_profile(text: str) -> FloatList | None:
    if str(text).strip().lower() in ("", "none"):
        return None
    fl = parse_floats(text)
    if len(fl.values) != 3:
        raise argparse.ArgumentTypeError("sigma profile needs s0,rate,y0")
    return fl


def parse_bool(text) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def _num(x) -> str:
    return repr(float(x))


def _fmt(val) -> str:
    if val is None:
        return "none"
    if isinstance(val, bool):
        return "true" if val else "false"
    if isinstance(val, float):
        return repr(val)
    return str(val)


# -- parser -----------------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    c = argparse.ArgumentParser(add_help=False)
    g = c.add_argument_group("run options")
    g.add_argument("--config", help="key = value file; flags override it")
    g.add_argument("--out", help=f"run directory (default ${OUT_ENV}/<command> or ./<command>)")
    g.add_argument("--seed", type=int, default=0, help="seed for all stochastic steps")
    return c


def _params(sp: argparse.ArgumentParser, skip=()):
    g = sp.add_argument_group("model parameters")
    for key in PARAM_KEYS:
        if key in skip:
            continue
        g.add_argument(f"--{key.replace('_', '-')}", dest=key, type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="benthic-patterns", description=__doc__.split("\n\n")[0])
    sub = ap.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True
    common = _common()

    sp = sub.add_parser("scan", parents=[common], help="classify the homogeneous roots on a sigma-gamma grid")
    _params(sp, skip=("sigma", "gamma"))
    sp.add_argument("--sigma", dest="sigma_range", type=parse_range, default=parse_range("0:0.25:200"),
                    help="sigma range a:b:n (n cells, sampled at cell centres)")
    sp.add_argument("--gamma", dest="gamma_range", type=parse_range, default=parse_range("0:0.6:200"),
                    help="gamma range a:b:n")
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("homog", parents=[common], help="homogeneous states and their stability")
    _params(sp)
    sp.set_defaults(func=cmd_homog)

    sp = sub.add_parser("disp", parents=[common], help="dispersion relation of one homogeneous root")
    _params(sp)
    sp.add_argument("--index", type=int, default=1, help="root index 1..3")
    sp.add_argument("--k-range", type=parse_range, default=parse_range("0:0.5:201"),
                    help="wavenumbers a:b:n (inclusive grid)")
    sp.set_defaults(func=cmd_disp)

    sp = sub.add_parser("landau", parents=[common], help="Landau coefficients along a gamma sweep")
    _params(sp, skip=("gamma",))
    sp.add_argument("--gamma", dest="gamma_range", type=parse_range, default=parse_range("0.01:0.6:60"),
                    help="gamma values a:b:n (inclusive grid)")
    sp.add_argument("--mode", choices=("classical", "uniform"), default="classical")
    sp.add_argument("--index", type=int, default=1)
    sp.add_argument("--sigma-bracket", type=parse_floats, default=parse_floats("0.001,0.25"))
    sp.set_defaults(func=cmd_landau)

    sp = sub.add_parser("cont", parents=[common], help="continue a steady-state branch in sigma")
    _params(sp)
    sp.add_argument("--start", default="homogeneous",
                    help="homogeneous, stripe, hexagon or the path of a saved field")
    sp.add_argument("--root", choices=("plus", "minus"), default="plus",
                    help="which Landau amplitude root seeds a stripe/hexagon start")
    sp.add_argument("--offset", type=float, default=-0.002,
                    help="stripe/hexagon starts sit at sigma_c + offset")
    sp.add_argument("--index", type=int, default=1, help="homogeneous root")
    sp.add_argument("--dim", type=int, choices=(1, 2), default=1)
    sp.add_argument("--half-periods", type=float, default=4.0)
    sp.add_argument("--ppw", type=int, default=16, help="grid points per wavelength")
    sp.add_argument("--k-domain", type=float, default=None,
                    help="wavenumber sizing the domain (default: the right-most critical one)")
    sp.add_argument("--direction", type=int, choices=(-1, 1), default=-1)
    sp.add_argument("--steps", type=int, default=200)
    sp.add_argument("--ds", type=float, default=0.005)
    sp.add_argument("--ds-min", type=float, default=1e-6)
    sp.add_argument("--ds-max", type=float, default=0.01)
    sp.add_argument("--tol", type=float, default=1e-8)
    sp.add_argument("--n-eigs", type=int, default=8)
    sp.add_argument("--label", default="branch")
    sp.add_argument("--stop-homogeneous", type=parse_bool, default=True,
                    help="stop pattern branches that return to a uniform state")
    sp.add_argument("--switch", type=int, default=0,
                    help="1-based bifurcation index to switch at (0: none)")
    sp.add_argument("--sign", type=int, choices=(-1, 1), default=1)
    sp.add_argument("--switch-amplitude", type=float, default=1e-2)
    sp.add_argument("--switch-steps", type=int, default=200)
    sp.add_argument("--snapshot-every", type=int, default=0)
    sp.set_defaults(func=cmd_cont)

    sp = sub.add_parser("ti", parents=[common], help="time integration and strip labelling")
    _params(sp)
    sp.add_argument("--sigma-profile", type=parse_profile, default=None,
                    help="s0,rate,y0 for sigma(y) = s0 / (1 + exp(rate (y - y0)))")
    sp.add_argument("--dim", type=int, choices=(1, 2), default=2)
    sp.add_argument("--lx", type=float, default=130.28)
    sp.add_argument("--ly", type=float, default=130.28)
    sp.add_argument("--nx", type=int, default=66)
    sp.add_argument("--ny", type=int, default=66)
    sp.add_argument("--u-init", type=float, default=1.0)
    sp.add_argument("--v-init", type=float, default=1.0)
    sp.add_argument("--amplitude", type=float, default=0.01, help="uniform noise amplitude")
    sp.add_argument("--dt", type=float, default=0.1)
    sp.add_argument("--T", dest="T", type=float, default=1000.0)
    sp.add_argument("--snapshots", type=parse_floats, default=parse_floats(""))
    sp.add_argument("--window", type=float, default=100.0)
    sp.add_argument("--quiescence-tol", type=float, default=1e-7)
    sp.add_argument("--run-to-end", type=parse_bool, default=False,
                    help="keep integrating after quiescence")
    sp.add_argument("--strip-height", type=float, default=32.0)
    sp.add_argument("--strip-window", type=float, default=None)
    sp.set_defaults(func=cmd_ti)

    sp = sub.add_parser("norms", parents=[common], help="averaged norms of saved fields")
    sp.add_argument("--field", dest="fields", action="append", default=None, required=False)
    sp.set_defaults(func=cmd_norms)

    sp = sub.add_parser("export", parents=[common], help="export figure data as CSV")
    _params(sp)
    sp.add_argument("--what", choices=("neutral", "critical", "field"), default="neutral")
    sp.add_argument("--index", type=int, default=1)
    sp.add_argument("--sigma-range", type=parse_range, default=parse_range("0.001:0.25:250"))
    sp.add_argument("--gamma-range", type=parse_range, default=parse_range("0.01:0.6:60"))
    sp.add_argument("--field", default=None)
    sp.set_defaults(func=cmd_export)
    return ap


# -- configuration ---------------------------------------------------------------

def read_config(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for n, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{n}: expected key = value")
            key, val = (t.strip() for t in line.split("=", 1))
            key = key.replace("-", "_")
            if not key:
                raise UsageError(f"{path}:{n}: empty key")
            if key in out:
                raise UsageError(f"{path}:{n}: duplicate key {key!r}")
            out[key] = val
    return out


def _actions(sp: argparse.ArgumentParser) -> dict:
    return {a.dest: a for a in sp._actions if a.dest not in _NOT_OPTIONS and a.dest != "help"}


def _subparser(ap, command):
    for a in ap._actions:
        if isinstance(a, argparse._SubParsersAction):
            return a.choices.get(command)
    return None


def _apply_config(ap, argv):
    """Pre-parse ``--config`` and turn its entries into parser defaults."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    cfg = read_config(known.config)
    command = next((a for a in argv if not a.startswith("-") and _subparser(ap, a)), None)
    if command is None:
        return
    if "command" in cfg:
        if cfg.pop("command") != command:
            raise UsageError(f"config file is for another command, not {command!r}")
    sp = _subparser(ap, command)
    acts = _actions(sp)
    unknown = sorted(set(cfg) - set(acts))
    if unknown:
        raise UsageError(f"unknown config keys for {command}: {', '.join(unknown)}")
    defaults = {}
    for key, text in cfg.items():
        act = acts[key]
        if text.lower() == "none":
            defaults[key] = None
            continue
        try:
            if act.type is not None:
                val = act.type(text)
            else:
                val = text
        except (argparse.ArgumentTypeError, ValueError) as exc:
            raise UsageError(f"config key {key}: {exc}") from None
        if act.choices is not None and val not in act.choices:
            raise UsageError(f"config key {key}: {val!r} not in {list(act.choices)}")
        if key == "fields":
            val = [t.strip() for t in text.split(",") if t.strip()]
        defaults[key] = val
    sp.set_defaults(**defaults)


def resolve_params(args) -> ParameterSet:
    vals = {k: getattr(args, k) for k in PARAM_KEYS if getattr(args, k, None) is not None}
    return ParameterSet(**vals)


def echo_config(args, p: ParameterSet | None, sp) -> str:
    lines = [f"command = {args.command}"]
    acts = _actions(sp)
    if p is not None:
        for key, val in p.as_dict().items():
            if key in acts:
                lines.append(f"{key} = {val!r}")
    for dest in acts:
        if dest in PARAM_KEYS:
            continue
        val = getattr(args, dest)
        if dest == "fields" and val is not None:
            val = ",".join(val)
        lines.append(f"{dest} = {_fmt(val)}")
    return "\n".join(lines) + "\n"


def run_dir(args) -> str:
    if args.out:
        path = args.out
    else:
        path = os.path.join(os.environ.get(OUT_ENV, "."), args.command)
    os.makedirs(path, exist_ok=True)
    return path


def _open(folder, name):
    return open(os.path.join(folder, name), "w", newline="")


# -- commands --------------------------------------------------------------------

def cmd_scan(args, p, out):
    from .homogeneous import plane_scan, write_scan_csv

    sr, gr = args.sigma_range, args.gamma_range
    if sr.hi <= sr.lo or gr.hi <= gr.lo:
        raise UsageError("scan ranges need a < b")
    scan = plane_scan((sr.lo, sr.hi), (gr.lo, gr.hi), (sr.n, gr.n), p, workers=max(1, args.workers))
    with _open(out, "scan.csv") as fh:
        write_scan_csv(scan, fh)
    return f"scan.csv: {sr.n} x {gr.n} cells"


def cmd_homog(args, p, out):
    from .homogeneous import homogeneous_states

    with _open(out, "homogeneous.csv") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "u", "v", "is_real", "is_positive", "class", "b1", "b2", "b3", "b4"])
        for s in homogeneous_states(p):
            st = s.stability
            w.writerow([s.index, _num(s.u), _num(s.v), int(s.is_real), int(s.is_positive), st.cls,
                        _num(st.b1), _num(st.b2), _num(st.b3), _num(st.b4)])
    return "homogeneous.csv"


def cmd_disp(args, p, out):
    from .homogeneous import dispersion, state_by_index

    if args.index not in (1, 2, 3):
        raise UsageError("root index must be 1, 2 or 3")
    s = state_by_index(p, args.index)
    if not s.is_real:
        raise UsageError(f"root {args.index} is not real at these parameters")
    with _open(out, "dispersion.csv") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["k", "mu_plus_re", "mu_plus_im", "mu_minus_re", "mu_minus_im"])
        for k in args.k_range.linspace():
            ds = dispersion(s, p, float(k))
            w.writerow([_num(float(k)), _num(ds.mu_plus.real), _num(ds.mu_plus.imag),
                        _num(ds.mu_minus.real), _num(ds.mu_minus.imag)])
    return "dispersion.csv"


def cmd_landau(args, p, out):
    from .landau import coefficient_sweep, write_sweep_csv

    br = args.sigma_bracket.values
    if len(br) != 2 or not br[1] > br[0]:
        raise UsageError("sigma bracket needs lo,hi with lo < hi")
    rows = coefficient_sweep(p, args.gamma_range.linspace(), tuple(br), index=args.index, mode=args.mode)
    with _open(out, "landau.csv") as fh:
        write_sweep_csv(rows, fh)
    bad = sum(not r["ok"] for r in rows)
    return f"landau.csv: {len(rows)} rows, {bad} without critical point"


def _critical(p, index=1):
    from .homogeneous import find_critical_points

    pts = find_critical_points(p, (1e-3, 0.25), 500, index=index)
    if not pts:
        raise UsageError("no Turing point of this root for sigma in (0.001, 0.25)")
    return max(pts)


def _cont_settings(args):
    from .continuation import ContinuationSettings

    return ContinuationSettings(newton_tol=args.tol, ds=args.ds, ds_min=args.ds_min, ds_max=args.ds_max,
                                n_eigs=args.n_eigs, seed=args.seed)


def cmd_cont(args, p, out):
    from .continuation import (continue_branch, homogeneous_stop, load_resume_state, make_point,
                               newton_correct, switch_branch, write_branch_csv)
    from .homogeneous import state_by_index
    from .landau import AmplitudeTriple, hexagon_amplitudes, landau_coefficients, reconstruct_field, stripe_amplitudes
    from .pde import Domain, Field, read_field

    settings = _cont_settings(args)
    resume = None
    stop = None
    start = args.start
    if start in ("homogeneous", "stripe", "hexagon"):
        sc = kc = None
        if args.k_domain is None or start != "homogeneous":
            sc, kc = _critical(p, args.index)
        kd = args.k_domain if args.k_domain is not None else kc
        if start == "hexagon" and args.dim != 2:
            raise UsageError("hexagon starts need --dim 2")
        if args.dim == 1:
            d = Domain.for_wavenumber(kd, args.half_periods, args.ppw)
        else:
            d = Domain.for_wavenumber(kd, args.half_periods, args.ppw, hexagonal=True)
        if start == "homogeneous":
            s = state_by_index(p, args.index)
            if not s.is_real:
                raise UsageError(f"root {args.index} is not real at sigma = {p.sigma}")
            f = Field.constant(d, s.u, s.v)
            sigma0 = p.sigma
        else:
            sigma0 = sc + args.offset
            lc = landau_coefficients(p, kc, sc, sigma0, index=args.index)
            j = 0 if args.root == "plus" else 1
            if start == "stripe":
                a = stripe_amplitudes(lc)[j]
                t = AmplitudeTriple(a, 0.0, 0.0, "stripe")
            else:
                a = hexagon_amplitudes(lc)[j]
                t = AmplitudeTriple(a, a, a, "hexagon")
            guess = reconstruct_field(t, lc, d, sigma=sigma0)
            f, _ = newton_correct(guess, sigma0, p, tol=args.tol, max_iter=60)
            if args.stop_homogeneous:
                stop = homogeneous_stop(p, settings)
    else:
        if not os.path.exists(start):
            raise UsageError(f"start must be homogeneous, stripe, hexagon or a field file: {start!r}")
        with open(start) as fh:
            f = read_field(fh)
        sigma0 = float(np.ravel(f.sigma)[0]) if f.sigma is not None else p.sigma
        resume = load_resume_state(start)
        if resume is None:
            f, _ = newton_correct(f, sigma0, p, tol=args.tol, max_iter=60)
        f = Field(f.domain, f.u, f.v)
        if args.stop_homogeneous and np.ptp(f.u) > 1e-6:
            stop = homogeneous_stop(p, settings)
    pt0 = make_point(f, sigma0, p, settings)
    snaps = os.path.join(out, "snapshots") if args.snapshot_every else None
    br = continue_branch(pt0, p, args.steps, direction=args.direction, settings=settings, stop=stop,
                         label=args.label, snapshot_dir=snaps, snapshot_every=args.snapshot_every,
                         resume=resume)
    with _open(out, f"{args.label}.csv") as fh:
        write_branch_csv(br, fh)
    msg = [f"{args.label}.csv: {len(br.points)} points, end: {br.reason}"]
    if args.switch:
        bifs = br.tagged("bifurcation")
        if not 1 <= args.switch <= len(bifs):
            raise UsageError(f"--switch {args.switch}: branch has {len(bifs)} bifurcation points")
        bif = bifs[args.switch - 1]
        first = switch_branch(bif, p, args.sign, args.switch_amplitude, parent=br, settings=settings)
        lab = f"{args.label}_switch{args.switch}"
        sbr = continue_branch(first, p, args.switch_steps, settings=settings, prev=bif,
                              stop=homogeneous_stop(p, settings) if args.stop_homogeneous else None,
                              label=lab, snapshot_dir=snaps, snapshot_every=args.snapshot_every)
        with _open(out, f"{lab}.csv") as fh:
            write_branch_csv(sbr, fh)
        msg.append(f"{lab}.csv: {len(sbr.points)} points from sigma = {bif.sigma:.8f}, end: {sbr.reason}")
    return "\n".join(msg)


def cmd_ti(args, p, out):
    from .pde import Domain, Field, sigma_profile, write_field
    from .timestep import IntegrationRun, classify_strips, integrate, perturb, write_layering_csv

    if args.dim == 1:
        d = Domain(((0.0, args.lx),), (args.nx,))
    else:
        d = Domain(((0.0, args.lx), (0.0, args.ly)), (args.nx, args.ny))
    sig = None
    if args.sigma_profile is not None:
        s0, rate, y0 = args.sigma_profile.values
        sig = sigma_profile(d, s0, rate, y0)
    base = Field.constant(d, args.u_init, args.v_init, sigma=sig)
    w = perturb(base, args.amplitude, seed=args.seed)
    run = IntegrationRun(w, dt=args.dt, T=args.T, snapshot_times=args.snapshots.values,
                         quiescence_tol=args.quiescence_tol, window=args.window, seed=args.seed,
                         stop_when_quiescent=not args.run_to_end)
    tr = integrate(run, p)
    for t, f in zip(tr.times, tr.snapshots):
        with _open(out, f"snapshot_t{t:g}.dat") as fh:
            write_field(f, fh)
    with _open(out, "final.dat") as fh:
        write_field(tr.final, fh)
    with _open(out, "trajectory.csv") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["t", "relative_change"])
        for t, c in tr.changes:
            wr.writerow([_num(t), _num(c)])
    msg = [f"t_final = {tr.t_final:g}, quiescent = {tr.quiescent}"
           + (f" (from t = {tr.t_quiescent:g})" if tr.quiescent else "")]
    if d.dim == 2:
        labels = classify_strips(tr.final, args.strip_height, window=args.strip_window)
        with _open(out, "layering.csv") as fh:
            write_layering_csv(labels, fh)
        msg.append("layering.csv: " + " ".join(s.label for s in labels))
    return "\n".join(msg)


def cmd_norms(args, p, out):
    from .pde import norms, read_field

    if not args.fields:
        raise UsageError("norms needs at least one --field")
    keys = ["u_l1", "u_l2", "u_l8", "v_l1", "v_l2", "v_l8"]
    with _open(out, "norms.csv") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["field"] + keys)
        for path in args.fields:
            with open(path) as src:
                nm = norms(read_field(src))
            w.writerow([path] + [_num(nm[k]) for k in keys])
    return "norms.csv"


def cmd_export(args, p, out):
    from .homogeneous import find_critical_points, neutral_wavenumbers, state_by_index
    from .errors import NoNeutralWavenumberError
    from .pde import read_field

    if args.what == "neutral":
        with _open(out, "neutral.csv") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["sigma", "k_minus", "k_plus"])
            for sg in args.sigma_range.linspace():
                q = p.replace(sigma=float(sg))
                s = state_by_index(q, args.index)
                row = ["NA", "NA"]
                if s.is_real:
                    try:
                        km, kp = neutral_wavenumbers(s, q)
                        if s.stability.cls.value == "TuringUnstable":
                            row = [_num(km), _num(kp)]
                    except NoNeutralWavenumberError:
                        pass
                w.writerow([_num(sg)] + row)
        return "neutral.csv"
    if args.what == "critical":
        with _open(out, "critical.csv") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["gamma", "sigma_c", "k_c"])
            for g in args.gamma_range.linspace():
                pts = find_critical_points(p.replace(gamma=float(g)), (1e-3, 0.25), 500, index=args.index)
                if not pts:
                    w.writerow([_num(g), "NA", "NA"])
                for sc, kc in sorted(pts, reverse=True):
                    w.writerow([_num(g), _num(sc), _num(kc)])
        return "critical.csv"
    if not args.field:
        raise UsageError("export --what field needs --field")
    with open(args.field) as src:
        f = read_field(src)
    cols = [c.ravel() for c in f.domain.coords()]
    names = ["x", "y"][: f.domain.dim]
    with _open(out, "field.csv") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names + ["u", "v"])
        for row in zip(*cols, f.u.ravel(), f.v.ravel()):
            w.writerow([_num(x) for x in row])
    return "field.csv"


# -- entry point -----------------------------------------------------------------

def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        _apply_config(ap, argv)
    except (UsageError, OSError) as exc:
        print(f"benthic-patterns: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    sp = _subparser(ap, args.command)
    try:
        p = resolve_params(args) if any(k in _actions(sp) for k in PARAM_KEYS) else None
        out = run_dir(args)
        with _open(out, "config.txt") as fh:
            fh.write(echo_config(args, p, sp))
        msg = args.func(args, p, out)
    except (NumericFailure, KineticsDomainError) as exc:
        print(f"benthic-patterns: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (UsageError, BenthicError, ValueError, OSError) as exc:
        print(f"benthic-patterns: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if msg:
        print(msg)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

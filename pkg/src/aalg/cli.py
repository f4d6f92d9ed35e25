"""Command-line entry point ``aalg``.

Exit codes: 0 success, 2 input error, 3 domain precondition, 4 integration
failure, 5 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .algebra import decompose
from .classify import (classify_ricci_flat, decomposability, enumerate_sym_group,
                       is_special_palindrome, isotropy_structure)
from .curvature import (curvature, is_flat, is_locally_symmetric, is_ricci_flat,
                        levi_civita, ricci_closed_form, ricci_from_curvature, ricci_general)
from .dynamics import (IntegrationError, f_max, integrate_geodesic, polar_diagnostics,
                       verify_ctc, write_ctc_csv, write_plot_data, write_trajectory_csv)
from .metric import LorentzianStructure, structure_from_json
from .oracle import run_oracle
from .petrov import DomainError, build, is_simply_transitive, metric_at, to_classical_petrov

EXIT_OK, EXIT_INPUT, EXIT_DOMAIN, EXIT_INTEGRATION, EXIT_VERIFY = 0, 2, 3, 4, 5


class InputError(ValueError):
    pass


class VerificationFailed(RuntimeError):
    def __init__(self, failures, report):
        super().__init__("; ".join(failures))
        self.failures = failures
        self.report = report


# --- argument helpers ------------------------------------------------------

def _default_tol() -> float:
    raw = os.environ.get("AALG_TOL")
    if raw is None:
        return 1e-10
    try:
        tol = float(raw)
    except ValueError:
        raise InputError(f"AALG_TOL={raw!r} is not a number") from None
    return tol


def _positive(name: str, v: float) -> float:
    if not (v > 0 and math.isfinite(v)):
        raise InputError(f"{name} must be positive and finite, got {v}")
    return v


def _load_spec(value: str) -> dict:
    text = value
    if not value.lstrip().startswith("{"):
        try:
            text = Path(value).read_text()
        except OSError as exc:
            raise InputError(f"cannot read spec {value!r}: {exc}") from None
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON spec: {exc}") from None
    if not isinstance(spec, dict):
        raise InputError("spec must be a JSON object")
    return spec


def _parse_floats(text: str, what: str) -> list[float]:
    try:
        vals = [float(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise InputError(f"{what} must be a comma-separated list of numbers") from None
    if not vals or not all(math.isfinite(v) for v in vals):
        raise InputError(f"{what} must be a non-empty list of finite numbers")
    return vals


def _lambda_input(args) -> dict:
    if args.lambdas is not None:
        return {"lambda": _parse_floats(args.lambdas, "--lambda")}
    if args.spec is None:
        raise InputError("give --lambda or --spec")
    spec = _load_spec(args.spec)
    lam = spec.get("lambda")
    if not isinstance(lam, list) or not all(isinstance(v, (int, float)) for v in lam):
        raise InputError('spec needs a "lambda" list of numbers')
    return {"lambda": [float(v) for v in lam]}


def _structure(spec: dict) -> LorentzianStructure:
    try:
        return structure_from_json(spec)
    except (ValueError, TypeError) as exc:
        raise InputError(str(exc)) from None


def _check_out(path, force: bool) -> Path | None:
    if path is None:
        return None
    p = Path(path)
    if p.exists() and not force:
        raise InputError(f"{p} exists; pass --force to overwrite")
    return p


def _clean(obj):
    """JSON-safe copy: arrays to lists, non-finite floats to None."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def _envelope(command: str, spec, seed, **params) -> dict:
    return {"command": command, "version": __version__, "input": spec, "seed": seed,
            "parameters": params}


def _emit(report: dict, out: Path | None = None) -> None:
    text = json.dumps(_clean(report), indent=2, sort_keys=True)
    if out is not None:
        out.write_text(text + "\n")
    print(text)


# --- commands --------------------------------------------------------------

def _decomposition_summary(struct) -> dict:
    dec = decompose(struct.alg, struct.case)
    if struct.case == "a":
        return {"S": dec.S, "T": dec.T}
    if struct.case == "b":
        return {"S_L": dec.S_L, "T_L": dec.T_L}
    return {"Aprime": dec.Aprime, "b": dec.b, "c": dec.c, "d": dec.d,
            "Sprime": dec.Sprime, "Tprime": dec.Tprime}


def cmd_ricci(args) -> int:
    spec = _load_spec(args.spec)
    tol = _positive("--tol", args.tol)
    struct = _structure(spec)
    gen = ricci_general(struct)
    closed = ricci_closed_form(struct)
    rf = is_ricci_flat(struct, tol)
    report = _envelope("ricci", spec, None, tol=tol)
    report.update({
        "n": struct.n,
        "metric": struct.case,
        "ricci_general": gen,
        "ricci_closed_form": closed,
        "max_path_difference": float(np.abs(gen - closed).max()),
        "max_abs_ricci": rf.max_abs_ricci,
        "ricci_flat": rf.ricci_flat,
        "ricci_flat_closed_form": rf.closed_form,
        "conditions": rf.conditions,
        "flat": is_flat(struct, tol),
        "locally_symmetric": is_locally_symmetric(struct, tol),
        "classification": classify_ricci_flat(struct, tol).__dict__,
        "decomposition": _decomposition_summary(struct),
    })
    _emit(report, _check_out(args.out, args.force))
    return EXIT_OK


def _isotropy_report(sol) -> dict | None:
    if not is_simply_transitive(sol.lambdas):
        return None
    elems = enumerate_sym_group(sol)
    iso = isotropy_structure(elems)
    return {"order": iso.order, "abelian": iso.abelian, "label": iso.label,
            "curvature_symmetries": len(elems)}


def cmd_petrov(args) -> int:
    spec = _lambda_input(args)
    out = _check_out(args.out, args.force)
    sol = build(spec["lambda"])
    core, m = decomposability(sol.lambdas)
    report = _envelope("petrov", spec, args.seed, samples=args.samples)
    report.update({
        "n": sol.n,
        "alpha": sol.alpha,
        "beta": sol.beta,
        "A": sol.structure().A,
        "simply_transitive": is_simply_transitive(sol.lambdas),
        "isotropy": _isotropy_report(sol),
        "decomposability": {"core": core, "flat_factor_dim": m},
        "palindrome": is_special_palindrome(sol.lambdas),
        "classical_reduction": None,
    })
    if sol.n == 4:
        red = to_classical_petrov(sol, seed=args.seed)
        report["classical_reduction"] = red.__dict__
    if out is not None:
        rng = np.random.default_rng(args.seed)
        n = sol.n
        iu = np.triu_indices(n)
        with open(out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow([*[f"x{i}" for i in range(1, n + 1)],
                        *[f"g{i + 1}{j + 1}" for i, j in zip(*iu)]])
            for x in rng.uniform(-1, 1, size=(args.samples, n)):
                g = metric_at(sol, x)
                w.writerow([repr(float(v)) for v in (*x, *g[iu])])
        report["metric_samples_csv"] = str(out)
    _emit(report)
    return EXIT_OK


def cmd_geodesic(args) -> int:
    spec = _lambda_input(args)
    tol = _positive("--tol", args.tol)
    out = _check_out(args.out, args.force)
    u0 = _parse_floats(args.u0, "--u0")
    sol = build(spec["lambda"])
    if len(u0) != sol.n:
        raise InputError(f"--u0 needs {sol.n} components, got {len(u0)}")
    traj = integrate_geodesic(sol, u0, args.t_end, tol)
    if out is not None:
        write_trajectory_csv(out, traj)
    polar = polar_diagnostics(traj, sol)
    report = _envelope("geodesic", spec, None, u0=u0, t_end=args.t_end, tol=tol)
    report.update({
        "n": sol.n,
        "alpha": sol.alpha,
        "beta": sol.beta,
        "max_q_drift": traj.max_q_drift,
        "q0": traj.q[0],
        "n_accepted": traj.n_accepted,
        "n_rejected": traj.n_rejected,
        "underflow_events": traj.underflow_events,
        "reduced": traj.reduced,
        "step_stats": traj.stats,
        "final_state": traj.u[-1],
        "polar": ({"max_relative_residual": polar.max_relative_residual,
                   "theta_monotone": polar.theta_monotone,
                   "r_min": polar.r_min, "r_max": polar.r_max}
                  if polar.applicable else None),
        "trajectory_csv": str(out) if out is not None else None,
    })
    _emit(report)
    return EXIT_OK


def cmd_ctc(args) -> int:
    spec = _lambda_input(args)
    if args.samples < 1000:
        raise InputError(f"--samples must be at least 1000, got {args.samples}")
    out = _check_out(args.out, args.force)
    sol = build(spec["lambda"])
    verdict = verify_ctc(sol, args.samples)
    fm = f_max()
    if out is not None:
        write_ctc_csv(out, sol, args.samples)
    plots = None
    if args.plot_dir is not None:
        plots = [str(p) for p in write_plot_data(args.plot_dir, sol)]
    report = _envelope("ctc", spec, None, samples=args.samples)
    report.update({
        "n": sol.n,
        "alpha": sol.alpha,
        "beta": sol.beta,
        "all_timelike": verdict.all_timelike,
        "worst_norm": verdict.worst_norm,
        "bound": verdict.bound,
        "bound_holds": verdict.bound_holds,
        "f_max": {"t_star": fm.t_star, "f_star": fm.f_star, "grid_max": fm.grid_max},
        "scan_csv": str(out) if out is not None else None,
        "plot_files": plots,
    })
    _emit(report)
    if not verdict.all_timelike:
        raise VerificationFailed(["curve is not timelike everywhere"], report)
    return EXIT_OK


def _symmetry_suite(struct, R, tol) -> dict:
    eta = struct.eta
    scale = max(1.0, float(np.abs(R).max()))
    pair = float(np.abs(R + R.transpose(1, 0, 2, 3)).max())
    low = np.einsum("ik,abkj->abij", eta, R)
    skew = float(np.abs(low + low.transpose(0, 1, 3, 2)).max())
    # first Bianchi: R(a,b)c + R(b,c)a + R(c,a)b = 0
    bianchi = float(np.abs(np.einsum("abic->abci", R) + np.einsum("bcia->abci", R)
                           + np.einsum("caib->abci", R)).max())
    ric = ricci_from_curvature(struct, R)
    sym = float(np.abs(ric - ric.T).max())
    res = {"antisymmetric_pair": pair, "eta_skew": skew, "first_bianchi": bianchi,
           "ricci_symmetric": sym}
    return {"residuals": res, "passed": all(v < tol * scale for v in res.values())}


def cmd_verify(args) -> int:
    if args.lambdas is not None:
        spec = {"lambda": _parse_floats(args.lambdas, "--lambda")}
    elif args.spec is not None:
        spec = _load_spec(args.spec)
    else:
        raise InputError("give --spec or --lambda")
    tol = _positive("--tol", args.tol)
    h = _positive("--h", args.h)
    oracle_tol = _positive("--oracle-tol", args.oracle_tol)
    if args.samples < 1:
        raise InputError("--samples must be at least 1")
    if "lambda" in spec:
        lam = spec["lambda"]
        if not isinstance(lam, list) or not all(isinstance(v, (int, float)) for v in lam):
            raise InputError('"lambda" must be a list of numbers')
        spec = {**spec, "lambda": [float(v) for v in lam]}
        struct = build(spec["lambda"]).structure()
    else:
        struct = _structure(spec)

    L = levi_civita(struct)
    R = curvature(struct, L)
    gen = ricci_general(struct)
    closed = ricci_closed_form(struct)
    trace = ricci_from_curvature(struct, R)
    scale = max(1.0, float(np.abs(struct.A).max()) ** 2)
    eq = {"closed_vs_general": float(np.abs(closed - gen).max()),
          "trace_vs_general": float(np.abs(trace - gen).max())}
    suites = {"ricci_equivalence": {"residuals": eq,
                                    "passed": all(v < tol * scale for v in eq.values())}}

    run = run_oracle(struct, gen, args.samples, args.seed, h, check_order=True)
    # the order estimate is meaningless once the error is at rounding level
    order_ok = run.order is None or run.max_error < 1e-8 or abs(run.order - 2) < 0.5
    suites["fd_oracle"] = {"max_error": run.max_error, "order": run.order,
                           "points": run.points, "h": h, "max_asymmetry": run.max_asymmetry,
                           "passed": run.max_error < oracle_tol and order_ok}
    suites["curvature_symmetries"] = _symmetry_suite(struct, R, tol)

    failures = [name for name, s in suites.items() if not s["passed"]]
    report = _envelope("verify", spec, args.seed, tol=tol, h=h, samples=args.samples,
                       oracle_tol=oracle_tol)
    report.update({"n": struct.n, "metric": struct.case, "suites": suites,
                   "failures": failures, "passed": not failures})
    _emit(report, _check_out(args.out, args.force))
    if failures:
        raise VerificationFailed(failures, report)
    return EXIT_OK


# --- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="aalg", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"aalg {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, out_help):
        sp.add_argument("--out", help=out_help)
        sp.add_argument("--force", action="store_true", help="overwrite existing output")

    def lam_args(sp):
        sp.add_argument("--lambda", dest="lambdas", metavar="L1,L2,...",
                        help="comma-separated lambdas, e.g. 3,2,1")
        sp.add_argument("--spec", help='JSON file or inline JSON such as {"lambda": [1]}')

    sp = sub.add_parser("ricci", help="Ricci tensor and flatness flags of an algebra spec")
    sp.add_argument("--spec", required=True, help='JSON file or inline {"n","metric","A"}')
    sp.add_argument("--tol", type=float, default=None)
    common(sp, "also write the JSON report here")
    sp.set_defaults(func=cmd_ricci)

    sp = sub.add_parser("petrov", help="build a generalized Petrov solution")
    lam_args(sp)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--samples", type=int, default=100, help="metric samples for --out")
    common(sp, "CSV of metric samples at random points")
    sp.set_defaults(func=cmd_petrov)

    sp = sub.add_parser("geodesic", help="integrate the Arnold-Euler geodesic system")
    lam_args(sp)
    sp.add_argument("--u0", required=True, help="initial velocity, comma-separated")
    sp.add_argument("--t-end", type=float, default=100.0)
    sp.add_argument("--tol", type=float, default=None)
    common(sp, "trajectory CSV")
    sp.set_defaults(func=cmd_geodesic)

    sp = sub.add_parser("ctc", help="scan the closed timelike curve")
    lam_args(sp)
    sp.add_argument("--samples", type=int, default=10000)
    sp.add_argument("--plot-dir", help="directory for plot data CSVs")
    common(sp, "scan CSV")
    sp.set_defaults(func=cmd_ctc)

    sp = sub.add_parser("verify", help="run the cross-check suites")
    lam_args(sp)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--samples", type=int, default=10, help="oracle sample points")
    sp.add_argument("--h", type=float, default=1e-3, help="finite-difference step")
    sp.add_argument("--tol", type=float, default=None)
    sp.add_argument("--oracle-tol", type=float, default=1e-4)
    common(sp, "also write the JSON report here")
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if getattr(args, "tol", "unset") is None:
            args.tol = _default_tol()
        return args.func(args)
    except InputError as exc:
        print(f"aalg: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DomainError as exc:
        print(f"aalg: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except IntegrationError as exc:
        print(f"aalg: integration failure: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION
    except VerificationFailed as exc:
        print(f"aalg: verification failed: {', '.join(exc.failures)}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())

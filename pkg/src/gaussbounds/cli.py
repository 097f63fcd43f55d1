"""Command-line front end: single-point bounds, parameter sweeps, self-checks.

Exit codes: 0 success, 1 usage/data error, 2 solver reported reduced accuracy,
3 consistency-invariant violation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import models as model_lib
from .bounds import SingularModelError
from .models import JetFileError, OutOfDomainError, build_model, closed_form_bounds, dump_jet, load_jet
from .quadratic import SingularKernelError
from .report import evaluate_bounds
from .sdp import SolveOptions, SolveStatus
from .svgplot import render_lines
from .symplectic import validate_state

CSV_HEADER = "theta,CS,CR,CHbar,CH,R,status"


class UsageError(ValueError):
    pass


def _parse_assignments(text: str, label: str) -> dict:
    out = {}
    if not text:
        return out
    for chunk in text.split(","):
        if "=" not in chunk:
            raise UsageError(f"--{label}: expected name=value, got '{chunk}'")
        key, _, val = chunk.partition("=")
        try:
            out[key.strip()] = float(val)
        except ValueError:
            raise UsageError(f"--{label}: value for '{key.strip()}' is not a number: '{val}'")
    return out


def _parse_axis(text: str):
    parts = text.split(":")
    if len(parts) != 4:
        raise UsageError("--axis: expected name:start:stop:count")
    name, start, stop, count = parts
    try:
        start, stop, count = float(start), float(stop), int(count)
    except ValueError:
        raise UsageError(f"--axis: malformed numbers in '{text}'")
    if count < 2:
        raise UsageError("--axis: sweep needs at least 2 points")
    return name.strip(), np.linspace(start, stop, count)


def _load_weight(path: str | None, p: int) -> np.ndarray:
    if path is None or path == "identity":
        return np.eye(p)
    try:
        with open(path) as fh:
            data = json.load(fh)
        return np.asarray(data, dtype=float)
    except (OSError, json.JSONDecodeError, ValueError) as err:
        raise UsageError(f"cannot read weight matrix from {path}: {err}")


def _solve_options(args) -> SolveOptions:
    tol = float(os.environ.get("GAUSSBOUNDS_SOLVER_TOL", 1e-9))
    return SolveOptions(
        epsilon=args.eps,
        extrapolate=getattr(args, "extrapolate", False),
        verify=getattr(args, "verify", False),
        solver_tol=tol,
    )


def _jet_from_args(args):
    """Resolve the (model, theta, jet) triple from --model/--jet flags."""
    if bool(args.model) == bool(args.jet):
        raise UsageError("exactly one of --model or --jet is required")
    if args.jet:
        jet = load_jet(args.jet)
        return None, None, jet
    fixed = _parse_assignments(args.fixed or "", "fixed")
    at = _parse_assignments(args.at or "", "at")
    model = build_model(args.model, fixed)
    missing = [nm for nm in model.param_names if nm not in at]
    if missing:
        raise UsageError(f"--at must assign every model parameter; missing {missing}")
    unknown = [nm for nm in at if nm not in model.param_names]
    if unknown:
        raise UsageError(
            f"--at names {unknown} are not parameters of {model.name} "
            f"(expected {list(model.param_names)})"
        )
    theta = np.array([at[nm] for nm in model.param_names])
    return model, theta, model.jet(theta)


def _fmt(value) -> str:
    if value is None:
        return "nan"
    return f"{value:.12g}"


def cmd_bounds(args) -> int:
    model, theta, jet = _jet_from_args(args)
    w = _load_weight(args.weight, jet.p)
    options = _solve_options(args)
    report = evaluate_bounds(jet, w, options)
    if args.dump_jet:
        dump_jet(jet, args.dump_jet)
    payload = report.as_dict()
    if model is not None:
        payload["model"] = model.name
        payload["theta"] = {nm: float(t) for nm, t in zip(model.param_names, theta)}
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    else:
        for key in ("CS", "CR", "CHbar", "CH", "R"):
            print(f"{key:6s} {_fmt(payload[key])}")
        print(f"{'status':6s} {payload['status']}")
        print(f"{'eps':6s} {_fmt(payload['epsilon'])}")
    if not report.chain_ok:
        for msg in report.chain_violations:
            print(f"chain violation: {msg}", file=sys.stderr)
        return 3
    if report.solver_status is SolveStatus.INACCURATE:
        return 2
    if report.solver_status is not SolveStatus.OPTIMAL:
        return 1
    return 0


def _sweep_point(model, names, theta, w, options):
    try:
        jet = model.jet(theta)
        report = evaluate_bounds(jet, w, options)
        status = report.solver_status.value if report.solver_status else "none"
        if not report.chain_ok:
            status = "chain_violation"
        return (report.cs, report.cr, report.ch_upper, report.ch, report.incompatibility, status)
    except (SingularKernelError, SingularModelError, ValueError, ArithmeticError) as err:
        return (None, None, None, None, None, f"error:{type(err).__name__}")


def cmd_sweep(args) -> int:
    if not args.model:
        raise UsageError("sweep requires --model (jet files describe a single point)")
    fixed = _parse_assignments(args.fixed or "", "fixed")
    at = _parse_assignments(args.at or "", "at")
    model = build_model(args.model, fixed)
    axis_name, grid = _parse_axis(args.axis)
    if axis_name not in model.param_names:
        raise UsageError(f"sweep axis '{axis_name}' is not a parameter of {model.name}")
    for nm in model.param_names:
        if nm != axis_name and nm not in at:
            raise UsageError(f"--at must fix non-swept parameter '{nm}'")
    w = _load_weight(args.weight, model.p)
    options = _solve_options(args)

    thetas = []
    for val in grid:
        at_point = dict(at)
        at_point[axis_name] = float(val)
        thetas.append(np.array([at_point[nm] for nm in model.param_names]))

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(lambda th: _sweep_point(model, model.param_names, th, w, options), thetas))
    else:
        rows = [_sweep_point(model, model.param_names, th, w, options) for th in thetas]

    lines = [CSV_HEADER]
    for val, row in zip(grid, rows):
        cs, cr, chbar, ch, rpar, status = row
        lines.append(
            ",".join([_fmt(float(val)), _fmt(cs), _fmt(cr), _fmt(chbar), _fmt(ch), _fmt(rpar), status])
        )
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)

    if args.svg:
        series = {}
        for idx, key in enumerate(("CS", "CR", "CHbar", "CH")):
            series[key] = [row[idx] for row in rows]
        svg = render_lines(
            [float(v) for v in grid],
            series,
            x_label=axis_name,
            y_label="bound",
            log_y=not args.linear_y,
        )
        with open(args.svg, "w") as fh:
            fh.write(svg)

    bad = [s for *_, s in rows if s not in ("optimal",)]
    return 2 if bad else 0


def _check_closed_forms(options, tol_closed, tol_hcrb, report_lines):
    """Closed-form regression + chain inequalities on builtin-model grids."""
    failures = []
    worst = 0.0

    def run_point(model_name, fixed, theta_map, params, checks):
        nonlocal worst
        model = build_model(model_name, fixed)
        theta = np.array([theta_map[nm] for nm in model.param_names])
        report = evaluate_bounds(model.jet(theta), np.eye(model.p), options)
        values = {"CS": report.cs, "CR": report.cr, "CHbar": report.ch_upper, "CH": report.ch}
        for which, tol in checks:
            try:
                ref = closed_form_bounds(model_name, params, which)
            except OutOfDomainError:
                continue
            got = values[which]
            dev = abs(got - ref) / max(abs(ref), 1e-12)
            worst = max(worst, dev if which != "CH" else 0.0)
            if dev > tol:
                failures.append(
                    f"{model_name} {params}: {which} = {got:.10g} vs closed form {ref:.10g} "
                    f"(rel dev {dev:.2e})"
                )
        if not report.chain_ok:
            failures.append(f"{model_name} {params}: {'; '.join(report.chain_violations)}")

    closed = [("CS", tol_closed), ("CR", tol_closed), ("CHbar", tol_closed), ("CH", tol_hcrb)]
    for eta in (0.1, 0.3, 0.5, 0.7, 0.9):
        run_point(
            "phase-loss",
            {"alpha_re": 0.3, "alpha_im": 0.0, "r": 0.0},
            {"phi": 0.0, "eta": eta},
            {"alpha_re": 0.3, "alpha_im": 0.0, "r": 0.0, "eta": eta},
            closed,
        )
    for r in (0.2, 0.8, 1.5):
        for eta in (0.25, 0.5, 0.75):
            run_point(
                "phase-loss",
                {"alpha_re": 0.0, "alpha_im": 0.0, "r": r},
                {"phi": 0.0, "eta": eta},
                {"alpha_re": 0.0, "alpha_im": 0.0, "r": r, "eta": eta},
                closed,
            )
    for n in (0.5, 2.0):
        for r in (0.0, 0.7, 1.4):
            run_point(
                "disp-squeeze-1",
                {"n": n},
                {"alpha_re": 0.1, "alpha_im": 0.2, "r": r},
                {"n": n, "r": r},
                closed,
            )
            run_point(
                "disp-squeeze-2",
                {"n": n},
                {"alpha_re": 0.1, "alpha_im": 0.2, "r": r},
                {"n": n, "r": r},
                closed,
            )
    report_lines.append(f"closed-form regression: max rel deviation {worst:.3e}")
    return failures


def _check_oracle(options, cutoff, report_lines):
    """Fock-space cross-check of information matrices and the Holevo bound."""
    from .derivatives import information_bundle
    from .fock import fock_hcrb, fock_qfims, fock_uhlmann, synthesize_fock
    from .report import evaluate_bounds as _eval

    failures = []
    worst = 0.0
    configs = [
        (0.25, 0.3, 0.2 + 0.1j),
        (1.0, 0.3, 0.3 + 0.0j),
        (0.5, 0.6, 0.3 + 0.2j),
        (0.5, 0.0, 0.8 + 0.4j),
    ]
    for n, r, alpha in configs:
        model = build_model("disp-squeeze-1", {"n": n})
        theta = np.array([alpha.real, alpha.imag, r])
        jet = model.jet(theta)

        def rho_of(th):
            return synthesize_fock(
                [("thermal", n), ("squeeze", th[2]), ("displace", th[0] + 1j * th[1])], cutoff
            ).rho

        rho = rho_of(theta)
        h = 1e-5
        drhos = []
        for j in range(3):
            tp, tm = theta.copy(), theta.copy()
            tp[j] += h
            tm[j] -= h
            drhos.append((rho_of(tp) - rho_of(tm)) / (2 * h))
        js_f, jr_f = fock_qfims(rho, drhos)
        u_f = fock_uhlmann(rho, drhos)
        info = information_bundle(jet)
        ch_f = fock_hcrb(rho, drhos, np.eye(3))
        report = _eval(jet, np.eye(3), options)
        devs = {
            "JS": np.max(np.abs(js_f - info.js)) / np.max(np.abs(info.js)),
            "JR": np.max(np.abs(jr_f - info.jr)) / np.max(np.abs(info.jr)),
            "uhlmann": np.max(np.abs(u_f - info.uhlmann)) / max(np.max(np.abs(info.uhlmann)), 1e-12),
            "CH": abs(ch_f - report.ch) / abs(report.ch),
        }
        worst = max(worst, max(devs.values()))
        for key, dev in devs.items():
            if dev > 1e-3:
                failures.append(f"oracle n={n} r={r} alpha={alpha}: {key} rel dev {dev:.2e}")
    report_lines.append(f"oracle cross-check: max rel deviation {worst:.3e}")
    return failures


def cmd_check(args) -> int:
    options = _solve_options(args)
    report_lines = []
    failures = []
    if args.jet:
        jet = load_jet(args.jet)
        diag = validate_state(jet.state)
        if not diag.valid:
            raise JetFileError("; ".join(diag.violations))
        report = evaluate_bounds(jet, np.eye(jet.p), options)
        report_lines.append(f"jet file: CS={report.cs:.10g} CH={report.ch} chain_ok={report.chain_ok}")
        if not report.chain_ok:
            failures.extend(report.chain_violations)
    else:
        failures.extend(_check_closed_forms(options, 1e-5, 1e-3, report_lines))
        if args.oracle:
            failures.extend(_check_oracle(options, args.cutoff, report_lines))
    for line in report_lines:
        print(line)
    if failures:
        for msg in failures:
            print(f"FAIL: {msg}", file=sys.stderr)
        return 3
    print("all consistency checks passed")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gaussbounds",
        description="Multiparameter estimation precision bounds for Gaussian models",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", help=f"builtin model: {sorted(model_lib.MODEL_BUILDERS)}")
    common.add_argument("--jet", help="path to a jet JSON file")
    common.add_argument("--fixed", help="comma-separated fixed model constants, e.g. n=0.5")
    common.add_argument("--at", help="comma-separated parameter point, e.g. phi=0,eta=0.5")
    common.add_argument("--weight", help="'identity' or path to a JSON weight matrix")
    common.add_argument("--eps", type=float, default=1e-6, help="regularization epsilon")
    common.add_argument("--extrapolate", action="store_true", help="Richardson-extrapolate over eps")
    common.add_argument("--verify", action="store_true", help="re-solve at eps/2 and report drift")

    p_bounds = sub.add_parser("bounds", parents=[common], help="bounds at one parameter point")
    p_bounds.add_argument("--format", choices=("json", "table"), default="json")
    p_bounds.add_argument("--dump-jet", help="write the evaluated jet to this JSON file")
    p_bounds.set_defaults(func=cmd_bounds)

    p_sweep = sub.add_parser("sweep", parents=[common], help="bounds along one parameter axis")
    p_sweep.add_argument("--axis", required=True, help="name:start:stop:count")
    p_sweep.add_argument("--out", help="CSV output path (stdout if omitted)")
    p_sweep.add_argument("--svg", help="render an SVG line plot to this path")
    p_sweep.add_argument("--linear-y", action="store_true", help="linear instead of log y axis")
    p_sweep.add_argument("--jobs", type=int, default=1, help="worker threads for grid points")
    p_sweep.set_defaults(func=cmd_sweep)

    p_check = sub.add_parser("check", parents=[common], help="consistency/regression checks")
    p_check.add_argument("--oracle", action="store_true", help="include Fock-space cross-checks")
    p_check.add_argument("--cutoff", type=int, default=60, help="Fock cutoff for --oracle")
    p_check.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    import warnings

    warnings.filterwarnings("ignore", message="Solution may be inaccurate")
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, JetFileError, OutOfDomainError, KeyError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except (SingularKernelError, SingularModelError, ValueError, ArithmeticError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

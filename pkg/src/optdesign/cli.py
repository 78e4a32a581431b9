"""Command-line front end.

Subcommands: info, optimize, transfer, check, maximin, reproduce.

Exit codes form a stable scripting contract:
  0  success (results certified where applicable)
  1  input error (bad files, schema violations, inadmissible parameters)
  2  numerical failure (no convergence, failed certification, reference mismatch)
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .criteria import Criterion, certify, criterion_value
from .errors import InputError, NoConvergence, NumericalError, OptDesignError
from .invariance import orbits
from .model import Design
from .optimize import (
    OptimizeOptions,
    equal_slopes_params,
    gamma_grid,
    local_opt_result,
    maximin_invariant,
)
from .reproduce import DEFAULT_SEED, TARGETS
from .serialize import (
    criterion_from_dict,
    design_from_dict,
    design_to_dict,
    dump_json,
    group_from_dict,
    load_json,
    measure_to_dict,
    model_from_dict,
    model_to_dict,
    optimize_result_to_dict,
    transform_from_spec,
)
from .transforms import inverse_pair, transfer_optimal

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2


def _parse_beta(text: str) -> np.ndarray:
    try:
        return np.array([float(t) for t in text.split(",")], float)
    except ValueError as exc:
        raise InputError(f"could not parse --beta {text!r}: {exc}") from exc


def _parse_grid(text: str) -> np.ndarray:
    """lo:hi:n[:log] -> grid values for the reduced slope parameter."""
    parts = text.split(":")
    if len(parts) not in (3, 4):
        raise InputError(f"--grid must be lo:hi:n[:log|lin], got {text!r}")
    lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    kind = parts[3] if len(parts) == 4 else "lin"
    if kind == "lin":
        return np.linspace(lo, hi, n)
    if kind == "log":
        return gamma_grid(lo=lo, hi=hi, n=n)
    raise InputError(f"unknown grid kind {kind!r}")


def _print_design(design: Design) -> None:
    for x, w in zip(design.support, design.weights):
        shown = "0.000" if w < 5e-4 else f"{w:.3f}"
        print(f"  x = {np.array2string(x, precision=6)}   w = {shown}   ({w!r})")


def cmd_info(args) -> int:
    model = model_from_dict(load_json(args.model))
    print(f"model: p = {model.p}, dim_x = {model.dim_x}, basis = {model.basis_name}")
    if model.region.is_box:
        print(f"region: box {model.region.lower.tolist()} .. {model.region.upper.tolist()}")
    else:
        print(f"region: {len(model.region.points)} candidate points")
    print(f"kappa: {model.kappa}")
    ext = model.region.extremal_points()
    print(f"extremal points ({len(ext)}):")
    for x in ext:
        print(f"  {x.tolist()}")
    if args.beta:
        from .model import validate_beta

        beta = validate_beta(model, _parse_beta(args.beta))
        print(f"beta {beta.tolist()}: admissible (positive linear component)")
    return EXIT_OK


def cmd_optimize(args) -> int:
    model = model_from_dict(load_json(args.model))
    crit = criterion_from_dict(load_json(args.criterion)) if args.criterion else Criterion.d()
    beta = _parse_beta(args.beta)
    opts = OptimizeOptions(sensitivity_tol=args.sensitivity_tol)
    result = local_opt_result(model, beta, crit, opts=opts)
    print(f"criterion: {crit.kind}, value = {result.criterion_value:.10g}")
    print(
        f"certificate: max sensitivity {result.certificate.max_sensitivity:.9g} "
        f"<= bound {result.certificate.bound:.9g} "
        f"({result.certificate.n_points} points, {result.iterations} iterations)"
    )
    _print_design(result.design)
    if args.out:
        dump_json(optimize_result_to_dict(result), args.out)
        print(f"wrote {args.out}")
    return EXIT_OK


def cmd_check(args) -> int:
    model = model_from_dict(load_json(args.model))
    crit = criterion_from_dict(load_json(args.criterion)) if args.criterion else Criterion.d()
    design = design_from_dict(load_json(args.design))
    beta = _parse_beta(args.beta)
    cert = certify(model, design, beta, crit)
    verdict = "OPTIMAL (equivalence check passed)" if cert.ok else "NOT optimal"
    print(
        f"{verdict}: max sensitivity {cert.max_sensitivity:.9g} vs bound "
        f"{cert.bound:.9g} at {cert.worst_point.tolist()}"
    )
    if args.out:
        dump_json(
            {
                "ok": cert.ok,
                "max_sensitivity": cert.max_sensitivity,
                "bound": cert.bound,
                "worst_point": cert.worst_point.tolist(),
            },
            args.out,
        )
    return EXIT_OK if cert.ok else EXIT_NUMERIC


def cmd_transfer(args) -> int:
    model = model_from_dict(load_json(args.model))
    design = design_from_dict(load_json(args.design))
    tspec = args.transform
    try:
        tobj = load_json(tspec)
    except InputError:
        tobj = tspec  # shortcut string such as "reflect:1"
    pair = transform_from_spec(model, tobj)
    if args.inverse:
        pair = inverse_pair(pair)
    crit = criterion_from_dict(load_json(args.criterion)) if args.criterion else Criterion.d()
    beta = _parse_beta(args.beta) if args.beta else None
    result = transfer_optimal(model, design, pair, crit, beta=beta)
    bundle = {
        "design": design_to_dict(result.design),
        "model": model_to_dict(result.model),
        "beta": None if result.beta is None else result.beta.tolist(),
        "nu": None if result.nu is None else measure_to_dict(result.nu),
    }
    print("transferred design:")
    _print_design(result.design)
    if result.beta is not None:
        print(f"transferred beta: {result.beta.tolist()}")
    code = EXIT_OK
    if args.assert_optimal:
        if result.beta is None:
            raise InputError("--assert-optimal needs --beta")
        target_crit = crit if result.nu is None else Criterion.imse(result.nu)
        cert = certify(result.model, result.design, result.beta, target_crit)
        bundle["recertification"] = {
            "ok": cert.ok,
            "max_sensitivity": cert.max_sensitivity,
            "bound": cert.bound,
        }
        print(
            f"re-certification: {'passed' if cert.ok else 'FAILED'} "
            f"(max sensitivity {cert.max_sensitivity:.9g}, bound {cert.bound:.9g})"
        )
        if not cert.ok:
            code = EXIT_NUMERIC
    if args.out:
        dump_json(bundle, args.out)
        print(f"wrote {args.out}")
    return code


def cmd_maximin(args) -> int:
    model = model_from_dict(load_json(args.model))
    crit = criterion_from_dict(load_json(args.criterion)) if args.criterion else Criterion.d()
    group = group_from_dict(model, load_json(args.group))
    partition = orbits(group, model.region.extremal_points())
    gammas = (
        _parse_grid(args.grid) if args.grid else gamma_grid()
    )
    if model.p == 2:
        params = [np.array([1.0, g]) for g in gammas]
    elif model.p == 3:
        params = equal_slopes_params(gammas)
    else:
        raise InputError("maximin CLI supports the one- and two-factor affine models")
    result = maximin_invariant(
        model,
        crit,
        partition,
        params,
        include_gamma_infinity_limit=args.include_gamma_infinity_limit,
    )
    print(f"w* = {result.w_star:.6f}, minimal efficiency = {result.min_efficiency:.6f}")
    if result.boundary_attained:
        print("note: minimum sits at the grid edge or analytic limit (unattained supremum)")
    _print_design(result.design)
    if args.out:
        import csv as _csv
        from pathlib import Path

        path = Path(args.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            writer = _csv.writer(fh)
            writer.writerow(["param", "value"])
            writer.writerows(zip(gammas, result.efficiencies))
        print(f"wrote {path}")
        png = path.with_suffix(".png")
        from .figures import render_maximin_curve

        render_maximin_curve(gammas, result.efficiencies, result.w_star, png)
        print(f"wrote {png}")
        dump_json(
            {
                "design": design_to_dict(result.design),
                "w_star": result.w_star,
                "min_efficiency": result.min_efficiency,
                "boundary_attained": result.boundary_attained,
                "orbits": [list(o) for o in partition.orbits],
                "candidates": partition.candidates.tolist(),
            },
            path.with_suffix(".json"),
        )
    return EXIT_OK


def cmd_reproduce(args) -> int:
    fn = TARGETS[args.target]
    kwargs = {}
    if args.target == "prop1":
        kwargs["seed"] = args.seed
    if args.target == "table1" and args.grid:
        kwargs["grid_n"] = int(args.grid)
    if args.target == "fig4":
        kwargs["render"] = not args.no_render
    elif args.target in ("fig3", "table1"):
        kwargs["render"] = not args.no_render
    report = fn(args.out, **kwargs)
    print(report.summary())
    return EXIT_OK if report.ok else EXIT_NUMERIC


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="optdesign",
        description=(
            "Locally D- and IMSE-optimal approximate designs for gamma "
            "regression with inverse link; equivariant transfer, invariance "
            "reduction and maximin-efficiency search."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("info", help="validate and summarize a model file")
    p.add_argument("--model", required=True)
    p.add_argument("--beta", help="comma-separated parameter vector to validate")
    p.set_defaults(fn=cmd_info)

    p = sub.add_parser("optimize", help="certified locally optimal design")
    p.add_argument("--model", required=True)
    p.add_argument("--beta", required=True)
    p.add_argument("--criterion", help="criterion JSON file (default: D)")
    p.add_argument("--out", help="write result JSON here")
    p.add_argument("--sensitivity-tol", type=float, default=1e-6)
    p.set_defaults(fn=cmd_optimize)

    p = sub.add_parser("check", help="equivalence-theorem certification of a design")
    p.add_argument("--model", required=True)
    p.add_argument("--design", required=True)
    p.add_argument("--beta", required=True)
    p.add_argument("--criterion")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("transfer", help="map a design along a transform pair")
    p.add_argument("--model", required=True, help="source model JSON")
    p.add_argument("--design", required=True)
    p.add_argument(
        "--transform",
        required=True,
        help="transform JSON file, or a shortcut such as reflect:1 / swap:1,2 / shift_scale:a,c",
    )
    p.add_argument("--beta", help="source parameter vector (enables the beta map)")
    p.add_argument("--criterion", help="needed to push an IMSE weighting measure")
    p.add_argument("--inverse", action="store_true", help="apply the inverse pair")
    p.add_argument(
        "--assert-optimal",
        action="store_true",
        help="re-certify optimality on the image region (exit 2 on failure)",
    )
    p.add_argument("--out")
    p.set_defaults(fn=cmd_transfer)

    p = sub.add_parser("maximin", help="maximin-efficient invariant design")
    p.add_argument("--model", required=True)
    p.add_argument("--group", required=True, help="group JSON with generators")
    p.add_argument("--criterion")
    p.add_argument("--grid", help="slope grid lo:hi:n[:log|lin]")
    p.add_argument("--include-gamma-infinity-limit", action="store_true")
    p.add_argument("--out", help="CSV path for the efficiency curve")
    p.set_defaults(fn=cmd_maximin)

    p = sub.add_parser("reproduce", help="recompute a reference artifact")
    p.add_argument("target", choices=sorted(TARGETS))
    p.add_argument("--out", default="reports", help="output directory")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--grid", help="grid size override (table1)")
    p.add_argument("--no-render", action="store_true", help="skip PNG rendering")
    p.set_defaults(fn=cmd_reproduce)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code = args.fn(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NoConvergence as exc:
        print(f"no convergence: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OptDesignError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return code


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Every file written embeds the configuration that produced it, and all JSON
goes through one canonical writer, so rerunning a command reproduces its
outputs byte for byte.  Input paths are deliberately not part of the
embedded configuration; moving an instance file around must not change
what gets computed from it.

Exit status: 0 on success, 1 on any domain error (bad input file,
infeasible request, exhausted search), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import os
import sys

from .algorithms import make_algorithm, run_local
from .evaluation import DEFAULT_ORACLE_CAP, evaluate, objective, write_reports_csv
from .generators import TorusParams, gen_random, gen_torus
from .hypergraph import growth_factor
from .lowerbound import adversarial_lower_bound, build_adversarial_instance
from .lp import solve_maxmin
from .model import (
    assignment_from_dict,
    assignment_to_dict,
    dump_json,
    load_instance,
    load_json,
    save_instance,
)

ORACLE_CAP_ENV = "MAXMINLP_ORACLE_CAP"


def _resolve_oracle_cap(flag_value):
    # precedence: explicit flag, then environment, then the built-in default
    if flag_value is not None:
        return flag_value
    raw = os.environ.get(ORACLE_CAP_ENV)
    if raw is None:
        return DEFAULT_ORACLE_CAP
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{ORACLE_CAP_ENV} must be an integer, got {raw!r}") from None


def _describe(instance):
    return (
        f"{len(instance.agents)} agents, {len(instance.resources)} resources, "
        f"{len(instance.beneficiaries)} beneficiaries"
    )


def _cmd_gen_torus(args):
    params = TorusParams(dim=args.dim, side=args.side, perturb=args.perturb, seed=args.seed)
    instance = gen_torus(params)
    config = {
        "command": "gen-torus",
        "dim": args.dim,
        "side": args.side,
        "perturb": args.perturb,
        "seed": args.seed,
    }
    save_instance(instance, args.output, extra={"config": config})
    print(f"wrote {args.output} ({_describe(instance)})")
    return 0


def _cmd_gen_random(args):
    instance = gen_random(
        args.agents,
        args.max_support,
        coeff_range=(args.coeff_min, args.coeff_max),
        seed=args.seed,
    )
    config = {
        "command": "gen-random",
        "agents": args.agents,
        "max_support": args.max_support,
        "coeff_min": args.coeff_min,
        "coeff_max": args.coeff_max,
        "seed": args.seed,
    }
    save_instance(instance, args.output, extra={"config": config})
    print(f"wrote {args.output} ({_describe(instance)})")
    return 0


def _cmd_gen_lowerbound(args):
    instance, meta = build_adversarial_instance(
        args.d, args.D, args.r, args.R, args.seed, n_per_side=args.n_per_side
    )
    config = {
        "command": "gen-lowerbound",
        "d": args.d,
        "D": args.D,
        "r": args.r,
        "R": args.R,
        "seed": args.seed,
        "n_per_side": meta.n_per_side,
        "template_girth": meta.template.girth,
    }
    save_instance(instance, args.output, extra={"config": config})
    print(f"wrote {args.output} ({_describe(instance)})")
    print(f"template girth {meta.template.girth}, degree {meta.template.degree}")
    return 0


def _cmd_solve(args):
    instance = load_instance(args.instance)
    assignment, omega = solve_maxmin(instance)
    print(f"omega = {omega:.12g}")
    if args.output:
        payload = {"config": {"command": "solve"}, "omega": omega}
        payload.update(assignment_to_dict(assignment))
        dump_json(payload, args.output)
    return 0


def _cmd_run(args):
    instance = load_instance(args.instance)
    algorithm = make_algorithm(args.algorithm, args.radius)
    assignment = run_local(instance, algorithm)
    if instance.beneficiaries:
        print(f"{algorithm.name}: omega = {objective(instance, assignment):.12g}")
    else:
        print(f"{algorithm.name}: instance has no beneficiaries")
    if args.output:
        payload = {
            "config": {
                "command": "run",
                "algorithm": args.algorithm,
                "radius": args.radius,
            },
            "algorithm": algorithm.name,
        }
        payload.update(assignment_to_dict(assignment))
        dump_json(payload, args.output)
    return 0


def _cmd_adversary(args):
    algorithm = make_algorithm(args.algorithm, args.radius)
    report = adversarial_lower_bound(
        algorithm, args.d, args.D, args.r, args.R, args.seed, n_per_side=args.n_per_side
    )
    print(f"selected tree p = {report.p} (delta = {report.delta_max:.6g})")
    print(f"omega_alg(sub) = {report.omega_alg_sub:.12g}")
    if report.certified_ratio is None:
        print("certified ratio: unbounded (the algorithm earned nothing)")
    else:
        print(f"certified ratio >= {report.certified_ratio:.12g}")
    print(f"theoretical floor = {report.theoretical_floor:.12g}")
    if args.output:
        payload = report.to_dict()
        payload["config"] = {
            "command": "adversary",
            "algorithm": args.algorithm,
            "radius": args.radius,
            "d": args.d,
            "D": args.D,
            "r": args.r,
            "R": args.R,
            "seed": args.seed,
            "n_per_side": report.params["n_per_side"],
        }
        dump_json(payload, args.output)
    return 0


def _cmd_eval(args):
    instance = load_instance(args.instance)
    payload = load_json(args.assignment)
    assignment = assignment_from_dict(payload)
    cap = _resolve_oracle_cap(args.oracle_cap)
    report = evaluate(instance, assignment, R=args.radius, oracle_cap=cap)
    print(f"feasible = {report.feasible} (max violation {report.max_violation:.3g})")
    print("omega = " + ("undefined" if report.omega is None else f"{report.omega:.12g}"))
    if report.omega_star is not None:
        print(f"omega* = {report.omega_star:.12g}")
        shown = report.to_dict()["ratio"]
        print(f"ratio = {shown if isinstance(shown, str) else format(shown, '.12g')}")
    for note in report.notes:
        print(f"note: {note}")
    if args.output:
        out = report.to_dict()
        out["config"] = {
            "command": "eval",
            "radius": args.radius,
            "oracle_cap": cap,
        }
        dump_json(out, args.output)
    if args.csv:
        label = os.path.basename(args.instance)
        algorithm = payload.get("algorithm", "")
        write_reports_csv(args.csv, [(label, algorithm, report)])
    return 0


def _cmd_growth(args):
    instance = load_instance(args.instance)
    gamma = growth_factor(instance, args.radius)
    print(f"gamma({args.radius}) = {gamma.numerator}/{gamma.denominator}")
    if args.output:
        dump_json(
            {
                "config": {"command": "growth", "radius": args.radius},
                "gamma": {
                    "numerator": gamma.numerator,
                    "denominator": gamma.denominator,
                },
            },
            args.output,
        )
    return 0


def _add_output(p, required=False):
    p.add_argument("-o", "--output", required=required, help="output JSON path")


def _add_algorithm(p):
    p.add_argument(
        "--algorithm",
        required=True,
        choices=("zero", "safe", "local-avg"),
        help="which local rule to run",
    )
    p.add_argument(
        "--radius",
        type=int,
        default=None,
        help="averaging radius (required for local-avg)",
    )


def build_parser():
    parser = argparse.ArgumentParser(
        prog="maxminlp",
        description="Generate, solve and probe max-min resource sharing instances.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-torus", help="grid-of-cells instance on a d-dimensional torus")
    p.add_argument("--dim", type=int, required=True, help="torus dimension")
    p.add_argument("--side", type=int, required=True, help="cells per axis (at least 3)")
    p.add_argument("--perturb", action="store_true", help="draw coefficients from [1/2, 1]")
    p.add_argument("--seed", type=int, default=0)
    _add_output(p, required=True)
    p.set_defaults(func=_cmd_gen_torus)

    p = sub.add_parser("gen-random", help="seeded random instance")
    p.add_argument("--agents", type=int, required=True)
    p.add_argument("--max-support", type=int, default=3, help="largest row support")
    p.add_argument("--coeff-min", type=float, default=0.5)
    p.add_argument("--coeff-max", type=float, default=2.0)
    p.add_argument("--seed", type=int, default=0)
    _add_output(p, required=True)
    p.set_defaults(func=_cmd_gen_random)

    p = sub.add_parser(
        "gen-lowerbound",
        help="glued hypertree instance used by the adversarial pipeline",
    )
    p.add_argument("-d", type=int, required=True, help="children per packing row")
    p.add_argument("-D", type=int, required=True, help="children per benefit row")
    p.add_argument("-r", type=int, required=True, help="attack radius")
    p.add_argument("-R", type=int, required=True, help="tree parameter, must exceed r")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-per-side", type=int, default=None, help="template width override")
    _add_output(p, required=True)
    p.set_defaults(func=_cmd_gen_lowerbound)

    p = sub.add_parser("solve", help="exact optimum via the deterministic simplex")
    p.add_argument("instance", help="instance JSON path")
    _add_output(p)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("run", help="run a local algorithm over every agent")
    p.add_argument("instance", help="instance JSON path")
    _add_algorithm(p)
    _add_output(p)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("adversary", help="certify a ratio lower bound for an algorithm")
    _add_algorithm(p)
    p.add_argument("-d", type=int, required=True, help="children per packing row")
    p.add_argument("-D", type=int, required=True, help="children per benefit row")
    p.add_argument("-r", type=int, required=True, help="attack radius")
    p.add_argument("-R", type=int, required=True, help="tree parameter, must exceed r")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-per-side", type=int, default=None, help="template width override")
    _add_output(p)
    p.set_defaults(func=_cmd_adversary)

    p = sub.add_parser("eval", help="feasibility, objective and ratio for an assignment")
    p.add_argument("instance", help="instance JSON path")
    p.add_argument("assignment", help="assignment JSON path (needs a 'values' table)")
    p.add_argument("--radius", type=int, default=None, help="adds the growth certificate")
    p.add_argument(
        "--oracle-cap",
        type=int,
        default=None,
        help=f"largest instance the exact oracle accepts (env {ORACLE_CAP_ENV})",
    )
    p.add_argument("--csv", default=None, help="also write a one-row CSV report here")
    _add_output(p)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("growth", help="exact neighbourhood growth factor at a radius")
    p.add_argument("instance", help="instance JSON path")
    p.add_argument("--radius", type=int, required=True)
    _add_output(p)
    p.set_defaults(func=_cmd_growth)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, ArithmeticError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

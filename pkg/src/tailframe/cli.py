"""``tailframe`` command line: build certificates, verify properties, write demo instances.

Exit codes: 0 success, 2 invalid instance, 3 sequence not total,
4 perturbation operator not a contraction, 5 check or oracle failure.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .approximants import InfeasibleApproximation, ScheduleError
from .checks import failures, run_checks
from .demos import DEMO_NAMES, demo_instance
from .io import InstanceError, build_report, dumps, load_instance
from .numeric import NonContractionError
from .pipeline import inject_gamma_fault, run_pipeline
from .resolution import NeumannDisagreement
from .tower import TotalityError
from .weights import WeightError

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_TOTALITY = 3
EXIT_CONTRACTION = 4
EXIT_ORACLE = 5


def _tol_overrides(args) -> dict:
    return {"rank_tol": args.tol_rank, "residual_tol": args.tol_res, "neumann_tol": args.tol_neumann}


def _add_tol_flags(p):
    p.add_argument("--tol-rank", type=float, default=None, help="relative rank tolerance")
    p.add_argument("--tol-res", type=float, default=None, help="residual tolerance for identities")
    p.add_argument("--tol-neumann", type=float, default=None, help="Neumann truncation tolerance")


def _run(instance_path, args):
    inst = load_instance(instance_path, _tol_overrides(args))
    result = run_pipeline(inst.seq, inst.tol, inst.epsilon, inst.weights)
    return inst, result


def _guarded(fn, args) -> int:
    try:
        return fn(args)
    except (InstanceError, ScheduleError, WeightError) as exc:
        print(f"error: invalid instance: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except TotalityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TOTALITY
    except NonContractionError as exc:
        print(f"error: perturbation bound violated: {exc}", file=sys.stderr)
        return EXIT_CONTRACTION
    except (NeumannDisagreement, InfeasibleApproximation, ArithmeticError) as exc:
        print(f"error: oracle disagreement: {exc}", file=sys.stderr)
        return EXIT_ORACLE


def cmd_build(args) -> int:
    t0 = time.perf_counter()
    inst, result = _run(args.instance, args)
    t1 = time.perf_counter()
    seed = inst.seed if args.seed is None else args.seed
    checks = run_checks(result, samples=args.samples, seed=seed)
    t2 = time.perf_counter()
    timings = {"pipeline_s": t1 - t0, "checks_s": t2 - t1} if args.timings else None
    report = build_report(result, checks, inst.digest, seed, args.samples, timings)
    text = dumps(report)
    if args.output == "-":
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text)
    bad = failures(checks)
    cert = result.certificate
    print(
        f"tower dims {result.tower.dims}, |T| = {result.perturbation.norm:.3e} "
        f"(bound {result.perturbation.bound:.3e}), resolution residual "
        f"{result.duals.resolution_residual:.3e}, C(a) = {cert.C_a:.6e}, "
        f"eig slack {cert.eig_slack:.6e}; {len(checks) - len(bad)}/{len(checks)} checks passed",
        file=sys.stderr,
    )
    for c in bad:
        print(c.line(), file=sys.stderr)
    return EXIT_ORACLE if bad else EXIT_OK


def _parse_fault(text):
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return None, None, float(parts[0])
        if len(parts) == 3:
            return int(parts[0]), int(parts[1]), float(parts[2])
    except ValueError:
        pass
    raise argparse.ArgumentTypeError("expected DELTA or N:K:DELTA with integer N, K")


def cmd_verify(args) -> int:
    inst, result = _run(args.instance, args)
    if args.perturb_gamma is not None:
        n, k, delta = args.perturb_gamma
        try:
            result = inject_gamma_fault(result, n, k, delta)
        except (ValueError, IndexError) as exc:
            print(f"error: cannot inject fault: {exc}", file=sys.stderr)
            return EXIT_PARSE
    seed = inst.seed if args.seed is None else args.seed
    checks = run_checks(result, samples=args.samples, seed=seed)
    for c in checks:
        print(c.line())
    bad = failures(checks)
    if bad:
        print(f"{len(bad)} of {len(checks)} properties FAILED: " + ", ".join(c.name for c in bad))
        return EXIT_ORACLE
    print(f"all {len(checks)} properties passed")
    return EXIT_OK


def cmd_demo(args) -> int:
    try:
        inst = demo_instance(args.name, args.dim, args.prefix_len, args.cycle_len, args.seed, args.field)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    text = dumps(inst)
    if args.output == "-":
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text)
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tailframe", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="run the construction and write a certificate report")
    p.add_argument("instance")
    p.add_argument("-o", "--output", required=True, help="report path, or - for stdout")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=None, help="sampling seed (default: instance seed)")
    p.add_argument("--timings", action="store_true", help="record wall-clock timings in the report")
    _add_tol_flags(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("verify", help="run the property suite and print one line per property")
    p.add_argument("instance")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--perturb-gamma", type=_parse_fault, default=None, metavar="[N:K:]DELTA",
                   help="fault injection: shift stored gamma_K of z_N (default: the first "
                        "stored coefficient) by DELTA before checking")
    _add_tol_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("demo", help="write a demo instance")
    p.add_argument("name", choices=DEMO_NAMES)
    p.add_argument("-o", "--output", default="-")
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--prefix-len", type=int, default=None)
    p.add_argument("--cycle-len", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--field", choices=("real", "complex"), default="real")
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    return _guarded(args.func, args)


if __name__ == "__main__":
    sys.exit(main())

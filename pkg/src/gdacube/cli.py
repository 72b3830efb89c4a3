"""Command-line pipeline: generate, build, evaluate, solve, decode, audit.

All randomness flows from a single --seed; sub-seeds are derived through
numpy's SeedSequence, so identical invocations produce byte-identical
JSON artifacts (timings can be suppressed with --no-timings).

Exit codes: 0 ok, 2 parse error, 3 validation failure, 4 cap exceeded,
5 gradient-check mismatch, 6 audit assertion failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .decoder import AuditError, NotStationaryError, decode, dichotomy_check, lemma_audit
from .lin_vi import LinVIInstance, gen_random
from .pure_circuit import PureCircuitInstance, gen_example
from .reduction import (
    CapExceededError,
    GdaInstance,
    GdaParams,
    JointPoint,
    ValidationError,
    build_instance,
    diagnostics,
    eval_f,
    eval_grad,
    eval_grad_direct,
    finite_diff_grad,
    paper_params,
)
from .solver import SolverConfig, extragradient, grid_search, projected_gda

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_CAP = 4
EXIT_GRAD_MISMATCH = 5
EXIT_AUDIT = 6

_EPILOG = (
    "exit codes: 0 ok, 2 parse error, 3 validation failure, 4 cap exceeded, "
    "5 grad-check mismatch, 6 audit assertion failure. The grid-search "
    "evaluation cap can be overridden with the GDACUBE_EVAL_CAP variable."
)


def _dump(d: dict, path: str | None):
    blob = json.dumps(d, indent=2, sort_keys=True) + "\n"
    if path is None:
        sys.stdout.write(blob)
    else:
        Path(path).write_text(blob)


def _load(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise _ParseFailure(f"{path}: {e.msg} at line {e.lineno} column {e.colno}") from e


class _ParseFailure(Exception):
    pass


def _load_instance(path: str) -> GdaInstance:
    return GdaInstance.from_json_dict(_load(path))


def _load_point(path: str, inst: GdaInstance) -> JointPoint:
    p = JointPoint.from_json_dict(_load(path))
    if p.x.shape != (inst.d,):
        raise ValidationError([f"point has dimension {p.x.size}, instance needs {inst.d}"])
    return p


def _params_from_args(args, pc: PureCircuitInstance, vi: LinVIInstance) -> GdaParams:
    if args.paper:
        return paper_params(vi.m, pc.kappa, Fraction(args.rho if args.rho else vi.rho))
    if args.n is None or args.epsilon is None or args.delta is None:
        raise _ParseFailure("custom mode needs --n, --epsilon and --delta (or use --paper)")
    return GdaParams(n=args.n, epsilon=args.epsilon, delta=args.delta)


# ----------------------------------------------------------------- commands

def cmd_gen_pc(args) -> int:
    inst = gen_example(args.kind, args.size, args.seed)
    _dump(inst.to_json_dict(), args.out)
    return EXIT_OK


def cmd_gen_vi(args) -> int:
    inst = gen_random(args.m, args.seed, rho=args.rho)
    _dump(inst.to_json_dict(), args.out)
    return EXIT_OK


def cmd_build(args) -> int:
    pc = PureCircuitInstance.from_json_dict(_load(args.pc))
    vi = LinVIInstance.from_json_dict(_load(args.vi))
    params = _params_from_args(args, pc, vi)
    try:
        inst = build_instance(pc, vi, params)
    except CapExceededError:
        print(f"not materializable: n = {params.n}, delta = {params.delta}, "
              f"epsilon = {params.epsilon} (dimension cap exceeded)")
        raise
    _dump(inst.to_json_dict(), args.out)
    return EXIT_OK


def cmd_eval(args) -> int:
    inst = _load_instance(args.instance)
    p = _load_point(args.point, inst)
    value = eval_f(inst, p)
    print(f"f = {value!r}")
    if args.out:
        _dump({"f": value, "diagnostics": diagnostics(inst, p).to_json_dict()}, args.out)
    return EXIT_OK


def _grad_check(inst: GdaInstance, points: int, seed: int, fd_step: float) -> dict:
    rng = np.random.default_rng(seed)
    worst_dual = 0.0
    worst_fd = 0.0
    for _ in range(points):
        p = JointPoint(rng.uniform(0, 1, inst.d), rng.uniform(0, 1, inst.d))
        ga = np.concatenate(eval_grad(inst, p))
        gb = np.concatenate(eval_grad_direct(inst, p))
        scale = max(np.abs(ga).max(), np.abs(gb).max(), 1.0)
        worst_dual = max(worst_dual, float(np.abs(ga - gb).max() / scale))
        fd = np.concatenate(finite_diff_grad(inst, p, h=fd_step))
        ratio = np.abs(ga - fd) / np.maximum(1e-5 * np.abs(ga), 1e-8)
        worst_fd = max(worst_fd, float(ratio.max()))
    return {
        "points": points,
        "seed": seed,
        "max_dual_relative_error": worst_dual,
        "max_fd_tolerance_ratio": worst_fd,
        "pass": worst_dual <= 1e-12 and worst_fd <= 1.0,
    }


def cmd_grad_check(args) -> int:
    inst = _load_instance(args.instance)
    result = _grad_check(inst, args.points, args.seed, args.fd_step)
    _dump(result, args.out)
    if not result["pass"]:
        print("grad-check FAILED", file=sys.stderr)
        return EXIT_GRAD_MISMATCH
    return EXIT_OK


def _run_solver(inst, args, p0_seed: int):
    if args.method == "grid":
        if args.h is None:
            raise _ParseFailure("--h is required for the grid method")
        point, report = grid_search(inst, args.h, eps=args.eps)
        return {
            "max_violation": report.max_violation,
            "epsilon": report.epsilon,
            "pass": report.passed,
            "method": "grid",
            "iterations": 0,
            "seed": args.seed,
            "point": point.to_json_dict(),
        }, point, report
    rng = np.random.default_rng(p0_seed)
    p0 = JointPoint(rng.uniform(0, 1, inst.d), rng.uniform(0, 1, inst.d))
    cfg = SolverConfig(method=args.method, step=args.step, max_iters=args.iters,
                       restarts=args.restarts, seed=args.seed,
                       target=args.eps if args.eps is not None else 0.0)
    solve = projected_gda if args.method == "gda" else extragradient
    res = solve(inst, p0, cfg)
    return res.to_json_dict(), res.point, res.report


def cmd_solve(args) -> int:
    inst = _load_instance(args.instance)
    p0_seed = int(np.random.SeedSequence(args.seed).generate_state(1)[0])
    payload, _point, _report = _run_solver(inst, args, p0_seed)
    _dump(payload, args.out)
    return EXIT_OK


def cmd_decode(args) -> int:
    inst = _load_instance(args.instance)
    p = _load_point(args.point, inst)
    out = decode(inst, p, rho=args.rho)
    _dump(out.to_json_dict(), args.out)
    print(f"decode outcome: {out.kind}")
    return EXIT_OK


def cmd_audit(args) -> int:
    inst = _load_instance(args.instance)
    p = _load_point(args.point, inst)
    audit = lemma_audit(inst, p, args.eps, rho=args.rho)
    payload = {"lemmas": audit.to_json_dict()}
    code = EXIT_OK
    try:
        payload["dichotomy"] = dichotomy_check(inst, p, args.eps, rho=args.rho).to_json_dict()
    except AuditError as e:
        payload["dichotomy_error"] = str(e)
        code = EXIT_AUDIT
    if not audit.unconditional_hold:
        print("audit FAILED: an unconditional inequality does not hold", file=sys.stderr)
        code = EXIT_AUDIT
    _dump(payload, args.out)
    return code


def cmd_pipeline(args) -> int:
    t0 = time.perf_counter()
    pc_seed, vi_seed, p0_seed = (
        int(s) for s in np.random.SeedSequence(args.seed).generate_state(3)
    )
    pc = gen_example(args.pc_kind, args.pc_size, pc_seed)
    vi = gen_random(args.m, vi_seed, rho=args.rho)
    params = GdaParams(n=args.n, epsilon=args.epsilon, delta=args.delta)
    inst = build_instance(pc, vi, params)
    t_build = time.perf_counter()

    solver_payload, point, report = _run_solver(inst, args, p0_seed)
    t_solve = time.perf_counter()

    outcome = decode(inst, point)
    achieved = report.max_violation
    audit = lemma_audit(inst, point, achieved)
    try:
        dichotomy = dichotomy_check(inst, point, achieved).to_json_dict()
    except AuditError as e:
        dichotomy = {"error": str(e)}
    t_done = time.perf_counter()

    run_report = {
        "version": __version__,
        "seed": args.seed,
        "config": {
            "pc_kind": args.pc_kind, "pc_size": args.pc_size, "m": args.m,
            "rho": args.rho, "n": args.n, "epsilon": args.epsilon,
            "delta": args.delta, "method": args.method, "step": args.step,
            "iters": args.iters, "restarts": args.restarts, "eps": args.eps,
            "h": args.h, "seed": args.seed,
        },
        "instance": {
            "d": inst.d,
            "bounds": inst.bounds.to_json_dict(),
            "params": inst.params.to_json_dict(),
            "premises": inst.premises(),
            "pc": pc.to_json_dict(),
            "vi": vi.to_json_dict(),
        },
        "solver": solver_payload,
        "decode": outcome.to_json_dict(),
        "audit": audit.to_json_dict(),
        "dichotomy": dichotomy,
    }
    if not args.no_timings:
        run_report["timings_sec"] = {
            "build": t_build - t0,
            "solve": t_solve - t_build,
            "decode_audit": t_done - t_solve,
        }
    _dump(run_report, args.out)
    print(f"pipeline: violation {achieved!r}, decode {outcome.kind}, "
          f"audit {'ok' if audit.unconditional_hold else 'FAILED'}")
    return EXIT_OK if audit.unconditional_hold else EXIT_AUDIT


# ------------------------------------------------------------------- parser

def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="gdacube", epilog=_EPILOG,
                                  description=__doc__.splitlines()[0])
    top.add_argument("--version", action="version", version=__version__)
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-pc", help="generate a circuit instance")
    p.add_argument("--kind", choices=["ring", "purify_tree"], default="ring")
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen_pc)

    p = sub.add_parser("gen-vi", help="generate a random linear VI instance")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rho", type=float, default=0.1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen_vi)

    p = sub.add_parser("build", help="compile circuit + VI into a min-max instance")
    p.add_argument("--pc", required=True)
    p.add_argument("--vi", required=True)
    p.add_argument("--paper", action="store_true",
                   help="use the exact hardness-scale parameter formulas")
    p.add_argument("--rho", help="rho for --paper (rational, e.g. 1/2); defaults to the VI's")
    p.add_argument("--n", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("eval", help="evaluate the objective and diagnostics at a point")
    p.add_argument("--instance", required=True)
    p.add_argument("--point", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("grad-check", help="dual-path and finite-difference gradient check")
    p.add_argument("--instance", required=True)
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fd-step", type=float, default=1e-6)
    p.add_argument("--out")
    p.set_defaults(func=cmd_grad_check)

    p = sub.add_parser("solve", help="search for an approximately stationary point")
    p.add_argument("--instance", required=True)
    p.add_argument("--method", choices=["gda", "extragradient", "grid"],
                   default="extragradient")
    p.add_argument("--step", type=float)
    p.add_argument("--iters", type=int, default=1000)
    p.add_argument("--restarts", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eps", type=float, help="target violation (stop early when reached)")
    p.add_argument("--h", type=float, help="grid spacing for the grid method")
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("decode", help="map a point to a witness or assignment")
    p.add_argument("--instance", required=True)
    p.add_argument("--point", required=True)
    p.add_argument("--rho", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("audit", help="evaluate the decoding inequalities at a point")
    p.add_argument("--instance", required=True)
    p.add_argument("--point", required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--rho", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("pipeline", help="build, solve, decode and audit in one run")
    p.add_argument("--pc-kind", choices=["ring", "purify_tree"], default="ring")
    p.add_argument("--pc-size", type=int, default=4)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--rho", type=float, default=0.1)
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--epsilon", type=float, default=1e-3)
    p.add_argument("--delta", type=float, default=0.5)
    p.add_argument("--method", choices=["gda", "extragradient", "grid"],
                   default="extragradient")
    p.add_argument("--step", type=float, default=0.05)
    p.add_argument("--iters", type=int, default=2000)
    p.add_argument("--restarts", type=int, default=2)
    p.add_argument("--eps", type=float)
    p.add_argument("--h", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-timings", action="store_true",
                   help="omit wall-clock timings for byte-identical reports")
    p.add_argument("--out")
    p.set_defaults(func=cmd_pipeline)

    return top


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _ParseFailure as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except FileNotFoundError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except CapExceededError as e:
        print(f"cap exceeded: {e}", file=sys.stderr)
        return EXIT_CAP
    except NotStationaryError as e:
        print(f"validation failure: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except AuditError as e:
        print(f"audit assertion failure: {e}", file=sys.stderr)
        return EXIT_AUDIT
    except (ValidationError, ValueError) as e:
        print(f"validation failure: {e}", file=sys.stderr)
        return EXIT_VALIDATION


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()

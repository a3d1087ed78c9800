"""Command-line entry point: generate, solve, bench, transform, bounds."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import bench
from .core import estimate_spectral, load_problem_document, save_problem
from .errors import LFError
from .mps import read_mps
from .problems import GeneratorSpec, generate_random, load_optimum_file, lp_to_lf
from .solvers import HaltingRule, Method, SolverConfig, run

log = logging.getLogger("askm")


def _solver_flags(p, bench_mode=False):
    """Flags shared by solve, bench and bounds. Defaults are None so a bench config can fill them."""
    p.add_argument("--method", choices=[m.value for m in Method], action="append" if bench_mode else None)
    p.add_argument("--beta", type=int)
    p.add_argument("--delta", type=float)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--d", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--halting", choices=["residual", "relmax", "time", "homogeneous"])
    p.add_argument("--relative", action="store_true", default=None,
                   help="homogeneous rule: divide ||Ax|| by ||Ax0||")
    p.add_argument("--max-iters", dest="max_iterations", type=int)
    p.add_argument("--time-cap", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--log-stride", type=int)
    p.add_argument("--select-at", choices=["x", "y"])
    p.add_argument("--x0", choices=["zeros", "far"])
    p.add_argument("--x0-scale", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="askm", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a random problem JSON (with its witness)")
    g.add_argument("--kind", choices=["correlated", "gaussian"], default="correlated")
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)

    s = sub.add_parser("solve", help="single run; trace CSV to --out or stdout")
    s.add_argument("problem")
    _solver_flags(s)
    s.add_argument("--out")

    b = sub.add_parser("bench", help="multi-trial experiment")
    b.add_argument("--config", help="experiment JSON; command-line flags override it")
    b.add_argument("--problem", help="problem JSON path")
    b.add_argument("--kind", choices=["correlated", "gaussian"])
    b.add_argument("--m", type=int)
    b.add_argument("--n", type=int)
    b.add_argument("--problem-seed", type=int)
    b.add_argument("--beta-sweep", help="comma-separated beta values")
    b.add_argument("--trials", type=int)
    b.add_argument("--jobs", type=int)
    b.add_argument("--base-seed", type=int)
    _solver_flags(b, bench_mode=True)
    b.add_argument("--out", help="output directory")

    t = sub.add_parser("transform", help="MPS file to LF problem JSON")
    t.add_argument("mps")
    grp = t.add_mutually_exclusive_group(required=True)
    grp.add_argument("--p-star", type=float)
    grp.add_argument("--optimum-file")
    t.add_argument("--name", help="key in the optimum file (default: the MPS NAME)")
    t.add_argument("--out", required=True)

    o = sub.add_parser("bounds", help="accelerated-method bound curves as CSV")
    o.add_argument("problem")
    _solver_flags(o)
    o.add_argument("--k-max", type=int, default=100)
    o.add_argument("--xstar", choices=["witness", "reference"], default="reference",
                   help="surrogate limit point: the stored witness or a long reference run")
    o.add_argument("--reference-iters", type=int, default=1_000_000)
    o.add_argument("--out")
    return parser


def _config(args, beta_required=True) -> SolverConfig:
    if args.beta is None and beta_required:
        raise LFError("--beta is required")
    rules = bench.halting_rules(args.halting or "residual",
                                1e-5 if args.epsilon is None else args.epsilon,
                                args.time_cap, bool(args.relative))
    kw = {k: getattr(args, k) for k in ("delta", "lam", "d", "max_iterations", "seed",
                                         "log_stride", "select_at")
          if getattr(args, k) is not None}
    return SolverConfig(beta=args.beta, halting=rules, **kw)


def _x0(problem, doc, args):
    witness = doc.get("witness")
    policy = args.x0 or ("far" if witness is not None else "zeros")
    w = None if witness is None else np.asarray(witness, dtype=float)
    scale = 10.0 if args.x0_scale is None else args.x0_scale
    seed = 0 if args.seed is None else args.seed
    return bench.start_point(problem, w, policy, scale, seed)


def _open_out(path):
    if path is None or path == "-":
        return sys.stdout
    return open(path, "w", newline="", encoding="utf-8")


def cmd_generate(args):
    spec = GeneratorSpec(args.kind, args.m, args.n, args.seed)
    problem, witness = generate_random(spec)
    save_problem(problem, args.out, witness=witness, generator={"kind": spec.kind.value,
                 "m": spec.m, "n": spec.n, "seed": spec.seed})
    print(f"wrote {problem.m}x{problem.n} problem to {args.out}", file=sys.stderr)


def cmd_solve(args):
    problem, doc = load_problem_document(args.problem)
    method = Method(args.method or "skm")
    config = _config(args)
    constants = estimate_spectral(problem) if method is Method.ASKM else None
    report = run(problem, _x0(problem, doc, args), config, method, constants)
    fh = _open_out(args.out)
    try:
        bench.write_csv(fh, bench.TRACE_COLUMNS, report.trace)
    finally:
        if fh is not sys.stdout:
            fh.close()
    print(f"{report.halting_reason}: k={report.final_k} seconds={report.total_seconds:.6g}",
          file=sys.stderr)


def cmd_bench(args):
    doc = json.loads(Path(args.config).read_text()) if args.config else {}
    if args.problem:
        doc["problem"] = {"path": args.problem}
    elif args.kind or args.m or args.n:
        src = dict(doc.get("problem") or {})
        src.pop("path", None)
        for key, val in (("kind", args.kind), ("m", args.m), ("n", args.n), ("seed", args.problem_seed)):
            if val is not None:
                src[key] = val
        doc["problem"] = src
    if "problem" not in doc:
        raise LFError("bench needs --problem, --kind/--m/--n, or a config with 'problem'")
    overrides = {"trials": args.trials, "jobs": args.jobs, "base_seed": args.base_seed,
                 "outputs": args.out, "x0": args.x0, "x0_scale": args.x0_scale}
    doc.update({k: v for k, v in overrides.items() if v is not None})
    if args.beta_sweep:
        doc["beta_sweep"] = [int(v) for v in args.beta_sweep.split(",")]
    solver = {"beta": args.beta, "delta": args.delta, "lam": args.lam, "d": args.d,
              "epsilon": args.epsilon, "halting": args.halting, "relative": args.relative,
              "max_iterations": args.max_iterations, "time_cap": args.time_cap,
              "seed": args.seed, "log_stride": args.log_stride, "select_at": args.select_at}
    solver = {k: v for k, v in solver.items() if v is not None}
    if args.method:
        doc["methods"] = [{"method": m} for m in args.method]
    methods = doc.get("methods") or [{"method": "skm"}, {"method": "askm"}]
    doc["methods"] = [{**m, **solver} for m in methods]
    if doc.get("beta_sweep"):
        for m in doc["methods"]:
            m.setdefault("beta", doc["beta_sweep"][0])
    spec = bench.spec_from_dict(doc)
    result = bench.run_experiment(spec)
    bench.write_csv(sys.stdout, bench.SUMMARY_COLUMNS, result.summary)


def cmd_transform(args):
    p_star = args.p_star
    lp = read_mps(args.mps)
    if args.optimum_file:
        table = load_optimum_file(args.optimum_file)
        key = args.name or lp.name
        if key not in table:
            raise LFError(f"no optimum for {key!r} in {args.optimum_file}")
        p_star = table[key]
    problem = lp_to_lf(lp.with_optimum(p_star))
    save_problem(problem, args.out, p_star=p_star, m_lp=lp.m_lp, n_lp=lp.n)
    print(f"wrote {problem.m}x{problem.n} problem to {args.out}", file=sys.stderr)


def cmd_bounds(args):
    problem, doc = load_problem_document(args.problem)
    config = _config(args)
    constants = estimate_spectral(problem)
    config.validate(problem.m, Method.ASKM, constants)
    x0 = _x0(problem, doc, args)
    if args.xstar == "witness":
        if "witness" not in doc:
            raise LFError("problem file has no witness; use --xstar reference")
        xstar = np.asarray(doc["witness"], dtype=float)
    else:
        ref = SolverConfig(beta=config.beta, lam=config.lam, d=config.d,
                           max_iterations=args.reference_iters, seed=config.seed,
                           halting=(HaltingRule.residual(1e-13),), log_stride=1000)
        xstar = run(problem, x0, ref, Method.ASKM, constants).x
    rows, note = bench.emit_bound_overlay(problem, config, constants, xstar, x0, args.k_max)
    if note:
        print(f"note: {note}", file=sys.stderr)
    fh = _open_out(args.out)
    try:
        bench.write_csv(fh, bench.BOUND_COLUMNS, rows)
    finally:
        if fh is not sys.stdout:
            fh.close()


COMMANDS = {"generate": cmd_generate, "solve": cmd_solve, "bench": cmd_bench,
            "transform": cmd_transform, "bounds": cmd_bounds}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except (LFError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"askm {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Residual and fraction-of-satisfied-constraints traces for SKM and ASKM at one sample size.

Writes one CSV per method with columns k, wall_seconds, residual_norm, fsc,
max_violation, logged every iteration, for plotting residual or FSC against
iterations or time.
"""

import argparse
from pathlib import Path

from askm import GeneratorSpec, HaltingRule, SolverConfig, estimate_spectral, far_start, generate_random, run
from askm.bench import TRACE_COLUMNS, write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kind", choices=["correlated", "gaussian"], default="gaussian")
    ap.add_argument("--m", type=int, default=2000)
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--beta", type=int, default=50)
    ap.add_argument("--iters", type=int, default=5000)
    ap.add_argument("--epsilon", type=float, default=1e-12)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="results/traces")
    args = ap.parse_args()

    problem, witness = generate_random(GeneratorSpec(args.kind, args.m, args.n, args.seed))
    constants = estimate_spectral(problem)
    x0 = far_start(problem, witness, seed=args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for method in ("skm", "askm"):
        cfg = SolverConfig(beta=args.beta, max_iterations=args.iters, seed=args.seed, log_stride=1,
                           halting=(HaltingRule.residual(args.epsilon),))
        rep = run(problem, x0, cfg, method, constants)
        path = out / f"{method}_beta{args.beta}.csv"
        write_csv(path, TRACE_COLUMNS, rep.trace)
        print(f"{method}: {rep.halting_reason} after {rep.final_k} iterations, {rep.total_seconds:.3f}s -> {path}")


if __name__ == "__main__":
    main()

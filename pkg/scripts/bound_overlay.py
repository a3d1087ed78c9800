"""Empirical ASKM error next to the theoretical bound curves.

The limit point is approximated by a long reference run. The output CSV has
columns k, mean_sq_error, bound_v, bound_x, lambda_zero_limit, where
mean_sq_error averages ||x_k - x*||^2 over trials.
"""

import argparse

import numpy as np

from askm import GeneratorSpec, HaltingRule, SolverConfig, askm_step, estimate_spectral, generate_random
from askm import init_state, make_rng, run
from askm.bench import emit_bound_overlay, write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kind", choices=["correlated", "gaussian"], default="gaussian")
    ap.add_argument("--m", type=int, default=200)
    ap.add_argument("--n", type=int, default=20)
    ap.add_argument("--beta", type=int, default=10)
    ap.add_argument("--lambda", dest="lam", type=float, default=None)
    ap.add_argument("--k-max", type=int, default=200)
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="results/bound_overlay.csv")
    args = ap.parse_args()

    problem, _ = generate_random(GeneratorSpec(args.kind, args.m, args.n, args.seed))
    constants = estimate_spectral(problem)
    x0 = np.zeros(problem.n)
    ref = SolverConfig(beta=args.beta, lam=args.lam, max_iterations=10**6, log_stride=100,
                       halting=(HaltingRule.residual(1e-13),))
    xstar = run(problem, x0, ref, "askm", constants, rng=make_rng(args.seed, 10**6)).x

    cfg = SolverConfig(beta=args.beta, lam=args.lam)
    err = np.zeros(args.k_max + 1)
    for t in range(args.trials):
        state = init_state(problem, x0, cfg, "askm", constants, rng=make_rng(args.seed, t))
        err[0] += np.sum((state.x - xstar) ** 2)
        for k in range(1, args.k_max + 1):
            askm_step(problem, state, cfg, constants)
            err[k] += np.sum((state.x - xstar) ** 2)
    err /= args.trials

    rows, note = emit_bound_overlay(problem, cfg, constants, xstar, x0, args.k_max)
    if note:
        print("note:", note)
    write_csv(args.out, ("k", "mean_sq_error", "bound_v", "bound_x", "lambda_zero_limit"),
              [(k, float(e), bv, bx, lim) for (k, bv, bx, lim), e in zip(rows, err)])
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()

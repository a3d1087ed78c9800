"""Average time and iterations to reach a residual threshold across sample sizes.

Example:
    python3 scripts/beta_sweep.py --kind correlated --m 2000 --n 100 \
        --betas 10,50,200,1000,2000 --trials 10 --out results/sweep
"""

import argparse

from askm import GeneratorSpec, HaltingRule, SolverConfig
from askm.bench import ExperimentSpec, SUMMARY_COLUMNS, run_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--kind", choices=["correlated", "gaussian"], default="correlated")
    ap.add_argument("--m", type=int, default=2000)
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--problem-seed", type=int, default=0)
    ap.add_argument("--betas", default="10,50,2000")
    ap.add_argument("--epsilon", type=float, default=1e-5)
    ap.add_argument("--time-cap", type=float, default=1000.0)
    ap.add_argument("--trials", type=int, default=10)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="results/beta_sweep")
    args = ap.parse_args()

    cfg = SolverConfig(beta=1, halting=(HaltingRule.residual(args.epsilon), HaltingRule.time_limit(args.time_cap)))
    spec = ExperimentSpec(
        problem_source=GeneratorSpec(args.kind, args.m, args.n, args.problem_seed),
        methods=[("skm", cfg), ("askm", cfg)],
        trials=args.trials,
        beta_sweep=[int(b) for b in args.betas.split(",")],
        outputs=args.out,
        base_seed=args.seed,
        jobs=args.jobs,
    )
    result = run_experiment(spec)
    print(",".join(SUMMARY_COLUMNS))
    for row in result.summary:
        print(",".join(str(v) for v in row))


if __name__ == "__main__":
    main()

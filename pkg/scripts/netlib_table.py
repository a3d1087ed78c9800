"""Run SKM and ASKM on LP instances converted to feasibility problems.

Each MPS file is transformed with its optimum value from a JSON
``{name: p_star}`` file. Runs halt when max(Ax-b) has shrunk by the factor
``--epsilon`` relative to the start, or at the time cap. One CSV row per
(instance, method) goes to stdout.

Example:
    python3 scripts/netlib_table.py lp_adlittle.mps lp_afiro.mps --optimum-file optima.json
"""

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from askm import HaltingRule, SolverConfig, estimate_spectral, lp_to_lf, read_mps, run
from askm.problems import load_optimum_file


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("mps", nargs="+")
    ap.add_argument("--optimum-file", required=True)
    ap.add_argument("--beta-fraction", type=float, default=0.5, help="beta as a fraction of the row count")
    ap.add_argument("--epsilon", type=float, default=1e-2)
    ap.add_argument("--time-cap", type=float, default=1000.0)
    ap.add_argument("--trials", type=int, default=10)
    args = ap.parse_args()

    optima = load_optimum_file(args.optimum_file)
    writer = csv.writer(sys.stdout, lineterminator="\r\n")
    writer.writerow(["instance", "m", "n", "method", "beta", "mean_seconds", "mean_iters", "halting_reason"])
    for path in args.mps:
        lp = read_mps(path)
        key = lp.name if lp.name in optima else Path(path).stem
        problem = lp_to_lf(lp.with_optimum(optima[key]))
        constants = estimate_spectral(problem)
        beta = max(1, int(args.beta_fraction * problem.m))
        x0 = np.zeros(problem.n)
        for method in ("skm", "askm"):
            reps = []
            for t in range(args.trials):
                cfg = SolverConfig(beta=beta, seed=t, max_iterations=10**8,
                                   halting=(HaltingRule.relmax(args.epsilon), HaltingRule.time_limit(args.time_cap)))
                reps.append(run(problem, x0, cfg, method, constants))
            writer.writerow([key, problem.m, problem.n, method, beta,
                             repr(float(np.mean([r.total_seconds for r in reps]))),
                             repr(float(np.mean([r.final_k for r in reps]))), reps[0].halting_reason])


if __name__ == "__main__":
    main()

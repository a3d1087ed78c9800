"""Find a separating hyperplane for labeled data with SKM and ASKM.

Reads a headered CSV, builds the homogeneous system -y_i (x_i, 1) w <= 0 and
runs both methods until ||Aw|| / ||Aw_0|| falls below ``--epsilon`` (the rule
for non-separable data), every point is classified correctly, or the time
cap fires. Reports iterations, time and the fraction of points classified
correctly.
"""

import argparse

import numpy as np

from askm import HaltingRule, SolverConfig, estimate_spectral, labeled_data_to_homogeneous, positive_residual, run
from askm.problems import load_labeled_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("csv")
    ap.add_argument("--label-column", default="-1")
    ap.add_argument("--positive", default=None)
    ap.add_argument("--beta", type=int, default=50)
    ap.add_argument("--epsilon", type=float, default=1e-3)
    ap.add_argument("--time-cap", type=float, default=60.0)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    col = int(args.label_column) if args.label_column.lstrip("-").isdigit() else args.label_column
    X, y = load_labeled_csv(args.csv, label_column=col, positive=args.positive)
    X = (X - X.mean(axis=0)) / np.where(X.std(axis=0) > 0, X.std(axis=0), 1.0)
    problem = labeled_data_to_homogeneous(X, y, augment_bias=True)
    constants = estimate_spectral(problem)
    w0 = np.random.default_rng(args.seed).standard_normal(problem.n)
    for method in ("skm", "askm"):
        cfg = SolverConfig(beta=min(args.beta, problem.m), seed=args.seed, max_iterations=10**8,
                           halting=(HaltingRule.homogeneous(args.epsilon, relative=True),
                                    HaltingRule.residual(1e-300),
                                    HaltingRule.time_limit(args.time_cap)))
        rep = run(problem, w0, cfg, method, constants)
        fsc = positive_residual(problem, rep.x).fsc
        print(f"{method}: {rep.halting_reason} k={rep.final_k} seconds={rep.total_seconds:.3f} fsc={fsc:.4f}")


if __name__ == "__main__":
    main()

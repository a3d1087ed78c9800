"""Multi-trial experiment runner and CSV writers."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .core import LFProblem, SpectralConstants, estimate_spectral, load_problem_document, weighted_norm_sq
from .errors import DegenerateLambda
from .problems import GeneratorSpec, far_start, generate_random
from .sampling import make_rng
from .solvers import HaltingRule, Method, RunReport, SolverConfig, run
from .theory import ConvergenceBound, bound_v_only, lambda_zero_limit_bound, theorem1_bounds

TRACE_COLUMNS = RunReport.TRACE_COLUMNS
SUMMARY_COLUMNS = ("method", "beta", "trials", "mean_seconds", "sd_seconds", "mean_iters",
                   "sd_iters", "halting_reason_mode")
BOUND_COLUMNS = ("k", "bound_v", "bound_x", "lambda_zero_limit")


def format_value(v) -> str:
    """Locale-free text for a CSV cell; floats round-trip through ``float()``."""
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path_or_buf, header, rows) -> None:
    """RFC 4180 CSV (CRLF line ends, minimal quoting) with a header row."""
    def dump(fh):
        writer = csv.writer(fh, lineterminator="\r\n", quoting=csv.QUOTE_MINIMAL)
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(v) for v in row])

    if isinstance(path_or_buf, io.TextIOBase):
        dump(path_or_buf)
    else:
        with open(path_or_buf, "w", newline="", encoding="utf-8") as fh:
            dump(fh)


def read_csv(path) -> tuple[list, list]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh, strict=True))
    return rows[0], rows[1:]


@dataclass
class ExperimentSpec:
    problem_source: Union[GeneratorSpec, str, Path]
    methods: list  # [(method, SolverConfig), ...]
    trials: int = 10
    beta_sweep: Optional[list] = None
    outputs: Union[str, Path] = "results"
    base_seed: int = 0
    x0: str = "far"  # "far" (needs a witness) or "zeros"
    x0_scale: float = 10.0
    jobs: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        self.methods = [(Method(meth), cfg) for meth, cfg in self.methods]
        if not self.methods:
            raise ValueError("no methods given")
        if self.x0 not in ("far", "zeros"):
            raise ValueError(f"unknown x0 policy {self.x0!r}")

    def cells(self):
        """(method, config) per output row, in spec order with the beta sweep innermost."""
        for meth, cfg in self.methods:
            for beta in (self.beta_sweep or [cfg.beta]):
                yield meth, dataclasses.replace(cfg, beta=int(beta))


def load_source(source):
    """Return ``(problem, witness or None)``."""
    if isinstance(source, GeneratorSpec):
        return generate_random(source)
    problem, doc = load_problem_document(source)
    w = doc.get("witness")
    return problem, (None if w is None else np.asarray(w, dtype=float))


def start_point(problem: LFProblem, witness, policy: str, scale: float, seed: int) -> np.ndarray:
    if policy == "zeros":
        return np.zeros(problem.n)
    if witness is None:
        raise ValueError("x0 policy 'far' needs a witness; use x0='zeros' for files without one")
    return far_start(problem, witness, scale=scale, seed=seed)


def _trial(args):
    problem, x0, config, method, constants, base_seed, trial = args
    return run(problem, x0, config, method, constants, rng=make_rng(base_seed, trial))


@dataclass
class ExperimentResult:
    reports: list  # [cell][trial] -> RunReport
    summary: list = field(default_factory=list)
    constants: Optional[SpectralConstants] = None


def summarize(method, beta, reports) -> tuple:
    secs = [r.total_seconds for r in reports]
    iters = [r.final_k for r in reports]
    sd = statistics.stdev if len(reports) > 1 else (lambda _: 0.0)
    return (method, beta, len(reports), statistics.fmean(secs), float(sd(secs)),
            statistics.fmean(iters), float(sd(iters)),
            statistics.mode(r.halting_reason for r in reports))


def trace_name(cell: int, method, beta: int, trial: int) -> str:
    return f"{cell:02d}_{Method(method).value}_beta{beta}_trial{trial:03d}.csv"


def run_experiment(spec: ExperimentSpec, write: bool = True) -> ExperimentResult:
    """Run every (method, beta) cell for ``spec.trials`` trials.

    Trial ``t`` of every cell draws samples from the stream ``(base_seed, t)``,
    so cells are compared under common random numbers. Files are written by
    this process only, after all trials finish.
    """
    problem, witness = load_source(spec.problem_source)
    x0 = start_point(problem, witness, spec.x0, spec.x0_scale, spec.base_seed)
    cells = list(spec.cells())
    constants = None
    if any(meth is Method.ASKM for meth, _ in cells):
        constants = estimate_spectral(problem, "exact-svd")
    for meth, cfg in cells:
        cfg.validate(problem.m, meth, constants)

    tasks = [(problem, x0, cfg, meth, constants, spec.base_seed, t)
             for meth, cfg in cells for t in range(spec.trials)]
    if spec.jobs > 1:
        with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            flat = list(pool.map(_trial, tasks))
    else:
        flat = [_trial(t) for t in tasks]
    reports = [flat[i * spec.trials:(i + 1) * spec.trials] for i in range(len(cells))]
    summary = [summarize(meth.value, cfg.beta, reps) for (meth, cfg), reps in zip(cells, reports)]
    result = ExperimentResult(reports, summary, constants)
    if write:
        write_experiment(spec, cells, result)
    return result


def write_experiment(spec: ExperimentSpec, cells, result: ExperimentResult) -> None:
    out = Path(spec.outputs)
    (out / "traces").mkdir(parents=True, exist_ok=True)
    for c, ((meth, cfg), reps) in enumerate(zip(cells, result.reports)):
        for t, rep in enumerate(reps):
            write_csv(out / "traces" / trace_name(c, meth, cfg.beta, t), TRACE_COLUMNS, rep.trace)
    write_csv(out / "summary.csv", SUMMARY_COLUMNS, result.summary)
    (out / "experiment.json").write_text(json.dumps(spec_to_dict(spec), indent=2, sort_keys=True))


# -- JSON config -------------------------------------------------------------

def halting_rules(kind="residual", epsilon=1e-5, time_cap=None, relative=False) -> tuple:
    """Build the rule tuple behind the ``--halting``/``--epsilon``/``--time-cap`` flags."""
    rules = []
    if kind == "residual":
        rules.append(HaltingRule.residual(epsilon))
    elif kind == "relmax":
        rules.append(HaltingRule.relmax(epsilon))
    elif kind == "homogeneous":
        rules.append(HaltingRule.homogeneous(epsilon, relative=relative))
    elif kind != "time":
        raise ValueError(f"unknown halting kind {kind!r}")
    if time_cap is not None:
        rules.append(HaltingRule.time_limit(time_cap))
    if not rules:
        raise ValueError("halting 'time' needs --time-cap")
    return tuple(rules)


CONFIG_KEYS = {"beta", "delta", "lam", "d", "max_iterations", "seed", "select_at", "log_stride"}


def config_from_dict(doc: dict, defaults: dict) -> tuple:
    merged = {**defaults, **doc}
    method = Method(merged.pop("method", "skm"))
    rules = halting_rules(merged.get("halting", "residual"), merged.get("epsilon", 1e-5),
                          merged.get("time_cap"), merged.get("relative", False))
    kwargs = {k: merged[k] for k in CONFIG_KEYS if merged.get(k) is not None}
    if "beta" not in kwargs:
        raise ValueError("every method needs a beta")
    return method, SolverConfig(halting=rules, **kwargs)


def spec_from_dict(doc: dict) -> ExperimentSpec:
    """Build an :class:`ExperimentSpec` from a JSON config document.

    Top-level solver keys (``epsilon``, ``halting``, ``time_cap``,
    ``max_iterations``, ``log_stride``, ...) are defaults for every entry of
    ``methods``.
    """
    src = doc["problem"]
    if isinstance(src, dict) and "path" not in src:
        source = GeneratorSpec(**src)
    else:
        source = src["path"] if isinstance(src, dict) else src
    defaults = {k: doc[k] for k in ("epsilon", "halting", "time_cap", "relative", *CONFIG_KEYS)
                if k in doc}
    methods = [config_from_dict(dict(m), defaults) for m in doc["methods"]]
    return ExperimentSpec(
        problem_source=source,
        methods=methods,
        trials=int(doc.get("trials", 10)),
        beta_sweep=doc.get("beta_sweep"),
        outputs=doc.get("outputs", "results"),
        base_seed=int(doc.get("base_seed", 0)),
        x0=doc.get("x0", "far"),
        x0_scale=float(doc.get("x0_scale", 10.0)),
        jobs=int(doc.get("jobs", 1)),
    )


def spec_to_dict(spec: ExperimentSpec) -> dict:
    src = spec.problem_source
    if isinstance(src, GeneratorSpec):
        problem = {"kind": src.kind.value, "m": src.m, "n": src.n, "seed": src.seed}
    else:
        problem = {"path": str(src)}
    methods = []
    for meth, cfg in spec.methods:
        entry = {"method": meth.value}
        entry.update({k: getattr(cfg, k) for k in sorted(CONFIG_KEYS)})
        entry["halting"] = [{"kind": r.kind.value, "threshold": r.threshold,
                             "time_cap": r.time_cap, "relative": r.relative} for r in cfg.halting]
        methods.append(entry)
    return {"problem": problem, "methods": methods, "trials": spec.trials,
            "beta_sweep": spec.beta_sweep, "outputs": str(spec.outputs),
            "base_seed": spec.base_seed, "x0": spec.x0, "x0_scale": spec.x0_scale,
            "jobs": spec.jobs}


# -- bound overlay -----------------------------------------------------------

def emit_bound_overlay(problem: LFProblem, config: SolverConfig, constants: SpectralConstants,
                       surrogate_xstar, x0, k_max: int):
    """Rows ``(k, bound_v, bound_x, lambda_zero_limit)`` for ``k = 0..k_max``.

    ``r0^2`` is the ``(A^T A)^+``-weighted distance from ``x0`` to the
    surrogate limit point, so the curves are indicative rather than certified.
    Returns ``(rows, note)``; ``note`` explains an empty ``bound_x`` column
    (lambda = 0) and is ``None`` otherwise.
    """
    r0_sq = weighted_norm_sq(problem, np.asarray(x0, dtype=float) - np.asarray(surrogate_xstar, dtype=float))
    lam = config.resolved_lambda(constants)
    bound = ConvergenceBound(lam, config.beta, constants.zeta, problem.m, r0_sq)
    rows, note = [], None
    for k in range(k_max + 1):
        limit = lambda_zero_limit_bound(r0_sq, problem.m, config.beta, constants.zeta, k)
        try:
            bv, bx = theorem1_bounds(bound, k)
        except DegenerateLambda as exc:
            bv, bx, note = bound_v_only(bound, k), None, str(exc)
        rows.append((k, bv, bx, limit))
    return rows, note

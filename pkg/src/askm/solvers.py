"""Sampling Kaczmarz-Motzkin (SKM) and its accelerated variant (ASKM).

``skm_step`` and ``askm_step`` advance a :class:`SolverState` by one
iteration; :func:`run` wraps them in a loop with halting rules and a strided
residual trace.
"""

from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import LFProblem, SpectralConstants, positive_residual
from .errors import PreconditionViolated
from .sampling import RowSampler, make_rng, select_max_violation
from .theory import AskmSchedule, ScheduleConstants, advance_gamma


class Method(str, enum.Enum):
    SKM = "skm"
    ASKM = "askm"


TIME_CAP_REASON = "time_cap"


class HaltKind(str, enum.Enum):
    RESIDUAL = "residual_norm_leq"
    RELMAX = "relative_max_violation_leq"
    TIME = "max_time_seconds"
    HOMOGENEOUS = "residual_norm_of_homogeneous"


@dataclass(frozen=True)
class HaltingRule:
    """One stopping test; several rules compose and the first to fire wins.

    ``RESIDUAL``: ``||(Ax-b)^+|| <= threshold``.
    ``RELMAX``: ``max(Ax-b) / max(Ax0-b) <= threshold``.
    ``TIME``: solver time reaches ``time_cap`` seconds.
    ``HOMOGENEOUS``: ``||Ax|| <= threshold`` (divided by ``||Ax0||`` when ``relative``).
    """

    kind: HaltKind
    threshold: Optional[float] = None
    time_cap: Optional[float] = None
    relative: bool = False

    def __post_init__(self):
        object.__setattr__(self, "kind", HaltKind(self.kind))
        if self.kind is HaltKind.TIME:
            if self.time_cap is None or not self.time_cap > 0:
                raise ValueError("time rule needs a positive time_cap")
        elif self.threshold is None or not self.threshold > 0:
            raise ValueError(f"{self.kind.value} needs a positive threshold")

    @classmethod
    def residual(cls, eps):
        return cls(HaltKind.RESIDUAL, threshold=eps)

    @classmethod
    def relmax(cls, eps):
        return cls(HaltKind.RELMAX, threshold=eps)

    @classmethod
    def time_limit(cls, seconds):
        return cls(HaltKind.TIME, time_cap=seconds)

    @classmethod
    def homogeneous(cls, eps, relative=False):
        return cls(HaltKind.HOMOGENEOUS, threshold=eps, relative=relative)


@dataclass
class SolverConfig:
    beta: int
    delta: float = 1.0
    lam: Optional[float] = None  # ASKM; None means lambda_min
    d: Optional[float] = None  # ASKM; None means beta
    max_iterations: int = 1_000_000
    halting: tuple = (HaltingRule.residual(1e-5),)
    seed: int = 0
    select_at: str = "y"
    log_stride: int = 10
    check_schedule: bool = False

    def validate(self, m: int, method: Method, constants: Optional[SpectralConstants] = None):
        method = Method(method)
        if not 1 <= self.beta <= m:
            raise PreconditionViolated(f"beta={self.beta} outside [1, {m}]")
        if not 0 < self.delta <= 2:
            raise PreconditionViolated(f"delta={self.delta} outside (0, 2]")
        if self.max_iterations < 0:
            raise PreconditionViolated("max_iterations must be >= 0")
        if self.log_stride < 1:
            raise PreconditionViolated("log_stride must be >= 1")
        if self.select_at not in ("x", "y"):
            raise PreconditionViolated(f"select_at must be 'x' or 'y', got {self.select_at!r}")
        if method is Method.ASKM:
            if constants is None:
                raise PreconditionViolated("ASKM needs spectral constants")
            lam = self.resolved_lambda(constants)
            if not 0 <= lam <= constants.lambda_min * (1 + 1e-12):
                raise PreconditionViolated(f"lambda={lam} outside [0, lambda_min={constants.lambda_min}]")
            if self.resolved_d() < self.beta:
                raise PreconditionViolated(f"d={self.d} must be >= beta={self.beta}")
            if not m * m > constants.zeta * lam * self.beta:
                raise PreconditionViolated("m^2 <= zeta*lambda*beta")

    def resolved_lambda(self, constants: SpectralConstants) -> float:
        return constants.lambda_min if self.lam is None else float(self.lam)

    def resolved_d(self) -> float:
        return float(self.beta) if self.d is None else float(self.d)


@dataclass
class SolverState:
    x: np.ndarray
    v: Optional[np.ndarray] = None
    y: Optional[np.ndarray] = None
    k: int = 0
    schedule: Optional[AskmSchedule] = None
    rng: Optional[np.random.Generator] = None
    sampler: Optional[RowSampler] = None
    last_selection: Optional[tuple] = None  # (row index, violation used in the update)


def init_state(problem: LFProblem, x0, config: SolverConfig, method,
               constants: Optional[SpectralConstants] = None, rng=None) -> SolverState:
    """Fresh state for ``method``: ``v_0 = y_0 = x_0`` and ``gamma_{-1} = 0`` for ASKM."""
    method = Method(method)
    config.validate(problem.m, method, constants)
    x = problem.check_x(x0).astype(float, copy=True)
    rng = make_rng(config.seed) if rng is None else rng
    state = SolverState(x=x, rng=rng, sampler=RowSampler(problem.m, config.beta))
    if method is Method.ASKM:
        sc = ScheduleConstants(problem.m, config.beta, config.resolved_d(),
                               config.resolved_lambda(constants), constants.zeta)
        state.v = x.copy()
        state.y = x.copy()
        state.schedule = AskmSchedule.initial(sc)
    return state


def skm_step(problem: LFProblem, state: SolverState, config: SolverConfig) -> SolverState:
    """``x <- x - delta (a_i^T x - b_i)^+ a_i`` for the most violated sampled row ``i``."""
    draw = state.sampler.draw(state.rng)
    sel = select_max_violation(problem, state.x, draw)
    if sel.violation > 0.0:
        state.x = state.x - (config.delta * sel.violation) * problem.rows[sel.row_index]
    state.last_selection = (sel.row_index, sel.violation)
    state.k += 1
    return state


def askm_step(problem: LFProblem, state: SolverState, config: SolverConfig,
              constants: Optional[SpectralConstants] = None) -> SolverState:
    """One accelerated iteration.

    Advances the gamma schedule, forms ``y = alpha v + (1 - alpha) x``, selects
    the most violated sampled row (measured at ``x`` or ``y`` per
    ``config.select_at``) and projects ``y`` onto it; ``v`` takes the same
    step scaled by ``gamma`` after mixing toward ``y`` with weight ``1 - beta_k``.
    """
    s = advance_gamma(state.schedule, check=config.check_schedule)
    x, v = state.x, state.v
    y = s.alpha * v + (1.0 - s.alpha) * x
    draw = state.sampler.draw(state.rng)
    sel = select_max_violation(problem, y if config.select_at == "y" else x, draw)
    i = sel.row_index
    a = problem.rows[i]
    if config.select_at == "y":
        viol = sel.violation
    else:
        viol = max(float(a @ y) - problem.rhs[i], 0.0)
    if viol > 0.0:
        state.x = y - viol * a
        state.v = s.beta_k * v + (1.0 - s.beta_k) * y - (s.gamma * viol) * a
    else:
        state.x = y
        state.v = s.beta_k * v + (1.0 - s.beta_k) * y
    state.y = y
    state.schedule = s
    state.last_selection = (i, viol)
    state.k += 1
    return state


@dataclass
class RunReport:
    """Trace rows are ``(k, wall_seconds, residual_norm, fsc, max_violation)``."""

    trace: list = field(default_factory=list)
    halting_reason: str = ""
    total_seconds: float = 0.0
    final_k: int = 0
    config_echo: dict = field(default_factory=dict)
    x: Optional[np.ndarray] = None

    TRACE_COLUMNS = ("k", "wall_seconds", "residual_norm", "fsc", "max_violation")


def _config_echo(config: SolverConfig, method: Method, constants) -> dict:
    echo = {
        "method": method.value,
        "beta": config.beta,
        "delta": config.delta,
        "max_iterations": config.max_iterations,
        "seed": config.seed,
        "log_stride": config.log_stride,
        "halting": [{"kind": r.kind.value, "threshold": r.threshold, "time_cap": r.time_cap,
                     "relative": r.relative} for r in config.halting],
    }
    if method is Method.ASKM:
        echo.update(lam=config.resolved_lambda(constants), d=config.resolved_d(),
                    select_at=config.select_at)
    return echo


class _Halting:
    """Evaluates composed halting rules against fresh residual data."""

    def __init__(self, problem: LFProblem, rules, x0):
        self.rules = tuple(rules)
        self.problem = problem
        self.time_cap = min((r.time_cap for r in self.rules if r.kind is HaltKind.TIME), default=math.inf)
        self.needs_ax = any(r.kind is HaltKind.HOMOGENEOUS for r in self.rules)
        ax0 = problem.rows @ x0
        self.max0 = float((ax0 - problem.rhs).max())
        self.ax0_norm = float(np.linalg.norm(ax0))

    def check(self, stats, x, elapsed):
        for rule in self.rules:
            kind = rule.kind
            if kind is HaltKind.RESIDUAL:
                if stats.positive_residual_norm <= rule.threshold:
                    return kind.value
            elif kind is HaltKind.RELMAX:
                if self.max0 <= 0.0 or stats.max_violation / self.max0 <= rule.threshold:
                    return kind.value
            elif kind is HaltKind.HOMOGENEOUS:
                val = float(np.linalg.norm(self.problem.rows @ x))
                if rule.relative:
                    val = val / self.ax0_norm if self.ax0_norm > 0 else 0.0
                if val <= rule.threshold:
                    return kind.value
            elif elapsed >= rule.time_cap:
                return TIME_CAP_REASON
        return None


def run(problem: LFProblem, x0, config: SolverConfig, method="skm",
        constants: Optional[SpectralConstants] = None, rng=None) -> RunReport:
    """Iterate until a halting rule fires or ``config.max_iterations`` steps are taken.

    Full residuals (and residual-based halting rules) are evaluated every
    ``config.log_stride`` iterations and at the end; the solver clock is paused
    while they are computed. The time cap is checked every iteration.
    """
    method = Method(method)
    state = init_state(problem, x0, config, method, constants, rng)
    halting = _Halting(problem, config.halting, state.x)
    if method is Method.ASKM:
        def step():
            askm_step(problem, state, config, constants)
    else:
        def step():
            skm_step(problem, state, config)
    stride = config.log_stride
    report = RunReport(config_echo=_config_echo(config, method, constants))

    def log():
        stats = positive_residual(problem, state.x)
        report.trace.append((state.k, elapsed, stats.positive_residual_norm, stats.fsc,
                             stats.max_violation))
        return stats

    elapsed = 0.0
    reason = halting.check(log(), state.x, elapsed)
    while reason is None:
        if state.k >= config.max_iterations:
            reason = "max_iterations"
            break
        t0 = time.perf_counter()
        step()
        elapsed += time.perf_counter() - t0
        if state.k % stride == 0:
            reason = halting.check(log(), state.x, elapsed)
        elif elapsed >= halting.time_cap:
            reason = TIME_CAP_REASON
    if report.trace[-1][0] != state.k:
        log()
    report.halting_reason = reason
    report.total_seconds = elapsed
    report.final_k = state.k
    report.x = state.x
    return report

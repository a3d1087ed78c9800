"""Accelerated-schedule recurrences and the accelerated method's convergence bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import DegenerateLambda, NonFiniteParameter, PreconditionViolated, ScheduleInvariantError

IDENTITY_RTOL = 1e-9
IDENTITY_ATOL = 1e-12
RANGE_RTOL = 1e-12
ROOT_TOL = 1e-10


@dataclass(frozen=True)
class ScheduleConstants:
    m: int
    beta: int
    d: float
    lam: float
    zeta: float

    def __post_init__(self):
        if self.m < 1 or not 1 <= self.beta <= self.m:
            raise PreconditionViolated(f"need 1 <= beta <= m, got beta={self.beta}, m={self.m}")
        if self.d < self.beta:
            raise PreconditionViolated(f"need d >= beta, got d={self.d}, beta={self.beta}")
        if self.lam < 0 or self.zeta < 1:
            raise PreconditionViolated("need lambda >= 0 and zeta >= 1")
        if not self.m**2 > self.zeta * self.lam * self.beta:
            raise PreconditionViolated(
                f"m^2 = {self.m**2} must exceed zeta*lambda*beta = {self.zeta * self.lam * self.beta}")

    @property
    def gamma_cap(self) -> float:
        """Fixed point of the gamma recurrence, which bounds the whole sequence (inf when lambda = 0).

        It is the positive root of ``lambda d g^2 - m (d/beta - 1) g - zeta = 0``
        and equals ``sqrt(zeta / (lambda d))`` when ``d = beta``.
        """
        if self.lam == 0:
            return math.inf
        a = self.lam * self.d
        half_b = 0.5 * self.m * (self.d / self.beta - 1.0)
        return (half_b + math.sqrt(half_b * half_b + a * self.zeta)) / a


@dataclass(frozen=True)
class AskmSchedule:
    """State after computing ``gamma_k`` (``k = -1`` is the initial ``gamma_{-1} = 0``)."""

    constants: ScheduleConstants
    gamma_prev: float
    gamma: float
    alpha: float
    beta_k: float
    k: int

    @classmethod
    def initial(cls, constants: ScheduleConstants) -> "AskmSchedule":
        return cls(constants, 0.0, 0.0, 1.0, 1.0, -1)

    @property
    def z(self) -> float:
        return self.beta_k * (1.0 - self.alpha) / self.alpha


def gamma_polynomial(c: ScheduleConstants, gamma_prev: float, gamma: float) -> float:
    """``g(gamma) = gamma^2 + gamma (lambda d gamma_prev^2 - zeta)/m - (d/beta) gamma_prev^2``."""
    return (gamma * gamma + gamma * (c.lam * c.d * gamma_prev**2 - c.zeta) / c.m
            - c.d / c.beta * gamma_prev**2)


def alpha_of(c: ScheduleConstants, gamma: float) -> float:
    return c.zeta * (c.m - c.lam * c.beta * gamma) / (gamma * (c.m**2 - c.lam * c.beta * c.zeta))


def beta_of(c: ScheduleConstants, gamma: float) -> float:
    return 1.0 - c.lam * c.beta * gamma / c.m


def advance_gamma(schedule: AskmSchedule, check: bool = True) -> AskmSchedule:
    """Take the larger root of ``g`` as the next gamma and update alpha and beta_k.

    The root uses the cancellation-free branch of the quadratic formula for
    ``gamma^2 + B gamma - C = 0``.
    """
    c = schedule.constants
    gp = schedule.gamma
    if c.lam > 0 and gp > c.gamma_cap * (1 + RANGE_RTOL):
        raise PreconditionViolated(f"gamma_prev={gp} exceeds the schedule fixed point {c.gamma_cap}")
    B = (c.lam * c.d * gp * gp - c.zeta) / c.m
    C = c.d / c.beta * gp * gp
    disc = math.sqrt(B * B + 4.0 * C)
    gamma = (disc - B) / 2.0 if B <= 0 else 2.0 * C / (B + disc)
    alpha = alpha_of(c, gamma)
    beta_k = beta_of(c, gamma)
    if not all(map(math.isfinite, (gamma, alpha, beta_k))) or gamma <= 0:
        raise NonFiniteParameter(f"schedule produced gamma={gamma}, alpha={alpha}, beta_k={beta_k}")
    new = replace(schedule, gamma_prev=gp, gamma=gamma, alpha=alpha, beta_k=beta_k, k=schedule.k + 1)
    if check:
        check_schedule(new)
    return new


def _close(a, b):
    return abs(a - b) <= IDENTITY_ATOL + IDENTITY_RTOL * max(abs(a), abs(b))


def alpha_ratio_identity(c: ScheduleConstants, gamma_prev: float, gamma: float) -> float:
    """Closed form of ``(1 - alpha_k)/alpha_k``: ``m d gamma_prev^2 / (beta zeta gamma)``.

    With ``d = beta`` and ``zeta = 1`` this is ``m gamma_prev^2 / gamma``.
    """
    return c.m * c.d * gamma_prev**2 / (c.beta * c.zeta * gamma)


def check_schedule(s: AskmSchedule) -> None:
    """Raise :class:`ScheduleInvariantError` if any schedule invariant fails."""
    c = s.constants
    g, gp = s.gamma, s.gamma_prev
    hi = 1 + RANGE_RTOL
    lo = 1 - RANGE_RTOL
    if not (-RANGE_RTOL <= s.alpha <= hi and -RANGE_RTOL <= s.beta_k <= hi):
        raise ScheduleInvariantError(f"alpha={s.alpha} or beta_k={s.beta_k} outside [0, 1]")
    if c.lam > 0:
        if not c.zeta / c.m * lo <= g <= c.m / (c.lam * c.beta) * hi:
            raise ScheduleInvariantError(f"gamma={g} outside [zeta/m, m/(lambda beta)]")
        if gp <= c.gamma_cap and not gp * lo <= g <= c.gamma_cap * hi:
            raise ScheduleInvariantError(f"gamma={g} outside [gamma_prev={gp}, {c.gamma_cap}]")
    resid = gamma_polynomial(c, gp, g)
    if abs(resid) > ROOT_TOL * max(1.0, g * g):
        raise ScheduleInvariantError(f"g(gamma) = {resid} is not zero")
    ratio = (1.0 - s.alpha) / s.alpha
    if not _close(ratio, alpha_ratio_identity(c, gp, g)):
        raise ScheduleInvariantError(f"(1-alpha)/alpha = {ratio} breaks the gamma identity")
    lhs = c.zeta * c.beta / c.m * s.beta_k * ratio
    rhs = c.d * s.beta_k * gp * gp / g
    if not _close(lhs, rhs):
        raise ScheduleInvariantError(f"z-identity failed: {lhs} != {rhs}")


@dataclass(frozen=True)
class ConvergenceBound:
    lam: float
    beta: int
    zeta: float
    m: int
    r0_sq: float

    @property
    def _s(self) -> float:
        return math.sqrt(self.lam * self.beta * self.zeta) / (2 * self.m)

    @property
    def sigma1(self) -> float:
        return 1.0 + self._s

    @property
    def sigma2(self) -> float:
        return 1.0 - self._s


def _power_sum_diff(s: float, p: int) -> tuple[float, float]:
    """Return ``(1+s)^p + (1-s)^p`` and ``(1+s)^p - (1-s)^p`` without cancellation."""
    a = p * math.log1p(s)
    b = p * math.log1p(-s)
    eb = math.exp(b)
    diff = eb * math.expm1(a - b)
    return 2 * eb + diff, diff


def theorem1_bounds(bound: ConvergenceBound, k: int) -> tuple[float, float]:
    """Expected-error bounds at iteration ``k``.

    ``bound_v = 4 r0^2 / (s1^{k+1} + s2^{k+1})^2`` bounds the weighted error of
    ``v_{k+1}``; ``bound_x = 4 lambda r0^2 / (zeta (s1^{k+1} - s2^{k+1})^2)``
    bounds ``E||x_{k+1} - x*||^2``.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    if bound.lam == 0:
        raise DegenerateLambda("bound_x is undefined at lambda = 0; use lambda_zero_limit_bound")
    total, diff = _power_sum_diff(bound._s, k + 1)
    bound_v = 4.0 * bound.r0_sq / total**2
    bound_x = 4.0 * bound.lam * bound.r0_sq / (bound.zeta * diff**2)
    return bound_v, bound_x


def bound_v_only(bound: ConvergenceBound, k: int) -> float:
    """``bound_v`` alone; defined for every lambda >= 0 (equals ``r0^2`` when lambda = 0)."""
    total, _ = _power_sum_diff(bound._s, k + 1)
    return 4.0 * bound.r0_sq / total**2


def lambda_zero_limit_bound(r0_sq: float, m: int, beta: int, zeta: float, k: int) -> float:
    """Limit of ``bound_x`` as ``lambda -> 0+``: ``4 m^2 r0^2 / (beta zeta^2 (k+1)^2)``."""
    if k < 0:
        raise ValueError("k must be >= 0")
    return 4.0 * m * m * r0_sq / (beta * zeta * zeta * (k + 1) ** 2)

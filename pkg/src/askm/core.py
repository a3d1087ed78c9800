"""Inequality systems ``Ax <= b`` with unit-norm rows, residuals and spectral constants."""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, RankDeficient, ZeroRow

ZERO_ROW_TOL = 1e-12
UNIT_NORM_TOL = 1e-12
RANK_RATIO_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class LFProblem:
    """Row-normalized system ``rows @ x <= rhs``.

    Build instances with :func:`normalize_system`; the constructor only
    validates that rows already have unit norm.
    """

    rows: np.ndarray
    rhs: np.ndarray
    name: str = "lf"

    def __post_init__(self):
        rows = np.array(self.rows, dtype=float, order="C")
        rhs = np.array(self.rhs, dtype=float).reshape(-1)
        if rows.ndim != 2 or rows.shape[0] < 1 or rows.shape[1] < 1:
            raise DimensionMismatch(f"rows must be a non-empty 2-d array, got shape {rows.shape}")
        if rhs.shape[0] != rows.shape[0]:
            raise DimensionMismatch(f"rhs has length {rhs.shape[0]}, expected {rows.shape[0]}")
        if not (np.all(np.isfinite(rows)) and np.all(np.isfinite(rhs))):
            raise ValueError("system contains non-finite entries")
        norms = np.linalg.norm(rows, axis=1)
        bad = np.flatnonzero(norms < ZERO_ROW_TOL)
        if bad.size:
            raise ZeroRow(int(bad[0]))
        off = np.flatnonzero(np.abs(norms - 1.0) > UNIT_NORM_TOL)
        if off.size:
            raise ValueError(f"row {int(off[0])} is not unit norm (norm {norms[off[0]]!r}); "
                             "use normalize_system")
        rows.setflags(write=False)
        rhs.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "rhs", rhs)

    @property
    def m(self) -> int:
        return self.rows.shape[0]

    @property
    def n(self) -> int:
        return self.rows.shape[1]

    @cached_property
    def singular_values(self) -> np.ndarray:
        return np.linalg.svd(self.rows, compute_uv=False)

    @cached_property
    def _compact_svd(self):
        # (sigma, Vt) restricted to the nonzero part of the spectrum
        _, s, vt = np.linalg.svd(self.rows, full_matrices=False)
        keep = s > RANK_RATIO_TOL * s[0]
        return s[keep], vt[keep]

    def check_x(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise DimensionMismatch(f"expected vector of length {self.n}, got shape {x.shape}")
        return x


def normalize_system(raw_rows, raw_rhs, name: str = "lf") -> LFProblem:
    """Scale every row of ``raw_rows`` (and its rhs entry) to unit norm.

    The feasible set is unchanged. Rows with norm below 1e-12 raise
    :class:`ZeroRow`.
    """
    raw_rows = np.atleast_2d(np.asarray(raw_rows, dtype=float))
    raw_rhs = np.asarray(raw_rhs, dtype=float).reshape(-1)
    if raw_rhs.shape[0] != raw_rows.shape[0]:
        raise DimensionMismatch(f"rhs has length {raw_rhs.shape[0]}, expected {raw_rows.shape[0]}")
    norms = np.linalg.norm(raw_rows, axis=1)
    bad = np.flatnonzero(~(norms >= ZERO_ROW_TOL))
    if bad.size:
        raise ZeroRow(int(bad[0]))
    return LFProblem(raw_rows / norms[:, None], raw_rhs / norms, name=name)


@dataclass(frozen=True)
class ResidualStats:
    positive_residual_norm: float
    max_violation: float
    satisfied_count: int
    fsc: float


def positive_residual(problem: LFProblem, x) -> ResidualStats:
    """Summarize ``(Ax - b)^+`` at ``x``."""
    x = problem.check_x(x)
    r = problem.rows @ x - problem.rhs
    pos = np.maximum(r, 0.0)
    satisfied = int(np.count_nonzero(pos == 0.0))
    return ResidualStats(
        positive_residual_norm=float(np.linalg.norm(pos)),
        max_violation=float(r.max()),
        satisfied_count=satisfied,
        fsc=satisfied / problem.m,
    )


class EstimationMethod(str, enum.Enum):
    EXACT_SVD = "exact-svd"
    POWER_ITERATION = "power-iteration"
    USER_SUPPLIED = "user-supplied"


@dataclass(frozen=True)
class SpectralConstants:
    """Extreme nonzero eigenvalues of ``A^T A`` and the condition number of ``A``."""

    lambda_min: float
    lambda_max: float
    zeta: float
    estimation_method: EstimationMethod = EstimationMethod.USER_SUPPLIED

    def __post_init__(self):
        object.__setattr__(self, "estimation_method", EstimationMethod(self.estimation_method))
        for name in ("lambda_min", "lambda_max", "zeta"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if not self.lambda_min > 0:
            raise ValueError("lambda_min must be positive")
        if self.lambda_max < self.lambda_min:
            raise ValueError("lambda_max must be >= lambda_min")
        if self.zeta < 1:
            raise ValueError("zeta must be >= 1")
        if (self.estimation_method is EstimationMethod.EXACT_SVD
                and self.zeta**2 * self.lambda_min > self.lambda_max * (1 + 1e-9)):
            raise ValueError("zeta^2 * lambda_min exceeds lambda_max")


def _power_lambda_max(gram, rng, tol, max_iter):
    v = rng.standard_normal(gram.shape[0])
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(max_iter):
        w = gram @ v
        new = float(v @ w)
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v = w / nw
        if abs(new - est) <= tol * abs(new):
            return new
        est = new
    return est


def _inverse_lambda_min(gram, rng, tol, max_iter):
    try:
        factor = scipy.linalg.cho_factor(gram)
    except np.linalg.LinAlgError as exc:
        raise RankDeficient("A^T A is singular; inverse iteration needs full column rank") from exc
    v = rng.standard_normal(gram.shape[0])
    v /= np.linalg.norm(v)
    est = math.inf
    for _ in range(max_iter):
        w = scipy.linalg.cho_solve(factor, v)
        v = w / np.linalg.norm(w)
        new = float(v @ gram @ v)
        if abs(new - est) <= tol * abs(new):
            return new
        est = new
    return est


def estimate_spectral(problem: LFProblem, method="exact-svd", *, lambda_min=None,
                      lambda_max=None, zeta=None, tol=1e-12, max_iter=100_000,
                      seed=0) -> SpectralConstants:
    """Compute ``lambda_min``, ``lambda_max`` of ``A^T A`` and ``zeta = sigma_max/sigma_min``.

    ``exact-svd`` uses the full singular spectrum. ``power-iteration`` runs
    power iteration on ``A^T A`` for ``lambda_max`` and Cholesky-based inverse
    iteration for ``lambda_min``, stopping once the Rayleigh quotient changes by
    less than ``tol`` relative; the default ``tol`` keeps both eigenvalues
    within 1e-6 relative of the SVD values on well-separated spectra.
    ``user-supplied`` validates and passes the keyword values through.
    """
    method = EstimationMethod(method)
    if method is EstimationMethod.USER_SUPPLIED:
        if lambda_min is None or lambda_max is None:
            raise ValueError("user-supplied constants need lambda_min and lambda_max")
        if zeta is None:
            zeta = math.sqrt(lambda_max / lambda_min) if lambda_min > 0 else math.nan
        return SpectralConstants(float(lambda_min), float(lambda_max), float(zeta), method)

    if method is EstimationMethod.EXACT_SVD:
        s = problem.singular_values
        if s[-1] < RANK_RATIO_TOL * s[0]:
            raise RankDeficient(f"sigma_min/sigma_max = {s[-1] / s[0]:.3e} below {RANK_RATIO_TOL}")
        return SpectralConstants(float(s[-1] ** 2), float(s[0] ** 2), float(s[0] / s[-1]), method)

    gram = problem.rows.T @ problem.rows
    rng = np.random.default_rng(seed)
    lmax = _power_lambda_max(gram, rng, tol, max_iter)
    lmin = _inverse_lambda_min(gram, rng, tol, max_iter)
    lmin = min(lmin, lmax)
    return SpectralConstants(lmin, lmax, max(1.0, math.sqrt(lmax / lmin)), method)


def weighted_norm_sq(problem: LFProblem, v) -> float:
    """Return ``v^T (A^T A)^+ v`` computed as ``||Sigma^{-1} V^T v||^2``."""
    v = problem.check_x(v)
    s, vt = problem._compact_svd
    return float(np.sum((vt @ v / s) ** 2))


# -- JSON serialization ------------------------------------------------------

def problem_to_dict(problem: LFProblem, **extra) -> dict:
    doc = {
        "name": problem.name,
        "m": problem.m,
        "n": problem.n,
        "rows": problem.rows.tolist(),
        "rhs": problem.rhs.tolist(),
        "pre_normalized": True,
    }
    for key, value in extra.items():
        doc[key] = value.tolist() if isinstance(value, np.ndarray) else value
    return doc


def problem_from_dict(doc: dict) -> LFProblem:
    rows = np.asarray(doc["rows"], dtype=float)
    rhs = np.asarray(doc["rhs"], dtype=float)
    m, n = doc.get("m"), doc.get("n")
    if rows.ndim != 2 or (m is not None and rows.shape[0] != m) or (n is not None and rows.shape[1] != n):
        raise DimensionMismatch(f"rows shape {rows.shape} disagrees with m={m}, n={n}")
    name = doc.get("name", "lf")
    if doc.get("pre_normalized", False):
        # LFProblem verifies the unit-norm claim
        return LFProblem(rows, rhs, name=name)
    return normalize_system(rows, rhs, name=name)


def save_problem(problem: LFProblem, path, **extra) -> None:
    Path(path).write_text(json.dumps(problem_to_dict(problem, **extra)))


def load_problem(path) -> LFProblem:
    return problem_from_dict(json.loads(Path(path).read_text()))


def load_problem_document(path) -> tuple[LFProblem, dict]:
    """Load a problem together with the raw JSON document (for extra fields such as ``witness``)."""
    doc = json.loads(Path(path).read_text())
    return problem_from_dict(doc), doc

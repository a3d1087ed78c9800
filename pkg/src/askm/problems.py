"""Instance generation and ingestion.

Random correlated and Gaussian systems with a feasibility witness, the
LP-to-feasibility transform, and homogeneous systems built from labeled data.
"""

from __future__ import annotations

import csv
import enum
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .core import LFProblem, normalize_system, positive_residual
from .errors import DimensionMismatch
from .sampling import make_rng

log = logging.getLogger(__name__)


class GeneratorKind(str, enum.Enum):
    CORRELATED = "correlated"
    GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class GeneratorSpec:
    kind: GeneratorKind
    m: int
    n: int
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", GeneratorKind(self.kind))
        if not self.m >= self.n >= 1:
            raise ValueError(f"need m >= n >= 1, got m={self.m}, n={self.n}")


def _draw(kind, rng, shape):
    if kind is GeneratorKind.CORRELATED:
        return rng.uniform(0.9, 1.0, size=shape)
    return rng.standard_normal(shape)


def generate_raw(spec: GeneratorSpec):
    """Unnormalized ``(A, b, witness)``.

    ``x1`` and ``x2`` come from the same law as the entries of ``A`` and
    ``b = A (t x1 + (1 - t) x2)`` for one scalar ``t ~ U[0, 1]``, so the
    convex combination ``t x1 + (1 - t) x2`` is the witness.
    """
    rng = make_rng(spec.seed, 0)
    A = _draw(spec.kind, rng, (spec.m, spec.n))
    x1 = _draw(spec.kind, rng, spec.n)
    x2 = _draw(spec.kind, rng, spec.n)
    t = rng.uniform()
    b = t * (A @ x1) + (1.0 - t) * (A @ x2)
    return A, b, t * x1 + (1.0 - t) * x2


def generate_random(spec: GeneratorSpec) -> tuple[LFProblem, np.ndarray]:
    """Normalized random system plus a point with zero positive residual."""
    A, b, w = generate_raw(spec)
    problem = normalize_system(A, b, name=f"{spec.kind.value}-{spec.m}x{spec.n}-s{spec.seed}")
    # b equals A w in exact arithmetic; lift rhs by the rounding error so w is exactly feasible
    aw = problem.rows @ w
    if np.any(aw > problem.rhs):
        log.debug("lifted %d rhs entries by at most %.3g", int(np.sum(aw > problem.rhs)),
                  float(np.max(aw - problem.rhs)))
        problem = LFProblem(problem.rows, np.maximum(problem.rhs, aw), name=problem.name)
    return problem, w


def far_start(problem: LFProblem, witness, scale: float = 10.0, seed: int = 0) -> np.ndarray:
    """Infeasible start ``witness +/- scale * g`` with ``g ~ N(0, I)``.

    The sign is flipped when ``witness + scale * g`` happens to be feasible.
    """
    witness = problem.check_x(witness)
    g = make_rng(seed, 1).standard_normal(problem.n)
    x0 = witness + scale * g
    if positive_residual(problem, x0).positive_residual_norm == 0.0:
        x0 = witness - scale * g
    return x0


# -- LP -> LF ----------------------------------------------------------------

@dataclass(eq=False)
class LPInstance:
    """``min c^T x`` s.t. ``A x = b``, ``l <= x <= u`` with known optimum ``p_star``."""

    A: np.ndarray
    b: np.ndarray
    l: np.ndarray
    u: np.ndarray
    c: np.ndarray
    p_star: float = math.nan
    name: str = "lp"
    column_names: Optional[list] = None

    def __post_init__(self):
        self.A = np.atleast_2d(np.asarray(self.A, dtype=float))
        m_lp, n = self.A.shape
        self.b = np.asarray(self.b, dtype=float).reshape(-1)
        self.l = np.asarray(self.l, dtype=float).reshape(-1)
        self.u = np.asarray(self.u, dtype=float).reshape(-1)
        self.c = np.asarray(self.c, dtype=float).reshape(-1)
        if self.b.shape != (m_lp,):
            raise DimensionMismatch(f"b has shape {self.b.shape}, expected ({m_lp},)")
        for name in ("l", "u", "c"):
            if getattr(self, name).shape != (n,):
                raise DimensionMismatch(f"{name} has shape {getattr(self, name).shape}, expected ({n},)")
        if np.any(self.l > self.u):
            raise ValueError("lower bound exceeds upper bound")
        if np.any(self.l == math.inf) or np.any(self.u == -math.inf):
            raise ValueError("bounds must allow at least one finite value")

    @property
    def m_lp(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]

    def with_optimum(self, p_star: float) -> "LPInstance":
        return LPInstance(self.A, self.b, self.l, self.u, self.c, float(p_star), self.name,
                          self.column_names)


def lp_to_lf_raw(lp: LPInstance) -> tuple[np.ndarray, np.ndarray]:
    """Stack ``[A; -A; I_u; -I_l; c^T]`` against ``[b; -b; u; -l; p*]`` before normalization."""
    if math.isnan(lp.p_star):
        raise ValueError(f"LP {lp.name!r} has no optimum value p_star")
    eye = np.eye(lp.n)
    fu = np.isfinite(lp.u)
    fl = np.isfinite(lp.l)
    rows = np.vstack([lp.A, -lp.A, eye[fu], -eye[fl], lp.c[None, :]])
    rhs = np.concatenate([lp.b, -lp.b, lp.u[fu], -lp.l[fl], [lp.p_star]])
    return rows, rhs


def lp_to_lf(lp: LPInstance) -> LFProblem:
    rows, rhs = lp_to_lf_raw(lp)
    return normalize_system(rows, rhs, name=lp.name)


def load_optimum_file(path) -> dict:
    """Read a ``{instance_name: p_star}`` JSON document."""
    doc = json.loads(Path(path).read_text())
    if not isinstance(doc, dict):
        raise ValueError("optimum file must hold a JSON object")
    return {str(k): float(v) for k, v in doc.items()}


# -- labeled data ------------------------------------------------------------

def labeled_data_to_homogeneous(features, labels, augment_bias: bool = False,
                                name: str = "homogeneous") -> LFProblem:
    """Rows ``-label_i * (features_i[, 1])`` with zero rhs.

    A hyperplane ``w`` separates the data exactly when every row satisfies
    ``row @ w <= 0``.
    """
    X = np.atleast_2d(np.asarray(features, dtype=float))
    y = np.asarray(labels, dtype=float).reshape(-1)
    if X.shape[0] < 1:
        raise ValueError("need at least one point")
    if y.shape[0] != X.shape[0]:
        raise DimensionMismatch(f"{y.shape[0]} labels for {X.shape[0]} points")
    if not np.all(np.abs(y) == 1):
        raise ValueError("labels must be +1 or -1")
    if augment_bias:
        X = np.hstack([X, np.ones((X.shape[0], 1))])
    return normalize_system(-y[:, None] * X, np.zeros(X.shape[0]), name=name)


def load_labeled_csv(path, label_column=-1, positive=None):
    """Read a headered CSV into ``(features, labels)`` with labels mapped to +/-1.

    ``label_column`` is a header name or a column index. Rows whose label
    equals ``positive`` map to +1 and all others to -1; without ``positive``
    the labels must already be {-1, 1} or {0, 1}.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        body = [row for row in reader if row]
    if isinstance(label_column, str):
        col = header.index(label_column)
    else:
        col = label_column % len(header)
    raw = [row[col].strip() for row in body]
    feats = np.array([[float(v) for j, v in enumerate(row) if j != col] for row in body])
    if positive is not None:
        labels = np.where(np.array(raw) == str(positive), 1.0, -1.0)
    else:
        vals = np.array([float(v) for v in raw])
        if set(np.unique(vals)) <= {-1.0, 1.0}:
            labels = vals
        elif set(np.unique(vals)) <= {0.0, 1.0}:
            labels = 2.0 * vals - 1.0
        else:
            raise ValueError("labels are not in {-1, 1} or {0, 1}; pass positive=")
    return feats, labels

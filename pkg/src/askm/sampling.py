"""Uniform beta-subset row sampling and max-violation selection.

Also holds the closed-form expectation of the squared selected violation and
an exhaustive enumeration oracle for it.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .core import LFProblem
from .errors import BadSampleSize, TooManySubsets

ENUMERATION_LIMIT = 10**6


def make_rng(base_seed: int, trial: int = 0) -> np.random.Generator:
    """Counter-based Philox stream keyed by ``(base_seed, trial)``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(base_seed), int(trial)])))


def _check_beta(m, beta):
    if not 1 <= beta <= m:
        raise BadSampleSize(f"sample size {beta} outside [1, {m}]")


@dataclass(frozen=True, eq=False)
class SampleDraw:
    indices: np.ndarray  # sorted, distinct
    beta: int

    def __post_init__(self):
        if len(self.indices) != self.beta:
            raise BadSampleSize(f"{len(self.indices)} indices for beta={self.beta}")


class RowSampler:
    """Partial Fisher-Yates over a reusable index buffer.

    The buffer stays a permutation of ``range(m)`` between draws, so each draw
    costs O(beta) after the O(m) setup and every beta-subset is equally likely.
    """

    def __init__(self, m: int, beta: int):
        _check_beta(m, beta)
        self.m = m
        self.beta = beta
        self._buf = list(range(m))
        self._full = np.arange(m)
        self._offsets = np.arange(beta)

    def draw(self, rng: np.random.Generator) -> SampleDraw:
        m, beta = self.m, self.beta
        if beta == m:
            return SampleDraw(self._full, beta)
        buf = self._buf
        picks = rng.integers(self._offsets, m).tolist()
        for i, j in enumerate(picks):
            buf[i], buf[j] = buf[j], buf[i]
        idx = np.array(buf[:beta])
        idx.sort()
        return SampleDraw(idx, beta)


def draw_sample(m: int, beta: int, rng: np.random.Generator) -> SampleDraw:
    return RowSampler(m, beta).draw(rng)


@dataclass(frozen=True)
class Selection:
    row_index: int
    violation: float


def select_max_violation(problem: LFProblem, x, draw: SampleDraw) -> Selection:
    """Pick the sampled row with the largest ``(a_i^T x - b_i)^+``.

    Ties (including the all-satisfied case) go to the lowest row index.
    """
    x = problem.check_x(x)
    idx = draw.indices
    if draw.beta == problem.m:
        r = problem.rows @ x - problem.rhs
    else:
        r = problem.rows[idx] @ x - problem.rhs[idx]
    np.maximum(r, 0.0, out=r)
    j = int(np.argmax(r))
    return Selection(int(idx[j]), float(r[j]))


def selection_weights(m: int, beta: int) -> np.ndarray:
    """Probability that the ``(beta + k)``-th smallest residual is selected, k = 0..m-beta.

    Equal to ``C(beta-1+k, beta-1) / C(m, beta)``. Evaluated from the top
    weight ``beta/m`` downwards via ``w[k-1] = w[k] * k / (beta + k - 1)`` so
    nothing overflows; small weights underflow harmlessly to zero.
    """
    _check_beta(m, beta)
    w = np.empty(m - beta + 1)
    w[-1] = beta / m
    for k in range(m - beta, 0, -1):
        w[k - 1] = w[k] * k / (beta + k - 1)
    return w


def expected_selected_residual_sq(problem: LFProblem, y, beta: int) -> float:
    """Expected squared violation of the selected row over uniform beta-samples."""
    _check_beta(problem.m, beta)
    y = problem.check_x(y)
    r = np.sort(np.maximum(problem.rows @ y - problem.rhs, 0.0))
    return float(selection_weights(problem.m, beta) @ (r[beta - 1:] ** 2))


def enumeration_oracle(problem: LFProblem, y, beta: int, limit: int = ENUMERATION_LIMIT) -> float:
    """Average the squared selected violation over every beta-subset."""
    m = problem.m
    _check_beta(m, beta)
    total = math.comb(m, beta)
    if total > limit:
        raise TooManySubsets(f"C({m}, {beta}) = {total} exceeds {limit}")
    y = problem.check_x(y)
    terms = (select_max_violation(problem, y, SampleDraw(np.array(subset), beta)).violation ** 2
             for subset in itertools.combinations(range(m), beta))
    return math.fsum(terms) / total

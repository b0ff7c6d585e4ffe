"""First-order oracles and population-risk evaluation.

The full-batch oracle is the only interface a full-batch algorithm gets: it
returns the averaged subgradient and the empirical value at the query, and
each per-sample subgradient is computed from (w, z_i) alone.  The per-sample
oracle exists solely so SGD can be run as the comparison class; it is exactly
what the full-batch oracle refuses to expose.

Population risk has two evaluation modes.  Exact mode enumerates the hinge
term over the coordinates where the hinge is active (everything else
integrates in closed form); Monte-Carlo mode averages fresh alpha draws and
reports a standard error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .instance import (
    ConstructionParams,
    hinge,
    loss_subgrad,
    loss_value,
    nemirovski_value,
)
from .sampling import Sample

__all__ = [
    "OracleAnswer",
    "RiskEstimate",
    "DomainViolationError",
    "ExactEnumerationError",
    "EXACT_ACTIVE_LIMIT",
    "DOMAIN_TOL",
    "reference_point",
    "full_batch_oracle",
    "sample_oracle",
    "population_risk",
    "excess_risk",
]

# active-coordinate cap for exact enumeration: 2^25 terms is seconds at desk
# scale, and span-restricted trajectories stay at or below T active coords
EXACT_ACTIVE_LIMIT = 25

# absorbs unit-ball projection rounding in algorithm queries
DOMAIN_TOL = 1e-9


class DomainViolationError(ValueError):
    """Query outside the unit ball (beyond tolerance)."""


class ExactEnumerationError(ValueError):
    """Exact risk requested with too many active coordinates."""


@dataclass(frozen=True)
class OracleAnswer:
    """(subgradient, empirical value) as returned by one oracle call."""

    grad: np.ndarray
    value: float


@dataclass(frozen=True)
class RiskEstimate:
    mean: float
    std_error: float
    mode: str  # "exact" or "mc"
    draws: int = 0

    def __post_init__(self):
        if self.std_error < 0:
            raise ValueError("std_error must be >= 0")
        if self.mode == "exact" and self.std_error != 0.0:
            raise ValueError("exact estimates carry zero std_error")


def reference_point(params: ConstructionParams) -> np.ndarray:
    """-e_{d+2}: the fixed reference against which excess risk is measured."""
    w = np.zeros(params.dim)
    w[-1] = -1.0
    return w


def _check_domain(w: np.ndarray, dim: int):
    w = np.asarray(w, dtype=float)
    if w.shape != (dim,):
        raise ValueError(f"query has shape {w.shape}, expected ({dim},)")
    norm = float(np.linalg.norm(w))
    if norm > 1.0 + DOMAIN_TOL:
        raise DomainViolationError(f"query norm {norm} exceeds the unit ball")
    return w


def sample_oracle(w: np.ndarray, alpha: np.ndarray, params: ConstructionParams) -> OracleAnswer:
    """First-order answer for a single sample point."""
    w = _check_domain(w, params.dim)
    return OracleAnswer(grad=loss_subgrad(w, alpha, params), value=loss_value(w, alpha, params))


def full_batch_oracle(w: np.ndarray, sample: Sample) -> OracleAnswer:
    """Averaged subgradient and empirical value over the fixed sample.

    Each per-sample subgradient is a function of (w, z_i) only; the average
    is what the algorithm sees.
    """
    params = sample.params
    w = _check_domain(w, params.dim)
    grads = np.stack([loss_subgrad(w, alpha, params) for alpha in sample.alphas])
    values = [loss_value(w, alpha, params) for alpha in sample.alphas]
    return OracleAnswer(grad=grads.sum(axis=0) / params.n, value=float(np.sum(values) / params.n))


def _mean_perturbation_expectation(params: ConstructionParams) -> np.ndarray:
    """E[v_alpha]: (2n-1)/(4n) on the first d coordinates, 0 on the last two."""
    ev = np.zeros(params.dim)
    ev[: params.d] = (2.0 * params.n - 1.0) / (4.0 * params.n)
    return ev


def _exact_hinge_expectation(h_active: np.ndarray) -> float:
    """E over uniform subsets A of sqrt(sum_{i in A} h_i^2), by enumeration.

    Meet-in-the-middle: subset sums of each half are combined through an
    outer sum, so 2^k terms cost 2^(k/2) memory.
    """
    k = h_active.shape[0]
    if k == 0:
        return 0.0
    squares = h_active * h_active
    left, right = squares[: k // 2], squares[k // 2:]

    def subset_sums(values: np.ndarray) -> np.ndarray:
        sums = np.zeros(1)
        for v in values:
            sums = np.concatenate([sums, sums + v])
        return sums

    left_sums = subset_sums(left)
    right_sums = subset_sums(right)
    total = 0.0
    step = max(1, (1 << 22) // max(1, right_sums.shape[0]))
    for start in range(0, left_sums.shape[0], step):
        block = left_sums[start : start + step]
        total += float(np.sqrt(block[:, None] + right_sums[None, :]).sum())
    return total / (left_sums.shape[0] * right_sums.shape[0])


def population_risk(
    w: np.ndarray,
    params: ConstructionParams,
    mode: str = "exact",
    mc_draws: int = 10000,
    rng: np.random.Generator | None = None,
) -> RiskEstimate:
    """E_alpha[f(w; (alpha, eps, gamma))] under the uniform bit distribution.

    Exact mode enumerates the 2^k assignments over the k hinge-active
    coordinates (all others contribute nothing to g) and refuses beyond
    k = EXACT_ACTIVE_LIMIT.  Monte-Carlo mode averages ``mc_draws`` fresh
    alpha draws and reports std_error = sample std / sqrt(draws).
    """
    w = np.asarray(w, dtype=float)
    if w.shape != (params.dim,):
        raise ValueError(f"point has shape {w.shape}, expected ({params.dim},)")
    h = hinge(w[: params.d], params.gamma2)
    # eps-term and max-term do not depend on alpha; the perturbation term is
    # averaged in closed form for exact mode and per draw for Monte-Carlo
    deterministic = params.eps * float(w[-1]) + nemirovski_value(w, params)

    if mode == "exact":
        active = np.flatnonzero(h != 0.0)
        if active.shape[0] > EXACT_ACTIVE_LIMIT:
            raise ExactEnumerationError(
                f"{active.shape[0]} active coordinates exceed the exact-mode "
                f"limit of {EXACT_ACTIVE_LIMIT}; use Monte-Carlo mode"
            )
        mean = (
            _exact_hinge_expectation(h[active])
            + params.gamma1 * float(_mean_perturbation_expectation(params) @ w)
            + deterministic
        )
        return RiskEstimate(mean=mean, std_error=0.0, mode="exact", draws=0)

    if mode == "mc":
        if rng is None:
            raise ValueError("Monte-Carlo mode requires an rng stream")
        if mc_draws < 2:
            raise ValueError(f"mc_draws must be >= 2, got {mc_draws}")
        squares = h * h
        vals = np.empty(mc_draws)
        done = 0
        while done < mc_draws:
            m = min(mc_draws - done, max(1, (1 << 22) // params.d))
            bits = rng.integers(0, 2, size=(m, params.d), dtype=np.uint8)
            g = np.sqrt(bits @ squares)
            # <v_alpha, w> = (1 + 1/(2n)) <alpha, w_d> - sum(w_d)/(2n)
            half = 1.0 / (2.0 * params.n)
            vdot = (1.0 + half) * (bits @ w[: params.d]) - half * w[: params.d].sum()
            vals[done : done + m] = g + params.gamma1 * vdot
            done += m
        mean = float(vals.mean()) + deterministic
        se = float(vals.std(ddof=1) / np.sqrt(mc_draws))
        return RiskEstimate(mean=mean, std_error=se, mode="mc", draws=mc_draws)

    raise ValueError(f"unknown risk mode {mode!r}")


def excess_risk(
    w: np.ndarray,
    params: ConstructionParams,
    mode: str = "exact",
    mc_draws: int = 10000,
    rng: np.random.Generator | None = None,
) -> RiskEstimate:
    """population_risk(w) - population_risk(-e_{d+2}).

    The reference point is a near-minimizer of the population risk, so this
    statistic lower-bounds the true excess risk; the reference is always
    evaluated exactly (it has no active coordinates).
    """
    est = population_risk(w, params, mode=mode, mc_draws=mc_draws, rng=rng)
    ref = population_risk(reference_point(params), params, mode="exact")
    return RiskEstimate(
        mean=est.mean - ref.mean,
        std_error=est.std_error,
        mode=est.mode,
        draws=est.draws,
    )

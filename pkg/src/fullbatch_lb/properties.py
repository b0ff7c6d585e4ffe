"""Executable property checks: the proof machinery as Monte-Carlo batteries.

Each check returns a PropertyResult; the lemma-suite experiment and the test
suite both run these, so there is exactly one implementation of every claim.
A check whose mathematical preconditions fail on the given parameters refuses
(status "refused") instead of silently testing something else.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from . import instance as inst
from .instance import ConstructionParams
from .oracle import full_batch_oracle, population_risk
from .optim import ProjectedGD, run_full_batch
from .sampling import Sample, draw_sample, mean_perturbation, survivor_set, top_survivors
from .spanlab import (
    build_basis,
    decompose_gradient,
    error_lemma_bound,
    minimize_surrogate_over_span,
    resilience_check,
    span_residual,
)

__all__ = [
    "PropertyResult",
    "draw_conditioned_sample",
    "random_ball_points",
    "check_hinge_shape",
    "check_convexity",
    "check_subgradient_inequality",
    "check_lipschitz",
    "check_survivor_binomial",
    "check_mean_perturbation_exact",
    "check_top_survivors_monotone",
    "check_oracle_purity",
    "check_per_sample_independence",
    "check_mc_matches_exact",
    "check_population_lower_bound",
    "check_span_lemma",
    "check_error_lemma",
    "check_resilience",
]


@dataclass
class PropertyResult:
    name: str
    trials: int
    violations: int
    max_residual: float = 0.0
    status: str = "pass"
    detail: str = ""

    def __post_init__(self):
        if self.status == "pass" and self.violations > 0:
            self.status = "fail"

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> dict:
        return {
            "property": self.name,
            "trials": self.trials,
            "violations": self.violations,
            "max_residual": self.max_residual,
            "status": self.status,
            "detail": self.detail,
        }


def draw_conditioned_sample(
    params: ConstructionParams,
    rng: np.random.Generator,
    min_survivors: int,
    max_attempts: int = 10000,
) -> Sample:
    """Redraw until the survivor set has at least ``min_survivors`` members."""
    for _ in range(max_attempts):
        sample = draw_sample(params, rng)
        if survivor_set(sample).shape[0] >= min_survivors:
            return sample
    raise RuntimeError(
        f"no sample with {min_survivors} survivors in {max_attempts} attempts "
        f"(n={params.n}, d={params.d})"
    )


def random_ball_points(rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
    """Uniformly random points in the unit ball (direction times radius^(1/dim))."""
    x = rng.standard_normal((count, dim))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    return x * rng.random((count, 1)) ** (1.0 / dim)


# ---------------------------------------------------------------------------
# instance-level properties


def check_hinge_shape(gamma2: float = 0.1, points: int = 2001) -> PropertyResult:
    """hinge is nonpositive, nondecreasing, and 1-Lipschitz on a [-1, 1] grid."""
    grid = np.linspace(-1.0, 1.0, points)
    values = inst.hinge(grid, gamma2)
    violations = int((values > 0).sum())
    diffs = np.diff(values)
    violations += int((diffs < -1e-15).sum())
    violations += int((diffs > np.diff(grid) + 1e-12).sum())
    if inst.hinge(-gamma2, gamma2) != 0.0:
        violations += 1
    return PropertyResult("hinge_shape", points, violations)


def check_convexity(
    params: ConstructionParams, trials: int, rng: np.random.Generator
) -> PropertyResult:
    """loss(lam w1 + (1-lam) w2) <= lam loss(w1) + (1-lam) loss(w2) + 1e-9."""
    worst = 0.0
    violations = 0
    points = random_ball_points(rng, 2 * trials, params.dim)
    for k in range(trials):
        alpha = rng.integers(0, 2, size=params.d, dtype=np.uint8)
        lam = float(rng.random())
        w1, w2 = points[2 * k], points[2 * k + 1]
        gap = inst.loss_value(lam * w1 + (1 - lam) * w2, alpha, params) - (
            lam * inst.loss_value(w1, alpha, params)
            + (1 - lam) * inst.loss_value(w2, alpha, params)
        )
        worst = max(worst, gap)
        if gap > 1e-9:
            violations += 1
    return PropertyResult(
        f"loss_convexity_{params.variant.value}", trials, violations, max_residual=worst
    )


def check_subgradient_inequality(
    params: ConstructionParams, trials: int, rng: np.random.Generator
) -> PropertyResult:
    """loss(w') >= loss(w) + <subgrad(w), w' - w> - 1e-9 on random pairs."""
    worst = 0.0
    violations = 0
    points = random_ball_points(rng, 2 * trials, params.dim)
    for k in range(trials):
        alpha = rng.integers(0, 2, size=params.d, dtype=np.uint8)
        w, w_prime = points[2 * k], points[2 * k + 1]
        lhs = inst.loss_value(w_prime, alpha, params)
        rhs = inst.loss_value(w, alpha, params) + float(
            inst.loss_subgrad(w, alpha, params) @ (w_prime - w)
        )
        worst = max(worst, rhs - lhs)
        if rhs - lhs > 1e-9:
            violations += 1
    return PropertyResult(
        f"subgradient_inequality_{params.variant.value}",
        trials,
        violations,
        max_residual=worst,
    )


def check_lipschitz(
    params: ConstructionParams, trials: int, rng: np.random.Generator
) -> PropertyResult:
    """|loss(w) - loss(w')| <= (2 + eps + gamma1 sqrt(d)) ||w - w'||."""
    bound = 2.0 + params.eps + params.gamma1 * math.sqrt(params.d)
    worst = 0.0
    violations = 0
    points = random_ball_points(rng, 2 * trials, params.dim)
    for k in range(trials):
        alpha = rng.integers(0, 2, size=params.d, dtype=np.uint8)
        w, w_prime = points[2 * k], points[2 * k + 1]
        gap = abs(
            inst.loss_value(w, alpha, params) - inst.loss_value(w_prime, alpha, params)
        ) - bound * float(np.linalg.norm(w - w_prime))
        worst = max(worst, gap)
        if gap > 1e-9:
            violations += 1
    return PropertyResult(
        f"lipschitz_bound_{params.variant.value}", trials, violations, max_residual=worst
    )


# ---------------------------------------------------------------------------
# sampling properties


def check_survivor_binomial(
    n: int, d: int, draws: int, rng: np.random.Generator, significance: float = 0.01
) -> PropertyResult:
    """|I(S)| - 1 is Binomial(d, 2^-n): chi-square goodness of fit."""
    bits = rng.integers(0, 2, size=(draws, n, d), dtype=np.uint8)
    counts = (bits.sum(axis=1) == 0).sum(axis=1)
    observed = np.bincount(counts, minlength=d + 1).astype(float)
    expected = stats.binom.pmf(np.arange(d + 1), d, 2.0**-n) * draws

    # merge thin bins so every expected count is >= 5
    obs_bins: list[float] = []
    exp_bins: list[float] = []
    acc_o = acc_e = 0.0
    for o, e in zip(observed, expected):
        acc_o += float(o)
        acc_e += float(e)
        if acc_e >= 5.0:
            obs_bins.append(acc_o)
            exp_bins.append(acc_e)
            acc_o = acc_e = 0.0
    obs_bins[-1] += acc_o
    exp_bins[-1] += acc_e
    obs_arr = np.asarray(obs_bins)
    exp_arr = np.asarray(exp_bins)
    exp_arr *= obs_arr.sum() / exp_arr.sum()
    p_value = float(stats.chisquare(obs_arr, exp_arr).pvalue)
    return PropertyResult(
        "survivor_count_binomial",
        draws,
        0 if p_value >= significance else 1,
        max_residual=p_value,
        detail=f"chi-square p={p_value:.4g} at significance {significance}",
    )


def check_mean_perturbation_exact(
    params: ConstructionParams, trials: int, rng: np.random.Generator
) -> PropertyResult:
    """v_bar equals -1/(2n) bit-exactly on every survivor coordinate."""
    target = -1.0 / (2.0 * params.n)
    violations = 0
    for _ in range(trials):
        sample = draw_sample(params, rng)
        vbar = mean_perturbation(sample)
        if any(vbar[i] != target for i in survivor_set(sample)[:-1]):
            violations += 1
    return PropertyResult("mean_perturbation_survivor_exact", trials, violations)


def check_top_survivors_monotone(
    params: ConstructionParams, trials: int, rng: np.random.Generator
) -> PropertyResult:
    """top_survivors(I, k) is contained in top_survivors(I, k+1)."""
    violations = 0
    for _ in range(trials):
        survivors = survivor_set(draw_sample(params, rng))
        for k in range(survivors.shape[0]):
            small = set(top_survivors(survivors, k).tolist())
            if not small <= set(top_survivors(survivors, k + 1).tolist()):
                violations += 1
    return PropertyResult("top_survivors_monotone", trials, violations)


# ---------------------------------------------------------------------------
# oracle properties


def check_oracle_purity(
    params: ConstructionParams, trials: int, rng: np.random.Generator
) -> PropertyResult:
    """Identical (w, S) produce bitwise-identical oracle answers."""
    violations = 0
    for k in range(trials):
        sample = draw_sample(params, rng)
        w = random_ball_points(rng, 1, params.dim)[0]
        first = full_batch_oracle(w, sample)
        second = full_batch_oracle(w, sample)
        if not np.array_equal(first.grad, second.grad) or first.value != second.value:
            violations += 1
    return PropertyResult("oracle_purity", trials, violations)


def check_per_sample_independence(
    params: ConstructionParams, trials: int, rng: np.random.Generator
) -> PropertyResult:
    """A sample point's subgradient is unchanged by reshuffling its co-samples."""
    violations = 0
    for _ in range(trials):
        sample = draw_sample(params, rng)
        w = random_ball_points(rng, 1, params.dim)[0]
        direct = [inst.loss_subgrad(w, alpha, params) for alpha in sample.alphas]
        for original in rng.permutation(params.n):
            redone = inst.loss_subgrad(w, sample.alphas[original], params)
            if not np.array_equal(redone, direct[original]):
                violations += 1
    return PropertyResult("per_sample_independence", trials, violations)


def _point_with_active_coords(
    params: ConstructionParams, rng: np.random.Generator, max_active: int
) -> np.ndarray:
    """Random unit-ball point with at most ``max_active`` hinge-active coords."""
    w = np.zeros(params.dim)
    count = int(rng.integers(0, max_active + 1))
    chosen = rng.choice(params.d, size=count, replace=False)
    depth_lo = 2.0 * params.gamma2
    depth_hi = max(0.3, 2.5 * params.gamma2)
    w[chosen] = -rng.uniform(depth_lo, depth_hi, size=count)
    others = np.setdiff1d(np.arange(params.d), chosen)
    w[others] = rng.uniform(0.0, 0.05, size=others.shape[0])
    w[-2:] = rng.uniform(-0.3, 0.3, size=2)
    norm = float(np.linalg.norm(w))
    if norm > 1.0:
        w /= norm
        # rescaling can deactivate coordinates; that only lowers the count
    return w


def check_mc_matches_exact(
    params: ConstructionParams,
    points: int,
    rng: np.random.Generator,
    mc_draws: int = 4000,
) -> PropertyResult:
    """Monte-Carlo risk is within 4 standard errors of exact enumeration."""
    violations = 0
    worst = 0.0
    for _ in range(points):
        w = _point_with_active_coords(params, rng, max_active=10)
        exact = population_risk(w, params, mode="exact")
        mc = population_risk(w, params, mode="mc", mc_draws=mc_draws, rng=rng)
        gap = abs(mc.mean - exact.mean)
        worst = max(worst, gap - 4.0 * mc.std_error)
        if gap > 4.0 * mc.std_error:
            violations += 1
    return PropertyResult("mc_matches_exact", points, violations, max_residual=worst)


def check_population_lower_bound(
    params: ConstructionParams,
    points: int,
    rng: np.random.Generator,
    mc_draws: int = 4000,
) -> PropertyResult:
    """F(w) >= (1/2) sqrt(sum h^2) + eps w(d+2) - eps/4 on random unit-ball w.

    Requires the canonical smallness gamma1 sqrt(d) <= eps/2 (the slack the
    perturbation term can eat); refuses otherwise.
    """
    if params.gamma1 * math.sqrt(params.d) > params.eps / 2.0:
        return PropertyResult(
            "population_risk_lower_bound",
            0,
            0,
            status="refused",
            detail="needs gamma1 sqrt(d) <= eps/2",
        )
    violations = 0
    worst_slack = math.inf
    for w in random_ball_points(rng, points, params.dim):
        est = population_risk(w, params, mode="mc", mc_draws=mc_draws, rng=rng)
        h = inst.hinge(w[: params.d], params.gamma2)
        floor = (
            0.5 * float(np.sqrt(np.sum(h * h)))
            + params.eps * float(w[-1])
            - params.eps / 4.0
        )
        slack = est.mean - (floor - 3.0 * est.std_error)
        worst_slack = min(worst_slack, slack)
        if slack < 0:
            violations += 1
    return PropertyResult(
        "population_risk_lower_bound",
        points,
        violations,
        max_residual=max(0.0, -worst_slack),
    )


# ---------------------------------------------------------------------------
# span-lemma trajectory properties


def _span_lemma_preconditions(params: ConstructionParams) -> str | None:
    """Smallness conditions under which the trajectory-confinement claims hold."""
    if params.gamma1 > params.eps * params.gamma2 / 2.0 * (1 + 1e-12):
        return "needs gamma1 <= eps*gamma2/2"
    if params.gamma1 > 1.0 / (4.0 * params.T):
        return "needs gamma1 <= 1/(4T)"
    if params.gamma1 > params.n / params.T:
        return "needs gamma1 <= n/T"
    return None


def check_span_lemma(
    params: ConstructionParams,
    seeds: int,
    rng_factory,
    eta: float | None = None,
) -> list[PropertyResult]:
    """Run span-restricted GD and verify the trajectory-confinement claims.

    Per conditioned sample (|I(S)| > T) and per step t:
      - the returned gradient decomposes as gamma1 v_bar + eps e_{d+2} + e_i
        with recovery residual <= 1e-9 and i among the top t+2 survivors;
      - every per-sample hinge subgradient is exactly zero;
      - the max-term subgradient is e_i with i among the top t+2 survivors;
      - iterate t has residual <= 1e-9 against the top t+1 survivor span.
    """
    reason = _span_lemma_preconditions(params)
    names = [
        "span_lemma_gradient_decomposition",
        "span_lemma_gradient_membership",
        "gzero_claim",
        "rbasis_claim",
        "span_lemma_iterate_residual",
    ]
    if reason is not None:
        return [
            PropertyResult(name, 0, 0, status="refused", detail=reason) for name in names
        ]

    T = params.T
    eta = 1.0 / math.sqrt(T) if eta is None else eta
    counts = {name: 0 for name in names}
    residuals = {name: 0.0 for name in names}
    steps = 0

    for seed_index in range(seeds):
        rng = rng_factory(seed_index)
        sample = draw_conditioned_sample(params, rng, min_survivors=T + 1)
        survivors = survivor_set(sample)
        trajectory = run_full_batch(
            ProjectedGD(params.dim, eta),
            lambda w: full_batch_oracle(w, sample),
            T,
            rng,
        )
        for t, (w_t, answer) in enumerate(zip(trajectory.queries, trajectory.answers)):
            steps += 1
            allowed = set(top_survivors(survivors, min(t + 2, survivors.shape[0])).tolist())

            index, residual = decompose_gradient(answer, sample)
            residuals["span_lemma_gradient_decomposition"] = max(
                residuals["span_lemma_gradient_decomposition"], residual
            )
            if residual > 1e-9:
                counts["span_lemma_gradient_decomposition"] += 1
            if index not in allowed:
                counts["span_lemma_gradient_membership"] += 1

            if any(
                np.any(inst.g_subgrad(w_t, alpha, params.gamma2) != 0.0)
                for alpha in sample.alphas
            ):
                counts["gzero_claim"] += 1

            r_grad = inst.nemirovski_subgrad(w_t, params)
            support = np.flatnonzero(r_grad)
            if support.shape[0] != 1 or int(support[0]) not in allowed:
                counts["rbasis_claim"] += 1

            basis_t = build_basis(sample, t + 1)
            iterate_residual = span_residual(w_t, basis_t)
            residuals["span_lemma_iterate_residual"] = max(
                residuals["span_lemma_iterate_residual"], iterate_residual
            )
            if iterate_residual > 1e-9:
                counts["span_lemma_iterate_residual"] += 1

        output_residual = span_residual(trajectory.output, build_basis(sample, T + 1))
        residuals["span_lemma_iterate_residual"] = max(
            residuals["span_lemma_iterate_residual"], output_residual
        )
        if output_residual > 1e-9:
            counts["span_lemma_iterate_residual"] += 1

    return [
        PropertyResult(name, steps, counts[name], max_residual=residuals[name])
        for name in names
    ]


def check_error_lemma(
    params: ConstructionParams,
    seeds: int,
    rng_factory,
    steps: int = 2000,
    restarts: int = 32,
) -> PropertyResult:
    """Surrogate minimum over every span size k <= T stays above the bound.

    The minimizer is the falsification oracle: a value below
    error_lemma_bound(k, eps) - 1e-6 would witness the bound failing.
    """
    try:
        total = 0
        violations = 0
        min_margin = math.inf
        for seed_index in range(seeds):
            rng = rng_factory(seed_index)
            sample = draw_conditioned_sample(params, rng, min_survivors=params.T + 1)
            for k in range(params.T + 1):
                basis = build_basis(sample, k)
                _, value = minimize_surrogate_over_span(
                    basis, params, rng, steps=steps, restarts=restarts
                )
                bound = error_lemma_bound(k, params.eps)
                total += 1
                min_margin = min(min_margin, value - bound)
                if value < bound - 1e-6:
                    violations += 1
    except ValueError as error:
        return PropertyResult("error_lemma", 0, 0, status="refused", detail=str(error))
    return PropertyResult(
        "error_lemma",
        total,
        violations,
        max_residual=min_margin,
        detail="max_residual is the smallest (value - bound) margin observed",
    )


def check_resilience(
    params: ConstructionParams,
    seeds: int,
    rng_factory,
    perturbations: int = 1000,
    eta: float | None = None,
) -> PropertyResult:
    """Oracle answers are invariant to admissible perturbations of span points.

    Span points are GD iterates plus random span combinations; every one gets
    ``perturbations`` admissible q and must produce zero divergences.
    """
    reason = _span_lemma_preconditions(params)
    if reason is not None:
        return PropertyResult("resilience", 0, 0, status="refused", detail=reason)
    T = params.T
    eta = 1.0 / math.sqrt(T) if eta is None else eta
    total = 0
    violations = 0
    worst_value_diff = 0.0
    for seed_index in range(seeds):
        rng = rng_factory(seed_index)
        sample = draw_conditioned_sample(params, rng, min_survivors=T + 2)
        trajectory = run_full_batch(
            ProjectedGD(params.dim, eta),
            lambda w: full_batch_oracle(w, sample),
            T,
            rng,
        )
        points = [(0, trajectory.queries[0]), (T - 1, trajectory.queries[T - 1])]
        for t in (1, max(1, T // 2)):
            basis = build_basis(sample, t + 1)
            coeff = rng.standard_normal(basis.rank)
            w = basis.ortho.T @ coeff
            norm = float(np.linalg.norm(w))
            if norm > 1.0:
                w /= norm
            points.append((t, w))
        for t, w in points:
            count, value_diff = resilience_check(w, sample, t, perturbations, rng)
            total += perturbations
            violations += count
            worst_value_diff = max(worst_value_diff, value_diff)
    return PropertyResult(
        "resilience", total, violations, max_residual=worst_value_diff
    )

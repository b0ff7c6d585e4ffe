"""Span and projection machinery for the trajectory-confinement analysis.

A span basis is generated by vectors gamma1*v_bar + eps*e_{d+2} + e_i with i
ranging over the top-k survivor coordinates.  The generators share the affine
part gamma1*v_bar + eps*e_{d+2}, so plain Gram-Schmidt loses accuracy;
orthonormalization here is modified Gram-Schmidt with a re-orthogonalization
pass, dropping dependent vectors.

The error-lemma machinery provides the closed-form bound and a projected-
subgradient minimizer of the surrogate risk over the span, which serves as
the numerical falsification oracle for that bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .instance import ConstructionParams, hinge
from .oracle import OracleAnswer, full_batch_oracle
from .sampling import Sample, mean_perturbation, survivor_set, top_survivors

__all__ = [
    "SpanBasis",
    "SpanPreconditionError",
    "build_basis",
    "project",
    "span_residual",
    "decompose_gradient",
    "error_lemma_bound",
    "minimize_surrogate_over_span",
    "resilience_check",
    "resilience_radius",
]

_DEPENDENT_TOL = 1e-12


class SpanPreconditionError(ValueError):
    """A span-restricted routine was called off the span it requires."""


@dataclass(frozen=True)
class SpanBasis:
    """Raw generators, their orthonormalized basis, and the generating indices."""

    generators: np.ndarray  # (k, dim)
    ortho: np.ndarray       # (r, dim), orthonormal rows, r <= k
    index_set: np.ndarray   # (k,) survivor indices, ascending

    @property
    def size(self) -> int:
        """Number of generators (the span cardinality k, not the rank)."""
        return self.generators.shape[0]

    @property
    def rank(self) -> int:
        return self.ortho.shape[0]


def _orthonormalize(vectors: np.ndarray) -> np.ndarray:
    """Modified Gram-Schmidt with one re-orthogonalization pass."""
    rows = []
    for v in vectors:
        u = v.astype(float).copy()
        for _ in range(2):
            for q in rows:
                u -= (q @ u) * q
        norm = float(np.linalg.norm(u))
        if norm < _DEPENDENT_TOL:
            continue
        rows.append(u / norm)
    if not rows:
        return np.empty((0, vectors.shape[1]))
    return np.stack(rows)


def build_basis(sample: Sample, k: int) -> SpanBasis:
    """Basis of span{gamma1*v_bar + eps*e_{d+2} + e_i} over the top-k survivors."""
    params = sample.params
    indices = top_survivors(survivor_set(sample), k)
    affine = params.gamma1 * mean_perturbation(sample)
    affine[-1] += params.eps
    generators = np.tile(affine, (k, 1))
    for row, i in enumerate(indices):
        generators[row, i] += 1.0
    if k == 0:
        generators = np.empty((0, params.dim))
    return SpanBasis(
        generators=generators,
        ortho=_orthonormalize(generators),
        index_set=indices,
    )


def project(w: np.ndarray, basis: SpanBasis) -> np.ndarray:
    """Euclidean projection onto span(basis); identically 0 for an empty basis."""
    w = np.asarray(w, dtype=float)
    if basis.rank == 0:
        return np.zeros_like(w)
    return basis.ortho.T @ (basis.ortho @ w)


def span_residual(w: np.ndarray, basis: SpanBasis) -> float:
    """||w - project(w, basis)||_2."""
    w = np.asarray(w, dtype=float)
    return float(np.linalg.norm(w - project(w, basis)))


def decompose_gradient(answer: OracleAnswer, sample: Sample) -> tuple[int, float]:
    """Recover the basis-vector index from a trajectory gradient.

    Subtracts the known affine part gamma1*v_bar + eps*e_{d+2} and returns
    (i, residual) where residual = ||remainder - e_i|| for the best i.
    """
    params = sample.params
    remainder = answer.grad - params.gamma1 * mean_perturbation(sample)
    remainder[-1] -= params.eps
    i = int(np.argmax(remainder))
    remainder[i] -= 1.0
    return i, float(np.linalg.norm(remainder))


def error_lemma_bound(T: int, eps: float) -> float:
    """min{1 - 2 eps^2 sqrt(T), 0} - eps/2."""
    if T < 0:
        raise ValueError(f"T must be >= 0, got {T}")
    if not eps > 0:
        raise ValueError(f"eps must be > 0, got {eps}")
    return min(1.0 - 2.0 * eps * eps * math.sqrt(T), 0.0) - 0.5 * eps


def surrogate_value(w: np.ndarray, params: ConstructionParams) -> float:
    """(1/2) sqrt(sum_i hinge(w(i))^2) + eps * w[d+1]: the population surrogate."""
    h = hinge(np.asarray(w, dtype=float)[: params.d], params.gamma2)
    return 0.5 * float(np.sqrt(np.sum(h * h))) + params.eps * float(w[-1])


def _check_error_lemma_preconditions(params: ConstructionParams):
    if params.gamma1 > 2.0 * params.n * params.eps * params.gamma2 * (1 + 1e-12):
        raise ValueError(
            f"error-lemma precondition gamma1 <= 2 n eps gamma2 violated: "
            f"{params.gamma1} > {2.0 * params.n * params.eps * params.gamma2}"
        )
    limit = params.eps / math.sqrt(4.0 * params.T)
    if params.gamma2 > limit * (1 + 1e-12):
        raise ValueError(
            f"error-lemma precondition gamma2 <= eps/sqrt(4T) violated: "
            f"{params.gamma2} > {limit}"
        )


def minimize_surrogate_over_span(
    basis: SpanBasis,
    params: ConstructionParams,
    rng: np.random.Generator,
    steps: int = 2000,
    restarts: int = 32,
) -> tuple[np.ndarray, float]:
    """Minimize the surrogate over unit-ball points of the span.

    Batched projected subgradient descent with random restarts and step size
    1/sqrt(t); the surrogate is convex on the span, so the best value found
    upper-bounds the true minimum and falsifies the error-lemma bound if that
    bound were wrong.  Returns (w_best, value) with the value re-evaluated
    over all d coordinates.
    """
    _check_error_lemma_preconditions(params)
    if basis.rank == 0:
        return np.zeros(params.dim), 0.0

    # only coordinates in the index set (plus the linear coordinate) can be
    # hinge-active for feasible span points; optimize on those rows and
    # verify the claim on the final point below
    coords = [int(i) for i in basis.index_set if i < params.d]
    rows = basis.ortho[:, coords + [params.dim - 1]]  # (r, m+1)
    r = basis.rank
    m = len(coords)

    coeff = rng.standard_normal((restarts, r))
    coeff /= np.maximum(np.linalg.norm(coeff, axis=1, keepdims=True), 1.0)
    coeff[0] = 0.0
    best_val = np.full(restarts, np.inf)
    best_coeff = coeff.copy()

    for t in range(1, steps + 1):
        local = coeff @ rows  # (restarts, m+1)
        h = np.where(local[:, :m] >= -params.gamma2, 0.0, local[:, :m] + params.gamma2)
        norms = np.sqrt((h * h).sum(axis=1))
        vals = 0.5 * norms + params.eps * local[:, -1]

        improved = vals < best_val
        best_val = np.where(improved, vals, best_val)
        best_coeff = np.where(improved[:, None], coeff, best_coeff)

        grad_local = np.zeros_like(local)
        safe = norms > 0.0
        grad_local[safe, :m] = 0.5 * h[safe] / norms[safe, None]
        grad_local[:, -1] = params.eps
        coeff = coeff - (1.0 / math.sqrt(t)) * (grad_local @ rows.T)
        radii = np.linalg.norm(coeff, axis=1)
        coeff /= np.maximum(radii, 1.0)[:, None]

    winner = int(np.argmin(best_val))
    w_best = basis.ortho.T @ best_coeff[winner]
    value = surrogate_value(w_best, params)
    # the reduced-coordinate shortcut must not have hidden active coordinates
    other = np.setdiff1d(np.arange(params.d), np.asarray(coords, dtype=int))
    if other.size and float(w_best[other].min()) < -params.gamma2:
        raise AssertionError("surrogate reduction missed an active coordinate")
    return w_best, value


def resilience_radius(params: ConstructionParams) -> float:
    """Sup-norm perturbation size under which oracle answers may not move.

    (1 / (4 sqrt(d))) * min{gamma2/3, gamma1*gamma3/(16 d n)}, the stated
    (tighter) threshold.
    """
    inner = min(
        params.gamma2 / 3.0,
        params.gamma1 * params.gamma3 / (16.0 * params.d * params.n),
    )
    return inner / (4.0 * math.sqrt(params.d))


def resilience_check(
    w_t: np.ndarray,
    sample: Sample,
    t: int,
    trials: int,
    rng: np.random.Generator,
) -> tuple[int, float]:
    """Perturbation resilience of the oracle around a span point.

    For ``trials`` random q with ||q||_inf below the resilience radius,
    compares the oracle at w_t + q against the oracle at the projection of
    w_t + q onto the next span (bitwise in grad, 1e-12 in value).  Returns
    (violations, max |value difference|); the theory predicts 0 violations.
    """
    params = sample.params
    survivors = survivor_set(sample)
    if survivors.shape[0] <= t + 1:
        raise SpanPreconditionError(
            f"need |I(S)| > t+1 = {t + 1}, got {survivors.shape[0]}"
        )
    basis_t = build_basis(sample, t + 1)
    if span_residual(np.asarray(w_t, dtype=float), basis_t) > 1e-9:
        raise SpanPreconditionError("w_t is not in the step-t span")
    basis_next = build_basis(sample, t + 2)

    radius = resilience_radius(params)
    violations = 0
    max_value_diff = 0.0
    for _ in range(trials):
        q = rng.uniform(-radius, radius, size=params.dim)
        direct = full_batch_oracle(w_t + q, sample)
        projected = full_batch_oracle(project(w_t + q, basis_next), sample)
        value_diff = abs(direct.value - projected.value)
        max_value_diff = max(max_value_diff, value_diff)
        if not np.array_equal(direct.grad, projected.grad) or value_diff > 1e-12:
            violations += 1
    return violations, max_value_diff

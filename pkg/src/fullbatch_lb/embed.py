"""Random orthogonal embedding and its diagnostic probes.

Embedding composes the instance with U^T for a Haar-random column-orthonormal
U, which defeats algorithms that exploit fixed coordinate directions: the
pull-back of any query direction the algorithm invents is spread thinly
across the base space.  The leakage probe measures exactly that spread, and
the arbitration runner counts how often an algorithm's oracle answers differ
from the answers a span-projecting oracle would have given.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .oracle import DOMAIN_TOL, DomainViolationError, OracleAnswer, full_batch_oracle
from .optim import FullBatchAlgorithm, project_unit_ball
from .sampling import Sample, survivor_set
from .spanlab import SpanBasis, build_basis, project

__all__ = [
    "OrthoEmbedding",
    "ArbitrationResult",
    "MAX_MATRIX_ENTRIES",
    "sample_orthogonal",
    "embedded_oracle",
    "leakage",
    "leakage_tail_bound",
    "arbitration_divergence",
]

MAX_MATRIX_ENTRIES = 10**8


@dataclass(frozen=True)
class OrthoEmbedding:
    """Column-orthonormal U in R^(d2 x d); U^T pulls queries back to R^d."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] < m.shape[1]:
            raise ValueError(f"embedding matrix must be tall, got shape {m.shape}")
        object.__setattr__(self, "matrix", m)

    @property
    def d2(self) -> int:
        return self.matrix.shape[0]

    @property
    def d(self) -> int:
        return self.matrix.shape[1]


def sample_orthogonal(d: int, d2: int, rng: np.random.Generator) -> OrthoEmbedding:
    """Haar-random column-orthonormal d2 x d matrix.

    QR of a standard Gaussian matrix with the usual sign correction (each
    column multiplied by the sign of the corresponding diagonal of R), which
    makes the distribution exactly Haar rather than merely orthonormal.
    """
    if d < 1 or d2 < d:
        raise ValueError(f"need 1 <= d <= d2, got d={d}, d2={d2}")
    if d * d2 > MAX_MATRIX_ENTRIES:
        raise ValueError(
            f"dense embedding with {d * d2} entries exceeds the {MAX_MATRIX_ENTRIES} cap"
        )
    gauss = rng.standard_normal((d2, d))
    q, r = np.linalg.qr(gauss, mode="reduced")
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return OrthoEmbedding(matrix=q * signs)


def embedded_oracle(w: np.ndarray, emb: OrthoEmbedding, sample: Sample) -> OracleAnswer:
    """Full-batch oracle for the embedded empirical risk F_S(U^T w).

    Value is the empirical risk at the pulled-back point; the gradient is
    pushed forward through U (chain rule).
    """
    w = np.asarray(w, dtype=float)
    if w.shape != (emb.d2,):
        raise ValueError(f"query has shape {w.shape}, expected ({emb.d2},)")
    if float(np.linalg.norm(w)) > 1.0 + DOMAIN_TOL:
        raise DomainViolationError("embedded query outside the unit ball")
    if emb.d != sample.params.dim:
        raise ValueError(
            f"embedding base dimension {emb.d} != instance dimension {sample.params.dim}"
        )
    inner = full_batch_oracle(emb.matrix.T @ w, sample)
    return OracleAnswer(grad=emb.matrix @ inner.grad, value=inner.value)


def leakage(w: np.ndarray, emb: OrthoEmbedding, basis: SpanBasis) -> float:
    """||(I - Pi) U^T w||_inf: the pulled-back query mass outside span(basis)."""
    w = np.asarray(w, dtype=float)
    pulled = emb.matrix.T @ w
    return float(np.abs(pulled - project(pulled, basis)).max())


def leakage_tail_bound(d: int, k: int, d2: int, c: float) -> float:
    """Tail bound 2 d2 exp(-(c^2 / 2d) (d2 - k + 1)) on Pr(leakage > c).

    ``d`` is the base dimension the subspace lives in (d+2 for embedded
    instances), ``k`` the subspace dimension.
    """
    return 2.0 * d2 * math.exp(-(c * c / (2.0 * d)) * (d2 - k + 1))


@dataclass(frozen=True)
class ArbitrationResult:
    divergences: int        # steps whose answers differ (grad bitwise or value > 1e-12)
    grad_divergences: int   # steps whose gradients differ bitwise
    steps: int
    queries_direct: list[np.ndarray]
    queries_projected: list[np.ndarray]


def arbitration_divergence(
    make_algorithm: Callable[[], FullBatchAlgorithm],
    emb: OrthoEmbedding,
    sample: Sample,
    T: int,
    rng_factory: Callable[[], np.random.Generator],
) -> ArbitrationResult:
    """Divergence count between the plain and the span-projecting oracle.

    Runs the algorithm twice with shared randomness: once against the
    embedded oracle, once against the arbitrated oracle that answers query i
    at the projection of its pull-back onto the span of the top 2i survivor
    generators.  At the infeasible embedding dimension the theory predicts
    zero divergences with high probability; at desk scale the count is the
    reported observable.
    """
    params = sample.params
    survivors = survivor_set(sample)
    if survivors.shape[0] <= 2 * T:
        raise ValueError(f"need |I(S)| > 2T = {2 * T}, got {survivors.shape[0]}")

    bases = [build_basis(sample, 2 * i) for i in range(T)]

    def run(projecting: bool) -> list[tuple[np.ndarray, OracleAnswer]]:
        algorithm = make_algorithm()
        rng = rng_factory()
        history: list[tuple[np.ndarray, OracleAnswer]] = []
        for i in range(T):
            w = np.asarray(algorithm.next_query(history, rng), dtype=float)
            if float(np.linalg.norm(w)) > 1.0 + DOMAIN_TOL:
                w = project_unit_ball(w)
            if projecting:
                v = project(emb.matrix.T @ w, bases[i])
                inner = full_batch_oracle(v, sample)
                answer = OracleAnswer(grad=emb.matrix @ inner.grad, value=inner.value)
            else:
                answer = embedded_oracle(w, emb, sample)
            history.append((w, answer))
        return history

    direct = run(projecting=False)
    projected = run(projecting=True)

    divergences = 0
    grad_divergences = 0
    for (_, a), (_, b) in zip(direct, projected):
        grads_differ = not np.array_equal(a.grad, b.grad)
        if grads_differ:
            grad_divergences += 1
        if grads_differ or abs(a.value - b.value) > 1e-12:
            divergences += 1
    return ArbitrationResult(
        divergences=divergences,
        grad_divergences=grad_divergences,
        steps=T,
        queries_direct=[w for w, _ in direct],
        queries_projected=[w for w, _ in projected],
    )

"""The algorithm zoo: full-batch methods and the per-sample SGD baseline.

A full-batch algorithm is any query policy whose next query depends only on
the history of (query, oracle answer) pairs and its own randomness -- never
on the sample.  The runner enforces that structurally: algorithms are
constructed without a sample reference and receive nothing but answers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .oracle import DOMAIN_TOL, OracleAnswer, sample_oracle
from .sampling import Sample

__all__ = [
    "FullBatchAlgorithm",
    "Trajectory",
    "project_unit_ball",
    "ProjectedGD",
    "RegularizedGD",
    "NoisyGD",
    "HeavyBall",
    "AxisProbeGD",
    "run_full_batch",
    "sgd",
    "make_algorithm",
]

History = Sequence[tuple[np.ndarray, OracleAnswer]]


def project_unit_ball(w: np.ndarray) -> np.ndarray:
    """Radial projection onto the unit Euclidean ball."""
    norm = float(np.linalg.norm(w))
    return w if norm <= 1.0 else w / norm


def _step_size(eta, t: int) -> float:
    """Evaluate a step-size schedule (constant or callable on 1-based t)."""
    return float(eta(t)) if callable(eta) else float(eta)


class FullBatchAlgorithm:
    """Behavioral contract for query policies in the full-batch class."""

    dim: int

    def next_query(self, history: History, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def output(self, history: History) -> np.ndarray:
        """Default output: uniform average of the queries."""
        if not history:
            return np.zeros(self.dim)
        return np.mean([w for w, _ in history], axis=0)


@dataclass(frozen=True)
class Trajectory:
    queries: list[np.ndarray]
    answers: list[OracleAnswer]
    output: np.ndarray
    oracle_calls: int
    domain_warnings: int = 0


class ProjectedGD(FullBatchAlgorithm):
    """w_0 = 0; w_t = Pi[w_{t-1} - eta_t * grad_{t-1}]; averaged or last output."""

    def __init__(self, dim: int, eta, averaging: str = "uniform"):
        if averaging not in ("uniform", "last"):
            raise ValueError(f"averaging must be 'uniform' or 'last', got {averaging!r}")
        self.dim = dim
        self.eta = eta
        self.averaging = averaging

    def next_query(self, history: History, rng: np.random.Generator) -> np.ndarray:
        if not history:
            return np.zeros(self.dim)
        w_prev, ans_prev = history[-1]
        return project_unit_ball(w_prev - _step_size(self.eta, len(history)) * ans_prev.grad)

    def output(self, history: History) -> np.ndarray:
        if not history:
            return np.zeros(self.dim)
        if self.averaging == "last":
            return history[-1][0]
        return np.mean([w for w, _ in history], axis=0)


class RegularizedGD(FullBatchAlgorithm):
    """Descent on the l2-regularized empirical risk, verbatim update rule:

    w_{t+1} = Pi[(1 - eta_t) * (2 lambda w_t) - eta_t * grad_t].
    """

    def __init__(self, dim: int, lam: float, eta, averaging: str = "uniform"):
        if lam < 0:
            raise ValueError(f"lambda must be >= 0, got {lam}")
        self.dim = dim
        self.lam = lam
        self.eta = eta
        self.averaging = averaging

    def next_query(self, history: History, rng: np.random.Generator) -> np.ndarray:
        if not history:
            return np.zeros(self.dim)
        w_prev, ans_prev = history[-1]
        eta_t = _step_size(self.eta, len(history))
        return project_unit_ball(
            (1.0 - eta_t) * (2.0 * self.lam * w_prev) - eta_t * ans_prev.grad
        )

    def output(self, history: History) -> np.ndarray:
        if not history:
            return np.zeros(self.dim)
        if self.averaging == "last":
            return history[-1][0]
        return np.mean([w for w, _ in history], axis=0)


class NoisyGD(FullBatchAlgorithm):
    """GD with data-independent Gaussian noise added before projecting."""

    def __init__(self, dim: int, eta, noise_std: float):
        if noise_std < 0:
            raise ValueError(f"noise_std must be >= 0, got {noise_std}")
        self.dim = dim
        self.eta = eta
        self.noise_std = noise_std

    def next_query(self, history: History, rng: np.random.Generator) -> np.ndarray:
        if not history:
            return np.zeros(self.dim)
        w_prev, ans_prev = history[-1]
        step = w_prev - _step_size(self.eta, len(history)) * ans_prev.grad
        if self.noise_std > 0:
            step = step + self.noise_std * rng.standard_normal(self.dim)
        return project_unit_ball(step)


class HeavyBall(FullBatchAlgorithm):
    """GD with momentum: w_{t+1} = Pi[w_t - eta grad_t + mu (w_t - w_{t-1})]."""

    def __init__(self, dim: int, eta, momentum: float):
        if not 0.0 <= momentum < 1.0:
            raise ValueError(f"momentum must be in [0, 1), got {momentum}")
        self.dim = dim
        self.eta = eta
        self.momentum = momentum

    def next_query(self, history: History, rng: np.random.Generator) -> np.ndarray:
        if not history:
            return np.zeros(self.dim)
        w_prev, ans_prev = history[-1]
        w_before = history[-2][0] if len(history) >= 2 else np.zeros(self.dim)
        step = (
            w_prev
            - _step_size(self.eta, len(history)) * ans_prev.grad
            + self.momentum * (w_prev - w_before)
        )
        return project_unit_ball(step)


class AxisProbeGD(FullBatchAlgorithm):
    """GD whose queries carry a fixed-size probe along a random coordinate axis.

    The probe is data-independent internal randomness, so the policy stays in
    the full-batch class, but its queries leave the span of observed
    gradients by design.  Used by the arbitration experiment.
    """

    def __init__(self, dim: int, eta, probe_scale: float = 0.05):
        if probe_scale < 0:
            raise ValueError(f"probe_scale must be >= 0, got {probe_scale}")
        self.dim = dim
        self.eta = eta
        self.probe_scale = probe_scale

    def next_query(self, history: History, rng: np.random.Generator) -> np.ndarray:
        probe = np.zeros(self.dim)
        if self.probe_scale > 0:
            probe[int(rng.integers(self.dim))] = self.probe_scale * (
                1.0 if rng.random() < 0.5 else -1.0
            )
        if not history:
            return project_unit_ball(probe)
        w_prev, ans_prev = history[-1]
        return project_unit_ball(
            w_prev - _step_size(self.eta, len(history)) * ans_prev.grad + probe
        )


def run_full_batch(
    algorithm: FullBatchAlgorithm,
    oracle: Callable[[np.ndarray], OracleAnswer],
    T: int,
    rng: np.random.Generator,
) -> Trajectory:
    """Drive the query/answer loop for exactly T oracle calls.

    Audits the domain: a query outside the unit ball (beyond tolerance) is
    projected back and counted in ``domain_warnings``.
    """
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    history: list[tuple[np.ndarray, OracleAnswer]] = []
    warnings = 0
    for _ in range(T):
        w = np.asarray(algorithm.next_query(history, rng), dtype=float)
        if float(np.linalg.norm(w)) > 1.0 + DOMAIN_TOL:
            warnings += 1
            w = project_unit_ball(w)
        history.append((w, oracle(w)))
    return Trajectory(
        queries=[w for w, _ in history],
        answers=[a for _, a in history],
        output=algorithm.output(history),
        oracle_calls=T,
        domain_warnings=warnings,
    )


def sgd(
    sample: Sample,
    eta,
    rng: np.random.Generator | None = None,
) -> Trajectory:
    """One-pass SGD over the sample: explicitly NOT a full-batch algorithm.

    Takes n steps, one per sample point (in rng-shuffled order when a stream
    is given), and outputs the uniform average of the post-step iterates.
    """
    params = sample.params
    order = np.arange(params.n)
    if rng is not None:
        order = rng.permutation(params.n)
    w = np.zeros(params.dim)
    queries: list[np.ndarray] = []
    answers: list[OracleAnswer] = []
    iterates = []
    for t, idx in enumerate(order, start=1):
        answer = sample_oracle(w, sample.alphas[idx], params)
        queries.append(w)
        answers.append(answer)
        w = project_unit_ball(w - _step_size(eta, t) * answer.grad)
        iterates.append(w)
    return Trajectory(
        queries=queries,
        answers=answers,
        output=np.mean(iterates, axis=0),
        oracle_calls=params.n,
    )


def make_algorithm(name: str, dim: int, options: dict | None = None) -> FullBatchAlgorithm:
    """Instantiate a zoo algorithm from a config entry (name + parameters)."""
    opts = dict(options or {})
    eta = opts.pop("eta", 0.1)
    if name == "projected_gd":
        return ProjectedGD(dim, eta, averaging=opts.pop("averaging", "uniform"))
    if name == "regularized_gd":
        return RegularizedGD(
            dim, lam=opts.pop("lam", 0.1), eta=eta, averaging=opts.pop("averaging", "uniform")
        )
    if name == "noisy_gd":
        return NoisyGD(dim, eta, noise_std=opts.pop("noise_std", 0.01))
    if name == "heavy_ball":
        return HeavyBall(dim, eta, momentum=opts.pop("momentum", 0.5))
    if name == "axis_probe_gd":
        return AxisProbeGD(dim, eta, probe_scale=opts.pop("probe_scale", 0.05))
    raise ValueError(f"unknown algorithm {name!r}")

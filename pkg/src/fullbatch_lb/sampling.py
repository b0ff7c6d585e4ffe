"""Sampling from D and survivor-set machinery.

The data distribution draws each bit of alpha i.i.d. Bernoulli(1/2).  The
survivor set of a sample collects every coordinate that no sample point
activates, plus the sentinel coordinate d (0-based); those are exactly the
directions in which the empirical risk carries no hinge signal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .instance import ConstructionParams

__all__ = [
    "Sample",
    "InsufficientSurvivorsError",
    "draw_sample",
    "survivor_set",
    "top_survivors",
    "mean_perturbation",
    "concentration_probe",
]


class InsufficientSurvivorsError(ValueError):
    """Raised when more survivor coordinates are requested than exist."""


@dataclass(frozen=True)
class Sample:
    """n alpha rows (shape (n, d), entries in {0,1}) plus their parameters."""

    alphas: np.ndarray
    params: ConstructionParams

    def __post_init__(self):
        alphas = np.asarray(self.alphas, dtype=np.uint8)
        if alphas.ndim != 2 or alphas.shape != (self.params.n, self.params.d):
            raise ValueError(
                f"alphas must have shape (n, d) = ({self.params.n}, {self.params.d}), "
                f"got {alphas.shape}"
            )
        if not np.isin(alphas, (0, 1)).all():
            raise ValueError("alpha entries must be 0 or 1")
        object.__setattr__(self, "alphas", alphas)

    @property
    def n(self) -> int:
        return self.params.n


def draw_sample(params: ConstructionParams, rng: np.random.Generator) -> Sample:
    """Draw n alpha rows with i.i.d. Bernoulli(1/2) bits."""
    if params.n < 1:
        raise ValueError(f"sample size must be >= 1, got {params.n}")
    alphas = rng.integers(0, 2, size=(params.n, params.d), dtype=np.uint8)
    return Sample(alphas=alphas, params=params)


def survivor_set(sample: Sample) -> np.ndarray:
    """Sorted coordinates never activated by the sample, plus the sentinel d."""
    untouched = np.flatnonzero(sample.alphas.sum(axis=0) == 0)
    return np.append(untouched, sample.params.d).astype(np.int64)


def top_survivors(indices: np.ndarray, k: int) -> np.ndarray:
    """The k largest members of a sorted survivor set.

    The cardinality is the caller's choice because the two parts of the
    analysis index these sets with an off-by-one difference.
    """
    indices = np.asarray(indices, dtype=np.int64)
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    if k > indices.shape[0]:
        raise InsufficientSurvivorsError(
            f"requested {k} survivors but only {indices.shape[0]} available"
        )
    if k == 0:
        return np.empty(0, dtype=np.int64)
    return indices[-k:]


def mean_perturbation(sample: Sample) -> np.ndarray:
    """v_bar = (1/n) sum of perturbation vectors over the sample.

    Survivor coordinates come out exactly -1/(2n); a coordinate hit by c >= 1
    rows equals (c - (n - c)/(2n)) / n, which lies in (0, 1].
    """
    n = sample.params.n
    half = 1.0 / (2.0 * n)
    counts = sample.alphas.sum(axis=0).astype(float)
    vbar = np.where(counts == 0, -half, (counts - (n - counts) * half) / n)
    return np.concatenate([vbar, [0.0, 0.0]])


def concentration_probe(
    n: int,
    d: int,
    T: int,
    trials: int,
    rng: np.random.Generator,
    chunk: int = 256,
) -> float:
    """Empirical Pr(|I(S)| > 2T) over i.i.d. sample draws.

    |I(S)| - 1 is Binomial(d, 2^-n), so with d >= max{16, 4T} * 2^n the true
    probability is at least 3/4.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if n < 1 or d < 1 or T < 0:
        raise ValueError(f"need n >= 1, d >= 1, T >= 0; got n={n}, d={d}, T={T}")
    hits = 0
    done = 0
    while done < trials:
        m = min(chunk, trials - done)
        bits = rng.integers(0, 2, size=(m, n, d), dtype=np.uint8)
        survivors = (bits.sum(axis=1) == 0).sum(axis=1) + 1
        hits += int((survivors > 2 * T).sum())
        done += m
    return hits / trials

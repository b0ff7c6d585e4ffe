"""The hard loss-function family.

One sample point is ``z = (alpha, eps, gamma)`` with ``alpha`` a d-bit vector.
The loss at ``w`` in R^(d+2) is the sum of four convex terms:

    f(w; z) = g(w; alpha) + gamma1 * <v_alpha, w> + eps * w[d+1] + r(w)

where ``g`` is a hinge-norm over the coordinates selected by alpha, ``v_alpha``
is a +-perturbation vector, the linear term rewards pushing the last
coordinate negative, and ``r`` is a (possibly biased) Nemirovski max-term over
the first d+1 coordinates.  The ``full`` variant biases ``r`` with strictly
increasing offsets so the argmax index is controlled even under small query
perturbations; the ``simple`` variant has no offsets.

Coordinates are 0-based throughout: ``0..d-1`` carry the alpha/hinge/
perturbation structure, ``d`` is the Nemirovski sentinel, ``d+1`` is the
linear coordinate.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Variant",
    "ConstructionParams",
    "canonical_params",
    "hinge",
    "g_value",
    "g_subgrad",
    "nemirovski_value",
    "nemirovski_subgrad",
    "perturbation_vector",
    "loss_value",
    "loss_subgrad",
]


class Variant(str, enum.Enum):
    SIMPLE = "simple"
    FULL = "full"


@dataclass(frozen=True)
class ConstructionParams:
    """All scalars defining one member of the hard-instance family."""

    n: int
    d: int
    T: int
    eps: float
    gamma1: float
    gamma2: float
    gamma3: float
    variant: Variant = Variant.FULL

    def __post_init__(self):
        for name in ("n", "d", "T"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        for name in ("eps", "gamma1", "gamma2", "gamma3"):
            value = getattr(self, name)
            if not (value > 0.0) or not math.isfinite(value):
                raise ValueError(f"{name} must be strictly positive, got {value!r}")
        object.__setattr__(self, "variant", Variant(self.variant))

    @property
    def dim(self) -> int:
        """Ambient dimension d + 2."""
        return self.d + 2

    def offsets(self) -> np.ndarray:
        """Nemirovski offsets sigma_1..sigma_{d+1} (0-based array of length d+1).

        Full variant: sigma_i = i * gamma1*gamma3 / (4 d n) for i in 1..d and
        sigma_{d+1} = 2*gamma3.  Simple variant: all zero.
        """
        if self.variant is Variant.SIMPLE:
            return np.zeros(self.d + 1)
        scale = self.gamma1 * self.gamma3 / (4.0 * self.d * self.n)
        sigma = np.arange(1, self.d + 2, dtype=float) * scale
        sigma[self.d] = 2.0 * self.gamma3
        return sigma

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "T": self.T,
            "eps": self.eps,
            "gamma1": self.gamma1,
            "gamma2": self.gamma2,
            "gamma3": self.gamma3,
            "variant": self.variant.value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ConstructionParams":
        return cls(
            n=int(data["n"]),
            d=int(data["d"]),
            T=int(data["T"]),
            eps=float(data["eps"]),
            gamma1=float(data["gamma1"]),
            gamma2=float(data["gamma2"]),
            gamma3=float(data["gamma3"]),
            variant=Variant(data.get("variant", "full")),
        )


def canonical_params(eps: float, T: int, d: int, n: int) -> ConstructionParams:
    """Parameters on the canonical schedule.

    gamma2 = eps / (T sqrt(d)),  gamma1 = eps * gamma2 / 4,  gamma3 = eps / 16.
    """
    if not eps > 0:
        raise ValueError(f"eps must be > 0, got {eps!r}")
    if T < 1 or d < 1 or n < 1:
        raise ValueError(f"T, d, n must be >= 1, got T={T}, d={d}, n={n}")
    gamma2 = eps / (T * math.sqrt(d))
    gamma1 = eps * gamma2 / 4.0
    gamma3 = eps / 16.0
    return ConstructionParams(
        n=n, d=d, T=T, eps=eps,
        gamma1=gamma1, gamma2=gamma2, gamma3=gamma3,
        variant=Variant.FULL,
    )


def hinge(a, gamma2: float):
    """One-sided hinge: 0 for a >= -gamma2 (boundary inclusive), a + gamma2 below.

    Nonpositive, nondecreasing, 1-Lipschitz.  Accepts scalars or arrays.
    """
    a = np.asarray(a, dtype=float)
    out = np.where(a >= -gamma2, 0.0, a + gamma2)
    return float(out) if out.ndim == 0 else out


def _check_lengths(w: np.ndarray, alpha: np.ndarray):
    if w.shape != (alpha.shape[0] + 2,):
        raise ValueError(
            f"point has shape {w.shape}, expected ({alpha.shape[0] + 2},) "
            f"for a {alpha.shape[0]}-bit alpha"
        )


def g_value(w: np.ndarray, alpha: np.ndarray, gamma2: float) -> float:
    """Hinge-norm sqrt(sum_i alpha(i) * hinge(w(i))^2) over the first d coords."""
    w = np.asarray(w, dtype=float)
    alpha = np.asarray(alpha)
    _check_lengths(w, alpha)
    h = hinge(w[: alpha.shape[0]], gamma2)
    return float(np.sqrt(np.sum(alpha * h * h)))


def g_subgrad(w: np.ndarray, alpha: np.ndarray, gamma2: float) -> np.ndarray:
    """Subgradient of the hinge-norm; the zero vector wherever g vanishes.

    At the square-root kink (g = 0) the zero vector is a valid subgradient;
    at the hinge kink the flat branch is used, which the hinge factor already
    encodes (h = 0 there).  The result always has norm <= 1.
    """
    w = np.asarray(w, dtype=float)
    alpha = np.asarray(alpha)
    _check_lengths(w, alpha)
    d = alpha.shape[0]
    grad = np.zeros(d + 2)
    h = hinge(w[:d], gamma2)
    value = float(np.sqrt(np.sum(alpha * h * h)))
    if value > 0.0:
        grad[:d] = alpha * h / value
    return grad


def nemirovski_value(w: np.ndarray, params: ConstructionParams) -> float:
    """max{0, max_{i<=d+1} (w(i) + sigma_i)} with variant-dependent offsets."""
    w = np.asarray(w, dtype=float)
    if w.shape != (params.dim,):
        raise ValueError(f"point has shape {w.shape}, expected ({params.dim},)")
    shifted = w[: params.d + 1] + params.offsets()
    return max(float(shifted.max()), 0.0)


def nemirovski_subgrad(w: np.ndarray, params: ConstructionParams) -> np.ndarray:
    """Subgradient oracle for the max-term.

    Whenever the coordinate max is >= 0, returns e_i for the LARGEST index i
    attaining it (exact float comparison, never the constant-0 branch on
    ties); otherwise the function is locally constant and the zero vector is
    returned.
    """
    w = np.asarray(w, dtype=float)
    if w.shape != (params.dim,):
        raise ValueError(f"point has shape {w.shape}, expected ({params.dim},)")
    shifted = w[: params.d + 1] + params.offsets()
    top = float(shifted.max())
    grad = np.zeros(params.dim)
    if top >= 0.0:
        i_star = int(np.flatnonzero(shifted == top)[-1])
        grad[i_star] = 1.0
    return grad


def perturbation_vector(alpha: np.ndarray, n: int) -> np.ndarray:
    """v_alpha: +1 where alpha(i)=1, -1/(2n) where alpha(i)=0, 0 on the last two."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    alpha = np.asarray(alpha)
    v = np.zeros(alpha.shape[0] + 2)
    v[: alpha.shape[0]] = np.where(alpha == 1, 1.0, -1.0 / (2.0 * n))
    return v


def loss_value(w: np.ndarray, alpha: np.ndarray, params: ConstructionParams) -> float:
    """Value of the four-term loss at w for the sample point alpha."""
    w = np.asarray(w, dtype=float)
    alpha = np.asarray(alpha)
    if alpha.shape[0] != params.d:
        raise ValueError(f"alpha has length {alpha.shape[0]}, expected d={params.d}")
    _check_lengths(w, alpha)
    v = perturbation_vector(alpha, params.n)
    return (
        g_value(w, alpha, params.gamma2)
        + params.gamma1 * float(v @ w)
        + params.eps * float(w[-1])
        + nemirovski_value(w, params)
    )


def loss_subgrad(w: np.ndarray, alpha: np.ndarray, params: ConstructionParams) -> np.ndarray:
    """Subgradient of the loss at w: g-part + gamma1 v_alpha + eps e_{d+2} + r-part."""
    w = np.asarray(w, dtype=float)
    alpha = np.asarray(alpha)
    if alpha.shape[0] != params.d:
        raise ValueError(f"alpha has length {alpha.shape[0]}, expected d={params.d}")
    _check_lengths(w, alpha)
    grad = g_subgrad(w, alpha, params.gamma2)
    grad += params.gamma1 * perturbation_vector(alpha, params.n)
    grad[-1] += params.eps
    grad += nemirovski_subgrad(w, params)
    return grad

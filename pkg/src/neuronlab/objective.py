"""Population loss, gradients, stochastic gradients and their oracles.

The squared-loss objective for a student neuron against a fixed target
neuron is F(w) = E[ (sigma(w.x) - sigma(v.x))^2 / 2 ] and its gradient
(under the declared kink convention) is
E[ (sigma(w.x) - sigma(v.x)) * sigma'(w.x) * x ].

Monte Carlo estimators here are deterministic functions of (seed, n):
samples are drawn in fixed-size chunks from a single generator, so the
merged estimate never depends on scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .activations import Activation
from .distributions import InputDistribution
from .errors import (
    DimensionMismatchError,
    UndefinedAngleError,
    UnsupportedDistributionError,
)

_CHUNK = 1 << 17


def angle_between(w: np.ndarray, v: np.ndarray) -> float:
    """Angle in [0, pi] between two nonzero vectors.

    Uses the two-argument arctangent form 2*atan2(|wh - vh|, |wh + vh|)
    on the normalized vectors, which stays accurate near 0 and pi where
    arccos of a clamped cosine loses digits.
    """
    w = np.asarray(w, dtype=float)
    v = np.asarray(v, dtype=float)
    nw = np.linalg.norm(w)
    nv = np.linalg.norm(v)
    if nw == 0 or nv == 0:
        raise UndefinedAngleError("angle undefined for the zero vector")
    wh = w / nw
    vh = v / nv
    return 2.0 * np.arctan2(np.linalg.norm(wh - vh), np.linalg.norm(wh + vh))


@dataclass(frozen=True)
class Problem:
    """A realizable single-neuron instance: inputs, activation, target."""

    dist: InputDistribution
    act: Activation
    target: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.target, dtype=float)
        object.__setattr__(self, "target", t)
        if t.shape != (self.dist.dim,):
            raise DimensionMismatchError(
                f"target has shape {t.shape}, distribution dimension is {self.dist.dim}"
            )

    @property
    def dim(self) -> int:
        return self.dist.dim


@dataclass(frozen=True)
class GradEstimate:
    """Monte Carlo gradient estimate with per-coordinate standard errors."""

    mean: np.ndarray
    std_err: np.ndarray
    n_samples: int


def _residual(p: Problem, w: np.ndarray, x: np.ndarray) -> np.ndarray:
    """(sigma(w.x) - sigma(v.x)) * sigma'(w.x) per row of x."""
    zw = x @ w
    return (p.act.value(zw) - p.act.value(x @ p.target)) * p.act.derivative(zw)


def population_loss_mc(
    p: Problem, w: np.ndarray, n: int, seed: int
) -> tuple[float, float]:
    """Monte Carlo estimate of F(w) with its standard error."""
    w = np.asarray(w, dtype=float)
    rng = np.random.default_rng(seed)
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < n:
        m = min(_CHUNK, n - done)
        x = p.dist.sample(rng, m)
        vals = 0.5 * (p.act.value(x @ w) - p.act.value(x @ p.target)) ** 2
        total += float(vals.sum())
        total_sq += float((vals**2).sum())
        done += m
    mean = total / n
    var = max(total_sq / n - mean**2, 0.0)
    return mean, float(np.sqrt(var / n))


def population_loss_exact_discrete(p: Problem, w: np.ndarray) -> float:
    """Exact F(w) for a finitely supported input distribution."""
    if not p.dist.is_discrete:
        raise UnsupportedDistributionError(
            "exact loss requires a finitely supported distribution"
        )
    w = np.asarray(w, dtype=float)
    gap = p.act.value(p.dist.atoms @ w) - p.act.value(p.dist.atoms @ p.target)
    return float(0.5 * (p.dist.weights * gap**2).sum())


def population_gradient_mc(p: Problem, w: np.ndarray, n: int, seed: int) -> GradEstimate:
    """Monte Carlo estimate of the population gradient."""
    w = np.asarray(w, dtype=float)
    rng = np.random.default_rng(seed)
    d = p.dim
    s = np.zeros(d)
    s_sq = np.zeros(d)
    done = 0
    while done < n:
        m = min(_CHUNK, n - done)
        x = p.dist.sample(rng, m)
        r = _residual(p, w, x)
        s += r @ x
        s_sq += (r * r) @ (x * x)
        done += m
    mean = s / n
    var = np.maximum(s_sq / n - mean**2, 0.0)
    return GradEstimate(mean=mean, std_err=np.sqrt(var / n), n_samples=n)


def population_gradient_exact_discrete(p: Problem, w: np.ndarray) -> np.ndarray:
    """Exact population gradient for a finitely supported distribution."""
    if not p.dist.is_discrete:
        raise UnsupportedDistributionError(
            "exact gradient requires a finitely supported distribution"
        )
    w = np.asarray(w, dtype=float)
    r = p.dist.weights * _residual(p, w, p.dist.atoms)
    return r @ p.dist.atoms


def directional_gradient_mc(
    p: Problem, w: np.ndarray, direction: np.ndarray, n: int, seed: int
) -> tuple[float, float]:
    """MC estimate of <grad F(w), direction> with standard error.

    Estimated scalar-first (the integrand is the per-sample gradient
    dotted with the direction), which gives the correct standard error
    for one-sided theorem checks.
    """
    w = np.asarray(w, dtype=float)
    direction = np.asarray(direction, dtype=float)
    rng = np.random.default_rng(seed)
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < n:
        m = min(_CHUNK, n - done)
        x = p.dist.sample(rng, m)
        vals = _residual(p, w, x) * (x @ direction)
        total += float(vals.sum())
        total_sq += float((vals**2).sum())
        done += m
    mean = total / n
    var = max(total_sq / n - mean**2, 0.0)
    return mean, float(np.sqrt(var / n))


def stochastic_gradient(p: Problem, w: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Single-sample gradient g = (sigma(w.x) - sigma(v.x)) * sigma'(w.x) * x."""
    w = np.asarray(w, dtype=float)
    x = np.asarray(x, dtype=float)
    if x.shape != w.shape:
        raise DimensionMismatchError(f"x has shape {x.shape}, w has shape {w.shape}")
    zw = float(x @ w)
    r = (float(p.act.value(zw)) - float(p.act.value(float(x @ p.target)))) * float(
        p.act.derivative(zw)
    )
    return r * x


def batch_gradient_and_loss(
    p: Problem, w: np.ndarray, x: np.ndarray
) -> tuple[np.ndarray, float]:
    """Average gradient and loss over one sample batch (shared draws)."""
    w = np.asarray(w, dtype=float)
    n = x.shape[0]
    zw = x @ w
    gap = p.act.value(zw) - p.act.value(x @ p.target)
    loss = float(0.5 * (gap @ gap) / n)
    r = gap * p.act.derivative(zw)
    return (r @ x) / n, loss


def gradient_closed_form_gaussian_relu(w: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Exact gradient for standard Gaussian inputs and ReLU activation.

    grad F(w) = w/2 - (1/(2*pi)) * (|v| sin(theta) wh + (pi - theta) v),
    valid for w != 0 where the angle theta(w, v) is defined.
    """
    w = np.asarray(w, dtype=float)
    v = np.asarray(v, dtype=float)
    nw = np.linalg.norm(w)
    if nw == 0:
        raise UndefinedAngleError("closed-form gradient undefined at w = 0")
    theta = angle_between(w, v)
    nv = np.linalg.norm(v)
    return 0.5 * w - (nv * np.sin(theta) * (w / nw) + (np.pi - theta) * v) / (2 * np.pi)


def loss_closed_form_gaussian_relu(w: np.ndarray, v: np.ndarray) -> float:
    """Exact F(w) for standard Gaussian inputs and ReLU activation.

    F(w) = (|w|^2 + |v|^2)/4 - (|w||v| sin(theta) + (pi - theta) w.v)/(2*pi),
    extended continuously to F(0) = |v|^2 / 4.
    """
    w = np.asarray(w, dtype=float)
    v = np.asarray(v, dtype=float)
    nw = np.linalg.norm(w)
    nv = np.linalg.norm(v)
    if nw == 0:
        return float(0.25 * nv**2)
    theta = angle_between(w, v)
    return float(
        0.25 * (nw**2 + nv**2)
        - (nw * nv * np.sin(theta) + (np.pi - theta) * float(w @ v)) / (2 * np.pi)
    )


def _is_standard_gaussian(dist: InputDistribution) -> bool:
    return (
        dist.kind == "gaussian"
        and dist.params.get("variance") == 1.0
        and bool(np.all(dist.params.get("mean") == 0.0))
    )


def closed_form_gradient(p: Problem) -> Optional[Callable[[np.ndarray], np.ndarray]]:
    """Exact-gradient callable when one is known for (dist, act), else None.

    Covered pairs: standard Gaussian with ReLU (any kink convention; the
    kink is hit with probability zero) and standard Gaussian with the
    identity activation, where grad F(w) = w - v.
    """
    if not _is_standard_gaussian(p.dist):
        return None
    if p.act.name.startswith("relu"):
        v = p.target
        return lambda w: gradient_closed_form_gaussian_relu(w, v)
    if p.act.name == "identity":
        v = p.target
        return lambda w: np.asarray(w, dtype=float) - v
    return None


def closed_form_loss(p: Problem) -> Optional[Callable[[np.ndarray], float]]:
    """Exact-loss callable when one is known for (dist, act), else None."""
    if not _is_standard_gaussian(p.dist):
        return None
    if p.act.name.startswith("relu"):
        v = p.target
        return lambda w: loss_closed_form_gaussian_relu(w, v)
    if p.act.name == "identity":
        v = p.target
        return lambda w: float(0.5 * np.sum((np.asarray(w, dtype=float) - v) ** 2))
    return None


def finite_difference_gradient(
    f: Callable[[np.ndarray], float], w: np.ndarray, h: float = 1e-5
) -> np.ndarray:
    """Central-difference gradient of a scalar function, step h per coordinate."""
    if h <= 0:
        raise ValueError(f"step must be positive, got {h}")
    w = np.asarray(w, dtype=float)
    grad = np.empty_like(w)
    for j in range(w.size):
        e = np.zeros_like(w)
        e[j] = h
        grad[j] = (f(w + e) - f(w - e)) / (2 * h)
    return grad

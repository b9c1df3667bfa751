"""Scalar activation functions with explicit kink conventions.

An :class:`Activation` bundles the function, its derivative (with a
declared subderivative value at every non-differentiable point), and the
metadata used by the convergence-rate machinery: a global derivative
upper bound ``c2`` and, for monotone members, the derivative infimum
``gamma`` over an interval ``(0, 2*alpha)``.

All ``value``/``derivative`` callables are numpy ufunc compositions and
accept scalars or arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import expit

from .errors import ConfigError, InvalidConventionError


@dataclass(frozen=True)
class Activation:
    """A scalar activation with derivative convention and rate metadata.

    Attributes:
        name: key identifying the activation in experiment configs.
        value: vectorized map z -> sigma(z).
        derivative: vectorized map z -> sigma'(z), using the declared
            subderivative at each kink.
        kink_points: points where sigma is not differentiable.
        kink_convention: the chosen subderivative at each kink point
            (same order as ``kink_points``); must lie between the left
            and right derivatives.
        derivative_upper_bound: c2 with sigma'(z) <= c2 everywhere.
        derivative_lower_bound: global infimum of sigma' over R (0 for
            ReLU-like activations, positive only for strictly
            monotonically increasing ones).
        is_monotone: whether sigma is monotonically non-decreasing on R.
        _derivative_floor: map alpha -> inf of sigma' over (0, 2*alpha).
    """

    name: str
    value: Callable[[np.ndarray], np.ndarray]
    derivative: Callable[[np.ndarray], np.ndarray]
    kink_points: tuple[float, ...]
    kink_convention: tuple[float, ...]
    derivative_upper_bound: float
    derivative_lower_bound: float
    is_monotone: bool
    _derivative_floor: Callable[[float], float] = field(repr=False, default=None)

    def derivative_floor(self, alpha: float) -> float:
        """Greatest gamma >= 0 with sigma'(z) >= gamma for all z in (0, 2*alpha)."""
        if alpha <= 0:
            raise ValueError(f"alpha must be positive, got {alpha}")
        return float(self._derivative_floor(alpha))

    def __repr__(self) -> str:  # noqa: D105
        return f"Activation({self.name!r})"


def make_relu(kink_value: float = 1.0) -> Activation:
    """ReLU with sigma'(0) = kink_value; default 1 (the z >= 0 convention)."""
    if not 0.0 <= kink_value <= 1.0:
        raise InvalidConventionError(
            f"ReLU subderivative at 0 must lie in [0, 1], got {kink_value}"
        )

    def deriv(z):
        z = np.asarray(z, dtype=float)
        if z.ndim == 0:
            return np.where(z > 0, 1.0, np.where(z == 0, kink_value, 0.0))
        # hot path: one comparison pass, plus a patch pass only when the
        # kink value can differ from the open-interval limit
        d = (z > 0).astype(np.float64)
        if kink_value != 0.0:
            d[z == 0.0] = kink_value
        return d

    return Activation(
        name="relu" if kink_value == 1.0 else f"relu@{kink_value:g}",
        value=lambda z: np.maximum(np.asarray(z, dtype=float), 0.0),
        derivative=deriv,
        kink_points=(0.0,),
        kink_convention=(kink_value,),
        derivative_upper_bound=1.0,
        derivative_lower_bound=0.0,
        is_monotone=True,
        _derivative_floor=lambda alpha: 1.0,
    )


def make_leaky_relu(slope: float) -> Activation:
    """Leaky ReLU with negative-side slope in (0, 1); sigma'(0) = 1."""
    if not 0.0 < slope < 1.0:
        raise ValueError(f"leaky-ReLU slope must be in (0, 1), got {slope}")

    def value(z):
        z = np.asarray(z, dtype=float)
        return np.where(z >= 0, z, slope * z)

    def deriv(z):
        z = np.asarray(z, dtype=float)
        return np.where(z >= 0, 1.0, slope)

    return Activation(
        name=f"leaky_relu:{slope:g}",
        value=value,
        derivative=deriv,
        kink_points=(0.0,),
        kink_convention=(1.0,),
        derivative_upper_bound=1.0,
        derivative_lower_bound=slope,
        is_monotone=True,
        _derivative_floor=lambda alpha: 1.0,
    )


def make_softplus() -> Activation:
    """Softplus ln(1 + e^z). Smooth; derivative is the logistic function."""
    return Activation(
        name="softplus",
        value=lambda z: np.logaddexp(0.0, np.asarray(z, dtype=float)),
        derivative=lambda z: expit(np.asarray(z, dtype=float)),
        kink_points=(),
        kink_convention=(),
        derivative_upper_bound=1.0,
        derivative_lower_bound=0.0,
        is_monotone=True,
        # logistic is increasing, so the infimum on (0, 2*alpha) sits at 0+
        _derivative_floor=lambda alpha: 0.5,
    )


def make_sigmoid() -> Activation:
    """Logistic sigmoid. c2 = 1/4; derivative decreasing on z > 0."""

    def deriv(z):
        s = expit(np.asarray(z, dtype=float))
        return s * (1.0 - s)

    return Activation(
        name="sigmoid",
        value=lambda z: expit(np.asarray(z, dtype=float)),
        derivative=deriv,
        kink_points=(),
        kink_convention=(),
        derivative_upper_bound=0.25,
        derivative_lower_bound=0.0,
        is_monotone=True,
        _derivative_floor=lambda alpha: float(
            expit(2.0 * alpha) * (1.0 - expit(2.0 * alpha))
        ),
    )


def make_identity() -> Activation:
    """Identity map; the problem reduces to linear regression."""
    return Activation(
        name="identity",
        value=lambda z: np.asarray(z, dtype=float),
        derivative=lambda z: np.ones_like(np.asarray(z, dtype=float)),
        kink_points=(),
        kink_convention=(),
        derivative_upper_bound=1.0,
        derivative_lower_bound=1.0,
        is_monotone=True,
        _derivative_floor=lambda alpha: 1.0,
    )


def make_absolute(kink_value: float = 0.0) -> Activation:
    """Absolute value |z|. Not monotone; kept for the related phase-like setting."""
    if not -1.0 <= kink_value <= 1.0:
        raise InvalidConventionError(
            f"|z| subderivative at 0 must lie in [-1, 1], got {kink_value}"
        )

    def deriv(z):
        z = np.asarray(z, dtype=float)
        return np.where(z > 0, 1.0, np.where(z == 0, kink_value, -1.0))

    return Activation(
        name="abs",
        value=lambda z: np.abs(np.asarray(z, dtype=float)),
        derivative=deriv,
        kink_points=(0.0,),
        kink_convention=(kink_value,),
        derivative_upper_bound=1.0,
        derivative_lower_bound=-1.0,
        is_monotone=False,
        _derivative_floor=lambda alpha: 1.0,
    )


def make_periodic(period: float) -> Activation:
    """1-Lipschitz triangle wave with the given period.

    Rises with slope +1 from 0 at z = 0 to period/2 at z = period/2,
    then falls back with slope -1. Deliberately non-monotone; used only
    by the gradient-variance experiment.
    """
    if period <= 0:
        raise ValueError(f"period must be positive, got {period}")
    half = period / 2.0

    def value(z):
        s = np.mod(np.asarray(z, dtype=float), period)
        return half - np.abs(s - half)

    def deriv(z):
        s = np.mod(np.asarray(z, dtype=float), period)
        at_kink = (s == 0.0) | (s == half)
        return np.where(at_kink, 0.0, np.where(s < half, 1.0, -1.0))

    return Activation(
        name=f"periodic:{period:g}",
        value=value,
        derivative=deriv,
        kink_points=(0.0, half),
        kink_convention=(0.0, 0.0),
        derivative_upper_bound=1.0,
        derivative_lower_bound=-1.0,
        is_monotone=False,
        _derivative_floor=lambda alpha: 0.0,
    )


def parse_activation(key: str) -> Activation:
    """Resolve a config key such as "relu", "relu@0.5", "leaky_relu:0.01",
    "softplus", "sigmoid", "identity", "abs", "periodic:2.0"."""
    key = key.strip()
    try:
        if key == "identity":
            return make_identity()
        if key == "softplus":
            return make_softplus()
        if key == "sigmoid":
            return make_sigmoid()
        if key == "abs":
            return make_absolute()
        if key == "relu":
            return make_relu()
        if key.startswith("relu@"):
            return make_relu(float(key.split("@", 1)[1]))
        if key.startswith("leaky_relu:"):
            return make_leaky_relu(float(key.split(":", 1)[1]))
        if key.startswith("periodic:"):
            return make_periodic(float(key.split(":", 1)[1]))
    except (ValueError, InvalidConventionError) as exc:
        if isinstance(exc, InvalidConventionError):
            raise
        raise ConfigError(f"malformed activation key {key!r}: {exc}") from exc
    raise ConfigError(f"unknown activation key {key!r}")

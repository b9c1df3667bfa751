"""Input distributions: samplers, spread certificates and the adversarial dataset.

A distribution object is immutable; sampling is pure given an externally
owned ``numpy.random.Generator``, so identical seeds give identical
streams and worker threads can sample concurrently from their own
generators.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (
    ConfigError,
    DegenerateSubspaceError,
    DimensionMismatchError,
)


@dataclass(frozen=True)
class InputDistribution:
    """A d-dimensional input law with optional geometry metadata.

    Attributes:
        dim: dimension d.
        kind: short generator tag ("gaussian", "ball", "sphere", "discrete").
        is_spherically_symmetric: invariant under every orthogonal map.
        support_bound_sq: c1 with ||x||^2 <= c1 almost surely, when bounded.
        spread_params: (alpha, beta) certifying that every 2D marginal
            density is >= beta on the radius-alpha disk, when known.
        atoms: support points of a finitely supported distribution.
        weights: matching probabilities.
    """

    dim: int
    kind: str
    _sampler: Callable[[np.random.Generator, int], np.ndarray] = field(repr=False)
    is_spherically_symmetric: bool = False
    support_bound_sq: Optional[float] = None
    spread_params: Optional[tuple[float, float]] = None
    atoms: Optional[np.ndarray] = None
    weights: Optional[np.ndarray] = None
    params: dict = field(default_factory=dict)

    @property
    def is_discrete(self) -> bool:
        return self.atoms is not None

    def sample(self, rng: np.random.Generator, n: int = 1) -> np.ndarray:
        """Draw n points, shape (n, dim)."""
        out = self._sampler(rng, n)
        assert out.shape == (n, self.dim)
        return out


def gaussian(dim: int, mean=0.0, variance: float = 1.0) -> InputDistribution:
    """i.i.d. coordinates N(mean_i, variance).

    Spherically symmetric iff mean = 0. A zero-mean Gaussian carries a
    spread certificate evaluated at the conventional radius alpha = 1
    (the exact 2D-marginal infimum scales with the variance); a shifted
    Gaussian carries none, since its marginal infimum depends on how the
    mean projects onto the plane.
    """
    if variance <= 0:
        raise ValueError(f"variance must be positive, got {variance}")
    mean_arr = np.asarray(mean, dtype=float)
    if mean_arr.ndim > 0 and mean_arr.shape != (dim,):
        raise DimensionMismatchError(
            f"mean has shape {mean_arr.shape}, expected ({dim},)"
        )
    mean_vec = np.broadcast_to(mean_arr, (dim,)).copy()
    std = float(np.sqrt(variance))
    centered = bool(np.all(mean_vec == 0.0))

    def sampler(rng, n):
        x = rng.standard_normal((n, dim))
        if std != 1.0:
            x *= std
        if not centered:
            x += mean_vec
        return x

    spread = None
    if centered:
        alpha = 1.0
        beta = float(np.exp(-(alpha**2) / (2 * variance)) / (2 * np.pi * variance))
        spread = (alpha, beta)
    return InputDistribution(
        dim=dim,
        kind="gaussian",
        _sampler=sampler,
        is_spherically_symmetric=centered,
        support_bound_sq=None,
        spread_params=spread,
        params={"mean": mean_vec, "variance": float(variance)},
    )


def uniform_ball(dim: int, radius: float) -> InputDistribution:
    """Uniform on the solid ball of the given radius."""
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")

    def sampler(rng, n):
        g = rng.standard_normal((n, dim))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        r = radius * rng.random(n) ** (1.0 / dim)
        return g * r[:, None]

    return InputDistribution(
        dim=dim,
        kind="ball",
        _sampler=sampler,
        is_spherically_symmetric=True,
        support_bound_sq=radius**2,
        params={"radius": float(radius)},
    )


def uniform_sphere(dim: int, radius: float) -> InputDistribution:
    """Uniform on the sphere of the given radius."""
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")

    def sampler(rng, n):
        g = rng.standard_normal((n, dim))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        return radius * g

    return InputDistribution(
        dim=dim,
        kind="sphere",
        _sampler=sampler,
        is_spherically_symmetric=True,
        support_bound_sq=radius**2,
        params={"radius": float(radius)},
    )


def spread_params_for_gaussian(alpha: float) -> tuple[float, float]:
    """Exact spread certificate of the standard Gaussian.

    The 2D marginal of a standard Gaussian on any plane is a standard
    2D Gaussian, whose density infimum over the radius-alpha disk is
    attained on the boundary: beta = exp(-alpha^2/2) / (2*pi).
    """
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    return alpha, float(np.exp(-(alpha**2) / 2.0) / (2.0 * np.pi))


@dataclass(frozen=True)
class AdversarialDataset:
    """The stuck-coordinate construction: signed unit-vector support points.

    points[i] = signs[i] * e_i, and the target has coordinates
    signs[i] / sqrt(d), so it is exactly unit norm.
    """

    points: np.ndarray
    signs: np.ndarray
    target: np.ndarray

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def distribution(self) -> InputDistribution:
        """Uniform distribution over the support points."""
        d = self.dim
        atoms = self.points
        weights = np.full(d, 1.0 / d)

        def sampler(rng, n):
            idx = rng.integers(0, d, size=n)
            return atoms[idx]

        return InputDistribution(
            dim=d,
            kind="discrete",
            _sampler=sampler,
            is_spherically_symmetric=False,
            support_bound_sq=1.0,
            atoms=atoms,
            weights=weights,
            params={"name": "adversarial"},
        )


def adversarial_instance(dim: int, init_sign_probs: Sequence[float]) -> AdversarialDataset:
    """Build the hard instance for a given product initializer.

    ``init_sign_probs[i]`` is P(w_i > 0) under the initializer. Signs are
    chosen so that each coordinate is at least as likely to start on the
    flat side of the ReLU: b_i = +1 if p_i < 1/2, else -1.
    """
    probs = np.asarray(init_sign_probs, dtype=float)
    if probs.shape != (dim,):
        raise DimensionMismatchError(
            f"expected {dim} sign probabilities, got shape {probs.shape}"
        )
    if np.any(probs < 0) or np.any(probs > 1):
        raise ValueError("sign probabilities must lie in [0, 1]")
    signs = np.where(probs < 0.5, 1.0, -1.0)
    points = np.diag(signs)
    target = signs / np.sqrt(dim)
    return AdversarialDataset(points=points, signs=signs, target=target)


def marginal_2d(
    dist: InputDistribution,
    w: np.ndarray,
    v: np.ndarray,
    n: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Sample the 2D marginal of ``dist`` on span{w, v}.

    Returns n points in the coordinates of an orthonormal basis built by
    Gram-Schmidt from (w, v). Raises if w and v are parallel.
    """
    w = np.asarray(w, dtype=float)
    v = np.asarray(v, dtype=float)
    if w.shape != (dist.dim,) or v.shape != (dist.dim,):
        raise DimensionMismatchError("w and v must match the distribution dimension")
    nw = np.linalg.norm(w)
    if nw == 0:
        raise DegenerateSubspaceError("w is zero; span{w, v} is not a plane")
    e1 = w / nw
    u = v - (v @ e1) * e1
    nu = np.linalg.norm(u)
    if nu <= 1e-12 * np.linalg.norm(v):
        raise DegenerateSubspaceError("w and v are parallel; span{w, v} is not a plane")
    e2 = u / nu
    x = dist.sample(rng, n)
    return np.column_stack((x @ e1, x @ e2))


def parse_distribution(key: str, dim: int) -> InputDistribution:
    """Resolve a config key such as "gaussian:mean=0,var=1",
    "gaussian:mean=(0,1),var=1", "ball:r=1", "sphere:r=1"."""
    key = key.strip()
    try:
        if key.startswith("gaussian"):
            mean, var = 0.0, 1.0
            if ":" in key:
                mean, var = _parse_gaussian_body(key.split(":", 1)[1])
            return gaussian(dim, mean, var)
        if key.startswith("ball:r="):
            return uniform_ball(dim, float(key.split("=", 1)[1]))
        if key.startswith("sphere:r="):
            return uniform_sphere(dim, float(key.split("=", 1)[1]))
    except (ValueError, DimensionMismatchError) as exc:
        raise ConfigError(f"malformed distribution key {key!r}: {exc}") from exc
    raise ConfigError(f"unknown distribution key {key!r}")


def _parse_gaussian_body(body: str):
    """Parse "mean=0,var=1" or "mean=(0,1),var=1"."""
    mean, var = 0.0, 1.0
    # split on commas not inside parentheses
    parts, depth, cur = [], 0, ""
    for ch in body:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append(cur)
            cur = ""
        else:
            cur += ch
    if cur:
        parts.append(cur)
    for part in parts:
        k, _, val = part.partition("=")
        k = k.strip()
        val = val.strip()
        if k == "mean":
            if val.startswith("("):
                mean = np.array([float(t) for t in val.strip("()").split(",")])
            else:
                mean = float(val)
        elif k == "var":
            var = float(val)
        else:
            raise ValueError(f"unknown gaussian parameter {k!r}")
    return mean, var

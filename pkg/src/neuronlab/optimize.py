"""Gradient descent, SGD and gradient flow with trajectory recording.

A single run is sequential; batches of runs are independent given their
derived seeds. Identical (config, seed) pairs reproduce trajectories
bitwise.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp
from scipy.special import ndtr

from . import objective
from .errors import ConfigError, IntegrationFailure, UnsupportedDistributionError
from .objective import Problem, angle_between
from .seeding import derive_seed, rng_from

GD = "gd"
SGD = "sgd"
FLOW = "flow"

_METHODS = (GD, SGD, FLOW)
_GRADIENT_MODES = ("monte_carlo", "closed_form", "exact_discrete")


@dataclass(frozen=True)
class OptimizerConfig:
    """Settings for one optimizer run.

    ``horizon`` counts iterations for gd/sgd; ``t_max`` is the flow time
    for the ODE. ``gradient_mode`` selects how gd obtains its population
    gradient (sgd always uses single-sample stochastic gradients; flow
    refuses monte_carlo, since noisy gradients would silently turn the
    ODE into an SDE).
    """

    method: str
    step_size: float = 0.0
    horizon: int = 1
    t_max: float = 1.0
    flow_tolerance: float = 1e-8
    record_stride: int = 1
    gradient_mode: str = "monte_carlo"
    mc_samples: int = 100_000
    flow_records: int = 257

    def __post_init__(self):
        if self.method not in _METHODS:
            raise ConfigError(f"unknown method {self.method!r}")
        if self.gradient_mode not in _GRADIENT_MODES:
            raise ConfigError(f"unknown gradient mode {self.gradient_mode!r}")
        if self.method in (GD, SGD):
            if self.step_size <= 0:
                raise ConfigError("step_size must be positive for gd/sgd")
            if self.horizon < 1:
                raise ConfigError("horizon must be at least 1")
        if self.method == FLOW:
            if self.flow_tolerance <= 0:
                raise ConfigError("flow_tolerance must be positive")
            if self.t_max <= 0:
                raise ConfigError("t_max must be positive")
            if self.gradient_mode == "monte_carlo":
                raise ConfigError(
                    "gradient flow requires closed_form or exact_discrete gradients"
                )
        if self.record_stride < 1:
            raise ConfigError("record_stride must be at least 1")
        if self.mc_samples < 1:
            raise ConfigError("mc_samples must be at least 1")


@dataclass(frozen=True)
class Trajectory:
    """Time-indexed record of an optimizer run.

    ``angle`` holds NaN wherever the iterate is the zero vector; the
    companion ``angle_defined`` mask distinguishes those entries from
    genuine values, and the CSV serialization writes the literal token
    ``undef`` there.
    """

    times: np.ndarray
    W: np.ndarray
    loss: np.ndarray
    dist_sq: np.ndarray
    angle: np.ndarray
    angle_defined: np.ndarray
    norm: np.ndarray

    def __len__(self) -> int:
        return self.times.size

    @property
    def final_w(self) -> np.ndarray:
        return self.W[-1]

    def to_csv(self, path) -> None:
        """Write the serialization contract: 17 significant digits,
        header time,loss,dist_sq,angle,norm,w_0,...,w_{d-1}."""
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(self.to_csv_string())

    def to_csv_string(self) -> str:
        d = self.W.shape[1]
        buf = io.StringIO()
        cols = ["time", "loss", "dist_sq", "angle", "norm"] + [f"w_{j}" for j in range(d)]
        buf.write(",".join(cols) + "\n")
        for k in range(len(self)):
            ang = f"{self.angle[k]:.17g}" if self.angle_defined[k] else "undef"
            row = [
                f"{self.times[k]:.17g}",
                f"{self.loss[k]:.17g}",
                f"{self.dist_sq[k]:.17g}",
                ang,
                f"{self.norm[k]:.17g}",
            ] + [f"{x:.17g}" for x in self.W[k]]
            buf.write(",".join(row) + "\n")
        return buf.getvalue()


class _Recorder:
    def __init__(self, target: np.ndarray):
        self.target = target
        self.times: list[float] = []
        self.W: list[np.ndarray] = []
        self.loss: list[float] = []

    def add(self, t: float, w: np.ndarray, loss: float) -> None:
        self.times.append(float(t))
        self.W.append(w.copy())
        self.loss.append(float(loss))

    def build(self) -> Trajectory:
        W = np.asarray(self.W)
        diff = W - self.target
        dist_sq = np.einsum("ij,ij->i", diff, diff)
        norm = np.linalg.norm(W, axis=1)
        defined = norm > 0
        angle = np.full(len(self.W), np.nan)
        for k in np.flatnonzero(defined):
            angle[k] = angle_between(W[k], self.target)
        return Trajectory(
            times=np.asarray(self.times),
            W=W,
            loss=np.asarray(self.loss),
            dist_sq=dist_sq,
            angle=angle,
            angle_defined=defined,
            norm=norm,
        )


@dataclass(frozen=True)
class Initializer:
    """Initialization scheme for the parameter vector.

    Kinds: "gaussian_isotropic" (N(0, tau^2 I)), "product" (independent
    per-coordinate 1D laws), "fixed", "zero". All four are product
    distributions, so each exposes per-coordinate sign probabilities
    P(w_i > 0) for the adversarial construction.
    """

    kind: str
    tau: Optional[float] = None
    vector: Optional[np.ndarray] = None
    coord_laws: Optional[tuple[tuple, ...]] = None

    def __post_init__(self):
        if self.kind == "gaussian_isotropic":
            if self.tau is None or self.tau <= 0:
                raise ConfigError("gaussian_isotropic requires tau > 0")
        elif self.kind == "fixed":
            if self.vector is None:
                raise ConfigError("fixed initializer requires a vector")
            object.__setattr__(self, "vector", np.asarray(self.vector, dtype=float))
        elif self.kind == "product":
            if not self.coord_laws:
                raise ConfigError("product initializer requires coordinate laws")
            for law in self.coord_laws:
                if law[0] not in ("gaussian", "uniform"):
                    raise ConfigError(f"unknown coordinate law {law[0]!r}")
        elif self.kind != "zero":
            raise ConfigError(f"unknown initializer kind {self.kind!r}")

    def draw(self, rng: np.random.Generator, dim: int) -> np.ndarray:
        if self.kind == "gaussian_isotropic":
            return self.tau * rng.standard_normal(dim)
        if self.kind == "zero":
            return np.zeros(dim)
        if self.kind == "fixed":
            if self.vector.shape != (dim,):
                raise ConfigError(
                    f"fixed vector has shape {self.vector.shape}, expected ({dim},)"
                )
            return self.vector.copy()
        laws = self._laws_for(dim)
        out = np.empty(dim)
        for i, law in enumerate(laws):
            if law[0] == "gaussian":
                out[i] = law[1] + law[2] * rng.standard_normal()
            else:
                out[i] = rng.uniform(law[1], law[2])
        return out

    def sign_probs(self, dim: int) -> np.ndarray:
        """P(w_i > 0) per coordinate."""
        if self.kind == "gaussian_isotropic":
            return np.full(dim, 0.5)
        if self.kind == "zero":
            return np.zeros(dim)
        if self.kind == "fixed":
            if self.vector.shape != (dim,):
                raise ConfigError(
                    f"fixed vector has shape {self.vector.shape}, expected ({dim},)"
                )
            return (self.vector > 0).astype(float)
        probs = np.empty(dim)
        for i, law in enumerate(self._laws_for(dim)):
            if law[0] == "gaussian":
                mu, sd = law[1], law[2]
                probs[i] = float(ndtr(mu / sd))
            else:
                lo, hi = law[1], law[2]
                probs[i] = (max(hi, 0.0) - max(lo, 0.0)) / (hi - lo)
        return probs

    def _laws_for(self, dim: int) -> tuple[tuple, ...]:
        if len(self.coord_laws) == 1:
            return self.coord_laws * dim
        if len(self.coord_laws) != dim:
            raise ConfigError(
                f"{len(self.coord_laws)} coordinate laws for dimension {dim}"
            )
        return self.coord_laws


def gaussian_isotropic(tau: float) -> Initializer:
    return Initializer(kind="gaussian_isotropic", tau=tau)


def fixed(vector) -> Initializer:
    return Initializer(kind="fixed", vector=np.asarray(vector, dtype=float))


def zero() -> Initializer:
    return Initializer(kind="zero")


def product_uniform(lo: float, hi: float) -> Initializer:
    """Each coordinate independently uniform on [lo, hi] (Xavier-style)."""
    if not hi > lo:
        raise ConfigError("product_uniform requires hi > lo")
    return Initializer(kind="product", coord_laws=(("uniform", lo, hi),))


def initialize(init: Initializer, dim: int, seed: int) -> np.ndarray:
    """One draw from the initializer; deterministic given the seed."""
    if dim < 1:
        raise ConfigError("dimension must be at least 1")
    return init.draw(rng_from(seed), dim)


def parse_initializer(key: str) -> Initializer:
    """Resolve keys like "gaussian_isotropic:tau=0.1", "fixed:(-1,0.5)",
    "product_uniform:a=0.5" (uniform on [-a, a]), "zero"."""
    key = key.strip()
    try:
        if key == "zero":
            return zero()
        if key.startswith("gaussian_isotropic:tau="):
            return gaussian_isotropic(float(key.split("=", 1)[1]))
        if key.startswith("fixed:"):
            vec = [float(t) for t in key.split(":", 1)[1].strip("()").split(",")]
            return fixed(vec)
        if key.startswith("product_uniform:a="):
            a = float(key.split("=", 1)[1])
            return product_uniform(-a, a)
    except (ValueError, ConfigError) as exc:
        raise ConfigError(f"malformed initializer key {key!r}: {exc}") from exc
    raise ConfigError(f"unknown initializer key {key!r}")


def _exact_gradient_fn(p: Problem, mode: str) -> Callable[[np.ndarray], np.ndarray]:
    if mode == "closed_form":
        fn = objective.closed_form_gradient(p)
        if fn is None:
            raise ConfigError(
                f"no closed-form gradient for ({p.dist.kind}, {p.act.name})"
            )
        return fn
    if mode == "exact_discrete":
        if not p.dist.is_discrete:
            raise UnsupportedDistributionError(
                "exact_discrete gradients require a finitely supported distribution"
            )
        return lambda w: objective.population_gradient_exact_discrete(p, w)
    raise ConfigError(f"not an exact gradient mode: {mode!r}")


def _exact_loss_fn(p: Problem, mode: str) -> Callable[[np.ndarray], float]:
    if mode == "closed_form":
        fn = objective.closed_form_loss(p)
        if fn is None:
            raise ConfigError(f"no closed-form loss for ({p.dist.kind}, {p.act.name})")
        return fn
    return lambda w: objective.population_loss_exact_discrete(p, w)


def _best_loss_fn(p: Problem, cfg: OptimizerConfig, seed: int) -> Callable[[np.ndarray, int], float]:
    """Loss evaluator for recording along sgd runs: exact when available,
    otherwise MC with a per-record derived seed."""
    if p.dist.is_discrete:
        return lambda w, t: objective.population_loss_exact_discrete(p, w)
    cf = objective.closed_form_loss(p)
    if cf is not None:
        return lambda w, t: cf(w)

    def mc(w, t):
        loss, _ = objective.population_loss_mc(p, w, cfg.mc_samples, derive_seed(seed, 1, t))
        return loss

    return mc


def run_gd(
    p: Problem, init: np.ndarray, cfg: OptimizerConfig, seed: Optional[int] = None
) -> Trajectory:
    """Gradient descent w_{t+1} = w_t - eta * grad F(w_t).

    In monte_carlo mode each step draws a fresh batch of cfg.mc_samples
    points (seeded per step from ``seed``) and uses the batch for both
    the gradient and the recorded loss; this approximates, rather than
    equals, exact-gradient descent.
    """
    if cfg.method != GD:
        raise ConfigError(f"run_gd called with method {cfg.method!r}")
    w = np.asarray(init, dtype=float).copy()
    rec = _Recorder(p.target)

    if cfg.gradient_mode == "monte_carlo":
        if seed is None:
            raise ConfigError("monte_carlo gradient mode requires a seed")
        for t in range(cfg.horizon + 1):
            rng = rng_from(seed, t)
            x = p.dist.sample(rng, cfg.mc_samples)
            grad, loss = objective.batch_gradient_and_loss(p, w, x)
            if t % cfg.record_stride == 0 or t == cfg.horizon:
                rec.add(t, w, loss)
            if t == cfg.horizon:
                break
            w = w - cfg.step_size * grad
        return rec.build()

    grad_fn = _exact_gradient_fn(p, cfg.gradient_mode)
    loss_fn = _exact_loss_fn(p, cfg.gradient_mode)
    for t in range(cfg.horizon + 1):
        if t % cfg.record_stride == 0 or t == cfg.horizon:
            rec.add(t, w, loss_fn(w))
        if t == cfg.horizon:
            break
        w = w - cfg.step_size * grad_fn(w)
    return rec.build()


def run_sgd(p: Problem, init: np.ndarray, cfg: OptimizerConfig, seed: int) -> Trajectory:
    """SGD on the population loss: one fresh sample per step."""
    if cfg.method != SGD:
        raise ConfigError(f"run_sgd called with method {cfg.method!r}")
    w = np.asarray(init, dtype=float).copy()
    rng = rng_from(seed, 0)
    loss_fn = _best_loss_fn(p, cfg, seed)
    rec = _Recorder(p.target)
    for t in range(cfg.horizon + 1):
        if t % cfg.record_stride == 0 or t == cfg.horizon:
            rec.add(t, w, loss_fn(w, t))
        if t == cfg.horizon:
            break
        x = p.dist.sample(rng, 1)[0]
        g = objective.stochastic_gradient(p, w, x)
        w = w - cfg.step_size * g
    return rec.build()


def run_gradient_flow(p: Problem, init: np.ndarray, cfg: OptimizerConfig) -> Trajectory:
    """Integrate dw/dt = -grad F(w) with an adaptive embedded RK 4(5) pair.

    Local error is controlled by the absolute tolerance
    cfg.flow_tolerance (the relative tolerance is pinned near machine
    precision). Raises IntegrationFailure carrying the partial
    trajectory if the integrator stalls, e.g. on kink-induced stiffness.
    """
    if cfg.method != FLOW:
        raise ConfigError(f"run_gradient_flow called with method {cfg.method!r}")
    grad_fn = _exact_gradient_fn(p, cfg.gradient_mode)
    loss_fn = _exact_loss_fn(p, cfg.gradient_mode)
    w0 = np.asarray(init, dtype=float).copy()
    t_eval = np.linspace(0.0, cfg.t_max, cfg.flow_records)

    sol = solve_ivp(
        lambda t, w: -grad_fn(w),
        (0.0, cfg.t_max),
        w0,
        method="RK45",
        t_eval=t_eval,
        rtol=1e-10,
        atol=cfg.flow_tolerance,
    )
    rec = _Recorder(p.target)
    for k in range(sol.t.size):
        w = sol.y[:, k]
        rec.add(sol.t[k], w, loss_fn(w))
    if not sol.success:
        raise IntegrationFailure(
            f"gradient flow integration failed: {sol.message}",
            partial_trajectory=rec.build() if sol.t.size else None,
        )
    return rec.build()


def run(p: Problem, init: np.ndarray, cfg: OptimizerConfig, seed: Optional[int] = None) -> Trajectory:
    """Dispatch on cfg.method."""
    if cfg.method == GD:
        return run_gd(p, init, cfg, seed)
    if cfg.method == SGD:
        if seed is None:
            raise ConfigError("sgd requires a seed")
        return run_sgd(p, init, cfg, seed)
    return run_gradient_flow(p, init, cfg)

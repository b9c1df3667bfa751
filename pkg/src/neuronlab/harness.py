"""Experiment registry, runner, and CSV/plot-data emission.

Each named experiment reproduces one claim or figure. Output lands in
``<out-root>/<name>/<seed>/`` with trajectory/data CSVs, a ``reports.txt``
holding one line per theorem check, rendered figures, and an atomically
written ``manifest.txt``. Re-running with the same spec and seed
reproduces the tree bitwise, so wall-clock time is reported on stdout
and kept off disk.
"""

from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import plots, theory
from .activations import make_leaky_relu, make_periodic, make_relu, parse_activation
from .distributions import gaussian, parse_distribution, spread_params_for_gaussian, uniform_ball
from .errors import ConfigError
from .objective import Problem, angle_between
from .optimize import (
    FLOW,
    GD,
    OptimizerConfig,
    Trajectory,
    gaussian_isotropic,
    parse_initializer,
    run_gd,
    run_gradient_flow,
)
from .seeding import derive_seed, rng_from
from .theory import SpreadCertificate, TheoremReport, rate_constants

__version__ = "0.1.0"

DEFAULT_OUT_ENV = "NEURONLAB_OUT"


@dataclass(frozen=True)
class ExperimentSpec:
    """A named, fully determined experiment configuration.

    Everything beyond the trial count and master seed lives in ``params``
    as strings, matching the flat key=value config format; CLI ``--set``
    overrides replace entries verbatim.
    """

    name: str
    trials: int
    seed: int
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")

    def with_overrides(self, overrides: dict) -> "ExperimentSpec":
        trials = self.trials
        seed = self.seed
        params = dict(self.params)
        for key, val in overrides.items():
            if key == "trials":
                trials = int(val)
            elif key == "seed":
                seed = int(val)
            elif key == "name":
                raise ConfigError("the experiment name cannot be overridden")
            else:
                if key not in params:
                    raise ConfigError(
                        f"unknown parameter {key!r} for experiment {self.name!r}"
                    )
                params[key] = str(val)
        return replace(self, trials=trials, seed=seed, params=params)

    def p_str(self, key: str) -> str:
        return self.params[key]

    def p_float(self, key: str) -> float:
        return float(self.params[key])

    def p_int(self, key: str) -> int:
        return int(float(self.params[key]))

    def to_lines(self) -> list[str]:
        lines = [f"name={self.name}", f"trials={self.trials}", f"seed={self.seed}"]
        lines += [f"{k}={self.params[k]}" for k in sorted(self.params)]
        return lines


@dataclass
class RunManifest:
    """Result descriptor for one experiment run.

    ``trajectories`` is in-memory only; the serialized manifest carries
    the spec echo, the emitted file list and the report summary.
    Wall-clock seconds are reported by the CLI but never serialized, to
    keep output trees bitwise reproducible.
    """

    spec: ExperimentSpec
    out_dir: Path
    files: list[str]
    reports: list[TheoremReport]
    wall_clock: float
    version: str = __version__
    trajectories: list[Trajectory] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.reports)

    def write(self) -> None:
        lines = [f"version={self.version}"]
        lines += self.spec.to_lines()
        n_pass = sum(r.passed for r in self.reports)
        lines.append(f"reports_passed={n_pass}/{len(self.reports)}")
        for f in sorted(self.files):
            lines.append(f"file={f}")
        for r in self.reports:
            lines.append(f"report={r.to_line()}")
        path = self.out_dir / "manifest.txt"
        tmp = self.out_dir / "manifest.txt.tmp"
        tmp.write_text("\n".join(lines) + "\n", encoding="ascii")
        os.replace(tmp, path)


def output_root(explicit: Optional[str] = None) -> Path:
    if explicit:
        return Path(explicit)
    return Path(os.environ.get(DEFAULT_OUT_ENV, "out"))


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _write_csv(path: Path, header: str, rows) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) if isinstance(x, float) else str(x) for x in row) + "\n")


def _write_reports(path: Path, reports: list[TheoremReport]) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for r in reports:
            fh.write(r.to_line() + "\n")


def gaussian_certificate(c1: float = 1.0, c2: float = 1.0) -> SpreadCertificate:
    """The standard-Gaussian/ReLU certificate used across experiments.

    (alpha, beta) is the exact spread pair at radius 1; the Gaussian has
    no almost-sure support bound, so c1 here only fixes step sizes.
    """
    alpha, beta = spread_params_for_gaussian(1.0)
    return SpreadCertificate(alpha=alpha, beta=beta, gamma=1.0, c1=c1, c2=c2)


# ---------------------------------------------------------------------------
# Experiment drivers. Each returns (files, reports, trajectories).


def _drive_fig1(spec: ExperimentSpec, out_dir: Path):
    dim = 2
    dist = parse_distribution(spec.p_str("dist"), dim)
    act = parse_activation(spec.p_str("act"))
    target = np.array([float(t) for t in spec.p_str("target").strip("()").split(",")])
    p = Problem(dist, act, target)
    init_keys = spec.p_str("inits").split("|")
    cfg = OptimizerConfig(
        method=GD,
        step_size=spec.p_float("eta"),
        horizon=spec.p_int("horizon"),
        gradient_mode="monte_carlo",
        mc_samples=spec.p_int("mc_samples"),
        record_stride=spec.p_int("record_stride"),
    )
    files: list[str] = []
    trajs: list[Trajectory] = []
    for k in range(spec.trials):
        init = parse_initializer(init_keys[k % len(init_keys)]).draw(rng_from(0), dim)
        traj = run_gd(p, init, cfg, seed=derive_seed(spec.seed, k))
        name = f"trial_{k:03d}.csv"
        traj.to_csv(out_dir / name)
        files.append(name)
        trajs.append(traj)

    reports = fig1_reports(trajs, spec)
    files += _emit_loss_grid(p, spec, out_dir)
    return files, reports, trajs


def fig1_reports(trajs: list[Trajectory], spec: ExperimentSpec) -> list[TheoremReport]:
    """The three figure-level claims: convergence, an initially increasing
    angle, and near-complete angle coverage."""
    final_dist = max(math.sqrt(t.dist_sq[-1]) for t in trajs)
    reach = TheoremReport(
        theorem_id="fig1_reaches_minimum",
        predicted=spec.p_float("reach_tol"),
        observed=final_dist,
        tolerance=0.0,
        passed=bool(final_dist <= spec.p_float("reach_tol")),
        metadata={"seed": spec.seed, "n": spec.trials},
    )
    rises = [float(np.nanmax(t.angle) - t.angle[0]) for t in trajs]
    nonmono = TheoremReport(
        theorem_id="fig1_angle_nonmonotone",
        predicted=0.05,
        observed=max(rises),
        tolerance=0.0,
        passed=bool(max(rises) >= 0.05),
        metadata={"seed": spec.seed, "rises": rises},
    )
    angles = np.sort(
        np.concatenate([t.angle[t.angle_defined] for t in trajs])
    )
    lo, hi = 0.3, 2.8
    inside = angles[(angles >= lo) & (angles <= hi)]
    pts = np.concatenate(([lo], inside, [hi]))
    max_gap = float(np.max(np.diff(pts)))
    coverage = TheoremReport(
        theorem_id="fig1_angle_coverage",
        predicted=0.2,
        observed=max_gap,
        tolerance=0.0,
        passed=bool(max_gap <= 0.2),
        metadata={"seed": spec.seed, "range": [lo, hi]},
    )
    return [reach, nonmono, coverage]


def _emit_loss_grid(p: Problem, spec: ExperimentSpec, out_dir: Path) -> list[str]:
    """200x200 loss surface over [-1.5, 1.5]^2 from one shared MC sample.

    Common random numbers keep the surface smooth; per-point noise is a
    fraction of a percent at the default sample size.
    """
    n = spec.p_int("grid_samples")
    res = spec.p_int("grid_resolution")
    x = p.dist.sample(rng_from(derive_seed(spec.seed, 999)), n)
    sv = p.act.value(x @ p.target)
    axis = np.linspace(-1.5, 1.5, res)
    g0, g1 = np.meshgrid(axis, axis, indexing="ij")
    grid = np.column_stack((g0.ravel(), g1.ravel()))
    losses = np.empty(grid.shape[0])
    block = 512
    for start in range(0, grid.shape[0], block):
        W = grid[start : start + block]
        gap = p.act.value(x @ W.T) - sv[:, None]
        losses[start : start + block] = 0.5 * (gap**2).mean(axis=0)
    name = "lossgrid.csv"
    _write_csv(
        out_dir / name,
        "w0,w1,loss",
        ((float(a), float(b), float(l)) for (a, b), l in zip(grid, losses)),
    )
    return [name]


def _drive_thm31(spec: ExperimentSpec, out_dir: Path):
    d = spec.p_int("d")
    init = parse_initializer(spec.p_str("init"))
    report = theory.check_adversarial_failure(
        d=d,
        init=init,
        method=spec.p_str("method"),
        trials=spec.trials,
        horizon=spec.p_int("horizon"),
        seed=spec.seed,
        eta=spec.p_float("eta"),
    )
    return [], [report], []


def _drive_thm33(spec: ExperimentSpec, out_dir: Path):
    dims = [int(t) for t in spec.p_str("dims").split(",")]
    act_keys = spec.p_str("acts").split("|")
    n_eig = spec.p_int("n_eig")
    files: list[str] = []
    reports: list[TheoremReport] = []
    trajs: list[Trajectory] = []
    for i in range(spec.trials):
        d = dims[i % len(dims)]
        act = parse_activation(act_keys[i % len(act_keys)])
        dist = uniform_ball(d, 1.0)
        rng = rng_from(derive_seed(spec.seed, i))
        v = rng.standard_normal(d)
        v /= np.linalg.norm(v)
        u = rng.standard_normal(d)
        u /= np.linalg.norm(u)
        w0 = v + rng.uniform(0.5, 0.95) * u  # keeps ||w0 - v|| <= 1
        p = Problem(dist, act, v)
        lam = theory.empirical_second_moment_min_eig(dist, n_eig, derive_seed(spec.seed, i, 1))
        gamma = act.derivative_lower_bound
        c1 = c2 = 1.0
        eta = spec.p_float("eta_frac") * lam * gamma**2 / (c1**2 * c2**4)
        cfg = OptimizerConfig(
            method=GD,
            step_size=eta,
            horizon=spec.p_int("horizon"),
            gradient_mode="monte_carlo",
            mc_samples=spec.p_int("mc_samples"),
        )
        traj = run_gd(p, w0, cfg, seed=derive_seed(spec.seed, i, 2))
        rep = theory.check_strict_monotone_rate(p, gamma, lam, c1, c2, traj, eta)
        rep.metadata.update({"seed": spec.seed, "instance": i, "d": d, "act": act.name})
        reports.append(rep)
        name = f"trial_{i:03d}.csv"
        traj.to_csv(out_dir / name)
        files.append(name)
        trajs.append(traj)
    return files, reports, trajs


def _drive_thm42(spec: ExperimentSpec, out_dir: Path):
    d = spec.p_int("d")
    n = spec.p_int("n")
    cert = gaussian_certificate()
    dist = gaussian(d)
    rng = rng_from(spec.seed)
    reports: list[TheoremReport] = []
    rows = []
    for i in range(spec.trials):
        while True:
            v = rng.standard_normal(d)
            v /= np.linalg.norm(v)
            w = rng.standard_normal(d)
            w *= rng.uniform(0.1, 2.0) / np.linalg.norm(w)
            if angle_between(w, v) <= 3 * np.pi / 4:
                break
        p = Problem(dist, make_relu(), v)
        rep = theory.check_correlation(p, cert, w, n, derive_seed(spec.seed, i))
        rep.metadata["point"] = i
        reports.append(rep)
        rows.append(
            (
                float(rep.metadata["theta"]),
                float(rep.metadata["dist_sq"]),
                rep.predicted,
                rep.observed,
                rep.tolerance,
            )
        )
    name = "points.csv"
    _write_csv(out_dir / name, "theta,dist_sq,predicted,observed,four_se", rows)
    return [name], reports, []


def _drive_lemb1(spec: ExperimentSpec, out_dir: Path):
    alphas = [float(t) for t in spec.p_str("alphas").split(",")]
    deltas = [float(t) for t in spec.p_str("deltas").split(",")]
    n_dir = spec.p_int("n_directions")
    reports: list[TheoremReport] = []
    max_rel_change = 0.0
    for a in alphas:
        for dl in deltas:
            rep = theory.check_pie_slice_bound(a, dl, n_dir)
            rep.metadata["seed"] = spec.seed
            reports.append(rep)
            coarse = theory.pie_slice_integral(a, dl, np.array([1.0, 0.0]))
            fine = theory.pie_slice_integral(
                a, dl, np.array([1.0, 0.0]), n_r=256, n_phi=1024
            )
            max_rel_change = max(max_rel_change, abs(fine - coarse) / abs(fine))
    reports.append(
        TheoremReport(
            theorem_id="pie_slice_quadrature_consistency",
            predicted=1e-6,
            observed=max_rel_change,
            tolerance=0.0,
            passed=bool(max_rel_change < 1e-6),
            metadata={"seed": spec.seed, "n": n_dir},
        )
    )
    return [], reports, []


def _drive_lem51(spec: ExperimentSpec, out_dir: Path):
    dims = [int(t) for t in spec.p_str("dims").split(",")]
    draws = spec.p_int("draws")
    reports: list[TheoremReport] = []
    rows = []
    for d in dims:
        tau = 1.0 / (d * math.sqrt(2.0))
        rng = rng_from(derive_seed(spec.seed, d))
        W = tau * rng.standard_normal((draws, d))
        v = np.zeros(d)
        v[0] = 1.0
        dist_sq = ((W - v) ** 2).sum(axis=1)
        emp = float((dist_sq <= 1.0 - 2.0 * tau**2 * d).mean())
        bound = 0.5 - tau * d / 4.0 - 1.2 ** (-d)
        se = math.sqrt(max(emp * (1.0 - emp), 1e-12) / draws)
        reports.append(
            TheoremReport(
                theorem_id=f"init_prob_d{d}",
                predicted=bound,
                observed=emp,
                tolerance=4.0 * se,
                passed=bool(emp >= bound - 4.0 * se),
                metadata={"seed": spec.seed, "n": draws, "tau": tau},
            )
        )
        rows.append((float(d), tau, emp, bound, se))
    name = "probabilities.csv"
    _write_csv(out_dir / name, "d,tau,empirical,claimed_bound,se", rows)
    return [name], reports, []


def _drive_thm53_gd(spec: ExperimentSpec, out_dir: Path):
    d = spec.p_int("d")
    cert = gaussian_certificate()
    rc = rate_constants(cert)
    eta = rc.eta_max_gd
    dist = gaussian(d)
    rng = rng_from(spec.seed)
    v = np.zeros(d)
    v[0] = 1.0
    u = rng.standard_normal(d)
    u /= np.linalg.norm(u)
    w0 = v + math.sqrt(spec.p_float("dist_sq0")) * u
    p = Problem(dist, make_relu(), v)
    cfg = OptimizerConfig(
        method=GD, step_size=eta, horizon=spec.p_int("horizon"), gradient_mode="closed_form"
    )
    traj = run_gd(p, w0, cfg)
    rep = theory.check_gd_rate(traj, rc.lambda_gd, eta)
    rep.metadata.update({"seed": spec.seed, "eta": eta, "lambda": rc.lambda_gd, "d": d})
    name = "trial_000.csv"
    traj.to_csv(out_dir / name)
    return [name], [rep], [traj]


def _drive_thm53_sgd(spec: ExperimentSpec, out_dir: Path):
    d = spec.p_int("d")
    p = Problem(gaussian(d), make_relu(), np.eye(d)[0])
    rep = theory.check_sgd_convergence(
        p,
        gaussian_certificate(),
        eps1=spec.p_float("eps1"),
        eps2=spec.p_float("eps2"),
        delta_fail=spec.p_float("delta_fail"),
        trials=spec.trials,
        seed=spec.seed,
        step_cap=spec.p_int("step_cap"),
    )
    return [], [rep], []


def _flow_family(spec: ExperimentSpec, out_dir: Path):
    """Shared runner for the spherically symmetric flow experiments."""
    d = spec.p_int("d")
    dist = gaussian(d)
    v = np.zeros(d)
    v[0] = 1.0
    p = Problem(dist, make_relu(), v)
    cfg = OptimizerConfig(
        method=FLOW,
        t_max=spec.p_float("t_max"),
        flow_tolerance=spec.p_float("flow_tolerance"),
        gradient_mode="closed_form",
        flow_records=spec.p_int("flow_records"),
    )
    files, trajs = [], []
    rng = rng_from(spec.seed)
    for k in range(spec.trials):
        while True:
            w0 = rng.standard_normal(d)
            w0 *= rng.uniform(0.05, 2.0) / np.linalg.norm(w0)
            if angle_between(w0, v) <= 3 * np.pi / 4:
                break
        traj = run_gradient_flow(p, w0, cfg)
        name = f"trial_{k:03d}.csv"
        traj.to_csv(out_dir / name)
        files.append(name)
        trajs.append(traj)
    return p, cfg, files, trajs


def _drive_lem61(spec: ExperimentSpec, out_dir: Path):
    _, cfg, files, trajs = _flow_family(spec, out_dir)
    reports = []
    for k, traj in enumerate(trajs):
        rep = theory.check_angle_monotone(traj, integrator_tol=10.0 * cfg.flow_tolerance)
        rep.metadata.update({"seed": spec.seed, "trial": k})
        reports.append(rep)
    return files, reports, trajs


def _drive_thm63(spec: ExperimentSpec, out_dir: Path):
    _, cfg, files, trajs = _flow_family(spec, out_dir)
    alpha, beta = spread_params_for_gaussian(1.0)
    eps = np.pi / 4.0  # initial angles stay below 3*pi/4 = pi - eps
    lam = alpha**4 * beta / (8.0 * math.sqrt(2.0)) * math.sin(eps / 8.0) ** 3
    reports = []
    for k, traj in enumerate(trajs):
        rep = theory.check_flow_rate(traj, lam, cfg.flow_tolerance)
        rep.metadata.update({"seed": spec.seed, "trial": k})
        reports.append(rep)
    return files, reports, trajs


def _drive_lem62(spec: ExperimentSpec, out_dir: Path):
    d = spec.p_int("d")
    n = spec.p_int("n")
    dist = gaussian(d)
    v = np.zeros(d)
    v[0] = 1.0
    p = Problem(dist, make_relu(), v)
    thetas = [float(t) for t in spec.p_str("thetas").split(",")]
    rng = rng_from(spec.seed)
    reports = []
    for i, theta in enumerate(thetas):
        u = rng.standard_normal(d)
        u -= (u @ v) * v
        u /= np.linalg.norm(u)
        direction = math.cos(theta) * v + math.sin(theta) * u
        threshold = max(
            (math.sin(theta) + math.cos(theta)) / 2.0,
            math.sin(theta) * (1.0 + math.cos(theta)) / 2.0,
        )
        w = spec.p_float("norm_frac") * threshold * direction
        rep = theory.check_norm_safe_region(p, w, n, derive_seed(spec.seed, i))
        rep.metadata["target_theta"] = theta
        reports.append(rep)
    return [], reports, []


def _drive_sec32(spec: ExperimentSpec, out_dir: Path):
    dims = [int(t) for t in spec.p_str("dims").split(",")]
    rep = theory.check_variance_collapse(
        make_periodic(spec.p_float("period")),
        make_relu(),
        dims,
        n_targets=spec.p_int("n_targets"),
        n_mc=spec.p_int("n_mc"),
        seed=spec.seed,
    )
    rows = list(
        zip(
            map(float, dims),
            rep.metadata["periodic_variances"],
            rep.metadata["control_variances"],
        )
    )
    name = "variances.csv"
    _write_csv(out_dir / name, "d,periodic_variance,relu_variance", rows)
    return [name], [rep], []


# ---------------------------------------------------------------------------
# Registry


def builtin_fig1() -> ExperimentSpec:
    """Gradient descent on a shifted 2D Gaussian: the non-monotone angle."""
    return ExperimentSpec(
        name="fig1",
        trials=3,
        seed=20_240_101,
        params={
            "dist": "gaussian:mean=(0,1),var=1",
            "act": "relu",
            "target": "(1,0)",
            "inits": "fixed:(-1,1)|fixed:(-1,0.5)|fixed:(-1,0)",
            "eta": "1e-3",
            "horizon": "20000",
            "mc_samples": "100000",
            "record_stride": "1",
            "reach_tol": "1e-2",
            "grid_samples": "20000",
            "grid_resolution": "200",
        },
    )


_REGISTRY: dict[str, tuple[Callable[[], ExperimentSpec], Callable]] = {}


def _register(builder: Callable[[], ExperimentSpec], driver: Callable) -> None:
    spec = builder()
    _REGISTRY[spec.name] = (builder, driver)


_register(
    lambda: ExperimentSpec(
        name="thm31_failure",
        trials=1000,
        seed=31,
        params={
            "d": "20",
            "method": "gd",
            "eta": "0.1",
            "horizon": "10000",
            "init": f"gaussian_isotropic:tau={1.0 / math.sqrt(20.0)!r}",
        },
    ),
    _drive_thm31,
)
_register(
    lambda: ExperimentSpec(
        name="thm33_strict_rate",
        trials=20,
        seed=33,
        params={
            "dims": "3,5",
            "acts": "identity|leaky_relu:0.5",
            "n_eig": "1000000",
            "eta_frac": "0.5",
            "horizon": "200",
            "mc_samples": "100000",
        },
    ),
    _drive_thm33,
)
_register(
    lambda: ExperimentSpec(
        name="thm42_correlation",
        trials=100,
        seed=42,
        params={"d": "5", "n": "1000000"},
    ),
    _drive_thm42,
)
_register(
    lambda: ExperimentSpec(
        name="lemB1_pie_slice",
        trials=1,
        seed=1,
        params={
            "alphas": "0.5,1,2",
            "deltas": f"{np.pi / 8!r},{np.pi / 4!r},{np.pi / 2!r},{np.pi!r}",
            "n_directions": "360",
        },
    ),
    _drive_lemb1,
)
_register(
    lambda: ExperimentSpec(
        name="lem51_init_prob",
        trials=1,
        seed=51,
        params={"dims": "5,10,20", "draws": "100000"},
    ),
    _drive_lem51,
)
_register(
    lambda: ExperimentSpec(
        name="thm53_gd_rate",
        trials=1,
        seed=53,
        params={"d": "5", "dist_sq0": "0.81", "horizon": "1000"},
    ),
    _drive_thm53_gd,
)
_register(
    lambda: ExperimentSpec(
        name="thm53_sgd",
        trials=50,
        seed=533,
        params={
            "d": "5",
            "eps1": "0.2",
            "eps2": "0.05",
            "delta_fail": "0.1",
            "step_cap": "20000",
        },
    ),
    _drive_thm53_sgd,
)
_register(
    lambda: ExperimentSpec(
        name="lem61_angle",
        trials=50,
        seed=61,
        params={
            "d": "3",
            "t_max": "40",
            "flow_tolerance": "1e-8",
            "flow_records": "257",
        },
    ),
    _drive_lem61,
)
_register(
    lambda: ExperimentSpec(
        name="lem62_norm_region",
        trials=1,
        seed=62,
        params={
            "d": "4",
            "n": "1000000",
            "thetas": f"{np.pi / 6!r},{np.pi / 3!r},{np.pi / 2!r},{2 * np.pi / 3!r},{5 * np.pi / 6!r}",
            "norm_frac": "0.9",
        },
    ),
    _drive_lem62,
)
_register(
    lambda: ExperimentSpec(
        name="thm63_flow_rate",
        trials=50,
        seed=63,
        params={
            "d": "3",
            "t_max": "40",
            "flow_tolerance": "1e-8",
            "flow_records": "257",
        },
    ),
    _drive_thm63,
)
_register(
    lambda: ExperimentSpec(
        name="sec32_variance",
        trials=1,
        seed=32,
        params={
            "dims": "5,10,20",
            "period": "2.0",
            "n_targets": "200",
            "n_mc": "100000",
        },
    ),
    _drive_sec32,
)
_register(builtin_fig1, _drive_fig1)


def builtin_registry() -> list[ExperimentSpec]:
    """All built-in experiment specs, one per reproduced claim."""
    return [builder() for builder, _ in _REGISTRY.values()]


def get_spec(name: str) -> ExperimentSpec:
    if name not in _REGISTRY:
        raise ConfigError(f"unknown experiment {name!r}")
    return _REGISTRY[name][0]()


def run_experiment(spec: ExperimentSpec, out_root: Optional[str] = None) -> RunManifest:
    """Execute a spec: run trials, write CSVs, reports, figures, manifest."""
    if spec.name not in _REGISTRY:
        raise ConfigError(f"unknown experiment {spec.name!r}")
    driver = _REGISTRY[spec.name][1]
    out_dir = output_root(out_root) / spec.name / str(spec.seed)
    out_dir.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    files, reports, trajs = driver(spec, out_dir)
    _write_reports(out_dir / "reports.txt", reports)
    files = list(files) + ["reports.txt"]
    manifest = RunManifest(
        spec=spec,
        out_dir=out_dir,
        files=files,
        reports=reports,
        wall_clock=0.0,
        trajectories=trajs,
    )
    files += emit_plot_data(manifest)
    files += plots.render_manifest(manifest)
    manifest.files = files
    manifest.wall_clock = time.perf_counter() - start
    manifest.write()
    return manifest


def emit_plot_data(manifest: RunManifest) -> list[str]:
    """Per-run angle curves and, in 2D, parameter-path CSVs.

    Formats: ``angle_k.csv`` with header ``iter,angle_rad`` (undefined
    angles are skipped) and ``path_k.csv`` with header ``iter,w0,w1``.
    """
    files = []
    for k, traj in enumerate(manifest.trajectories):
        name = f"angle_{k:03d}.csv"
        _write_csv(
            manifest.out_dir / name,
            "iter,angle_rad",
            (
                (float(traj.times[i]), float(traj.angle[i]))
                for i in range(len(traj))
                if traj.angle_defined[i]
            ),
        )
        files.append(name)
        if traj.W.shape[1] == 2:
            name = f"path_{k:03d}.csv"
            _write_csv(
                manifest.out_dir / name,
                "iter,w0,w1",
                (
                    (float(traj.times[i]), float(traj.W[i, 0]), float(traj.W[i, 1]))
                    for i in range(len(traj))
                ),
            )
            files.append(name)
    return files

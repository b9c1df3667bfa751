"""Figure rendering for experiment manifests.

Figures are rendered to PNG next to the CSVs they depict. Everything is
drawn from in-memory data with fixed sizes and no timestamps, so output
bytes are reproducible for a fixed spec and seed.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_FIGSIZE = (6.4, 4.2)
_DPI = 110


def render_manifest(manifest) -> list[str]:
    """Render the standard figures for a run; returns created file names."""
    files: list[str] = []
    if manifest.trajectories:
        files.append(_render_angles(manifest))
        files.append(_render_distance(manifest))
        if manifest.trajectories[0].W.shape[1] == 2 and (manifest.out_dir / "lossgrid.csv").exists():
            files.append(_render_paths(manifest))
    if manifest.reports:
        files.append(_render_reports(manifest))
    return files


def _save(fig, manifest, name: str) -> str:
    fig.savefig(manifest.out_dir / name, dpi=_DPI)
    plt.close(fig)
    return name


def _render_angles(manifest) -> str:
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    for k, traj in enumerate(manifest.trajectories):
        mask = traj.angle_defined
        ax.plot(traj.times[mask], traj.angle[mask], lw=1.0, label=f"run {k}")
    ax.set_xlabel("iteration / time")
    ax.set_ylabel("angle to target [rad]")
    ax.set_ylim(0, np.pi * 1.02)
    ax.set_title(f"{manifest.spec.name}: angle along the run")
    if len(manifest.trajectories) <= 8:
        ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    return _save(fig, manifest, "angles.png")


def _render_distance(manifest) -> str:
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    for k, traj in enumerate(manifest.trajectories):
        positive = np.maximum(traj.dist_sq, 1e-300)
        ax.semilogy(traj.times, positive, lw=1.0, label=f"run {k}")
    ax.set_xlabel("iteration / time")
    ax.set_ylabel("squared distance to target")
    ax.set_title(f"{manifest.spec.name}: distance decay")
    if len(manifest.trajectories) <= 8:
        ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    return _save(fig, manifest, "distance.png")


def _render_paths(manifest) -> str:
    grid = np.loadtxt(manifest.out_dir / "lossgrid.csv", delimiter=",", skiprows=1)
    res = int(round(np.sqrt(grid.shape[0])))
    w0 = grid[:, 0].reshape(res, res)
    w1 = grid[:, 1].reshape(res, res)
    loss = grid[:, 2].reshape(res, res)
    fig, ax = plt.subplots(figsize=(5.2, 5.0))
    cs = ax.contourf(w0, w1, loss, levels=30, cmap="viridis")
    fig.colorbar(cs, ax=ax, label="loss")
    for k, traj in enumerate(manifest.trajectories):
        ax.plot(traj.W[:, 0], traj.W[:, 1], lw=1.2, label=f"run {k}")
        ax.plot(traj.W[0, 0], traj.W[0, 1], marker="o", ms=4, color="white")
    ax.plot(1.0, 0.0, marker="x", ms=9, color="red", mew=2)
    ax.set_xlabel("w0")
    ax.set_ylabel("w1")
    ax.set_title(f"{manifest.spec.name}: descent paths over the loss surface")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    return _save(fig, manifest, "paths.png")


def _render_reports(manifest) -> str:
    reports = manifest.reports
    fig, ax = plt.subplots(figsize=(6.4, max(2.2, 0.34 * len(reports) + 1.2)))
    ypos = np.arange(len(reports))
    colors = ["#2a9d4e" if r.passed else "#cc3333" for r in reports]
    margins = [r.observed - r.predicted for r in reports]
    ax.barh(ypos, margins, color=colors, height=0.6)
    ax.axvline(0.0, color="black", lw=0.8)
    labels = [
        r.theorem_id if len(reports) <= 14 or i % max(1, len(reports) // 14) == 0 else ""
        for i, r in enumerate(reports)
    ]
    ax.set_yticks(ypos)
    ax.set_yticklabels(labels, fontsize=7)
    ax.invert_yaxis()
    ax.set_xlabel("observed minus predicted bound")
    ax.set_title(f"{manifest.spec.name}: check margins")
    fig.tight_layout()
    return _save(fig, manifest, "reports.png")

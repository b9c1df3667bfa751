"""Command-line interface.

    neuronlab list
    neuronlab run <name> [--seed N] [--trials K] [--set key=value ...]
                         [--config FILE] [--out DIR]
    neuronlab check-all [--seed N] [--out DIR]

Exit code 0 iff every attached theorem check passed. Output root is
``./out`` unless --out or the NEURONLAB_OUT environment variable says
otherwise.
"""

from __future__ import annotations

import argparse
import sys

from .errors import NeuronLabError
from .harness import builtin_registry, get_spec, run_experiment

_DESCRIPTIONS = {
    "thm31_failure": "adversarial instance pins gradient methods above the 1/(8d) gap",
    "thm33_strict_rate": "linear rate for strictly increasing activations on the unit ball",
    "thm42_correlation": "gradient/target correlation lower bound for Gaussian + ReLU",
    "lemB1_pie_slice": "pie-slice integral lower bound by polar quadrature",
    "lem51_init_prob": "probability that a small Gaussian init lands in the safe zone",
    "thm53_gd_rate": "geometric GD rate at the certificate step size",
    "thm53_sgd": "SGD convergence at the theorem's own step size and horizon",
    "lem61_angle": "angle monotonicity along gradient flow (spherical symmetry)",
    "lem62_norm_region": "norm cannot shrink inside the safe region",
    "thm63_flow_rate": "high-probability exponential flow rate envelope",
    "sec32_variance": "gradient variance collapse for periodic activations",
    "fig1": "shifted-Gaussian descent with non-monotone angle (figure reproduction)",
}


def _parse_config_file(path: str) -> dict:
    overrides = {}
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise NeuronLabError(f"config line without '=': {line!r}")
            key, _, val = line.partition("=")
            overrides[key.strip()] = val.strip()
    return overrides


def _report_lines(manifest) -> list[str]:
    lines = []
    for r in manifest.reports:
        status = "PASS" if r.passed else "FAIL"
        lines.append(
            f"  [{status}] {r.theorem_id}: observed={r.observed:.6g} "
            f"predicted={r.predicted:.6g} tol={r.tolerance:.6g}"
        )
    return lines


def cmd_list(_args) -> int:
    for spec in builtin_registry():
        desc = _DESCRIPTIONS.get(spec.name, "")
        print(f"  {spec.name:<20} trials={spec.trials:<6} {desc}")
    return 0


def cmd_run(args) -> int:
    spec = get_spec(args.name)
    overrides = {}
    if args.config:
        overrides.update(_parse_config_file(args.config))
    for item in args.set or []:
        if "=" not in item:
            raise NeuronLabError(f"--set expects key=value, got {item!r}")
        key, _, val = item.partition("=")
        overrides[key] = val
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.seed is not None:
        overrides["seed"] = args.seed
    spec = spec.with_overrides(overrides)
    manifest = run_experiment(spec, out_root=args.out)
    print(f"{spec.name} (seed {spec.seed}): wrote {manifest.out_dir}")
    print("\n".join(_report_lines(manifest)))
    print(f"  wall clock: {manifest.wall_clock:.2f}s")
    return 0 if manifest.all_passed else 1


def cmd_check_all(args) -> int:
    all_ok = True
    for spec in builtin_registry():
        if args.seed is not None:
            spec = spec.with_overrides({"seed": args.seed})
        manifest = run_experiment(spec, out_root=args.out)
        ok = manifest.all_passed
        all_ok &= ok
        n_pass = sum(r.passed for r in manifest.reports)
        print(
            f"[{'PASS' if ok else 'FAIL'}] {spec.name}: "
            f"{n_pass}/{len(manifest.reports)} checks, {manifest.wall_clock:.1f}s"
        )
        if not ok:
            print("\n".join(l for l in _report_lines(manifest) if "[FAIL]" in l))
    return 0 if all_ok else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="neuronlab",
        description="Single-neuron learning laboratory: experiments and theorem checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("list", help="list built-in experiments").set_defaults(fn=cmd_list)

    run_p = sub.add_parser("run", help="run one experiment")
    run_p.add_argument("name")
    run_p.add_argument("--seed", type=int, default=None)
    run_p.add_argument("--trials", type=int, default=None)
    run_p.add_argument("--set", action="append", metavar="KEY=VALUE")
    run_p.add_argument("--config", default=None, help="key=value file; flags win")
    run_p.add_argument("--out", default=None, help="output root (default ./out)")
    run_p.set_defaults(fn=cmd_run)

    all_p = sub.add_parser("check-all", help="run every experiment")
    all_p.add_argument("--seed", type=int, default=None)
    all_p.add_argument("--out", default=None)
    all_p.set_defaults(fn=cmd_check_all)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except NeuronLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())

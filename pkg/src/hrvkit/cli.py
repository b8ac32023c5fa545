"""Command-line front end for reproducible batch runs.

Subcommands mirror the library: ``simulate`` writes generated datasets,
``tail`` sweeps tail-index fits over k, ``detect`` runs the sequential
cone search, ``spectral`` estimates angular measures and densities,
``risk`` prices the two risk-region families, and ``finiteness`` reports
moment verdicts.  Every artifact is a pure function of the input bytes
and the echoed configuration; re-running a command reproduces files
byte-for-byte.  ``HRVKIT_THREADS`` caps k-sweep parallelism.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .data import SampleMatrix, load_csv, rank_transform
from .detect import DetectionConfig, sequential_hrv_search
from .errors import HrvError
from .finiteness import moment_mass, moment_mass_simplex
from .risk import (
    joint_exceedance_hr,
    joint_exceedance_semiparam,
    linear_combination_risk,
    noncompliance_probability,
)
from .simulate import GeneratorSpec, dataset_metadata, example_dataset, registered_examples
from .spectral import (
    SpectralAtoms,
    density_estimate,
    estimate_spectral_rank,
    estimate_spectral_standard,
    transform_measure,
)
from .tail import alt_tail_estimate, hill_series
from .detect import pushforward_M

__all__ = ["main"]


def _max_workers() -> int:
    raw = os.environ.get("HRVKIT_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return max(1, os.cpu_count() or 1)


def _write_json(path: str, payload: dict) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True, allow_nan=False)
    Path(path).write_text(text + "\n", encoding="utf-8")


def _write_csv(path: str, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_csv_cell(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _csv_cell(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))  # shortest round-trip form
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def _config_echo(args: argparse.Namespace) -> dict:
    skip = {"func"}
    echo = {k: v for k, v in vars(args).items() if k not in skip and v is not None}
    echo["version"] = __version__
    return echo


def _load_sample(args: argparse.Namespace) -> SampleMatrix:
    columns = None
    if getattr(args, "columns", None):
        raw = args.columns.split(",")
        columns = [int(c) if c.lstrip("-").isdigit() else c for c in raw]
    return load_csv(args.data, delimiter=args.delimiter, header=not args.no_header, columns=columns)


def _parse_floats(text: str, name: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise HrvError(f"cannot parse {name}={text!r} as comma-separated numbers") from None


def _parse_k_range(text: str) -> list[int]:
    """Either a single k, a comma list, or start:stop:step (inclusive stop)."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) not in (2, 3):
            raise HrvError(f"bad k range {text!r}, expected start:stop[:step]")
        start, stop = int(parts[0]), int(parts[1])
        step = int(parts[2]) if len(parts) == 3 else 1
        return list(range(start, stop + 1, step))
    return [int(v) for v in text.split(",")]


def _cmd_simulate(args: argparse.Namespace) -> int:
    params = json.loads(args.params) if args.params else {}
    spec = GeneratorSpec(name=args.example, n=args.n, seed=args.seed, params=params)
    sample = example_dataset(spec)
    _write_csv(args.out, list(sample.columns), [list(row) for row in sample.values])
    meta = dataset_metadata(spec)
    meta["columns"] = list(sample.columns)
    meta["config"] = _config_echo(args)
    _write_json(args.out + ".meta.json", meta)
    print(f"wrote {sample.n} x {sample.d} rows to {args.out}")
    return 0


def _tail_point_rows(data, k_values, method):
    if method == "hill":
        rows = []
        for point in hill_series(data, k_values):
            if point.fit is not None:
                rows.append([point.k, point.fit.alpha_hat, point.fit.scale_at_k, ""])
            else:
                rows.append([point.k, "", "", point.error])
        return rows
    rows = []
    for k in k_values:
        try:
            fit = alt_tail_estimate(data, k, method)
            rows.append([k, fit.alpha_hat, fit.scale_at_k, ""])
        except HrvError as exc:
            rows.append([k, "", "", type(exc).__name__])
    return rows


def _cmd_tail(args: argparse.Namespace) -> int:
    sample = _load_sample(args)
    if args.column is not None:
        data = sample.column(args.column)
        label = f"column {args.column}"
    else:
        level = args.level or 1
        if args.mode == "rank":
            data = rank_transform(sample, level).values
        else:
            data = sample.level_values(level)
        label = f"level {level} ({args.mode})"
    k_values = _parse_k_range(args.k_range) if args.k_range else list(range(1, sample.n))
    rows = _tail_point_rows(data, k_values, args.method)
    _write_csv(args.out, ["k", "alpha_hat", "scale_at_k", "error"], rows)
    print(f"wrote {len(rows)} {args.method} fits for {label} to {args.out}")
    return 0


def _density_sidecars(report, directory: str) -> list[str]:
    written = []
    base = Path(directory)
    base.mkdir(parents=True, exist_ok=True)
    for entry in report.levels:
        if entry.atoms is None:
            continue
        for p in sorted(entry.verdicts):
            pushed = pushforward_M(entry.atoms, p)
            order = np.argsort(pushed.values, kind="stable")
            path = base / f"pushforward_l{entry.level}_p{p}.csv"
            _write_csv(
                str(path),
                ["value", "weight"],
                [[float(pushed.values[i]), float(pushed.weights[i])] for i in order],
            )
            written.append(str(path))
        if entry.atoms.dim in (2, 3):
            try:
                curve = density_estimate(transform_measure(entry.atoms))
            except HrvError:
                continue
            path = base / f"transformed_density_l{entry.level}.csv"
            if curve.grid.ndim == 1:
                rows = [[g, v] for g, v in zip(curve.grid, curve.values)]
                _write_csv(str(path), ["s", "density"], rows)
            else:
                rows = [[g[0], g[1], v] for g, v in zip(curve.grid, curve.values)]
                _write_csv(str(path), ["s1", "s2", "density"], rows)
            written.append(str(path))
    return written


def _cmd_detect(args: argparse.Namespace) -> int:
    sample = _load_sample(args)
    config = DetectionConfig(epsilon=args.epsilon, cutoff=args.cutoff, alpha_tolerance=args.alpha_tolerance)
    report = sequential_hrv_search(sample, mode=args.mode, k=args.k, config=config)
    payload = report.to_dict()
    payload["columns"] = list(sample.columns)
    payload["n"] = sample.n
    payload["column_tie_fraction"] = [
        float(1.0 - np.unique(sample.column(j)).size / sample.n) for j in range(sample.d)
    ]
    payload["config_echo"] = _config_echo(args)
    if args.density_dir:
        payload["density_files"] = _density_sidecars(report, args.density_dir)
    _write_json(args.json, payload)
    fitted = [e.level for e in report.fitted_levels()]
    print(f"stop={report.stop_reason} fitted_levels={fitted} report={args.json}")
    return 0


def _cmd_spectral(args: argparse.Namespace) -> int:
    sample = _load_sample(args)
    estimator = estimate_spectral_rank if args.mode == "rank" else estimate_spectral_standard
    atoms = estimator(sample, args.level, args.k)
    transformed = transform_measure(atoms)
    payload = {
        "level": atoms.level,
        "dim": atoms.dim,
        "mode": args.mode,
        "k": args.k,
        "atoms": atoms.to_records(),
        "transformed": transformed.to_records(),
        "sentinel_mass": transformed.sentinel_mass,
        "config_echo": _config_echo(args),
    }
    _write_json(args.json, payload)
    if args.density:
        bandwidth = "auto" if args.bandwidth == "auto" else float(args.bandwidth)
        curve = density_estimate(transformed, bandwidth=bandwidth, grid_size=args.grid)
        if curve.grid.ndim == 1:
            rows = [[g, v] for g, v in zip(curve.grid, curve.values)]
            _write_csv(args.density, ["s", "density"], rows)
        else:
            rows = [[g[0], g[1], v] for g, v in zip(curve.grid, curve.values)]
            _write_csv(args.density, ["s1", "s2", "density"], rows)
    print(f"estimated {atoms.count} atoms at level {args.level}; json={args.json}")
    return 0


def _risk_once(sample: SampleMatrix, args: argparse.Namespace, k: int):
    if args.risk_kind == "joint":
        indices = [int(v) for v in args.indices.split(",")]
        thresholds = _parse_floats(args.thresholds, "thresholds")
        if args.hr:
            return joint_exceedance_hr(sample, thresholds, k)
        return joint_exceedance_semiparam(sample, indices, thresholds, k, mode=args.mode)
    if args.risk_kind == "noncompliance":
        thresholds = _parse_floats(args.thresholds, "thresholds")
        config = DetectionConfig(epsilon=args.epsilon, cutoff=args.cutoff, alpha_tolerance=args.alpha_tolerance)
        report = sequential_hrv_search(sample, mode=args.mode, k=min(k, sample.n - 1), config=config)
        return noncompliance_probability(sample, thresholds, report, k)
    gamma = _parse_floats(args.gamma, "gamma")
    return linear_combination_risk(sample, gamma, args.y, k)


def _cmd_risk(args: argparse.Namespace) -> int:
    sample = _load_sample(args)
    estimate = _risk_once(sample, args, args.k)
    payload = estimate.to_dict()
    payload["config_echo"] = _config_echo(args)
    _write_json(args.json, payload)
    if args.k_sweep:
        ks = _parse_k_range(args.k_sweep)
        with concurrent.futures.ThreadPoolExecutor(max_workers=_max_workers()) as pool:
            estimates = list(pool.map(lambda kk: _risk_once(sample, args, kk), ks))
        rows = [[k, est.probability, est.method] for k, est in zip(ks, estimates)]
        _write_csv(args.sweep_out, ["k", "probability", "method"], rows)
    print(f"{args.risk_kind} probability {estimate.probability:.6g} -> {args.json}")
    return 0


def _cmd_finiteness(args: argparse.Namespace) -> int:
    sample = _load_sample(args)
    estimator = estimate_spectral_rank if args.mode == "rank" else estimate_spectral_standard
    atoms = estimator(sample, args.level, args.k)
    verdict = moment_mass(atoms, args.alpha, norm=args.norm)
    simplex_verdict = moment_mass_simplex(transform_measure(atoms), args.alpha)
    payload = {
        "norm_verdict": verdict.to_dict(),
        "simplex_verdict": simplex_verdict.to_dict(),
        "level": args.level,
        "k": args.k,
        "alpha": args.alpha,
        "config_echo": _config_echo(args),
    }
    _write_json(args.json, payload)
    print(f"moment value {verdict.value} finite={verdict.finite} -> {args.json}")
    return 0


def _add_sample_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("data", help="input CSV file")
    parser.add_argument("--delimiter", default=",")
    parser.add_argument("--no-header", action="store_true", help="first line is data, not names")
    parser.add_argument("--columns", help="comma list of column names or 0-based indices to keep")


def _add_detect_knobs(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--epsilon", type=float, default=0.05, help="degeneracy cut on pushforward values")
    parser.add_argument("--cutoff", type=float, default=0.9, help="mass fraction below epsilon that is degenerate")
    parser.add_argument("--alpha-tolerance", type=float, default=0.1, help="allowed drop between fitted tail indices")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hrvkit", description=__doc__)
    parser.add_argument("--version", action="version", version=f"hrvkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="write a generated dataset plus metadata sidecar")
    p.add_argument("--example", required=True, choices=registered_examples())
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--params", help="JSON object of generator parameters")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("tail", help="tail-index series over a k grid, as CSV")
    _add_sample_arguments(p)
    p.add_argument("--column", type=int, help="fit one raw column (0-based)")
    p.add_argument("--level", type=int, help="fit per-row level values instead of a column")
    p.add_argument("--mode", choices=["standard", "rank"], default="standard")
    p.add_argument("--method", choices=["hill", "qq", "pickands"], default="hill")
    p.add_argument("--k-range", help="k, comma list, or start:stop[:step]")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_tail)

    p = sub.add_parser("detect", help="sequential search over nested cones, JSON report")
    _add_sample_arguments(p)
    p.add_argument("--mode", choices=["standard", "rank"], default="rank")
    p.add_argument("--k", type=int, required=True)
    _add_detect_knobs(p)
    p.add_argument("--json", required=True)
    p.add_argument("--density-dir", help="directory for per-level density CSV sidecars")
    p.set_defaults(func=_cmd_detect)

    p = sub.add_parser("spectral", help="angular atoms, simplex transform, optional density CSV")
    _add_sample_arguments(p)
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--mode", choices=["standard", "rank"], default="rank")
    p.add_argument("--json", required=True)
    p.add_argument("--density", help="CSV path for the transformed-measure density")
    p.add_argument("--bandwidth", default="auto")
    p.add_argument("--grid", type=int, default=512)
    p.set_defaults(func=_cmd_spectral)

    p = sub.add_parser("risk", help="tail-risk probabilities, JSON plus optional k sweep")
    p.add_argument("risk_kind", choices=["joint", "noncompliance", "linear"])
    _add_sample_arguments(p)
    p.add_argument("--mode", choices=["standard", "rank"], default="rank")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--indices", default="0,1", help="columns for joint exceedance (0-based)")
    p.add_argument("--thresholds", help="comma list of thresholds")
    p.add_argument("--hr", action="store_true", help="use the rank-empirical comparison estimator")
    p.add_argument("--gamma", default="1,1", help="combination weights for linear risk")
    p.add_argument("--y", type=float, help="level for linear risk")
    _add_detect_knobs(p)
    p.add_argument("--json", required=True)
    p.add_argument("--k-sweep", help="k grid start:stop[:step] for a sweep CSV")
    p.add_argument("--sweep-out", help="CSV path for the sweep")
    p.set_defaults(func=_cmd_risk)

    p = sub.add_parser("finiteness", help="moment verdicts for an estimated angular measure")
    _add_sample_arguments(p)
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--norm", choices=["l1", "l2", "linf"], default="l1")
    p.add_argument("--mode", choices=["standard", "rank"], default="rank")
    p.add_argument("--json", required=True)
    p.set_defaults(func=_cmd_finiteness)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "k", None) is not None and args.k < 1:
        parser.error("--k must be >= 1")
    if getattr(args, "epsilon", None) is not None and not 0.0 < args.epsilon < 1.0:
        parser.error("--epsilon must be in (0, 1)")
    if getattr(args, "cutoff", None) is not None and not 0.0 < args.cutoff <= 1.0:
        parser.error("--cutoff must be in (0, 1]")
    if args.command == "risk":
        if args.risk_kind in ("joint", "noncompliance") and not args.thresholds:
            parser.error("risk joint/noncompliance requires --thresholds")
        if args.risk_kind == "linear" and args.y is None:
            parser.error("risk linear requires --y")
        if args.k_sweep and not args.sweep_out:
            parser.error("--k-sweep requires --sweep-out")
    try:
        return args.func(args)
    except HrvError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

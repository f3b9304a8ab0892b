"""Command line interface: reproducible runs that leave CSV artifacts and a
manifest with content digests in the output directory."""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import os
import sys
from pathlib import Path

from . import __version__
from .analysis import (attractor_histogram, attractor_histogram_csv, bias_csv,
                       bias_histogram_csv, bias_map, generalization_sweep,
                       knockout_csv, knockout_scan, randomize_positions,
                       sweep_csv)
from .config import ConfigError, ExperimentConfig, emit_config, parse_config
from .evolution import Task, evolve, evolve_fixed, training_grids
from .grid import random_grid, to_text
from .rules import read_genome, rollout, write_genome
from .seeding import derive_stream

_ENV_THREADS = "HOMEOLIFE_THREADS"


def _workers() -> int:
    """Worker thread cap from the environment; unset means serial, 0 means
    one per CPU."""
    raw = os.environ.get(_ENV_THREADS)
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{_ENV_THREADS} must be an integer, got {raw!r}") from None
    if n < 0:
        raise ValueError(f"{_ENV_THREADS} must be >= 0, got {n}")
    return n if n > 0 else (os.cpu_count() or 1)


def _load_config(args: argparse.Namespace) -> ExperimentConfig:
    """Defaults, overlaid by the --config file, overlaid by flags."""
    if getattr(args, "config", None):
        path = Path(args.config)
        try:
            cfg = parse_config(path.read_text(encoding="utf-8"))
        except ConfigError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    else:
        cfg = ExperimentConfig()
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides["master_seed"] = args.seed
    if getattr(args, "task", None) is not None:
        overrides["task"] = args.task
    if getattr(args, "layout", None) is not None:
        overrides["layout"] = args.layout
    if overrides:
        cfg = dataclasses.replace(cfg, **overrides)
    cfg.validate()
    return cfg


def _prepare_out(path: str, force: bool) -> Path:
    out = Path(path)
    if out.exists() and not force:
        raise ValueError(f"output directory {out} exists (use --force to reuse it)")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_text(path: Path, text: str) -> Path:
    path.write_text(text, encoding="utf-8")
    return path


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_manifest(out: Path, command: str, cfg: ExperimentConfig,
                    artifacts: list[Path]) -> None:
    manifest = {
        "tool": "homeolife",
        "version": __version__,
        "command": command,
        "master_seed": cfg.master_seed,
        "config": dataclasses.asdict(cfg),
        "artifacts": [{"path": p.name, "sha256": _sha256(p)}
                      for p in sorted(artifacts, key=lambda p: p.name)],
    }
    _write_text(out / "manifest.json",
                json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _genome_header(command: str, cfg: ExperimentConfig,
                   fitness: float | None) -> tuple[str, ...]:
    lines = [f"homeolife {__version__} genome",
             f"command: {command}",
             f"task: {cfg.task}",
             f"master_seed: {cfg.master_seed}"]
    if fitness is not None:
        lines.append(f"fitness: {fitness!r}")
    lines.append("config:")
    lines.extend(f"  {ln}" for ln in emit_config(cfg).splitlines())
    return tuple(lines)


def _run_analyses(out: Path, genome, cfg: ExperimentConfig) -> list[Path]:
    files = []
    if cfg.run_bias:
        records, hist_out, hist_in = bias_map(genome)
        files.append(_write_text(out / "bias.csv", bias_csv(records)))
        files.append(_write_text(out / "bias_hist.csv",
                                 bias_histogram_csv(hist_out, hist_in)))
    if cfg.run_knockout:
        init_low, init_high = training_grids(cfg.ga_config())
        records = knockout_scan(genome, init_low, init_high, cfg.ga_config())
        files.append(_write_text(out / "knockout.csv", knockout_csv(records)))
    if cfg.run_sweep:
        sweep = generalization_sweep(genome, cfg.sweep_densities,
                                     cfg.sweep_samples, cfg.sweep_steps,
                                     seed=cfg.master_seed)
        table = attractor_histogram(sweep, cfg.sweep_bins)
        files.append(_write_text(out / "sweep.csv", sweep_csv(sweep)))
        files.append(_write_text(out / "histogram.csv",
                                 attractor_histogram_csv(sweep, table)))
    return files


def _cmd_evolve(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    out = _prepare_out(args.out, args.force)
    command = "evolve-fixed" if args.frozen_layout else "evolve"
    task = Task(cfg.task)
    if args.frozen_layout:
        best, log = evolve_fixed(task, cfg.layout, cfg.ga_config(),
                                 workers=_workers())
    else:
        best, log = evolve(task, cfg.ga_config(), workers=_workers())
    files = [_write_text(out / "log.csv", log.to_csv()),
             _write_text(out / "config.txt", emit_config(cfg))]
    genome_path = out / "best_genome.txt"
    write_genome(genome_path, best.genome,
                 header=_genome_header(command, cfg, best.fitness))
    files.append(genome_path)
    files.extend(_run_analyses(out, best.genome, cfg))
    _write_manifest(out, command, cfg, files)
    return 0


def _cmd_rollout(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    out = _prepare_out(args.out, args.force)
    genome = read_genome(args.genome)
    if not 0.0 <= args.density <= 1.0:
        raise ValueError(f"--density must be in [0, 1], got {args.density}")
    if args.steps < 1:
        raise ValueError(f"--steps must be >= 1, got {args.steps}")
    dumps = _parse_steps(args.dump_steps, args.steps)
    grid0 = random_grid(args.density, derive_stream(cfg.master_seed, "rollout-init"))
    result = rollout(grid0, genome, args.steps, snapshot_steps=dumps)
    lines = ["step,density"]
    lines.extend(f"{t},{float(d)!r}" for t, d in enumerate(result.densities))
    files = [_write_text(out / "trajectory.csv", "\n".join(lines) + "\n")]
    for step in sorted(result.snapshots):
        files.append(_write_text(out / f"step_{step:05d}.txt",
                                 to_text(result.snapshots[step])))
    _write_manifest(out, "rollout", cfg, files)
    return 0


def _parse_steps(spec: str | None, steps: int) -> tuple[int, ...]:
    if not spec:
        return ()
    try:
        values = tuple(int(p.strip(), 10) for p in spec.split(","))
    except ValueError:
        raise ValueError(f"--dump-steps must be comma-separated integers, got {spec!r}") from None
    for v in values:
        if not 0 <= v <= steps:
            raise ValueError(f"--dump-steps value {v} outside 0..{steps}")
    return values


def _cmd_bias(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    out = _prepare_out(args.out, args.force)
    records, hist_out, hist_in = bias_map(read_genome(args.genome))
    files = [_write_text(out / "bias.csv", bias_csv(records)),
             _write_text(out / "bias_hist.csv", bias_histogram_csv(hist_out, hist_in))]
    _write_manifest(out, "bias", cfg, files)
    return 0


def _cmd_knockout(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    out = _prepare_out(args.out, args.force)
    genome = read_genome(args.genome)
    init_low, init_high = training_grids(cfg.ga_config())
    records = knockout_scan(genome, init_low, init_high, cfg.ga_config())
    files = [_write_text(out / "knockout.csv", knockout_csv(records))]
    _write_manifest(out, "knockout", cfg, files)
    return 0


def _cmd_randomize(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    out = _prepare_out(args.out, args.force)
    genome = read_genome(args.genome)
    shuffled = randomize_positions(genome, derive_stream(cfg.master_seed, "randomize"))
    path = out / "randomized.txt"
    write_genome(path, shuffled, header=_genome_header("randomize", cfg, None))
    _write_manifest(out, "randomize", cfg, [path])
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    out = _prepare_out(args.out, args.force)
    genome = read_genome(args.genome)
    sweep = generalization_sweep(genome, cfg.sweep_densities, cfg.sweep_samples,
                                 cfg.sweep_steps, seed=cfg.master_seed)
    table = attractor_histogram(sweep, cfg.sweep_bins)
    files = [_write_text(out / "sweep.csv", sweep_csv(sweep)),
             _write_text(out / "histogram.csv", attractor_histogram_csv(sweep, table))]
    _write_manifest(out, "sweep", cfg, files)
    return 0


def _add_common(sub: argparse.ArgumentParser, *, genome: bool) -> None:
    sub.add_argument("--config", help="configuration file (key = value lines)")
    sub.add_argument("--seed", type=int, help="master seed (overrides config)")
    sub.add_argument("--out", required=True, help="output directory")
    sub.add_argument("--force", action="store_true",
                     help="reuse an existing output directory")
    if genome:
        sub.add_argument("--genome", required=True, help="genome file to load")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="homeolife",
        description="Evolve and analyze override-rule genomes on a bounded "
                    "Game of Life grid.")
    parser.add_argument("--version", action="version",
                        version=f"homeolife {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("evolve", help="run the genetic algorithm")
    _add_common(p, genome=False)
    p.add_argument("--task", choices=["rp", "ri", "hh", "hl"],
                   help="regulation task (overrides config)")
    p.set_defaults(func=_cmd_evolve, frozen_layout=False)

    p = subs.add_parser("evolve-fixed",
                        help="run the GA on a frozen position layout")
    _add_common(p, genome=False)
    p.add_argument("--task", choices=["rp", "ri", "hh", "hl"],
                   help="regulation task (overrides config)")
    p.add_argument("--layout", choices=["full", "checker"],
                   help="position layout (overrides config)")
    p.set_defaults(func=_cmd_evolve, frozen_layout=True)

    p = subs.add_parser("rollout", help="run one genome and record densities")
    _add_common(p, genome=True)
    p.add_argument("--density", type=float, default=0.0,
                   help="initial interior density (default 0)")
    p.add_argument("--steps", type=int, default=500,
                   help="steps to simulate (default 500)")
    p.add_argument("--dump-steps",
                   help="comma-separated step indices to dump as grids")
    p.set_defaults(func=_cmd_rollout)

    p = subs.add_parser("bias", help="per-rule bias table and histograms")
    _add_common(p, genome=True)
    p.set_defaults(func=_cmd_bias)

    p = subs.add_parser("knockout", help="single-rule knockout scan")
    _add_common(p, genome=True)
    p.set_defaults(func=_cmd_knockout)

    p = subs.add_parser("randomize", help="shuffle rule positions uniformly")
    _add_common(p, genome=True)
    p.set_defaults(func=_cmd_randomize)

    p = subs.add_parser("sweep", help="initial-density generalization sweep")
    _add_common(p, genome=True)
    p.set_defaults(func=_cmd_sweep)

    return parser


def run_subcommand(argv: list[str]) -> int:
    """Parse argv (without the program name) and run; returns the exit status."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else 0
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_subcommand(sys.argv[1:]))

"""Experiment configuration files: `key = value` lines, '#' comments,
strict validation with line-located errors, and lossless emission."""

from __future__ import annotations

from dataclasses import dataclass, fields

from .evolution import GAConfig


class ConfigError(ValueError):
    """Malformed or out-of-range configuration input."""


_TASKS = ("rp", "ri", "hh", "hl")
_LAYOUTS = ("full", "checker")


@dataclass(frozen=True)
class ExperimentConfig:
    task: str = "hh"
    population_size: int = 30
    initial_rules_per_genome: int = 45
    bit_mutation_rate: float = 0.05
    crossover_rate: float = 0.01
    gene_dup_del_rate: float = 0.01
    elite_count: int = 5
    survivor_count: int = 15
    low_density: float = 0.0
    high_density: float = 0.5
    eval_steps: int = 500
    window_start: int = 250
    window_end: int = 500
    generations: int = 1000
    master_seed: int = 0
    layout: str = "full"
    sweep_densities: tuple[float, ...] = tuple(i / 10 for i in range(11))
    sweep_samples: int = 100
    sweep_steps: int = 500
    sweep_bins: int = 50
    run_bias: bool = False
    run_knockout: bool = False
    run_sweep: bool = False

    def ga_config(self) -> GAConfig:
        return GAConfig(
            population_size=self.population_size,
            initial_rules_per_genome=self.initial_rules_per_genome,
            bit_mutation_rate=self.bit_mutation_rate,
            crossover_rate=self.crossover_rate,
            gene_dup_del_rate=self.gene_dup_del_rate,
            elite_count=self.elite_count,
            survivor_count=self.survivor_count,
            low_density=self.low_density,
            high_density=self.high_density,
            eval_steps=self.eval_steps,
            window_start=self.window_start,
            window_end=self.window_end,
            generations=self.generations,
            master_seed=self.master_seed,
        )

    def validate(self) -> None:
        try:
            self.ga_config().validate()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.task not in _TASKS:
            raise ConfigError(f"task must be one of {', '.join(_TASKS)}")
        if self.layout not in _LAYOUTS:
            raise ConfigError(f"layout must be one of {', '.join(_LAYOUTS)}")
        if self.sweep_steps < 1:
            raise ConfigError("sweep_steps must be >= 1")
        if self.sweep_samples < 1:
            raise ConfigError("sweep_samples must be >= 1")
        if self.sweep_bins < 1:
            raise ConfigError("sweep_bins must be >= 1")
        if any(not 0.0 <= d <= 1.0 for d in self.sweep_densities):
            raise ConfigError("sweep_densities must lie in [0, 1]")


def _parse_int(text: str) -> int:
    return int(text, 10)


def _parse_nonneg_int(text: str) -> int:
    v = int(text, 10)
    if v < 0:
        raise ValueError("must be >= 0")
    return v


def _parse_pos_int(text: str) -> int:
    v = int(text, 10)
    if v < 1:
        raise ValueError("must be >= 1")
    return v


def _parse_unit(text: str) -> float:
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise ValueError("must be in [0, 1]")
    return v


def _parse_bool(text: str) -> bool:
    low = text.lower()
    if low == "true":
        return True
    if low == "false":
        return False
    raise ValueError("must be 'true' or 'false'")


def _parse_task(text: str) -> str:
    if text not in _TASKS:
        raise ValueError(f"must be one of {', '.join(_TASKS)}")
    return text


def _parse_layout(text: str) -> str:
    if text not in _LAYOUTS:
        raise ValueError(f"must be one of {', '.join(_LAYOUTS)}")
    return text


def _parse_density_list(text: str) -> tuple[float, ...]:
    parts = [p.strip() for p in text.split(",")]
    if not parts or any(not p for p in parts):
        raise ValueError("must be a comma-separated list of densities")
    return tuple(_parse_unit(p) for p in parts)


_PARSERS = {
    "task": _parse_task,
    "population_size": _parse_pos_int,
    "initial_rules_per_genome": _parse_nonneg_int,
    "bit_mutation_rate": _parse_unit,
    "crossover_rate": _parse_unit,
    "gene_dup_del_rate": _parse_unit,
    "elite_count": _parse_nonneg_int,
    "survivor_count": _parse_pos_int,
    "low_density": _parse_unit,
    "high_density": _parse_unit,
    "eval_steps": _parse_pos_int,
    "window_start": _parse_nonneg_int,
    "window_end": _parse_pos_int,
    "generations": _parse_nonneg_int,
    "master_seed": _parse_int,
    "layout": _parse_layout,
    "sweep_densities": _parse_density_list,
    "sweep_samples": _parse_pos_int,
    "sweep_steps": _parse_pos_int,
    "sweep_bins": _parse_pos_int,
    "run_bias": _parse_bool,
    "run_knockout": _parse_bool,
    "run_sweep": _parse_bool,
}

assert set(_PARSERS) == {f.name for f in fields(ExperimentConfig)}


def parse_config(text: str) -> ExperimentConfig:
    """Parse configuration text; unset keys keep their defaults.

    Raises ConfigError naming the offending line for unknown or duplicate
    keys, malformed lines, bad values, and inconsistent combinations.
    """
    values = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"line {ln}: expected 'key = value', got {raw.strip()!r}")
        key = key.strip()
        value = value.strip()
        if key not in _PARSERS:
            raise ConfigError(f"line {ln}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {ln}: duplicate key {key!r}")
        try:
            values[key] = _PARSERS[key](value)
        except ValueError as exc:
            detail = str(exc) or "invalid value"
            raise ConfigError(f"line {ln}: {key}: {detail}") from None
    cfg = ExperimentConfig(**values)
    cfg.validate()
    return cfg


def emit_config(cfg: ExperimentConfig) -> str:
    """Emit text that parse_config reads back to an equal config."""
    lines = []
    for f in fields(ExperimentConfig):
        value = getattr(cfg, f.name)
        if isinstance(value, bool):
            rendered = "true" if value else "false"
        elif isinstance(value, tuple):
            rendered = ",".join(repr(v) for v in value)
        elif isinstance(value, float):
            rendered = repr(value)
        else:
            rendered = str(value)
        lines.append(f"{f.name} = {rendered}")
    return "\n".join(lines) + "\n"

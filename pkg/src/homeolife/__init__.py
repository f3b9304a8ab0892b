"""Two-layer Game of Life: a bounded B3/S23 grid where an evolvable genome of
site-pinned totalistic rules overrides the update inside a central area, plus
a genetic algorithm and analysis tools for the density-regulation tasks."""

__version__ = "0.1.0"

from .analysis import (KnockoutRecord, RuleBias, SweepRecord,
                       attractor_histogram, bias_map, generalization_sweep,
                       input_bias, knockout_scan, output_bias,
                       randomize_positions)
from .config import ConfigError, ExperimentConfig, emit_config, parse_config
from .evolution import (EvolutionLog, GAConfig, GenerationRecord, Individual,
                        Task, crossover, dup_delete, evaluate_fitness, evolve,
                        evolve_fixed, layout_positions, mutate,
                        next_generation, select_survivors, window_mean)
from .grid import (GENOME_AREA, GRID_SIZE, TARGET, Grid, Region, density,
                   empty_grid, from_text, life_step, random_grid, to_text)
from .rules import (LIFE_RULE, Genome, RolloutResult, SiteRule,
                    TotalisticRule, apply_rule, coupled_step, decode_rule,
                    encode_rule, random_genome, read_genome, rollout,
                    write_genome)
from .seeding import derive_stream

__all__ = [
    "__version__",
    "GRID_SIZE", "Grid", "Region", "TARGET", "GENOME_AREA",
    "empty_grid", "life_step", "density", "random_grid", "to_text", "from_text",
    "TotalisticRule", "SiteRule", "Genome", "LIFE_RULE", "RolloutResult",
    "encode_rule", "decode_rule", "apply_rule", "coupled_step", "rollout",
    "random_genome", "read_genome", "write_genome",
    "Task", "GAConfig", "Individual", "GenerationRecord", "EvolutionLog",
    "window_mean", "evaluate_fitness", "select_survivors", "mutate",
    "crossover", "dup_delete", "next_generation", "evolve", "evolve_fixed",
    "layout_positions",
    "RuleBias", "KnockoutRecord", "SweepRecord", "output_bias", "input_bias",
    "bias_map", "knockout_scan", "randomize_positions", "generalization_sweep",
    "attractor_histogram",
    "ExperimentConfig", "ConfigError", "parse_config", "emit_config",
    "derive_stream",
]

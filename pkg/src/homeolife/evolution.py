"""Genetic algorithm over rule genomes.

Fitness is deterministic given the two initial grids, so all randomness in a
run flows through one sequential GA stream plus the streams that build the
initial population and initial grids. Evaluations are pure and may run on
worker threads without changing any result.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .grid import Grid, random_grid
from .rules import (CONDITION_BITS, RULE_BITS, AREA_SIDE, Genome, SiteRule,
                    decode_rule, encode_rule, random_genome, rollout)
from .seeding import derive_stream


class Task(Enum):
    """Regulation targets for the density held over the fitness window."""

    PROPORTIONAL = "rp"   # reproduce the initial density
    INVERSE = "ri"        # one minus the initial density
    HOLD_HIGH = "hh"      # constant 0.5
    HOLD_LOW = "hl"       # constant 0.05

    def target(self, initial_density: float) -> float:
        if self is Task.PROPORTIONAL:
            return initial_density
        if self is Task.INVERSE:
            return 1.0 - initial_density
        if self is Task.HOLD_HIGH:
            return 0.5
        return 0.05


@dataclass(frozen=True)
class GAConfig:
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

    def validate(self) -> None:
        if self.population_size < 1:
            raise ValueError("population_size must be >= 1")
        if self.initial_rules_per_genome < 0:
            raise ValueError("initial_rules_per_genome must be >= 0")
        for name in ("bit_mutation_rate", "crossover_rate", "gene_dup_del_rate",
                     "low_density", "high_density"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")
        if not 0 <= self.elite_count <= self.survivor_count:
            raise ValueError("elite_count must be in 0..survivor_count")
        if not self.survivor_count <= self.population_size:
            raise ValueError("survivor_count must be <= population_size")
        if self.eval_steps < 1:
            raise ValueError("eval_steps must be >= 1")
        if not 0 <= self.window_start < self.window_end <= self.eval_steps:
            raise ValueError("need 0 <= window_start < window_end <= eval_steps")
        if self.generations < 0:
            raise ValueError("generations must be >= 0")


@dataclass
class Individual:
    genome: Genome
    fitness: float | None = None


@dataclass(frozen=True)
class GenerationRecord:
    generation: int
    best_fitness: float
    mean_fitness: float
    best_rule_count: int


@dataclass
class EvolutionLog:
    records: list[GenerationRecord] = field(default_factory=list)

    def append(self, record: GenerationRecord) -> None:
        self.records.append(record)

    def to_csv(self) -> str:
        lines = ["generation,best_fitness,mean_fitness,best_rule_count"]
        for r in self.records:
            lines.append(f"{r.generation},{r.best_fitness!r},{r.mean_fitness!r},{r.best_rule_count}")
        return "\n".join(lines) + "\n"


def window_mean(densities: np.ndarray, cfg: GAConfig) -> float:
    """Mean density over steps [window_start, window_end)."""
    return float(np.mean(densities[cfg.window_start:cfg.window_end]))


def evaluate_fitness(genome: Genome, task: Task, init_low: Grid,
                     init_high: Grid, cfg: GAConfig) -> float:
    """Sum over both initial conditions of 1 - |window mean - target|.

    Ranges over [0, 2]; consumes no randomness.
    """
    total = 0.0
    for grid, d0 in ((init_low, cfg.low_density), (init_high, cfg.high_density)):
        m = window_mean(rollout(grid, genome, cfg.eval_steps).densities, cfg)
        total += 1.0 - abs(m - task.target(d0))
    return total


def select_survivors(population: list[Individual], rng: np.random.Generator,
                     *, elite_count: int = 5,
                     survivor_count: int = 15) -> list[Individual]:
    """Keep the top elites, then fill by fitness-proportional roulette
    without replacement over the rest (uniform if all weights are zero).

    Fitness ties break toward the lower population index.
    """
    if any(ind.fitness is None for ind in population):
        raise ValueError("population must be evaluated before selection")
    if survivor_count > len(population):
        raise ValueError("survivor_count exceeds population size")
    order = sorted(range(len(population)),
                   key=lambda i: (-population[i].fitness, i))
    elites = order[:elite_count]
    chosen = set(elites)
    survivors = [population[i] for i in elites]
    pool = [i for i in range(len(population)) if i not in chosen]
    weights = [float(population[i].fitness) for i in pool]
    for _ in range(survivor_count - elite_count):
        total = sum(weights)
        if total <= 0.0:
            j = int(rng.integers(0, len(pool)))
        else:
            r = rng.random() * total
            acc = 0.0
            j = len(pool) - 1
            for k, w in enumerate(weights):
                acc += w
                if r < acc:
                    j = k
                    break
        survivors.append(population[pool[j]])
        pool.pop(j)
        weights.pop(j)
    return survivors


def mutate(genome: Genome, rate: float, rng: np.random.Generator,
           *, rule_bits_only: bool = False) -> Genome:
    """Flip every encoded bit independently at probability `rate`.

    With rule_bits_only only the 18 condition bits are eligible; the
    position bits stay fixed (used for frozen layouts).
    """
    if not genome.rules:
        return genome
    span = CONDITION_BITS if rule_bits_only else RULE_BITS
    draws = rng.random((len(genome), span))
    out = []
    for site_rule, row in zip(genome, draws):
        bits = list(encode_rule(site_rule))
        for j in range(span):
            if row[j] < rate:
                bits[j] = "0" if bits[j] == "1" else "1"
        out.append(decode_rule("".join(bits)))
    return Genome(tuple(out))


def crossover(a: Genome, b: Genome, rng: np.random.Generator,
              *, aligned: bool = False) -> tuple[Genome, Genome]:
    """One-point recombination at gene boundaries.

    Free genomes draw independent cut points in each parent, so offspring
    lengths can differ from the parents'. Aligned mode (frozen layouts)
    draws a single shared cut so every position keeps its resident rule.
    Either genome being empty makes this a no-op that consumes no draws.
    """
    if not a.rules or not b.rules:
        return a, b
    if aligned:
        if len(a) != len(b):
            raise ValueError("aligned crossover needs equal-length genomes")
        k = int(rng.integers(0, len(a) + 1))
        return (Genome(a.rules[:k] + b.rules[k:]),
                Genome(b.rules[:k] + a.rules[k:]))
    ka = int(rng.integers(0, len(a) + 1))
    kb = int(rng.integers(0, len(b) + 1))
    return (Genome(a.rules[:ka] + b.rules[kb:]),
            Genome(b.rules[:kb] + a.rules[ka:]))


def dup_delete(genome: Genome, rate: float, rng: np.random.Generator) -> Genome:
    """At probability `rate`, duplicate or delete (50/50) one uniformly
    chosen rule; a duplicate is inserted right after its source. Empty
    genomes pass through without consuming draws."""
    if not genome.rules:
        return genome
    if rng.random() >= rate:
        return genome
    i = int(rng.integers(0, len(genome)))
    if rng.random() < 0.5:
        rules = genome.rules[:i + 1] + (genome.rules[i],) + genome.rules[i + 1:]
    else:
        rules = genome.rules[:i] + genome.rules[i + 1:]
    return Genome(rules)


def _evaluate_all(individuals: list[Individual], task: Task, init_low: Grid,
                  init_high: Grid, cfg: GAConfig, workers: int) -> None:
    todo = [ind for ind in individuals if ind.fitness is None]
    if not todo:
        return
    if workers <= 1 or len(todo) == 1:
        for ind in todo:
            ind.fitness = evaluate_fitness(ind.genome, task, init_low, init_high, cfg)
        return
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        results = pool.map(
            lambda ind: evaluate_fitness(ind.genome, task, init_low, init_high, cfg),
            todo)
        for ind, fitness in zip(todo, results):
            ind.fitness = fitness


def next_generation(population: list[Individual], task: Task, cfg: GAConfig,
                    rng: np.random.Generator, init_low: Grid, init_high: Grid,
                    *, frozen_layout: bool = False,
                    workers: int = 1) -> list[Individual]:
    """One generation: select survivors, refill from them cyclically, apply
    crossover to consecutive offspring pairs, then mutation (and, for free
    genomes, duplication/deletion), and evaluate the newcomers."""
    survivors = select_survivors(population, rng,
                                 elite_count=cfg.elite_count,
                                 survivor_count=cfg.survivor_count)
    n_offspring = cfg.population_size - cfg.survivor_count
    genomes = [survivors[i % len(survivors)].genome for i in range(n_offspring)]
    for i in range(0, n_offspring - 1, 2):
        if rng.random() < cfg.crossover_rate:
            genomes[i], genomes[i + 1] = crossover(
                genomes[i], genomes[i + 1], rng, aligned=frozen_layout)
    for i in range(n_offspring):
        g = mutate(genomes[i], cfg.bit_mutation_rate, rng,
                   rule_bits_only=frozen_layout)
        if not frozen_layout:
            g = dup_delete(g, cfg.gene_dup_del_rate, rng)
        genomes[i] = g
    offspring = [Individual(g) for g in genomes]
    _evaluate_all(offspring, task, init_low, init_high, cfg, workers)
    return survivors + offspring


def layout_positions(layout: str) -> tuple[tuple[int, int], ...]:
    """Local (x, y) positions for a frozen layout, in row-major order.

    'full' covers all 256 genome-area cells; 'checker' the 128 cells with
    even x + y.
    """
    if layout == "full":
        return tuple((x, y) for y in range(AREA_SIDE) for x in range(AREA_SIDE))
    if layout == "checker":
        return tuple((x, y) for y in range(AREA_SIDE) for x in range(AREA_SIDE)
                     if (x + y) % 2 == 0)
    raise ValueError(f"unknown layout {layout!r} (expected 'full' or 'checker')")


def _random_frozen_genome(positions: tuple[tuple[int, int], ...],
                          rng: np.random.Generator) -> Genome:
    draws = rng.integers(0, 2, size=(len(positions), CONDITION_BITS))
    rules = []
    for (x, y), row in zip(positions, draws):
        bits = "".join(str(int(b)) for b in row)
        table = decode_rule(bits + "0" * (RULE_BITS - CONDITION_BITS)).rule
        rules.append(SiteRule(table, x, y))
    return Genome(tuple(rules))


def _record(generation: int, population: list[Individual]) -> GenerationRecord:
    best = max(range(len(population)),
               key=lambda i: (population[i].fitness, -i))
    mean = sum(ind.fitness for ind in population) / len(population)
    return GenerationRecord(generation=generation,
                            best_fitness=float(population[best].fitness),
                            mean_fitness=float(mean),
                            best_rule_count=len(population[best].genome))


def _evolve(task: Task, cfg: GAConfig, layout: str | None,
            workers: int) -> tuple[Individual, EvolutionLog]:
    cfg.validate()
    init_low, init_high = training_grids(cfg)
    pop_rng = derive_stream(cfg.master_seed, "init-pop")
    if layout is None:
        population = [Individual(random_genome(cfg.initial_rules_per_genome, pop_rng))
                      for _ in range(cfg.population_size)]
    else:
        positions = layout_positions(layout)
        population = [Individual(_random_frozen_genome(positions, pop_rng))
                      for _ in range(cfg.population_size)]
    _evaluate_all(population, task, init_low, init_high, cfg, workers)
    log = EvolutionLog()
    log.append(_record(0, population))
    ga_rng = derive_stream(cfg.master_seed, "ga")
    for gen in range(1, cfg.generations + 1):
        population = next_generation(population, task, cfg, ga_rng,
                                     init_low, init_high,
                                     frozen_layout=layout is not None,
                                     workers=workers)
        log.append(_record(gen, population))
    best = max(range(len(population)),
               key=lambda i: (population[i].fitness, -i))
    return population[best], log


def evolve(task: Task, cfg: GAConfig, *, workers: int = 1) -> tuple[Individual, EvolutionLog]:
    """Run the GA with free genomes; returns the final best individual and
    the per-generation log (generation 0 is the initial population)."""
    return _evolve(task, cfg, None, workers)


def evolve_fixed(task: Task, layout: str, cfg: GAConfig,
                 *, workers: int = 1) -> tuple[Individual, EvolutionLog]:
    """Run the GA on a frozen position layout: every genome keeps one rule
    per layout cell, only condition bits evolve, and duplication/deletion
    is disabled."""
    layout_positions(layout)  # validate the name before doing any work
    return _evolve(task, cfg, layout, workers)


def training_grids(cfg: GAConfig) -> tuple[Grid, Grid]:
    """The two initial grids a run with this config trains on."""
    return (random_grid(cfg.low_density, derive_stream(cfg.master_seed, "init-low")),
            random_grid(cfg.high_density, derive_stream(cfg.master_seed, "init-high")))

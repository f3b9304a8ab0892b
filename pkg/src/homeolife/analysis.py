"""Analyses of evolved genomes: rule bias statistics, knockout scans,
position shuffles, and density generalization sweeps."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .evolution import GAConfig, window_mean
from .grid import Grid, random_grid
from .rules import AREA_SIDE, Genome, SiteRule, TotalisticRule, rollout
from .seeding import derive_stream

# Conditions with neighbor count 0 cannot occur next to any live cell, so the
# bias statistics score only the 16 conditions with count 1..8.
SCORED_CONDITIONS = 16
BIAS_BINS = 10


def output_bias(rule: TotalisticRule) -> float:
    """Fraction of the 16 scored conditions whose output is state 1."""
    on = sum(rule.birth[1:]) + sum(rule.survive[1:])
    return on / float(SCORED_CONDITIONS)


def input_bias(rule: TotalisticRule) -> float | None:
    """Mean neighbor count over the state-1-producing scored conditions,
    normalized by 8; None when no scored condition produces state 1."""
    counts = [n for n in range(1, 9) if rule.birth[n]]
    counts += [n for n in range(1, 9) if rule.survive[n]]
    if not counts:
        return None
    return sum(counts) / (8.0 * len(counts))


@dataclass(frozen=True)
class RuleBias:
    index: int
    x: int
    y: int
    output_bias: float
    input_bias: float | None


def _bin10(value: float) -> int:
    return min(int(value * BIAS_BINS), BIAS_BINS - 1)


def bias_map(genome: Genome) -> tuple[list[RuleBias], np.ndarray, np.ndarray]:
    """Per-rule bias records plus 10-bin histograms of both biases.

    Bins are fixed width 0.1 over [0, 1], the last bin closed; rules with no
    input bias are left out of the input histogram.
    """
    records = []
    hist_out = np.zeros(BIAS_BINS, dtype=np.int64)
    hist_in = np.zeros(BIAS_BINS, dtype=np.int64)
    for i, site_rule in enumerate(genome):
        out_b = output_bias(site_rule.rule)
        in_b = input_bias(site_rule.rule)
        x, y = site_rule.site
        records.append(RuleBias(i, x, y, out_b, in_b))
        hist_out[_bin10(out_b)] += 1
        if in_b is not None:
            hist_in[_bin10(in_b)] += 1
    return records, hist_out, hist_in


@dataclass(frozen=True)
class KnockoutRecord:
    rule_index: int
    x: int
    y: int
    delta_low: float
    delta_high: float


def knockout_scan(genome: Genome, init_low: Grid, init_high: Grid,
                  cfg: GAConfig) -> list[KnockoutRecord]:
    """Shift in the fitness-window density mean when each rule is removed.

    delta = mean(without rule) - mean(full genome), per initial condition.
    A rule fully shadowed by a later same-site rule shifts nothing.
    """
    def means(g: Genome) -> tuple[float, float]:
        return (window_mean(rollout(init_low, g, cfg.eval_steps).densities, cfg),
                window_mean(rollout(init_high, g, cfg.eval_steps).densities, cfg))

    base_low, base_high = means(genome)
    records = []
    for i, site_rule in enumerate(genome):
        low, high = means(genome.without(i))
        x, y = site_rule.site
        records.append(KnockoutRecord(i, x, y, low - base_low, high - base_high))
    return records


def randomize_positions(genome: Genome, rng: np.random.Generator) -> Genome:
    """Keep every rule table and the list order, redraw every position
    uniformly over the genome area (one (n, 2) integer draw)."""
    if not genome.rules:
        return genome
    coords = rng.integers(0, AREA_SIDE, size=(len(genome), 2))
    return Genome(tuple(SiteRule(sr.rule, int(cx), int(cy))
                        for sr, (cx, cy) in zip(genome, coords)))


@dataclass(frozen=True)
class SweepRecord:
    """All per-sample means for one initial density, plus their average.

    Each sample mean is the full-run average density, steps 1..steps.
    """

    density: float
    sample_means: tuple[float, ...]
    mean: float


def generalization_sweep(genome: Genome, densities, samples_per_density: int = 100,
                         steps: int = 500, *, seed: int = 0) -> list[SweepRecord]:
    """Run fresh random starts at each initial density and average.

    Sample (i, j) draws its grid from a stream derived from
    (seed, density index i, sample index j), so results are independent of
    evaluation order and reproducible from the seed alone.
    """
    if samples_per_density < 1:
        raise ValueError("samples_per_density must be >= 1")
    records = []
    for di, d in enumerate(densities):
        means = []
        for si in range(samples_per_density):
            g0 = random_grid(float(d), derive_stream(seed, "sweep", di, si))
            traj = rollout(g0, genome, steps).densities
            means.append(float(np.mean(traj[1:])))
        records.append(SweepRecord(float(d), tuple(means),
                                   float(np.mean(means))))
    return records


def attractor_histogram(sweep: list[SweepRecord], bins: int = 50) -> np.ndarray:
    """Histogram the per-sample means of each sweep record over [0, 1].

    Returns an int64 table of shape (len(sweep), bins); bins are uniform,
    the last one closed at 1.0. Rows align with the sweep records.
    """
    if bins < 1:
        raise ValueError("bins must be >= 1")
    table = np.zeros((len(sweep), bins), dtype=np.int64)
    for r, record in enumerate(sweep):
        for value in record.sample_means:
            table[r, min(int(value * bins), bins - 1)] += 1
    return table


def bias_csv(records: list[RuleBias]) -> str:
    lines = ["index,x,y,output_bias,input_bias"]
    for r in records:
        in_field = "" if r.input_bias is None else repr(r.input_bias)
        lines.append(f"{r.index},{r.x},{r.y},{r.output_bias!r},{in_field}")
    return "\n".join(lines) + "\n"


def bias_histogram_csv(hist_out: np.ndarray, hist_in: np.ndarray) -> str:
    lines = ["metric,bin_lo,bin_hi,count"]
    for name, hist in (("output_bias", hist_out), ("input_bias", hist_in)):
        for j in range(len(hist)):
            lines.append(f"{name},{j / len(hist)!r},{(j + 1) / len(hist)!r},{int(hist[j])}")
    return "\n".join(lines) + "\n"


def knockout_csv(records: list[KnockoutRecord]) -> str:
    lines = ["index,x,y,delta_low,delta_high"]
    for r in records:
        lines.append(f"{r.rule_index},{r.x},{r.y},{r.delta_low!r},{r.delta_high!r}")
    return "\n".join(lines) + "\n"


def sweep_csv(records: list[SweepRecord]) -> str:
    lines = ["density,sample,mean_density"]
    for r in records:
        for j, value in enumerate(r.sample_means):
            lines.append(f"{r.density!r},{j},{value!r}")
    return "\n".join(lines) + "\n"


def attractor_histogram_csv(sweep: list[SweepRecord], table: np.ndarray) -> str:
    lines = ["density,bin_lo,bin_hi,count"]
    bins = table.shape[1]
    for r, record in enumerate(sweep):
        for j in range(bins):
            lines.append(f"{record.density!r},{j / bins!r},{(j + 1) / bins!r},"
                         f"{int(table[r, j])}")
    return "\n".join(lines) + "\n"

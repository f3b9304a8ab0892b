"""Override-rule layer: the 26-bit rule codec and the coupled two-layer step.

A rule's first 18 bits tabulate its output for every (own state, live
neighbor count) combination; the last 8 bits place it on one cell of the
16x16 genome area. During a step every rule reads the freshly computed Life
state (own cell plus 8 neighbors) and writes its output to its cell; when
several rules share a cell, the one listed later wins.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import engine
from .grid import GENOME_AREA, TARGET, Grid

RULE_BITS = 26
CONDITION_BITS = 18
AREA_SIDE = GENOME_AREA.width  # local coordinates run 0..15


@dataclass(frozen=True)
class TotalisticRule:
    """Output table: birth[n] applies when the cell is dead with n live
    neighbors, survive[n] when it is alive."""

    birth: tuple[int, ...]
    survive: tuple[int, ...]

    def __post_init__(self) -> None:
        for name, bits in (("birth", self.birth), ("survive", self.survive)):
            if len(bits) != 9 or any(b not in (0, 1) for b in bits):
                raise ValueError(f"{name} must be 9 bits of 0/1")


LIFE_RULE = TotalisticRule(birth=(0, 0, 0, 1, 0, 0, 0, 0, 0),
                           survive=(0, 0, 1, 1, 0, 0, 0, 0, 0))


@dataclass(frozen=True)
class SiteRule:
    """A totalistic rule pinned to one cell of the genome area."""

    rule: TotalisticRule
    local_x: int
    local_y: int

    def __post_init__(self) -> None:
        if not (0 <= self.local_x < AREA_SIDE and 0 <= self.local_y < AREA_SIDE):
            raise ValueError(f"rule position must be in 0..{AREA_SIDE - 1}, "
                             f"got ({self.local_x}, {self.local_y})")

    @property
    def site(self) -> tuple[int, int]:
        """Absolute (x, y) grid cell this rule writes."""
        return (GENOME_AREA.origin_x + self.local_x,
                GENOME_AREA.origin_y + self.local_y)


@dataclass(frozen=True)
class Genome:
    """Ordered rule list; order decides same-site override precedence."""

    rules: tuple[SiteRule, ...] = ()

    def __len__(self) -> int:
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)

    def __getitem__(self, index: int) -> SiteRule:
        return self.rules[index]

    def without(self, index: int) -> "Genome":
        """Copy with the rule at `index` removed."""
        if not 0 <= index < len(self.rules):
            raise IndexError(f"rule index {index} out of range")
        return Genome(self.rules[:index] + self.rules[index + 1:])


def apply_rule(rule: TotalisticRule, own: int, neighbors: int) -> int:
    """Rule output for a cell in state `own` with `neighbors` live neighbors."""
    if own not in (0, 1):
        raise ValueError(f"cell state must be 0 or 1, got {own}")
    if not 0 <= neighbors <= 8:
        raise ValueError(f"neighbor count must be in 0..8, got {neighbors}")
    return rule.birth[neighbors] if own == 0 else rule.survive[neighbors]


def encode_rule(site_rule: SiteRule) -> str:
    """Serialize to 26 bits: birth[0..8], survive[0..8], then local x and
    local y as 4 bits each, most significant bit first."""
    bits = list(site_rule.rule.birth) + list(site_rule.rule.survive)
    for value in (site_rule.local_x, site_rule.local_y):
        bits.extend((value >> s) & 1 for s in (3, 2, 1, 0))
    return "".join("1" if b else "0" for b in bits)


def decode_rule(bits: str) -> SiteRule:
    """Parse the encode_rule format; raises ValueError on malformed input."""
    if len(bits) != RULE_BITS:
        raise ValueError(f"rule string must be {RULE_BITS} bits, got {len(bits)}")
    if any(c not in "01" for c in bits):
        raise ValueError("rule string may only contain 0 and 1")
    v = [int(c) for c in bits]
    rule = TotalisticRule(birth=tuple(v[0:9]), survive=tuple(v[9:18]))
    local_x = (v[18] << 3) | (v[19] << 2) | (v[20] << 1) | v[21]
    local_y = (v[22] << 3) | (v[23] << 2) | (v[24] << 1) | v[25]
    return SiteRule(rule, local_x, local_y)


def random_site_rule(rng: np.random.Generator) -> SiteRule:
    """Rule with 26 uniform random bits (one integer draw per bit)."""
    bits = rng.integers(0, 2, size=RULE_BITS)
    return decode_rule("".join(str(int(b)) for b in bits))


def random_genome(n_rules: int, rng: np.random.Generator) -> Genome:
    """Genome of n_rules uniform random 26-bit rules (one (n, 26) draw)."""
    if n_rules < 0:
        raise ValueError("rule count must be non-negative")
    draws = rng.integers(0, 2, size=(n_rules, RULE_BITS))
    return Genome(tuple(decode_rule("".join(str(int(b)) for b in row))
                        for row in draws))


def _table18(rule: TotalisticRule) -> int:
    # Bit own*9 + count, matching the engine's lookup.
    t = 0
    for n, b in enumerate(rule.birth):
        t |= b << n
    for n, s in enumerate(rule.survive):
        t |= s << (9 + n)
    return t


def _compiled(genome: Genome) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Engine arrays for a genome: one entry per distinct site, carrying the
    last-listed rule there. Exact because all rules read the same post-Life
    state, so only the final write per site survives."""
    effective: dict[tuple[int, int], int] = {}
    for site_rule in genome:
        effective[site_rule.site] = _table18(site_rule.rule)
    n = len(effective)
    site_x = np.zeros(n, dtype=np.int64)
    site_y = np.zeros(n, dtype=np.int64)
    tables = np.zeros(n, dtype=np.int64)
    for i, ((x, y), table) in enumerate(effective.items()):
        site_x[i] = x
        site_y[i] = y
        tables[i] = table
    return site_x, site_y, tables


def coupled_step(grid: Grid, genome: Genome) -> Grid:
    """One two-layer update: a Life step, then every rule writes its site."""
    site_x, site_y, tables = _compiled(genome)
    _, _, final = engine.run(engine.pack(grid), 1, site_x, site_y, tables)
    return engine.unpack(final)


@dataclass(frozen=True)
class RolloutResult:
    """Trajectory of a coupled run.

    densities[t] is the target-area density at step t (densities[0] is the
    initial state); snapshots maps requested step indices to grids.
    """

    densities: np.ndarray
    snapshots: dict[int, Grid]


def rollout(grid: Grid, genome: Genome, steps: int,
            snapshot_steps: tuple[int, ...] = ()) -> RolloutResult:
    """Run `steps` coupled steps and record the density trajectory."""
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    site_x, site_y, tables = _compiled(genome)
    counts, snaps, _ = engine.run(engine.pack(grid), steps,
                                  site_x, site_y, tables, snapshot_steps)
    densities = counts.astype(np.float64) / float(TARGET.area)
    snapshots = {step: engine.unpack(rows) for step, rows in snaps.items()}
    return RolloutResult(densities=densities, snapshots=snapshots)


def write_genome(path, genome: Genome, header: tuple[str, ...] = ()) -> None:
    """Write one 26-bit line per rule, preceded by '#' comment lines."""
    lines = [f"# {text}" if text else "#" for text in header]
    lines.extend(encode_rule(site_rule) for site_rule in genome)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_genome(path) -> Genome:
    """Read the write_genome format; blank lines and '#' comments are ignored."""
    rules = []
    with open(path, "r", encoding="utf-8") as fh:
        for ln, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                rules.append(decode_rule(line))
            except ValueError as exc:
                raise ValueError(f"{path}: line {ln}: {exc}") from None
    return Genome(tuple(rules))

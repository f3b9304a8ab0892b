"""Game of Life substrate: a bounded 40x40 grid with a permanently dead rim.

Grids are (40, 40) uint8 arrays indexed [y, x] with values 0 or 1. Cell
coordinates elsewhere in the package are (x, y) pairs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import engine

GRID_SIZE = 40

Grid = np.ndarray

_LIVE = "#"
_DEAD = "."


@dataclass(frozen=True)
class Region:
    """Axis-aligned rectangle of cells, addressed by its top-left corner."""

    origin_x: int
    origin_y: int
    width: int
    height: int

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise ValueError(f"region must have positive size, got {self.width}x{self.height}")
        if (self.origin_x < 0 or self.origin_y < 0
                or self.origin_x + self.width > GRID_SIZE
                or self.origin_y + self.height > GRID_SIZE):
            raise ValueError(f"region does not fit a {GRID_SIZE}x{GRID_SIZE} grid")

    @property
    def area(self) -> int:
        return self.width * self.height

    def slices(self) -> tuple[slice, slice]:
        """(row, column) slices selecting the region in a grid array."""
        return (slice(self.origin_y, self.origin_y + self.height),
                slice(self.origin_x, self.origin_x + self.width))

    def contains(self, x: int, y: int) -> bool:
        return (self.origin_x <= x < self.origin_x + self.width
                and self.origin_y <= y < self.origin_y + self.height)


# Density is always measured over TARGET; override rules may only occupy
# GENOME_AREA. Both are centered in the grid.
TARGET = Region(4, 4, 32, 32)
GENOME_AREA = Region(12, 12, 16, 16)


def empty_grid() -> Grid:
    return np.zeros((GRID_SIZE, GRID_SIZE), dtype=np.uint8)


def life_step(grid: Grid) -> Grid:
    """One synchronous B3/S23 step; cells on the outer ring stay dead."""
    _, _, final = engine.run(engine.pack(grid), 1)
    return engine.unpack(final)


def density(grid: Grid, region: Region) -> float:
    """Fraction of live cells within the region."""
    ys, xs = region.slices()
    return float(np.count_nonzero(grid[ys, xs])) / region.area


def random_grid(d: float, rng: np.random.Generator) -> Grid:
    """Random grid with each interior cell live at probability d.

    Consumes exactly one uniform draw per interior cell regardless of d.
    """
    if not 0.0 <= d <= 1.0:
        raise ValueError(f"density must be in [0, 1], got {d}")
    g = empty_grid()
    draws = rng.random((GRID_SIZE - 2, GRID_SIZE - 2))
    g[1:-1, 1:-1] = (draws < d).astype(np.uint8)
    return g


def to_text(grid: Grid) -> str:
    """Render as 40 lines of 40 characters, '#' live and '.' dead."""
    return "\n".join("".join(_LIVE if v else _DEAD for v in row) for row in grid) + "\n"


def from_text(text: str) -> Grid:
    """Parse the to_text format back into a grid."""
    lines = [ln for ln in text.splitlines() if ln]
    if len(lines) != GRID_SIZE:
        raise ValueError(f"expected {GRID_SIZE} rows, got {len(lines)}")
    g = empty_grid()
    for y, line in enumerate(lines):
        if len(line) != GRID_SIZE:
            raise ValueError(f"row {y}: expected {GRID_SIZE} characters, got {len(line)}")
        for x, ch in enumerate(line):
            if ch == _LIVE:
                g[y, x] = 1
            elif ch != _DEAD:
                raise ValueError(f"row {y}: unexpected character {ch!r}")
    if (g[0].any() or g[-1].any() or g[:, 0].any() or g[:, -1].any()):
        raise ValueError("live cells on the outer ring are not allowed")
    return g

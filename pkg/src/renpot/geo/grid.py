"""Grid definitions and the boolean mask container used throughout the engine.

Row 0 is the northernmost row, so ``cells[r, c]`` follows the same
north-to-south order as an ESRI ASCII grid. ``origin_x``/``origin_y`` always
refer to the lower-left (south-west) corner of the extent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class GridMismatchError(ValueError):
    """Two rasters that must share one grid do not."""


@dataclass(frozen=True)
class GridSpec:
    origin_x: float
    origin_y: float
    cell_size: float = 10.0
    n_cols: int = 1
    n_rows: int = 1

    def __post_init__(self):
        if not self.cell_size > 0:
            raise ValueError(f"cell_size must be > 0, got {self.cell_size}")
        if self.n_cols < 1 or self.n_rows < 1:
            raise ValueError(f"grid needs at least one row and column, got {self.n_rows}x{self.n_cols}")

    @classmethod
    def from_bounds(cls, xmin: float, ymin: float, xmax: float, ymax: float, cell_size: float = 10.0) -> GridSpec:
        """Smallest grid anchored at (xmin, ymin) covering the given bounds."""
        n_cols = max(1, int(np.ceil((xmax - xmin) / cell_size - 1e-9)))
        n_rows = max(1, int(np.ceil((ymax - ymin) / cell_size - 1e-9)))
        return cls(xmin, ymin, cell_size, n_cols, n_rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_rows, self.n_cols)

    @property
    def width(self) -> float:
        return self.n_cols * self.cell_size

    @property
    def height(self) -> float:
        return self.n_rows * self.cell_size

    @property
    def cell_area(self) -> float:
        return self.cell_size * self.cell_size

    def col_centers(self) -> np.ndarray:
        return self.origin_x + (np.arange(self.n_cols) + 0.5) * self.cell_size

    def row_centers(self) -> np.ndarray:
        """Y coordinate of every row center, north to south."""
        return self.origin_y + (self.n_rows - np.arange(self.n_rows) - 0.5) * self.cell_size

    def cell_center(self, row: int, col: int) -> tuple[float, float]:
        x = self.origin_x + (col + 0.5) * self.cell_size
        y = self.origin_y + (self.n_rows - row - 0.5) * self.cell_size
        return float(x), float(y)

    def cell_of(self, x: float, y: float) -> tuple[int, int] | None:
        """Row/col of the cell containing a point, or None outside the extent."""
        col = int(np.floor((x - self.origin_x) / self.cell_size))
        row = self.n_rows - 1 - int(np.floor((y - self.origin_y) / self.cell_size))
        if 0 <= row < self.n_rows and 0 <= col < self.n_cols:
            return row, col
        return None

    def band(self, row_start: int, row_stop: int) -> GridSpec:
        """Sub-grid made of rows ``row_start:row_stop`` of this grid."""
        if not 0 <= row_start < row_stop <= self.n_rows:
            raise ValueError(f"invalid row band {row_start}:{row_stop} for {self.n_rows} rows")
        return GridSpec(
            self.origin_x,
            self.origin_y + (self.n_rows - row_stop) * self.cell_size,
            self.cell_size,
            self.n_cols,
            row_stop - row_start,
        )

    def with_cell_size(self, cell_size: float) -> GridSpec:
        """Same extent resampled at another resolution (extent rounded up)."""
        return GridSpec.from_bounds(
            self.origin_x, self.origin_y, self.origin_x + self.width, self.origin_y + self.height, cell_size
        )


@dataclass(eq=False)
class RasterMask:
    spec: GridSpec
    cells: np.ndarray

    def __post_init__(self):
        cells = np.asarray(self.cells, dtype=bool)
        if cells.shape != self.spec.shape:
            raise ValueError(f"cells shape {cells.shape} does not match grid {self.spec.shape}")
        self.cells = cells

    @classmethod
    def empty(cls, spec: GridSpec) -> RasterMask:
        return cls(spec, np.zeros(spec.shape, dtype=bool))

    @classmethod
    def full(cls, spec: GridSpec) -> RasterMask:
        return cls(spec, np.ones(spec.shape, dtype=bool))

    def __eq__(self, other):
        if not isinstance(other, RasterMask):
            return NotImplemented
        return self.spec == other.spec and np.array_equal(self.cells, other.cells)

    def _check(self, other: RasterMask) -> None:
        if self.spec != other.spec:
            raise GridMismatchError(f"grid mismatch: {self.spec} vs {other.spec}")

    def __and__(self, other: RasterMask) -> RasterMask:
        self._check(other)
        return RasterMask(self.spec, self.cells & other.cells)

    def __or__(self, other: RasterMask) -> RasterMask:
        self._check(other)
        return RasterMask(self.spec, self.cells | other.cells)

    def __invert__(self) -> RasterMask:
        return RasterMask(self.spec, ~self.cells)

    def __sub__(self, other: RasterMask) -> RasterMask:
        self._check(other)
        return RasterMask(self.spec, self.cells & ~other.cells)

    def issubset(self, other: RasterMask) -> bool:
        self._check(other)
        return not np.any(self.cells & ~other.cells)

    @property
    def count(self) -> int:
        return int(np.count_nonzero(self.cells))

    def any(self) -> bool:
        return bool(self.cells.any())

    def copy(self) -> RasterMask:
        return RasterMask(self.spec, self.cells.copy())


def require_same_grid(*masks: RasterMask) -> GridSpec:
    spec = masks[0].spec
    for m in masks[1:]:
        if m.spec != spec:
            raise GridMismatchError(f"grid mismatch: {spec} vs {m.spec}")
    return spec


def mask_area(mask: RasterMask) -> float:
    """Covered area in km²."""
    return mask.count * mask.spec.cell_area / 1e6

"""Exact Euclidean distance transform and raster setback buffers."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .grid import GridSpec, RasterMask
from .rasterize import row_bands


@dataclass(eq=False)
class DistanceField:
    """Center-to-center distance in meters to the nearest source cell.

    ``values`` is +inf everywhere when the source mask is empty.
    """

    spec: GridSpec
    values: np.ndarray


def squared_cell_distance(cells: np.ndarray) -> np.ndarray:
    """Squared distance, in cell units, from every cell to the nearest true cell.

    Integer-valued, so comparisons against thresholds are exact. Cells are
    ``inf`` when there is no true cell at all.
    """
    cells = np.asarray(cells, dtype=bool)
    if not cells.any():
        return np.full(cells.shape, np.inf)
    # feature transform: index of the nearest source for every cell (exact, Maurer et al.)
    idx = ndimage.distance_transform_edt(~cells, return_distances=False, return_indices=True)
    rr, cc = np.indices(cells.shape)
    dr = idx[0] - rr
    dc = idx[1] - cc
    return (dr * dr + dc * dc).astype(np.float64)


def distance_transform(mask: RasterMask) -> DistanceField:
    d2 = squared_cell_distance(mask.cells)
    return DistanceField(mask.spec, np.sqrt(d2) * mask.spec.cell_size)


def _buffer_cells(cells: np.ndarray, limit_cells2: float) -> np.ndarray:
    return squared_cell_distance(cells) <= limit_cells2


def buffer_mask(mask: RasterMask, setback_m: float, n_bands: int = 1) -> RasterMask:
    """All cells whose center lies within ``setback_m`` of a true cell center.

    With ``n_bands > 1`` the rows are split into bands that are buffered
    concurrently, each padded with enough halo rows to see every source within
    reach, so the result is identical to the single-band run.
    """
    if setback_m < 0 or math.isnan(setback_m):
        raise ValueError(f"setback must be >= 0, got {setback_m}")
    if setback_m == 0:
        return mask.copy()
    cs = mask.spec.cell_size
    limit = (setback_m / cs) ** 2
    bands = row_bands(mask.spec.n_rows, n_bands)
    if len(bands) == 1:
        return RasterMask(mask.spec, _buffer_cells(mask.cells, limit))

    halo = int(math.floor(setback_m / cs)) + 1
    n = mask.spec.n_rows

    def work(band):
        a, b = band
        lo, hi = max(0, a - halo), min(n, b + halo)
        return _buffer_cells(mask.cells[lo:hi], limit)[a - lo:b - lo]

    with ThreadPoolExecutor(max_workers=len(bands)) as pool:
        parts = list(pool.map(work, bands))
    return RasterMask(mask.spec, np.concatenate(parts, axis=0))

"""Connected-component labeling of eligibility masks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .grid import GridSpec, RasterMask

_STRUCTURES = {
    4: ndimage.generate_binary_structure(2, 1),
    8: ndimage.generate_binary_structure(2, 2),
}


@dataclass(eq=False)
class LabeledRegions:
    spec: GridSpec
    labels: np.ndarray
    counts: np.ndarray  # counts[k - 1] is the cell count of label k

    @property
    def n_components(self) -> int:
        return int(self.counts.size)

    @property
    def areas_m2(self) -> np.ndarray:
        return self.counts * self.spec.cell_area


def connected_components(mask: RasterMask, connectivity: int = 8) -> LabeledRegions:
    """Label maximal 4- or 8-connected groups of true cells.

    Labels run 1..n in raster-scan order of each component's first cell;
    background is 0.
    """
    if connectivity not in _STRUCTURES:
        raise ValueError(f"connectivity must be 4 or 8, got {connectivity}")
    labels, n = ndimage.label(mask.cells, structure=_STRUCTURES[connectivity])
    counts = np.bincount(labels.ravel(), minlength=n + 1)[1:]
    return LabeledRegions(mask.spec, labels, counts)

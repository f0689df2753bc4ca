"""Raster/vector primitives: grids, rasterization, distances, labeling."""

from .distance import DistanceField, buffer_mask, distance_transform
from .features import (
    InvalidGeometryError,
    VectorFeature,
    filter_features,
    line_feature,
    point_feature,
    polygon_feature,
    rectangle,
)
from .grid import GridMismatchError, GridSpec, RasterMask, mask_area, require_same_grid
from .labels import LabeledRegions, connected_components
from .rasterize import rasterize

__all__ = [
    "DistanceField",
    "GridMismatchError",
    "GridSpec",
    "InvalidGeometryError",
    "LabeledRegions",
    "RasterMask",
    "VectorFeature",
    "buffer_mask",
    "connected_components",
    "distance_transform",
    "filter_features",
    "line_feature",
    "mask_area",
    "point_feature",
    "polygon_feature",
    "rasterize",
    "rectangle",
    "require_same_grid",
]

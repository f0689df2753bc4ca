"""Planar vector features carried through the eligibility workflow."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

POLYGON_TYPES = ("Polygon", "MultiPolygon")
LINE_TYPES = ("LineString", "MultiLineString")
POINT_TYPES = ("Point", "MultiPoint")


class InvalidGeometryError(ValueError):
    def __init__(self, message: str, index: int | None = None):
        self.index = index
        if index is not None:
            message = f"feature {index}: {message}"
        super().__init__(message)


@dataclass
class VectorFeature:
    """A GeoJSON-style geometry in planar meters plus a category tag.

    ``geometry`` is a mapping with ``type`` and ``coordinates`` exactly as in
    GeoJSON. Numeric attributes (road width, ratings, ...) go in
    ``attributes``.
    """

    geometry: dict[str, Any]
    category: str = ""
    attributes: dict[str, float] = field(default_factory=dict)

    @property
    def geom_type(self) -> str:
        return self.geometry["type"]

    @property
    def kind(self) -> str:
        t = self.geom_type
        if t in POLYGON_TYPES:
            return "polygon"
        if t in LINE_TYPES:
            return "polyline"
        if t in POINT_TYPES:
            return "point"
        raise InvalidGeometryError(f"unsupported geometry type {t!r}")

    def polygons(self) -> list[list[np.ndarray]]:
        """Each polygon as a list of closed (n, 2) rings, outer ring first."""
        coords = self.geometry["coordinates"]
        polys = [coords] if self.geom_type == "Polygon" else coords
        return [[np.asarray(ring, dtype=float)[:, :2] for ring in poly] for poly in polys]

    def lines(self) -> list[np.ndarray]:
        coords = self.geometry["coordinates"]
        lines = [coords] if self.geom_type == "LineString" else coords
        return [np.asarray(line, dtype=float)[:, :2] for line in lines]

    def points(self) -> np.ndarray:
        coords = self.geometry["coordinates"]
        pts = [coords] if self.geom_type == "Point" else coords
        if not pts:
            return np.empty((0, 2))
        return np.atleast_2d(np.asarray(pts, dtype=float))[:, :2]

    def validate(self, index: int | None = None) -> None:
        """Reject open rings and degenerate lines. No topology repair is attempted."""
        try:
            kind = self.kind
        except InvalidGeometryError as exc:
            raise InvalidGeometryError(str(exc), index) from None
        if kind == "polygon":
            for poly in self.polygons():
                if not poly:
                    raise InvalidGeometryError("polygon without rings", index)
                for ring in poly:
                    if len(ring) < 4:
                        raise InvalidGeometryError("ring needs at least 4 positions", index)
                    if not np.array_equal(ring[0], ring[-1]):
                        raise InvalidGeometryError("ring is not closed", index)
        elif kind == "polyline":
            for line in self.lines():
                if len(line) < 2:
                    raise InvalidGeometryError("polyline needs at least 2 vertices", index)

    def bounds(self) -> tuple[float, float, float, float]:
        kind = self.kind
        if kind == "polygon":
            xy = np.concatenate([r for p in self.polygons() for r in p])
        elif kind == "polyline":
            xy = np.concatenate(self.lines())
        else:
            xy = self.points()
        return float(xy[:, 0].min()), float(xy[:, 1].min()), float(xy[:, 0].max()), float(xy[:, 1].max())


def polygon_feature(ring, category: str = "", holes=(), **attributes) -> VectorFeature:
    """Build a polygon feature from an outer ring, closing it if needed."""
    rings = []
    for r in (ring, *holes):
        r = [tuple(map(float, p)) for p in r]
        if r[0] != r[-1]:
            r.append(r[0])
        rings.append([list(p) for p in r])
    return VectorFeature({"type": "Polygon", "coordinates": rings}, category, dict(attributes))


def rectangle(xmin: float, ymin: float, xmax: float, ymax: float, category: str = "", **attributes) -> VectorFeature:
    return polygon_feature([(xmin, ymin), (xmax, ymin), (xmax, ymax), (xmin, ymax)], category, **attributes)


def line_feature(vertices, category: str = "", **attributes) -> VectorFeature:
    coords = [list(map(float, p)) for p in vertices]
    return VectorFeature({"type": "LineString", "coordinates": coords}, category, dict(attributes))


def point_feature(x: float, y: float, category: str = "", **attributes) -> VectorFeature:
    return VectorFeature({"type": "Point", "coordinates": [float(x), float(y)]}, category, dict(attributes))


def filter_features(features, categories=None, predicate=None) -> list[VectorFeature]:
    """Keep features whose category is listed (all if ``categories`` is empty)
    and whose attributes satisfy ``predicate`` (a callable on the feature)."""
    wanted = set(categories or ())
    out = []
    for f in features:
        if wanted and f.category not in wanted:
            continue
        if predicate is not None and not predicate(f):
            continue
        out.append(f)
    return out

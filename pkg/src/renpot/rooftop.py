"""Rooftop PV potential from 3D roof surfaces.

Each roof plane yields an orientation (tilt, north-based clockwise azimuth),
an area, and a peak capacity. Planes below 1 kWp are dropped; the rest are
summarized per region in one flat group and eight compass groups.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

GROUPS = ("Flat", "N", "NE", "E", "SE", "S", "SW", "W", "NW")
COMPASS = GROUPS[1:]
NORTHERN = ("N", "NE", "NW")

FLAT_CAPACITY_TILT_DEG = 10.0
FLAT_GROUP_TILT_DEG = 20.0
COPLANARITY_TOL_M = 0.05


class InvalidRoofError(ValueError):
    pass


@dataclass(frozen=True)
class RooftopParams:
    area_factor: float = 0.6
    row_spacing_factor: float = 0.5
    efficiency: float = 0.22
    min_capacity_kwp: float = 1.0
    # metadata only: module tilt assumed on flat roofs, None means "site latitude"
    flat_module_tilt_deg: float | None = None

    @property
    def tilted_kwp_per_m2(self) -> float:
        return self.area_factor * self.efficiency

    @property
    def flat_kwp_per_m2(self) -> float:
        return self.area_factor * self.row_spacing_factor * self.efficiency


@dataclass
class RoofSurface:
    building_id: str
    vertices: np.ndarray
    region_id: str | None = None

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 3:
            raise InvalidRoofError(f"{self.building_id}: vertices must be 3D points")
        if len(v) > 1 and np.array_equal(v[0], v[-1]):
            v = v[:-1]
        if len(v) < 3:
            raise InvalidRoofError(f"{self.building_id}: a roof needs at least 3 vertices")
        self.vertices = v


def _newell(v: np.ndarray) -> np.ndarray:
    nxt = np.roll(v, -1, axis=0)
    return np.array([
        np.sum((v[:, 1] - nxt[:, 1]) * (v[:, 2] + nxt[:, 2])),
        np.sum((v[:, 2] - nxt[:, 2]) * (v[:, 0] + nxt[:, 0])),
        np.sum((v[:, 0] - nxt[:, 0]) * (v[:, 1] + nxt[:, 1])),
    ])


def surface_normal(surface: RoofSurface) -> np.ndarray:
    """Upward unit normal via Newell's method.

    Raises:
        InvalidRoofError: zero area, or a vertex more than 5 cm off the plane.
    """
    n, _ = _plane(surface)
    return n


def _plane(surface: RoofSurface) -> tuple[np.ndarray, float]:
    v = surface.vertices
    acc = _newell(v)
    norm = float(np.linalg.norm(acc))
    if not norm > 1e-12:
        raise InvalidRoofError(f"{surface.building_id}: degenerate roof polygon (zero area)")
    n = acc / norm
    if n[2] < 0:
        n = -n
    offsets = (v - v.mean(axis=0)) @ n
    if np.max(np.abs(offsets)) > COPLANARITY_TOL_M:
        raise InvalidRoofError(f"{surface.building_id}: vertices are not coplanar within {COPLANARITY_TOL_M} m")
    return n, norm / 2.0


def surface_area(surface: RoofSurface) -> float:
    return _plane(surface)[1]


def roof_orientation(normal) -> tuple[float, float | None]:
    """Tilt and azimuth in degrees for an upward unit normal.

    Azimuth is measured clockwise from north (+y) with a full-quadrant
    arctangent, so east is 90 and west 270. It is None for a horizontal roof.
    """
    nx, ny, nz = (float(c) for c in normal)
    if abs(math.sqrt(nx * nx + ny * ny + nz * nz) - 1.0) > 1e-6:
        raise ValueError("normal must be a unit vector")
    if nz < 0:
        raise ValueError("normal must point upward (z >= 0)")
    horiz = math.hypot(nx, ny)
    if horiz == 0.0:
        return 0.0, None
    # atan2 form of arccos(nz): same angle, no precision loss near 0 deg
    tilt = math.degrees(math.atan2(horiz, nz))
    azimuth = math.degrees(math.atan2(nx, ny)) % 360.0
    return tilt, azimuth


def roof_capacity(area_m2: float, tilt_deg: float, params: RooftopParams | None = None) -> float:
    """Peak capacity in kWp. Roofs under 10 deg get the row-spacing penalty."""
    params = params or RooftopParams()
    if area_m2 < 0:
        raise ValueError("area must be >= 0")
    if not 0 <= tilt_deg <= 90:
        raise ValueError("tilt must be within [0, 90]")
    if tilt_deg < FLAT_CAPACITY_TILT_DEG:
        return params.flat_kwp_per_m2 * area_m2
    return params.tilted_kwp_per_m2 * area_m2


def classify_roof_group(tilt_deg: float, azimuth_deg: float | None) -> str:
    if tilt_deg <= FLAT_GROUP_TILT_DEG or azimuth_deg is None:
        return "Flat"
    # 45 deg sectors centered on the compass points; a boundary goes clockwise
    sector = int(((azimuth_deg + 22.5) % 360.0) // 45.0) % 8
    return COMPASS[sector]


def min_area_for_capacity(tilt_deg: float, params: RooftopParams | None = None) -> float:
    """Smallest roof area reaching ``params.min_capacity_kwp`` at this tilt."""
    params = params or RooftopParams()
    per_m2 = params.flat_kwp_per_m2 if tilt_deg < FLAT_CAPACITY_TILT_DEG else params.tilted_kwp_per_m2
    return params.min_capacity_kwp / per_m2


@dataclass
class RoofPotential:
    building_id: str
    region_id: str | None
    area_m2: float
    tilt_deg: float
    azimuth_deg: float | None
    capacity_kwp: float
    group: str

    @property
    def is_flat_for_capacity(self) -> bool:
        return self.tilt_deg < FLAT_CAPACITY_TILT_DEG


@dataclass
class RegionRoofSummary:
    region_id: str
    capacity_kwp: dict[str, float] = field(default_factory=dict)
    count: dict[str, int] = field(default_factory=dict)
    area_m2: dict[str, float] = field(default_factory=dict)

    @property
    def total_kwp(self) -> float:
        return math.fsum(self.capacity_kwp.values())

    @property
    def total_no_north_kwp(self) -> float:
        return math.fsum(v for g, v in self.capacity_kwp.items() if g not in NORTHERN)

    @property
    def total_count(self) -> int:
        return sum(self.count.values())

    @property
    def total_area_m2(self) -> float:
        return math.fsum(self.area_m2.values())

    @property
    def no_north_area_m2(self) -> float:
        return math.fsum(v for g, v in self.area_m2.items() if g not in NORTHERN)


@dataclass
class RooftopResult:
    roofs: list[RoofPotential]
    summaries: dict[str, RegionRoofSummary]
    errors: list[dict]
    excluded_small: int = 0


def evaluate_roof(surface: RoofSurface, params: RooftopParams | None = None) -> RoofPotential:
    params = params or RooftopParams()
    n, area = _plane(surface)
    tilt, azimuth = roof_orientation(n)
    cap = roof_capacity(area, tilt, params)
    return RoofPotential(
        surface.building_id, surface.region_id, area, tilt, azimuth, cap, classify_roof_group(tilt, azimuth)
    )


def summarize(roofs: list[RoofPotential], default_region: str = "all") -> dict[str, RegionRoofSummary]:
    buckets: dict[str, dict[str, list[RoofPotential]]] = {}
    for roof in roofs:
        rid = roof.region_id or default_region
        buckets.setdefault(rid, {g: [] for g in GROUPS})[roof.group].append(roof)
    out = {}
    for rid in sorted(buckets):
        groups = buckets[rid]
        out[rid] = RegionRoofSummary(
            rid,
            {g: math.fsum(r.capacity_kwp for r in v) for g, v in groups.items()},
            {g: len(v) for g, v in groups.items()},
            {g: math.fsum(r.area_m2 for r in v) for g, v in groups.items()},
        )
    return out


def process_building_set(
    surfaces: list[RoofSurface],
    params: RooftopParams | None = None,
    workers: int = 1,
) -> RooftopResult:
    """Evaluate all roofs, drop those under the capacity threshold, and group.

    Invalid surfaces are reported in ``errors`` rather than raised. Group
    totals use exact summation, so results do not depend on ``workers``.
    """
    params = params or RooftopParams()

    def one(item):
        i, s = item
        try:
            return evaluate_roof(s, params), None
        except (InvalidRoofError, ValueError) as exc:
            return None, {"index": i, "building_id": s.building_id, "error": str(exc)}

    items = list(enumerate(surfaces))
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, items))
    else:
        results = [one(it) for it in items]

    roofs, errors, small = [], [], 0
    for roof, err in results:
        if err is not None:
            errors.append(err)
        elif roof.capacity_kwp < params.min_capacity_kwp:
            small += 1
        else:
            roofs.append(roof)
    return RooftopResult(roofs, summarize(roofs), errors, small)


# -- I/O ----------------------------------------------------------------------


def surfaces_from_json(doc) -> tuple[list[RoofSurface], list[dict]]:
    """Parse ``[{building_id, region_id?, vertices}]``; malformed entries become errors."""
    surfaces, errors = [], []
    for i, item in enumerate(doc):
        try:
            surfaces.append(RoofSurface(str(item["building_id"]), item["vertices"], item.get("region_id")))
        except (KeyError, TypeError, ValueError) as exc:
            errors.append({"index": i, "building_id": str(item.get("building_id", "")) if isinstance(item, dict) else "",
                           "error": str(exc)})
    return surfaces, errors


def read_surfaces(path: str | Path) -> tuple[list[RoofSurface], list[dict]]:
    with open(path, encoding="utf-8") as fh:
        return surfaces_from_json(json.load(fh))


def _csv_bytes(header, rows) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue().encode("utf-8")


def write_roof_csv(roofs: list[RoofPotential], path: str | Path) -> None:
    rows = [
        (r.building_id, repr(r.area_m2), repr(r.tilt_deg), "" if r.azimuth_deg is None else repr(r.azimuth_deg),
         r.group, repr(r.capacity_kwp))
        for r in roofs
    ]
    Path(path).write_bytes(
        _csv_bytes(("building_id", "area_m2", "tilt_deg", "azimuth_deg", "group", "capacity_kwp"), rows)
    )


def write_summary_csv(summaries: dict[str, RegionRoofSummary], path: str | Path) -> None:
    rows = []
    for rid in sorted(summaries):
        s = summaries[rid]
        for g in GROUPS:
            rows.append((rid, g, s.count[g], repr(s.capacity_kwp[g])))
        rows.append((rid, "total_all", s.total_count, repr(s.total_kwp)))
        no_north = s.total_count - sum(s.count[g] for g in NORTHERN)
        rows.append((rid, "total_no_north", no_north, repr(s.total_no_north_kwp)))
    Path(path).write_bytes(_csv_bytes(("region_id", "group", "count", "capacity_kwp"), rows))

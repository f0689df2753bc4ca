"""Turn eligible land into installable capacity.

Wind: greedy turbine placement on cell centers under an elliptical
along-wind/cross-wind spacing rule. Open-field PV: a constant capacity
density derived from module efficiency, row spacing and construction losses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geo import GridSpec, RasterMask, mask_area


@dataclass(frozen=True)
class TurbineSpec:
    rated_power_mw: float
    rotor_diameter_m: float
    hub_height_m: float
    name: str = ""

    def __post_init__(self):
        for attr in ("rated_power_mw", "rotor_diameter_m", "hub_height_m"):
            if not getattr(self, attr) > 0:
                raise ValueError(f"{attr} must be positive")

    @property
    def tip_height_m(self) -> float:
        return self.hub_height_m + self.rotor_diameter_m / 2


REFERENCE_ONSHORE = TurbineSpec(4.7, 155.0, 120.0, "onshore-4.7MW-155m")


@dataclass(frozen=True)
class SpacingPolicy:
    along_wind_multiple: float = 8.0
    cross_wind_multiple: float = 4.0
    prevailing_direction_deg: float = 0.0  # from north, clockwise

    def __post_init__(self):
        if not (self.along_wind_multiple > 0 and self.cross_wind_multiple > 0):
            raise ValueError("spacing multiples must be positive")

    def axes(self) -> tuple[float, float, float, float]:
        """Unit along-wind (ux, uy) and cross-wind (vx, vy) vectors in grid x/y."""
        t = math.radians(self.prevailing_direction_deg)
        # snap the ~1e-17 residues at multiples of 90 deg so axis-aligned ties stay exact
        ux, uy = (0.0 if abs(v) < 1e-12 else v for v in (math.sin(t), math.cos(t)))
        return ux, uy, uy, -ux


@dataclass(frozen=True)
class PvParams:
    module_efficiency: float = 0.22
    row_spacing_factor: float = 0.5
    construction_factor: float = 0.72

    def __post_init__(self):
        for attr in ("module_efficiency", "row_spacing_factor", "construction_factor"):
            v = getattr(self, attr)
            if not 0 < v <= 1:
                raise ValueError(f"{attr} must be in (0, 1], got {v}")

    @property
    def density_mw_per_km2(self) -> float:
        # efficiency is kWp per m² at 1 kW/m²; x1000 converts to MW/km².
        # Scaling first keeps the default product at exactly 79.2.
        return 1000.0 * self.module_efficiency * self.row_spacing_factor * self.construction_factor


@dataclass
class TurbinePlacement:
    positions: list[tuple[float, float]]
    turbine: TurbineSpec
    policy: SpacingPolicy
    cells: list[tuple[int, int]] = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.positions)


def spacing_metric(dx, dy, turbine: TurbineSpec, policy: SpacingPolicy):
    """Normalized elliptical separation; a pair is acceptable when this is >= 1."""
    ux, uy, vx, vy = policy.axes()
    du = dx * ux + dy * uy
    dv = dx * vx + dy * vy
    a = policy.along_wind_multiple * turbine.rotor_diameter_m
    c = policy.cross_wind_multiple * turbine.rotor_diameter_m
    return (du / a) ** 2 + (dv / c) ** 2


def place_turbines(
    eligible: RasterMask,
    turbine: TurbineSpec,
    policy: SpacingPolicy | None = None,
) -> TurbinePlacement:
    """Greedy row-major placement from the north-west corner.

    Every eligible cell center is visited once in scan order. A turbine goes
    there unless an earlier turbine lies inside its spacing ellipse. Instead of
    testing each candidate against all turbines, each new turbine marks the
    cells its ellipse blocks; the accept/reject sequence is the same.
    """
    policy = policy or SpacingPolicy()
    spec = eligible.spec
    xs = spec.col_centers()
    ys = spec.row_centers()
    reach = max(policy.along_wind_multiple, policy.cross_wind_multiple) * turbine.rotor_diameter_m
    k = int(math.ceil(reach / spec.cell_size)) + 1

    blocked = np.zeros(spec.shape, dtype=bool)
    positions, cells = [], []
    rows, cols = np.nonzero(eligible.cells)  # already row-major
    for r, c in zip(rows.tolist(), cols.tolist()):
        if blocked[r, c]:
            continue
        x, y = float(xs[c]), float(ys[r])
        positions.append((x, y))
        cells.append((r, c))
        r0, r1 = max(0, r - k), min(spec.n_rows, r + k + 1)
        c0, c1 = max(0, c - k), min(spec.n_cols, c + k + 1)
        dx = xs[c0:c1][None, :] - x
        dy = ys[r0:r1][:, None] - y
        blocked[r0:r1, c0:c1] |= spacing_metric(dx, dy, turbine, policy) < 1.0
    return TurbinePlacement(positions, turbine, policy, cells)


@dataclass
class WindSummary:
    count: int
    capacity_mw: float
    area_km2: float
    density_mw_per_km2: float


def wind_capacity_summary(placement: TurbinePlacement, eligible: RasterMask) -> WindSummary:
    area = mask_area(eligible)
    n = placement.count
    capacity = n * placement.turbine.rated_power_mw
    if area == 0:
        if n:
            raise ValueError("turbines placed on an empty eligible mask")
        return WindSummary(0, 0.0, 0.0, 0.0)
    return WindSummary(n, capacity, area, capacity / area)


def ofpv_capacity(area_km2: float, params: PvParams | None = None) -> float:
    """Open-field PV capacity in MW for an eligible area in km²."""
    if area_km2 < 0:
        raise ValueError("area must be >= 0")
    params = params or PvParams()
    return params.density_mw_per_km2 * area_km2


def placement_geojson(placement: TurbinePlacement) -> dict:
    return {
        "type": "FeatureCollection",
        "features": [
            {
                "type": "Feature",
                "geometry": {"type": "Point", "coordinates": [x, y]},
                "properties": {
                    "turbine_name": placement.turbine.name,
                    "rated_power_mw": placement.turbine.rated_power_mw,
                },
            }
            for x, y in placement.positions
        ],
    }

"""Per-region potentials across the administrative hierarchy."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..capacity import REFERENCE_ONSHORE, TurbinePlacement, ofpv_capacity, place_turbines
from ..eligibility import Scenario, SqrRaster, filter_min_area, sqr_preselect
from ..geo import GridSpec, RasterMask, mask_area, rasterize
from ..rooftop import NORTHERN, RegionRoofSummary
from .manifest import LEVELS, Region


@dataclass(frozen=True)
class PotentialRecord:
    region_id: str
    level: str
    scenario_name: str
    technology: str
    area_km2: float
    capacity_mw: float
    density_mw_per_km2: float
    item_count: int

    def __post_init__(self):
        for attr in ("area_km2", "capacity_mw", "density_mw_per_km2", "item_count"):
            if getattr(self, attr) < 0:
                raise ValueError(f"{attr} must be >= 0")
        if self.area_km2 > 0:
            expected = self.density_mw_per_km2 * self.area_km2
            if not math.isclose(expected, self.capacity_mw, rel_tol=1e-6, abs_tol=1e-12):
                raise ValueError("density * area does not match capacity")

    @classmethod
    def build(cls, region_id, level, scenario_name, technology, area_km2, capacity_mw, item_count):
        density = capacity_mw / area_km2 if area_km2 > 0 else 0.0
        return cls(region_id, level, scenario_name, technology, area_km2, capacity_mw, density, item_count)

    def sort_key(self):
        rank = LEVELS.index(self.level) if self.level in LEVELS else len(LEVELS)
        return (rank, self.region_id, self.scenario_name, self.technology)


def region_mask(region: Region, spec: GridSpec) -> RasterMask:
    """Cells whose center lies in the region. Siblings that tile space never share a cell."""
    m = rasterize([region.boundary], spec)
    if not m.any():
        raise ValueError(f"region {region.region_id} has an empty boundary on this grid")
    return m


def _turbines_in(placement: TurbinePlacement, mask: RasterMask) -> int:
    return sum(1 for r, c in placement.cells if mask.cells[r, c])


def regional_aggregate(
    eligible: RasterMask,
    scenario: Scenario,
    regions: list[Region],
    placement: TurbinePlacement | None = None,
) -> list[PotentialRecord]:
    """Clip, re-filter and estimate capacity region by region.

    The minimum-area filter runs again after clipping, so a parcel split by a
    border can survive at the parent level and vanish in every child. For
    wind, a ``placement`` made once on the full mask is counted per region
    (turbines whose cell survives the regional filter); without one, turbines
    are placed on each clipped mask independently.
    """
    spec = eligible.spec
    records = []
    for region in regions:
        clipped = filter_min_area(eligible & region_mask(region, spec), scenario.min_area_m2, scenario.connectivity)
        area = mask_area(clipped)
        if scenario.technology == "open_field_pv":
            cap = ofpv_capacity(area, scenario.pv)
            items = 0
        else:
            turbine = scenario.turbine or REFERENCE_ONSHORE
            if placement is not None:
                items = _turbines_in(placement, clipped)
            else:
                items = place_turbines(clipped, turbine, scenario.spacing).count
            cap = items * turbine.rated_power_mw
        records.append(PotentialRecord.build(
            region.region_id, region.level, scenario.name, scenario.technology, area, cap, items
        ))
    return records


def rooftop_records(summaries: dict[str, RegionRoofSummary], regions: list[Region]) -> list[PotentialRecord]:
    """Two records per summarized region: all roofs and no northern roofs.

    Area is the gross roof area of the counted planes.
    """
    levels = {r.region_id: r.level for r in regions}
    out = []
    for rid, s in summaries.items():
        level = levels.get(rid, "municipality")
        n_north = sum(s.count[g] for g in NORTHERN)
        out.append(PotentialRecord.build(
            rid, level, "all_roofs", "rooftop_pv", s.total_area_m2 / 1e6, s.total_kwp / 1000, s.total_count
        ))
        out.append(PotentialRecord.build(
            rid, level, "no_northern_roofs", "rooftop_pv",
            s.no_north_area_m2 / 1e6, s.total_no_north_kwp / 1000, s.total_count - n_north,
        ))
    return out


def sqr_sensitivity(
    arable: RasterMask,
    sqr: SqrRaster,
    thresholds: list[int],
    spec: GridSpec | None = None,
) -> list[dict]:
    """Poor-soil area for each SQR threshold.

    ``share_of_arable`` is relative to arable cells that have a rating, so a
    threshold above every rating gives exactly 1.0.
    """
    if any(b < a for a, b in zip(thresholds, thresholds[1:])):
        raise ValueError("thresholds must be ascending")
    ratings = sqr.sample(arable.spec)
    covered = int(np.count_nonzero(arable.cells & (ratings != sqr.nodata)))
    rows = []
    for t in thresholds:
        sel = sqr_preselect(arable, sqr, t, spec)
        rows.append({
            "threshold": t,
            "area_km2": mask_area(sel),
            "share_of_arable": sel.count / covered if covered else 0.0,
        })
    return rows

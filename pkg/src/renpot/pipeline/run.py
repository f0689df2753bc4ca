"""End-to-end run: manifest -> eligibility -> capacity -> regions -> export."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

from ..capacity import REFERENCE_ONSHORE, TurbinePlacement, place_turbines
from ..eligibility import Scenario, run_scenario
from ..geo import RasterMask
from .aggregate import PotentialRecord, regional_aggregate
from .export import export_db
from .manifest import Manifest

logger = logging.getLogger(__name__)


@dataclass
class ScenarioResult:
    scenario: Scenario
    eligible: RasterMask
    placement: TurbinePlacement | None = None
    records: list[PotentialRecord] = field(default_factory=list)


def evaluate_scenario(manifest: Manifest, scenario: Scenario, workers: int = 1) -> ScenarioResult:
    eligible = run_scenario(scenario, manifest.datasets, manifest.grid, manifest.analysis_region, workers)
    placement = None
    if scenario.technology != "open_field_pv":
        placement = place_turbines(eligible, scenario.turbine or REFERENCE_ONSHORE, scenario.spacing)
    records = regional_aggregate(eligible, scenario, manifest.regions, placement) if manifest.regions else []
    logger.info("%s: %d eligible cells, %d records", scenario.name, eligible.count, len(records))
    return ScenarioResult(scenario, eligible, placement, records)


def run_pipeline(
    manifest: Manifest,
    out_dir: str | Path,
    scenario_names: list[str] | None = None,
    workers: int = 1,
) -> dict[str, ScenarioResult]:
    names = scenario_names or list(manifest.scenarios)
    results = {name: evaluate_scenario(manifest, manifest.scenario(name), workers) for name in names}
    records = [r for res in results.values() for r in res.records]
    export_db(
        records,
        out_dir,
        masks={n: r.eligible for n, r in results.items()},
        placements={n: r.placement for n, r in results.items() if r.placement is not None},
    )
    return results

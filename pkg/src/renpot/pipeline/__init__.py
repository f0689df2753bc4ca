"""Manifest loading, regional aggregation and database export."""

from .aggregate import PotentialRecord, region_mask, regional_aggregate, rooftop_records, sqr_sensitivity
from .export import POTENTIAL_COLUMNS, export_db, read_records_csv, records_csv
from .manifest import LEVELS, Manifest, ManifestError, Region, check_hierarchy, load_manifest, regions_from_geojson
from .run import ScenarioResult, evaluate_scenario, run_pipeline

__all__ = [
    "LEVELS",
    "POTENTIAL_COLUMNS",
    "Manifest",
    "ManifestError",
    "PotentialRecord",
    "Region",
    "ScenarioResult",
    "check_hierarchy",
    "evaluate_scenario",
    "export_db",
    "load_manifest",
    "read_records_csv",
    "records_csv",
    "region_mask",
    "regional_aggregate",
    "regions_from_geojson",
    "rooftop_records",
    "run_pipeline",
    "sqr_sensitivity",
]

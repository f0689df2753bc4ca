"""Manifest loading: grid, datasets (read or derived), regions and scenarios."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import jsonschema
import numpy as np

from ..eligibility import (
    DatasetSource,
    Scenario,
    ScenarioError,
    SqrRaster,
    build_side_strips,
    scenario_from_dict,
    sqr_select,
)
from ..geo import GridSpec, RasterMask, VectorFeature, filter_features, rasterize
from ..geo.io import features_from_geojson, read_ascii_grid

LEVELS = ("national", "federal_state", "nuts3", "municipality")


class ManifestError(ValueError):
    def __init__(self, file: str | Path, field: str, message: str):
        self.file = str(file)
        self.field = field
        super().__init__(f"{file}: {field}: {message}")

    def as_dict(self) -> dict:
        return {"error": "ManifestError", "file": self.file, "field": self.field, "message": str(self)}


@dataclass
class Region:
    region_id: str
    level: str
    boundary: VectorFeature
    parent_id: str | None = None

    def __post_init__(self):
        if self.level not in LEVELS:
            raise ValueError(f"region {self.region_id}: unknown level {self.level!r}")
        if self.boundary.kind != "polygon":
            raise ValueError(f"region {self.region_id}: boundary must be a polygon")

    @property
    def level_rank(self) -> int:
        return LEVELS.index(self.level)


def check_hierarchy(regions: list[Region]) -> None:
    """Parents must exist, sit on a coarser level, and chains must end at a national region."""
    by_id = {}
    for r in regions:
        if r.region_id in by_id:
            raise ValueError(f"duplicate region id {r.region_id!r}")
        by_id[r.region_id] = r
    for r in regions:
        seen = set()
        cur = r
        while cur.parent_id is not None:
            if cur.region_id in seen:
                raise ValueError(f"region {r.region_id}: cyclic parent chain")
            seen.add(cur.region_id)
            parent = by_id.get(cur.parent_id)
            if parent is None:
                raise ValueError(f"region {cur.region_id}: unknown parent {cur.parent_id!r}")
            if parent.level_rank >= cur.level_rank:
                raise ValueError(f"region {cur.region_id}: parent {parent.region_id} is not on a coarser level")
            cur = parent
        if cur.level != "national":
            raise ValueError(f"region {r.region_id}: parent chain ends at {cur.region_id} ({cur.level}), not national")


def regions_from_geojson(doc: dict) -> list[Region]:
    out = []
    for i, feat in enumerate(doc.get("features", [])):
        props = feat.get("properties") or {}
        if "region_id" not in props or "level" not in props:
            raise ValueError(f"region feature {i} needs region_id and level properties")
        boundary = VectorFeature(feat["geometry"], "region")
        boundary.validate(i)
        out.append(Region(str(props["region_id"]), props["level"], boundary, props.get("parent_id")))
    return out


@dataclass
class Manifest:
    path: Path
    grid: GridSpec
    datasets: dict[str, DatasetSource]
    regions: list[Region]
    scenarios: dict[str, Scenario]
    analysis_region: RasterMask | None = None
    warnings: list[dict] = field(default_factory=list)

    def scenario(self, name: str) -> Scenario:
        if name not in self.scenarios:
            raise KeyError(f"unknown scenario {name!r}; available: {sorted(self.scenarios)}")
        return self.scenarios[name]


_SELECTOR = {
    "type": "object",
    "required": ["dataset"],
    "properties": {
        "dataset": {"type": "string"},
        "categories": {"type": "array", "items": {"type": "string"}},
    },
    "additionalProperties": False,
}

MANIFEST_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["grid", "datasets"],
    "properties": {
        "name": {"type": "string"},
        "grid": {
            "type": "object",
            "required": ["origin_x", "origin_y", "cell_size", "n_cols", "n_rows"],
            "properties": {
                "origin_x": {"type": "number"},
                "origin_y": {"type": "number"},
                "cell_size": {"type": "number", "exclusiveMinimum": 0},
                "n_cols": {"type": "integer", "minimum": 1},
                "n_rows": {"type": "integer", "minimum": 1},
            },
            "additionalProperties": False,
        },
        "analysis_region": _SELECTOR,
        "datasets": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id"],
                "properties": {
                    "id": {"type": "string", "minLength": 1},
                    "path": {"type": "string"},
                    "format": {"enum": ["geojson", "ascii_grid"]},
                    "kind": {"enum": ["features", "mask", "rating"]},
                    "derive": {"enum": ["side_strips", "sqr_select"]},
                    "source": _SELECTOR,
                    "strip_width_m": {"type": "number", "exclusiveMinimum": 0},
                    "inner_margin_m": {"type": "number", "minimum": 0},
                    "default_width_m": {"type": "number", "minimum": 0},
                    "arable": _SELECTOR,
                    "sqr": {"type": "string"},
                    "op": {"enum": ["<", "<=", ">", ">="]},
                    "threshold": {"type": "integer", "minimum": 0, "maximum": 102},
                    "within": {"type": "string"},
                    "note": {"type": "string"},
                },
                "additionalProperties": False,
                "oneOf": [{"required": ["path", "format"]}, {"required": ["derive"]}],
            },
        },
        "regions": {"type": "string"},
        "scenarios": {"type": "array", "items": {"type": ["string", "object"]}},
    },
    "additionalProperties": False,
}


def _load_json(path: Path, owner: Path, field_name: str):
    if not path.is_file():
        raise ManifestError(owner, field_name, f"file not found: {path}")
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ManifestError(path, "<root>", f"invalid JSON: {exc}") from None


def _select(datasets, selector: dict, grid: GridSpec, owner, field_name) -> RasterMask:
    ds = selector["dataset"]
    if ds not in datasets:
        raise ManifestError(owner, field_name, f"unknown dataset {ds!r}")
    src = datasets[ds]
    if isinstance(src, RasterMask):
        return src
    if not isinstance(src, list):
        raise ManifestError(owner, field_name, f"dataset {ds!r} is not a feature or mask dataset")
    return rasterize(filter_features(src, selector.get("categories")), grid, grid.cell_size, width_attribute="width")


def _mask_dataset(datasets, ds_id, owner, field_name) -> RasterMask:
    src = datasets.get(ds_id)
    if not isinstance(src, RasterMask):
        raise ManifestError(owner, field_name, f"{ds_id!r} is not a mask dataset")
    return src


def load_manifest(path: str | Path, cell_size: float | None = None) -> Manifest:
    """Read a manifest and everything it references.

    Args:
        path: manifest JSON file. Relative paths inside are resolved against
            its directory.
        cell_size: optional override of the grid resolution; the extent is
            kept (rounded up to whole cells).

    Raises:
        ManifestError: naming the file and field at fault.
    """
    path = Path(path)
    doc = _load_json(path, path, "<manifest>")
    try:
        jsonschema.validate(doc, MANIFEST_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ManifestError(path, where, exc.message) from None
    base = path.parent

    grid = GridSpec(**doc["grid"])
    if cell_size is not None and cell_size != grid.cell_size:
        grid = grid.with_cell_size(cell_size)

    datasets: dict[str, DatasetSource] = {}
    warnings: list[dict] = []
    for i, entry in enumerate(doc["datasets"]):
        fld = f"datasets/{i}"
        ds_id = entry["id"]
        if ds_id in datasets:
            raise ManifestError(path, f"{fld}/id", f"duplicate dataset id {ds_id!r}")
        if "derive" in entry:
            datasets[ds_id] = _derive(entry, datasets, grid, path, fld, warnings)
            continue
        file = base / entry["path"]
        if not file.is_file():
            raise ManifestError(path, f"{fld}/path", f"file not found: {file}")
        if entry["format"] == "geojson":
            try:
                datasets[ds_id] = features_from_geojson(_load_json(file, path, f"{fld}/path"))
            except ValueError as exc:
                raise ManifestError(file, "features", str(exc)) from None
        else:
            try:
                spec, values, nodata = read_ascii_grid(file)
            except ValueError as exc:
                raise ManifestError(file, "grid", str(exc)) from None
            if entry.get("kind", "mask") == "rating":
                vals = np.where(np.isnan(values), -9999, values) if nodata is None else values
                try:
                    datasets[ds_id] = SqrRaster(spec, np.rint(vals).astype(np.int64),
                                                int(nodata) if nodata is not None else -9999)
                except ValueError as exc:
                    raise ManifestError(file, "values", str(exc)) from None
            else:
                if spec != grid:
                    raise ManifestError(file, "grid", f"mask grid {spec} differs from analysis grid {grid}")
                cells = values > 0 if nodata is None else (values > 0) & (values != nodata)
                datasets[ds_id] = RasterMask(spec, cells)

    regions: list[Region] = []
    if "regions" in doc:
        rfile = base / doc["regions"]
        try:
            regions = regions_from_geojson(_load_json(rfile, path, "regions"))
            check_hierarchy(regions)
        except ValueError as exc:
            if isinstance(exc, ManifestError):
                raise
            raise ManifestError(rfile, "features", str(exc)) from None

    scenarios: dict[str, Scenario] = {}
    for i, item in enumerate(doc.get("scenarios", [])):
        fld = f"scenarios/{i}"
        if isinstance(item, str):
            sfile = base / item
            sdoc, source = _load_json(sfile, path, fld), sfile
        else:
            sdoc, source = item, path
        try:
            scenario = scenario_from_dict(sdoc, str(source))
        except ScenarioError as exc:
            raise ManifestError(source, fld, str(exc)) from None
        if scenario.name in scenarios:
            raise ManifestError(source, f"{fld}/name", f"duplicate scenario {scenario.name!r}")
        for ds in scenario.dataset_ids:
            if ds not in datasets:
                raise ManifestError(source, f"{fld}/criteria", f"unknown dataset {ds!r}")
        scenarios[scenario.name] = scenario

    region_mask = None
    if "analysis_region" in doc:
        region_mask = _select(datasets, doc["analysis_region"], grid, path, "analysis_region")

    return Manifest(path, grid, datasets, regions, scenarios, region_mask, warnings)


def _derive(entry, datasets, grid, owner, fld, warnings) -> RasterMask:
    kind = entry["derive"]
    if kind == "side_strips":
        if "source" not in entry:
            raise ManifestError(owner, f"{fld}/source", "side_strips needs a source selector")
        sel = entry["source"]
        src = datasets.get(sel["dataset"])
        if not isinstance(src, list):
            raise ManifestError(owner, f"{fld}/source", f"{sel['dataset']!r} is not a feature dataset")
        lines = [f for f in filter_features(src, sel.get("categories")) if f.kind == "polyline"]
        try:
            return build_side_strips(
                lines, grid,
                entry.get("strip_width_m", 200.0), entry.get("inner_margin_m", 15.0),
                entry.get("default_width_m"), warnings,
            )
        except ValueError as exc:
            raise ManifestError(owner, fld, str(exc)) from None
    # sqr_select
    for key in ("arable", "sqr", "threshold"):
        if key not in entry:
            raise ManifestError(owner, f"{fld}/{key}", "required for sqr_select")
    arable = _select(datasets, entry["arable"], grid, owner, f"{fld}/arable")
    sqr = datasets.get(entry["sqr"])
    if not isinstance(sqr, SqrRaster):
        raise ManifestError(owner, f"{fld}/sqr", f"{entry['sqr']!r} is not a rating dataset")
    if "within" in entry:
        arable = arable & _mask_dataset(datasets, entry["within"], owner, f"{fld}/within")
    return sqr_select(arable, sqr, entry["threshold"], entry.get("op", "<"))

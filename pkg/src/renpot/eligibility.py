"""Scenario-driven land eligibility.

Greenfield scenarios start from the whole analysis region and subtract
buffered exclusions; pre-selected scenarios start from the union of their
pre-selection masks and then subtract. Both end with a minimum-area filter.
"""

from __future__ import annotations

import logging
import operator
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Union

import jsonschema
import numpy as np

from .capacity import PvParams, SpacingPolicy, TurbineSpec
from .geo import (
    GridSpec,
    RasterMask,
    VectorFeature,
    buffer_mask,
    connected_components,
    filter_features,
    rasterize,
)
from .geo.grid import GridMismatchError

logger = logging.getLogger(__name__)

TECHNOLOGIES = ("onshore_wind", "offshore_wind", "open_field_pv")
APPROACHES = ("greenfield", "preselected")
MODES = ("exclude", "preselect")

_OPS = {
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
    "==": operator.eq,
    "!=": operator.ne,
}

SQR_MAX = 102
SQR_NODATA = -9999


class ScenarioError(ValueError):
    pass


class MissingDatasetError(KeyError):
    def __init__(self, dataset_id: str):
        self.dataset_id = dataset_id
        super().__init__(f"dataset {dataset_id!r} is not available")


@dataclass(frozen=True)
class Predicate:
    attribute: str
    op: str
    value: float

    def __post_init__(self):
        if self.op not in _OPS:
            raise ValueError(f"unknown comparator {self.op!r}")

    def test(self, values):
        return _OPS[self.op](values, self.value)


@dataclass(frozen=True)
class Criterion:
    dataset_id: str
    categories: tuple[str, ...] = ()
    setback_m: float = 0.0
    mode: str = "exclude"
    predicate: Predicate | None = None

    def __post_init__(self):
        object.__setattr__(self, "categories", tuple(self.categories))
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.setback_m < 0:
            raise ValueError("setback_m must be >= 0")
        if self.mode == "preselect" and self.setback_m > 0:
            raise ValueError("pre-selection criteria cannot carry a setback")


@dataclass
class SqrRaster:
    """Soil quality ratings (0..102) on their own, usually coarser, grid."""

    spec: GridSpec
    ratings: np.ndarray
    nodata: int = SQR_NODATA

    def __post_init__(self):
        r = np.asarray(self.ratings)
        if r.shape != self.spec.shape:
            raise ValueError(f"ratings shape {r.shape} does not match grid {self.spec.shape}")
        r = r.astype(np.int64)
        valid = r != self.nodata
        if np.any((r[valid] < 0) | (r[valid] > SQR_MAX)):
            raise ValueError(f"SQR ratings must lie in 0..{SQR_MAX} or be NODATA")
        self.ratings = r

    def sample(self, target: GridSpec) -> np.ndarray:
        """Rating of the SQR cell containing each target cell center (NODATA outside)."""
        s = self.spec
        if (
            target.origin_x >= s.origin_x + s.width
            or s.origin_x >= target.origin_x + target.width
            or target.origin_y >= s.origin_y + s.height
            or s.origin_y >= target.origin_y + target.height
        ):
            raise GridMismatchError("SQR grid and analysis grid do not overlap")
        cols = np.floor((target.col_centers() - s.origin_x) / s.cell_size).astype(np.int64)
        rows = s.n_rows - 1 - np.floor((target.row_centers() - s.origin_y) / s.cell_size).astype(np.int64)
        col_ok = (cols >= 0) & (cols < s.n_cols)
        row_ok = (rows >= 0) & (rows < s.n_rows)
        out = np.full(target.shape, self.nodata, dtype=np.int64)
        sub = self.ratings[np.ix_(rows[row_ok], cols[col_ok])]
        out[np.ix_(np.nonzero(row_ok)[0], np.nonzero(col_ok)[0])] = sub
        return out


DatasetSource = Union[list, RasterMask, SqrRaster]


@dataclass
class Scenario:
    name: str
    technology: str
    approach: str = "greenfield"
    criteria: list[Criterion] = field(default_factory=list)
    min_area_m2: float = 0.0
    connectivity: int = 8
    turbine: TurbineSpec | None = None
    spacing: SpacingPolicy | None = None
    pv: PvParams | None = None

    def __post_init__(self):
        if self.technology not in TECHNOLOGIES:
            raise ScenarioError(f"{self.name}: unknown technology {self.technology!r}")
        if self.approach not in APPROACHES:
            raise ScenarioError(f"{self.name}: unknown approach {self.approach!r}")
        if self.min_area_m2 < 0:
            raise ScenarioError(f"{self.name}: min_area_m2 must be >= 0")
        if self.connectivity not in (4, 8):
            raise ScenarioError(f"{self.name}: connectivity must be 4 or 8")
        n_pre = sum(c.mode == "preselect" for c in self.criteria)
        if self.approach == "greenfield" and n_pre:
            raise ScenarioError(f"{self.name}: greenfield scenarios cannot contain pre-selection criteria")
        if self.approach == "preselected" and not n_pre:
            raise ScenarioError(f"{self.name}: pre-selected scenarios need at least one pre-selection criterion")
        if self.technology.endswith("_wind") and self.spacing is None:
            self.spacing = SpacingPolicy()
        if self.technology == "open_field_pv" and self.pv is None:
            self.pv = PvParams()

    @property
    def dataset_ids(self) -> list[str]:
        return sorted({c.dataset_id for c in self.criteria})


# -- criteria ---------------------------------------------------------------


def criterion_source_mask(criterion: Criterion, datasets: dict[str, DatasetSource], spec: GridSpec) -> RasterMask:
    """Unbuffered mask selected by a criterion from its dataset."""
    if criterion.dataset_id not in datasets:
        raise MissingDatasetError(criterion.dataset_id)
    src = datasets[criterion.dataset_id]
    pred = criterion.predicate
    if isinstance(src, SqrRaster):
        if pred is None:
            raise ScenarioError(f"criterion on rating raster {criterion.dataset_id!r} needs a predicate")
        ratings = src.sample(spec)
        return RasterMask(spec, (ratings != src.nodata) & pred.test(ratings))
    if isinstance(src, RasterMask):
        if src.spec != spec:
            raise GridMismatchError(f"dataset {criterion.dataset_id!r} is on a different grid")
        if criterion.categories or pred is not None:
            raise ScenarioError(f"mask dataset {criterion.dataset_id!r} takes no category filter or predicate")
        return src.copy()

    def keep(f: VectorFeature) -> bool:
        v = f.attributes.get(pred.attribute)
        return v is not None and bool(pred.test(v))

    feats = filter_features(src, criterion.categories, keep if pred is not None else None)
    # lines without a width attribute are traced one cell wide
    return rasterize(feats, spec, line_width_m=spec.cell_size, width_attribute="width")


def apply_criterion(
    current: RasterMask,
    criterion: Criterion,
    datasets: dict[str, DatasetSource],
    spec: GridSpec | None = None,
) -> RasterMask:
    spec = spec or current.spec
    if current.spec != spec:
        raise GridMismatchError("current mask is not on the analysis grid")
    hit = criterion_source_mask(criterion, datasets, spec)
    if criterion.mode == "preselect":
        return current & hit
    return current - buffer_mask(hit, criterion.setback_m)


def filter_min_area(mask: RasterMask, min_area_m2: float, connectivity: int = 8) -> RasterMask:
    """Drop connected components smaller than ``min_area_m2``; equal-sized ones stay."""
    if min_area_m2 < 0:
        raise ValueError("min_area_m2 must be >= 0")
    if min_area_m2 == 0:
        return mask.copy()
    regions = connected_components(mask, connectivity)
    keep = np.concatenate([[False], regions.areas_m2 >= min_area_m2])
    return RasterMask(mask.spec, keep[regions.labels])


def run_scenario(
    scenario: Scenario,
    datasets: dict[str, DatasetSource],
    spec: GridSpec,
    region: RasterMask | None = None,
    workers: int = 1,
) -> RasterMask:
    """Eligible mask for one scenario.

    ``region`` clips the analysis (cells outside it are never eligible); it
    defaults to the whole grid. Exclusions are unioned before subtraction, so
    their order and evaluation schedule cannot change the result.
    """
    missing = [d for d in scenario.dataset_ids if d not in datasets]
    if missing:
        raise MissingDatasetError(missing[0])
    base = region.copy() if region is not None else RasterMask.full(spec)
    if base.spec != spec:
        raise GridMismatchError("analysis region is not on the analysis grid")

    pre = [c for c in scenario.criteria if c.mode == "preselect"]
    exc = [c for c in scenario.criteria if c.mode == "exclude"]

    def excluded(c: Criterion) -> np.ndarray:
        return buffer_mask(criterion_source_mask(c, datasets, spec), c.setback_m).cells

    if pre:
        selected = np.zeros(spec.shape, dtype=bool)
        for c in pre:
            selected |= criterion_source_mask(c, datasets, spec).cells
        base = RasterMask(spec, base.cells & selected)

    if workers > 1 and len(exc) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(excluded, exc))
    else:
        parts = [excluded(c) for c in exc]
    blocked = np.zeros(spec.shape, dtype=bool)
    for p in parts:
        blocked |= p
    eligible = RasterMask(spec, base.cells & ~blocked)
    return filter_min_area(eligible, scenario.min_area_m2, scenario.connectivity)


# -- open-field PV pre-selection --------------------------------------------


def build_side_strips(
    lines: list[VectorFeature],
    spec: GridSpec,
    strip_width_m: float = 200.0,
    inner_margin_m: float = 15.0,
    default_width_m: float | None = None,
    warnings: list[dict] | None = None,
) -> RasterMask:
    """Bands beside roads/railways: within ``strip_width_m`` of the carriageway,
    minus the inner margin and the carriageway itself.

    Each line is rasterized at its ``width`` attribute. Lines without one use
    ``default_width_m`` (one cell if unset) and get a warning record appended
    to ``warnings``.
    """
    if not strip_width_m > inner_margin_m >= 0:
        raise ValueError("need strip_width_m > inner_margin_m >= 0")
    default = spec.cell_size if default_width_m is None else default_width_m
    sized = []
    for i, f in enumerate(lines):
        if "width" not in f.attributes:
            record = {"feature": i, "category": f.category, "issue": "missing width", "applied_width_m": default}
            logger.warning("line %d (%s) has no width; using %.1f m", i, f.category, default)
            if warnings is not None:
                warnings.append(record)
            f = VectorFeature(f.geometry, f.category, {**f.attributes, "width": default})
        sized.append(f)
    road = rasterize(sized, spec, width_attribute="width")
    outer = buffer_mask(road, strip_width_m)
    inner = buffer_mask(road, inner_margin_m)
    return outer - inner - road


def sqr_select(
    arable: RasterMask,
    sqr: SqrRaster,
    threshold: int,
    op: str = "<",
) -> RasterMask:
    """Arable cells whose containing SQR cell satisfies ``rating <op> threshold``.

    NODATA ratings never qualify.
    """
    if not 0 <= threshold <= SQR_MAX:
        raise ValueError(f"threshold must lie in 0..{SQR_MAX}")
    ratings = sqr.sample(arable.spec)
    ok = (ratings != sqr.nodata) & _OPS[op](ratings, threshold)
    return RasterMask(arable.spec, arable.cells & ok)


def sqr_preselect(arable: RasterMask, sqr: SqrRaster, threshold: int, spec: GridSpec | None = None) -> RasterMask:
    """Arable land with poor soil: ratings strictly below ``threshold``."""
    if spec is not None and spec != arable.spec:
        raise GridMismatchError("arable mask is not on the analysis grid")
    return sqr_select(arable, sqr, threshold, "<")


# -- JSON config --------------------------------------------------------------

SCENARIO_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["name", "technology", "approach", "criteria"],
    "properties": {
        "name": {"type": "string", "minLength": 1},
        "description": {"type": "string"},
        "technology": {"enum": list(TECHNOLOGIES)},
        "approach": {"enum": list(APPROACHES)},
        "min_area_m2": {"type": "number", "minimum": 0},
        "connectivity": {"enum": [4, 8]},
        "criteria": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["dataset"],
                "properties": {
                    "dataset": {"type": "string"},
                    "categories": {"type": "array", "items": {"type": "string"}},
                    "setback_m": {"type": "number", "minimum": 0},
                    "mode": {"enum": list(MODES)},
                    "predicate": {
                        "type": "object",
                        "required": ["attribute", "op", "value"],
                        "properties": {
                            "attribute": {"type": "string"},
                            "op": {"enum": list(_OPS)},
                            "value": {"type": "number"},
                        },
                        "additionalProperties": False,
                    },
                    "note": {"type": "string"},
                },
                "additionalProperties": False,
            },
        },
        "turbine": {
            "type": "object",
            "required": ["rated_power_mw", "rotor_diameter_m", "hub_height_m"],
            "properties": {
                "name": {"type": "string"},
                "rated_power_mw": {"type": "number", "exclusiveMinimum": 0},
                "rotor_diameter_m": {"type": "number", "exclusiveMinimum": 0},
                "hub_height_m": {"type": "number", "exclusiveMinimum": 0},
            },
            "additionalProperties": False,
        },
        "spacing": {
            "type": "object",
            "properties": {
                "along_wind_multiple": {"type": "number", "exclusiveMinimum": 0},
                "cross_wind_multiple": {"type": "number", "exclusiveMinimum": 0},
                "prevailing_direction_deg": {"type": "number"},
            },
            "additionalProperties": False,
        },
        "pv": {
            "type": "object",
            "properties": {
                "module_efficiency": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                "row_spacing_factor": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                "construction_factor": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
            },
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
}


def _schema_error(exc: jsonschema.ValidationError, source: str) -> ScenarioError:
    where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
    return ScenarioError(f"{source}: field {where}: {exc.message}")


def scenario_from_dict(doc: dict, source: str = "scenario") -> Scenario:
    try:
        jsonschema.validate(doc, SCENARIO_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise _schema_error(exc, source) from None
    criteria = []
    for c in doc["criteria"]:
        p = c.get("predicate")
        criteria.append(Criterion(
            dataset_id=c["dataset"],
            categories=tuple(c.get("categories", ())),
            setback_m=float(c.get("setback_m", 0.0)),
            mode=c.get("mode", "exclude"),
            predicate=Predicate(p["attribute"], p["op"], float(p["value"])) if p else None,
        ))
    turbine = TurbineSpec(**doc["turbine"]) if "turbine" in doc else None
    spacing = SpacingPolicy(**doc["spacing"]) if "spacing" in doc else None
    pv = PvParams(**doc["pv"]) if "pv" in doc else None
    try:
        return Scenario(
            name=doc["name"],
            technology=doc["technology"],
            approach=doc["approach"],
            criteria=criteria,
            min_area_m2=float(doc.get("min_area_m2", 0.0)),
            connectivity=int(doc.get("connectivity", 8)),
            turbine=turbine,
            spacing=spacing,
            pv=pv,
        )
    except ValueError as exc:
        raise ScenarioError(f"{source}: {exc}") from None

"""Small synthetic datasets used by the demo command and the test suite."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .geo import GridSpec, rectangle
from .geo.io import dump_json, features_to_geojson, write_ascii_grid
from .geo.features import line_feature


def settlement_datasets() -> tuple[dict[str, list], GridSpec]:
    """Fine vs coarse residential datasets of equal raw area.

    ``fine_a`` holds 16 scattered 20 m houses, ``fine_b`` the same houses
    shifted by one cell, and ``coarse`` a single 80 m block with the same
    total area placed in the middle of the scatter.
    """
    spec = GridSpec(0.0, 0.0, 10.0, 300, 300)
    fine_a, fine_b = [], []
    for i in range(4):
        for j in range(4):
            x = 1100.0 + 200.0 * i
            y = 1100.0 + 200.0 * j
            fine_a.append(rectangle(x, y, x + 20, y + 20, "residential"))
            fine_b.append(rectangle(x + 10, y, x + 30, y + 20, "residential"))
    coarse = [rectangle(1370.0, 1370.0, 1450.0, 1450.0, "residential")]
    return {"fine_a": fine_a, "fine_b": fine_b, "coarse": coarse}, spec


SETTLEMENT_SWEEP_M = [0.0, 20.0, 50.0, 100.0, 200.0, 300.0, 400.0, 600.0, 800.0, 1000.0]


def border_split_fixture():
    """An 8000 m² parcel cut in two 4000 m² halves by a municipal border.

    Returns (eligible mask cells, grid, regions as (id, level, parent, ring)).
    """
    spec = GridSpec(0.0, 0.0, 10.0, 40, 20)
    cells = np.zeros(spec.shape, dtype=bool)
    # 8 rows x 10 cols = 80 cells = 8000 m², straddling x = 200 m
    cells[6:14, 15:25] = True
    # a 6000 m² parcel wholly inside the east municipality survives everywhere
    cells[2:8, 30:40] = True
    regions = [
        ("DE", "national", None, [(0, 0), (400, 0), (400, 200), (0, 200)]),
        ("W", "municipality", "DE", [(0, 0), (200, 0), (200, 200), (0, 200)]),
        ("E", "municipality", "DE", [(200, 0), (400, 0), (400, 200), (200, 200)]),
    ]
    return cells, spec, regions


def _fc(features) -> dict:
    return features_to_geojson(features)


def write_demo_manifest(out_dir: str | Path) -> Path:
    """Write a miniature 4 km x 3 km study area with every input type.

    Returns the manifest path.
    """
    out = Path(out_dir)
    (out / "scenarios").mkdir(parents=True, exist_ok=True)

    landuse = [
        rectangle(0, 1200, 400, 1800, "inner_area"),
        rectangle(1500, 2700, 1540, 2740, "residential_building"),
        rectangle(3500, 200, 3530, 230, "residential_building"),
        rectangle(2300, 600, 3300, 1500, "forest"),
        rectangle(1800, 1900, 2400, 2500, "protected_landscape"),
        rectangle(600, 100, 2200, 1100, "arable"),
        rectangle(2500, 1700, 3900, 2900, "arable"),
    ]
    roads = [
        line_feature([(0, 1500), (4000, 1500)], "motorway", width=30),
        line_feature([(2000, 0), (2000, 3000)], "railway", width=10),
    ]
    regions = {
        "type": "FeatureCollection",
        "features": [],
    }
    boxes = [
        ("DE", "national", None, (0, 0, 4000, 3000)),
        ("ST-W", "federal_state", "DE", (0, 0, 2000, 3000)),
        ("ST-E", "federal_state", "DE", (2000, 0, 4000, 3000)),
        ("M-SW", "municipality", "ST-W", (0, 0, 2000, 1500)),
        ("M-NW", "municipality", "ST-W", (0, 1500, 2000, 3000)),
        ("M-SE", "municipality", "ST-E", (2000, 0, 4000, 1500)),
        ("M-NE", "municipality", "ST-E", (2000, 1500, 4000, 3000)),
    ]
    for rid, level, parent, (x0, y0, x1, y1) in boxes:
        props = {"region_id": rid, "level": level}
        if parent:
            props["parent_id"] = parent
        regions["features"].append({
            "type": "Feature",
            "properties": props,
            "geometry": {"type": "Polygon", "coordinates": [[[x0, y0], [x1, y0], [x1, y1], [x0, y1], [x0, y0]]]},
        })

    sqr_spec = GridSpec(0.0, 0.0, 100.0, 40, 30)
    cols = np.arange(40)[None, :]
    rows = np.arange(30)[:, None]
    # striped 10..89 so both arable parcels mix poor and rich soil
    ratings = (7 * cols + 3 * rows) % 80 + 10
    ratings[0, :5] = -9999

    dump_json(_fc(landuse), out / "landuse.geojson")
    dump_json(_fc(roads), out / "roads.geojson")
    dump_json(regions, out / "regions.geojson")
    write_ascii_grid(out / "sqr.asc", sqr_spec, ratings.astype(np.int64))

    turbine = {"name": "onshore-4.7MW-155m", "rated_power_mw": 4.7, "rotor_diameter_m": 155.0, "hub_height_m": 120.0}
    # 3 x total height for residential buildings in outer areas
    three_h = 3 * (120.0 + 155.0 / 2)
    scenarios = {
        "wind_s2.json": {
            "name": "wind_S2",
            "technology": "onshore_wind",
            "approach": "greenfield",
            "min_area_m2": 10000,
            "connectivity": 8,
            "criteria": [
                {"dataset": "landuse", "categories": ["inner_area"], "setback_m": 1000},
                {"dataset": "landuse", "categories": ["residential_building"], "setback_m": three_h},
                {"dataset": "roads", "categories": ["motorway", "railway"], "setback_m": 100},
            ],
            "turbine": turbine,
        },
        "wind_s2b.json": {
            "name": "wind_S2b",
            "technology": "onshore_wind",
            "approach": "greenfield",
            "min_area_m2": 10000,
            "criteria": [
                {"dataset": "landuse", "categories": ["inner_area"], "setback_m": 1000},
                {"dataset": "landuse", "categories": ["residential_building"], "setback_m": three_h},
                {"dataset": "roads", "categories": ["motorway", "railway"], "setback_m": 100},
                {"dataset": "landuse", "categories": ["forest"], "setback_m": 0},
            ],
            "turbine": turbine,
        },
        "pv_s1.json": {
            "name": "pv_S1",
            "technology": "open_field_pv",
            "approach": "preselected",
            "min_area_m2": 5000,
            "criteria": [
                {"dataset": "side_strips", "mode": "preselect"},
                {"dataset": "landuse", "categories": ["forest"], "setback_m": 10},
                {"dataset": "landuse", "categories": ["residential_building"], "setback_m": 10},
            ],
        },
        "pv_s3.json": {
            "name": "pv_S3",
            "technology": "open_field_pv",
            "approach": "preselected",
            "min_area_m2": 5000,
            "criteria": [
                {"dataset": "side_strips", "mode": "preselect"},
                {"dataset": "poor_soil", "mode": "preselect"},
                {"dataset": "rich_soil_in_strips", "setback_m": 0},
                {"dataset": "landuse", "categories": ["forest"], "setback_m": 10},
                {"dataset": "landuse", "categories": ["residential_building"], "setback_m": 10},
            ],
        },
    }
    for fname, doc in scenarios.items():
        (out / "scenarios" / fname).write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n", encoding="utf-8")

    manifest = {
        "name": "demo",
        "grid": {"origin_x": 0.0, "origin_y": 0.0, "cell_size": 10.0, "n_cols": 400, "n_rows": 300},
        "datasets": [
            {"id": "landuse", "path": "landuse.geojson", "format": "geojson"},
            {"id": "roads", "path": "roads.geojson", "format": "geojson"},
            {"id": "sqr", "path": "sqr.asc", "format": "ascii_grid", "kind": "rating"},
            {"id": "side_strips", "derive": "side_strips",
             "source": {"dataset": "roads", "categories": ["motorway", "railway"]},
             "strip_width_m": 200, "inner_margin_m": 15},
            {"id": "poor_soil", "derive": "sqr_select",
             "arable": {"dataset": "landuse", "categories": ["arable"]}, "sqr": "sqr", "op": "<", "threshold": 30},
            {"id": "rich_soil_in_strips", "derive": "sqr_select",
             "arable": {"dataset": "landuse", "categories": ["arable"]}, "sqr": "sqr", "op": ">=", "threshold": 40,
             "within": "side_strips"},
        ],
        "regions": "regions.geojson",
        "scenarios": [f"scenarios/{f}" for f in scenarios],
    }
    path = out / "manifest.json"
    path.write_text(json.dumps(manifest, indent=1) + "\n", encoding="utf-8")
    return path

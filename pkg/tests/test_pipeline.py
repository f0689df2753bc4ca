import json
import math

import numpy as np
import pytest

from renpot.capacity import REFERENCE_ONSHORE, place_turbines
from renpot.configs import list_configs, load_config
from renpot.eligibility import Criterion, Scenario, SqrRaster, filter_min_area, run_scenario, scenario_from_dict
from renpot.fixtures import border_split_fixture, write_demo_manifest
from renpot.geo import GridSpec, RasterMask, mask_area, polygon_feature, rectangle
from renpot.geo.io import dump_json, features_to_geojson
from renpot.pipeline import (
    ManifestError,
    PotentialRecord,
    Region,
    check_hierarchy,
    export_db,
    load_manifest,
    read_records_csv,
    records_csv,
    regional_aggregate,
    run_pipeline,
    sqr_sensitivity,
)


def fixture_regions():
    cells, spec, raw = border_split_fixture()
    regions = [Region(rid, level, polygon_feature(ring), parent) for rid, level, parent, ring in raw]
    return RasterMask(spec, cells), regions


PV = Scenario("pv", "open_field_pv", "preselected", [Criterion("x", mode="preselect")], min_area_m2=5000)


# -- manifest ------------------------------------------------------------------


def _minimal(tmp_path, **extra):
    dump_json(features_to_geojson([rectangle(0, 0, 50, 50, "forest")]), tmp_path / "lu.geojson")
    doc = {
        "grid": {"origin_x": 0, "origin_y": 0, "cell_size": 10, "n_cols": 20, "n_rows": 20},
        "datasets": [{"id": "lu", "path": "lu.geojson", "format": "geojson"}],
        **extra,
    }
    p = tmp_path / "m.json"
    p.write_text(json.dumps(doc))
    return p


def test_minimal_manifest_loads(tmp_path):
    m = load_manifest(_minimal(tmp_path))
    assert list(m.datasets) == ["lu"] and len(m.datasets["lu"]) == 1
    assert m.grid.shape == (20, 20)


def test_manifest_missing_file_named(tmp_path):
    p = _minimal(tmp_path)
    (tmp_path / "lu.geojson").unlink()
    with pytest.raises(ManifestError) as exc:
        load_manifest(p)
    assert "lu.geojson" in str(exc.value) and exc.value.field == "datasets/0/path"


def test_manifest_duplicate_dataset(tmp_path):
    p = _minimal(tmp_path)
    doc = json.loads(p.read_text())
    doc["datasets"].append(dict(doc["datasets"][0]))
    p.write_text(json.dumps(doc))
    with pytest.raises(ManifestError, match="duplicate"):
        load_manifest(p)


def test_manifest_schema_violation(tmp_path):
    p = _minimal(tmp_path)
    doc = json.loads(p.read_text())
    doc["grid"]["cell_size"] = "ten"
    p.write_text(json.dumps(doc))
    with pytest.raises(ManifestError) as exc:
        load_manifest(p)
    assert exc.value.field == "grid/cell_size"


def test_manifest_unknown_scenario_dataset(tmp_path):
    p = _minimal(tmp_path, scenarios=[{"name": "s", "technology": "onshore_wind", "approach": "greenfield",
                                       "criteria": [{"dataset": "roads"}]}])
    with pytest.raises(ManifestError, match="roads"):
        load_manifest(p)


def test_demo_manifest_counts(tmp_path):
    m = load_manifest(write_demo_manifest(tmp_path))
    assert sorted(m.datasets) == ["landuse", "poor_soil", "rich_soil_in_strips", "roads", "side_strips", "sqr"]
    assert len(m.datasets["landuse"]) == 7 and len(m.datasets["roads"]) == 2
    assert isinstance(m.datasets["sqr"], SqrRaster)
    assert sorted(m.scenarios) == ["pv_S1", "pv_S3", "wind_S2", "wind_S2b"]
    assert [r.region_id for r in m.regions][:3] == ["DE", "ST-W", "ST-E"] and len(m.regions) == 7
    assert m.warnings == []
    for ds in ("side_strips", "poor_soil", "rich_soil_in_strips"):
        assert m.datasets[ds].count > 0
    assert m.datasets["rich_soil_in_strips"].issubset(m.datasets["side_strips"])


def test_grid_res_override_keeps_extent(tmp_path):
    m = load_manifest(write_demo_manifest(tmp_path), cell_size=20)
    assert m.grid.shape == (150, 200)


def test_hierarchy_checks():
    box = polygon_feature([(0, 0), (1, 0), (1, 1), (0, 1)])
    with pytest.raises(ValueError, match="unknown parent"):
        check_hierarchy([Region("A", "municipality", box, "X")])
    with pytest.raises(ValueError, match="coarser"):
        check_hierarchy([Region("N", "national", box), Region("S", "federal_state", box, "N"),
                         Region("T", "federal_state", box, "S")])
    with pytest.raises(ValueError, match="national"):
        check_hierarchy([Region("S", "federal_state", box)])
    with pytest.raises(ValueError):
        Region("Q", "county", box)


# -- aggregation -----------------------------------------------------------------


def test_identity_clip_equals_unclipped():
    mask, regions = fixture_regions()
    rec = regional_aggregate(mask, PV, regions[:1])[0]
    direct = filter_min_area(mask, 5000)
    assert rec.area_km2 == mask_area(direct)
    assert rec.capacity_mw == 79.2 * mask_area(direct)


def test_border_split_effect():
    mask, regions = fixture_regions()
    recs = {r.region_id: r for r in regional_aggregate(mask, PV, regions)}
    # parent keeps both parcels; W has only a 4000 m² fragment; E keeps the 6000 m² parcel only
    assert recs["DE"].area_km2 == pytest.approx(0.014, abs=1e-15)
    assert recs["W"].area_km2 == 0.0
    assert recs["E"].area_km2 == pytest.approx(0.006, abs=1e-15)
    deficit = recs["DE"].area_km2 - recs["W"].area_km2 - recs["E"].area_km2
    assert deficit == pytest.approx(0.008, abs=1e-15)


def test_empty_region_boundary_rejected():
    mask, _ = fixture_regions()
    far = Region("X", "national", polygon_feature([(1e6, 1e6), (1e6 + 1, 1e6), (1e6 + 1, 1e6 + 1), (1e6, 1e6 + 1)]))
    with pytest.raises(ValueError, match="empty boundary"):
        regional_aggregate(mask, PV, [far])


def test_wind_regional_counts_from_national_placement():
    mask, regions = fixture_regions()
    wind = Scenario("w", "onshore_wind", min_area_m2=5000)
    pl = place_turbines(filter_min_area(mask, 5000), REFERENCE_ONSHORE)
    recs = {r.region_id: r for r in regional_aggregate(filter_min_area(mask, 5000), wind, regions, pl)}
    assert recs["DE"].item_count == pl.count
    assert recs["W"].item_count + recs["E"].item_count <= recs["DE"].item_count
    for r in recs.values():
        assert r.capacity_mw == r.item_count * 4.7


def test_record_consistency_checked():
    with pytest.raises(ValueError):
        PotentialRecord("A", "national", "s", "open_field_pv", 1.0, 80.0, 79.2, 0)
    with pytest.raises(ValueError):
        PotentialRecord("A", "national", "s", "open_field_pv", -1.0, 0.0, 0.0, 0)
    r = PotentialRecord.build("A", "national", "s", "open_field_pv", 2.0, 158.4, 0)
    assert r.density_mw_per_km2 == 79.2


def test_sqr_sensitivity_examples():
    spec = GridSpec(0, 0, 10, 20, 10)
    ratings = np.tile(np.arange(0, 100, 10)[None, :], (5, 1))  # 5 x 10 SQR cells of 20 m
    sqr = SqrRaster(GridSpec(0, 0, 20, 10, 5), ratings)
    arable = RasterMask.full(spec)
    rows = sqr_sensitivity(arable, sqr, [0, 25, 50, 103 - 1], spec)
    assert rows[0]["area_km2"] == 0.0
    # ratings < 25: columns 0..2 of the SQR grid, 2 analysis columns each, 10 rows tall
    assert rows[1]["area_km2"] == pytest.approx(3 * 2 * 10 * 100 / 1e6)
    assert rows[-1]["share_of_arable"] == 1.0
    areas = [r["area_km2"] for r in rows]
    assert areas == sorted(areas)
    with pytest.raises(ValueError):
        sqr_sensitivity(arable, sqr, [30, 20])


# -- export --------------------------------------------------------------------------


def test_export_empty_is_header_only(tmp_path):
    export_db([], tmp_path)
    assert (tmp_path / "potentials.csv").read_bytes() == (
        b"level,region_id,scenario_name,technology,area_km2,capacity_mw,density_mw_per_km2,item_count\n"
    )


def test_export_one_record_round_trip(tmp_path):
    rec = PotentialRecord.build("DE", "national", "S1", "open_field_pv", 0.1 + 0.2, 79.2 * 0.3, 0)
    export_db([rec], tmp_path)
    raw = (tmp_path / "potentials.csv").read_bytes()
    assert raw.count(b"\n") == 2 and b"\r" not in raw
    assert read_records_csv(tmp_path / "potentials.csv") == [rec]


def test_export_sorted_by_level_then_region(tmp_path):
    recs = [
        PotentialRecord.build("b", "municipality", "s", "open_field_pv", 1, 1, 0),
        PotentialRecord.build("a", "municipality", "s", "open_field_pv", 1, 1, 0),
        PotentialRecord.build("Z", "national", "s", "open_field_pv", 1, 1, 0),
    ]
    lines = records_csv(recs).decode().splitlines()[1:]
    assert [ln.split(",")[1] for ln in lines] == ["Z", "a", "b"]


def test_pipeline_outputs(tmp_path):
    m = load_manifest(write_demo_manifest(tmp_path / "in"))
    res = run_pipeline(m, tmp_path / "out", ["wind_S2", "pv_S1"])
    out = tmp_path / "out"
    assert sorted(p.name for p in out.iterdir()) == [
        "eligible_pv_S1.asc", "eligible_wind_S2.asc", "placements_wind_S2.geojson", "potentials.csv",
    ]
    recs = read_records_csv(out / "potentials.csv")
    assert len(recs) == 2 * 7
    for r in recs:
        if r.area_km2 > 0:
            assert math.isclose(r.capacity_mw / r.area_km2, r.density_mw_per_km2, rel_tol=1e-6)
    by = {(r.scenario_name, r.region_id): r for r in recs}
    for scen in ("wind_S2", "pv_S1"):
        parent = by[(scen, "DE")].area_km2
        assert by[(scen, "ST-W")].area_km2 + by[(scen, "ST-E")].area_km2 <= parent + 1e-12
    assert by[("wind_S2", "DE")].item_count == res["wind_S2"].placement.count


def test_s2b_within_s2_on_demo(tmp_path):
    m = load_manifest(write_demo_manifest(tmp_path))
    a = run_scenario(m.scenario("wind_S2"), m.datasets, m.grid)
    b = run_scenario(m.scenario("wind_S2b"), m.datasets, m.grid)
    assert b.issubset(a) and b.count < a.count


# -- shipped configs ----------------------------------------------------------------


@pytest.mark.parametrize("kind", ["onshore", "offshore", "open_field_pv"])
def test_shipped_scenarios_parse(kind):
    names = list_configs(kind)
    assert names
    for name in names:
        sc = scenario_from_dict(load_config(kind, name), name)
        assert sc.criteria


def test_shipped_turbines():
    t = load_config("turbines", "onshore_reference")
    assert (t["rated_power_mw"], t["rotor_diameter_m"]) == (4.7, 155)
    t = load_config("turbines", "onshore_medium_wind")
    assert (t["rated_power_mw"], t["rotor_diameter_m"]) == (5.0, 145)

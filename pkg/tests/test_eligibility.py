import numpy as np
import pytest

from oracles import point_segment_distance
from renpot.eligibility import (
    Criterion,
    MissingDatasetError,
    Predicate,
    Scenario,
    ScenarioError,
    SqrRaster,
    apply_criterion,
    build_side_strips,
    filter_min_area,
    run_scenario,
    scenario_from_dict,
    sqr_preselect,
    sqr_select,
)
from renpot.geo import GridMismatchError, GridSpec, RasterMask, buffer_mask, line_feature, rasterize, rectangle

SPEC = GridSpec(0, 0, 10, 60, 50)


def village():
    return {
        "landuse": [
            rectangle(200, 200, 260, 240, "residential"),
            rectangle(400, 100, 430, 130, "residential"),
            rectangle(50, 350, 200, 480, "forest"),
            rectangle(300, 300, 550, 420, "arable", ),
        ],
        "roads": [line_feature([(0, 150), (600, 150)], "motorway", width=30)],
    }


def test_exclude_empty_features_is_identity():
    cur = RasterMask.full(SPEC)
    out = apply_criterion(cur, Criterion("landuse", ("glacier",), 100), village(), SPEC)
    assert out == cur


def test_preselect_empty_features_is_empty():
    out = apply_criterion(RasterMask.full(SPEC), Criterion("landuse", ("glacier",), mode="preselect"), village())
    assert out.count == 0


def test_exclude_equals_buffer_complement():
    big = GridSpec(0, 0, 10, 300, 300)
    ds = {"landuse": [rectangle(1400, 1400, 1600, 1550, "residential")]}
    out = apply_criterion(RasterMask.full(big), Criterion("landuse", ("residential",), 1000), ds)
    expected = ~buffer_mask(rasterize(ds["landuse"], big), 1000)
    assert out == expected


def test_missing_dataset_named():
    with pytest.raises(MissingDatasetError) as exc:
        apply_criterion(RasterMask.full(SPEC), Criterion("nope"), village())
    assert exc.value.dataset_id == "nope"
    sc = Scenario("s", "onshore_wind", criteria=[Criterion("nope")])
    with pytest.raises(MissingDatasetError):
        run_scenario(sc, village(), SPEC)


def test_criterion_validation():
    with pytest.raises(ValueError):
        Criterion("x", setback_m=-1)
    with pytest.raises(ValueError):
        Criterion("x", mode="preselect", setback_m=5)
    with pytest.raises(ValueError):
        Criterion("x", mode="include")


def test_scenario_validation():
    with pytest.raises(ScenarioError):
        Scenario("s", "onshore_wind", "greenfield", [Criterion("x", mode="preselect")])
    with pytest.raises(ScenarioError):
        Scenario("s", "open_field_pv", "preselected", [Criterion("x")])
    with pytest.raises(ScenarioError):
        Scenario("s", "tidal")
    with pytest.raises(ScenarioError):
        Scenario("s", "onshore_wind", min_area_m2=-5)
    assert Scenario("w", "onshore_wind").spacing is not None
    assert Scenario("p", "open_field_pv", "preselected", [Criterion("x", mode="preselect")]).pv is not None


def test_vacuous_scenario_is_full_region():
    region = RasterMask(SPEC, np.zeros(SPEC.shape, bool))
    region.cells[5:20, 5:30] = True
    out = run_scenario(Scenario("s", "onshore_wind"), {}, SPEC, region)
    assert out == region
    assert run_scenario(Scenario("s", "onshore_wind"), {}, SPEC) == RasterMask.full(SPEC)


def test_forest_exclusion_shrinks():
    base = [Criterion("landuse", ("residential",), 100), Criterion("roads", ("motorway",), 50)]
    s2 = Scenario("S2", "onshore_wind", criteria=base, min_area_m2=10000)
    s2b = Scenario("S2b", "onshore_wind", criteria=base + [Criterion("landuse", ("forest",), 0)], min_area_m2=10000)
    a = run_scenario(s2, village(), SPEC)
    b = run_scenario(s2b, village(), SPEC)
    assert b.issubset(a) and b.count < a.count


def test_scenario_equals_manual_chain():
    crit = [
        Criterion("landuse", ("residential",), 80),
        Criterion("roads", ("motorway",), 25),
        Criterion("landuse", ("forest",), 0),
    ]
    sc = Scenario("s", "onshore_wind", criteria=crit)
    cur = RasterMask.full(SPEC)
    for c in crit:
        cur = apply_criterion(cur, c, village(), SPEC)
    assert run_scenario(sc, village(), SPEC) == cur
    assert run_scenario(sc, village(), SPEC, workers=3) == cur


def test_preselected_contained_in_union():
    crit = [
        Criterion("landuse", ("arable",), mode="preselect"),
        Criterion("landuse", ("forest",), mode="preselect"),
        Criterion("landuse", ("residential",), 50),
    ]
    sc = Scenario("s", "open_field_pv", "preselected", crit)
    out = run_scenario(sc, village(), SPEC)
    union = rasterize([f for f in village()["landuse"] if f.category in ("arable", "forest")], SPEC)
    assert out.issubset(union) and out.count > 0


def test_predicate_filters_features():
    ds = {"parks": [
        rectangle(0, 0, 100, 100, "protected", size_ha=5),
        rectangle(300, 300, 400, 400, "protected", size_ha=50),
    ]}
    c = Criterion("parks", ("protected",), 0, predicate=Predicate("size_ha", ">=", 10))
    out = apply_criterion(RasterMask.full(SPEC), c, ds)
    assert out.count == SPEC.n_cols * SPEC.n_rows - 100


def test_mask_dataset_used_directly():
    m = RasterMask.empty(SPEC)
    m.cells[10, 10] = True
    out = apply_criterion(RasterMask.full(SPEC), Criterion("m", setback_m=15), {"m": m})
    assert out.count == SPEC.n_cols * SPEC.n_rows - 9


# -- min-area filter ---------------------------------------------------------


def test_min_area_examples():
    spec = GridSpec(0, 0, 10, 40, 40)
    cells = np.zeros(spec.shape, bool)
    cells[0:5, 0:10] = True  # 50 cells
    cells[20:35, 20:30] = True  # 150 cells
    out = filter_min_area(RasterMask(spec, cells), 10000)
    assert out.count == 150 and out.cells[20, 20]
    m = RasterMask(spec, cells)
    assert filter_min_area(m, 0) == m
    assert filter_min_area(m, 5000).count == 200  # equal area survives


def test_min_area_connectivity_matters():
    spec = GridSpec(0, 0, 10, 4, 4)
    cells = np.eye(4, dtype=bool)
    m = RasterMask(spec, cells)
    assert filter_min_area(m, 400, connectivity=8).count == 4
    assert filter_min_area(m, 400, connectivity=4).count == 0


def test_min_area_idempotent(rng):
    spec = GridSpec(0, 0, 10, 50, 50)
    for _ in range(10):
        m = RasterMask(spec, rng.random(spec.shape) < 0.5)
        once = filter_min_area(m, 3000)
        assert filter_min_area(once, 3000) == once


# -- side strips ----------------------------------------------------------------


def test_side_strip_bands_per_cell_oracle():
    spec = GridSpec(0, 0, 10, 20, 60)
    road = line_feature([(-50, 300), (250, 300)], "road", width=10)
    strips = build_side_strips([road], spec)
    for r in range(spec.n_rows):
        for c in range(spec.n_cols):
            x, y = spec.cell_center(r, c)
            d_center = point_segment_distance(x, y, -50, 300, 250, 300)
            on_road = d_center <= 5
            # distances between cell centers: nearest road cell is at y = 295 or 305
            d = min(abs(y - 295), abs(y - 305))
            expected = not on_road and 15 < d <= 200
            assert strips.cells[r, c] == expected, (r, c)
    # road burns two rows; each band has 19 rows at 20..200 m from them
    assert strips.count == 2 * 19 * 20


def test_side_strip_disjointness_and_zero_margin():
    spec = GridSpec(0, 0, 10, 40, 40)
    lines = [line_feature([(0, 0), (400, 400)], "rail", width=10)]
    road = rasterize(lines, spec, width_attribute="width")
    s = build_side_strips(lines, spec, 100, 15)
    assert (s & road).count == 0
    assert (s & buffer_mask(road, 15)).count == 0
    s0 = build_side_strips(lines, spec, 100, 0)
    assert s0 == buffer_mask(road, 100) - road
    touching = buffer_mask(road, 10) - road
    assert touching.issubset(s0)


def test_side_strip_rejects_bad_widths():
    with pytest.raises(ValueError):
        build_side_strips([], SPEC, 15, 15)


def test_side_strip_missing_width_warns():
    warnings = []
    build_side_strips([line_feature([(0, 10), (100, 10)], "road")], SPEC, warnings=warnings)
    assert warnings and warnings[0]["feature"] == 0 and warnings[0]["applied_width_m"] == 10


# -- SQR -------------------------------------------------------------------------


def _sqr(values, cs=100.0):
    values = np.asarray(values)
    return SqrRaster(GridSpec(0, 0, cs, values.shape[1], values.shape[0]), values)


def test_sqr_uniform_below_and_at_threshold():
    spec = GridSpec(0, 0, 10, 20, 20)
    arable = RasterMask(spec, np.ones(spec.shape, bool))
    arable.cells[0, :] = False
    assert sqr_preselect(arable, _sqr(np.full((2, 2), 29)), 30) == arable
    assert sqr_preselect(arable, _sqr(np.full((2, 2), 30)), 30).count == 0


def test_sqr_checkerboard_matches_cell_oracle(rng):
    spec = GridSpec(0, 0, 10, 40, 30)
    board = np.where((np.arange(3)[:, None] + np.arange(4)[None, :]) % 2 == 0, 20, 45)
    board[1, 1] = -9999
    sqr = _sqr(board)
    arable = RasterMask(spec, rng.random(spec.shape) < 0.7)
    out = sqr_preselect(arable, sqr, 30)
    for r in range(spec.n_rows):
        for c in range(spec.n_cols):
            x, y = spec.cell_center(r, c)
            sr = 2 - int(y // 100)
            sc = int(x // 100)
            v = board[sr, sc]
            assert out.cells[r, c] == (arable.cells[r, c] and v != -9999 and v < 30)


def test_sqr_outside_coverage_never_qualifies():
    spec = GridSpec(0, 0, 10, 20, 20)
    out = sqr_select(RasterMask.full(spec), SqrRaster(GridSpec(0, 0, 100, 1, 1), np.array([[5]])), 30)
    assert out.count == 100


def test_sqr_disjoint_extent_rejected():
    with pytest.raises(GridMismatchError):
        sqr_preselect(RasterMask.full(SPEC), SqrRaster(GridSpec(1e5, 0, 100, 2, 2), np.zeros((2, 2))), 30)


def test_sqr_rating_range_checked():
    with pytest.raises(ValueError):
        _sqr(np.array([[103]]))
    with pytest.raises(ValueError):
        sqr_preselect(RasterMask.full(SPEC), _sqr(np.zeros((5, 6))), 103)


# -- config --------------------------------------------------------------------------


def test_scenario_from_dict_round_trip():
    doc = {
        "name": "t",
        "technology": "onshore_wind",
        "approach": "greenfield",
        "min_area_m2": 10000,
        "criteria": [
            {"dataset": "landuse", "categories": ["forest"], "setback_m": 0},
            {"dataset": "parks", "predicate": {"attribute": "size_ha", "op": ">=", "value": 10}},
        ],
        "turbine": {"rated_power_mw": 4.7, "rotor_diameter_m": 155, "hub_height_m": 120},
        "spacing": {"prevailing_direction_deg": 270},
    }
    sc = scenario_from_dict(doc)
    assert sc.dataset_ids == ["landuse", "parks"]
    assert sc.criteria[1].predicate == Predicate("size_ha", ">=", 10.0)
    assert sc.spacing.prevailing_direction_deg == 270
    assert sc.turbine.rotor_diameter_m == 155


def test_scenario_from_dict_reports_field():
    with pytest.raises(ScenarioError, match="criteria/0/setback_m"):
        scenario_from_dict({"name": "t", "technology": "onshore_wind", "approach": "greenfield",
                            "criteria": [{"dataset": "x", "setback_m": -3}]}, "t.json")

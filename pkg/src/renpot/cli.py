"""Command line entry point (``renpot``)."""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

from . import compare
from .capacity import REFERENCE_ONSHORE, PvParams, SpacingPolicy, ofpv_capacity, place_turbines, wind_capacity_summary
from .capacity import placement_geojson
from .eligibility import SqrRaster, run_scenario
from .fixtures import write_demo_manifest
from .geo import filter_features, rasterize
from .geo.io import dump_json, write_mask
from .pipeline.aggregate import regional_aggregate, rooftop_records, sqr_sensitivity
from .pipeline.export import export_db, records_csv
from .pipeline.manifest import ManifestError, load_manifest
from .pipeline.run import run_pipeline
from .rooftop import process_building_set, read_surfaces, write_roof_csv, write_summary_csv

logger = logging.getLogger("renpot")


class CliError(Exception):
    pass


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _ints(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def _load(args):
    return load_manifest(args.manifest, cell_size=args.grid_res)


def _scenario(manifest, args):
    scenario = manifest.scenario(args.scenario)
    if args.connectivity is not None:
        scenario = dataclasses.replace(scenario, connectivity=args.connectivity)
    return scenario


def _out(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _emit(payload) -> None:
    print(json.dumps(payload, sort_keys=True))


def cmd_compare(args):
    m = _load(args)
    ids = args.datasets.split(",") if args.datasets else [k for k, v in m.datasets.items() if isinstance(v, list)]
    datasets = {}
    for ds in ids:
        if not isinstance(m.datasets.get(ds), list):
            raise CliError(f"{ds!r} is not a feature dataset in the manifest")
        datasets[ds] = m.datasets[ds]
    sweeps = [
        compare.setback_sweep(datasets, cat, _floats(args.setbacks), m.grid, m.grid.cell_size, args.workers)
        for cat in args.categories.split(",")
    ]
    path = _out(args) / "comparison.csv"
    compare.write_report(sweeps, path)
    _emit({"status": "ok", "report": str(path), "rows": len(compare.report_rows(sweeps))})


def cmd_eligibility(args):
    m = _load(args)
    scenario = _scenario(m, args)
    mask = run_scenario(scenario, m.datasets, m.grid, m.analysis_region, args.workers)
    path = _out(args) / f"eligible_{scenario.name}.asc"
    write_mask(path, mask)
    _emit({"status": "ok", "scenario": scenario.name, "cells": mask.count,
           "area_km2": mask.count * m.grid.cell_area / 1e6, "mask": str(path)})


def cmd_place(args):
    m = _load(args)
    scenario = _scenario(m, args)
    if scenario.technology == "open_field_pv":
        raise CliError(f"scenario {scenario.name!r} is not a wind scenario")
    spacing = scenario.spacing or SpacingPolicy()
    if args.direction is not None:
        spacing = dataclasses.replace(spacing, prevailing_direction_deg=args.direction)
    mask = run_scenario(scenario, m.datasets, m.grid, m.analysis_region, args.workers)
    placement = place_turbines(mask, scenario.turbine or REFERENCE_ONSHORE, spacing)
    summary = wind_capacity_summary(placement, mask)
    path = _out(args) / f"placements_{scenario.name}.geojson"
    dump_json(placement_geojson(placement), path)
    _emit({"status": "ok", "scenario": scenario.name, **dataclasses.asdict(summary), "placements": str(path)})


def cmd_ofpv(args):
    params = PvParams(args.efficiency, args.row_spacing, args.construction)
    _emit({"status": "ok", "area_km2": args.area_km2, "capacity_mw": ofpv_capacity(args.area_km2, params),
           "density_mw_per_km2": params.density_mw_per_km2})


def cmd_rooftop(args):
    surfaces, errors = read_surfaces(args.surfaces)
    result = process_building_set(surfaces, workers=args.workers)
    out = _out(args)
    write_roof_csv(result.roofs, out / "roofs.csv")
    write_summary_csv(result.summaries, out / "rooftop_groups.csv")
    errors = errors + result.errors
    dump_json({"errors": errors}, out / "rooftop_errors.json")
    export_db(rooftop_records(result.summaries, []), out / "db")
    _emit({"status": "ok", "roofs": len(result.roofs), "below_threshold": result.excluded_small,
           "invalid": len(errors),
           "total_kwp": sum(s.total_kwp for s in result.summaries.values()),
           "total_no_north_kwp": sum(s.total_no_north_kwp for s in result.summaries.values())})


def cmd_sqr(args):
    m = _load(args)
    ds, _, cats = args.arable.partition(":")
    feats = m.datasets.get(ds)
    if not isinstance(feats, list):
        raise CliError(f"{ds!r} is not a feature dataset")
    sqr = m.datasets.get(args.sqr)
    if not isinstance(sqr, SqrRaster):
        raise CliError(f"{args.sqr!r} is not a rating dataset")
    arable = rasterize(filter_features(feats, cats.split(",") if cats else None), m.grid)
    rows = sqr_sensitivity(arable, sqr, _ints(args.thresholds), m.grid)
    path = _out(args) / "sqr_sweep.csv"
    lines = ["threshold,area_km2,share_of_arable"]
    lines += [f"{r['threshold']},{r['area_km2']!r},{r['share_of_arable']!r}" for r in rows]
    path.write_bytes(("\n".join(lines) + "\n").encode("utf-8"))
    _emit({"status": "ok", "sweep": str(path), "rows": rows})


def cmd_aggregate(args):
    m = _load(args)
    scenario = _scenario(m, args)
    mask = run_scenario(scenario, m.datasets, m.grid, m.analysis_region, args.workers)
    placement = None
    if scenario.technology != "open_field_pv":
        placement = place_turbines(mask, scenario.turbine or REFERENCE_ONSHORE, scenario.spacing)
    records = regional_aggregate(mask, scenario, m.regions, placement)
    path = _out(args) / f"potentials_{scenario.name}.csv"
    path.write_bytes(records_csv(records))
    _emit({"status": "ok", "scenario": scenario.name, "records": len(records), "csv": str(path)})


def cmd_export(args):
    m = _load(args)
    if args.connectivity is not None:
        m.scenarios = {k: dataclasses.replace(v, connectivity=args.connectivity) for k, v in m.scenarios.items()}
    results = run_pipeline(m, args.out, args.scenario or None, args.workers)
    _emit({"status": "ok", "out": str(args.out), "scenarios": sorted(results),
           "records": sum(len(r.records) for r in results.values())})


def cmd_demo(args):
    path = write_demo_manifest(args.directory)
    _emit({"status": "ok", "manifest": str(path)})


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--grid-res", type=float, default=None, help="analysis cell size in m (manifest default 10)")
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--connectivity", type=int, choices=(4, 8), default=None)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="renpot", description="Renewable energy potentials from land-use data.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("compare-datasets", parents=[common], help="NTA/IoU setback sweep between datasets")
    s.add_argument("manifest")
    s.add_argument("--categories", required=True, help="comma-separated categories")
    s.add_argument("--setbacks", required=True, help="comma-separated ascending distances in m")
    s.add_argument("--datasets", help="comma-separated dataset ids (default: all feature datasets)")
    s.set_defaults(func=cmd_compare)

    s = sub.add_parser("run-eligibility", parents=[common], help="eligible mask for one scenario")
    s.add_argument("manifest")
    s.add_argument("--scenario", required=True)
    s.set_defaults(func=cmd_eligibility)

    s = sub.add_parser("place-turbines", parents=[common], help="turbine placement for a wind scenario")
    s.add_argument("manifest")
    s.add_argument("--scenario", required=True)
    s.add_argument("--direction", type=float, default=None, help="prevailing wind direction, deg from north")
    s.set_defaults(func=cmd_place)

    s = sub.add_parser("ofpv-capacity", parents=[common], help="open-field PV capacity for an area")
    s.add_argument("--area-km2", type=float, required=True)
    s.add_argument("--efficiency", type=float, default=0.22)
    s.add_argument("--row-spacing", type=float, default=0.5)
    s.add_argument("--construction", type=float, default=0.72)
    s.set_defaults(func=cmd_ofpv)

    s = sub.add_parser("rooftop", parents=[common], help="rooftop PV from a JSON surface list")
    s.add_argument("surfaces")
    s.set_defaults(func=cmd_rooftop)

    s = sub.add_parser("sqr-sweep", parents=[common], help="poor-soil area per SQR threshold")
    s.add_argument("manifest")
    s.add_argument("--arable", required=True, help="DATASET[:CATEGORY,...] selecting arable land")
    s.add_argument("--sqr", required=True, help="rating dataset id")
    s.add_argument("--thresholds", default="20,25,30,35,40,45,50")
    s.set_defaults(func=cmd_sqr)

    s = sub.add_parser("aggregate", parents=[common], help="per-region records for one scenario")
    s.add_argument("manifest")
    s.add_argument("--scenario", required=True)
    s.set_defaults(func=cmd_aggregate)

    s = sub.add_parser("export", parents=[common], help="full pipeline and database export")
    s.add_argument("manifest")
    s.add_argument("--scenario", action="append", help="limit to these scenarios (repeatable)")
    s.set_defaults(func=cmd_export)

    s = sub.add_parser("make-demo", help="write a miniature synthetic study area")
    s.add_argument("directory")
    s.set_defaults(func=cmd_demo, verbose=False)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        args.func(args)
    except ManifestError as exc:
        print(json.dumps({"status": "error", **exc.as_dict()}, sort_keys=True), file=sys.stderr)
        return 1
    except (CliError, KeyError, ValueError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        print(json.dumps({"status": "error", "error": type(exc).__name__, "message": str(msg)}, sort_keys=True),
              file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Write the potentials database: CSV tables, ASCII-grid masks, GeoJSON placements."""

from __future__ import annotations

import csv
import io
import os
from pathlib import Path

from ..capacity import TurbinePlacement, placement_geojson
from ..geo import RasterMask
from ..geo.io import dump_json, write_mask
from .aggregate import PotentialRecord

POTENTIAL_COLUMNS = (
    "level",
    "region_id",
    "scenario_name",
    "technology",
    "area_km2",
    "capacity_mw",
    "density_mw_per_km2",
    "item_count",
)


def _num(v: float) -> str:
    # repr is the shortest string that round-trips, with '.' as separator
    return repr(float(v))


def records_csv(records: list[PotentialRecord]) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(POTENTIAL_COLUMNS)
    for r in sorted(records, key=PotentialRecord.sort_key):
        w.writerow([
            r.level, r.region_id, r.scenario_name, r.technology,
            _num(r.area_km2), _num(r.capacity_mw), _num(r.density_mw_per_km2), str(int(r.item_count)),
        ])
    return buf.getvalue().encode("utf-8")


def read_records_csv(path: str | Path) -> list[PotentialRecord]:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [
        PotentialRecord(
            region_id=row["region_id"],
            level=row["level"],
            scenario_name=row["scenario_name"],
            technology=row["technology"],
            area_km2=float(row["area_km2"]),
            capacity_mw=float(row["capacity_mw"]),
            density_mw_per_km2=float(row["density_mw_per_km2"]),
            item_count=int(row["item_count"]),
        )
        for row in rows
    ]


def _safe(name: str) -> str:
    return "".join(ch if ch.isalnum() or ch in "-_." else "_" for ch in name)


def export_db(
    records: list[PotentialRecord],
    out_dir: str | Path,
    masks: dict[str, RasterMask] | None = None,
    placements: dict[str, TurbinePlacement] | None = None,
) -> list[Path]:
    """Write ``potentials.csv`` plus optional geometry, returning the paths written.

    Output is byte-identical for identical inputs: records are sorted by
    (level, region_id, scenario_name) and every file is written with LF line
    endings in UTF-8.
    """
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    if not os.access(out, os.W_OK):
        raise PermissionError(f"output directory {out} is not writable")

    written = []
    path = out / "potentials.csv"
    path.write_bytes(records_csv(records))
    written.append(path)
    for name in sorted(masks or {}):
        p = out / f"eligible_{_safe(name)}.asc"
        write_mask(p, masks[name])
        written.append(p)
    for name in sorted(placements or {}):
        p = out / f"placements_{_safe(name)}.geojson"
        dump_json(placement_geojson(placements[name]), p)
        written.append(p)
    return written

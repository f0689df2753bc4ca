"""GeoJSON feature input and ESRI ASCII grid exchange."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .features import VectorFeature
from .grid import GridSpec, RasterMask

_HEADER_KEYS = ("ncols", "nrows", "xllcorner", "yllcorner", "cellsize", "nodata_value")


def features_from_geojson(data: dict) -> list[VectorFeature]:
    """Convert a FeatureCollection (already parsed) into VectorFeatures.

    ``properties.category`` becomes the category; other numeric properties
    become attributes. Non-numeric extras are dropped.
    """
    if data.get("type") != "FeatureCollection":
        raise ValueError("expected a GeoJSON FeatureCollection")
    out = []
    for i, feat in enumerate(data.get("features", [])):
        props = feat.get("properties") or {}
        geom = feat.get("geometry")
        if not geom:
            raise ValueError(f"feature {i} has no geometry")
        attrs = {
            k: float(v) for k, v in props.items()
            if k != "category" and isinstance(v, (int, float)) and not isinstance(v, bool)
        }
        out.append(VectorFeature(geom, str(props.get("category", "")), attrs))
    return out


def read_geojson(path: str | Path) -> list[VectorFeature]:
    with open(path, encoding="utf-8") as fh:
        return features_from_geojson(json.load(fh))


def features_to_geojson(features: list[VectorFeature]) -> dict:
    return {
        "type": "FeatureCollection",
        "features": [
            {
                "type": "Feature",
                "properties": {"category": f.category, **f.attributes},
                "geometry": f.geometry,
            }
            for f in features
        ],
    }


def dump_json(obj, path: str | Path) -> None:
    """Deterministic JSON writer (sorted keys, LF, trailing newline)."""
    text = json.dumps(obj, sort_keys=True, indent=1, allow_nan=False)
    Path(path).write_bytes((text + "\n").encode("utf-8"))


def read_ascii_grid(path: str | Path) -> tuple[GridSpec, np.ndarray, float | None]:
    """Read an ESRI ASCII grid.

    Returns the grid, the values as a float array (row 0 = north) and the
    NODATA value if the header declared one. Cell-center headers
    (``xllcenter``) are converted to corner form.
    """
    header = {}
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    body_start = 0
    for i, line in enumerate(lines):
        parts = line.split()
        if len(parts) == 2 and parts[0].lower() in (*_HEADER_KEYS, "xllcenter", "yllcenter"):
            header[parts[0].lower()] = float(parts[1])
            body_start = i + 1
        else:
            break
    for key in ("ncols", "nrows", "cellsize"):
        if key not in header:
            raise ValueError(f"{path}: missing header field {key!r}")
    cs = header["cellsize"]
    x0 = header["xllcorner"] if "xllcorner" in header else header["xllcenter"] - cs / 2
    y0 = header["yllcorner"] if "yllcorner" in header else header["yllcenter"] - cs / 2
    spec = GridSpec(x0, y0, cs, int(header["ncols"]), int(header["nrows"]))
    values = np.array(" ".join(lines[body_start:]).split(), dtype=float)
    if values.size != spec.n_cols * spec.n_rows:
        raise ValueError(f"{path}: expected {spec.n_cols * spec.n_rows} values, found {values.size}")
    return spec, values.reshape(spec.shape), header.get("nodata_value")


def _fmt(v: float) -> str:
    return repr(float(v)) if not float(v).is_integer() else str(int(v))


def write_ascii_grid(path: str | Path, spec: GridSpec, values: np.ndarray, nodata: float = -9999) -> None:
    values = np.asarray(values)
    lines = [
        f"ncols {spec.n_cols}",
        f"nrows {spec.n_rows}",
        f"xllcorner {_fmt(spec.origin_x)}",
        f"yllcorner {_fmt(spec.origin_y)}",
        f"cellsize {_fmt(spec.cell_size)}",
        f"NODATA_value {_fmt(nodata)}",
    ]
    if values.dtype == bool or np.issubdtype(values.dtype, np.integer):
        lines += [" ".join(str(int(v)) for v in row) for row in values]
    else:
        lines += [" ".join(_fmt(v) for v in row) for row in values]
    Path(path).write_bytes(("\n".join(lines) + "\n").encode("utf-8"))


def read_mask(path: str | Path) -> RasterMask:
    spec, values, nodata = read_ascii_grid(path)
    cells = values > 0
    if nodata is not None:
        cells &= values != nodata
    return RasterMask(spec, cells)


def write_mask(path: str | Path, mask: RasterMask) -> None:
    write_ascii_grid(path, mask.spec, mask.cells.astype(np.uint8))

"""Center-point rasterization of polygons, polylines and points.

A cell is burned when its center lies inside a polygon (even-odd rule, so
holes work), within ``width / 2`` of a polyline, or within ``cell_size / 2``
of a point. Every row is computed from the full grid's own center
coordinates, so splitting the work into row bands gives bit-identical output.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .features import InvalidGeometryError, VectorFeature
from .grid import GridSpec, RasterMask


def row_bands(n_rows: int, n_bands: int) -> list[tuple[int, int]]:
    n_bands = max(1, min(n_bands, n_rows))
    edges = np.linspace(0, n_rows, n_bands + 1).round().astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def _burn_polygon(out, rings, spec, r0, r1, ys, xs):
    edges = []
    for ring in rings:
        edges.append(np.column_stack([ring[:-1], ring[1:]]))
    e = np.concatenate(edges)
    x0, y0, x1, y1 = e[:, 0], e[:, 1], e[:, 2], e[:, 3]
    keep = y0 != y1
    x0, y0, x1, y1 = x0[keep], y0[keep], x1[keep], y1[keep]
    if x0.size == 0:
        return
    ylo = np.minimum(y0, y1)
    yhi = np.maximum(y0, y1)
    slope = (x1 - x0) / (y1 - y0)
    # rows are north->south so ys is descending
    rows = np.nonzero((ys >= ylo.min()) & (ys < yhi.max()))[0]
    for r in rows:
        if r < r0 or r >= r1:
            continue
        yc = ys[r]
        active = (ylo <= yc) & (yc < yhi)
        if not active.any():
            continue
        xi = np.sort(x0[active] + (yc - y0[active]) * slope[active])
        lo = np.searchsorted(xs, xi[0::2], side="left")
        hi = np.searchsorted(xs, xi[1::2], side="left")
        row = out[r - r0]
        for a, b in zip(lo, hi):
            if b > a:
                row[a:b] ^= True


def _window(spec, r0, r1, xmin, ymin, xmax, ymax):
    cs = spec.cell_size
    c_lo = max(0, int(np.floor((xmin - spec.origin_x) / cs - 0.5)))
    c_hi = min(spec.n_cols, int(np.ceil((xmax - spec.origin_x) / cs + 0.5)))
    # row index of y: n_rows - 0.5 - (y - oy)/cs
    r_lo = max(r0, int(np.floor(spec.n_rows - 0.5 - (ymax - spec.origin_y) / cs)))
    r_hi = min(r1, int(np.ceil(spec.n_rows - 0.5 - (ymin - spec.origin_y) / cs)) + 1)
    return r_lo, r_hi, c_lo, c_hi


def _burn_segments(out, line, half_width, spec, r0, r1, ys, xs):
    hw2 = half_width * half_width
    for (ax, ay), (bx, by) in zip(line[:-1], line[1:]):
        r_lo, r_hi, c_lo, c_hi = _window(
            spec, r0, r1, min(ax, bx) - half_width, min(ay, by) - half_width,
            max(ax, bx) + half_width, max(ay, by) + half_width,
        )
        if r_lo >= r_hi or c_lo >= c_hi:
            continue
        px = xs[c_lo:c_hi][None, :]
        py = ys[r_lo:r_hi][:, None]
        dx, dy = bx - ax, by - ay
        len2 = dx * dx + dy * dy
        if len2 == 0.0:
            t = 0.0
        else:
            t = np.clip(((px - ax) * dx + (py - ay) * dy) / len2, 0.0, 1.0)
        qx = px - (ax + t * dx)
        qy = py - (ay + t * dy)
        out[r_lo - r0:r_hi - r0, c_lo:c_hi] |= (qx * qx + qy * qy) <= hw2


def _rasterize_rows(features, spec, line_width_m, width_attribute, r0, r1) -> np.ndarray:
    out = np.zeros((r1 - r0, spec.n_cols), dtype=bool)
    ys = spec.row_centers()
    xs = spec.col_centers()
    for f in features:
        kind = f.kind
        if kind == "polygon":
            for rings in f.polygons():
                part = np.zeros_like(out)
                _burn_polygon(part, rings, spec, r0, r1, ys, xs)
                out |= part
        elif kind == "polyline":
            width = line_width_m
            if width_attribute and width_attribute in f.attributes:
                width = float(f.attributes[width_attribute])
            for line in f.lines():
                _burn_segments(out, line, width / 2.0, spec, r0, r1, ys, xs)
        else:
            for p in f.points():
                _burn_segments(out, np.array([p, p]), spec.cell_size / 2.0, spec, r0, r1, ys, xs)
    return out


def rasterize(
    features: list[VectorFeature],
    spec: GridSpec,
    line_width_m: float = 0.0,
    width_attribute: str | None = None,
    n_bands: int = 1,
) -> RasterMask:
    """Burn features into a boolean mask with the center-point rule.

    Args:
        features: polygons, polylines and points in grid coordinates.
        spec: target grid.
        line_width_m: full width applied to polylines.
        width_attribute: if given, polylines carrying this attribute use it as
            their width instead of ``line_width_m``.
        n_bands: number of row bands processed concurrently. The result does
            not depend on this value.

    Raises:
        InvalidGeometryError: for open rings or degenerate lines; the message
            names the offending feature index.
    """
    if line_width_m < 0:
        raise ValueError("line_width_m must be >= 0")
    for i, f in enumerate(features):
        f.validate(i)
        if f.kind == "polyline" and width_attribute and float(f.attributes.get(width_attribute, 0.0)) < 0:
            raise InvalidGeometryError("negative line width", i)

    bands = row_bands(spec.n_rows, n_bands)
    if len(bands) == 1:
        cells = _rasterize_rows(features, spec, line_width_m, width_attribute, 0, spec.n_rows)
    else:
        with ThreadPoolExecutor(max_workers=len(bands)) as pool:
            parts = list(pool.map(
                lambda b: _rasterize_rows(features, spec, line_width_m, width_attribute, *b), bands
            ))
        cells = np.concatenate(parts, axis=0)
    return RasterMask(spec, cells)

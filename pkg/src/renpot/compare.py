"""Agreement metrics between land-use datasets: NTA, IoU and setback sweeps."""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path

from .geo import GridSpec, RasterMask, VectorFeature, buffer_mask, filter_features, mask_area, rasterize
from .geo.grid import require_same_grid

REPORT_COLUMNS = ("category", "setback_m", "subject", "metric", "value")


def normalized_total_area(areas: dict[str, float]) -> dict[str, float]:
    """Each dataset's area divided by the largest area among them."""
    if not areas:
        raise ValueError("no datasets given")
    for name, a in areas.items():
        if a < 0:
            raise ValueError(f"negative area for {name!r}")
    top = max(areas.values())
    if top <= 0:
        raise ValueError("NTA undefined: every dataset has zero area")
    return {name: a / top for name, a in areas.items()}


def intersection_over_union(a: RasterMask, b: RasterMask) -> float:
    """Shared cells over combined cells. Two empty masks agree perfectly (1.0)."""
    require_same_grid(a, b)
    union = int((a.cells | b.cells).sum())
    if union == 0:
        return 1.0
    return int((a.cells & b.cells).sum()) / union


def pair_key(a: str, b: str) -> str:
    return f"{a}|{b}"


@dataclass
class CategoryComparison:
    category: str
    setback_m: float
    area_km2: dict[str, float]
    nta: dict[str, float]
    iou: dict[str, float]  # keyed by pair_key(a, b) with a, b in input order


@dataclass
class SetbackSweep:
    category: str
    distances: list[float]
    area_km2: dict[str, list[float]] = field(default_factory=dict)
    nta: dict[str, list[float]] = field(default_factory=dict)
    iou: dict[str, list[float]] = field(default_factory=dict)

    def at(self, i: int) -> CategoryComparison:
        return CategoryComparison(
            self.category,
            self.distances[i],
            {k: v[i] for k, v in self.area_km2.items()},
            {k: v[i] for k, v in self.nta.items()},
            {k: v[i] for k, v in self.iou.items()},
        )


def _compare_masks(masks: dict[str, RasterMask], category: str, setback_m: float) -> CategoryComparison:
    buffered = {name: buffer_mask(m, setback_m) for name, m in masks.items()}
    areas = {name: mask_area(m) for name, m in buffered.items()}
    nta = normalized_total_area(areas)
    iou = {pair_key(a, b): intersection_over_union(buffered[a], buffered[b]) for a, b in combinations(buffered, 2)}
    return CategoryComparison(category, setback_m, areas, nta, iou)


def category_masks(
    datasets: dict[str, list[VectorFeature]],
    category: str,
    spec: GridSpec,
    line_width_m: float = 0.0,
) -> dict[str, RasterMask]:
    known = {f.category for feats in datasets.values() for f in feats}
    if category not in known:
        raise KeyError(f"unknown category {category!r}")
    return {
        name: rasterize(filter_features(feats, [category]), spec, line_width_m, width_attribute="width")
        for name, feats in datasets.items()
    }


def compare_category(datasets, category: str, setback_m: float, spec: GridSpec, line_width_m: float = 0.0):
    return _compare_masks(category_masks(datasets, category, spec, line_width_m), category, setback_m)


def setback_sweep(
    datasets: dict[str, list[VectorFeature]],
    category: str,
    distances: list[float],
    spec: GridSpec,
    line_width_m: float = 0.0,
    workers: int = 1,
) -> SetbackSweep:
    """Rasterize each dataset's ``category`` features once, then buffer and
    compare at every setback distance.

    Raises:
        ValueError: fewer than two datasets or distances not strictly ascending.
        KeyError: no dataset contains ``category``.
    """
    if len(datasets) < 2:
        raise ValueError("a sweep needs at least two datasets")
    distances = [float(d) for d in distances]
    if any(b <= a for a, b in zip(distances, distances[1:])):
        raise ValueError("distances must be strictly ascending")
    masks = category_masks(datasets, category, spec, line_width_m)

    def one(d):
        return _compare_masks(masks, category, d)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, distances))
    else:
        results = [one(d) for d in distances]

    sweep = SetbackSweep(category, distances)
    for name in datasets:
        sweep.area_km2[name] = [r.area_km2[name] for r in results]
        sweep.nta[name] = [r.nta[name] for r in results]
    for a, b in combinations(datasets, 2):
        k = pair_key(a, b)
        sweep.iou[k] = [r.iou[k] for r in results]
    return sweep


def report_rows(sweeps: list[SetbackSweep]) -> list[tuple]:
    rows = []
    for s in sweeps:
        for i, d in enumerate(s.distances):
            for name in s.area_km2:
                rows.append((s.category, d, name, "area_km2", s.area_km2[name][i]))
                rows.append((s.category, d, name, "nta", s.nta[name][i]))
            for k, vals in s.iou.items():
                rows.append((s.category, d, k, "iou", vals[i]))
    return rows


def write_report(sweeps: list[SetbackSweep], path: str | Path) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    for row in report_rows(sweeps):
        w.writerow([row[0], repr(row[1]), row[2], row[3], repr(row[4])])
    Path(path).write_bytes(buf.getvalue().encode("utf-8"))

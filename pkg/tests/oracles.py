"""Brute-force reference implementations. Deliberately slow and independent of renpot."""

from __future__ import annotations

import math

import numpy as np


def centers(shape, cell_size=10.0, origin=(0.0, 0.0)):
    """(x, y) of each cell center, row 0 at the north edge."""
    n_rows, n_cols = shape
    xs = np.array([origin[0] + (c + 0.5) * cell_size for c in range(n_cols)])
    ys = np.array([origin[1] + (n_rows - r - 0.5) * cell_size for r in range(n_rows)])
    return xs, ys


def all_pairs_distance(cells: np.ndarray, cell_size: float) -> np.ndarray:
    src = np.argwhere(cells)
    out = np.full(cells.shape, np.inf)
    if len(src) == 0:
        return out
    for r in range(cells.shape[0]):
        for c in range(cells.shape[1]):
            d = np.sqrt(((src[:, 0] - r) * cell_size) ** 2 + ((src[:, 1] - c) * cell_size) ** 2)
            out[r, c] = d.min()
    return out


def brute_buffer(cells: np.ndarray, cell_size: float, setback: float) -> np.ndarray:
    return all_pairs_distance(cells, cell_size) <= setback


def flood_fill_labels(cells: np.ndarray, connectivity: int) -> np.ndarray:
    """Labels assigned in raster-scan order of each component's first cell."""
    if connectivity == 4:
        nbrs = [(-1, 0), (1, 0), (0, -1), (0, 1)]
    else:
        nbrs = [(dr, dc) for dr in (-1, 0, 1) for dc in (-1, 0, 1) if (dr, dc) != (0, 0)]
    labels = np.zeros(cells.shape, dtype=int)
    n = 0
    rows, cols = cells.shape
    for r in range(rows):
        for c in range(cols):
            if cells[r, c] and labels[r, c] == 0:
                n += 1
                stack = [(r, c)]
                labels[r, c] = n
                while stack:
                    i, j = stack.pop()
                    for dr, dc in nbrs:
                        a, b = i + dr, j + dc
                        if 0 <= a < rows and 0 <= b < cols and cells[a, b] and labels[a, b] == 0:
                            labels[a, b] = n
                            stack.append((a, b))
    return labels


def point_segment_distance(px, py, ax, ay, bx, by) -> float:
    vx, vy = bx - ax, by - ay
    wx, wy = px - ax, py - ay
    seg2 = vx * vx + vy * vy
    t = 0.0 if seg2 == 0 else max(0.0, min(1.0, (wx * vx + wy * vy) / seg2))
    return math.hypot(px - (ax + t * vx), py - (ay + t * vy))


_EXACT_TRIG = {0: (0.0, 1.0), 90: (1.0, 0.0), 180: (0.0, -1.0), 270: (-1.0, 0.0)}


def greedy_placement(cells, cell_size, diameter, along=8.0, cross=4.0, direction_deg=0.0, origin=(0.0, 0.0)):
    """Visit every cell row-major from the north-west; accept when far enough from all placed turbines."""
    d = direction_deg % 360
    s, c_ = _EXACT_TRIG.get(d, (math.sin(math.radians(d)), math.cos(math.radians(d))))
    xs, ys = centers(cells.shape, cell_size, origin)
    placed = []
    for r in range(cells.shape[0]):
        for c in range(cells.shape[1]):
            if not cells[r, c]:
                continue
            x, y = xs[c], ys[r]
            ok = True
            for px, py in placed:
                dx, dy = x - px, y - py
                u = dx * s + dy * c_
                v = dx * c_ - dy * s
                if (u / (along * diameter)) ** 2 + (v / (cross * diameter)) ** 2 < 1.0:
                    ok = False
                    break
            if ok:
                placed.append((x, y))
    return placed


def pairwise_ok(positions, diameter, along=8.0, cross=4.0, direction_deg=0.0, slack=1e-9) -> bool:
    t = math.radians(direction_deg)
    s, c_ = math.sin(t), math.cos(t)
    for i in range(len(positions)):
        for j in range(i + 1, len(positions)):
            dx = positions[i][0] - positions[j][0]
            dy = positions[i][1] - positions[j][1]
            u = dx * s + dy * c_
            v = dx * c_ - dy * s
            if (u / (along * diameter)) ** 2 + (v / (cross * diameter)) ** 2 < 1.0 - slack:
                return False
    return True


def random_mask(rng, max_side=64, density=None):
    h = int(rng.integers(1, max_side + 1))
    w = int(rng.integers(1, max_side + 1))
    p = rng.uniform(0.01, 0.5) if density is None else density
    return rng.random((h, w)) < p

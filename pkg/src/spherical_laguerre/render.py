"""Orthographic hemisphere rendering of tessellations to SVG.

Two views side by side: the front hemisphere (z >= 0) seen from +z and the
rear hemisphere (z <= 0) seen from -z, with tessellation edges drawn as
sampled great-circle arcs and optional generator circles overlaid. Output is
plain SVG text with fixed number formatting, so identical input yields byte
identical files.
"""

from __future__ import annotations

import numpy as np

from .diagram import GeneratorSet
from .sphere import sample_spherical_circle, slerp
from .tessellation import Tessellation

VIEW_RADIUS = 200.0
MARGIN = 20.0
ARC_SEGMENTS = 32


def _project(points: np.ndarray, front: bool, cx: float, cy: float) -> list[tuple[float, float]]:
    sign = 1.0 if front else -1.0
    return [(cx + sign * VIEW_RADIUS * p[0], cy - VIEW_RADIUS * p[1]) for p in points]


def _split_by_hemisphere(points: np.ndarray) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Split a sampled curve into polylines for the front and rear views.

    Segments crossing z = 0 are cut at the interpolated crossing so both
    views meet cleanly at the silhouette.
    """
    front_runs: list[list[np.ndarray]] = []
    rear_runs: list[list[np.ndarray]] = []

    def push(runs: list[list[np.ndarray]], pt: np.ndarray, new_run: bool) -> None:
        if new_run or not runs:
            runs.append([pt])
        else:
            runs[-1].append(pt)

    prev = None
    for pt in points:
        if prev is None:
            push(front_runs if pt[2] >= 0 else rear_runs, pt, True)
            prev = pt
            continue
        if prev[2] >= 0 and pt[2] >= 0:
            push(front_runs, pt, False)
        elif prev[2] <= 0 and pt[2] <= 0:
            push(rear_runs, pt, False)
        else:
            s = prev[2] / (prev[2] - pt[2])
            mid = prev + s * (pt - prev)
            mid = mid / np.linalg.norm(mid)
            if prev[2] >= 0:
                push(front_runs, mid, False)
                push(rear_runs, mid, True)
                push(rear_runs, pt, False)
            else:
                push(rear_runs, mid, False)
                push(front_runs, mid, True)
                push(front_runs, pt, False)
        prev = pt

    keep = lambda runs: [np.array(r) for r in runs if len(r) >= 2]
    return keep(front_runs), keep(rear_runs)


def _polyline(points2d: list[tuple[float, float]], stroke: str, width: float) -> str:
    coords = " ".join(f"{x:.4f},{y:.4f}" for x, y in points2d)
    return (f'<polyline points="{coords}" fill="none" stroke="{stroke}" '
            f'stroke-width="{width:.2f}"/>')


def build_svg(t: Tessellation, generators: GeneratorSet | None = None) -> str:
    width = 4 * MARGIN + 4 * VIEW_RADIUS
    height = 2 * MARGIN + 2 * VIEW_RADIUS
    cy = MARGIN + VIEW_RADIUS
    cx_front = MARGIN + VIEW_RADIUS
    cx_rear = 3 * MARGIN + 3 * VIEW_RADIUS

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" '
        f'height="{height:.0f}" viewBox="0 0 {width:.0f} {height:.0f}">',
        f'<rect width="{width:.0f}" height="{height:.0f}" fill="white"/>',
    ]
    for cx, label in ((cx_front, "front (z &#8805; 0)"), (cx_rear, "rear (z &#8804; 0)")):
        parts.append(f'<circle cx="{cx:.1f}" cy="{cy:.1f}" r="{VIEW_RADIUS:.1f}" '
                     'fill="none" stroke="#888888" stroke-width="1.00"/>')
        parts.append(f'<text x="{cx:.1f}" y="{height - 5:.1f}" text-anchor="middle" '
                     f'font-size="12" fill="#444444">{label}</text>')

    edge_lines: list[str] = []
    for a, b in sorted({tuple(sorted(k)) for k in t.edge_keys()}):
        samples = np.array([
            slerp(t.vertices[a], t.vertices[b], s / ARC_SEGMENTS)
            for s in range(ARC_SEGMENTS + 1)
        ])
        front, rear = _split_by_hemisphere(samples)
        for run in front:
            edge_lines.append(_polyline(_project(run, True, cx_front, cy), "#000000", 1.2))
        for run in rear:
            edge_lines.append(_polyline(_project(run, False, cx_rear, cy), "#000000", 1.2))
    parts.extend(edge_lines)

    if generators is not None:
        for c in generators.circles:
            ring = sample_spherical_circle(c, 64)
            ring = np.vstack([ring, ring[:1]])
            front, rear = _split_by_hemisphere(ring)
            for run in front:
                parts.append(_polyline(_project(run, True, cx_front, cy), "#cc3333", 0.8))
            for run in rear:
                parts.append(_polyline(_project(run, False, cx_rear, cy), "#cc3333", 0.8))

    parts.append("</svg>")
    return "\n".join(parts) + "\n"

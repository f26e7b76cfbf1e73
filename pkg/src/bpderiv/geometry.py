"""Exact planar geometry helpers: circle/rectangle overlap areas and a
reproducible 64-bit pseudo-random generator.

The overlap routines are closed-form (segment integrals of the circle),
so cell-by-ball areas sum to the exact ball area up to float rounding.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "corner_area",
    "circle_rect_overlap",
    "disk_lens_area",
    "SplitMix64",
]


def _sqrt_arc_primitive(t: np.ndarray, r: float) -> np.ndarray:
    # antiderivative of sqrt(r^2 - t^2), clamped to [-r, r]
    t = np.clip(t, -r, r)
    return 0.5 * (t * np.sqrt(np.maximum(r * r - t * t, 0.0))
                  + r * r * np.arcsin(np.clip(t / r, -1.0, 1.0)))


def corner_area(x, y, r: float):
    """Area of {X <= x, Y <= y} inside the disk of radius r centered at 0.

    Vectorized over x and y. Integrates the chord length
    clamp(x, -w, w) + w with w(Y) = sqrt(r^2 - Y^2) over Y in [-r, min(y, r)],
    split at Y* = sqrt(r^2 - x^2) where the clamp changes branch.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    W = lambda t: _sqrt_arc_primitive(t, r)
    yy = np.minimum(y, r)
    ystar = np.where(np.abs(x) < r, np.sqrt(np.maximum(r * r - x * x, 0.0)), 0.0)

    b1 = np.minimum(yy, -ystar)
    seg1 = np.where(b1 > -r, 2.0 * (W(b1) - W(-r)), 0.0)
    a2 = np.maximum(-r, -ystar)
    b2 = np.minimum(yy, ystar)
    seg2 = np.where(b2 > a2, x * (b2 - a2) + (W(b2) - W(a2)), 0.0)
    seg3 = np.where(yy > ystar, 2.0 * (W(yy) - W(ystar)), 0.0)

    out = np.where(x >= 0, seg1 + seg2 + seg3, seg2)
    out = np.where((y <= -r) | (x <= -r), 0.0, out)
    return out if out.shape else float(out)


def circle_rect_overlap(cx, cy, r: float, x0, x1, y0, y1):
    """Exact area of [x0,x1]x[y0,y1] inside the disk of radius r at (cx, cy).

    Vectorized over rectangle bounds; inclusion-exclusion of corner_area.
    """
    return (corner_area(np.subtract(x1, cx), np.subtract(y1, cy), r)
            - corner_area(np.subtract(x0, cx), np.subtract(y1, cy), r)
            - corner_area(np.subtract(x1, cx), np.subtract(y0, cy), r)
            + corner_area(np.subtract(x0, cx), np.subtract(y0, cy), r))


def disk_lens_area(d: float, r1: float, r2: float) -> float:
    """Area of the intersection of two disks whose centers are d apart."""
    if d >= r1 + r2:
        return 0.0
    if d <= abs(r1 - r2):
        rm = min(r1, r2)
        return math.pi * rm * rm
    c1 = (d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1)
    c2 = (d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2)
    a1 = r1 * r1 * math.acos(max(-1.0, min(1.0, c1)))
    a2 = r2 * r2 * math.acos(max(-1.0, min(1.0, c2)))
    s = (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2)
    return a1 + a2 - 0.5 * math.sqrt(max(s, 0.0))


_MASK64 = (1 << 64) - 1


class SplitMix64:
    """SplitMix64 generator: fixed algorithm, reproducible across platforms.

    Part of the public region-construction contract so that seeded
    geometries are bit-identical everywhere.
    """

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return (z ^ (z >> 31)) & _MASK64

    def uniform(self) -> float:
        """Uniform double in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

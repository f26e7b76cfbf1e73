"""Midpoint quadrature over region cells for smooth and weakly singular
integrands: plain cell sums, the Cauchy transform, the Newtonian potential
and the |z - x|^{-q} weight integrals.

Singular-cell rule: the cell containing the evaluation point is replaced
by the disk of equal area centered at the point. Over that disk the Cauchy
kernel integrates to zero by symmetry, and the |.|^{-q} kernel has the
exact value 2 pi r^(2-q) / (2-q). Both replacements are first-order
accurate for q <= 1 and of order 2-q for 1 < q < 2; the midpoint rule is
kept deliberately simple (documented upgrade path: exact near-field cell
integrals).

All reductions run in a fixed cell order with compensated block summation,
so results are bit-identical run to run and across worker counts.
"""

from __future__ import annotations

import concurrent.futures
import math

import numpy as np
from scipy.signal import fftconvolve

from .errors import DivergentIntegralError
from .region import Region

__all__ = [
    "fixed_order_sum",
    "conjugate_exponent",
    "WeightFunction",
    "integrate",
    "cauchy_transform",
    "newtonian_potential",
    "singular_weight_integral",
    "singular_cell_integral",
    "weight_integral_grid",
    "newtonian_potential_grid",
    "save_weight",
    "load_weight",
]

_BLOCK = 1 << 16


def fixed_order_sum(values: np.ndarray, workers: int = 1):
    """Deterministic compensated sum of a 1-D array.

    The array is cut into fixed-size blocks; each block is summed by
    numpy's pairwise reduction and block results are combined in block
    order with Kahan compensation. Block boundaries do not depend on the
    worker count, so any worker count gives bit-identical output.
    """
    values = np.ascontiguousarray(values)
    n = values.shape[0]
    if n == 0:
        return values.dtype.type(0)
    blocks = range(0, n, _BLOCK)
    if workers > 1 and n > _BLOCK:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(
                lambda start: np.sum(values[start:start + _BLOCK]), blocks))
    else:
        partials = [np.sum(values[start:start + _BLOCK]) for start in blocks]
    total = partials[0] * 0
    comp = total
    for part in partials:
        y = part - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


def conjugate_exponent(p: float) -> float:
    """q = p/(p-1) for p > 2; the dual exponent then lies in (1, 2)."""
    if p <= 2:
        raise ValueError("p must exceed 2 (the q in (1,2) range requires it)")
    return p / (p - 1.0)


class WeightFunction:
    """An L^q density on a region, sampled at filled-cell centers.

    Parameters
    ----------
    region : Region
    values : complex array, one value per filled cell (row-major order)
    q : float
        Exponent class the weight is asserted to live in; must lie in
        (1, 2) unless exploratory_q=True, which tags the weight so reports
        can mark the run as outside the supported range.
    form : str, optional
        Label of a closed-form family the samples came from.
    """

    __slots__ = ("region", "values", "q", "form", "exploratory")

    def __init__(self, region: Region, values, q: float, form: str | None = None,
                 exploratory_q: bool = False):
        values = np.asarray(values, dtype=complex)
        if values.shape != (region.filled_count,):
            raise ValueError("need exactly one value per filled cell")
        if not np.all(np.isfinite(values)):
            raise ValueError("weight values must be finite")
        if not 1.0 < q < 2.0:
            if not exploratory_q:
                raise ValueError("q must lie strictly between 1 and 2 "
                                 "(pass exploratory_q=True to override)")
        values = values.copy()
        values.setflags(write=False)
        self.region = region
        self.values = values
        self.q = float(q)
        self.form = form
        self.exploratory = not 1.0 < q < 2.0

    @classmethod
    def from_callable(cls, region: Region, fn, q: float, form: str | None = None,
                      exploratory_q: bool = False) -> "WeightFunction":
        return cls(region, fn(region.filled_centers), q, form, exploratory_q)

    @classmethod
    def constant(cls, region: Region, value, q: float) -> "WeightFunction":
        vals = np.full(region.filled_count, complex(value))
        return cls(region, vals, q, form="constant")

    def lq_norm(self, workers: int = 1) -> float:
        """(sum |w|^q area)^(1/q) over the region."""
        total = fixed_order_sum(
            np.abs(self.values) ** self.q * self.region.cell_area, workers)
        return float(total) ** (1.0 / self.q)

    def scaled(self, factor) -> "WeightFunction":
        return WeightFunction(self.region, self.values * complex(factor), self.q,
                              self.form, exploratory_q=self.exploratory)

    def __repr__(self):
        tag = f", form={self.form!r}" if self.form else ""
        return f"WeightFunction(q={self.q}{tag}, cells={len(self.values)})"


def _as_cell_values(region: Region, f) -> np.ndarray:
    if callable(f):
        return np.asarray(f(region.filled_centers), dtype=complex)
    arr = np.asarray(f, dtype=complex)
    if arr.shape != (region.filled_count,):
        raise ValueError("cell function must supply one value per filled cell")
    return arr


def integrate(w: WeightFunction, f, workers: int = 1) -> complex:
    """sum f(c) w(c) cell_area over filled cells, in fixed cell order."""
    fv = _as_cell_values(w.region, f)
    return complex(fixed_order_sum(fv * w.values * w.region.cell_area, workers))


def _singular_mask(region: Region, x: complex) -> np.ndarray:
    """Filled cells whose closed square contains x (edge/corner ties
    select every touching cell, which keeps the rule symmetric)."""
    half = region.cell_width / 2.0
    d = region.filled_centers - x
    tol = half * 1e-12
    return (np.abs(d.real) <= half + tol) & (np.abs(d.imag) <= half + tol)


def cauchy_transform(w: WeightFunction, x: complex, workers: int = 1) -> complex:
    """integral of w(z)/(z - x) dA; the cell(s) containing x contribute 0.

    Over the equal-area disk centered at x the kernel's angular average
    vanishes, which is the principal-value reading of the singular cell.
    """
    x = complex(x)
    c = w.region.filled_centers
    sing = _singular_mask(w.region, x)
    denom = np.where(sing, 1.0, c - x)
    vals = np.where(sing, 0.0, w.values / denom) * w.region.cell_area
    return complex(fixed_order_sum(vals, workers))


def singular_cell_integral(q: float, r: float) -> float:
    """Exact integral of |z - x|^{-q} over a disk of radius r centered at x:
    2 pi r^(2-q) / (2-q). Diverges for q >= 2."""
    if q >= 2:
        raise DivergentIntegralError(f"|z-x|^-q is not integrable for q={q}")
    if q <= 0:
        raise ValueError("q must be positive")
    if r < 0:
        raise ValueError("r must be nonnegative")
    if r == 0:
        return 0.0
    return 2.0 * math.pi * r ** (2.0 - q) / (2.0 - q)


def _singular_contribution(w_abs_q: np.ndarray, region: Region,
                           sing: np.ndarray, q: float) -> float:
    """Closed-form contribution of the cell(s) containing the target point.

    Ties at edges/corners are treated as one union of cells: the frozen
    |w|^q is averaged and the equal-area radius uses the union's area.
    """
    count = int(np.count_nonzero(sing))
    if count == 0:
        return 0.0
    r_eq = math.sqrt(count * region.cell_area / math.pi)
    return float(np.mean(w_abs_q[sing])) * singular_cell_integral(q, r_eq)


def newtonian_potential(w: WeightFunction, x: complex, workers: int = 1) -> float:
    """integral of |w(z)| / |z - x| dA >= 0 (the q=1 singular kernel)."""
    x = complex(x)
    c = w.region.filled_centers
    aw = np.abs(w.values)
    sing = _singular_mask(w.region, x)
    dist = np.where(sing, 1.0, np.abs(c - x))
    vals = np.where(sing, 0.0, aw / dist) * w.region.cell_area
    total = float(fixed_order_sum(vals, workers).real)
    return total + _singular_contribution(aw, w.region, sing, 1.0)


def singular_weight_integral(w: WeightFunction, x: complex, q: float,
                             workers: int = 1) -> float:
    """integral of |w(z)|^q / |z - x|^q dA >= 0.

    The singular cell freezes |w|^q at its sampled value and uses the
    closed-form disk integral.
    """
    if not 0.0 < q < 2.0:
        raise ValueError("q must lie in (0, 2)")
    x = complex(x)
    c = w.region.filled_centers
    awq = np.abs(w.values) ** q
    sing = _singular_mask(w.region, x)
    dist = np.where(sing, 1.0, np.abs(c - x))
    vals = np.where(sing, 0.0, awq / dist ** q) * w.region.cell_area
    total = float(fixed_order_sum(vals, workers).real)
    return total + _singular_contribution(awq, w.region, sing, q)


# -- bulk evaluation on the whole grid ---------------------------------------

def _offset_kernel(region: Region, q: float) -> np.ndarray:
    """Midpoint kernel |offset|^{-q} * cell_area on the (2n-1)^2 offset grid,
    with the exact equal-area-disk value at offset zero."""
    n = region.resolution
    h = region.cell_width
    offs = np.arange(-(n - 1), n, dtype=float) * h
    ox, oy = np.meshgrid(offs, offs)
    dist = np.hypot(ox, oy)
    center = dist == 0.0
    kernel = np.where(center, 1.0, dist) ** (-q) * region.cell_area
    kernel[center] = singular_cell_integral(q, h / math.sqrt(math.pi))
    return kernel


def _convolve_grid(region: Region, source: np.ndarray, q: float) -> np.ndarray:
    n = region.resolution
    kernel = _offset_kernel(region, q)
    full = fftconvolve(source, kernel, mode="full")
    return full[n - 1:2 * n - 1, n - 1:2 * n - 1]


def weight_integral_grid(w: WeightFunction, q: float) -> np.ndarray:
    """singular_weight_integral(w, x, q) for x at every grid cell center,
    computed with one FFT convolution.

    Matches the direct per-point sums to rounding; the direct routine
    stays available as the independent cross-check.
    """
    if not 0.0 < q < 2.0:
        raise ValueError("q must lie in (0, 2)")
    region = w.region
    src = np.zeros((region.resolution, region.resolution))
    src[region.filled] = np.abs(w.values) ** q
    return _convolve_grid(region, src, q)


def newtonian_potential_grid(w: WeightFunction) -> np.ndarray:
    """newtonian_potential(w, x) for x at every grid cell center (FFT path)."""
    region = w.region
    src = np.zeros((region.resolution, region.resolution))
    src[region.filled] = np.abs(w.values)
    return _convolve_grid(region, src, 1.0)


# -- weight file format -------------------------------------------------------

def weight_to_text(w: WeightFunction) -> str:
    lines = [
        "WGT1",
        f"region {w.region.checksum()}",
        f"q {w.q!r}",
    ]
    lines.extend(f"{v.real!r} {v.imag!r}" for v in w.values)
    return "\n".join(lines) + "\n"


def weight_from_text(text: str, region: Region) -> WeightFunction:
    lines = text.splitlines()
    if not lines or lines[0].strip() != "WGT1":
        raise ValueError("not a WGT1 weight file")
    checksum = lines[1].split()[1]
    if checksum != region.checksum():
        raise ValueError("weight file references a different region")
    q = float(lines[2].split()[1])
    vals = []
    for line in lines[3:3 + region.filled_count]:
        re, im = line.split()
        vals.append(complex(float(re), float(im)))
    if len(vals) != region.filled_count:
        raise ValueError("weight file cell count does not match the region")
    return WeightFunction(region, vals, q, exploratory_q=not 1.0 < q < 2.0)


def save_weight(w: WeightFunction, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(weight_to_text(w))


def load_weight(path, region: Region) -> WeightFunction:
    with open(path, "r", encoding="ascii") as fh:
        return weight_from_text(fh.read(), region)

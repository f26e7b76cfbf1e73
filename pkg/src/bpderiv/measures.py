"""Representing-measure algebra for bounded point derivations.

A PointFunctional realizes the order-t derivation at x0 as integration
against a weight k_t: apply(F, f) ~ f^(t)(x0) for rational f with poles
off the region. The module provides the order-lowering reduction
k_m = (m!/t!) (z-x0)^(t-m) k_t, the transplant of an order-0 weight from
x0 to a nearby point x via k_x = (z-x0) k / (c (z-x)), and a battery-based
verifier that measures how well a weight actually represents.

Closed-form disk weights k_t = (t+1)! conj(z-c)^t / (pi R^(2t+2)) ship as
the concrete test family; they are verified by the battery, not assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalConsistencyError, TransplantHypothesisError
from .quadrature import (WeightFunction, cauchy_transform, integrate,
                         newtonian_potential, weight_from_text, weight_to_text)
from .rational import RationalFunction, assert_poles_off
from .region import Region

__all__ = [
    "PointFunctional",
    "TransplantResult",
    "RepresentingReport",
    "disk_weight",
    "disk_functional",
    "apply_functional",
    "wilken_reduce",
    "bishop_transplant",
    "verify_representing",
    "default_battery",
    "save_functional",
    "load_functional",
]

DEFAULT_TRANSPLANT_DELTA = 0.1


@dataclass(frozen=True)
class PointFunctional:
    """Order-t point derivation at x0 realized by a weight function."""

    x0: complex
    t: int
    weight: WeightFunction
    q_norm: float = field(init=False)

    def __post_init__(self):
        if self.t < 0:
            raise ValueError("order t must be nonnegative")
        object.__setattr__(self, "x0", complex(self.x0))
        object.__setattr__(self, "q_norm", self.weight.lq_norm())

    @property
    def region(self) -> Region:
        return self.weight.region


@dataclass(frozen=True)
class TransplantResult:
    """Weight representing evaluation at x, derived from one at x0."""

    x: complex
    c: complex
    weight: WeightFunction


def disk_weight(region: Region, center: complex, radius: float, t: int,
                q: float) -> WeightFunction:
    """Closed-form disk weight k_t = (t+1)! conj(z-center)^t / (pi R^(2t+2)).

    Integrating z^n conj(z-c)^t over the disk kills every monomial except
    n = t, which picks up pi R^(2t+2)/(t+1); the normalization therefore
    reproduces t-th derivatives at the center for analytic integrands.
    """
    center = complex(center)
    scale = math.factorial(t + 1) / (math.pi * radius ** (2 * t + 2))
    fn = lambda z: scale * np.conj(z - center) ** t
    return WeightFunction.from_callable(region, fn, q, form=f"disk_t{t}")


def disk_functional(region: Region, center: complex, radius: float, t: int,
                    q: float) -> PointFunctional:
    return PointFunctional(center, t, disk_weight(region, center, radius, t, q))


def apply_functional(F: PointFunctional, f: RationalFunction,
                     workers: int = 1) -> complex:
    """Quadrature value of integral f k_t dA; approximates f^(t)(x0) when
    the weight genuinely represents the order-t derivation."""
    assert_poles_off(f, F.region)
    return integrate(F.weight, f, workers=workers)


def wilken_reduce(F: PointFunctional, m: int) -> PointFunctional:
    """Order-lowering reduction k_m = (m!/t!) (z - x0)^(t-m) k_t.

    m = t returns the input weight values bit-identically.
    """
    if not 0 <= m <= F.t:
        raise ValueError(f"m must lie in [0, {F.t}]")
    if m == F.t:
        values = F.weight.values.copy()
    else:
        factor = (math.factorial(m) / math.factorial(F.t)) \
            * (F.region.filled_centers - F.x0) ** (F.t - m)
        values = F.weight.values * factor
    reduced = WeightFunction(F.region, values, F.weight.q,
                             form=None if F.weight.form is None
                             else f"{F.weight.form}->m{m}",
                             exploratory_q=F.weight.exploratory)
    return PointFunctional(F.x0, m, reduced)


def bishop_transplant(F: PointFunctional, x: complex,
                      delta: float = DEFAULT_TRANSPLANT_DELTA) -> TransplantResult:
    """Transplant an order-0 representing weight from x0 to x.

    Requires the smallness hypothesis |x - x0| * potential(k)(x) < delta < 1.
    Then c = 1 + (x - x0) cauchy(k)(x) satisfies 1-delta <= |c| <= 1+delta
    and k_x = (z - x0) k / (c (z - x)) represents evaluation at x. The cell
    containing x takes the value 0 (its Cauchy-kernel principal value).
    """
    if F.t != 0:
        raise ValueError("transplant starts from an order-0 functional")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    x = complex(x)
    region = F.region
    shift = x - F.x0
    if shift != 0:
        potential = newtonian_potential(F.weight, x)
        if abs(shift) * potential >= delta:
            raise TransplantHypothesisError(
                f"|x-x0| * potential = {abs(shift) * potential:.6g} "
                f"is not below delta = {delta}")
    c = 1.0 + shift * cauchy_transform(F.weight, x)
    if abs(c) < 1.0 - delta or abs(c) > 1.0 + delta:
        raise NumericalConsistencyError(
            f"|c| = {abs(c):.6g} escaped [1-delta, 1+delta]")
    if shift == 0:
        values = F.weight.values / c
    else:
        centers = region.filled_centers
        half = region.cell_width / 2.0
        d = centers - x
        tol = half * 1e-12
        sing = (np.abs(d.real) <= half + tol) & (np.abs(d.imag) <= half + tol)
        denom = np.where(sing, 1.0, d)
        values = np.where(sing, 0.0,
                          (centers - F.x0) * F.weight.values / (c * denom))
    weight = WeightFunction(region, values, F.weight.q, form="transplant",
                            exploratory_q=F.weight.exploratory)
    return TransplantResult(x, complex(c), weight)


def default_battery(region: Region):
    """Seven-function battery mixing polynomials and poles.

    The pole anchor sits outside the region's bounding square so every
    member is admissible on the region.
    """
    a = region.origin + region.side * (1.25 + 1.25j)
    battery = [
        RationalFunction.constant(1.0),
        RationalFunction.monomial(1),
        RationalFunction.monomial(2),
        RationalFunction.monomial(3),
        RationalFunction.simple_pole(a),
        RationalFunction.simple_pole(a, order=2),
        RationalFunction.simple_pole(a.conjugate()),
    ]
    labels = ["1", "z", "z^2", "z^3", "1/(z-a)", "1/(z-a)^2", "1/(z-abar)"]
    return battery, labels


@dataclass(frozen=True)
class RepresentingReport:
    """Per-function errors of a representing-property check."""

    entries: tuple  # (label, expected, computed, abs_error)
    max_error: float

    def to_csv(self) -> str:
        lines = ["function_id,expected,computed,abs_error"]
        for label, expected, computed, err in self.entries:
            lines.append(f"{label},{_fmt_complex(expected)},"
                         f"{_fmt_complex(computed)},{err!r}")
        return "\n".join(lines) + "\n"


def _fmt_complex(z: complex) -> str:
    sign = "+" if z.imag >= 0 else "-"
    return f"{z.real!r}{sign}{abs(z.imag)!r}i"


def verify_representing(F: PointFunctional, battery, labels=None,
                        workers: int = 1) -> RepresentingReport:
    """Compare apply_functional against analytic t-th derivatives at x0.

    The analytic side comes from exact term-wise differentiation, so it is
    independent of the quadrature being checked.
    """
    battery = list(battery)
    if not battery:
        raise ValueError("battery must be nonempty")
    if labels is None:
        labels = [f"f{i}" for i in range(len(battery))]
    entries = []
    max_err = 0.0
    for label, f in zip(labels, battery):
        expected = f.derivative(F.t).eval(F.x0)
        computed = apply_functional(F, f, workers=workers)
        err = abs(computed - expected)
        entries.append((label, complex(expected), complex(computed), float(err)))
        max_err = max(max_err, err)
    return RepresentingReport(tuple(entries), float(max_err))


def functional_to_text(F: PointFunctional) -> str:
    head = (f"FNC1\nx0 {F.x0.real!r} {F.x0.imag!r}\nt {F.t}\n")
    return head + weight_to_text(F.weight)


def functional_from_text(text: str, region: Region) -> PointFunctional:
    lines = text.splitlines()
    if not lines or lines[0].strip() != "FNC1":
        raise ValueError("not an FNC1 functional file")
    _, re, im = lines[1].split()
    x0 = complex(float(re), float(im))
    t = int(lines[2].split()[1])
    weight = weight_from_text("\n".join(lines[3:]), region)
    return PointFunctional(x0, t, weight)


def save_functional(F: PointFunctional, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(functional_to_text(F))


def load_functional(path, region: Region) -> PointFunctional:
    with open(path, "r", encoding="ascii") as fh:
        return functional_from_text(fh.read(), region)

"""Higher-order difference quotients and the kernel factorization identity.

The t-th order quotient at x0 and step h is
    h^-t sum_{s=0..t} (-1)^(t-s) binom(t,s) f(x0 + s h),
with exact integer binomials. Steps h are complex: limits are taken
through sets in the plane, so schedules include complex rays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NodeEvaluationError, PoleEvaluationError, SingularPointError
from .region import Region

__all__ = [
    "DiffQuotient",
    "diff_quotient",
    "compose_check",
    "kernel_factorization",
    "convergence_table",
    "ConvergenceTable",
    "CellSampledFunction",
]

# Exact in 64-bit arithmetic and far beyond any experiment here.
MAX_ORDER = 30


@dataclass(frozen=True)
class DiffQuotient:
    x0: complex
    h: complex
    t: int
    value: complex


class CellSampledFunction:
    """Evaluable backed by per-cell samples with nearest-cell lookup.

    Evaluation snaps the point to the nearest grid cell center; querying
    outside the grid or on an unfilled cell raises NodeEvaluationError.
    """

    def __init__(self, region: Region, values):
        values = np.asarray(values, dtype=complex)
        if values.shape != (region.filled_count,):
            raise ValueError("need exactly one value per filled cell")
        self.region = region
        self.values = values

    def __call__(self, z: complex) -> complex:
        region = self.region
        col = round((z.real - region.origin.real) / region.cell_width - 0.5)
        row = round((z.imag - region.origin.imag) / region.cell_width - 0.5)
        if not (0 <= row < region.resolution and 0 <= col < region.resolution):
            raise NodeEvaluationError(f"point {z} is outside the grid")
        idx = region.filled_index[row, col]
        if idx < 0:
            raise NodeEvaluationError(f"nearest cell to {z} is not in the region")
        return complex(self.values[idx])


def _eval_node(f, z: complex) -> complex:
    try:
        return complex(f(z))
    except (PoleEvaluationError, NodeEvaluationError) as exc:
        raise NodeEvaluationError(f"cannot evaluate node {z}: {exc}") from exc


def diff_quotient(f, x0: complex, h: complex, t: int) -> DiffQuotient:
    """Difference quotient of order t at x0 with complex step h.

    f must be evaluable at x0 + s h for s = 0..t.
    """
    if t < 1:
        raise ValueError("order t must be a positive integer")
    if t > MAX_ORDER:
        raise ValueError(f"order t is capped at {MAX_ORDER}")
    h = complex(h)
    if h == 0:
        raise ValueError("step h must be nonzero")
    x0 = complex(x0)
    acc = 0j
    for s in range(t + 1):
        term = math.comb(t, s) * _eval_node(f, x0 + s * h)
        acc += term if (t - s) % 2 == 0 else -term
    return DiffQuotient(x0, h, t, acc / h ** t)


def compose_check(f, x0: complex, h: complex, t: int) -> float:
    """|Delta_h^1(Delta_h^(t-1) f)(x0) - Delta_h^t f(x0)|.

    The outer first-order quotient acts on u -> Delta_h^(t-1) f(u); the
    identity is exact algebra, so the discrepancy is pure rounding.
    """
    if t < 2:
        raise ValueError("compose_check needs t >= 2")
    inner = lambda u: diff_quotient(f, u, h, t - 1).value
    composed = diff_quotient(inner, x0, h, 1).value
    direct = diff_quotient(f, x0, h, t).value
    return abs(composed - direct)


def kernel_factorization(x: complex, x0: complex, z: complex, t: int):
    """Split 1/(z - x) into t geometric summands plus a remainder:

        sum_{m=1..t} (x-x0)^(m-1)/(z-x0)^m  +  (x-x0)^t/((z-x)(z-x0)^t).

    Returns (summands, remainder); their total equals 1/(z - x).
    """
    if t < 1:
        raise ValueError("t must be a positive integer")
    x, x0, z = complex(x), complex(x0), complex(z)
    if z == x:
        raise SingularPointError("z coincides with x")
    if z == x0:
        raise SingularPointError("z coincides with x0")
    terms = [(x - x0) ** (m - 1) / (z - x0) ** m for m in range(1, t + 1)]
    remainder = (x - x0) ** t / ((z - x) * (z - x0) ** t)
    return terms, remainder


@dataclass(frozen=True)
class ConvergenceTable:
    """Rows (h, quotient value, |value - reference|) in schedule order."""

    x0: complex
    t: int
    reference: complex
    rows: tuple  # (h, value, abs_error)

    def to_csv(self) -> str:
        lines = ["h_re,h_im,value_re,value_im,abs_error"]
        for h, value, err in self.rows:
            lines.append(f"{h.real!r},{h.imag!r},{value.real!r},"
                         f"{value.imag!r},{err!r}")
        return "\n".join(lines) + "\n"


def convergence_table(f, x0: complex, t: int, h_schedule,
                      reference: complex) -> ConvergenceTable:
    """Tabulate Delta_h^t f(x0) against a reference value for each h.

    No monotonicity is claimed; rounding eventually dominates small h.
    """
    rows = []
    for h in h_schedule:
        value = diff_quotient(f, x0, h, t).value
        rows.append((complex(h), value, abs(value - reference)))
    return ConvergenceTable(complex(x0), t, complex(reference), tuple(rows))

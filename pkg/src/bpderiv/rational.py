"""Exact rational functions in partial-fraction form.

A function is stored as a sum of pole terms a_m / (z - p)^m plus a
polynomial, which keeps differentiation closed-form and pole locations
explicit. Addition merges pole lists by exact location equality; there is
no root finding or simplification.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import PoleEvaluationError, PoleOnSetError

__all__ = ["RationalFunction", "assert_poles_off", "lp_norm"]


class RationalFunction:
    """sum_j sum_m coeffs_j[m-1] / (z - pole_j)^m  +  poly(z).

    Parameters
    ----------
    poles : iterable of (location, coefficients)
        coefficients[m-1] multiplies 1/(z - location)^m; locations must be
        pairwise distinct and each coefficient list nonempty.
    poly : iterable of complex
        Polynomial coefficients in ascending degree.
    """

    __slots__ = ("poles", "poly")

    def __init__(self, poles=(), poly=()):
        cleaned = []
        seen = set()
        for location, coeffs in poles:
            location = complex(location)
            coeffs = tuple(complex(c) for c in coeffs)
            if not coeffs:
                raise ValueError("each pole needs at least one coefficient")
            if location in seen:
                raise ValueError(f"duplicate pole location {location}")
            seen.add(location)
            cleaned.append((location, coeffs))
        self.poles = tuple(cleaned)
        poly = tuple(complex(c) for c in poly)
        while poly and poly[-1] == 0:
            poly = poly[:-1]
        self.poly = poly

    # -- constructors -------------------------------------------------------

    @classmethod
    def constant(cls, value) -> "RationalFunction":
        return cls((), (value,))

    @classmethod
    def monomial(cls, degree: int, coefficient=1.0) -> "RationalFunction":
        if degree < 0:
            raise ValueError("degree must be nonnegative")
        return cls((), (0.0,) * degree + (coefficient,))

    @classmethod
    def simple_pole(cls, location, coefficient=1.0, order: int = 1) -> "RationalFunction":
        if order < 1:
            raise ValueError("order must be at least 1")
        coeffs = [0.0] * order
        coeffs[order - 1] = coefficient
        return cls(((location, coeffs),))

    # -- evaluation ----------------------------------------------------------

    def pole_locations(self) -> tuple:
        return tuple(p for p, _ in self.poles)

    def __call__(self, z):
        return self.eval(z)

    def eval(self, z):
        """Evaluate at a complex scalar or ndarray of points."""
        z = np.asarray(z, dtype=complex)
        scalar = z.ndim == 0
        for location, _ in self.poles:
            if np.any(z == location):
                raise PoleEvaluationError(f"evaluation at pole {location}")
        out = np.zeros(z.shape, dtype=complex)
        if self.poly:
            out += np.polyval(list(reversed(self.poly)), z)
        for location, coeffs in self.poles:
            inv = 1.0 / (z - location)
            term = np.zeros_like(out)
            # Horner in 1/(z - p): a_1/(z-p) + ... + a_m/(z-p)^m
            for c in reversed(coeffs):
                term = (term + c) * inv
            out += term
        return complex(out) if scalar else out

    # -- calculus ------------------------------------------------------------

    def derivative(self, t: int = 1) -> "RationalFunction":
        """Exact t-th derivative in the same representation; t=0 is identity."""
        if t < 0:
            raise ValueError("derivative order must be nonnegative")
        f = self
        for _ in range(t):
            f = f._derivative_once()
        return f

    def _derivative_once(self) -> "RationalFunction":
        poles = []
        for location, coeffs in self.poles:
            # d/dz a/(z-p)^m = -m a/(z-p)^(m+1)
            new = [0.0] * (len(coeffs) + 1)
            for m, a in enumerate(coeffs, start=1):
                new[m] = -m * a
            poles.append((location, new))
        poly = tuple(k * c for k, c in enumerate(self.poly))[1:]
        return RationalFunction(poles, poly)

    def taylor_correct(self, x0: complex, values) -> "RationalFunction":
        """Subtract the polynomial sum_m values[m]/m! (z - x0)^m.

        The result has the same pole terms; only the polynomial part moves.
        """
        x0 = complex(x0)
        correction = np.zeros(max(len(values), len(self.poly), 1), dtype=complex)
        for m, d in enumerate(values):
            if d == 0:
                continue
            scale = complex(d) / math.factorial(m)
            # (z - x0)^m expanded into ascending powers of z
            for k in range(m + 1):
                correction[k] += scale * math.comb(m, k) * (-x0) ** (m - k)
        poly = np.zeros_like(correction)
        poly[:len(self.poly)] = self.poly
        return RationalFunction(self.poles, tuple(poly - correction))

    # -- algebra -------------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, RationalFunction):
            return NotImplemented
        merged = {loc: list(coeffs) for loc, coeffs in self.poles}
        for location, coeffs in other.poles:
            if location in merged:
                mine = merged[location]
                if len(coeffs) > len(mine):
                    mine.extend([0.0] * (len(coeffs) - len(mine)))
                for i, c in enumerate(coeffs):
                    mine[i] += c
            else:
                merged[location] = list(coeffs)
        n = max(len(self.poly), len(other.poly))
        poly = [0.0] * n
        for i, c in enumerate(self.poly):
            poly[i] += c
        for i, c in enumerate(other.poly):
            poly[i] += c
        poles = [(loc, coeffs) for loc, coeffs in merged.items()
                 if any(c != 0 for c in coeffs)]
        return RationalFunction(poles, poly)

    def __neg__(self):
        return self * (-1.0)

    def __sub__(self, other):
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self + (-other)

    def __mul__(self, scalar):
        if isinstance(scalar, RationalFunction):
            return NotImplemented
        s = complex(scalar)
        poles = [(loc, [s * c for c in coeffs]) for loc, coeffs in self.poles]
        return RationalFunction(poles, [s * c for c in self.poly])

    __rmul__ = __mul__

    def __eq__(self, other):
        return (isinstance(other, RationalFunction)
                and self.poles == other.poles and self.poly == other.poly)

    def __repr__(self):
        return f"RationalFunction(poles={self.poles!r}, poly={self.poly!r})"

    # -- serialization ---------------------------------------------------------

    def to_text(self) -> str:
        """`pole re im order c1re c1im ...` lines plus one `poly ...` line."""
        lines = []
        for location, coeffs in self.poles:
            parts = [f"pole {location.real!r} {location.imag!r} {len(coeffs)}"]
            parts.extend(f"{c.real!r} {c.imag!r}" for c in coeffs)
            lines.append(" ".join(parts))
        parts = ["poly"]
        parts.extend(f"{c.real!r} {c.imag!r}" for c in self.poly)
        lines.append(" ".join(parts))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RationalFunction":
        poles = []
        poly = ()
        for line in text.splitlines():
            fields = line.split()
            if not fields:
                continue
            if fields[0] == "pole":
                location = complex(float(fields[1]), float(fields[2]))
                order = int(fields[3])
                vals = [float(v) for v in fields[4:4 + 2 * order]]
                coeffs = [complex(vals[2 * i], vals[2 * i + 1]) for i in range(order)]
                poles.append((location, coeffs))
            elif fields[0] == "poly":
                vals = [float(v) for v in fields[1:]]
                poly = tuple(complex(vals[2 * i], vals[2 * i + 1])
                             for i in range(len(vals) // 2))
            else:
                raise ValueError(f"unknown line in function file: {fields[0]}")
        return cls(poles, poly)


def assert_poles_off(f: RationalFunction, region, guard: float | None = None) -> None:
    """Raise PoleOnSetError if any pole lies in a filled cell or within the
    guard distance of a filled cell center.

    Midpoint quadrature is meaningless near a pole, so the default guard is
    one cell diagonal; pass guard=0.0 to check strict cell membership only.
    """
    if guard is None:
        guard = region.cell_width * math.sqrt(2.0)
    centers = region.filled_centers
    half = region.cell_width / 2.0
    for p in f.pole_locations():
        d = centers - p
        if np.any((np.abs(d.real) <= half) & (np.abs(d.imag) <= half)):
            raise PoleOnSetError(f"pole {p} lies inside the region")
        if guard > 0 and np.min(np.abs(d)) < guard:
            raise PoleOnSetError(
                f"pole {p} is within one cell diagonal of the region")


def lp_norm(f: RationalFunction, region, p: float, guard: float | None = None,
            workers: int = 1) -> float:
    """Discrete L^p norm (sum over filled cells of |f|^p times cell area)^(1/p).

    Rejects functions with poles on or hazardously near the region.
    """
    if p < 1:
        raise ValueError("p must be at least 1")
    assert_poles_off(f, region, guard)
    from .quadrature import fixed_order_sum  # local import to avoid a cycle

    vals = np.abs(f.eval(region.filled_centers)) ** p * region.cell_area
    total = fixed_order_sum(vals, workers=workers)
    return float(total.real) ** (1.0 / p)

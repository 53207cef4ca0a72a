"""Diagnostics for the Siegel disk of ``F(z) = rho z + z^2``, ``rho = exp(2 pi i theta)``.

Nothing here proves anything about the boundary of the disk. The functions
produce numerical evidence: the linearizing power series and its root-test
radius, boundedness of the critical orbit, and agreement of the circular
order of that orbit with the rigid rotation by ``theta``.
"""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .circle import _first_order_violation
from .exceptions import EscapeError, SmallDivisorError
from .numkit import RotationTarget, is_bounded_type

SMALL_DIVISOR_GUARD = 1e-12


def _target(theta) -> RotationTarget:
    t = theta if isinstance(theta, RotationTarget) else RotationTarget.from_value(float(theta))
    t.require_irrational()
    return t


@dataclass(frozen=True)
class LinearizerSeries:
    """Coefficients ``h_1 .. h_m`` of the linearizer, with ``coeffs[k-1] = h_k``."""

    rho: complex
    coeffs: np.ndarray
    radius_estimate: float

    @property
    def order(self) -> int:
        return len(self.coeffs)

    def __call__(self, w):
        w = np.asarray(w, dtype=complex)
        acc = np.zeros_like(w)
        for c in self.coeffs[::-1]:
            acc = (acc + c) * w
        return acc

    def functional_residual(self, w):
        """``|h(rho w) - F(h(w))|`` at sample points."""
        hw = self(w)
        return np.abs(self(self.rho * np.asarray(w)) - (self.rho * hw + hw * hw))

    def to_csv(self, fh):
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["n", "re", "im"])
        for n, c in enumerate(self.coeffs, start=1):
            wr.writerow([n, f"{c.real:.17g}", f"{c.imag:.17g}"])


def linearizer(theta, m: int) -> LinearizerSeries:
    """Power series ``h`` with ``h(rho w) = rho h(w) + h(w)^2`` and ``h'(0) = 1``.

    Matching the coefficient of ``w^n`` gives
    ``(rho^n - rho) h_n = sum_{k=1}^{n-1} h_k h_{n-k}``. The radius estimate
    is the root test taken over the last half of the coefficients.

    Raises
    ------
    SmallDivisorError
        if ``|rho^n - rho|`` falls below 1e-12 for some ``n <= m``.
    """
    if m < 2:
        raise ValueError("order m must be >= 2")
    t = _target(theta)
    rho = t.rho
    h = np.zeros(m + 1, dtype=complex)
    h[1] = 1.0
    for n in range(2, m + 1):
        den = rho ** n - rho
        if abs(den) < SMALL_DIVISOR_GUARD:
            raise SmallDivisorError(f"small denominator |rho^{n} - rho| = {abs(den):.3g}", depth=n)
        h[n] = np.dot(h[1:n], h[n - 1:0:-1]) / den
    tail = np.arange(max(2, m // 2), m + 1)
    mags = np.abs(h[tail])
    with np.errstate(divide="ignore"):
        roots = np.exp(np.log(mags) / tail)
    limsup = float(np.max(roots[np.isfinite(roots)]))
    return LinearizerSeries(rho, h[1:].copy(), 1.0 / limsup)


@dataclass(frozen=True)
class CriticalOrbit:
    theta: RotationTarget
    orbit: np.ndarray
    max_abs: float
    tail_min_abs: float

    def __len__(self):
        return len(self.orbit)

    def to_csv(self, fh):
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["n", "re", "im"])
        for n, z in enumerate(self.orbit):
            wr.writerow([n, f"{z.real:.17g}", f"{z.imag:.17g}"])


def critical_orbit(theta, n: int) -> CriticalOrbit:
    """Orbit of the critical point ``-rho/2`` of ``rho z + z^2``, ``n`` iterates.

    ``tail_min_abs`` is the smallest modulus over the second half of the
    orbit; a positive value means no visible accumulation at the fixed point.

    Raises
    ------
    EscapeError
        if some iterate reaches ``|z| >= 2`` (escape is then certain).
    ValueError
        if ``theta`` carries a type bound its partial quotients violate.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    t = _target(theta)
    if t.type_bound is None:
        warnings.warn("rotation number has no declared type bound; boundedness is not asserted",
                      stacklevel=2)
    elif not is_bounded_type(t, t.type_bound, len(t.cf_terms)):
        raise ValueError(f"partial quotients exceed the declared bound {t.type_bound}")
    rho = t.rho
    orbit = np.empty(n + 1, dtype=complex)
    z = -rho / 2
    orbit[0] = z
    for k in range(1, n + 1):
        z = rho * z + z * z
        if not abs(z) < 2.0:
            raise EscapeError(f"critical orbit escaped at iterate {k}", index=k)
        orbit[k] = z
    mods = np.abs(orbit)
    return CriticalOrbit(t, orbit, float(mods.max()), float(mods[n // 2:].min()))


def _traversal_angles(points: np.ndarray) -> np.ndarray | None:
    """Position along the closed curve through ``points`` (fraction of a turn).

    Links every point to its two nearest neighbours; if that graph is a
    single cycle, walks it counterclockwise. Returns None otherwise.
    """
    n = len(points)
    tree = cKDTree(np.column_stack([points.real, points.imag]))
    _, nb = tree.query(np.column_stack([points.real, points.imag]), k=3)
    nb = nb[:, 1:]
    for i in range(n):
        for j in nb[i]:
            if i not in nb[j]:
                return None
    order = [0]
    prev, cur = -1, 0
    for _ in range(n - 1):
        a, b = nb[cur]
        nxt = a if a != prev else b
        if nxt == 0:
            return None
        prev, cur = cur, nxt
        order.append(cur)
    if 0 not in nb[cur]:
        return None
    order = np.array(order)
    poly = points[order]
    area = np.sum(poly.real * np.roll(poly.imag, -1) - np.roll(poly.real, -1) * poly.imag)
    if area < 0:
        order = np.concatenate([order[:1], order[1:][::-1]])
    pos = np.empty(n)
    pos[order] = np.arange(n) / n
    return pos


def boundary_rotation_check(orbit, theta, N: int, center: complex = 0.0):
    """Does the circular order of the first ``N`` orbit points match ``{k theta mod 1}``?

    Angles are read as arguments seen from ``center``. When that order
    disagrees (the curve may not be star-shaped about ``center``), the order
    along the nearest-neighbour cycle through the points is tried instead.

    Returns True or False, or None when the points are too close to order.
    """
    t = _target(theta)
    z = np.asarray(orbit.orbit if isinstance(orbit, CriticalOrbit) else orbit, dtype=complex)
    if N > len(z):
        raise ValueError(f"N = {N} exceeds the orbit length {len(z)}")
    if N < 3:
        raise ValueError("N must be >= 3")
    z = z[:N]
    y = np.mod(np.arange(N) * t.value, 1.0)
    x = np.mod(np.angle(z - center) / (2 * math.pi), 1.0)
    gaps = np.diff(np.sort(x))
    if gaps.size and gaps.min() < 1e-12:
        return None
    if _first_order_violation(x, y) is None:
        return True
    pos = _traversal_angles(z)
    if pos is None:
        return False
    return _first_order_violation(pos, y) is None

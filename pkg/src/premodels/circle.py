"""Circle homeomorphisms: the two Blaschke maps, rotation numbers, the phase
solver for the rotated cubic Blaschke family and its conjugacy to a rigid rotation.

Angles are measured in turns, so the unit circle is identified with R/Z and
a circle map is handled through a degree-one lift ``F: R -> R``.
"""
from __future__ import annotations

import bisect
import csv
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numba
import numpy as np

from .exceptions import NonMonotoneLiftError, OrderViolation, PrecisionError
from .numkit import DEFAULT_TOL, RotationTarget

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# the two explicit Blaschke fractions
# ---------------------------------------------------------------------------

def blaschke_B(z):
    """Cubic Blaschke fraction ``z^2 (z - 3) / (1 - 3 z)`` with a degree-3 critical point at 1."""
    z = np.asarray(z, dtype=complex)
    den = 1.0 - 3.0 * z
    if np.any(den == 0):
        raise ZeroDivisionError("blaschke_B has a pole at z = 1/3")
    out = z * z * (z - 3.0) / den
    return out if out.ndim else complex(out)


def blaschke_B_prime(z):
    z = np.asarray(z, dtype=complex)
    out = -6.0 * z * (z - 1.0) ** 2 / (1.0 - 3.0 * z) ** 2
    return out if out.ndim else complex(out)


def blaschke_P(z):
    """Quadratic Blaschke fraction ``(3 z^2 + 1) / (z^2 + 3)``, parabolic at ``z = 1``."""
    z = np.asarray(z, dtype=complex)
    z2 = z * z
    den = z2 + 3.0
    if np.any(den == 0):
        raise ZeroDivisionError("blaschke_P has poles at z = +-i sqrt(3)")
    out = (3.0 * z2 + 1.0) / den
    return out if out.ndim else complex(out)


def blaschke_P_prime(z):
    z = np.asarray(z, dtype=complex)
    out = 16.0 * z / (z * z + 3.0) ** 2
    return out if out.ndim else complex(out)


@dataclass(frozen=True)
class BlaschkeParams:
    a: float
    lam: complex

    def __post_init__(self):
        if not self.a > 1:
            raise ValueError("need a > 1")
        if abs(abs(self.lam) - 1.0) > DEFAULT_TOL.abs_tol:
            raise ValueError("lambda must have modulus 1")

    def __call__(self, z):
        """Evaluate ``lam z^2 (z - a) / (1 - a z)`` (``a`` is real)."""
        z = np.asarray(z, dtype=complex)
        out = self.lam * z * z * (z - self.a) / (1.0 - self.a * z)
        return out if out.ndim else complex(out)


def derive_blaschke_params() -> BlaschkeParams:
    """Fix ``a`` and ``lam`` so that ``z = 1`` is a fixed critical point of local degree 3.

    Clearing denominators in the logarithmic derivative of
    ``lam z^2 (z-a)/(1-a z)`` gives the critical polynomial
    ``-2a z^2 + (3 + a^2) z - 2a``. It has a double root at 1 exactly when
    ``a^2 - 4a + 3 = 0``; the root with ``a > 1`` is kept. The fixed-point
    condition then pins ``lam``.
    """
    # roots of a^2 - 4a + 3, larger one by the quadratic formula
    disc = math.sqrt(4.0 * 4.0 - 4.0 * 3.0)
    a = (4.0 + disc) / 2.0
    # lam * 1 * (1 - a) / (1 - a) = 1
    lam = complex(1.0 / ((1.0 - a) / (1.0 - a)))
    return BlaschkeParams(a, lam)


# ---------------------------------------------------------------------------
# circle lifts
# ---------------------------------------------------------------------------

@numba.njit(cache=True, nogil=True)
def _btau_step(x, tau):
    s = math.sin(TWO_PI * x)
    c = math.cos(TWO_PI * x)
    return tau + x + math.atan2(-s, 3.0 - c) / math.pi


@numba.njit(cache=True, nogil=True)
def _btau_orbit(tau, x0, n):
    # integer part kept apart so the fractional part never loses precision
    out = np.empty(n + 1)
    frac = x0 - math.floor(x0)
    whole = x0 - frac
    out[0] = x0
    for k in range(1, n + 1):
        y = _btau_step(frac, tau)
        fl = math.floor(y)
        frac = y - fl
        whole += fl
        out[k] = whole + frac
    return out


@numba.njit(cache=True, nogil=True)
def _btau_displacement(tau, x0, n):
    frac = x0 - math.floor(x0)
    whole = 0.0
    for _ in range(n):
        y = _btau_step(frac, tau)
        fl = math.floor(y)
        frac = y - fl
        whole += fl
    return whole + frac - (x0 - math.floor(x0))


class CircleMapLift:
    """A degree-one lift of a circle homeomorphism.

    Parameters
    ----------
    eval : callable
        Vectorised lift ``R -> R``.
    critical_angles : sequence of float
        Angles (in turns, in ``[0, 1)``) of the critical points on the circle.
    label : str
    orbit : callable, optional
        Fast ``(x0, n) -> array`` returning ``F^k(x0)`` for ``k = 0..n``.
    """

    def __init__(self, eval: Callable, critical_angles: Sequence[float] = (), label: str = "",
                 orbit: Callable | None = None, displacement: Callable | None = None):
        self.eval = eval
        self.critical_angles = tuple(float(c) % 1.0 for c in critical_angles)
        self.label = label
        self._orbit = orbit
        self._displacement = displacement
        self._validated = False

    def __call__(self, x):
        return self.eval(x)

    def __repr__(self):
        return f"CircleMapLift({self.label!r}, critical_angles={self.critical_angles})"

    def validate(self, samples: int = 4096, tol: float = DEFAULT_TOL.abs_tol):
        """Check degree one and monotonicity on a grid; raise :class:`NonMonotoneLiftError`."""
        if self._validated:
            return
        x = np.linspace(0.0, 1.0, samples, endpoint=False)
        fx = np.asarray(self.eval(x), dtype=float)
        shift = np.asarray(self.eval(x + 1.0), dtype=float) - fx - 1.0
        if np.max(np.abs(shift)) > tol:
            raise NonMonotoneLiftError(f"{self.label}: lift is not degree one "
                                       f"(defect {np.max(np.abs(shift)):.3g})")
        steps = np.diff(np.append(fx, fx[0] + 1.0))
        if np.min(steps) < -tol:
            k = int(np.argmin(steps))
            raise NonMonotoneLiftError(f"{self.label}: lift decreases near x = {x[k]:.6f}")
        self._validated = True

    def orbit(self, x0: float, n: int) -> np.ndarray:
        """Lifted orbit ``[x0, F(x0), ..., F^n(x0)]``."""
        if self._orbit is not None:
            return np.asarray(self._orbit(float(x0), int(n)))
        out = np.empty(n + 1)
        x = float(x0)
        out[0] = x
        for k in range(1, n + 1):
            x = float(self.eval(x))
            out[k] = x
        return out

    def displacement(self, x0: float, n: int) -> float:
        """``F^n(x0) - x0``."""
        if self._displacement is not None:
            return float(self._displacement(float(x0), int(n)))
        o = self.orbit(x0, n)
        return float(o[-1] - o[0])


def rotation_lift(theta: float) -> CircleMapLift:
    """Lift ``x -> x + theta`` of the rigid rotation."""
    theta = float(theta)
    return CircleMapLift(lambda x: np.asarray(x, dtype=float) + theta, (0.0,),
                         label=f"rotation({theta!r})",
                         orbit=lambda x0, n: x0 + theta * np.arange(n + 1),
                         displacement=lambda x0, n: n * theta)


def lift_of_B_tau(tau: float) -> CircleMapLift:
    """Lift of ``e^{2 pi i tau} B`` restricted to the unit circle.

    On ``|z| = 1`` one has ``B(z) = z (z - 3)^2 / |z - 3|^2``, which gives the
    closed form ``x + tau + atan2(-sin 2 pi x, 3 - cos 2 pi x) / pi``. The
    branch is continuous because ``3 - cos`` never vanishes, and it sends 0
    to ``tau``.
    """
    tau = float(tau)

    def ev(x):
        x = np.asarray(x, dtype=float)
        return tau + x + np.arctan2(-np.sin(TWO_PI * x), 3.0 - np.cos(TWO_PI * x)) / math.pi

    return CircleMapLift(ev, (0.0,), label=f"B_tau(tau={tau!r})",
                         orbit=lambda x0, n: _btau_orbit(tau, x0, n),
                         displacement=lambda x0, n: _btau_displacement(tau, x0, n))


def rotation_number(F: CircleMapLift, x0: float = 0.0, n: int = 10_000):
    """Birkhoff estimate ``(F^n(x0) - x0) / n`` and its a-priori error bound ``1/n``."""
    if n < 100:
        raise ValueError("n must be at least 100")
    F.validate()
    return F.displacement(x0, n) / n, 1.0 / n


# ---------------------------------------------------------------------------
# phase solver
# ---------------------------------------------------------------------------

MAX_ORBIT = 20_000_000


def _first_discrepancy(orbit: np.ndarray, x_c: float, theta: float) -> int:
    """Signed (1-based) index of the first ``n`` with ``floor(F^n x_c - x_c) != floor(n theta)``.

    Positive means the orbit is ahead of the rotation, negative behind, 0 none.
    """
    n = np.arange(len(orbit))
    d = np.floor(orbit - x_c) - np.floor(n * theta)
    nz = np.flatnonzero(d)
    if nz.size == 0:
        return 0
    k = int(nz[0])
    return k if d[k] > 0 else -k


def _as_target(theta) -> RotationTarget:
    if isinstance(theta, RotationTarget):
        return theta
    return RotationTarget.from_value(float(theta))


def solve_tau(theta, tol: float = 1e-6, family: Callable[[float], CircleMapLift] = lift_of_B_tau,
              max_iter: int = 60, max_orbit: int = MAX_ORBIT) -> float:
    """Phase ``tau`` in ``[0, 1)`` at which ``family(tau)`` has rotation number ``theta``.

    Bisection on the orbit combinatorics of the critical angle: with
    ``L = ceil(2/tol)``, a phase is accepted once ``floor(F^n x_c - x_c)``
    agrees with ``floor(n theta)`` for every ``n <= L``, which forces
    ``|rho - theta| < 2/L <= tol``. The first disagreement tells on which side
    of the target the phase lies, so plateaus of the response curve need no
    special treatment.

    Raises
    ------
    RationalInputError
        for a rational ``theta`` (the solution is then an interval).
    PrecisionError
        if ``L`` exceeds the orbit budget, or bisection collapses before
        certification.
    """
    target = _as_target(theta)
    target.require_irrational()
    th = target.value
    L = math.ceil(2.0 / tol)
    if L > max_orbit:
        raise PrecisionError(f"tol={tol:g} needs orbits of length {L}; the budget of {max_orbit} "
                             f"only supports tol >= {2.0 / max_orbit:.3g}")
    lo, hi = 0.0, 1.0
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        F = family(mid)
        x_c = F.critical_angles[0] if F.critical_angles else 0.0
        d = _first_discrepancy(F.orbit(x_c, L), x_c, th)
        if d == 0:
            return mid
        if d > 0:
            hi = mid
        else:
            lo = mid
    raise PrecisionError(f"bisection collapsed to [{lo!r}, {hi!r}] without certifying tol={tol:g}")


# ---------------------------------------------------------------------------
# conjugacy to the rigid rotation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConjugacyTable:
    """Critical orbit angles ``x`` paired with rotation orbit angles ``y = n theta mod 1``."""

    x: np.ndarray
    y: np.ndarray
    theta: RotationTarget

    def __len__(self):
        return len(self.x)

    @property
    def pairs(self) -> np.ndarray:
        return np.column_stack([self.x, self.y])

    def to_csv(self, fh):
        """Write ``n,x,y`` rows with 17 significant digits to an open text file."""
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "x", "y"])
        for n, (a, b) in enumerate(zip(self.x, self.y)):
            w.writerow([n, f"{a:.17g}", f"{b:.17g}"])


def _first_order_violation(x: np.ndarray, y: np.ndarray) -> int | None:
    """First index whose insertion breaks the common circular order, or None."""
    ys: list[float] = [y[0]]
    idx: list[int] = [0]
    for n in range(1, len(x)):
        pos = bisect.bisect(ys, y[n])
        m = len(ys)
        prev_i, next_i = idx[(pos - 1) % m], idx[pos % m]
        # x[n] must lie on the positively oriented arc from x[prev] to x[next]
        a = (x[n] - x[prev_i]) % 1.0
        b = (x[next_i] - x[prev_i]) % 1.0
        if m == 1:
            b = 1.0
        if not 0.0 < a < b:
            return n
        ys.insert(pos, y[n])
        idx.insert(pos, n)
    return None


def conjugacy_to_rotation(F: CircleMapLift, theta, N: int) -> ConjugacyTable:
    """Pair the critical orbit of ``F`` with the rotation orbit of 0 and check circular order.

    Raises :class:`OrderViolation` naming the first orbit index that breaks the
    order, which usually means a wrong phase or an orbit too long for the
    accuracy of the phase.
    """
    target = _as_target(theta)
    if len(F.critical_angles) != 1:
        raise ValueError("conjugacy normalisation needs exactly one critical angle")
    x_c = F.critical_angles[0]
    x = np.mod(F.orbit(x_c, N - 1), 1.0)
    y = np.mod(np.arange(N) * target.value, 1.0)
    bad = _first_order_violation(x, y)
    if bad is not None:
        raise OrderViolation(f"circular order of the critical orbit differs from the rotation "
                             f"orbit at index {bad}", index=bad)
    return ConjugacyTable(x, y, target)


def _monotone_lift_of_table(table: ConjugacyTable):
    order = np.argsort(table.x, kind="stable")
    xs = table.x[order]
    ys = table.y[order].copy()
    # y follows x in the same circular order: unwrap to an increasing sequence
    ys = ys[0] + np.mod(ys - ys[0], 1.0)
    xs_ext = np.concatenate([xs - 1.0, xs, xs + 1.0])
    ys_ext = np.concatenate([ys - 1.0, ys, ys + 1.0])
    return xs_ext, ys_ext


def qs_constant_estimate(table: ConjugacyTable, scales: Sequence[float],
                         samples: int = 4096) -> float:
    """Largest quasisymmetry ratio of the interpolated conjugacy over a grid and the given scales.

    The conjugacy is interpolated linearly between orbit samples (a monotone
    interpolant, so the order information is preserved exactly). The
    returned value is a lower estimate for the true constant.
    """
    scales = np.asarray(list(scales), dtype=float)
    if scales.size == 0:
        raise ValueError("need at least one scale")
    floor = 3.0 / len(table)
    if np.any(scales < floor) or np.any(scales >= 1.0):
        raise ValueError(f"scales must lie in [{floor:.3g}, 1) for a table of {len(table)} points")
    xs, ys = _monotone_lift_of_table(table)
    grid = np.linspace(0.0, 1.0, samples, endpoint=False)
    eta = lambda t: np.interp(t, xs, ys)
    e0 = eta(grid)
    c = 1.0
    for h in scales:
        fwd = eta(grid + h) - e0
        bwd = e0 - eta(grid - h)
        if np.any(fwd <= 0) or np.any(bwd <= 0):
            raise PrecisionError(f"interpolated conjugacy is flat at scale {h:g}")
        r = fwd / bwd
        c = max(c, float(np.max(np.maximum(r, 1.0 / r))))
    return c

"""Lavaurs maps, horn maps, their end multipliers and the phase that puts a
Siegel disk of prescribed rotation number at the upper end.

A horn map here is ``h_sigma(w) = sigma + phi_div(psi_plus(w))`` on the
repelling cylinder. Every critical value of ``phi_div o psi_plus`` is an
integer under the chosen normalisation, so the critical values of
``h_sigma`` all lie in ``sigma + Z``.
"""
from __future__ import annotations

import cmath
import csv
import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from . import _kernels as K
from .exceptions import ConvergenceError, InconclusiveClassification, OutsideDomain
from .fatou import FatouAtlas, Unknown, blaschke_parabolic, build_atlas
from .numkit import RotationTarget, theta_value

__all__ = [
    "Phase", "HornEval", "make_horn", "horn_map", "horn_array", "lavaurs_g", "lavaurs_L",
    "end_constant", "end_multiplier", "solve_sigma", "Escaping", "NonEscaping",
    "julia_lavaurs_classify", "upper_critical_point", "siegel_orbit_horn", "blaschke_horn",
    "blaschke_atlas", "horn_derivative", "lavaurs_shift", "outside_samples", "orbit_to_csv",
]


@dataclass(frozen=True)
class Phase:
    sigma: complex

    def __complex__(self):
        return complex(self.sigma)


def _sigma(s) -> complex:
    return complex(s.sigma) if isinstance(s, Phase) else complex(s)


@dataclass(eq=False)
class HornEval:
    """Horn map ``h_sigma`` of an atlas; critical data are filled in on demand."""

    atlas: FatouAtlas
    phase: Phase
    crit_value_v: complex | None = None
    upper_crit_w: complex | None = None
    _end_cache: dict = field(default_factory=dict, repr=False)

    @property
    def sigma(self) -> complex:
        return complex(self.phase.sigma)

    def __call__(self, w):
        return horn_map(self, w)


def make_horn(atlas: FatouAtlas, sigma=0.0) -> HornEval:
    return HornEval(atlas, Phase(_sigma(sigma)))


def _horn_raw(atlas: FatouAtlas, w: complex):
    p = atlas.parent
    return K.horn_point(p.kind, p.ups, complex(w), *atlas.horn_args())


def horn_map(horn: HornEval, w) -> complex:
    """``h_sigma(w)``; raises :class:`OutsideDomain` or :class:`InconclusiveClassification`."""
    st, val = _horn_raw(horn.atlas, w)
    if st == K.INTERIOR:
        return complex(val) + horn.sigma
    if st == K.UNKNOWN:
        raise InconclusiveClassification(f"iteration budget exhausted at w = {w}", point=w)
    raise OutsideDomain(f"w = {w} is outside the domain of the horn map", point=w)


def horn_array(horn: HornEval, ws):
    """Vectorised horn map; returns ``(status, values)`` with kernel status codes."""
    atlas = horn.atlas
    p = atlas.parent
    flat = np.ascontiguousarray(np.asarray(ws, dtype=complex)).ravel()
    st = np.empty(flat.size, dtype=np.int64)
    val = np.empty(flat.size, dtype=complex)
    K.horn_grid(p.kind, p.ups, flat, *atlas.horn_args(), st, val)
    val = val + horn.sigma
    return st.reshape(np.shape(ws)), val.reshape(np.shape(ws))


def horn_derivative(horn: HornEval, w, radius: float = 1e-2, n: int = 16, order: int = 1):
    """Derivative of the horn map by the trapezoid rule on a small circle (Cauchy formula)."""
    t = np.exp(2j * math.pi * np.arange(n) / n)
    vals = np.array([horn_map(horn, w + radius * e) for e in t])
    return complex(math.factorial(order) * np.mean(vals * t ** (-order)) / radius ** order)


# ---------------------------------------------------------------------------
# Lavaurs maps
# ---------------------------------------------------------------------------

def lavaurs_g(atlas: FatouAtlas, sigma, z) -> complex:
    """``psi_plus(phi_div(z) + sigma)`` on the interior of the filled Julia set."""
    return atlas.psi_plus(atlas.phi_div(z) + _sigma(sigma))


def lavaurs_L(atlas: FatouAtlas, sigma, z) -> complex:
    """Lavaurs map using the repelling axis paired with the basin of ``z``."""
    p = atlas.parent
    i = atlas.basin_of(z)
    w = atlas.phi_minus(z, i) + _sigma(sigma)
    return atlas.psi_plus(w, int(p.pairing[i]))


def lavaurs_shift(atlas: FatouAtlas, z) -> int:
    """Number ``k`` of map steps from the basin axis of ``z`` to the target axis."""
    return int(atlas.tsteps[atlas.basin_of(z)])


# ---------------------------------------------------------------------------
# ends of the cylinder
# ---------------------------------------------------------------------------

def end_constant(atlas: FatouAtlas, side: str = "upper", x0: float = 0.0, Y0: float = 4.0,
                 Ymax: float = 64.0, tol: float = 1e-10) -> complex:
    """``lim (h_0(w) - w)`` as ``Im w -> +inf`` (upper) or ``-inf`` (lower).

    Evaluated at heights ``Y`` and ``2Y`` with ``Y`` doubled until the two
    agree within ``tol``.
    """
    sgn = 1.0 if side == "upper" else -1.0
    if side not in ("upper", "lower"):
        raise ValueError("side must be 'upper' or 'lower'")
    h0 = make_horn(atlas, 0.0)

    def c_at(Y):
        w = complex(x0, sgn * Y)
        return horn_map(h0, w) - w

    Y = Y0
    prev = c_at(Y)
    while Y < Ymax:
        Y *= 2
        cur = c_at(Y)
        if abs(cur - prev) < tol:
            return cur
        prev = cur
    raise ConvergenceError(f"{side} end constant not converged by Im w = {Ymax}; raise Ymax")


def end_multiplier(horn: HornEval, side: str = "upper", **kw) -> complex:
    """Multiplier of the horn map at the upper (``exp(2 pi i c)``) or lower end."""
    key = (side, tuple(sorted(kw.items())))
    if key not in horn._end_cache:
        horn._end_cache[key] = end_constant(horn.atlas, side, **kw)
    c = horn._end_cache[key] + horn.sigma
    return cmath.exp(2j * math.pi * c) if side == "upper" else cmath.exp(-2j * math.pi * c)


def solve_sigma(atlas: FatouAtlas, theta, side: str = "upper", verify_tol: float = 1e-6) -> Phase:
    """Phase with ``end_multiplier = exp(2 pi i theta)``; ``Re sigma`` in ``[0, 1)``."""
    if isinstance(theta, RotationTarget):
        theta.require_irrational()
    th = theta_value(theta)
    c0 = end_constant(atlas, side)
    s = (th - c0) if side == "upper" else (-th - c0)
    s = complex(s.real - math.floor(s.real), s.imag)
    phase = Phase(s)
    m = end_multiplier(make_horn(atlas, s), side)
    if abs(m - cmath.exp(2j * math.pi * th)) > verify_tol:
        raise ConvergenceError(f"end multiplier {m} misses exp(2 pi i theta) by "
                               f"{abs(m - cmath.exp(2j * math.pi * th)):.2e}")
    return phase


# ---------------------------------------------------------------------------
# Julia-Lavaurs classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Escaping:
    level: int
    n: int


@dataclass(frozen=True)
class NonEscaping:
    pass


def julia_lavaurs_classify(atlas: FatouAtlas, sigma, z, max_lavaurs: int = 50):
    """Escaping(level, n) | NonEscaping() | Unknown() under the map and the Lavaurs map."""
    if max_lavaurs < 0:
        raise ValueError("max_lavaurs must be >= 0")
    p = atlas.parent
    a = atlas.horn_args()
    st, level, n = K.julia_lavaurs_point(p.kind, p.ups, p.to_germ(complex(z)), _sigma(sigma),
                                         *a, max_lavaurs)
    if st == K.ESCAPED:
        return Escaping(int(level), int(n))
    if st in (K.INTERIOR, K.NOT_INTERIOR):
        return NonEscaping()
    return Unknown()


# ---------------------------------------------------------------------------
# upper critical point and the Siegel orbit
# ---------------------------------------------------------------------------

def upper_critical_point(horn: HornEval, x0: float = 0.0, s_start: float = 3.0,
                         tol: float = 1e-11):
    """Critical point ``w`` on the boundary of the upper box and its value ``v``.

    The upper box is mapped isomorphically onto the half plane above the
    line through the critical value ``v = sigma``. The preimage of the
    vertical ray ``v + i s`` is followed from high up (where the horn map is
    close to a translation) down to ``s -> 0``, and the end point is polished
    by Newton's method on the derivative.
    """
    c_up = end_constant(horn.atlas, "upper")
    # the vertical ray above some integer translate of sigma whose preimage starts in [x0, x0+1)
    k = math.floor(x0 - (horn.sigma + c_up).real) + 1
    v = horn.sigma + k
    w = v + 1j * s_start - c_up - horn.sigma
    eps = 1e-6

    def h(x):
        return horn_map(horn, x)

    s = s_start
    while s > 1e-4:
        target = v + 1j * s
        for _ in range(30):
            f = h(w) - target
            d = (h(w + eps) - h(w - eps)) / (2 * eps)
            step = f / d
            w -= step
            if abs(step) < 1e-13:
                break
        s *= 0.7
    # polish: the critical point is a simple zero of h'
    for _ in range(40):
        d1 = horn_derivative(horn, w, radius=1e-2, order=1)
        d2 = horn_derivative(horn, w, radius=1e-2, order=2)
        step = d1 / d2
        w -= step
        if abs(step) < tol:
            break
    else:
        raise ConvergenceError("critical point polish did not converge")
    vv = h(w)
    horn.upper_crit_w = w
    horn.crit_value_v = vv
    return w, vv


def outside_samples(horn: HornEval, y_range=None, nx: int = 128, ny: int = 192):
    """Grid points of the strip ``[0,1) x y_range`` outside the horn map's domain.

    The default height range spans both end boxes with a margin of 1.
    """
    if y_range is None:
        y_range = (-end_constant(horn.atlas, "lower").imag - 1.0,
                   -end_constant(horn.atlas, "upper").imag + 1.0)
    xs = (np.arange(nx) + 0.5) / nx
    ys = y_range[0] + (np.arange(ny) + 0.5) * (y_range[1] - y_range[0]) / ny
    W = xs[None, :] + 1j * ys[:, None]
    st, _ = horn_array(horn, W)
    return W[(st == K.ESCAPED) | (st == K.NOT_INTERIOR)]


def siegel_orbit_horn(horn: HornEval, n: int, outside=None, y_range=None):
    """Iterate the upper critical point under the horn map, reduced mod 1.

    Returns a dict with ``orbit`` and the statistics ``max_im``, ``min_im``
    and ``min_dist_outside`` (distance on the cylinder to sampled points
    outside the domain). Raises :class:`OutsideDomain` when an iterate leaves
    the domain, which would contradict compact containment at this precision.
    """
    if horn.upper_crit_w is None:
        upper_critical_point(horn)
    w = horn.upper_crit_w
    w = complex(w.real - math.floor(w.real), w.imag)
    orbit = np.empty(n + 1, dtype=complex)
    orbit[0] = w
    for k in range(1, n + 1):
        try:
            w = horn_map(horn, w)
        except (OutsideDomain, InconclusiveClassification) as exc:
            raise OutsideDomain(f"Siegel orbit left the domain at iterate {k}", point=w) from exc
        w = complex(w.real - math.floor(w.real), w.imag)
        orbit[k] = w
    if outside is None:
        outside = outside_samples(horn, y_range)
    stats = {"orbit": orbit, "max_im": float(orbit.imag.max()), "min_im": float(orbit.imag.min())}
    if len(outside):
        pts = np.concatenate([outside + s for s in (-1, 0, 1)])
        tree = cKDTree(np.column_stack([pts.real, pts.imag]))
        d, _ = tree.query(np.column_stack([orbit.real, orbit.imag]))
        stats["min_dist_outside"] = float(d.min())
    else:
        stats["min_dist_outside"] = math.inf
    return stats


def orbit_to_csv(orbit, fh):
    """Write ``n,re,im`` rows with 17 significant digits to an open text file."""
    wr = csv.writer(fh, lineterminator="\n")
    wr.writerow(["n", "re", "im"])
    for n, w in enumerate(np.asarray(orbit, dtype=complex)):
        wr.writerow([n, f"{w.real:.17g}", f"{w.imag:.17g}"])


# ---------------------------------------------------------------------------
# the Blaschke horn map
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=None)
def blaschke_atlas() -> FatouAtlas:
    """Atlas of ``(3z^2+1)/(z^2+3)`` at 1, repelling axis along ``+i``."""
    return build_atlas(blaschke_parabolic())


def blaschke_horn(z, sigma=0.0) -> complex:
    """Horn map of the parabolic Blaschke fraction; defined off the real line."""
    z = complex(z)
    if z.imag == 0:
        raise OutsideDomain("the Blaschke horn map is not defined on the real line", point=z)
    return horn_map(make_horn(blaschke_atlas(), sigma), z)

"""Parabolic germs, Fatou coordinates and repelling parameterizations.

Two parabolic maps are supported:

* the quadratic polynomial ``P(z) = ups z + z^2`` with ``ups = exp(2 pi i p/q)``,
  studied through its ``q``-th iterate ``P^q(z) = z + a z^{q+1} + ...``;
* the quadratic Blaschke fraction ``(3z^2 + 1)/(z^2 + 3)`` at its parabolic
  fixed point 1, handled in the coordinate ``z - 1`` where it has two
  attracting axes (the unit disk and its exterior) and two repelling axes.

Attracting coordinates are computed by pushing a point into a deep petal and
evaluating an asymptotic series of the Fatou coordinate there,

    Phi(x) = u - b log u + sum_k c_k x^k,   u = -1 / (r a x^r),

where ``r`` is the number of petals. The coefficients ``c_k`` (including
negative ``k > -r``) and the logarithmic coefficient ``b`` are solved term by
term from ``Phi(F(x)) = Phi(x) + 1``. Working in the scaled variable
``x / zs`` with ``zs = (r |a|)^{-1/r}`` keeps the coefficients of moderate size
even when the germ's raw coefficients are enormous.
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .exceptions import ConvergenceError, OutsideDomain, PrecisionError
from .numkit import TruncatedSeries, series_exp, series_log1p, series_self_compose

__all__ = [
    "Escaped", "InteriorBasin", "NotInterior", "Unknown",
    "ParabolicGerm", "ParabolicQuadratic", "BlaschkeParabolic",
    "build_parabolic", "blaschke_parabolic", "FatouAtlas", "build_atlas",
    "classify_point", "phi_minus", "phi_div", "psi_plus", "fatou_series",
    "FatouResiduals", "fatou_residuals",
]


# ---------------------------------------------------------------------------
# classification results
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Escaped:
    n: int


@dataclass(frozen=True)
class InteriorBasin:
    i: int


@dataclass(frozen=True)
class NotInterior:
    pass


@dataclass(frozen=True)
class Unknown:
    pass


# ---------------------------------------------------------------------------
# germs
# ---------------------------------------------------------------------------

def _sorted_dirs(angles):
    a = np.mod(np.asarray(angles, dtype=float), 2 * math.pi)
    a.sort()
    return np.exp(1j * a)


def _nearest(d, dirs) -> int:
    return int(np.argmax((d * np.conj(dirs)).real))


@dataclass(frozen=True, eq=False)
class ParabolicGerm:
    """Common data of a parabolic fixed point at 0 (in germ coordinates).

    ``r`` petals, first return ``F = f^q`` with ``F(x) = x + a x^{r+1} + ...``.
    The map permutes the axes by ``i -> (i + shift) mod r``.
    """

    kind: int
    p: int
    q: int
    r: int
    ups: complex
    nu: int
    germ: TruncatedSeries
    lead_a: complex
    attracting_dirs: np.ndarray
    repelling_dirs: np.ndarray
    shift: int
    pairing: np.ndarray            # attracting i -> repelling j(i)
    resid_b: complex = field(default=complex("nan"))

    def __post_init__(self):
        # log coefficient from the low-order terms of the first return map
        F = self.first_return_series(2 * self.r + 3)
        zs = (self.r * abs(F[self.r + 1])) ** (-1.0 / self.r)
        _, _, beta = fatou_series(F * zs ** (np.arange(len(F)) - 1.0), self.r, 0)
        object.__setattr__(self, "resid_b", complex(beta / self.r))

    # -- coordinate changes; the quadratic family already lives in germ coordinates
    def to_germ(self, z):
        return z

    def from_germ(self, x):
        return x

    def fmap(self, x):
        return K.fmap(self.kind, self.ups, complex(x))

    def __call__(self, z):
        return self.from_germ(self.fmap(self.to_germ(complex(z))))

    def first_return_series(self, order: int) -> np.ndarray:
        """Coefficients (indexed by degree) of ``f^q`` at the parabolic point."""
        raise NotImplementedError

    @property
    def axis_map_attracting(self) -> np.ndarray:
        return (np.arange(self.r) + self.shift) % self.r

    @property
    def axis_map_repelling(self) -> np.ndarray:
        return (np.arange(self.r) + self.shift) % self.r

    def i_of_j(self, j: int) -> int:
        return int(np.flatnonzero(self.pairing == j)[0])


def _directions(a: complex, r: int):
    att = _sorted_dirs([(math.pi - cmath.phase(a) + 2 * math.pi * k) / r for k in range(r)])
    rep = _sorted_dirs([(-cmath.phase(a) + 2 * math.pi * k) / r for k in range(r)])
    return att, rep


def _pairing(att, rep, r, nu):
    return np.array([_nearest(d * cmath.exp(1j * nu * math.pi / r), rep) for d in att])


class ParabolicQuadratic(ParabolicGerm):
    """``P(z) = ups z + z^2`` with ``ups = exp(2 pi i p / q)``."""

    def first_return_series(self, order: int) -> np.ndarray:
        s = TruncatedSeries.polynomial([0, self.ups, 1], order)
        c = series_self_compose(s, self.q).padded()
        c[1] = 1.0  # ups^q == 1 exactly
        return c

    @property
    def critical_point(self) -> complex:
        return -self.ups / 2


def build_parabolic(p: int, q: int, nu: int = 1) -> ParabolicQuadratic:
    """Germ data, axes and axis bookkeeping of ``P(z) = exp(2 pi i p/q) z + z^2``.

    Axes are labelled by increasing angle in ``[0, 2 pi)``. The attracting
    directions solve ``a d^q < 0`` and the repelling ones ``a d^q > 0``, where
    ``a`` is the coefficient of ``z^{q+1}`` in ``P^q``.
    """
    if q < 1:
        raise ValueError("q must be a positive integer")
    if math.gcd(p, q) != 1:
        raise ValueError(f"p/q = {p}/{q} is not in lowest terms")
    if nu not in (-1, 1):
        raise ValueError("nu must be +1 or -1")
    p = p % q
    ups = cmath.exp(2j * math.pi * p / q)
    if q == 1:
        ups = 1.0 + 0j
    elif 2 * p == q:
        ups = -1.0 + 0j
    elif 4 * p == q:
        ups = 1j
    elif 4 * p == 3 * q:
        ups = -1j
    s = TruncatedSeries.polynomial([0, ups, 1], 2 * q + 2)
    germ = series_self_compose(s, q)
    a = germ.coefficient(q + 1)
    att, rep = _directions(a, q)
    # P rotates directions by ups, i.e. by p/q of a turn
    shift = _nearest(ups * att[0], att)
    return ParabolicQuadratic(kind=0, p=p, q=q, r=q, ups=ups, nu=nu, germ=germ, lead_a=a,
                              attracting_dirs=att, repelling_dirs=rep, shift=shift,
                              pairing=_pairing(att, rep, q, nu))


def _series_div(num: np.ndarray, den: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros(n, dtype=complex)
    for k in range(n):
        acc = num[k] if k < len(num) else 0.0
        for j in range(1, min(k, len(den) - 1) + 1):
            acc -= den[j] * out[k - j]
        out[k] = acc / den[0]
    return out


class BlaschkeParabolic(ParabolicGerm):
    """``(3z^2+1)/(z^2+3)`` at its parabolic point 1, in the coordinate ``x = z - 1``.

    Axis 0 (direction +1) attracts the exterior of the unit disk, axis 1
    (direction -1) attracts the unit disk.
    """

    def to_germ(self, z):
        return z - 1.0

    def from_germ(self, x):
        return x + 1.0

    def first_return_series(self, order: int) -> np.ndarray:
        return _series_div(np.array([0, 4, 2], complex), np.array([4, 2, 1], complex), order + 1)


def blaschke_parabolic(nu: int = 1) -> BlaschkeParabolic:
    c = _series_div(np.array([0, 4, 2], complex), np.array([4, 2, 1], complex), 5)
    germ = TruncatedSeries(c[1:])
    a = complex(c[3])
    att, rep = _directions(a, 2)
    return BlaschkeParabolic(kind=1, p=0, q=1, r=2, ups=1.0 + 0j, nu=nu, germ=germ, lead_a=a,
                             attracting_dirs=att, repelling_dirs=rep, shift=0,
                             pairing=_pairing(att, rep, 2, nu))


# ---------------------------------------------------------------------------
# asymptotic Fatou series
# ---------------------------------------------------------------------------

def fatou_series(F: np.ndarray, r: int, nterms: int):
    """Solve ``Phi(F(x)) = Phi(x) + 1`` term by term.

    Parameters
    ----------
    F : ndarray
        Coefficients of ``F(x) = x + a x^{r+1} + ...`` indexed by degree, long
        enough to hold degree ``nterms + 2r + 2``.
    r : int
        Number of petals.
    nterms : int
        Highest positive power kept.

    Returns
    -------
    a : complex
    c : dict
        ``{k: c_k}`` for ``k`` in ``-r..nterms`` (``k != 0``); ``c[-r] = -1/(r a)``.
    beta : complex
        Coefficient of ``log x``; the coefficient of ``log u`` is ``-beta/r``.
    """
    a = complex(F[r + 1])
    N = nterms + r + 2
    E = np.zeros(N, dtype=complex)
    for m in range(1, N):
        if m + 1 < len(F):
            E[m] = F[m + 1]
    L = series_log1p(E, N)
    ks = list(range(-r, nterms + 1))
    G = {}
    for k in ks:
        g = series_exp(k * L, N)
        g[0] -= 1.0
        G[k] = g
    c = {-r: -1.0 / (r * a)}
    beta = 0j
    for s in range(1, nterms + r + 1):
        new = s - r
        res = 0j
        for k, ck in c.items():
            d = s - k
            if 0 <= d < N:
                res += ck * G[k][d]
        if s < N:
            res += beta * L[s]
        if new == 0:
            beta = -res / a
        else:
            c[new] = -res / (new * a)
    return a, c, beta


# ---------------------------------------------------------------------------
# the atlas
# ---------------------------------------------------------------------------

_STATUS = {K.ESCAPED: "escaped", K.INTERIOR: "interior", K.NOT_INTERIOR: "not-interior",
           K.UNKNOWN: "unknown"}


END_HEIGHT = 12.0


class FatouAtlas:
    """Normalised attracting coordinates and repelling parameterizations of a parabolic germ.

    Parameters
    ----------
    parent : ParabolicGerm
    j0 : int
        Repelling axis carrying the parameterization ``psi_plus``.
    escape_R : float
        Escape radius (ignored for the Blaschke fraction, which has no escaping set).
    max_iter : int
        Iteration budget for reaching a petal.
    nterms : int, optional
        Positive powers kept in the Fatou series. By default the orders
        ``8r + 8``, ``12r + 12`` and ``16r + 16`` are tried in turn.
    u_eval : float
        Smallest entry scale ``|u|`` tried. It is doubled (up to 320) until
        the series agrees with the dynamics to 1e-10 at that scale.
    R_psi : float
        ``psi_plus(w)`` uses the local inverse at ``w - n`` with ``Re(w - n) < -R_psi``.

    Notes
    -----
    The normalisation fixes both translation freedoms: the extended attracting
    coordinate vanishes at the critical point of ``P`` (for the Blaschke
    fraction, it vanishes at 0 in the disk basin and equals 1 at 3 in the
    exterior basin), and the local repelling inverse has zero constant term.
    """

    def __init__(self, parent: ParabolicGerm, j0: int = 0, escape_R: float = 10.0,
                 max_iter: int = 100_000, nterms: int | None = None, u_eval: float = 10.0,
                 R_psi: float = 20.0):
        self.parent = parent
        r = parent.r
        if not 0 <= j0 < r:
            raise ValueError(f"j0 must lie in 0..{r - 1}")
        self.j0 = j0
        self.escape_R = float(escape_R) if parent.kind == 0 else math.inf
        self.max_iter = int(max_iter)
        self.R_psi = float(R_psi)
        self.att_dirs = np.ascontiguousarray(parent.attracting_dirs, dtype=complex)
        self.rep_dir = complex(parent.repelling_dirs[j0])
        self.target = parent.i_of_j(j0)
        if parent.kind == 0:
            self.targets = np.full(r, self.target, dtype=np.int64)
        else:
            self.targets = np.arange(r, dtype=np.int64)
        self.tsteps = np.zeros(r, dtype=np.int64)
        for i in range(r):
            t = 0
            while (i + t * parent.shift) % r != self.targets[i]:
                t += 1
            self.tsteps[i] = t
        self.consts = np.zeros(r, dtype=complex)

        # Search truncation order and entry scale: first consistent pair wins,
        # otherwise the most consistent one (with a warning when it is poor).
        orders = [nterms] if nterms else [8 * r + 8, 12 * r + 12, 16 * r + 16]
        best = None
        for nt in orders:
            self._fit_series(nt)
            u = float(u_eval)
            while u <= 320:
                self.u_enter = u
                err = self._series_consistency()
                if best is None or err < best[0]:
                    best = (err, nt, u)
                if err < 1e-10:
                    break
                u *= 2
            if best[0] < 1e-10:
                break
        err, nt, u = best
        if err > 1e-6:
            raise ConvergenceError(
                f"Fatou series inconsistent at the petal scale (error {err:.2e})")
        if err > 1e-10:
            warnings.warn(f"Fatou series only consistent to {err:.1e} for q={parent.q}",
                          RuntimeWarning, stacklevel=2)
        self._fit_series(nt)
        self.u_enter = u
        self.series_error = err
        # the repelling series shares the coefficients, hence the accuracy scale
        self.R_psi = max(self.R_psi, self.u_enter)
        self._petal_scale()
        self._normalize()
        self._end_data()

    def _fit_series(self, nterms: int):
        p = self.parent
        r = p.r
        self.nterms = nterms
        F = p.first_return_series(nterms + 2 * r + 4)
        self._F = F
        a = complex(F[r + 1])
        self.zs = (r * abs(a)) ** (-1.0 / r)
        Fs = F * self.zs ** (np.arange(len(F)) - 1.0)
        at, c, beta = fatou_series(Fs, r, nterms)
        self.at = at
        self.resid_b = beta / r
        self.cneg = np.zeros(r, dtype=complex)
        for k in range(1, r):
            self.cneg[k] = c[-k]
        self.cpos = np.zeros(nterms + 1, dtype=complex)
        for k in range(1, nterms + 1):
            self.cpos[k] = c[k]

    def _petal_scale(self):
        """Radius ``R0`` where the germ's higher-order terms reach 10% of the leading one.

        Reported for reference only: for ``q >= 3`` it corresponds to ``|u|`` in
        the thousands, far beyond where the series is already accurate, so the
        petal is entered at the certified scale ``u_enter`` instead.
        """
        r = self.parent.r
        F = self._F
        a = abs(F[r + 1])
        tail = np.abs(F[r + 2:])

        def ratio(rho):
            return np.sum(tail * rho ** np.arange(1, len(tail) + 1)) / a
        lo, hi = 0.0, 1.0
        while ratio(hi) < 0.1 and hi < 1e6:
            hi *= 2
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            lo, hi = (mid, hi) if ratio(mid) < 0.1 else (lo, mid)
        self.R0 = lo

    # -- kernel plumbing -------------------------------------------------------
    def _phi_args(self, u_enter=None):
        p = self.parent
        return (p.q, p.shift, self.zs, p.r, self.at, self.resid_b, self.cneg, self.cpos,
                self.att_dirs, u_enter or self.u_enter, self.escape_R, self.max_iter,
                self.tsteps, self.targets, self.consts)

    def _psi_args(self, j=None):
        p = self.parent
        d = self.rep_dir if j is None else complex(p.repelling_dirs[j])
        return (p.q, self.zs, p.r, self.at, self.resid_b, self.cneg, self.cpos, d, self.R_psi)

    def horn_args(self):
        p = self.parent
        return (p.q, p.shift, self.zs, p.r, self.at, self.resid_b, self.cneg, self.cpos,
                self.att_dirs, self.rep_dir, self.R_psi, self.u_enter, self.escape_R,
                self.max_iter, self.tsteps, self.targets, self.consts, self.ends)

    def _end_data(self, Y: float = END_HEIGHT):
        """Limits ``phi_div(psi_plus(w)) - w`` at the two ends of the cylinder.

        Far up or down the cylinder the horn map differs from a translation
        by ``O(exp(-2 pi |Im w|))``. The translation constants are measured
        at heights ``Y`` and ``2Y`` and then used as the exact value beyond
        ``Y``, which spares following enormous orbits.
        """
        p = self.parent
        self.ends = np.array([math.inf, 0, 0, 0, 0], dtype=complex)
        vals = []
        for sgn in (1, -1):
            got = []
            for y in (Y, 2 * Y):
                w = complex(0.0, sgn * y)
                st, v, ax = K.phi_of_psi(p.kind, p.ups, w, *self.horn_args())
                if st != K.INTERIOR:
                    raise ConvergenceError(f"horn map undefined at {w}; the end region is not "
                                           "reached at this height")
                got.append((v - w, ax))
            if abs(got[0][0] - got[1][0]) > 1e-9:
                raise ConvergenceError(f"end constant unstable between heights {Y} and {2 * Y}: "
                                       f"{abs(got[0][0] - got[1][0]):.2e}")
            vals.append(got[1])
        (c_up, ax_up), (c_lo, ax_lo) = vals
        self.ends = np.array([Y, c_up, c_lo, ax_up, ax_lo], dtype=complex)

    def _phi_raw(self, x, u_enter=None):
        p = self.parent
        return K.phi_div_point(p.kind, p.ups, complex(x), *self._phi_args(u_enter))

    def _normalize(self):
        p = self.parent
        if p.kind == 0:
            anchors = [(p.critical_point, 0.0)]
        else:
            anchors = [(-1.0 + 0j, 0.0), (2.0 + 0j, 1.0)]
        for x, value in anchors:
            st, v, ax, m = self._phi_raw(x)
            if st != K.INTERIOR:
                raise ConvergenceError(f"normalisation point {x} did not reach a petal")
            # v = Phi - m//q - consts[target]; consts are still zero for this target
            tgt = self.targets[ax]
            self.consts[tgt] = v - value

    def _series_consistency(self) -> float:
        """``|Phi(F^s x) - s - Phi(x)|`` for ``x`` on the target axis at the entry scale."""
        p = self.parent
        r = p.r
        d = self.att_dirs[self.target]
        zeta = (1.0 / (r * abs(self.at) * self.u_enter)) ** (1.0 / r) * d
        x = zeta * self.zs
        phi0 = K.phi_series(zeta, r, self.at, self.resid_b, self.cneg, self.cpos, False)
        steps = int(3 * self.u_enter) + 1
        for _ in range(steps * p.q):
            x = p.fmap(x)
        phi1 = K.phi_series(x / self.zs, r, self.at, self.resid_b, self.cneg, self.cpos, False)
        return abs(phi1 - steps - phi0)

    # -- public evaluators -----------------------------------------------------
    def classify(self, z):
        """Escaped(n) | InteriorBasin(i) | NotInterior() | Unknown()."""
        x = self.parent.to_germ(complex(z))
        st, v, ax, m = self._phi_raw(x)
        if st == K.INTERIOR:
            return InteriorBasin(int(ax))
        if st == K.ESCAPED:
            return Escaped(int(m))
        if st == K.NOT_INTERIOR:
            return NotInterior()
        return Unknown()

    def phi_div(self, z, certify: bool = False, tol: float = 1e-9) -> complex:
        x = self.parent.to_germ(complex(z))
        st, v, ax, m = self._phi_raw(x)
        if st != K.INTERIOR:
            raise OutsideDomain(f"{z} is not in an attracting basin ({_STATUS[st]})", point=z)
        if certify:
            st2, v2, _, _ = self._phi_raw(x, 2 * self.u_enter)
            if abs(v2 - v) > tol:
                raise ConvergenceError(f"attracting coordinate at {z} not converged "
                                       f"({abs(v2 - v):.2e} > {tol:g})")
        return complex(v)

    def basin_of(self, z) -> int:
        res = self.classify(z)
        if not isinstance(res, InteriorBasin):
            raise OutsideDomain(f"{z} is not in an attracting basin ({res})", point=z)
        return res.i

    def phi_minus(self, z, i: int | None = None, certify: bool = False) -> complex:
        """Attracting coordinate of axis ``i`` at a point of its basin."""
        x = self.parent.to_germ(complex(z))
        st, v, ax, m = self._phi_raw(x)
        if st != K.INTERIOR:
            raise OutsideDomain(f"{z} is not in an attracting basin ({_STATUS[st]})", point=z)
        if i is not None and ax != i:
            raise OutsideDomain(f"{z} lies in the basin of axis {ax}, not {i}", point=z)
        if certify:
            self.phi_div(z, certify=True)
        return complex(v - self.tsteps[ax] / self.parent.q)

    def psi_local(self, w) -> complex:
        """Local inverse of the repelling Fatou series on axis ``j0`` (needs ``Re w < -R_psi``)."""
        a = self._psi_args()
        x = K.psi_local(complex(w), a[1], a[2], a[3], a[4], a[5], a[6], a[7])
        return self.parent.from_germ(x)

    def psi_plus(self, w, j: int | None = None, overflow: float = 1e10) -> complex:
        """Extended repelling parameterization ``psi_{+,j}`` (default ``j = j0``)."""
        p = self.parent
        s = 0
        if j is not None and j != self.j0:
            if p.shift == 0:
                raise ValueError("other repelling axes are not images of j0 under the map")
            while (self.j0 + s * p.shift) % p.r != j:
                s += 1
        w0 = complex(w) - s / p.q
        st, x = K.psi_plus_point(p.kind, p.ups, w0, *self._psi_args(), overflow)
        if st == K.OVERFLOW:
            raise PrecisionError(f"psi_plus({w}) exceeds {overflow:g}; move w toward the left "
                                 f"or raise R_psi (currently {self.R_psi})")
        for _ in range(s):
            x = p.fmap(x)
        return p.from_germ(x)

    def psi_plus_array(self, ws, overflow: float = 1e10) -> np.ndarray:
        vals = [self.psi_plus(w, overflow=overflow) for w in np.ravel(ws)]
        return np.array(vals).reshape(np.shape(ws))

    def phi_div_array(self, zs):
        """Vectorised ``phi_div``; returns ``(status, values)`` arrays."""
        p = self.parent
        xs = np.ascontiguousarray(p.to_germ(np.asarray(zs, dtype=complex))).ravel()
        st = np.empty(xs.size, dtype=np.int64)
        val = np.empty(xs.size, dtype=complex)
        n = np.empty(xs.size, dtype=np.int64)
        K.phi_div_grid(p.kind, p.ups, xs, *self._phi_args(), st, val, n)
        shape = np.shape(zs)
        return st.reshape(shape), val.reshape(shape)

    def first_return(self, z):
        p = self.parent
        x = p.to_germ(complex(z))
        for _ in range(p.q):
            x = p.fmap(x)
        return p.from_germ(x)


def build_atlas(parent: ParabolicGerm, **kw) -> FatouAtlas:
    return FatouAtlas(parent, **kw)


def classify_point(atlas: FatouAtlas, z):
    return atlas.classify(z)


def phi_minus(atlas: FatouAtlas, z, i: int | None = None) -> complex:
    return atlas.phi_minus(z, i)


def phi_div(atlas: FatouAtlas, z) -> complex:
    return atlas.phi_div(z)


def psi_plus(atlas: FatouAtlas, w, j: int | None = None) -> complex:
    return atlas.psi_plus(w, j)


@dataclass(frozen=True)
class FatouResiduals:
    """Largest defects of the two functional equations over a sample."""

    phi_minus: float
    psi_plus: float
    basin_points: int
    psi_points: int


def fatou_residuals(atlas: FatouAtlas, n: int = 100, seed: int = 0,
                    box: float = 1.5) -> FatouResiduals:
    """Check ``phi(P^q z) = phi(z) + 1`` and ``psi(w + 1) = P^q(psi(w))`` on samples.

    The two sides of each relation are computed along different routes, so
    agreement is a statement about the series rather than an identity of
    floating point operations. ``phi(z)`` enters the petal at the atlas scale
    and ``phi(P^q z)`` at twice that scale. ``psi(w + 1)`` starts the local
    inverse at a point ``7.5`` units further left than ``psi(w)`` does.

    Basin points are drawn uniformly from ``[-box, box]^2`` (around the
    critical point for the polynomial) and kept when they lie in a basin.
    The parameterization is sampled uniformly at ``w`` in
    ``[-1, 1] x [-1, 1]``, skipping points whose image leaves the escape
    disk. Sampling continues until ``n`` usable points of each kind are
    found. Residuals are relative to ``max(1, |value|)``.

    Raises
    ------
    ConvergenceError
        if 200 rounds of sampling do not produce ``n`` usable points.
    """
    p = atlas.parent
    rng = np.random.default_rng(seed)
    centre = p.critical_point if p.kind == 0 else 0.0
    phi_err, got = 0.0, 0
    for _ in range(200):
        if got >= n:
            break
        zs = centre + rng.uniform(-box, box, 4 * n) + 1j * rng.uniform(-box, box, 4 * n)
        for z in zs:
            x = p.to_germ(complex(z))
            st, v, ax, _ = atlas._phi_raw(x)
            if st != K.INTERIOR:
                continue
            y = x
            for _ in range(p.q):
                y = p.fmap(y)
            st2, v2, ax2, _ = atlas._phi_raw(y, 2 * atlas.u_enter)
            if st2 != K.INTERIOR or ax2 != ax:
                continue
            phi_err = max(phi_err, abs(v2 - v - 1) / max(1.0, abs(v)))
            got += 1
            if got >= n:
                break
    if got < n:
        raise ConvergenceError(f"only {got} basin points found in the sampling box")

    a = list(atlas._psi_args())
    far = list(a)
    far[8] = a[8] + 7.5
    psi_err, used = 0.0, 0
    for _ in range(200):
        if used >= n:
            break
        ws = rng.uniform(-1.0, 1.0, 2 * n) + 1j * rng.uniform(-1.0, 1.0, 2 * n)
        for w in ws:
            w = complex(w)
            st, x = K.psi_plus_point(p.kind, p.ups, w, *a, atlas.escape_R)
            st1, x1 = K.psi_plus_point(p.kind, p.ups, w + 1, *far, atlas.escape_R)
            if st != K.INTERIOR or st1 != K.INTERIOR:
                continue
            for _ in range(p.q):
                x = p.fmap(x)
            zx, z1 = p.from_germ(x), p.from_germ(x1)
            psi_err = max(psi_err, abs(zx - z1) / max(1.0, abs(z1)))
            used += 1
            if used >= n:
                break
    if used < n:
        raise ConvergenceError(f"only {used} parameterization points stay in the escape disk")
    return FatouResiduals(phi_err, psi_err, got, used)

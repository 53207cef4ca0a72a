"""Entire-type maps glued from vertical strips, and their skeleton trees.

Each strip ``S_n = {n <= Re z < n+1}`` carries a translate of one of two
model maps. ``B(z) = 1 - cos(pi z)^4`` is holomorphic with extra zeros at
``1/2 +- i ln(1+sqrt 2)/pi``. ``A = (1 - cos(2 pi (x + i l(y)))) / 2`` is
2-quasiregular with zeros only at the integers. The height change ``l``
makes the two agree on the vertical lines ``Re z in Z``. Strips left of 0
use ``A``, strip 0 uses ``B`` and strip ``n >= 1`` uses ``B`` exactly when
the n-th bit of the sequence is 1.
"""
from __future__ import annotations

import io
import math
import re
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .numkit import arg_lift

RIB_HEIGHT = math.log(1.0 + math.sqrt(2.0)) / math.pi


# ---------------------------------------------------------------------------
# the two model maps
# ---------------------------------------------------------------------------

def strip_B(z):
    """``1 - cos(pi z)^4``, evaluated as ``sin^2(pi z) (1 + cos^2(pi z))``.

    This form has no cancellation near the zeros.
    """
    z = np.asarray(z, dtype=complex)
    s = np.sin(np.pi * z)
    c = np.cos(np.pi * z)
    out = s * s * (1.0 + c * c)
    return out[()] if out.ndim == 0 else out


def strip_B_prime(z):
    z = np.asarray(z, dtype=complex)
    out = 4 * np.pi * np.cos(np.pi * z) ** 3 * np.sin(np.pi * z)
    return out[()] if out.ndim == 0 else out


def strip_l(y):
    """Height change with ``cosh(2 pi l(y)) = 2 cosh(pi y)^4 - 1`` and ``sign l = sign y``.

    ``arccosh(1 + e) = log1p(e + sqrt(e (e + 2)))`` with
    ``e = 2 sinh^2(pi y) (cosh^2(pi y) + 1)`` computed directly, so small
    ``y`` loses nothing to cancellation. Large ``|y|`` uses the logarithmic
    form to avoid overflow.
    """
    y = np.asarray(y, dtype=float)
    a = np.abs(y)
    out = np.empty_like(a)
    small = a <= 20.0
    t = np.pi * a[small]
    e = 2.0 * np.sinh(t) ** 2 * (np.cosh(t) ** 2 + 1.0)
    out[small] = np.log1p(e + np.sqrt(e * (e + 2.0))) / (2 * np.pi)
    t = np.pi * a[~small]
    # log(2 cosh^4 t - 1) + log(1 + sqrt(1 - x^-2)) ; cosh^4 t ~ e^{4t}/16 there
    logcosh = t + np.log1p(np.exp(-2 * t)) - math.log(2.0)
    out[~small] = (math.log(2.0) + 4 * logcosh + math.log(2.0)) / (2 * np.pi)
    out = np.sign(y) * out
    return out[()] if out.ndim == 0 else out


def strip_l_prime(y):
    """Closed-form derivative of :func:`strip_l`."""
    y = np.asarray(y, dtype=float)
    t = np.pi * y
    # d/dy cosh(2 pi l) = 8 pi cosh^3 sinh  =>  l' = 4 cosh^3 sinh / sinh(2 pi l)
    l = strip_l(y)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = 4 * np.cosh(t) ** 3 * np.sinh(t) / np.sinh(2 * np.pi * l)
    out = np.where(np.abs(y) < 1e-8, math.sqrt(2.0), out)
    return out[()] if out.ndim == 0 else out


def strip_A(z):
    """``(1 - cos(2 pi (x + i l(y)))) / 2`` evaluated as ``sin^2``."""
    z = np.asarray(z, dtype=complex)
    h = z.real + 1j * strip_l(z.imag)
    out = np.sin(np.pi * h) ** 2
    return out[()] if out.ndim == 0 else out


def stretch_map(z):
    """``x + i y -> x + i l(y)``, the quasiconformal factor of ``A``."""
    z = np.asarray(z, dtype=complex)
    out = z.real + 1j * strip_l(z.imag)
    return out[()] if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# sequences
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Ones:
    """Tail ``a_n = 1`` for every index past the prefix."""


@dataclass(frozen=True)
class Periodic:
    pattern: tuple

    def __post_init__(self):
        pat = tuple(int(b) for b in self.pattern)
        if not pat or any(b not in (0, 1) for b in pat):
            raise ValueError("periodic pattern must be a nonempty bit string")
        if 1 not in pat:
            raise ValueError("periodic tail needs at least one 1")
        object.__setattr__(self, "pattern", pat)


@dataclass(frozen=True)
class StripSequence:
    """Bits ``a_1 a_2 ...`` as a finite prefix followed by an infinitely repeating tail."""

    prefix: tuple = ()
    tail: Ones | Periodic = field(default_factory=Ones)

    def __post_init__(self):
        pre = tuple(int(b) for b in self.prefix)
        if any(b not in (0, 1) for b in pre):
            raise ValueError("prefix must consist of bits 0/1")
        object.__setattr__(self, "prefix", pre)
        if not isinstance(self.tail, (Ones, Periodic)):
            raise TypeError("tail must be Ones() or Periodic(pattern)")

    @classmethod
    def parse(cls, text: str) -> "StripSequence":
        """``"101:ones"`` or ``"10:011"`` (prefix, colon, tail pattern or ``ones``)."""
        m = re.fullmatch(r"\s*([01]*)\s*:\s*(ones|[01]+)\s*", text)
        if not m:
            raise ValueError(f"cannot parse strip sequence {text!r}; expected e.g. '101:ones'")
        tail = Ones() if m.group(2) == "ones" else Periodic(tuple(int(c) for c in m.group(2)))
        return cls(tuple(int(c) for c in m.group(1)), tail)

    def _period(self) -> tuple:
        return (1,) if isinstance(self.tail, Ones) else self.tail.pattern

    def bit(self, n: int) -> int:
        """``a_n`` for ``n >= 1``."""
        if n < 1:
            raise ValueError("bits are indexed from 1")
        if n <= len(self.prefix):
            return self.prefix[n - 1]
        pat = self._period()
        return pat[(n - len(self.prefix) - 1) % len(pat)]

    def uses_B(self, n: int) -> bool:
        """Which model sits on strip ``n``."""
        if n < 0:
            return False
        if n == 0:
            return True
        return self.bit(n) == 1

    def canonical(self) -> "StripSequence":
        """Shortest prefix and primitive period describing the same bit sequence."""
        pat = self._period()
        # primitive period
        for d in range(1, len(pat) + 1):
            if len(pat) % d == 0 and pat == pat[:d] * (len(pat) // d):
                pat = pat[:d]
                break
        pre = list(self.prefix)
        # absorb prefix bits that continue the periodic pattern backwards
        while pre and pre[-1] == pat[-1]:
            pre.pop()
            pat = (pat[-1],) + pat[:-1]
        tail = Ones() if pat == (1,) else Periodic(pat)
        return StripSequence(tuple(pre), tail)

    def __eq__(self, other):
        if not isinstance(other, StripSequence):
            return NotImplemented
        a, b = self.canonical(), other.canonical()
        return a.prefix == b.prefix and a._period() == b._period()

    def __hash__(self):
        c = self.canonical()
        return hash((c.prefix, c._period()))

    def __str__(self):
        tail = "ones" if isinstance(self.tail, Ones) else "".join(map(str, self.tail.pattern))
        return "".join(map(str, self.prefix)) + ":" + tail


def eval_strip_map(seq: StripSequence, z):
    """The glued map: ``A(z - n)`` or ``B(z - n)`` on strip ``n = floor(Re z)``."""
    z = np.asarray(z, dtype=complex)
    n = np.floor(z.real)
    local = z - n
    out = np.empty(z.shape, dtype=complex)
    if z.size:
        useB = np.vectorize(lambda k: seq.uses_B(int(k)), otypes=[bool])(n)
    else:
        useB = np.zeros(0, bool)
    useB = np.asarray(useB, dtype=bool).reshape(z.shape)
    out[useB] = strip_B(local[useB])
    out[~useB] = strip_A(local[~useB])
    return out[()] if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# quasiconformal dilatation
# ---------------------------------------------------------------------------

def dilatation_field(f: Callable, window=(0.0, 1.0, -2.0, 2.0), resolution=(128, 128),
                     step: float = 1e-6) -> np.ndarray:
    """Dilatation ``(|f_z| + |f_zbar|) / (|f_z| - |f_zbar|)`` at cell centres.

    Partial derivatives come from central differences with spacing ``step``
    (not the cell size, so the value reflects the differential at the centre).
    Cells where ``f`` reverses orientation get ``inf``.
    """
    x0, x1, y0, y1 = window
    nx, ny = resolution
    if nx < 2 or ny < 2:
        raise ValueError("resolution must be at least 2x2")
    xs = x0 + (np.arange(nx) + 0.5) * (x1 - x0) / nx
    ys = y0 + (np.arange(ny) + 0.5) * (y1 - y0) / ny
    Z = xs[None, :] + 1j * ys[:, None]
    fx = (f(Z + step) - f(Z - step)) / (2 * step)
    fy = (f(Z + 1j * step) - f(Z - 1j * step)) / (2 * step)
    fz = 0.5 * (fx - 1j * fy)
    fzb = 0.5 * (fx + 1j * fy)
    a, b = np.abs(fz), np.abs(fzb)
    with np.errstate(divide="ignore", invalid="ignore"):
        K = np.where(a > b, (a + b) / (a - b), np.inf)
    return K


def dilatation_estimate(f: Callable = strip_A, window=(0.0, 1.0, -2.0, 2.0),
                        resolution=(128, 128), step: float = 1e-6) -> float:
    """Maximum of :func:`dilatation_field` over the grid."""
    return float(np.max(dilatation_field(f, window, resolution, step)))


# ---------------------------------------------------------------------------
# zeros by the argument principle
# ---------------------------------------------------------------------------

def _rect_path(rect, n):
    x0, x1, y0, y1 = rect
    t = np.linspace(0.0, 1.0, n, endpoint=False)
    return np.concatenate([x0 + (x1 - x0) * t + 1j * y0,
                           x1 + 1j * (y0 + (y1 - y0) * t),
                           x1 - (x1 - x0) * t + 1j * y1,
                           x0 + 1j * (y1 - (y1 - y0) * t),
                           [complex(x0, y0)]])


def count_zeros(f: Callable, rect, samples: int = 256, max_samples: int = 1 << 20) -> int:
    """Number of zeros (with multiplicity, or topological degree) of ``f`` inside ``rect``.

    The boundary is resampled with doubling density until consecutive values
    turn by less than an eighth of a turn.
    """
    n = samples
    while n <= max_samples:
        vals = f(_rect_path(rect, n))
        if np.any(vals == 0):
            raise ValueError("a zero lies on the counting contour")
        steps = np.angle(vals[1:] / vals[:-1])
        if np.max(np.abs(steps)) < math.pi / 4:
            lift = arg_lift(vals)
            return int(round(lift[-1] - lift[0]))
        n *= 2
    raise ValueError("contour sampling budget exhausted (zero too close to the contour?)")


def locate_zeros(f: Callable, rect, fprime: Callable | None = None, tol: float = 1e-12,
                 box: float = 1e-3) -> list[tuple[complex, int]]:
    """Zeros of ``f`` in ``rect`` as ``(location, multiplicity)``.

    Boxes are quartered while they contain zeros, down to size ``box``; then
    each zero is refined by Newton's method with the multiplicity taken into
    account (``z -= m f / f'``). Without ``fprime`` only the box centre is
    returned.
    """
    out = []
    stack = [rect]
    while stack:
        r = stack.pop()
        k = count_zeros(f, r)
        if k == 0:
            continue
        x0, x1, y0, y1 = r
        if max(x1 - x0, y1 - y0) <= box:
            out.append((complex((x0 + x1) / 2, (y0 + y1) / 2), k))
            continue
        # offset the split lines slightly so they do not pass through symmetric zeros
        xm = x0 + (x1 - x0) * 0.4987
        ym = y0 + (y1 - y0) * 0.5013
        stack.extend([(x0, xm, y0, ym), (xm, x1, y0, ym), (x0, xm, ym, y1), (xm, x1, ym, y1)])
    if fprime is not None:
        refined = []
        for z, m in out:
            for _ in range(100):
                fz = f(z)
                if fz == 0:
                    break
                step = m * fz / fprime(z)
                z -= step
                if abs(step) < tol:
                    break
            refined.append((complex(z), m))
        out = refined
    return sorted(out, key=lambda t: (round(t[0].real, 9), round(t[0].imag, 9)))


# ---------------------------------------------------------------------------
# skeleton
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SkeletonVertex:
    position: complex
    label: int
    kind: str           # "spine" or "rib-end"


@dataclass(frozen=True)
class SkeletonGraph:
    """Spine along the real axis (0 at integers, 1 at half-integers) with pairs of ribs.

    ``window = (n_lo, n_hi)`` covers the integers ``n_lo .. n_hi``.
    """

    vertices: tuple
    edges: tuple
    window: tuple

    def vertebra_ribs(self) -> dict:
        """Map strip index ``n`` to the number of ribs at the vertebra ``n + 1/2``."""
        deg = {}
        idx = {v.position.real: i for i, v in enumerate(self.vertices) if v.label == 1}
        counts = np.zeros(len(self.vertices), dtype=int)
        for i, j in self.edges:
            for a, b in ((i, j), (j, i)):
                if self.vertices[b].kind == "rib-end":
                    counts[a] += 1
        for x, i in idx.items():
            deg[int(math.floor(x))] = int(counts[i])
        return dict(sorted(deg.items()))

    def is_tree(self) -> bool:
        n = len(self.vertices)
        if len(self.edges) != n - 1:
            return False
        parent = list(range(n))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i
        for i, j in self.edges:
            ri, rj = find(i), find(j)
            if ri == rj:
                return False
            parent[ri] = rj
        return True

    def export(self) -> str:
        """Vertex lines ``label,kind,re,im`` followed by edge lines ``i,j``."""
        buf = io.StringIO()
        for v in self.vertices:
            buf.write(f"{v.label},{v.kind},{v.position.real:.17g},{v.position.imag:.17g}\n")
        for i, j in self.edges:
            buf.write(f"{i},{j}\n")
        return buf.getvalue()


def skeleton_from_sequence(seq: StripSequence, window=(-3, 6)) -> SkeletonGraph:
    """Skeleton over the strips ``n_lo <= n < n_hi``.

    Vertices are listed spine first (left to right), then ribs vertebra by
    vertebra, upper rib before lower.
    """
    lo, hi = int(window[0]), int(window[1])
    if hi - lo < 2:
        raise ValueError("window must cover at least two strips")
    if not lo <= 0 < hi:
        raise ValueError("window must contain strip 0")
    verts = []
    edges = []
    for n in range(lo, hi):
        verts.append(SkeletonVertex(complex(n, 0), 0, "spine"))
        verts.append(SkeletonVertex(complex(n + 0.5, 0), 1, "spine"))
    verts.append(SkeletonVertex(complex(hi, 0), 0, "spine"))
    edges.extend((i, i + 1) for i in range(len(verts) - 1))
    for n in range(lo, hi):
        if seq.uses_B(n):
            vertebra = 2 * (n - lo) + 1
            for sgn in (1, -1):
                verts.append(SkeletonVertex(complex(n + 0.5, sgn * RIB_HEIGHT), 0, "rib-end"))
                edges.append((vertebra, len(verts) - 1))
    return SkeletonGraph(tuple(verts), tuple(edges), (lo, hi))


def _rib_word(g: SkeletonGraph) -> list[int]:
    """Rib pattern read from the first vertebra carrying ribs, rightwards.

    The first ribbed vertebra is the anchor (strip 0), so the word is
    ``1, a_1, a_2, ...`` without needing the embedding's coordinates.
    """
    ribs = g.vertebra_ribs()
    keys = sorted(ribs)
    start = next((k for k in keys if ribs[k] > 0), None)
    if start is None:
        raise ValueError("skeleton has no ribs in its window")
    if start == keys[0]:
        raise ValueError("anchor vertebra is at the window edge; widen the window to the left")
    return [1 if ribs[k] else 0 for k in keys if k >= start]


def skeletons_equivalent(s1: StripSequence, s2: StripSequence, depth: int) -> bool:
    """Compare the skeletons of two sequences on the vertebrae of strips ``0..depth``.

    The comparison reads only the tree structure (rib counts along the
    spine, anchored at the first ribbed vertebra), never the sequences.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    window = (-2, depth + 1)
    w1 = _rib_word(skeleton_from_sequence(s1, window))
    w2 = _rib_word(skeleton_from_sequence(s2, window))
    return w1[: depth + 1] == w2[: depth + 1]

"""Deterministic tiled rendering of the classifiers into 8-bit images.

The window is cut into 64x64 tiles which a thread pool classifies
independently. Each tile writes a disjoint block of the class array. Pixel
centres are computed once for the whole image, so an image does not depend
on the worker count or on the tile size. A final single-threaded pass marks
the boundary between escaping and non-escaping pixels and applies the
palette.
"""
from __future__ import annotations

import functools
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .chessboard import ChessCell, classify_padded, horn_window, pixel_centres
from .exceptions import PremodelError
from .fatou import FatouAtlas, build_atlas, build_parabolic
from .lavaurs import make_horn, solve_sigma
from .numkit import RotationTarget
from .siegel import critical_orbit
from .strips import StripSequence, skeleton_from_sequence

# class codes stored per pixel before the palette is applied
ESCAPED, INTERIOR, UNKNOWN, BOUNDARY = 0, 1, 2, 3
LIGHT, DARK, GRAPH, OUTSIDE = 4, 5, 6, 7
ORBIT = 8
BACKGROUND, EDGE, VERTEX0, VERTEX1 = 9, 10, 11, 12
CLASS_NAMES = {
    ESCAPED: "escaped", INTERIOR: "interior", UNKNOWN: "unknown", BOUNDARY: "boundary",
    LIGHT: "light", DARK: "dark", GRAPH: "graph", OUTSIDE: "outside", ORBIT: "orbit",
    BACKGROUND: "background", EDGE: "edge", VERTEX0: "vertex0", VERTEX1: "vertex1",
}

GRAY_PALETTE = {
    ESCAPED: 0xFF, INTERIOR: 0xB0, UNKNOWN: 0x80, BOUNDARY: 0x00,
    LIGHT: 0xFF, DARK: 0x60, GRAPH: 0x00, OUTSIDE: 0xD8,
    ORBIT: 0x00, BACKGROUND: 0xFF, EDGE: 0x00, VERTEX0: 0x00, VERTEX1: 0x60,
}
RGB_PALETTE = {
    ESCAPED: (0xFF, 0xFF, 0xFF), INTERIOR: (0xB0, 0xB0, 0xB0), UNKNOWN: (0x80, 0x80, 0x80),
    BOUNDARY: (0x00, 0x00, 0x00), LIGHT: (0xF4, 0xE8, 0xC0), DARK: (0x50, 0x70, 0xA8),
    GRAPH: (0x00, 0x00, 0x00), OUTSIDE: (0xD8, 0xD8, 0xD8), ORBIT: (0xC0, 0x10, 0x10),
    BACKGROUND: (0xFF, 0xFF, 0xFF), EDGE: (0x00, 0x00, 0x00), VERTEX0: (0x10, 0x40, 0xC0),
    VERTEX1: (0xC0, 0x40, 0x10),
}
# escaping pixels fade from white towards light gray with the Lavaurs level
LEVEL_STEP = 0x14
LEVEL_FLOOR = 0xC8


class RenderCancelled(PremodelError):
    """The render was aborted between tiles."""


# ---------------------------------------------------------------------------
# targets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class JuliaSet:
    p: int
    q: int


@dataclass(frozen=True)
class Chessboard:
    p: int
    q: int
    coords: str = "horn"            # or "initial"
    sigma: complex = 0.0

    def __post_init__(self):
        if self.coords not in ("horn", "initial"):
            raise ValueError("coords must be 'horn' or 'initial'")


@dataclass(frozen=True)
class JuliaLavaurs:
    p: int
    q: int
    sigma: complex | None = None
    theta: RotationTarget | None = None

    def __post_init__(self):
        if (self.sigma is None) == (self.theta is None):
            raise ValueError("give exactly one of sigma and theta")


@dataclass(frozen=True)
class SiegelOrbit:
    theta: RotationTarget
    n: int = 100_000


@dataclass(frozen=True)
class SkeletonPlot:
    seq: StripSequence
    strips: tuple = (-3, 6)


@functools.lru_cache(maxsize=16)
def atlas_for(p: int, q: int) -> FatouAtlas:
    """Atlas of ``exp(2 pi i p/q) z + z^2``, built once per process."""
    return build_atlas(build_parabolic(p, q))


def default_window(target) -> tuple:
    """A window that visibly contains the object; chosen by hand, not taken from any figure."""
    if isinstance(target, (JuliaSet, JuliaLavaurs)) or (
            isinstance(target, Chessboard) and target.coords == "initial"):
        c = atlas_for(target.p, target.q).parent.critical_point
        return (c.real - 1.35, c.real + 1.35, c.imag - 1.2, c.imag + 1.2)
    if isinstance(target, Chessboard):
        _, _, y0, y1 = horn_window(make_horn(atlas_for(target.p, target.q), target.sigma))
        return (-0.5, 1.5, y0, y1)
    if isinstance(target, SiegelOrbit):
        c = -target.theta.rho / 2
        return (c.real - 1.5, c.real + 1.5, c.imag - 1.5, c.imag + 1.5)
    if isinstance(target, SkeletonPlot):
        lo, hi = target.strips
        return (lo - 0.5, hi + 0.5, -1.0, 1.0)
    raise TypeError(f"unknown render target {target!r}")


@dataclass(frozen=True)
class RenderJob:
    target: object
    window: tuple | None = None
    resolution: tuple = (600, 520)      # width, height
    max_iter: int = 2000
    max_lavaurs: int = 50
    palette: str = "gray"               # or "rgb"
    boundary: bool = True

    def __post_init__(self):
        w, h = self.resolution
        if w < 16 or h < 16:
            raise ValueError("resolution must be at least 16x16")
        if self.window is not None:
            x0, x1, y0, y1 = self.window
            if not (x1 > x0 and y1 > y0):
                raise ValueError(f"degenerate window {self.window}")
        if self.palette not in ("gray", "rgb"):
            raise ValueError("palette must be 'gray' or 'rgb'")
        if self.max_iter < 1 or self.max_lavaurs < 0:
            raise ValueError("budgets must be positive")

    def resolved_window(self) -> tuple:
        return tuple(self.window) if self.window is not None else default_window(self.target)


@dataclass
class ImageGrid:
    """Row-major 8-bit samples, ``channels`` per pixel."""

    width: int
    height: int
    channels: int
    data: np.ndarray = field(repr=False)
    classes: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.channels not in (1, 3):
            raise ValueError("channels must be 1 or 3")
        self.data = np.ascontiguousarray(self.data, dtype=np.uint8)
        if self.data.size != self.width * self.height * self.channels:
            raise ValueError("sample count does not match width x height x channels")

    def class_counts(self) -> dict:
        if self.classes is None:
            return {}
        vals, counts = np.unique(self.classes, return_counts=True)
        return {CLASS_NAMES[int(v)]: int(c) for v, c in zip(vals, counts)}


def encode_pgm(img: ImageGrid) -> bytes:
    """Binary PGM: ``P5\\n<w> <h>\\n255\\n`` followed by the raw samples."""
    if img.channels != 1:
        raise ValueError("PGM needs a single-channel image")
    return f"P5\n{img.width} {img.height}\n255\n".encode("ascii") + img.data.tobytes()


def encode_ppm(img: ImageGrid) -> bytes:
    """Binary PPM: ``P6\\n<w> <h>\\n255\\n`` followed by RGB triples."""
    if img.channels != 3:
        raise ValueError("PPM needs a three-channel image")
    return f"P6\n{img.width} {img.height}\n255\n".encode("ascii") + img.data.tobytes()


def encode(img: ImageGrid) -> bytes:
    return encode_pgm(img) if img.channels == 1 else encode_ppm(img)


# ---------------------------------------------------------------------------
# per-target tile classifiers
# ---------------------------------------------------------------------------

class _Classifier:
    pad = 0
    periodic = False
    boundary_pass = False

    def __call__(self, Z, rows, cols):
        raise NotImplementedError


class _JuliaClassifier(_Classifier):
    boundary_pass = True

    def __init__(self, target: JuliaSet, job: RenderJob):
        self.atlas = atlas_for(target.p, target.q)
        self.max_iter = job.max_iter

    def __call__(self, Z, rows, cols):
        a, p = self.atlas, self.atlas.parent
        xs = np.ascontiguousarray(p.to_germ(Z).ravel())
        st = np.empty(xs.size, dtype=np.int64)
        n = np.empty(xs.size, dtype=np.int64)
        K.julia_grid(p.kind, p.ups, xs, p.q, a.zs, p.r, a.at, a.att_dirs, a.u_enter, a.escape_R,
                     self.max_iter, st, n)
        out = np.full(xs.size, UNKNOWN, dtype=np.uint8)
        out[st == K.ESCAPED] = ESCAPED
        out[st == K.INTERIOR] = INTERIOR
        out[st == K.NOT_INTERIOR] = BOUNDARY
        return out.reshape(Z.shape), np.zeros(Z.shape, dtype=np.int16)


class _JuliaLavaursClassifier(_Classifier):
    boundary_pass = True

    def __init__(self, target: JuliaLavaurs, job: RenderJob):
        self.atlas = atlas_for(target.p, target.q)
        self.sigma = complex(target.sigma if target.sigma is not None
                             else solve_sigma(self.atlas, target.theta.value).sigma)
        self.max_iter = job.max_iter
        self.max_lavaurs = job.max_lavaurs

    def __call__(self, Z, rows, cols):
        a, p = self.atlas, self.atlas.parent
        xs = np.ascontiguousarray(p.to_germ(Z).ravel())
        st = np.empty(xs.size, dtype=np.int64)
        lev = np.empty(xs.size, dtype=np.int64)
        args = list(a.horn_args())
        args[13] = self.max_iter                    # classification budget per Lavaurs level
        K.julia_lavaurs_grid(p.kind, p.ups, xs, self.sigma, *args, self.max_lavaurs, st, lev)
        out = np.full(xs.size, UNKNOWN, dtype=np.uint8)
        out[st == K.ESCAPED] = ESCAPED
        out[(st == K.INTERIOR) | (st == K.NOT_INTERIOR)] = INTERIOR
        level = np.where(st == K.ESCAPED, lev, 0).astype(np.int16)
        return out.reshape(Z.shape), level.reshape(Z.shape)


class _ChessClassifier(_Classifier):
    pad = 1

    def __init__(self, target: Chessboard, job: RenderJob):
        self.horn = make_horn(atlas_for(target.p, target.q), target.sigma)
        self.coords = target.coords
        self.periodic = target.coords == "horn"

    def __call__(self, Zpad, rows, cols):
        cells, _, _ = classify_padded(self.horn, Zpad, None, self.coords)
        table = np.array([LIGHT, DARK, GRAPH, OUTSIDE, UNKNOWN], dtype=np.uint8)
        assert [int(c) for c in ChessCell] == [0, 1, 2, 3, 4]
        return table[cells], np.zeros(cells.shape, dtype=np.int16)


class _SiegelClassifier(_Classifier):

    def __init__(self, target: SiegelOrbit, job: RenderJob, window, resolution):
        self.rho = target.theta.rho
        self.max_iter = job.max_iter
        orb = critical_orbit(target.theta, target.n).orbit
        x0, x1, y0, y1 = window
        w, h = resolution
        col = np.floor((orb.real - x0) / (x1 - x0) * w).astype(np.int64)
        row = np.floor((y1 - orb.imag) / (y1 - y0) * h).astype(np.int64)
        keep = (col >= 0) & (col < w) & (row >= 0) & (row < h)
        self.hits = np.zeros((h, w), dtype=bool)
        self.hits[row[keep], col[keep]] = True

    def __call__(self, Z, rows, cols):
        zs = np.ascontiguousarray(Z.ravel())
        st = np.empty(zs.size, dtype=np.int64)
        n = np.empty(zs.size, dtype=np.int64)
        K.quad_escape_grid(self.rho, zs, self.max_iter, st, n)
        out = np.where(st == K.ESCAPED, ESCAPED, INTERIOR).astype(np.uint8).reshape(Z.shape)
        out[self.hits[rows, cols]] = ORBIT
        return out, np.zeros(Z.shape, dtype=np.int16)


class _SkeletonClassifier(_Classifier):

    def __init__(self, target: SkeletonPlot, job: RenderJob, window, resolution):
        g = skeleton_from_sequence(target.seq, target.strips)
        x0, x1, y0, y1 = window
        w, h = resolution
        self.px = max((x1 - x0) / w, (y1 - y0) / h)
        self.verts = g.vertices
        self.segs = [(g.vertices[i].position, g.vertices[j].position) for i, j in g.edges]

    def __call__(self, Z, rows, cols):
        out = np.full(Z.shape, BACKGROUND, dtype=np.uint8)
        for a, b in self.segs:
            d = b - a
            t = np.clip(((Z - a) * d.conjugate()).real / abs(d) ** 2, 0.0, 1.0)
            out[np.abs(Z - (a + t * d)) <= 0.75 * self.px] = EDGE
        for v in self.verts:
            out[np.abs(Z - v.position) <= 3.0 * self.px] = VERTEX1 if v.label == 1 else VERTEX0
        return out, np.zeros(Z.shape, dtype=np.int16)


def _classifier(job: RenderJob, window, resolution) -> _Classifier:
    t = job.target
    if isinstance(t, JuliaSet):
        return _JuliaClassifier(t, job)
    if isinstance(t, JuliaLavaurs):
        return _JuliaLavaursClassifier(t, job)
    if isinstance(t, Chessboard):
        return _ChessClassifier(t, job)
    if isinstance(t, SiegelOrbit):
        return _SiegelClassifier(t, job, window, resolution)
    if isinstance(t, SkeletonPlot):
        return _SkeletonClassifier(t, job, window, resolution)
    raise TypeError(f"unknown render target {t!r}")


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------

def tiles(width: int, height: int, size: int = 64) -> list:
    """Row-major list of ``(row_slice, col_slice)`` blocks covering the image."""
    if size < 1:
        raise ValueError("tile size must be positive")
    return [(slice(r, min(r + size, height)), slice(c, min(c + size, width)))
            for r in range(0, height, size) for c in range(0, width, size)]


def _mark_boundary(cls: np.ndarray) -> np.ndarray:
    """Non-escaping pixels with an escaping 4-neighbour become boundary pixels."""
    esc = cls == ESCAPED
    near = np.zeros_like(esc)
    near[1:, :] |= esc[:-1, :]
    near[:-1, :] |= esc[1:, :]
    near[:, 1:] |= esc[:, :-1]
    near[:, :-1] |= esc[:, 1:]
    out = cls.copy()
    out[(cls == INTERIOR) & near] = BOUNDARY
    return out


def apply_palette(cls: np.ndarray, level: np.ndarray, palette: str = "gray") -> np.ndarray:
    """Map class codes (and Lavaurs levels of escaping pixels) to samples."""
    shade = np.maximum(0xFF - LEVEL_STEP * level.astype(np.int64), LEVEL_FLOOR).astype(np.uint8)
    if palette == "gray":
        lut = np.zeros(256, dtype=np.uint8)
        for k, v in GRAY_PALETTE.items():
            lut[k] = v
        out = lut[cls]
        esc = cls == ESCAPED
        out[esc] = shade[esc]
        return out
    lut = np.zeros((256, 3), dtype=np.uint8)
    for k, v in RGB_PALETTE.items():
        lut[k] = v
    out = lut[cls]
    esc = cls == ESCAPED
    out[esc] = shade[esc, None]
    return out


def render(job: RenderJob, workers: int = 1, tile_size: int = 64,
           cancel: threading.Event | None = None) -> ImageGrid:
    """Classify every pixel centre and return the palette image.

    Output bytes depend only on ``job``: neither ``workers`` nor
    ``tile_size`` changes them. ``cancel`` is polled between tiles and
    raises :class:`RenderCancelled` once set.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    window = job.resolved_window()
    width, height = job.resolution
    clf = _classifier(job, window, (width, height))
    Z = pixel_centres(window, (width, height), pad=clf.pad, periodic=clf.periodic)
    cls = np.empty((height, width), dtype=np.uint8)
    level = np.zeros((height, width), dtype=np.int16)
    pad = clf.pad

    def work(block):
        if cancel is not None and cancel.is_set():
            raise RenderCancelled("render cancelled")
        rs, cs = block
        Zt = Z[rs.start:rs.stop + 2 * pad, cs.start:cs.stop + 2 * pad]
        c, lv = clf(Zt, rs, cs)
        cls[rs, cs] = c
        level[rs, cs] = lv

    blocks = tiles(width, height, tile_size)
    if workers == 1:
        for b in blocks:
            work(b)
    else:
        with ThreadPoolExecutor(workers) as ex:
            futures = [ex.submit(work, b) for b in blocks]
            for f in futures:
                f.result()
    if clf.boundary_pass and job.boundary:
        cls = _mark_boundary(cls)
    data = apply_palette(cls, level, job.palette)
    return ImageGrid(width, height, 1 if job.palette == "gray" else 3, data, cls)


def read_pnm(blob: bytes) -> ImageGrid:
    """Parse binary PGM/PPM bytes as produced by :func:`encode` (no comments)."""
    parts = blob.split(b"\n", 3)
    if len(parts) != 4 or parts[0] not in (b"P5", b"P6") or parts[2] != b"255":
        raise ValueError("not a binary PGM/PPM with maxval 255")
    w, h = (int(v) for v in parts[1].split())
    ch = 1 if parts[0] == b"P5" else 3
    data = np.frombuffer(parts[3], dtype=np.uint8)
    return ImageGrid(w, h, ch, data.reshape((h, w) if ch == 1 else (h, w, 3)))

"""Parabolic chessboards and the discrete modulus of the annulus between the
upper chessboard box and the boundary of the horn map's domain.

Cells are classified by the sign of ``Im(h(w) - v)`` where ``v`` is the
critical value of the horn map. Under our normalisation ``v`` lies in
``sigma + Z``, so only ``Im(v) = Im(sigma)`` matters and the chessboard does
not depend on ``sigma`` at all.
"""
from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import ndimage, sparse
from scipy.sparse.linalg import cg

from . import _kernels as K
from .exceptions import ConvergenceError, InconclusiveClassification, OutsideDomain
from .lavaurs import HornEval, end_constant, horn_map


class ChessCell(enum.IntEnum):
    LIGHT = 0
    DARK = 1
    GRAPH = 2
    OUTSIDE = 3
    UNKNOWN = 4


def chess_classify(horn: HornEval, z, band: float, coords: str = "horn") -> ChessCell:
    """Chessboard colour of a single point (``coords='initial'`` uses the dynamical plane)."""
    if band <= 0:
        raise ValueError("band must be positive")
    try:
        if coords == "horn":
            im = (horn_map(horn, z) - horn.sigma).imag
        else:
            im = horn.atlas.phi_div(z).imag
    except InconclusiveClassification:
        return ChessCell.UNKNOWN
    except OutsideDomain:
        return ChessCell.OUTSIDE
    if im > band:
        return ChessCell.LIGHT
    if im < -band:
        return ChessCell.DARK
    return ChessCell.GRAPH


def _eval_rows(horn: HornEval, W: np.ndarray, coords: str, workers: int):
    """Evaluate ``Im(h - sigma)`` (or ``phi_div``) on a grid, in row bands."""
    atlas = horn.atlas
    p = atlas.parent
    st = np.empty(W.shape, dtype=np.int64)
    val = np.empty(W.shape, dtype=complex)
    labels = np.full(W.shape, -1, dtype=np.int64)

    def band(rows):
        for r in rows:
            ws = np.ascontiguousarray(W[r])
            s = np.empty(ws.size, dtype=np.int64)
            v = np.empty(ws.size, dtype=complex)
            lab = np.empty(ws.size, dtype=np.int64)
            if coords == "horn":
                K.horn_grid_labeled(p.kind, p.ups, ws, *atlas.horn_args(), s, v, lab)
            else:
                n = np.empty(ws.size, dtype=np.int64)
                K.phi_div_grid(p.kind, p.ups, p.to_germ(ws), *atlas._phi_args(), s, v, n)
                lab[:] = -1
            st[r] = s
            val[r] = v
            labels[r] = lab

    chunks = [range(i, min(i + 16, W.shape[0])) for i in range(0, W.shape[0], 16)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            list(ex.map(band, chunks))
    else:
        for c in chunks:
            band(c)
    return st, val, labels


def pixel_centres(window, resolution, pad: int = 0, periodic: bool = False) -> np.ndarray:
    """Pixel centres of ``window = (x0, x1, y0, y1)`` at ``resolution = (nx, ny)``, row 0 on top.

    ``pad`` extra pixels are added on every side. With ``periodic`` the
    window is first translated by ``-floor(x0)``.
    """
    W, _, _ = _pixel_centres(window, resolution, periodic, pad)
    return W


def _pixel_centres(window, resolution, periodic: bool, pad: int = 1):
    x0, x1, y0, y1 = window
    nx, ny = resolution
    if not (x1 > x0 and y1 > y0):
        raise ValueError(f"degenerate window {window}")
    dx = (x1 - x0) / nx
    dy = (y1 - y0) / ny
    i = np.arange(-pad, nx + pad)
    j = np.arange(-pad, ny + pad)
    xs = (x0 - math.floor(x0) if periodic else x0) + (i + 0.5) * dx
    ys = y1 - (j + 0.5) * dy
    return xs[None, :] + 1j * ys[:, None], dx, dy


def classify_padded(horn: HornEval, Wpad: np.ndarray, band: float | None = None,
                    coords: str = "horn", workers: int = 1):
    """Chessboard cells of the interior of a grid carrying one pixel of padding.

    The padding only feeds the adaptive band. Returns ``(cells, values, labels)``
    for the ``(ny, nx)`` interior, where ``labels`` is the basin axis reached
    by ``psi_plus(w)`` (horn coordinates) or -1.
    """
    if coords not in ("horn", "initial"):
        raise ValueError("coords must be 'horn' or 'initial'")
    st, val, labels = _eval_rows(horn, Wpad, coords, workers)
    ok = st == K.INTERIOR
    im = np.where(ok, val.imag, np.nan)
    if band is None:
        jump = np.zeros(Wpad.shape)
        for sl_a, sl_b in (((slice(None), slice(1, None)), (slice(None), slice(None, -1))),
                           ((slice(1, None), slice(None)), (slice(None, -1), slice(None)))):
            d = np.abs(val[sl_a] - val[sl_b])
            d = np.where(ok[sl_a] & ok[sl_b], d, 0.0)
            jump[sl_a] = np.maximum(jump[sl_a], d)
            jump[sl_b] = np.maximum(jump[sl_b], d)
        bands = 2.0 * jump
    else:
        if band <= 0:
            raise ValueError("band must be positive")
        bands = np.full(Wpad.shape, float(band))
    cells = np.full(Wpad.shape, ChessCell.UNKNOWN, dtype=np.int8)
    cells[(st == K.ESCAPED) | (st == K.NOT_INTERIOR)] = ChessCell.OUTSIDE
    with np.errstate(invalid="ignore"):
        cells[ok & (im > bands)] = ChessCell.LIGHT
        cells[ok & (im < -bands)] = ChessCell.DARK
        cells[ok & (np.abs(im) <= bands)] = ChessCell.GRAPH
    inner = (slice(1, -1), slice(1, -1))
    return cells[inner], val[inner], labels[inner]


def chessboard_raster(horn: HornEval, window=(0.0, 1.0, -2.0, 3.0), resolution=(512, 640),
                      band: float | None = None, coords: str = "horn", workers: int = 1,
                      return_values: bool = False):
    """Classify pixel centres of ``window = (x0, x1, y0, y1)`` at ``resolution = (nx, ny)``.

    With ``band=None`` the graph band is adaptive: twice the largest change of
    ``h`` to a 4-neighbour, so graph lines are about one pixel wide and a
    light pixel can never touch a dark one. In horn coordinates the window is
    translated by ``-floor(x0)`` before evaluation, so shifting the window by
    an integer reproduces the raster pixel for pixel.

    Returns an ``(ny, nx)`` array of :class:`ChessCell` codes (row 0 at the
    top), or ``(cells, values, labels)`` with ``return_values``.
    """
    nx, ny = resolution
    if nx < 16 or ny < 16:
        raise ValueError("resolution must be at least 16x16")
    if coords not in ("horn", "initial"):
        raise ValueError("coords must be 'horn' or 'initial'")
    W, _, _ = _pixel_centres(window, resolution, periodic=(coords == "horn"))
    cells, val, labels = classify_padded(horn, W, band, coords, workers)
    if return_values:
        return cells, val, labels
    return cells


def horn_window(horn: HornEval, margin: float = 2.5):
    """One period of the cylinder tall enough to show both end boxes.

    The upper box sits above ``Im w = -Im c_up`` and the lower one below
    ``-Im c_low``, where ``c`` are the end constants; ``margin`` is added on
    each side.
    """
    c_up = end_constant(horn.atlas, "upper")
    c_lo = end_constant(horn.atlas, "lower")
    return (0.0, 1.0, -c_lo.imag - margin, -c_up.imag + margin)


# ---------------------------------------------------------------------------
# modulus
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AnnulusMask:
    """Annulus on a grid: ``annulus`` cells carry the unknown potential,
    ``inner`` cells are held at 1 and ``outer`` cells at 0.

    ``dx, dy`` are the cell sizes; ``periodic`` glues the left and right edges
    (a cylinder of circumference ``nx * dx``).
    """

    annulus: np.ndarray
    inner: np.ndarray
    outer: np.ndarray
    dx: float = 1.0
    dy: float = 1.0
    periodic: bool = True

    def validate(self):
        if not self.inner.any() or not self.outer.any():
            raise ValueError("inner and outer boundary sets must be nonempty")
        if (self.inner & self.outer).any():
            raise ValueError("inner and outer boundary sets intersect")
        if (self.annulus & (self.inner | self.outer)).any():
            raise ValueError("annulus cells overlap a boundary set")
        # the boundaries must not touch directly
        for a, b in _edges(self.inner.shape, self.periodic):
            if np.any(self.inner.ravel()[a] & self.outer.ravel()[b]) or \
               np.any(self.outer.ravel()[a] & self.inner.ravel()[b]):
                raise ValueError("inner and outer boundary cells touch")


def _edges(shape, periodic):
    """Index pairs of horizontally and vertically adjacent cells (flattened)."""
    ny, nx = shape
    idx = np.arange(ny * nx).reshape(shape)
    h_a, h_b = idx[:, :-1].ravel(), idx[:, 1:].ravel()
    if periodic:
        h_a = np.concatenate([h_a, idx[:, -1]])
        h_b = np.concatenate([h_b, idx[:, 0]])
    v_a, v_b = idx[:-1, :].ravel(), idx[1:, :].ravel()
    return (h_a, h_b), (v_a, v_b)


def modulus_estimate(mask: AnnulusMask, rtol: float = 1e-10) -> float:
    """Modulus ``1 / E`` where ``E`` is the Dirichlet energy of the discrete harmonic potential.

    Five-point stencil with edge weights ``dy/dx`` (horizontal) and ``dx/dy``
    (vertical); solved by Jacobi-preconditioned conjugate gradients. The
    discretisation error is first order in the cell size for curved
    boundaries.
    """
    mask.validate()
    shape = mask.annulus.shape
    free = mask.annulus.ravel()
    inner = mask.inner.ravel()
    outer = mask.outer.ravel()
    (h_a, h_b), (v_a, v_b) = _edges(shape, mask.periodic)
    a = np.concatenate([h_a, v_a])
    b = np.concatenate([h_b, v_b])
    wgt = np.concatenate([np.full(h_a.size, mask.dy / mask.dx),
                          np.full(v_a.size, mask.dx / mask.dy)])
    active = free | inner | outer
    keep = active[a] & active[b] & (free[a] | free[b])
    a, b, wgt = a[keep], b[keep], wgt[keep]

    comp = _component_check(shape, free, a, b)
    if not comp:
        raise ValueError("annulus cells are not connected")

    n = free.size
    unknown = np.flatnonzero(free)
    pos = -np.ones(n, dtype=np.int64)
    pos[unknown] = np.arange(unknown.size)
    fixed = np.where(inner, 1.0, 0.0)

    rows, cols, vals = [], [], []
    diag = np.zeros(unknown.size)
    rhs = np.zeros(unknown.size)
    for s, t in ((a, b), (b, a)):
        fs = free[s]
        np.add.at(diag, pos[s[fs]], wgt[fs])
        both = fs & free[t]
        rows.append(pos[s[both]])
        cols.append(pos[t[both]])
        vals.append(-wgt[both])
        edge_fixed = fs & ~free[t]
        np.add.at(rhs, pos[s[edge_fixed]], wgt[edge_fixed] * fixed[t[edge_fixed]])
    rows.append(np.arange(unknown.size))
    cols.append(np.arange(unknown.size))
    vals.append(diag)
    A = sparse.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                          shape=(unknown.size, unknown.size))
    M = sparse.diags(1.0 / diag)
    x, info = cg(A, rhs, rtol=rtol, atol=0.0, M=M, maxiter=50 * unknown.size)
    if info != 0:
        raise ConvergenceError(f"conjugate gradients did not converge (info={info})")
    u = fixed.copy()
    u[unknown] = x
    energy = float(np.sum(wgt * (u[a] - u[b]) ** 2))
    return 1.0 / energy


def _component_check(shape, free, a, b) -> bool:
    both = free[a] & free[b]
    g = sparse.coo_matrix((np.ones(both.sum()), (a[both], b[both])), shape=(free.size, free.size))
    ncomp, lab = sparse.csgraph.connected_components(g, directed=False)
    return len(np.unique(lab[free])) == 1


def flat_band_mask(height: float, n: int) -> AnnulusMask:
    """Cylinder ``[0,1) x [0, height]`` sampled with ``n`` cells across the circumference."""
    d = 1.0 / n
    m = int(round(height / d))
    dy = height / m
    rows = m + 1                      # node rows 0..m ; 0 is inner, m is outer
    ann = np.zeros((rows, n), bool)
    ann[1:-1] = True
    inner = np.zeros_like(ann)
    inner[0] = True
    outer = np.zeros_like(ann)
    outer[-1] = True
    return AnnulusMask(ann, inner, outer, dx=d, dy=dy, periodic=True)


def round_annulus_log_mask(r: float, n: int) -> AnnulusMask:
    """``r < |z| < 1`` rasterised in the coordinate ``log z / (2 pi i)`` (a flat cylinder)."""
    return flat_band_mask(math.log(1.0 / r) / (2 * math.pi), n)


def round_annulus_planar_mask(r: float, n: int) -> AnnulusMask:
    """``r < |z| < 1`` rasterised on an ``n x n`` Cartesian grid over ``[-1, 1]^2``."""
    d = 2.0 / n
    c = -1.0 + (np.arange(n + 2) - 0.5) * d
    X, Y = np.meshgrid(c, c)
    R = np.hypot(X, Y)
    inner = R <= r
    outer = R >= 1.0
    return AnnulusMask(~inner & ~outer, inner, outer, dx=d, dy=d, periodic=False)


def horn_annulus_mask(cells: np.ndarray, labels: np.ndarray | None = None) -> AnnulusMask:
    """Annulus between the upper box and the boundary of the domain, from a raster.

    ``cells`` is a horn-coordinate chessboard over a full period ``[0,1)``
    whose top row lies in the upper box. The upper box is the light
    component touching the top row; the annulus is the rest of the domain
    component containing it (restricted to cells with the same basin
    ``labels`` as the top row, when given); everything else bordering the
    annulus is the outer boundary.
    """
    defined = (cells == ChessCell.LIGHT) | (cells == ChessCell.DARK) | (cells == ChessCell.GRAPH)
    if labels is not None:
        top = labels[0][defined[0]]
        defined &= labels == np.bincount(top).argmax()
    structure = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]])
    light = cells == ChessCell.LIGHT
    U = _periodic_label_component(light, structure, seed_row=0)
    comp = _periodic_label_component(defined, structure, seed_row=0)
    annulus = comp & ~U
    # outer boundary: cells 4-adjacent to the annulus that are not in the component
    grown = _periodic_dilate(annulus, structure)
    outer = grown & ~comp
    inner = U
    return AnnulusMask(annulus, inner, outer, dx=1.0 / cells.shape[1],
                       dy=1.0 / cells.shape[1], periodic=True)


def horn_modulus(horn: HornEval, n: int = 128, margin: float = 2.5, workers: int = 1) -> float:
    """Modulus of the annulus between the upper box and the domain boundary.

    ``n`` pixels across one period; square pixels. Raises :class:`ConvergenceError` if
    the annulus reaches the bottom of the window (increase ``margin``).
    """
    x0, x1, y0, y1 = horn_window(horn, margin)
    ny = int(math.ceil((y1 - y0) * n))
    cells, _, labels = chessboard_raster(horn, (x0, x1, y1 - ny / n, y1), (n, ny),
                                         workers=workers, return_values=True)
    mask = horn_annulus_mask(cells, labels)
    if mask.annulus[-1].any():
        raise ConvergenceError("annulus touches the bottom of the window; increase margin")
    return modulus_estimate(mask)


def _periodic_label_component(mask, structure, seed_row=0):
    """Union of the (x-periodic) connected components of ``mask`` touching ``seed_row``."""
    lab, n = ndimage.label(mask, structure=structure)
    # glue labels across the vertical seam
    parent = np.arange(n + 1)

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i
    left, right = lab[:, 0], lab[:, -1]
    for a, b in zip(left, right):
        if a and b:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
    roots = np.array([find(i) for i in range(n + 1)])
    lab = roots[lab]
    seeds = np.unique(lab[seed_row][lab[seed_row] > 0])
    return np.isin(lab, seeds) & mask


def _periodic_dilate(mask, structure):
    padded = np.concatenate([mask[:, -1:], mask, mask[:, :1]], axis=1)
    grown = ndimage.binary_dilation(padded, structure=structure)
    return grown[:, 1:-1]

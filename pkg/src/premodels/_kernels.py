"""Compiled inner loops shared by the Fatou, Lavaurs and rendering code.

All kernels work in *germ coordinates*: the parabolic point sits at 0 and the
map is either ``ups*x + x^2`` (``kind == 0``) or the conjugated quadratic
Blaschke fraction ``2x(2+x)/(4+2x+x^2)`` (``kind == 1``). Coefficient arrays
of the asymptotic Fatou series live in the scaled variable ``zeta = x / zs``.

Status codes returned by the classifiers are module constants.
"""
import math

import numba
import numpy as np

ESCAPED = 0
INTERIOR = 1
NOT_INTERIOR = 2
UNKNOWN = 3
OVERFLOW = 4

_JIT = dict(cache=True, nogil=True)


@numba.njit(**_JIT)
def fmap(kind, ups, x):
    if kind == 0:
        return ups * x + x * x
    if abs(x) > 1e100:
        return 2.0 + 0j
    den = 4.0 + 2.0 * x + x * x
    if den == 0:
        return 1e200 + 0j
    return 2.0 * x * (2.0 + x) / den


@numba.njit(**_JIT)
def ipow(z, r):
    out = 1.0 + 0j
    for _ in range(r):
        out *= z
    return out


@numba.njit(**_JIT)
def u_of(zeta, r, at):
    return -1.0 / (r * at * ipow(zeta, r))


@numba.njit(**_JIT)
def phi_series(zeta, r, at, B, cneg, cpos, repelling):
    """Truncated asymptotic Fatou coordinate at ``zeta`` (scaled germ coordinate)."""
    u = u_of(zeta, r, at)
    if repelling:
        val = u - B * np.log(-u)
    else:
        val = u - B * np.log(u)
    acc = 0j
    for k in range(len(cpos) - 1, 0, -1):
        acc = (acc + cpos[k]) * zeta
    inv = 1.0 / zeta
    acc2 = 0j
    for k in range(len(cneg) - 1, 0, -1):
        acc2 = (acc2 + cneg[k]) * inv
    return val + acc + acc2


@numba.njit(**_JIT)
def dphi_series(zeta, r, at, B, cneg, cpos):
    u = u_of(zeta, r, at)
    out = (-r * u / zeta) * (1.0 - B / u)
    zp = 1.0 + 0j
    for k in range(1, len(cpos)):
        out += k * cpos[k] * zp
        zp *= zeta
    inv = 1.0 / zeta
    ip = inv * inv
    for k in range(1, len(cneg)):
        out -= k * cneg[k] * ip
        ip *= inv
    return out


@numba.njit(**_JIT)
def nearest_dir(x, dirs):
    best = 0
    bv = -1e300
    for k in range(len(dirs)):
        v = (x * dirs[k].conjugate()).real / max(abs(x), 1e-300)
        if v > bv:
            bv = v
            best = k
    return best


@numba.njit(**_JIT)
def deep_in_petal(x, zs, r, at, u_enter):
    if x == 0:
        return False
    u = u_of(x / zs, r, at)
    return abs(u) >= u_enter and abs(u.imag) < u.real


@numba.njit(**_JIT)
def enter_petal(kind, ups, x, zs, r, at, att_dirs, u_enter, escape_R, max_iter):
    """Iterate until escape, exact hit of 0, or entry into a deep attracting petal.

    Returns ``(status, n, axis, x_n)``.
    """
    for n in range(max_iter + 1):
        if not abs(x) <= escape_R:
            return ESCAPED, n, -1, x
        if x == 0:
            return NOT_INTERIOR, n, -1, x
        if deep_in_petal(x, zs, r, at, u_enter):
            return INTERIOR, n, nearest_dir(x, att_dirs), x
        x = fmap(kind, ups, x)
    return UNKNOWN, max_iter, -1, x


@numba.njit(**_JIT)
def phi_div_point(kind, ups, x, q, shift, zs, r, at, B, cneg, cpos, att_dirs, u_enter,
                  escape_R, max_iter, tsteps, targets, consts):
    """Extended attracting coordinate of ``x``.

    Returns ``(status, value, axis_of_x, m)`` where ``axis_of_x`` is the
    attracting axis whose basin (under the q-th iterate) contains ``x`` and
    ``m`` is the number of map steps used.
    """
    status, n, ax, xn = enter_petal(kind, ups, x, zs, r, at, att_dirs, u_enter, escape_R, max_iter)
    if status != INTERIOR:
        return status, complex(np.nan, np.nan), -1, n
    t = tsteps[ax]
    for _ in range(t):
        xn = fmap(kind, ups, xn)
    m = n + t
    guard = 0
    while not deep_in_petal(xn, zs, r, at, u_enter) and guard < 1000:
        for _ in range(q):
            xn = fmap(kind, ups, xn)
        m += q
        guard += 1
    tgt = targets[ax]
    val = phi_series(xn / zs, r, at, B, cneg, cpos, False) - (m // q) - consts[tgt]
    orig = (ax - n * shift) % r
    return INTERIOR, val, orig, m


@numba.njit(**_JIT)
def psi_local(w, zs, r, at, B, cneg, cpos, rep_dir):
    """Inverse of the repelling Fatou series near the repelling direction ``rep_dir``."""
    u0 = w + B * np.log(-w)
    zr = -1.0 / (r * at * u0)
    mod = abs(zr) ** (1.0 / r)
    arg = np.angle(zr)
    zeta = 0j
    best = -2.0
    for k in range(r):
        cand = mod * np.exp(1j * (arg + 2.0 * math.pi * k) / r)
        v = (cand * rep_dir.conjugate()).real / mod
        if v > best:
            best = v
            zeta = cand
    for _ in range(60):
        f = phi_series(zeta, r, at, B, cneg, cpos, True) - w
        step = f / dphi_series(zeta, r, at, B, cneg, cpos)
        zeta -= step
        if abs(step) <= 1e-16 * abs(zeta):
            break
    return zeta * zs


@numba.njit(**_JIT)
def psi_plus_point(kind, ups, w, q, zs, r, at, B, cneg, cpos, rep_dir, R_psi, stop_R):
    """Extended repelling parameterization; stops early once ``|x| > stop_R``.

    Returns ``(status, x)`` with status ``INTERIOR`` when the full orbit was
    followed and ``OVERFLOW`` when ``stop_R`` was exceeded.
    """
    n = 0
    if w.real >= -R_psi:
        n = int(math.floor(w.real + R_psi)) + 1
    x = psi_local(w - n, zs, r, at, B, cneg, cpos, rep_dir)
    for _ in range(n * q):
        x = fmap(kind, ups, x)
        if not abs(x) <= stop_R:
            return OVERFLOW, x
    return INTERIOR, x


@numba.njit(**_JIT)
def phi_of_psi(kind, ups, w, q, shift, zs, r, at, B, cneg, cpos, att_dirs, rep_dir, R_psi,
               u_enter, escape_R, max_iter, tsteps, targets, consts, ends):
    """``phi_div(psi_plus(w))`` and the basin axis of ``psi_plus(w)``.

    ``psi_plus(w)`` is the ``n q``-th iterate of the local inverse at
    ``w - n``. When that orbit reaches a deep attracting petal after ``s``
    steps, the remaining ``K = n q - s`` steps are accounted for exactly
    through ``phi_div(P^q x) = phi_div(x) + 1``: only ``K mod q`` of them are
    applied. This keeps the cost bounded when ``Re w`` is huge.

    ``ends = [Y, c_up, c_low, axis_up, axis_low]``: for ``|Im w| >= Y`` the
    value is ``w + c`` (the neglected terms are of size ``exp(-2 pi Y)``).
    Pass ``Y = inf`` to disable the shortcut.

    Returns ``(status, value, axis)``.
    """
    Y = ends[0].real
    if w.imag >= Y:
        return INTERIOR, w + ends[1], int(ends[3].real)
    if w.imag <= -Y:
        return INTERIOR, w + ends[2], int(ends[4].real)
    n = 0
    if w.real >= -R_psi:
        n = int(math.floor(w.real + R_psi)) + 1
    x = psi_local(w - n, zs, r, at, B, cneg, cpos, rep_dir)
    total = n * q
    for s in range(total):
        if not abs(x) <= escape_R:
            return ESCAPED, complex(np.nan, np.nan), -1
        if deep_in_petal(x, zs, r, at, u_enter):
            K = total - s
            ax_s = nearest_dir(x, att_dirs)
            for _ in range(K % q):
                x = fmap(kind, ups, x)
            st, val, ax, m = phi_div_point(kind, ups, x, q, shift, zs, r, at, B, cneg, cpos,
                                           att_dirs, u_enter, escape_R, max_iter, tsteps,
                                           targets, consts)
            if st != INTERIOR:
                return st, val, -1
            return INTERIOR, val + (K // q), (ax_s + K * shift) % r
        x = fmap(kind, ups, x)
    if not abs(x) <= escape_R:
        return ESCAPED, complex(np.nan, np.nan), -1
    st, val, ax, m = phi_div_point(kind, ups, x, q, shift, zs, r, at, B, cneg, cpos, att_dirs,
                                   u_enter, escape_R, max_iter, tsteps, targets, consts)
    return st, val, ax


@numba.njit(**_JIT)
def horn_point(kind, ups, w, q, shift, zs, r, at, B, cneg, cpos, att_dirs, rep_dir, R_psi,
               u_enter, escape_R, max_iter, tsteps, targets, consts, ends):
    """``phi_div(psi_plus(w))`` without the phase; returns ``(status, value)``."""
    st, val, ax = phi_of_psi(kind, ups, w, q, shift, zs, r, at, B, cneg, cpos, att_dirs, rep_dir,
                             R_psi, u_enter, escape_R, max_iter, tsteps, targets, consts, ends)
    return st, val


@numba.njit(**_JIT)
def horn_grid(kind, ups, ws, q, shift, zs, r, at, B, cneg, cpos, att_dirs, rep_dir, R_psi,
              u_enter, escape_R, max_iter, tsteps, targets, consts, ends, status_out, value_out):
    for k in range(ws.size):
        st, val = horn_point(kind, ups, ws[k], q, shift, zs, r, at, B, cneg, cpos, att_dirs,
                             rep_dir, R_psi, u_enter, escape_R, max_iter, tsteps, targets,
                             consts, ends)
        status_out[k] = st
        value_out[k] = val


@numba.njit(**_JIT)
def horn_grid_labeled(kind, ups, ws, q, shift, zs, r, at, B, cneg, cpos, att_dirs, rep_dir,
                      R_psi, u_enter, escape_R, max_iter, tsteps, targets, consts, ends, status_out,
                      value_out, axis_out):
    """Like :func:`horn_grid`, also recording the basin axis of ``psi_plus(w)``."""
    for k in range(ws.size):
        st, val, ax = phi_of_psi(kind, ups, ws[k], q, shift, zs, r, at, B, cneg, cpos, att_dirs,
                                 rep_dir, R_psi, u_enter, escape_R, max_iter, tsteps, targets,
                                 consts, ends)
        status_out[k] = st
        value_out[k] = val
        axis_out[k] = ax


@numba.njit(**_JIT)
def phi_div_grid(kind, ups, xs, q, shift, zs, r, at, B, cneg, cpos, att_dirs, u_enter,
                 escape_R, max_iter, tsteps, targets, consts, status_out, value_out, n_out):
    for k in range(xs.size):
        st, val, ax, m = phi_div_point(kind, ups, xs[k], q, shift, zs, r, at, B, cneg, cpos,
                                       att_dirs, u_enter, escape_R, max_iter, tsteps, targets,
                                       consts)
        status_out[k] = st
        value_out[k] = val
        n_out[k] = m


@numba.njit(**_JIT)
def julia_lavaurs_point(kind, ups, x, sigma, q, shift, zs, r, at, B, cneg, cpos, att_dirs,
                        rep_dir, R_psi, u_enter, escape_R, max_iter, tsteps, targets, consts, ends,
                        max_lavaurs):
    """Classify ``x`` under the joint action of the map and the Lavaurs map.

    Returns ``(status, level, iterations)``: ``ESCAPED`` with the number of
    Lavaurs maps applied before escape, ``INTERIOR`` when the point survived
    ``max_lavaurs`` applications, or the status that stopped the run.
    ``iterations`` counts petal-entry steps of the starting point only.
    """
    st, val, ax, m = phi_div_point(kind, ups, x, q, shift, zs, r, at, B, cneg, cpos, att_dirs,
                                   u_enter, escape_R, max_iter, tsteps, targets, consts)
    if st != INTERIOR:
        return st, 0, m
    for level in range(1, max_lavaurs + 1):
        st, val, ax = phi_of_psi(kind, ups, val + sigma, q, shift, zs, r, at, B, cneg, cpos,
                                 att_dirs, rep_dir, R_psi, u_enter, escape_R, max_iter, tsteps,
                                 targets, consts, ends)
        if st != INTERIOR:
            return st, level, m
    return INTERIOR, max_lavaurs, m


@numba.njit(**_JIT)
def julia_grid(kind, ups, xs, q, zs, r, at, att_dirs, u_enter, escape_R, max_iter,
               status_out, n_out):
    for k in range(xs.size):
        st, n, ax, xn = enter_petal(kind, ups, xs[k], zs, r, at, att_dirs, u_enter, escape_R,
                                    max_iter)
        status_out[k] = st
        n_out[k] = n


@numba.njit(**_JIT)
def julia_lavaurs_grid(kind, ups, xs, sigma, q, shift, zs, r, at, B, cneg, cpos, att_dirs,
                       rep_dir, R_psi, u_enter, escape_R, max_iter, tsteps, targets, consts, ends,
                       max_lavaurs, status_out, level_out):
    for k in range(xs.size):
        st, lev, n = julia_lavaurs_point(kind, ups, xs[k], sigma, q, shift, zs, r, at, B, cneg,
                                         cpos, att_dirs, rep_dir, R_psi, u_enter, escape_R,
                                         max_iter, tsteps, targets, consts, ends, max_lavaurs)
        status_out[k] = st
        level_out[k] = lev


@numba.njit(**_JIT)
def quad_escape_grid(rho, zs, max_iter, status_out, n_out):
    """Escape time of ``rho z + z^2``; ``INTERIOR`` means bounded for ``max_iter`` steps."""
    for k in range(zs.size):
        z = zs[k]
        st = INTERIOR
        n = max_iter
        for i in range(max_iter):
            if not abs(z) <= 2.0:
                st = ESCAPED
                n = i
                break
            z = rho * z + z * z
        status_out[k] = st
        n_out[k] = n

"""Command line front end: figure renders and numerical self-checks.

Results go to standard output as ``key=value`` lines; progress notes,
warnings and errors go to standard error. Exit status is 0 on success, 2 for
a usage error (bad flag, malformed value, unknown configuration key) and 1
when a computation fails or a check misses its tolerance.

Every flag can also come from ``--config FILE``; a flag given on the command
line wins over the file.
"""
from __future__ import annotations

import argparse
import cmath
import math
import re
import sys
import time
import warnings
from pathlib import Path

from . import config as C
from .exceptions import ConfigError, PremodelError, RationalInputError

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2


class _UsageError(Exception):
    pass


def _typed(fn, name=None):
    """Wrap a ``ValueError``-raising parser for argparse."""
    def conv(text):
        try:
            return fn(text)
        except (ValueError, TypeError) as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None
    conv.__name__ = name or fn.__name__
    return conv


def _theta(text: str):
    from .numkit import RotationTarget
    t = RotationTarget.parse(text)
    if t.rational:
        raise ValueError(f"rotation number {text!r} is rational")
    return t


def _seq(text: str):
    from .strips import StripSequence
    return StripSequence.parse(text)


T_PQ = _typed(C.parse_pq, "p/q")
T_SIZE = _typed(C.parse_size, "WxH")
T_WINDOW = _typed(C.parse_window, "x0,x1,y0,y1")
T_STRIPS = _typed(C.parse_strip_range, "a..b")
T_COMPLEX = _typed(C.parse_complex, "complex")
T_INT = _typed(C.parse_positive_int, "positive int")
T_FLOAT = _typed(C.parse_positive_float, "positive float")
T_THETA = _typed(_theta, "theta")
T_SEQ = _typed(_seq, "sequence")


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _common(sp: argparse.ArgumentParser, window_type=T_WINDOW, window_help=None):
    sp.add_argument("--out", help="output file (.pgm gray, .ppm colour)")
    sp.add_argument("--size", type=T_SIZE, help="image size WxH (default 600x520)")
    sp.add_argument("--window", type=window_type,
                    help=window_help or "view rectangle x0,x1,y0,y1 (default: per target)")
    sp.add_argument("--config", help="key = value file supplying defaults for these flags")
    sp.add_argument("--workers", type=T_INT, help="render threads (default 1)")
    sp.add_argument("--tol", type=T_FLOAT, help="numerical tolerance of the command")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="premodels",
                                 description="Parabolic implosion and pre-model toolkit.")
    sub = ap.add_subparsers(dest="command", metavar="COMMAND", required=True)

    sp = sub.add_parser("render-julia", help="filled Julia set of exp(2 pi i p/q) z + z^2")
    sp.add_argument("--pq", type=T_PQ)
    sp.add_argument("--max-iter", dest="max_iter", type=T_INT)
    _common(sp)

    sp = sub.add_parser("render-chessboard", help="chessboard of the horn map")
    sp.add_argument("--pq", type=T_PQ)
    sp.add_argument("--coords", choices=("horn", "initial"))
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--theta", type=T_THETA, help="golden, a decimal or [1,1,...]")
    g.add_argument("--sigma", type=T_COMPLEX, help="phase, e.g. 0.25+0.1j")
    _common(sp)

    sp = sub.add_parser("render-lavaurs", help="Julia-Lavaurs set")
    sp.add_argument("--pq", type=T_PQ)
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--theta", type=T_THETA)
    g.add_argument("--sigma", type=T_COMPLEX)
    sp.add_argument("--max-iter", dest="max_iter", type=T_INT)
    sp.add_argument("--max-lavaurs", dest="max_lavaurs", type=T_INT)
    _common(sp)

    sp = sub.add_parser("render-siegel", help="critical orbit over the filled Julia set of "
                                              "exp(2 pi i theta) z + z^2")
    sp.add_argument("--theta", type=T_THETA)
    sp.add_argument("--samples", type=T_INT, help="orbit length (default 100000)")
    sp.add_argument("--max-iter", dest="max_iter", type=T_INT)
    _common(sp)

    sp = sub.add_parser("rotation-solve", help="phase tau of B_tau with rotation number theta")
    sp.add_argument("--theta", type=T_THETA)
    _common(sp)

    sp = sub.add_parser("sigma-solve", help="phase sigma with end multiplier exp(2 pi i theta)")
    sp.add_argument("--pq", type=T_PQ)
    sp.add_argument("--theta", type=T_THETA)
    _common(sp)

    sp = sub.add_parser("skeleton", help="skeleton tree of a strip sequence")
    sp.add_argument("--seq", type=T_SEQ, help="prefix:tail, e.g. 101:ones or 10:011")
    sp.add_argument("--depth", type=T_INT, help="also compare with --other up to this depth")
    sp.add_argument("--other", type=T_SEQ, help="second sequence for the equivalence test")
    _common(sp, window_type=T_STRIPS, window_help="strip range a..b (default -3..6)")

    sp = sub.add_parser("fatou-check", help="residuals of the Fatou coordinate relations")
    sp.add_argument("--pq", type=T_PQ)
    sp.add_argument("--samples", type=T_INT, help="basin sample count (default 100)")
    _common(sp)

    sp = sub.add_parser("modulus-check", help="modulus of the upper-box annulus vs the "
                                              "universal Blaschke horn map")
    sp.add_argument("--pq", type=T_PQ)
    sp.add_argument("--grid", type=T_INT, help="pixels per period (default 128)")
    _common(sp)
    return ap


DEFAULTS = {
    "pq": (2, 5), "coords": "horn", "size": (600, 520), "workers": 1, "max_iter": 2000,
    "max_lavaurs": 50, "samples": None, "grid": 128, "window": None, "out": None,
    "theta": None, "sigma": None, "seq": None, "depth": None, "other": None, "tol": None,
}


def _subparser(ap: argparse.ArgumentParser, name: str) -> argparse.ArgumentParser:
    for action in ap._subparsers._group_actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[name]
    raise KeyError(name)


def _merge_config(sp: argparse.ArgumentParser, ns: argparse.Namespace):
    """Fill flags missing on the command line from ``--config``, then defaults."""
    values = C.load_config(ns.config) if ns.config else {}
    actions = {a.dest: a for a in sp._actions}
    for key, raw in values.items():
        if key not in actions:
            print(f"note: config key {key!r} is not used by {ns.command}", file=sys.stderr)
            continue
        if getattr(ns, key, None) is not None:
            continue
        act = actions[key]
        try:
            val = act.type(raw) if act.type else raw
        except argparse.ArgumentTypeError as exc:
            raise _UsageError(f"config key {key!r}: {exc}") from None
        if act.choices is not None and val not in act.choices:
            raise _UsageError(f"config key {key!r}: {val!r} not in {sorted(act.choices)}")
        setattr(ns, key, val)
    for key, val in DEFAULTS.items():
        if key in actions and getattr(ns, key, None) is None:
            setattr(ns, key, val)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _emit(**kv):
    for k, v in kv.items():
        if isinstance(v, complex):
            print(f"{k}_re={v.real!r}")
            print(f"{k}_im={v.imag!r}")
        else:
            print(f"{k}={v}")


def _render_and_write(ns, target, default_name: str):
    from .render import RenderJob, encode, render
    out = Path(ns.out or default_name)
    suffix = out.suffix.lower()
    if suffix not in (".pgm", ".ppm"):
        raise _UsageError(f"--out must end in .pgm or .ppm, got {out.name!r}")
    job = RenderJob(target, window=ns.window, resolution=ns.size,
                    max_iter=getattr(ns, "max_iter", None) or DEFAULTS["max_iter"],
                    max_lavaurs=getattr(ns, "max_lavaurs", None) or DEFAULTS["max_lavaurs"],
                    palette="gray" if suffix == ".pgm" else "rgb")
    t0 = time.perf_counter()
    img = render(job, workers=ns.workers)
    blob = encode(img)
    out.write_bytes(blob)
    print(f"rendered {out} in {time.perf_counter() - t0:.1f}s", file=sys.stderr)
    x0, x1, y0, y1 = job.resolved_window()
    _emit(out=str(out), width=img.width, height=img.height,
          format="P5" if img.channels == 1 else "P6", bytes=len(blob),
          window=f"{x0!r},{x1!r},{y0!r},{y1!r}")
    for name, count in sorted(img.class_counts().items()):
        print(f"count_{name}={count}")
    return EXIT_OK


def _sigma_of(ns, atlas, theta=None):
    """Phase from ``--sigma``, else solved from ``--theta`` (or ``theta``), else 0."""
    from .lavaurs import solve_sigma
    if getattr(ns, "sigma", None) is not None:
        return complex(ns.sigma)
    theta = ns.theta or theta
    if theta is not None:
        return solve_sigma(atlas, theta, verify_tol=ns.tol or 1e-6).sigma
    return 0j


def cmd_render_julia(ns):
    from .render import JuliaSet
    p, q = ns.pq
    return _render_and_write(ns, JuliaSet(p, q), f"julia-{p}-{q}.pgm")


def cmd_render_chessboard(ns):
    from .render import Chessboard, atlas_for
    p, q = ns.pq
    sigma = _sigma_of(ns, atlas_for(p, q))
    return _render_and_write(ns, Chessboard(p, q, ns.coords, sigma),
                             f"chessboard-{ns.coords}-{p}-{q}.pgm")


def cmd_render_lavaurs(ns):
    from .numkit import RotationTarget
    from .render import JuliaLavaurs, atlas_for
    p, q = ns.pq
    sigma = _sigma_of(ns, atlas_for(p, q), RotationTarget.golden())
    _emit(sigma=sigma)
    return _render_and_write(ns, JuliaLavaurs(p, q, sigma=sigma), f"lavaurs-{p}-{q}.pgm")


def _with(ns, **kv):
    d = dict(vars(ns))
    d.update(kv)
    return argparse.Namespace(**d)


def cmd_render_siegel(ns):
    from .numkit import RotationTarget
    from .render import SiegelOrbit
    theta = ns.theta or RotationTarget.golden()
    return _render_and_write(ns, SiegelOrbit(theta, ns.samples or 100_000), "siegel.pgm")


def cmd_rotation_solve(ns):
    from .circle import lift_of_B_tau, rotation_number, solve_tau
    from .numkit import RotationTarget
    theta = ns.theta or RotationTarget.golden()
    tol = ns.tol or 1e-6
    tau = solve_tau(theta, tol)
    n = max(10_000, int(math.ceil(1.0 / tol)))
    rho, bound = rotation_number(lift_of_B_tau(tau), 0.0, n)
    _emit(tau=repr(tau), theta=repr(theta.value), rotation_number=repr(rho),
          error=f"{abs(rho - theta.value):.3e}", bound=f"{bound:.3e}")
    return EXIT_OK


def cmd_sigma_solve(ns):
    from .lavaurs import end_multiplier, make_horn
    from .numkit import RotationTarget
    from .render import atlas_for
    theta = ns.theta or RotationTarget.golden()
    atlas = atlas_for(*ns.pq)
    sigma = _sigma_of(ns, atlas, theta)
    m = end_multiplier(make_horn(atlas, sigma))
    err = abs(m - cmath.exp(2j * math.pi * theta.value))
    _emit(sigma=sigma, multiplier=m, multiplier_error=f"{err:.3e}")
    return EXIT_OK


def cmd_skeleton(ns):
    from .render import SkeletonPlot
    from .strips import skeleton_from_sequence, skeletons_equivalent
    if ns.seq is None:
        raise _UsageError("skeleton needs --seq")
    strips = ns.window or (-3, 6)
    g = skeleton_from_sequence(ns.seq, strips)
    ribs = g.vertebra_ribs()
    _emit(seq=str(ns.seq), strips=f"{strips[0]}..{strips[1]}", vertices=len(g.vertices),
          edges=len(g.edges), tree=int(g.is_tree()),
          b_strips=",".join(str(n) for n, k in ribs.items() if k))
    if ns.other is not None:
        depth = ns.depth or 8
        _emit(other=str(ns.other), depth=depth,
              equivalent=int(skeletons_equivalent(ns.seq, ns.other, depth)))
    if ns.out:
        if Path(ns.out).suffix.lower() in (".pgm", ".ppm"):
            window = ns.window
            ns = _with(ns, window=None)
            return _render_and_write(ns, SkeletonPlot(ns.seq, tuple(window or strips)), ns.out)
        Path(ns.out).write_text(g.export(), encoding="utf-8")
        _emit(out=ns.out)
    return EXIT_OK


def cmd_fatou_check(ns):
    from .fatou import fatou_residuals
    from .render import atlas_for
    tol = ns.tol or 1e-8
    atlas = atlas_for(*ns.pq)
    r = fatou_residuals(atlas, n=ns.samples or 100)
    _emit(pq=f"{ns.pq[0]}/{ns.pq[1]}", phi_minus_residual=f"{r.phi_minus:.3e}",
          psi_plus_residual=f"{r.psi_plus:.3e}", basin_points=r.basin_points,
          psi_points=r.psi_points, series_terms=atlas.nterms,
          series_error=f"{atlas.series_error:.3e}", tol=f"{tol:g}")
    ok = max(r.phi_minus, r.psi_plus) < tol
    _emit(ok=int(ok))
    if not ok:
        print("residual above tolerance", file=sys.stderr)
    return EXIT_OK if ok else EXIT_NUMERIC


def cmd_modulus_check(ns):
    from .chessboard import horn_modulus
    from .lavaurs import blaschke_atlas, make_horn
    from .render import atlas_for
    tol = ns.tol or 0.10
    t0 = time.perf_counter()
    m_u = horn_modulus(make_horn(blaschke_atlas()), n=ns.grid, workers=ns.workers)
    m_h = horn_modulus(make_horn(atlas_for(*ns.pq)), n=ns.grid, workers=ns.workers)
    print(f"moduli computed in {time.perf_counter() - t0:.1f}s", file=sys.stderr)
    ratio = m_h / m_u
    ok = abs(ratio - 1.0) < tol
    _emit(pq=f"{ns.pq[0]}/{ns.pq[1]}", grid=ns.grid, modulus_universal=repr(m_u),
          modulus_pq=repr(m_h), ratio=repr(ratio), tol=f"{tol:g}", ok=int(ok))
    return EXIT_OK if ok else EXIT_NUMERIC


COMMANDS = {
    "render-julia": cmd_render_julia,
    "render-chessboard": cmd_render_chessboard,
    "render-lavaurs": cmd_render_lavaurs,
    "render-siegel": cmd_render_siegel,
    "rotation-solve": cmd_rotation_solve,
    "sigma-solve": cmd_sigma_solve,
    "skeleton": cmd_skeleton,
    "fatou-check": cmd_fatou_check,
    "modulus-check": cmd_modulus_check,
}


_NEGATIVE = re.compile(r"^-[0-9.]")


def _glue_negative_values(argv: list) -> list:
    """Turn ``--window -3..6`` into ``--window=-3..6``.

    argparse takes a token starting with ``-`` for an option unless it looks
    like a plain negative number, which ranges and windows do not.
    """
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if (tok.startswith("--") and "=" not in tok and i + 1 < len(argv)
                and _NEGATIVE.match(argv[i + 1])):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None) -> int:
    """Run one subcommand and return its exit status."""
    ap = build_parser()
    argv = _glue_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        ns = ap.parse_args(argv)
    except SystemExit as exc:           # argparse has printed usage to stderr
        return int(exc.code or 0)
    sp = _subparser(ap, ns.command)
    warnings.simplefilter("default")
    try:
        _merge_config(sp, ns)
        return COMMANDS[ns.command](ns)
    except (_UsageError, ConfigError, RationalInputError) as exc:
        sp.print_usage(sys.stderr)
        print(f"{sp.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PremodelError, ArithmeticError) as exc:
        print(f"{ns.command}: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        sp.print_usage(sys.stderr)
        print(f"{sp.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"{ns.command}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

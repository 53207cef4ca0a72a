"""Blaschke pre-models, parabolic Fatou coordinates, horn maps and their diagnostics.

The package is organised by object:

``numkit``      continued fractions, truncated power series, argument lifting
``circle``      Blaschke circle maps, rotation numbers, conjugacy to rotations
``fatou``       parabolic germs, attracting coordinates, repelling parameterizations
``lavaurs``     Lavaurs maps, horn maps, phases and cylinder ends
``chessboard``  chessboard rasters and discrete conformal modulus
``siegel``      linearizer series and critical-orbit diagnostics
``strips``      the entire strip maps and their skeleton trees
``render``      deterministic tiled renderer and PGM/PPM encoding

The command line front end lives in ``premodels.cli`` (``python3 -m premodels``).
"""
from .exceptions import (ConfigError, ConvergenceError, EscapeError, InconclusiveClassification,
                         NonMonotoneLiftError, OrderViolation, OutsideDomain, PrecisionError,
                         PremodelError, RationalInputError, SmallDivisorError)
from .numkit import GOLDEN, RotationTarget, TruncatedSeries, cf_expand
from .circle import (derive_blaschke_params, lift_of_B_tau, rotation_number, solve_tau,
                     conjugacy_to_rotation, qs_constant_estimate)
from .fatou import build_atlas, build_parabolic, blaschke_parabolic, fatou_residuals
from .lavaurs import (make_horn, horn_map, lavaurs_g, end_multiplier, solve_sigma,
                      julia_lavaurs_classify, blaschke_atlas)
from .chessboard import ChessCell, chessboard_raster, horn_modulus, modulus_estimate
from .siegel import linearizer, critical_orbit, boundary_rotation_check
from .strips import StripSequence, skeleton_from_sequence, skeletons_equivalent
from .render import RenderJob, render, encode_pgm, encode_ppm
from .config import load_config

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "ConvergenceError", "EscapeError", "InconclusiveClassification",
    "NonMonotoneLiftError", "OrderViolation", "OutsideDomain", "PrecisionError",
    "PremodelError", "RationalInputError", "SmallDivisorError",
    "GOLDEN", "RotationTarget", "TruncatedSeries", "cf_expand",
    "derive_blaschke_params", "lift_of_B_tau", "rotation_number", "solve_tau",
    "conjugacy_to_rotation", "qs_constant_estimate",
    "build_atlas", "build_parabolic", "blaschke_parabolic", "fatou_residuals",
    "make_horn", "horn_map", "lavaurs_g", "end_multiplier", "solve_sigma",
    "julia_lavaurs_classify", "blaschke_atlas",
    "ChessCell", "chessboard_raster", "horn_modulus", "modulus_estimate",
    "linearizer", "critical_orbit", "boundary_rotation_check",
    "StripSequence", "skeleton_from_sequence", "skeletons_equivalent",
    "RenderJob", "render", "encode_pgm", "encode_ppm",
    "load_config",
]

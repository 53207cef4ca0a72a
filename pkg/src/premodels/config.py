"""Plain-text configuration files and the value parsers shared with the CLI.

A configuration file holds ``key = value`` lines. ``#`` starts a comment,
blank lines are ignored, and keys are the long CLI flag names with dashes
written as dashes or underscores (``max-lavaurs`` and ``max_lavaurs`` are the
same key). When a key repeats, the last line wins and a warning names both
lines. Values stay strings here: each subcommand converts them with the same
parser it uses for the flag, so a file and a command line are interpreted
identically.
"""
from __future__ import annotations

import math
import re
import warnings
from pathlib import Path

from .exceptions import ConfigError

#: every key a configuration file may set
CONFIG_KEYS = frozenset({
    "pq", "coords", "theta", "sigma", "seq", "window", "size", "out", "workers", "tol",
    "max_iter", "max_lavaurs", "palette", "grid", "samples", "depth",
})

_LINE = re.compile(r"^\s*([A-Za-z][A-Za-z0-9_-]*)\s*=\s*(.*?)\s*$")


def load_config(path) -> dict:
    """Read ``key = value`` overrides from ``path``.

    Returns
    -------
    dict
        Normalised key (underscores) to raw string value. An empty file
        gives an empty dict.

    Raises
    ------
    ConfigError
        on an unknown key or a line that is not ``key = value``; the message
        names the line number.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from exc
    out: dict[str, str] = {}
    seen: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        m = _LINE.match(line)
        if m is None:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key = m.group(1).replace("-", "_").lower()
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {m.group(1)!r}")
        if key in seen:
            warnings.warn(f"{path}:{lineno}: key {key!r} repeats line {seen[key]}; "
                          "the later value wins", UserWarning, stacklevel=2)
        seen[key] = lineno
        out[key] = m.group(2)
    return out


# ---------------------------------------------------------------------------
# value parsers (raise ValueError with a readable message)
# ---------------------------------------------------------------------------

def parse_pq(text: str) -> tuple[int, int]:
    """``"2/5"`` to ``(2, 5)``; the fraction must be reduced with ``0 <= p < q``."""
    m = re.fullmatch(r"\s*(\d+)\s*/\s*(\d+)\s*", text)
    if m is None:
        raise ValueError(f"expected p/q, got {text!r}")
    p, q = int(m.group(1)), int(m.group(2))
    if not 0 <= p < q:
        raise ValueError(f"need 0 <= p < q, got {text!r}")
    if math.gcd(p, q) != 1:
        raise ValueError(f"{p}/{q} is not in lowest terms")
    return p, q


def parse_size(text: str) -> tuple[int, int]:
    """``"600x520"`` to ``(600, 520)``; both sides at least 16."""
    m = re.fullmatch(r"\s*(\d+)\s*[xX]\s*(\d+)\s*", text)
    if m is None:
        raise ValueError(f"expected WIDTHxHEIGHT, got {text!r}")
    w, h = int(m.group(1)), int(m.group(2))
    if w < 16 or h < 16:
        raise ValueError(f"size must be at least 16x16, got {w}x{h}")
    return w, h


def parse_window(text: str) -> tuple[float, float, float, float]:
    """``"x0,x1,y0,y1"`` with ``x0 < x1`` and ``y0 < y1``."""
    parts = text.split(",")
    if len(parts) != 4:
        raise ValueError(f"expected x0,x1,y0,y1, got {text!r}")
    x0, x1, y0, y1 = (float(v) for v in parts)
    if not (x1 > x0 and y1 > y0) or not all(map(math.isfinite, (x0, x1, y0, y1))):
        raise ValueError(f"degenerate window {text!r}")
    return x0, x1, y0, y1


def parse_strip_range(text: str) -> tuple[int, int]:
    """``"-3..6"`` to ``(-3, 6)``."""
    m = re.fullmatch(r"\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*", text)
    if m is None:
        raise ValueError(f"expected a..b, got {text!r}")
    lo, hi = int(m.group(1)), int(m.group(2))
    if hi <= lo:
        raise ValueError(f"empty strip range {text!r}")
    return lo, hi


def parse_complex(text: str) -> complex:
    """A Python complex literal such as ``0.25`` or ``0.3+0.1j``."""
    return complex(text.replace(" ", ""))


def parse_positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise ValueError(f"expected a positive integer, got {text!r}")
    return v


def parse_positive_float(text: str) -> float:
    v = float(text)
    if not v > 0 or not math.isfinite(v):
        raise ValueError(f"expected a positive number, got {text!r}")
    return v

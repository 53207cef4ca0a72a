"""Numerical substrate: continued fractions, truncated power series, argument lifting.

Everything here works in IEEE double precision. A single :class:`Tolerance`
object carries the package-wide absolute/relative tolerances; functions that
compare floats take an optional ``tol`` argument defaulting to :data:`DEFAULT_TOL`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .exceptions import PrecisionError, RationalInputError

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

# remainder below which an expansion is declared to have terminated
RATIONAL_CUTOFF = 1e-14
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class Tolerance:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-9

    def close(self, a, b) -> bool:
        return bool(np.all(np.abs(np.asarray(a) - np.asarray(b))
                           <= self.abs_tol + self.rel_tol * np.abs(np.asarray(b))))


DEFAULT_TOL = Tolerance()


# ---------------------------------------------------------------------------
# continued fractions
# ---------------------------------------------------------------------------

class CFExpansion(NamedTuple):
    terms: list
    rational: bool


def cf_expand(x: float, n: int) -> CFExpansion:
    """Partial quotients ``[a1, ..., an]`` of the regular continued fraction of ``x``.

    The remainder is propagated together with a first-order bound on its
    rounding error. A partial quotient is only emitted when the bound cannot
    move ``1/r`` across an integer; otherwise :class:`PrecisionError` is raised
    with ``depth`` set to the number of certified terms (available as
    ``err.terms``). When the remainder drops below ``1e-14``, or ``1/r`` is
    an integer up to its own rounding bound, the expansion stops and the
    result is flagged rational.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    x = float(x)
    if not 0.0 < x < 1.0:
        raise ValueError(f"x must lie in (0, 1), got {x!r}")
    terms: list[int] = []
    r = x
    err = _EPS * x
    while len(terms) < n:
        y = 1.0 / r
        ey = err / (r * r) + _EPS * y
        a = round(y)
        # an integer within the rounding bound (while that bound is still tiny)
        # is indistinguishable from exact termination
        slack = max(RATIONAL_CUTOFF * max(1.0, y), 2.0 * ey if ey < 1e-6 else 0.0)
        if abs(y - a) <= slack:
            terms.append(int(a))
            return CFExpansion(terms, True)
        a = math.floor(y)
        if min(y - a, a + 1 - y) <= ey:
            exc = PrecisionError(
                f"partial quotient {len(terms) + 1} of {x!r} is not certified in double precision",
                depth=len(terms))
            exc.terms = list(terms)
            raise exc
        terms.append(int(a))
        r = y - a
        err = ey
        if r < RATIONAL_CUTOFF:
            return CFExpansion(terms, True)
    return CFExpansion(terms, False)


def convergents(terms: Sequence[int]) -> list[tuple[int, int]]:
    """Convergents ``p_k/q_k`` of ``[0; a1, a2, ...]`` as integer pairs."""
    p_prev, p = 1, 0
    q_prev, q = 0, 1
    out = []
    for a in terms:
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        out.append((p, q))
    return out


def cf_value(terms: Sequence[int]) -> float:
    """Value of the finite continued fraction ``[0; a1, ..., an]``."""
    v = 0.0
    for a in reversed(terms):
        v = 1.0 / (a + v)
    return v


@dataclass(frozen=True)
class RotationTarget:
    """An irrational rotation number with its continued-fraction prefix.

    Parameters
    ----------
    value : float
        The rotation number, in (0, 1).
    cf_terms : tuple of int
        Certified partial quotients ``a1, a2, ...``.
    type_bound : int, optional
        Bound ``M`` with ``a_i <= M`` for every stored term.
    rational : bool
        Set when :func:`cf_expand` detected a terminating expansion.
    """

    value: float
    cf_terms: tuple = field(default=())
    type_bound: int | None = None
    rational: bool = False

    def __post_init__(self):
        if not 0.0 < self.value < 1.0:
            raise ValueError(f"rotation number must lie in (0, 1), got {self.value!r}")
        if any(int(a) < 1 for a in self.cf_terms):
            raise ValueError("partial quotients must be positive integers")
        object.__setattr__(self, "cf_terms", tuple(int(a) for a in self.cf_terms))
        if self.type_bound is not None:
            if self.type_bound < 1:
                raise ValueError("type_bound must be >= 1")
            bad = [a for a in self.cf_terms if a > self.type_bound]
            if bad:
                raise ValueError(f"partial quotient {bad[0]} exceeds type bound {self.type_bound}")
        if self.cf_terms:
            p, q = convergents(self.cf_terms)[-1]
            if abs(p / q - self.value) > 1.0 / q**2 + 4 * _EPS:
                raise ValueError("continued fraction terms do not reproduce the value")

    @classmethod
    def from_value(cls, x: float, depth: int = 40,
                   type_bound: int | None = None) -> "RotationTarget":
        try:
            exp = cf_expand(x, depth)
            terms, rational = exp.terms, exp.rational
        except PrecisionError as exc:
            terms, rational = exc.terms, False
        return cls(float(x), tuple(terms), type_bound, rational)

    @classmethod
    def from_cf(cls, terms: Sequence[int], type_bound: int | None = None) -> "RotationTarget":
        """Target whose expansion starts with ``terms`` (the tail is assumed irrational)."""
        terms = [int(a) for a in terms]
        if not terms:
            raise ValueError("need at least one partial quotient")
        return cls(cf_value(terms), tuple(terms), type_bound, False)

    @classmethod
    def golden(cls, depth: int = 30) -> "RotationTarget":
        return cls(GOLDEN, (1,) * depth, 1, False)

    @classmethod
    def parse(cls, text: str, depth: int = 40) -> "RotationTarget":
        """Accept ``golden``, a decimal, or a partial-quotient list.

        A list ending in ``...`` repeats its last term forever, so
        ``[2,1,...]`` is ``1 - golden`` and ``[2,...]`` is ``sqrt(2) - 1``;
        the expansion is stored to ``depth`` terms. A list without the dots
        is a finite expansion and therefore a rational target.
        """
        s = text.strip().lower()
        if s == "golden":
            return cls.golden(depth)
        if s.startswith("["):
            if not s.endswith("]"):
                raise ValueError(f"unterminated partial-quotient list {text!r}")
            inner = s[1:-1].strip()
            periodic = inner.endswith("...")
            items = [t.strip() for t in inner.removesuffix("...").split(",") if t.strip()]
            terms = [int(t) for t in items]
            if not terms:
                raise ValueError(f"empty partial-quotient list {text!r}")
            if not periodic:
                return cls(cf_value(terms), tuple(terms), None, True)
            terms += [terms[-1]] * max(0, depth - len(terms))
            return cls.from_cf(terms)
        return cls.from_value(float(s))

    @property
    def rho(self) -> complex:
        return complex(math.cos(2 * math.pi * self.value), math.sin(2 * math.pi * self.value))

    def require_irrational(self):
        if self.rational:
            raise RationalInputError(f"rotation number {self.value!r} is rational")


def theta_value(theta) -> float:
    """Numeric value of a :class:`RotationTarget` or a plain real."""
    return theta.value if isinstance(theta, RotationTarget) else float(theta)


def is_bounded_type(t: RotationTarget, M: int, depth: int) -> bool:
    """Depth-limited certificate that the first ``depth`` partial quotients are ``<= M``."""
    if M < 1:
        raise ValueError("the bound M must be >= 1")
    t.require_irrational()
    if depth > len(t.cf_terms):
        raise ValueError(f"only {len(t.cf_terms)} partial quotients available, asked for {depth}")
    return all(a <= M for a in t.cf_terms[:depth])


# ---------------------------------------------------------------------------
# truncated power series
# ---------------------------------------------------------------------------

def _mul(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    out = np.convolve(a[:n], b[:n])[:n]
    if len(out) < n:
        out = np.concatenate([out, np.zeros(n - len(out), dtype=out.dtype)])
    return out


def series_log1p(e: np.ndarray, n: int) -> np.ndarray:
    """``log(1 + e)`` for a series ``e`` (indexed by degree) with ``e[0] == 0``."""
    out = np.zeros(n, dtype=complex)
    power = np.zeros(n, dtype=complex)
    power[0] = 1.0
    for m in range(1, n):
        power = _mul(power, e, n)
        if not power.any():
            break
        out += (-1) ** (m + 1) * power / m
    return out


def series_exp(s: np.ndarray, n: int) -> np.ndarray:
    """``exp(s)`` for a series with ``s[0] == 0``."""
    out = np.zeros(n, dtype=complex)
    out[0] = 1.0
    term = out.copy()
    for m in range(1, n):
        term = _mul(term, s, n) / m
        if not term.any():
            break
        out += term
    return out


class TruncatedSeries:
    """Power series without constant term, ``c1 z + c2 z^2 + ... + c_order z^order``.

    Coefficients past ``order`` are unknown, never zero-by-assumption: every
    operation truncates its result at the smallest order involved.
    """

    __slots__ = ("coefficients",)

    def __init__(self, coefficients):
        c = np.array(coefficients, dtype=complex)
        if c.ndim != 1 or len(c) == 0:
            raise ValueError("need a non-empty 1-d coefficient list")
        c.setflags(write=False)
        self.coefficients = c

    @classmethod
    def polynomial(cls, coeffs_by_degree, order: int) -> "TruncatedSeries":
        """From ``[c0, c1, c2, ...]`` (``c0`` must vanish), padded/truncated to ``order``."""
        c = np.zeros(order + 1, dtype=complex)
        src = np.asarray(coeffs_by_degree, dtype=complex)[: order + 1]
        c[: len(src)] = src
        if c[0] != 0:
            raise ValueError("series must fix 0 (zero constant term)")
        return cls(c[1:])

    @property
    def order(self) -> int:
        return len(self.coefficients)

    def coefficient(self, k: int) -> complex:
        if not 1 <= k <= self.order:
            raise IndexError(f"degree {k} outside 1..{self.order}")
        return complex(self.coefficients[k - 1])

    def padded(self) -> np.ndarray:
        """Coefficients indexed by degree, ``[0, c1, ..., c_order]``."""
        return np.concatenate([[0.0], self.coefficients])

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        acc = np.zeros_like(z)
        for c in self.coefficients[::-1]:
            acc = (acc + c) * z
        return acc if acc.ndim else complex(acc)

    def compose(self, inner: "TruncatedSeries") -> "TruncatedSeries":
        """``self(inner(z))`` truncated at ``min(self.order, inner.order)``."""
        n = min(self.order, inner.order) + 1
        t = inner.padded()[:n]
        acc = np.zeros(n, dtype=complex)
        for c in self.coefficients[: n - 1][::-1]:
            acc[0] += c
            acc = _mul(acc, t, n)
        return TruncatedSeries(acc[1:])

    def __eq__(self, other):
        return (isinstance(other, TruncatedSeries) and other.order == self.order
                and np.array_equal(other.coefficients, self.coefficients))

    def __repr__(self):
        return f"TruncatedSeries(order={self.order}, coefficients={self.coefficients!r})"


def series_self_compose(s: TruncatedSeries, times: int) -> TruncatedSeries:
    """The ``times``-fold composition ``s o s o ... o s``."""
    if times < 1:
        raise ValueError("times must be >= 1")
    out = s
    for _ in range(times - 1):
        out = s.compose(out)
    return out


# ---------------------------------------------------------------------------
# argument lifting
# ---------------------------------------------------------------------------

def arg_lift(path) -> np.ndarray:
    """Continuous branch of ``arg(z)/(2 pi)`` along a sampled path.

    Consecutive samples must turn by strictly less than half a turn.
    """
    z = np.asarray(path, dtype=complex).ravel()
    if z.size == 0:
        return np.zeros(0)
    if np.any(z == 0):
        raise ValueError(f"path passes through 0 at sample {int(np.argmax(z == 0))}")
    steps = np.angle(z[1:] / z[:-1])
    jumps = np.abs(steps) >= math.pi * (1 - 1e-12)
    if np.any(jumps):
        raise ValueError(f"argument jump of half a turn at sample {int(np.argmax(jumps)) + 1}; "
                         "sample the path more finely")
    out = np.empty(z.size)
    out[0] = np.angle(z[0]) / (2 * math.pi)
    out[1:] = out[0] + np.cumsum(steps) / (2 * math.pi)
    return out


def winding_number(f, center: complex, radius: float, samples: int = 2048) -> int:
    """Winding number of ``f`` around 0 along the circle ``|z - center| = radius``."""
    t = np.linspace(0.0, 1.0, samples + 1)
    zs = center + radius * np.exp(2j * math.pi * t)
    lift = arg_lift(f(zs))
    return int(round(lift[-1] - lift[0]))

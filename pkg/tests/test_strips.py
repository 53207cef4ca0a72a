import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from premodels.strips import (RIB_HEIGHT, Ones, Periodic, StripSequence, count_zeros,
                              dilatation_estimate, dilatation_field, eval_strip_map,
                              locate_zeros, skeleton_from_sequence, skeletons_equivalent,
                              strip_A, strip_B, strip_B_prime, strip_l, strip_l_prime,
                              stretch_map)

# imaginary part of the upper non-real zero of 1 - cos(pi z)^4 in the first strip
RIB_HEIGHT_PIN = 0.28054992616959007


def l_oracle(y):
    with mpmath.workdps(40):
        v = mpmath.acosh(2 * mpmath.cosh(mpmath.pi * y) ** 4 - 1) / (2 * mpmath.pi)
        return float(mpmath.sign(y) * v)


# ---------------------------------------------------------------- model maps

def test_B_special_values():
    assert strip_B(0) == 0
    assert strip_B(0.5) == pytest.approx(1, abs=1e-15)
    assert abs(strip_B(complex(0.5, RIB_HEIGHT))) < 1e-10
    assert RIB_HEIGHT == pytest.approx(RIB_HEIGHT_PIN, abs=1e-15)


def test_rib_height_against_root_finding():
    with mpmath.workdps(30):
        z = mpmath.findroot(lambda z: mpmath.cos(mpmath.pi * z) ** 2 + 1, mpmath.mpc(0.5, 0.3))
    assert complex(z) == pytest.approx(complex(0.5, RIB_HEIGHT), abs=1e-14)


@pytest.mark.parametrize("y", [0.0, 1e-9, 0.1, -0.1, 0.5, -0.5, 2.0, -2.0, 7.0, 25.0])
def test_height_change_matches_oracle(y):
    assert strip_l(y) == pytest.approx(l_oracle(y), rel=1e-13, abs=1e-300)


@pytest.mark.parametrize("y", [0.0, 0.1, -0.1, 0.5, -0.5, 2.0, -2.0])
def test_height_change_slope_band(y):
    h = 1e-6
    fd = (strip_l(y + h) - strip_l(y - h)) / (2 * h)
    assert math.sqrt(2) - 1e-6 <= fd < 2
    assert strip_l_prime(y) == pytest.approx(fd, rel=1e-6)
    assert math.sqrt(2) - 1e-15 <= strip_l_prime(y) < 2


@given(st.floats(-30, 30))
def test_height_change_is_odd_and_increasing(y):
    assert strip_l(-y) == -strip_l(y)
    assert strip_l(y + 0.01) > strip_l(y)


@pytest.mark.parametrize("y", [0.3, 0.7, 1.5, -1.5])
def test_A_and_B_agree_on_the_strip_edges(y):
    for edge in (0.0, 1.0):
        a, b = strip_A(complex(edge, y)), strip_B(complex(edge, y))
        # the values grow like cosh(pi y)^4, so agreement is measured relative to them
        assert abs(a - b) <= 1e-12 * max(1.0, abs(b))


def test_glued_map_values():
    seq = StripSequence((1, 0, 1), Ones())
    for n in range(-3, 6):
        assert abs(eval_strip_map(seq, n)) < 1e-15
        assert eval_strip_map(seq, n + 0.5) == pytest.approx(1, abs=1e-15)
    xs = np.linspace(-3, 6, 901)
    vals = eval_strip_map(seq, xs.astype(complex))
    assert np.all(np.abs(vals.imag) < 1e-15)
    assert np.all((vals.real >= -1e-15) & (vals.real <= 1 + 1e-15))


@pytest.mark.parametrize("n", [-1, 0, 1, 2, 3])
def test_glued_map_continuity_at_edges(n):
    seq = StripSequence((1, 0, 1), Ones())
    left = strip_B(complex(1, 0.8)) if seq.uses_B(n - 1) else strip_A(complex(1, 0.8))
    right = eval_strip_map(seq, complex(n, 0.8))
    assert abs(left - right) < 1e-12


# ---------------------------------------------------------------- dilatation

def test_A_is_two_quasiregular():
    K = dilatation_estimate(strip_A, (0.0, 1.0, -2.0, 2.0), (128, 128))
    assert 1.9 < K <= 2.05


def test_stretch_dilatation_equals_its_slope():
    window = (0.0, 1.0, -2.0, 2.0)
    K = dilatation_field(stretch_map, window, (16, 64))
    ys = -2.0 + (np.arange(64) + 0.5) * 4.0 / 64
    np.testing.assert_allclose(K, np.broadcast_to(strip_l_prime(ys)[:, None], K.shape),
                               rtol=1e-5)


def test_B_is_conformal_off_its_critical_points():
    window = (0.0, 1.0, -2.0, 2.0)
    n = 128
    K = dilatation_field(strip_B, window, (n, n))
    xs = (np.arange(n) + 0.5) / n
    ys = -2.0 + (np.arange(n) + 0.5) * 4.0 / n
    Z = xs[None, :] + 1j * ys[:, None]
    far = np.min(np.abs(Z[..., None] - np.array([0, 0.5, 1])), axis=-1) > 0.05
    assert K[far].max() <= 1.05


# ---------------------------------------------------------------- zeros

def test_zero_counts():
    assert count_zeros(strip_B, (-0.3, 1.3, -1.0, 1.0)) == 6
    assert count_zeros(strip_B, (-0.3, 0.7, -1.0, 1.0)) == 4
    assert count_zeros(strip_B, (0.2, 0.8, 0.1, 1.0)) == 1
    assert count_zeros(strip_A, (-0.3, 1.3, -1.5, 1.5)) == 4
    assert count_zeros(strip_A, (-0.3, 0.7, -1.5, 1.5)) == 2
    assert count_zeros(strip_A, (0.2, 0.8, 0.05, 1.5)) == 0


def test_located_zeros_of_B():
    zeros = locate_zeros(strip_B, (-0.3, 1.3, -1.0, 1.0), strip_B_prime)
    expect = [(0j, 2), (complex(0.5, -RIB_HEIGHT), 1), (complex(0.5, RIB_HEIGHT), 1), (1 + 0j, 2)]
    assert len(zeros) == 4
    for (z, m), (ze, me) in zip(zeros, expect):
        assert m == me
        assert abs(z - ze) < 1e-10


def test_zero_on_contour_is_rejected():
    with pytest.raises(ValueError):
        count_zeros(strip_B, (0.0, 0.5, -0.5, 0.5), samples=8)


# ---------------------------------------------------------------- sequences

bits = st.lists(st.integers(0, 1), max_size=8)
patterns = st.lists(st.integers(0, 1), min_size=1, max_size=5).filter(lambda p: 1 in p)


@given(bits, patterns)
def test_canonical_form_keeps_the_bits(prefix, pattern):
    s = StripSequence(tuple(prefix), Periodic(tuple(pattern)))
    c = s.canonical()
    assert all(s.bit(n) == c.bit(n) for n in range(1, 40))
    assert c == s and hash(c) == hash(s)
    assert StripSequence.parse(str(s)) == s


def test_sequence_rules():
    s = StripSequence.parse("101:ones")
    assert [s.uses_B(n) for n in range(-2, 6)] == [False, False, True, True, False, True, True,
                                                  True]
    assert StripSequence((1, 1), Ones()) == StripSequence((), Periodic((1,)))
    assert StripSequence((0,), Periodic((1, 1))) == StripSequence.parse("0:ones")
    assert StripSequence((), Periodic((0, 1))) != StripSequence((), Periodic((1, 0)))
    with pytest.raises(ValueError):
        Periodic((0, 0))
    with pytest.raises(ValueError):
        StripSequence.parse("12:ones")
    with pytest.raises(ValueError):
        s.bit(0)


# ---------------------------------------------------------------- skeletons

def test_skeleton_ribs_follow_the_rule():
    g = skeleton_from_sequence(StripSequence((1, 0, 1), Ones()), (-3, 6))
    ribs = g.vertebra_ribs()
    assert [n for n, k in ribs.items() if k] == [0, 1, 3, 4, 5]
    assert all(ribs[n] == 0 for n in ribs if n < 0)
    assert all(k in (0, 2) for k in ribs.values())
    assert g.is_tree()


def test_skeleton_vertex_structure():
    g = skeleton_from_sequence(StripSequence((0,), Ones()), (-2, 3))
    spine = [v for v in g.vertices if v.kind == "spine"]
    assert [v.label for v in spine] == [0, 1] * 5 + [0]
    assert [v.position.real for v in spine] == [x / 2 for x in range(-4, 7)]
    ends = [v for v in g.vertices if v.kind == "rib-end"]
    assert all(v.label == 0 for v in ends)
    degree = np.zeros(len(g.vertices), int)
    for i, j in g.edges:
        degree[[i, j]] += 1
    assert all(degree[g.vertices.index(v)] == 1 for v in ends)
    assert ends[0].position == complex(0.5, RIB_HEIGHT)
    assert ends[1].position == complex(0.5, -RIB_HEIGHT)


def test_skeleton_window_errors():
    with pytest.raises(ValueError):
        skeleton_from_sequence(StripSequence(), (0, 1))
    with pytest.raises(ValueError):
        skeleton_from_sequence(StripSequence(), (1, 5))


def test_skeleton_export_format():
    g = skeleton_from_sequence(StripSequence((0,), Ones()), (-1, 2))
    lines = g.export().splitlines()
    nv = len(g.vertices)
    assert lines[0] == "0,spine,-1,0"
    assert lines[1] == "1,spine,-0.5,0"
    assert lines[nv - 2].startswith("0,rib-end,0.5,0.280549926169")
    assert lines[nv - 1].startswith("0,rib-end,0.5,-0.280549926169")
    assert lines[nv:] == [f"{i},{j}" for i, j in g.edges]


@given(bits, patterns, st.integers(1, 10))
def test_equivalence_matches_sequence_agreement(prefix, pattern, depth):
    s1 = StripSequence(tuple(prefix), Periodic(tuple(pattern)))
    for k in range(1, depth + 1):
        flipped = [s1.bit(n) for n in range(1, depth + 1)]
        flipped[k - 1] ^= 1
        s2 = StripSequence(tuple(flipped), Ones())
        assert not skeletons_equivalent(s1, s2, depth)
    same = StripSequence(tuple(s1.bit(n) for n in range(1, depth + 1)), Ones())
    assert skeletons_equivalent(s1, same, depth)


def test_equivalence_examples():
    s = StripSequence.parse("101:ones")
    assert skeletons_equivalent(s, s, 5)
    assert not skeletons_equivalent(s, StripSequence.parse("100:ones"), 3)
    assert skeletons_equivalent(s, StripSequence.parse("100:ones"), 2)
    assert skeletons_equivalent(StripSequence((1,), Ones()), StripSequence((1,), Periodic((1,))),
                                8)
    with pytest.raises(ValueError):
        skeletons_equivalent(s, s, 0)

import cmath
import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from premodels import _kernels as K
from premodels.exceptions import OutsideDomain, PrecisionError
from premodels.lavaurs import (Escaping, NonEscaping, blaschke_atlas, blaschke_horn,
                               end_constant, end_multiplier, horn_array, horn_derivative,
                               horn_map, julia_lavaurs_classify, lavaurs_L, lavaurs_g,
                               lavaurs_shift, make_horn, orbit_to_csv, outside_samples,
                               siegel_orbit_horn, solve_sigma, upper_critical_point)
from premodels.numkit import GOLDEN, RotationTarget

# pinned under the declared normalisation (critical point -> 0, zero repelling constant)
C_UP_0_1 = complex(-1.7679937861361594, -math.pi)
SIGMA_2_5 = complex(0.45720633524682697, 1.6259173514524967)
CRIT_W_2_5 = complex(3.832687377508053, 1.4651163235438907)
BLASCHKE_UPPER = complex(-89.68434672827962, -106.25632699411841)


def sample_points(horn, n, seed=0):
    """Points of the horn map's domain drawn uniformly from one period of the cylinder."""
    from premodels.chessboard import horn_window
    rng = np.random.default_rng(seed)
    x0, x1, y0, y1 = horn_window(horn, margin=0.0)
    w = rng.uniform(x0, x1, 8 * n) + 1j * rng.uniform(y0, y1, 8 * n)
    st_, _ = horn_array(horn, w)
    good = w[st_ == K.INTERIOR]
    assert len(good) >= n
    return good[:n]


@pytest.mark.parametrize("pq", [(0, 1), (2, 5)])
def test_horn_map_commutes_with_unit_translation(atlas, pq):
    h = make_horn(atlas(*pq), 0.3 + 0.1j)
    for w in sample_points(h, 50):
        assert abs(horn_map(h, w + 1) - horn_map(h, w) - 1) < 1e-7


@settings(max_examples=30)
@given(st.floats(-2, 2), st.floats(-1, 1))
def test_phase_is_a_pure_translation(s_re, s_im):
    from premodels.render import atlas_for
    a = atlas_for(2, 5)
    h0, hs = make_horn(a, 0), make_horn(a, complex(s_re, s_im))
    for w in sample_points(h0, 5, seed=int(1000 * (s_re + 3))):
        assert abs(horn_map(hs, w) - horn_map(h0, w) - complex(s_re, s_im)) < 1e-9


def test_horn_map_outside_domain(atlas):
    h = make_horn(atlas(0, 1))
    with pytest.raises(OutsideDomain):
        horn_map(h, 0.0)         # psi_plus(0) = 2.7 escapes


def test_lavaurs_map_semiconjugates_horn_map(atlas):
    a = atlas(2, 5)
    sigma = 0.2 + 0.05j
    h = make_horn(a, sigma)
    worst, used = 0.0, 0
    for w in sample_points(h, 80, seed=3):
        try:
            lhs = lavaurs_g(a, sigma, a.psi_plus(w))
            rhs = a.psi_plus(horn_map(h, w))
        except PrecisionError:          # one side leaves double range: not defined here
            continue
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
        used += 1
    assert used >= 50 and worst < 1e-7


def test_lavaurs_map_at_critical_point(atlas):
    a = atlas(0, 1)
    assert lavaurs_g(a, 0, -0.5) == a.psi_plus(0)
    with pytest.raises(OutsideDomain):
        lavaurs_g(a, 0, 3.0)


def test_lavaurs_L_and_g_agree_up_to_iterates(atlas):
    a = atlas(2, 5)
    p = a.parent
    sigma = 0.1
    rng = np.random.default_rng(2)
    seen = set()
    in_target_petal = 0.05 * a.att_dirs[a.target]
    zs = p.critical_point + rng.normal(scale=0.2, size=60) * (1 - 0.5j)
    for z in np.append(zs, in_target_petal):
        try:
            k = lavaurs_shift(a, z)
            g = lavaurs_g(a, sigma, z)
            L = lavaurs_L(a, sigma, z)
        except OutsideDomain:
            continue
        for _ in range(k):
            L = p(L)
        assert abs(g - L) < 1e-7 * max(1.0, abs(g))
        seen.add(k)
    assert 0 in seen and len(seen) >= 3


def test_lavaurs_L_equals_g_for_one_axis(atlas):
    a = atlas(0, 1)
    for z in (-0.5, -0.3 + 0.1j, -0.7 - 0.2j):
        assert lavaurs_L(a, 0.4, z) == lavaurs_g(a, 0.4, z)


def test_end_constant_pin_and_symmetry(atlas):
    a = atlas(0, 1)
    c_up, c_lo = end_constant(a, "upper"), end_constant(a, "lower")
    assert abs(c_up - C_UP_0_1) < 1e-12
    # the map is real, so the two ends are mirror images
    assert abs(c_lo - c_up.conjugate()) < 1e-12


def test_end_constant_certificate_under_doubled_height(atlas):
    a = atlas(2, 5)
    assert abs(end_constant(a, "upper", Y0=4.0) - end_constant(a, "upper", Y0=8.0)) < 1e-6


@given(st.floats(-1, 1), st.floats(-0.3, 0.3))
def test_end_multiplier_phase_law(s_re, s_im):
    from premodels.render import atlas_for
    a = atlas_for(2, 5)
    s = complex(s_re, s_im)
    m0, ms = end_multiplier(make_horn(a, 0.0)), end_multiplier(make_horn(a, s))
    assert abs(ms - cmath.exp(2j * math.pi * s) * m0) < 1e-8 * abs(ms)


def test_sigma_solver(atlas, golden):
    a = atlas(2, 5)
    s = solve_sigma(a, golden)
    assert abs(s.sigma - SIGMA_2_5) < 1e-12 and 0 <= s.sigma.real < 1
    assert abs(end_multiplier(make_horn(a, s)) - cmath.exp(2j * math.pi * GOLDEN)) < 1e-6
    shifted = solve_sigma(a, GOLDEN + 1.0)
    assert abs(shifted.sigma - s.sigma) < 1e-12


def test_sigma_solver_refuses_rational(atlas):
    from premodels.exceptions import RationalInputError
    with pytest.raises(RationalInputError):
        solve_sigma(atlas(2, 5), RotationTarget.from_value(0.4))


def test_upper_critical_point(atlas, golden):
    a = atlas(2, 5)
    h = make_horn(a, solve_sigma(a, golden))
    w, v = upper_critical_point(h)
    assert abs(horn_derivative(h, w)) < 1e-6
    assert abs(w - CRIT_W_2_5) < 1e-9
    # the critical value lies on the horizontal line through the phase
    assert abs(v.imag - h.sigma.imag) < 1e-9
    w1, v1 = upper_critical_point(h, x0=1.0)
    assert abs(w1 - w - 1) < 1e-9 and abs(v1 - v - 1) < 1e-9


def test_julia_lavaurs_classification(atlas, golden):
    a = atlas(2, 5)
    s = solve_sigma(a, golden)
    assert julia_lavaurs_classify(a, s, 20.0) == Escaping(0, 0)
    # critical orbit of the Lavaurs map stays in the virtual Siegel disk
    assert julia_lavaurs_classify(a, s, a.parent.critical_point, 50) == NonEscaping()
    # found by a grid search: one Lavaurs step sends this basin point out of the escape disk
    z_out = a.parent.critical_point + complex(-0.5, 0.04)
    assert abs(lavaurs_g(a, s, z_out)) > a.escape_R
    res = julia_lavaurs_classify(a, s, z_out, 5)
    assert isinstance(res, Escaping) and res.level == 1


def test_raising_budgets_never_unescapes(atlas):
    a = atlas(2, 5)
    rng = np.random.default_rng(8)
    c = a.parent.critical_point
    for z in c + rng.normal(scale=0.4, size=40) + 1j * rng.normal(scale=0.4, size=40):
        lo = julia_lavaurs_classify(a, 0.3, z, 5)
        hi = julia_lavaurs_classify(a, 0.3, z, 20)
        if isinstance(lo, Escaping):
            assert hi == lo


def test_siegel_orbit_of_horn_map_stays_compactly_inside(atlas, golden):
    a = atlas(2, 5)
    h = make_horn(a, solve_sigma(a, golden))
    stats = siegel_orbit_horn(h, 2000)
    assert stats["min_dist_outside"] > 0.1
    assert stats["max_im"] < -end_constant(a, "upper").imag + 2.5
    single = siegel_orbit_horn(h, 0)
    assert len(single["orbit"]) == 1 and single["max_im"] == single["min_im"]
    buf = io.StringIO()
    orbit_to_csv(stats["orbit"][:3], buf)
    assert buf.getvalue().splitlines()[0] == "n,re,im" and len(buf.getvalue().splitlines()) == 4


def test_outside_samples_exist(atlas):
    pts = outside_samples(make_horn(atlas(2, 5)), nx=32, ny=48)
    assert len(pts) > 0


def test_blaschke_horn_map():
    for z in (0.3 + 0.5j, -0.2 + 2.0j, 0.7 - 0.4j, 0.1 - 3.0j):
        assert abs(blaschke_horn(z + 1) - blaschke_horn(z) - 1) < 1e-7
    with pytest.raises(OutsideDomain):
        blaschke_horn(0.5)
    m = end_multiplier(make_horn(blaschke_atlas(), 0.0), "upper")
    assert abs(m - BLASCHKE_UPPER) < 1e-6 * abs(BLASCHKE_UPPER)


@settings(max_examples=40)
@given(st.floats(0, 1), st.floats(0.01, 6))
def test_blaschke_horn_defined_off_real_line(x, y):
    for w in (complex(x, y), complex(x, -y)):
        blaschke_horn(w)

import cmath
import io
import math

import numpy as np
import pytest

from premodels.exceptions import EscapeError, RationalInputError, SmallDivisorError
from premodels.numkit import GOLDEN, RotationTarget
from premodels.siegel import boundary_rotation_check, critical_orbit, linearizer

# root-test radius for the golden rotation number at m = 200
RADIUS_GOLDEN_200 = 0.3402


@pytest.fixture(scope="module")
def series200():
    return linearizer(RotationTarget.golden(), 200)


def test_low_order_coefficients(series200):
    rho = series200.rho
    assert series200.coeffs[0] == 1
    assert series200.coeffs[1] == pytest.approx(1 / (rho**2 - rho), rel=1e-14)
    h2 = series200.coeffs[1]
    assert series200.coeffs[2] == pytest.approx(2 * h2 / (rho**3 - rho), rel=1e-14)


def test_coefficient_recursion_is_exact(series200):
    h = np.concatenate([[0], series200.coeffs])
    rho = series200.rho
    for n in range(2, 60):
        rhs = sum(h[k] * h[n - k] for k in range(1, n))
        assert (rho**n - rho) * h[n] == pytest.approx(rhs, rel=1e-12, abs=1e-300)


def test_functional_residual_inside_half_radius(series200):
    r = 0.5 * series200.radius_estimate
    w = r * np.sqrt(np.linspace(0, 1, 40))[:, None] * np.exp(2j * np.pi * np.linspace(0, 1, 64))
    assert series200.functional_residual(w.ravel()).max() < 1e-8


def test_radius_pin_and_stability(series200):
    r100 = linearizer(RotationTarget.golden(), 100).radius_estimate
    assert series200.radius_estimate == pytest.approx(RADIUS_GOLDEN_200, abs=5e-4)
    assert abs(r100 / series200.radius_estimate - 1) < 0.05


def test_radius_symmetric_under_reflection():
    a = linearizer(RotationTarget.golden(), 120)
    b = linearizer(RotationTarget.from_value(1 - GOLDEN), 120)
    assert a.radius_estimate == pytest.approx(b.radius_estimate, rel=1e-8)
    np.testing.assert_allclose(b.coeffs[:40], np.conj(a.coeffs[:40]), rtol=1e-8)


def test_small_divisor_guard_names_order():
    near_third = RotationTarget.from_cf([3, 10**13])
    with pytest.raises(SmallDivisorError) as exc:
        linearizer(near_third, 10)
    assert exc.value.depth == 4
    with pytest.raises(ValueError):
        linearizer(RotationTarget.golden(), 1)


def test_coefficients_csv(series200):
    buf = io.StringIO()
    series200.to_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "n,re,im" and lines[1] == "1,1,0"
    assert len(lines) == 201
    n, re, im = lines[2].split(",")
    assert complex(float(re), float(im)) == series200.coeffs[1]


@pytest.fixture(scope="module")
def orbit_long():
    return critical_orbit(RotationTarget.golden(), 100_000)


def test_critical_orbit_is_bounded(orbit_long):
    assert len(orbit_long) == 100_001
    assert orbit_long.max_abs < 2
    assert orbit_long.tail_min_abs > 0


def test_first_orbit_point():
    rho = RotationTarget.golden().rho
    orb = critical_orbit(RotationTarget.golden(), 3)
    assert orb.orbit[0] == -rho / 2
    assert orb.orbit[1] == pytest.approx(-rho**2 / 4, abs=1e-15)


def test_orbit_is_reproducible():
    a = critical_orbit(RotationTarget.golden(), 5000).orbit
    b = critical_orbit(RotationTarget.golden(), 5000).orbit
    assert a.tobytes() == b.tobytes()


def test_rational_and_escaping_inputs():
    with pytest.raises(RationalInputError):
        critical_orbit(RotationTarget.from_value(0.4), 10)



class RepellingTarget(RotationTarget):
    """Golden target whose multiplier is pushed off the unit circle."""

    @property
    def rho(self):
        return 3 * RotationTarget.golden().rho


def test_escape_is_reported_with_its_index():
    with pytest.raises(EscapeError) as exc:
        critical_orbit(RepellingTarget(GOLDEN, (1,) * 20, 1), 100)
    assert exc.value.index >= 1


def test_rotation_combinatorics_golden(orbit_long):
    assert boundary_rotation_check(orbit_long, RotationTarget.golden(), 2000) is True


def test_rigid_rotation_passes_for_any_angle():
    for theta in (GOLDEN, math.sqrt(2) - 1, math.e - 2):
        t = RotationTarget.from_value(theta)
        pts = 0.3 * np.exp(2j * math.pi * theta * np.arange(500)) + 0.1
        assert boundary_rotation_check(pts, t, 500, center=0.1) is True


def test_mismatched_angle_fails():
    pts = np.exp(2j * math.pi * GOLDEN * np.arange(300))
    assert boundary_rotation_check(pts, RotationTarget.from_value(math.sqrt(2) - 1), 50) is False


def test_check_argument_validation(orbit_long):
    with pytest.raises(ValueError):
        boundary_rotation_check(orbit_long.orbit[:10], RotationTarget.golden(), 20)
    assert boundary_rotation_check(np.ones(10, complex) * cmath.exp(1j), RotationTarget.golden(),
                                   10) is None

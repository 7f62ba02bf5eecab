import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from risfocus.geometry import (
    AngleDirection,
    ArrayGeometry,
    Wave,
    array_factor,
    combined_cosine,
    direction_cosines,
    steering_from_cosines,
    steering_vector,
    wrap_azimuth,
)

from conftest import WAVE, directions, quarter


@pytest.mark.parametrize("el, az, expected", [
    (math.pi / 2, 0.0, (1.0, 0.0, 0.0)),
    (0.0, 1.3, (0.0, 0.0, 1.0)),
    (math.pi / 2, math.pi / 2, (0.0, 1.0, 0.0)),
])
def test_direction_cosines_axes(el, az, expected):
    c = direction_cosines(AngleDirection(el, az))
    assert (c.ax, c.ay, c.az) == pytest.approx(expected, abs=1e-15)


@given(directions)
def test_direction_cosines_unit_norm(a):
    c = direction_cosines(a)
    assert abs(c.ax**2 + c.ay**2 + c.az**2 - 1.0) < 1e-12


@pytest.mark.parametrize("t, r, axis, expected", [
    ((math.pi / 2, 0.0), (math.pi / 2, math.pi), "x", 0.0),
    ((math.pi / 2, 0.0), (math.pi / 2, 0.0), "x", 2.0),
    ((math.pi / 2, math.pi / 3), (math.pi / 2, 2 * math.pi / 3), "z", 0.0),
])
def test_combined_cosine(t, r, axis, expected):
    assert combined_cosine(AngleDirection(*t), AngleDirection(*r), axis) == pytest.approx(
        expected, abs=1e-15)


def test_angle_normalisation():
    a = AngleDirection(1.0, -math.pi / 2)
    assert a.azimuth == pytest.approx(3 * math.pi / 2)
    assert AngleDirection(1.0, 4 * math.pi).azimuth == 0.0
    assert 0.0 <= wrap_azimuth(-1e-18) < 2 * math.pi
    with pytest.raises(ValueError):
        AngleDirection(-0.1, 0.0)
    with pytest.raises(ValueError):
        AngleDirection(math.pi + 1e-9, 0.0)
    assert AngleDirection.from_degrees(90, 30).to_degrees() == pytest.approx((90, 30))


def test_wave_and_geometry_validation():
    w = Wave(0.0107)
    assert abs(w.wavenumber * w.wavelength - 2 * math.pi) < 1e-12
    with pytest.raises(ValueError):
        Wave(0.0)
    with pytest.raises(ValueError):
        ArrayGeometry(0, 1, 1, 1, 1, 1)
    with pytest.raises(ValueError):
        ArrayGeometry(2, 2, 1, -1, 1, 1)
    assert quarter(7, 5).n == 35


def test_steering_single_element():
    g = quarter(1, 1)
    assert np.array_equal(steering_vector(g, AngleDirection(0.7, 2.0), WAVE), [1.0])


def test_steering_zenith_has_no_x_gradient():
    v = steering_vector(quarter(2, 1), AngleDirection(0.0, 0.0), WAVE)
    np.testing.assert_allclose(v, [1, 1], atol=1e-15)


def test_steering_hand_evaluated_ordering():
    # A_x = 1, A_z = 0, k d = pi/2: x factor [1, j], z factor [1, 1]
    v = steering_vector(quarter(2, 2), AngleDirection(math.pi / 2, 0.0), WAVE)
    np.testing.assert_allclose(v, [1, 1, 1j, 1j], atol=1e-15)


@given(directions, st.integers(1, 6), st.integers(1, 6))
def test_steering_unit_modulus_and_kronecker(a, nx, nz):
    g = quarter(nx, nz)
    v = steering_vector(g, a, WAVE)
    assert v[0] == 1
    assert np.max(np.abs(np.abs(v) - 1)) < 1e-12
    c = direction_cosines(a)
    x = array_factor(nx, g.dx, c.ax, WAVE)
    z = array_factor(nz, g.dz, c.az, WAVE)
    assert np.array_equal(v, np.kron(x, z))


@given(st.floats(-2, 2), st.floats(-2, 2))
def test_steering_conjugation_symmetry(ax, az):
    g = quarter(4, 3)
    plus = steering_from_cosines(g, ax, az, WAVE)
    minus = steering_from_cosines(g, -ax, -az, WAVE)
    assert np.max(np.abs(plus - minus.conj())) < 1e-12

import cmath
import math

import numpy as np
import pytest
from hypothesis import strategies as st

from risfocus.geometry import AngleDirection, ArrayGeometry, Wave
from risfocus.ris import RayPair

ACCEPTANCE_LINES: list[str] = []

WAVE = Wave(0.01)


def quarter(nx, nz, wave=WAVE):
    return ArrayGeometry.in_wavelengths(nx, nz, wave)


def random_direction(rng, planar=False):
    el = math.pi / 2 if planar else rng.uniform(0.0, math.pi)
    return AngleDirection(el, rng.uniform(0.0, 2 * math.pi))


def random_pair(rng, planar=False):
    return RayPair(random_direction(rng, planar), random_direction(rng, planar))


def summed_response(coeffs, g, wave, ray, gbar):
    """Element-by-element double loop over the response sum; shares no code with the library."""
    t, r = ray.incident, ray.reflected
    ax = math.sin(t.elevation) * math.cos(t.azimuth) + math.sin(r.elevation) * math.cos(r.azimuth)
    az = math.cos(t.elevation) + math.cos(r.elevation)
    k = 2 * math.pi / wave.wavelength
    total = 0j
    for ix in range(g.nx):
        for iz in range(g.nz):
            total += (cmath.exp(1j * k * g.dx * ax * ix) * cmath.exp(1j * k * g.dz * az * iz)
                      * coeffs[ix * g.nz + iz])
    return gbar * total


directions = st.builds(
    AngleDirection,
    st.floats(0.0, math.pi, allow_nan=False),
    st.floats(-10.0, 10.0, allow_nan=False),
)
ray_pairs = st.builds(RayPair, directions, directions)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

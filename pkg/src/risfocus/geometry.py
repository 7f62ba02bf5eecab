"""Angles, direction cosines and planar-array steering vectors.

Panels lie in their local x-z plane. A direction is an (elevation, azimuth)
pair in radians: elevation from the +z axis, azimuth from +x towards +y.
Vectors over the N = nx * nz elements are ordered x-index outer, z-index
inner, i.e. ``np.kron(x_factor, z_factor)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

TWO_PI = 2.0 * math.pi

Axis = Literal["x", "y", "z"]


def wrap_azimuth(phi: float) -> float:
    """Map an angle in radians onto [0, 2pi)."""
    wrapped = math.fmod(phi, TWO_PI)
    if wrapped < 0.0:
        wrapped += TWO_PI
    # fmod of a tiny negative number lands on 2pi after the shift
    if wrapped >= TWO_PI:
        wrapped = 0.0
    return wrapped


@dataclass(frozen=True)
class AngleDirection:
    """Propagation direction in a panel's local frame (radians)."""

    elevation: float
    azimuth: float

    def __post_init__(self):
        el = float(self.elevation)
        if not (0.0 <= el <= math.pi) or math.isnan(el):
            raise ValueError(f"elevation {el!r} outside [0, pi]")
        az = float(self.azimuth)
        if not math.isfinite(az):
            raise ValueError(f"azimuth {az!r} is not finite")
        object.__setattr__(self, "elevation", el)
        object.__setattr__(self, "azimuth", wrap_azimuth(az))

    @classmethod
    def from_degrees(cls, elevation: float, azimuth: float) -> AngleDirection:
        return cls(math.radians(elevation), math.radians(azimuth))

    def to_degrees(self) -> tuple[float, float]:
        return math.degrees(self.elevation), math.degrees(self.azimuth)


@dataclass(frozen=True)
class DirectionCosines:
    ax: float
    ay: float
    az: float

    def __getitem__(self, axis: Axis) -> float:
        return {"x": self.ax, "y": self.ay, "z": self.az}[axis]


@dataclass(frozen=True)
class Wave:
    """Carrier described by its wavelength in meters."""

    wavelength: float

    def __post_init__(self):
        if not self.wavelength > 0:
            raise ValueError("wavelength must be positive")

    @property
    def wavenumber(self) -> float:
        return TWO_PI / self.wavelength


@dataclass(frozen=True)
class ArrayGeometry:
    """Uniform rectangular planar array: element grid, spacing and unit cell.

    Spacings and unit-cell sides are in meters.
    """

    nx: int
    nz: int
    dx: float
    dz: float
    unit_cell_x: float
    unit_cell_z: float

    def __post_init__(self):
        if int(self.nx) != self.nx or int(self.nz) != self.nz:
            raise ValueError("element counts must be integers")
        if self.nx < 1 or self.nz < 1:
            raise ValueError("element counts must be >= 1")
        for name in ("dx", "dz", "unit_cell_x", "unit_cell_z"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        object.__setattr__(self, "nx", int(self.nx))
        object.__setattr__(self, "nz", int(self.nz))

    @property
    def n(self) -> int:
        return self.nx * self.nz

    @classmethod
    def in_wavelengths(
        cls,
        nx: int,
        nz: int,
        wave: Wave,
        spacing: tuple[float, float] = (0.25, 0.25),
        unit_cell: tuple[float, float] = (0.25, 0.25),
    ) -> ArrayGeometry:
        """Build a geometry with spacings and unit cell given in wavelengths."""
        lam = wave.wavelength
        return cls(nx, nz, spacing[0] * lam, spacing[1] * lam,
                   unit_cell[0] * lam, unit_cell[1] * lam)


def direction_cosines(a: AngleDirection) -> DirectionCosines:
    st = math.sin(a.elevation)
    return DirectionCosines(st * math.cos(a.azimuth), st * math.sin(a.azimuth),
                            math.cos(a.elevation))


def combined_cosine(t: AngleDirection, r: AngleDirection, axis: Axis) -> float:
    """Sum of the ``axis`` direction cosines of an incident and a reflected direction."""
    return direction_cosines(t)[axis] + direction_cosines(r)[axis]


def array_factor(count: int, spacing: float, cosine, wave: Wave) -> np.ndarray:
    """One-dimensional factor ``exp(1j * k * d * cosine * n)`` for n in [0, count).

    ``cosine`` may be a scalar or an array; the element index is the last axis.
    """
    n = np.arange(count)
    cosine = np.asarray(cosine, dtype=float)
    return np.exp(1j * wave.wavenumber * spacing * cosine[..., None] * n)


def kron_rows(x: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Row-wise Kronecker product of ``(..., nx)`` and ``(..., nz)`` arrays."""
    return (x[..., :, None] * z[..., None, :]).reshape(*x.shape[:-1], -1)


def steering_vector(g: ArrayGeometry, a: AngleDirection, w: Wave) -> np.ndarray:
    c = direction_cosines(a)
    return steering_from_cosines(g, c.ax, c.az, w)


def steering_from_cosines(g: ArrayGeometry, ax, az, w: Wave) -> np.ndarray:
    """Steering vector(s) for explicit x and z cosines; broadcasts over leading axes."""
    return kron_rows(array_factor(g.nx, g.dx, ax, w), array_factor(g.nz, g.dz, az, w))

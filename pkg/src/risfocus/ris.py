"""RIS response function, linear phase-shift codewords and the linear codebook."""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from .geometry import (
    AngleDirection,
    ArrayGeometry,
    Wave,
    direction_cosines,
    steering_from_cosines,
)

UNIT_MODULUS_TOL = 1e-9
# below this |sin(psi/2)| the geometric sum is replaced by its limit
DIRICHLET_EPS = 1e-12


@dataclass(frozen=True)
class RayPair:
    """Incident direction (AoA at the RIS) and reflected direction (AoD from it)."""

    incident: AngleDirection
    reflected: AngleDirection

    def combined(self) -> tuple[float, float]:
        """Combined x and z direction cosines of the pair."""
        t = direction_cosines(self.incident)
        r = direction_cosines(self.reflected)
        return t.ax + r.ax, t.az + r.az


@dataclass(frozen=True, eq=False)
class PhaseVector:
    """Unit-modulus reflection coefficients of one RIS, ordered like steering vectors."""

    coefficients: np.ndarray
    geometry: ArrayGeometry

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=complex).reshape(-1)
        if c.size != self.geometry.n:
            raise ValueError(
                f"codeword has {c.size} entries, geometry expects {self.geometry.n}")
        dev = np.max(np.abs(np.abs(c) - 1.0)) if c.size else 0.0
        if dev > UNIT_MODULUS_TOL:
            raise ValueError(f"coefficients are not unit modulus (max deviation {dev:.3g})")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    @classmethod
    def from_phases(cls, phases, geometry: ArrayGeometry) -> PhaseVector:
        return cls(np.exp(1j * np.asarray(phases, dtype=float)), geometry)

    @property
    def phases(self) -> np.ndarray:
        """Per-element phase in radians, in (-pi, pi]."""
        return np.angle(self.coefficients)

    def __len__(self):
        return self.coefficients.size


def unit_cell_factor(g: ArrayGeometry, w: Wave) -> float:
    return 4.0 * math.pi * g.unit_cell_x * g.unit_cell_z / w.wavelength**2


def response_vector(g: ArrayGeometry, w: Wave, ray: RayPair) -> np.ndarray:
    ax, az = ray.combined()
    return steering_from_cosines(g, ax, az, w)


def response_matrix(g: ArrayGeometry, w: Wave, rays: Sequence[RayPair]) -> np.ndarray:
    """Stack of response vectors, shape ``(len(rays), N)``."""
    if not rays:
        return np.zeros((0, g.n), dtype=complex)
    cos = np.array([r.combined() for r in rays])
    return steering_from_cosines(g, cos[:, 0], cos[:, 1], w)


def _check(p: PhaseVector, g: ArrayGeometry):
    if len(p) != g.n:
        raise ValueError(f"codeword length {len(p)} does not match geometry size {g.n}")


def response(p: PhaseVector, g: ArrayGeometry, w: Wave, ray: RayPair, gbar: float) -> complex:
    """Complex RIS response for one incident/reflected pair.

    Sums ``gbar * exp(j k (dx Ax nx + dz Az nz)) * p[nx, nz]`` over the
    elements. In inner-product form this is ``gbar * conj(p)^H a`` with ``a``
    the response vector, i.e. the stored coefficients are the conjugate of
    the vector that multiplies ``a`` through a Hermitian transpose.
    """
    _check(p, g)
    return complex(gbar * (response_vector(g, w, ray) @ p.coefficients))


def responses(p: PhaseVector, g: ArrayGeometry, w: Wave, rays: Sequence[RayPair],
              gbar: float) -> np.ndarray:
    _check(p, g)
    return gbar * (response_matrix(g, w, rays) @ p.coefficients)


def normalized_gain(value, gbar: float, n: int):
    """|g / (gbar * N)|^2 for scalar or array responses."""
    return np.abs(np.asarray(value) / (gbar * n)) ** 2


def linear_codeword(g: ArrayGeometry, w: Wave, design: RayPair) -> PhaseVector:
    """Phase-gradient codeword that co-phases every element for the design pair."""
    ax, az = design.combined()
    return PhaseVector(np.conj(steering_from_cosines(g, ax, az, w)), g)


def geometric_sum(psi, count: int):
    """``sum_{n<count} exp(j psi n)`` in Dirichlet-kernel form.

    Where ``|sin(psi/2)|`` is below ``DIRICHLET_EPS`` the removable singularity
    is filled with its limit, ``count``.
    """
    psi = np.asarray(psi, dtype=float)
    half = np.sin(psi / 2.0)
    singular = np.abs(half) < DIRICHLET_EPS
    safe = np.where(singular, 1.0, half)
    out = np.exp(0.5j * psi * (count - 1)) * np.sin(count * psi / 2.0) / safe
    out = np.where(singular, complex(count), out)
    return out[()] if out.ndim == 0 else out


def linear_response(g: ArrayGeometry, w: Wave, ray: RayPair, design: RayPair,
                    gbar: float) -> complex:
    """Closed-form response of the linear codeword for ``design`` evaluated at ``ray``."""
    ax, az = ray.combined()
    ax0, az0 = design.combined()
    k = w.wavenumber
    fx = geometric_sum(k * g.dx * (ax - ax0), g.nx)
    fz = geometric_sum(k * g.dz * (az - az0), g.nz)
    return complex(gbar * fx * fz)


def linear_codebook(
    g: ArrayGeometry, w: Wave, arrivals: Iterable[tuple[object, RayPair]]
) -> dict[object, PhaseVector]:
    """One linear codeword per target RIS.

    ``arrivals`` yields ``(target_id, RayPair)`` where the pair is the LoS AoA
    from the BS and the LoS AoD towards that target. Order is preserved.
    """
    book: dict[object, PhaseVector] = {}
    for target, design in arrivals:
        if target in book:
            raise ValueError(f"duplicate target {target!r}")
        book[target] = linear_codeword(g, w, design)
    return book

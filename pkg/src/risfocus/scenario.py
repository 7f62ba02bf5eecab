"""Multi-RIS deployments: placements, LoS geometry and seeded NLoS rays.

Global frame: BS at the origin, azimuth measured from +x in the horizontal
plane. Each node carries a yaw; a global azimuth ``a`` reads ``a - yaw`` in
the node's local frame. Link keys are ``(from_id, to_id)`` with the BS
identified as ``"BS"`` and RISs as integers starting at 1.
"""

from __future__ import annotations

import hashlib
import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .geometry import AngleDirection, ArrayGeometry, Wave, wrap_azimuth
from .ris import RayPair, unit_cell_factor

BS = "BS"
HORIZON = math.pi / 2

# layout of the 4-RIS reference deployment
PAPER_DISTANCES_M = (50.0, 60.0, 40.0, 20.0)
PAPER_AOD_BS_DEG = (30.0, 70.0, 110.0, 135.0)
PAPER_AOA_RIS_DEG = (145.0, 90.0, 45.0, 10.0)
PAPER_RAYS = 3
PAPER_BS_ELEMENTS = (10, 5)
DEFAULT_WAVELENGTH_M = 0.01


@dataclass(frozen=True, eq=False)
class Placement:
    position: np.ndarray
    yaw: float = 0.0

    def __post_init__(self):
        pos = np.array(self.position, dtype=float).reshape(3)
        pos.setflags(write=False)
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "yaw", wrap_azimuth(float(self.yaw)))

    def to_local(self, global_azimuth: float) -> float:
        return wrap_azimuth(global_azimuth - self.yaw)

    def to_global(self, local_azimuth: float) -> float:
        return wrap_azimuth(local_azimuth + self.yaw)


@dataclass(frozen=True)
class Ray:
    """One propagation path: departure direction at the source, arrival at the sink."""

    aod: AngleDirection
    aoa: AngleDirection


@dataclass(frozen=True)
class LinkRays:
    source: object
    target: object
    rays: tuple[Ray, ...]

    def __post_init__(self):
        if not self.rays:
            raise ValueError(f"link {self.source}->{self.target} has no rays")
        object.__setattr__(self, "rays", tuple(self.rays))

    @property
    def los(self) -> Ray:
        return self.rays[0]

    def __len__(self):
        return len(self.rays)


@dataclass(frozen=True)
class Node:
    id: object
    placement: Placement
    geometry: ArrayGeometry


@dataclass(frozen=True, eq=False)
class Scenario:
    bs: Node
    ris: tuple[Node, ...]
    links: dict
    wave: Wave
    seed: int | None = None
    angle_spread: float = 0.0
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "ris", tuple(self.ris))
        index = {node.id: node for node in self.ris}
        if len(index) != len(self.ris):
            raise ValueError("duplicate RIS identifiers")
        if BS in index:
            raise ValueError(f"{BS!r} is reserved for the base station")
        object.__setattr__(self, "_index", index)
        for rid in index:
            if (BS, rid) not in self.links:
                raise ValueError(f"missing link BS->{rid}")
            for other in index:
                if other != rid and (rid, other) not in self.links:
                    raise ValueError(f"missing link {rid}->{other}")

    @property
    def ris_ids(self) -> list:
        return [node.id for node in self.ris]

    def ris_node(self, rid) -> Node:
        try:
            return self._index[rid]
        except KeyError:
            raise KeyError(f"unknown RIS id {rid!r}") from None

    def link(self, a, b) -> LinkRays:
        try:
            return self.links[(a, b)]
        except KeyError:
            raise KeyError(f"no link {a!r}->{b!r}") from None

    def targets(self, source) -> list:
        self.ris_node(source)
        return [rid for rid in self.ris_ids if rid != source]

    def gbar(self, rid) -> float:
        return unit_cell_factor(self.ris_node(rid).geometry, self.wave)

    def bs_arrivals(self, rid) -> list[AngleDirection]:
        """AoAs at RIS ``rid`` of every BS ray, LoS first."""
        return [ray.aoa for ray in self.link(BS, rid).rays]

    def departures(self, source, target) -> list[AngleDirection]:
        """AoDs at ``source`` of every ray towards ``target``, LoS first."""
        self.ris_node(target)
        return [ray.aod for ray in self.link(source, target).rays]

    def design_pair(self, source, target) -> RayPair:
        """LoS-to-LoS pair that the linear codeword of ``source -> target`` focuses."""
        return RayPair(self.bs_arrivals(source)[0], self.departures(source, target)[0])

    def ray_pairs(self, source, target) -> list[list[RayPair]]:
        """Grid of pairs indexed ``[l2][l1]``: BS ray ``l2`` at ``source``, ray ``l1`` to ``target``."""
        return [[RayPair(t, r) for r in self.departures(source, target)]
                for t in self.bs_arrivals(source)]


def derive_layout(d_bs: Sequence[float], aod_bs: Sequence[float],
                  aoa_ris: Sequence[float]) -> list[Placement]:
    """Place each RIS along its BS departure azimuth and orient it.

    RIS ``i`` sits at ``d_i (cos aod_i, sin aod_i, 0)``. The BS lies in global
    direction ``aod_i + pi`` from the RIS, so the yaw ``aod_i + pi - aoa_i``
    makes the local arrival azimuth equal ``aoa_i``. Angles in radians.
    """
    if not (len(d_bs) == len(aod_bs) == len(aoa_ris)):
        raise ValueError("distance and angle lists must have equal length")
    out = []
    for d, t, r in zip(d_bs, aod_bs, aoa_ris):
        if not d > 0:
            raise ValueError(f"BS-RIS distance must be positive, got {d}")
        pos = (d * math.cos(t), d * math.sin(t), 0.0)
        out.append(Placement(pos, t + math.pi - r))
    return out


def global_azimuth(a: Placement, b: Placement) -> float:
    """Horizontal azimuth of the displacement from ``a`` to ``b``."""
    dx, dy, _ = b.position - a.position
    if math.hypot(dx, dy) == 0.0:
        raise ValueError("coincident placements")
    return wrap_azimuth(math.atan2(dy, dx))


def los_ray(a: Placement, b: Placement) -> Ray:
    alpha = global_azimuth(a, b)
    return Ray(AngleDirection(HORIZON, a.to_local(alpha)),
               AngleDirection(HORIZON, b.to_local(alpha + math.pi)))


def los_inter_ris_rays(placements: Sequence[Placement], ids: Sequence | None = None
                       ) -> dict[tuple, LinkRays]:
    """LoS-only links for every ordered RIS pair."""
    if len(placements) < 2:
        raise ValueError("need at least two placements")
    ids = list(ids) if ids is not None else list(range(1, len(placements) + 1))
    links = {}
    for i, pi in zip(ids, placements):
        for j, pj in zip(ids, placements):
            if i != j:
                links[(i, j)] = LinkRays(i, j, (los_ray(pi, pj),))
    return links


def sample_nlos(rng: np.random.Generator, los: AngleDirection, spread: float,
                count: int) -> list[AngleDirection]:
    """``count`` horizontal directions with azimuth uniform in ``los.azimuth +/- spread``."""
    if count < 0 or spread < 0:
        raise ValueError("count and spread must be non-negative")
    az = rng.uniform(los.azimuth - spread, los.azimuth + spread, size=count)
    if spread == 0:
        az = np.full(count, los.azimuth)
    return [AngleDirection(HORIZON, float(a)) for a in az]


def link_rng(seed: int, source, target) -> np.random.Generator:
    """Independent generator for one link, keyed by hashing (seed, source, target)."""
    digest = hashlib.sha256(f"{source}->{target}".encode()).digest()
    key = int.from_bytes(digest[:8], "little")
    return np.random.default_rng(np.random.SeedSequence([int(seed), key]))


def with_nlos(los: Ray, rng: np.random.Generator, spread: float, count: int) -> tuple[Ray, ...]:
    """LoS ray followed by ``count`` NLoS rays; AoD and AoA drawn independently."""
    aods = sample_nlos(rng, los.aod, spread, count)
    aoas = sample_nlos(rng, los.aoa, spread, count)
    return (los, *(Ray(d, a) for d, a in zip(aods, aoas)))


def paper_scenario(seed: int, n_elements: tuple[int, int] = (7, 7),
                   spread: float = math.radians(10.0), rays: int = PAPER_RAYS,
                   wave: Wave | None = None) -> Scenario:
    """The 4-RIS reference deployment with seeded NLoS rays.

    Spacing and unit cells are a quarter wavelength on the BS and on every RIS.
    """
    wave = wave or Wave(DEFAULT_WAVELENGTH_M)
    placements = derive_layout(PAPER_DISTANCES_M,
                               [math.radians(a) for a in PAPER_AOD_BS_DEG],
                               [math.radians(a) for a in PAPER_AOA_RIS_DEG])
    ids = list(range(1, len(placements) + 1))
    bs = Node(BS, Placement((0.0, 0.0, 0.0)),
              ArrayGeometry.in_wavelengths(*PAPER_BS_ELEMENTS, wave))
    ris_geom = ArrayGeometry.in_wavelengths(*n_elements, wave)
    ris = tuple(Node(i, p, ris_geom) for i, p in zip(ids, placements))

    links = {}
    for node in ris:
        los = los_ray(bs.placement, node.placement)
        links[(BS, node.id)] = LinkRays(
            BS, node.id, with_nlos(los, link_rng(seed, BS, node.id), spread, rays - 1))
    for (i, j), link in los_inter_ris_rays(placements, ids).items():
        links[(i, j)] = LinkRays(
            i, j, with_nlos(link.los, link_rng(seed, i, j), spread, rays - 1))
    return Scenario(bs, ris, links, wave, seed=int(seed), angle_spread=float(spread))

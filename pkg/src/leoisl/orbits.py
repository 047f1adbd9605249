"""Walker-delta constellation geometry and circular two-body motion.

All positions are kilometres in an Earth-centered inertial frame. Satellites
follow circular Keplerian orbits around a spherical Earth; only ground nodes
feel Earth rotation (applied at the sidereal rate). Aircraft additionally
advance along a great circle at constant speed and cruise altitude.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EARTH_RADIUS_KM = 6371.0
EARTH_MU_KM3_S2 = 398600.4418
EARTH_ROTATION_RAD_S = 7.2921159e-5

DEFAULT_GRAZING_ALTITUDE_KM = 80.0
DEFAULT_ELEVATION_MASK_DEG = 10.0

GROUND_STATION = "ground_station"
AIRCRAFT = "aircraft"
GROUND_KINDS = (GROUND_STATION, AIRCRAFT)


def sat_key(plane: int, slot: int) -> str:
    """Canonical node id for the satellite at (plane, slot)."""
    return f"S{plane:03d}-{slot:03d}"


@dataclass(frozen=True)
class ConstellationConfig:
    """Walker-delta shell: evenly spaced planes of evenly spaced satellites.

    ``phasing_factor`` shifts the in-plane anomaly of consecutive planes by
    ``phasing_factor * 360 / (num_planes * sats_per_plane)`` degrees.
    """

    num_planes: int = 6
    sats_per_plane: int = 20
    altitude_km: float = 1000.0
    inclination_deg: float = 53.0
    phasing_factor: int = 1
    raan_spread_deg: float = 360.0

    def __post_init__(self) -> None:
        if self.num_planes < 1:
            raise ValueError(f"num_planes must be >= 1, got {self.num_planes}")
        if self.sats_per_plane < 1:
            raise ValueError(f"sats_per_plane must be >= 1, got {self.sats_per_plane}")
        if self.altitude_km <= 0:
            raise ValueError(f"altitude_km must be > 0, got {self.altitude_km}")
        if not 0.0 <= self.inclination_deg <= 180.0:
            raise ValueError(
                f"inclination_deg must be within [0, 180], got {self.inclination_deg}"
            )
        if not 0 <= self.phasing_factor <= self.num_planes - 1:
            raise ValueError(
                "phasing_factor must be within [0, num_planes-1], "
                f"got {self.phasing_factor}"
            )
        if self.raan_spread_deg <= 0:
            raise ValueError(f"raan_spread_deg must be > 0, got {self.raan_spread_deg}")

    @property
    def total_satellites(self) -> int:
        return self.num_planes * self.sats_per_plane

    @property
    def semi_major_axis_km(self) -> float:
        return EARTH_RADIUS_KM + self.altitude_km

    @property
    def mean_motion_rad_s(self) -> float:
        return math.sqrt(EARTH_MU_KM3_S2 / self.semi_major_axis_km**3)

    @property
    def orbital_period_s(self) -> float:
        return 2.0 * math.pi / self.mean_motion_rad_s


@dataclass(frozen=True)
class WalkerElement:
    """Initial orbital elements of one satellite in the pattern."""

    sat_id: tuple[int, int]
    raan_deg: float
    anomaly_deg: float


@dataclass(frozen=True, eq=False)
class SatelliteState:
    """Inertial position/velocity of one satellite at some epoch."""

    sat_id: tuple[int, int]
    position_km: np.ndarray
    velocity_km_s: np.ndarray

    @property
    def node_key(self) -> str:
        return sat_key(*self.sat_id)


@dataclass(frozen=True)
class GroundNode:
    """A ground station or an aircraft (great-circle motion, cruise altitude)."""

    node_id: str
    kind: str
    latitude_deg: float
    longitude_deg: float
    altitude_km: float = 0.0
    heading_deg: float = 0.0
    speed_km_s: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in GROUND_KINDS:
            raise ValueError(f"kind must be one of {GROUND_KINDS}, got {self.kind!r}")
        if not -90.0 <= self.latitude_deg <= 90.0:
            raise ValueError(
                f"latitude_deg must be within [-90, 90], got {self.latitude_deg}"
            )
        if self.kind == GROUND_STATION and self.speed_km_s != 0.0:
            raise ValueError("ground stations must have speed_km_s == 0")
        if self.altitude_km < 0:
            raise ValueError(f"altitude_km must be >= 0, got {self.altitude_km}")


def generate_walker(config: ConstellationConfig) -> list[WalkerElement]:
    """Initial (RAAN, in-plane anomaly) for every satellite of the pattern.

    Plane ``p`` sits at RAAN ``p * raan_spread / num_planes``; slot ``s`` of
    plane ``p`` starts at anomaly
    ``s * 360/sats_per_plane + p * phasing_factor * 360/(num_planes*sats_per_plane)``.
    """
    elements = []
    plane_step = config.raan_spread_deg / config.num_planes
    slot_step = 360.0 / config.sats_per_plane
    phase_step = config.phasing_factor * 360.0 / config.total_satellites
    for plane in range(config.num_planes):
        raan = plane * plane_step
        for slot in range(config.sats_per_plane):
            anomaly = (slot * slot_step + plane * phase_step) % 360.0
            elements.append(WalkerElement((plane, slot), raan, anomaly))
    return elements


def propagate(config: ConstellationConfig, epoch_s: float) -> list[SatelliteState]:
    """Advance the whole constellation to ``epoch_s`` seconds after t=0.

    Circular two-body motion: every satellite moves at the shared mean motion
    ``sqrt(mu / a^3)`` along its plane, so ``|position| == a`` exactly and
    velocity stays perpendicular to position.
    """
    if epoch_s < 0:
        raise ValueError(f"epoch_s must be >= 0, got {epoch_s}")
    a = config.semi_major_axis_km
    n = config.mean_motion_rad_s
    inc = math.radians(config.inclination_deg)
    cos_i, sin_i = math.cos(inc), math.sin(inc)
    states = []
    for elem in generate_walker(config):
        raan = math.radians(elem.raan_deg)
        u = math.radians(elem.anomaly_deg) + n * epoch_s
        cu, su = math.cos(u), math.sin(u)
        co, so = math.cos(raan), math.sin(raan)
        position = np.array(
            [
                a * (cu * co - su * cos_i * so),
                a * (cu * so + su * cos_i * co),
                a * su * sin_i,
            ]
        )
        velocity = (a * n) * np.array(
            [
                -su * co - cu * cos_i * so,
                -su * so + cu * cos_i * co,
                cu * sin_i,
            ]
        )
        states.append(SatelliteState(elem.sat_id, position, velocity))
    return states


def ground_position(node: GroundNode, epoch_s: float) -> np.ndarray:
    """Inertial position of a ground node at ``epoch_s``.

    Ground stations rotate with the Earth. Aircraft first advance along
    their great circle (constant heading at departure, constant speed) and
    the Earth rotation is applied on top. At epoch 0 a node at
    (lat=0, lon=0, alt=0) sits at (R_E, 0, 0): zero Greenwich offset.
    """
    radius = EARTH_RADIUS_KM + node.altitude_km
    lat = math.radians(node.latitude_deg)
    lon = math.radians(node.longitude_deg)
    unit = np.array(
        [
            math.cos(lat) * math.cos(lon),
            math.cos(lat) * math.sin(lon),
            math.sin(lat),
        ]
    )
    if node.kind == AIRCRAFT and node.speed_km_s > 0.0:
        east = np.array([-math.sin(lon), math.cos(lon), 0.0])
        north = np.array(
            [
                -math.sin(lat) * math.cos(lon),
                -math.sin(lat) * math.sin(lon),
                math.cos(lat),
            ]
        )
        heading = math.radians(node.heading_deg)
        direction = math.sin(heading) * east + math.cos(heading) * north
        theta = node.speed_km_s * epoch_s / radius
        unit = math.cos(theta) * unit + math.sin(theta) * direction
    spin = EARTH_ROTATION_RAD_S * epoch_s
    cs, ss = math.cos(spin), math.sin(spin)
    rotation = np.array([[cs, -ss, 0.0], [ss, cs, 0.0], [0.0, 0.0, 1.0]])
    return radius * (rotation @ unit)


def visible(
    pos_a: np.ndarray,
    pos_b: np.ndarray,
    grazing_altitude_km: float = DEFAULT_GRAZING_ALTITUDE_KM,
) -> bool:
    """Line-of-sight between two space nodes.

    True iff the segment a-b stays outside the sphere of radius
    ``R_E + grazing_altitude_km``. A zero-length segment is visible.
    """
    a = np.asarray(pos_a, dtype=float)
    b = np.asarray(pos_b, dtype=float)
    d = b - a
    dd = float(d @ d)
    if dd == 0.0:
        return True
    t = -float(a @ d) / dd
    t = min(1.0, max(0.0, t))
    closest = a + t * d
    return float(np.linalg.norm(closest)) >= EARTH_RADIUS_KM + grazing_altitude_km


def elevation_deg(observer_pos: np.ndarray, target_pos: np.ndarray) -> float:
    """Elevation of ``target`` above the local horizon of ``observer``.

    The local zenith is the observer's radial direction (spherical Earth).
    Degenerate zero-range geometry reports 90 degrees.
    """
    obs = np.asarray(observer_pos, dtype=float)
    los = np.asarray(target_pos, dtype=float) - obs
    rng = float(np.linalg.norm(los))
    if rng == 0.0:
        return 90.0
    zenith = obs / float(np.linalg.norm(obs))
    s = float(zenith @ los) / rng
    s = min(1.0, max(-1.0, s))
    return math.degrees(math.asin(s))


def visible_from_ground(
    observer_pos: np.ndarray,
    target_pos: np.ndarray,
    elevation_mask_deg: float = DEFAULT_ELEVATION_MASK_DEG,
) -> bool:
    """Ground-node visibility: target elevation at or above the mask."""
    return elevation_deg(observer_pos, target_pos) >= elevation_mask_deg

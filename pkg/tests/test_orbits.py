"""Constellation geometry and two-body motion checks."""

import math

import numpy as np
import pytest

from leoisl.orbits import (
    EARTH_RADIUS_KM,
    AIRCRAFT,
    GROUND_STATION,
    ConstellationConfig,
    GroundNode,
    elevation_deg,
    generate_walker,
    ground_position,
    propagate,
    visible,
)

from oracles import measured_period_s

CASE_CONFIG = ConstellationConfig()  # 6 planes x 20 sats, 1000 km, 53 deg


class TestWalkerPattern:
    def test_case_constellation_count(self):
        assert len(generate_walker(CASE_CONFIG)) == 120
        assert CASE_CONFIG.total_satellites == 120

    def test_single_satellite(self):
        config = ConstellationConfig(
            num_planes=1, sats_per_plane=1, altitude_km=500.0, phasing_factor=0
        )
        (element,) = generate_walker(config)
        assert element.raan_deg == 0.0
        assert element.anomaly_deg == 0.0

    def test_two_by_two_phasing(self):
        config = ConstellationConfig(
            num_planes=2, sats_per_plane=2, altitude_km=700.0, phasing_factor=1
        )
        elements = generate_walker(config)
        by_plane = {}
        for e in elements:
            by_plane.setdefault(e.sat_id[0], []).append(e.anomaly_deg)
        assert by_plane[0] == [0.0, 180.0]
        assert by_plane[1] == [90.0, 270.0]

    def test_invalid_configs_rejected(self):
        with pytest.raises(ValueError):
            ConstellationConfig(num_planes=0)
        with pytest.raises(ValueError):
            ConstellationConfig(inclination_deg=200.0)
        with pytest.raises(ValueError):
            ConstellationConfig(altitude_km=-1.0)
        with pytest.raises(ValueError):
            ConstellationConfig(num_planes=2, phasing_factor=5)


class TestPropagation:
    def test_epoch_zero_matches_pattern(self):
        states = propagate(CASE_CONFIG, 0.0)
        elements = generate_walker(CASE_CONFIG)
        assert len(states) == 120
        first = states[0]
        a = CASE_CONFIG.semi_major_axis_km
        assert first.sat_id == (0, 0)
        np.testing.assert_allclose(first.position_km, [a, 0.0, 0.0], atol=1e-9)
        for state, element in zip(states, elements):
            assert state.sat_id == element.sat_id

    def test_radius_conserved_over_random_epochs(self):
        rng = np.random.default_rng(1)
        a = CASE_CONFIG.semi_major_axis_km
        worst = 0.0
        for epoch in rng.uniform(0.0, 5 * CASE_CONFIG.orbital_period_s, size=1000):
            states = propagate(CASE_CONFIG, float(epoch))
            for state in states[::17]:
                radius = float(np.linalg.norm(state.position_km))
                worst = max(worst, abs(radius - a) / a)
        assert worst < 1e-9

    def test_velocity_perpendicular_to_position(self):
        for state in propagate(CASE_CONFIG, 1234.5):
            dot = float(state.position_km @ state.velocity_km_s)
            scale = float(
                np.linalg.norm(state.position_km) * np.linalg.norm(state.velocity_km_s)
            )
            assert abs(dot) / scale < 1e-9

    def test_period_matches_oracle(self):
        measured = measured_period_s(CASE_CONFIG)
        assert abs(measured - 6298.0) <= 1.0
        assert abs(measured - CASE_CONFIG.orbital_period_s) <= 0.5

    def test_periodicity(self):
        period = CASE_CONFIG.orbital_period_s
        start = propagate(CASE_CONFIG, 0.0)
        wrapped = propagate(CASE_CONFIG, period)
        for s0, s1 in zip(start, wrapped):
            assert float(np.linalg.norm(s0.position_km - s1.position_km)) < 1.0

    def test_intra_plane_distance_epoch_invariant(self):
        period = CASE_CONFIG.orbital_period_s
        pairs = [((0, 0), (0, 1)), ((0, 2), (0, 11)), ((3, 5), (3, 6))]
        for id_a, id_b in pairs:
            distances = []
            for epoch in np.linspace(0.0, period, 40):
                by_id = {s.sat_id: s for s in propagate(CASE_CONFIG, float(epoch))}
                distances.append(
                    float(
                        np.linalg.norm(
                            by_id[id_a].position_km - by_id[id_b].position_km
                        )
                    )
                )
            spread = (max(distances) - min(distances)) / max(distances)
            assert spread < 1e-6

    def test_negative_epoch_rejected(self):
        with pytest.raises(ValueError):
            propagate(CASE_CONFIG, -1.0)


class TestGroundMotion:
    def test_equatorial_reference(self):
        node = GroundNode("gs", GROUND_STATION, 0.0, 0.0)
        np.testing.assert_allclose(
            ground_position(node, 0.0), [EARTH_RADIUS_KM, 0.0, 0.0], atol=1e-12
        )

    def test_sidereal_day_return(self):
        # 2*pi / 7.2921159e-5 rad/s = 86164.090 s; the common 86164.1
        # rounding already misses the metre-level tolerance used here.
        node = GroundNode("gs", GROUND_STATION, 0.0, 0.0)
        after = ground_position(node, 86164.0905)
        np.testing.assert_allclose(after, [EARTH_RADIUS_KM, 0.0, 0.0], atol=1e-3)

    def test_stationary_aircraft_equals_station_at_altitude(self):
        craft = GroundNode("ac", AIRCRAFT, 12.0, 34.0, 10.7, heading_deg=45.0)
        station = GroundNode("gs", GROUND_STATION, 12.0, 34.0, 10.7)
        for epoch in (0.0, 500.0, 5000.0):
            np.testing.assert_allclose(
                ground_position(craft, epoch), ground_position(station, epoch)
            )

    def test_aircraft_advances_along_great_circle(self):
        craft = GroundNode("ac", AIRCRAFT, 0.0, 0.0, 10.7, 90.0, 0.23)
        radius = EARTH_RADIUS_KM + 10.7
        hour = 3600.0
        pos = ground_position(craft, hour)
        assert abs(float(np.linalg.norm(pos)) - radius) < 1e-9
        # Angle from the start must equal speed * t / radius (Earth spin aside).
        start = ground_position(GroundNode("gs", GROUND_STATION, 0.0, 0.0, 10.7), hour)
        cos_angle = float(pos @ start) / radius**2
        expected = 0.23 * hour / radius
        assert abs(math.acos(max(-1.0, min(1.0, cos_angle))) - expected) < 1e-9

    def test_station_speed_rejected(self):
        with pytest.raises(ValueError):
            GroundNode("gs", GROUND_STATION, 0.0, 0.0, speed_km_s=0.1)
        with pytest.raises(ValueError):
            GroundNode("gs", GROUND_STATION, 95.0, 0.0)


class TestVisibility:
    def test_diametrically_opposite_blocked(self):
        a = np.array([7371.0, 0.0, 0.0])
        assert visible(a, -a) is False

    def test_adjacent_intra_plane_visible(self):
        states = propagate(CASE_CONFIG, 0.0)
        by_id = {s.sat_id: s for s in states}
        assert visible(by_id[(0, 0)].position_km, by_id[(0, 1)].position_km) is True

    def test_zero_length_segment(self):
        a = np.array([7000.0, 0.0, 0.0])
        assert visible(a, a) is True

    def test_symmetry(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            a = rng.normal(size=3)
            b = rng.normal(size=3)
            a = a / np.linalg.norm(a) * rng.uniform(6600, 9000)
            b = b / np.linalg.norm(b) * rng.uniform(6600, 9000)
            assert visible(a, b) == visible(b, a)

    def test_elevation_overhead(self):
        ground = np.array([EARTH_RADIUS_KM, 0.0, 0.0])
        above = np.array([EARTH_RADIUS_KM + 800.0, 0.0, 0.0])
        assert abs(elevation_deg(ground, above) - 90.0) < 1e-9

    def test_elevation_horizon(self):
        ground = np.array([EARTH_RADIUS_KM, 0.0, 0.0])
        level = np.array([EARTH_RADIUS_KM, 500.0, 0.0])
        assert abs(elevation_deg(ground, level)) < 3.0  # slightly below true horizon

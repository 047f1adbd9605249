"""Path search against exhaustive enumeration, plus path-structure stats."""

import itertools
import math

import numpy as np
import pytest

from leoisl.links import ISL_LASER
from leoisl.orbits import GROUND_STATION, ConstellationConfig, GroundNode
from leoisl.routing import (
    ground_pair_hop_stats,
    min_hop_path,
    sdp_mhp_fraction,
    shortest_distance_path,
    snapshot_sdp_mhp_fraction,
)
from leoisl.topology import LinkEdge, TopologySnapshot


def make_snapshot(nodes, weighted_edges, epoch_s=0.0):
    """Synthetic satellite-only snapshot from (a, b, distance) triples."""
    edges = []
    for a, b, distance in weighted_edges:
        a, b = sorted((a, b))
        edges.append(
            LinkEdge(a, b, ISL_LASER, distance, 1.0e10, distance / 299792.458)
        )
    edges.sort(key=lambda e: e.key)
    return TopologySnapshot(
        epoch_s=epoch_s, nodes=tuple(sorted(nodes)), edges=tuple(edges), positions={}
    )


def enumerate_simple_paths(snapshot, src, dst):
    adjacency = snapshot.adjacency()
    paths = []

    def walk(node, seen, dist, hops):
        if node == dst:
            paths.append((tuple(seen), dist, hops))
            return
        for neighbor, edge in adjacency[node]:
            if neighbor in seen:
                continue
            seen.append(neighbor)
            walk(neighbor, seen, dist + edge.distance_km, hops + 1)
            seen.pop()

    walk(src, [src], 0.0, 0)
    return paths


def oracle_best(snapshot, src, dst, metric):
    paths = enumerate_simple_paths(snapshot, src, dst)
    if not paths:
        return None
    if metric == "distance":
        return min(paths, key=lambda p: (p[1], p[2], p[0]))
    return min(paths, key=lambda p: (p[2], p[0]))


def random_snapshot(rng):
    n = int(rng.integers(2, 9))
    nodes = [f"n{i}" for i in range(n)]
    edges = []
    for a, b in itertools.combinations(nodes, 2):
        if rng.random() < 0.4:
            edges.append((a, b, float(rng.uniform(0.1, 10.0))))
    return make_snapshot(nodes, edges), nodes


class TestPathBasics:
    def test_same_node(self):
        snapshot = make_snapshot(["a", "b"], [("a", "b", 5.0)])
        path = shortest_distance_path(snapshot, "a", "a")
        assert path.nodes == ("a",)
        assert path.hop_count == 0
        assert path.total_distance_km == 0.0
        assert math.isinf(path.bottleneck_capacity_bps)

    def test_triangle_distance_prefers_direct(self):
        snapshot = make_snapshot(
            ["a", "b", "c"], [("a", "b", 1.0), ("b", "c", 1.0), ("a", "c", 1.5)]
        )
        path = shortest_distance_path(snapshot, "a", "c")
        assert path.nodes == ("a", "c")
        assert path.total_distance_km == pytest.approx(1.5)

    def test_triangle_hops_prefers_direct(self):
        snapshot = make_snapshot(
            ["a", "b", "c"], [("a", "b", 1.0), ("b", "c", 1.0), ("a", "c", 1.5)]
        )
        path = min_hop_path(snapshot, "a", "c")
        assert path.nodes == ("a", "c")
        assert path.hop_count == 1

    def test_adjacent_nodes_one_hop_regardless_of_length(self):
        snapshot = make_snapshot(
            ["a", "b", "c"], [("a", "b", 0.1), ("b", "c", 0.1), ("a", "c", 99.0)]
        )
        assert min_hop_path(snapshot, "a", "c").hop_count == 1

    def test_disconnected_pair(self):
        snapshot = make_snapshot(["a", "b", "c"], [("a", "b", 1.0)])
        assert shortest_distance_path(snapshot, "a", "c") is None
        assert min_hop_path(snapshot, "a", "c") is None

    def test_unknown_node_rejected(self):
        snapshot = make_snapshot(["a", "b"], [("a", "b", 1.0)])
        with pytest.raises(ValueError):
            shortest_distance_path(snapshot, "a", "zz")

    def test_path_metrics_consistent(self):
        snapshot = make_snapshot(
            ["a", "b", "c"], [("a", "b", 2.0), ("b", "c", 3.0)]
        )
        path = shortest_distance_path(snapshot, "a", "c")
        assert path.hop_count == len(path.nodes) - 1
        assert path.total_distance_km == pytest.approx(5.0)
        assert path.total_propagation_delay_s == pytest.approx(5.0 / 299792.458)
        assert path.edge_capacities_bps == (1.0e10, 1.0e10)

    def test_grid_in_plane_neighbors_one_hop(self):
        from leoisl.orbits import propagate, sat_key
        from leoisl.topology import build_grid_topology

        config = ConstellationConfig()
        snapshot = build_grid_topology(propagate(config, 0.0), config, 0.0)
        path = min_hop_path(snapshot, sat_key(0, 0), sat_key(0, 1))
        assert path.hop_count == 1


class TestOracleEquivalence:
    def test_matches_enumeration_on_random_graphs(self):
        rng = np.random.default_rng(2024)
        for _ in range(100):
            snapshot, nodes = random_snapshot(rng)
            src, dst = nodes[0], nodes[-1]
            expected_sdp = oracle_best(snapshot, src, dst, "distance")
            expected_mhp = oracle_best(snapshot, src, dst, "hops")
            got_sdp = shortest_distance_path(snapshot, src, dst)
            got_mhp = min_hop_path(snapshot, src, dst)
            if expected_sdp is None:
                assert got_sdp is None and got_mhp is None
                continue
            assert got_sdp.nodes == expected_sdp[0]
            assert got_sdp.total_distance_km == pytest.approx(
                expected_sdp[1], abs=1e-9
            )
            assert got_sdp.hop_count == expected_sdp[2]
            assert got_mhp.nodes == expected_mhp[0]
            assert got_mhp.hop_count == expected_mhp[2]

    def test_structural_invariants_on_random_graphs(self):
        rng = np.random.default_rng(99)
        for _ in range(60):
            snapshot, nodes = random_snapshot(rng)
            src, mid, dst = nodes[0], nodes[len(nodes) // 2], nodes[-1]
            sdp = shortest_distance_path(snapshot, src, dst)
            mhp = min_hop_path(snapshot, src, dst)
            if sdp is None:
                continue
            assert sdp.total_distance_km <= mhp.total_distance_km + 1e-12
            assert mhp.hop_count <= sdp.hop_count
            back = min_hop_path(snapshot, dst, src)
            assert back.hop_count == mhp.hop_count
            leg_a = shortest_distance_path(snapshot, src, mid)
            leg_b = shortest_distance_path(snapshot, mid, dst)
            if leg_a is not None and leg_b is not None:
                assert (
                    sdp.total_distance_km
                    <= leg_a.total_distance_km + leg_b.total_distance_km + 1e-9
                )


class TestHopStats:
    def test_colocated_pair_zero_hops(self):
        config = ConstellationConfig()
        here = GroundNode("a", GROUND_STATION, 20.0, 30.0)
        also_here = GroundNode("b", GROUND_STATION, 20.0, 30.0)
        rows = ground_pair_hop_stats(config, [(here, also_here)], [0.0])
        assert len(rows) == 1
        assert rows[0].min_hops == 0
        assert rows[0].spread >= 0

    def test_long_pair_reports_spread(self):
        config = ConstellationConfig()
        london = GroundNode("london", GROUND_STATION, 51.507, -0.128)
        singapore = GroundNode("singapore", GROUND_STATION, 1.352, 103.820)
        rows = ground_pair_hop_stats(config, [(london, singapore)], [0.0, 900.0])
        for row in rows:
            assert not row.skipped
            assert row.max_hops >= row.min_hops > 0
            print(
                f"{row.pair_id} epoch={row.epoch_s}: hops "
                f"[{row.min_hops},{row.max_hops}] spread={row.spread}"
            )

    def test_single_satellite_constellation(self):
        config = ConstellationConfig(
            num_planes=1, sats_per_plane=1, phasing_factor=0
        )
        a = GroundNode("a", GROUND_STATION, 0.0, 0.0)
        b = GroundNode("b", GROUND_STATION, 1.0, 1.0)
        rows = ground_pair_hop_stats(config, [(a, b)], [0.0])
        row = rows[0]
        assert row.skipped or (row.min_hops == 0 and row.max_hops == 0)

    def test_empty_inputs_rejected(self):
        config = ConstellationConfig()
        with pytest.raises(ValueError):
            ground_pair_hop_stats(config, [], [0.0])


class TestSdpMhpFraction:
    def test_complete_uniform_graph(self):
        nodes = [f"n{i}" for i in range(5)]
        edges = [(a, b, 1.0) for a, b in itertools.combinations(nodes, 2)]
        snapshot = make_snapshot(nodes, edges)
        pairs = [(a, b) for a, b in itertools.combinations(nodes, 2)]
        result = snapshot_sdp_mhp_fraction(snapshot, pairs)
        assert result.fraction == 1.0
        assert result.pairs_checked == len(pairs)

    def test_detour_beats_direct_edge(self):
        # Two short legs beat the long direct edge on distance but not hops.
        snapshot = make_snapshot(
            ["a", "b", "c"], [("a", "b", 1.0), ("b", "c", 1.0), ("a", "c", 3.0)]
        )
        result = snapshot_sdp_mhp_fraction(snapshot, [("a", "c")])
        assert result.fraction == 0.0

    def test_low_inclination_grid_fraction(self):
        config = ConstellationConfig()
        result = sdp_mhp_fraction(config, "grid", 50, [0.0, 1200.0], 11)
        assert result.pairs_checked == 100
        assert result.fraction >= 0.95

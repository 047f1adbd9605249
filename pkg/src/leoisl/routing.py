"""Snapshot path computation and path-structure analysis.

Shortest-distance paths (SDP) and minimum-hop paths (MHP) over a frozen
snapshot, hop-count statistics between ground terminals across all possible
satellite associations, and an empirical check of how often the SDP is also
an MHP.

Tie-breaking is total: minimum metric, then fewer hops (distance metric
only), then the lexicographically smallest node sequence. Results are
therefore reproducible across runs.
"""

from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .links import ISL_LASER
from .orbits import (
    DEFAULT_ELEVATION_MASK_DEG,
    DEFAULT_GRAZING_ALTITUDE_KM,
    ConstellationConfig,
    GroundNode,
    ground_position,
    propagate,
    visible_from_ground,
)
from .topology import (
    DEFAULT_MAX_RANGE_KM,
    NEAREST_FIRST,
    TopologySnapshot,
    build_dynamic_topology,
    build_grid_topology,
)

GRID_MODE = "grid"
DYNAMIC_MODE = "dynamic"
TOPOLOGY_MODES = (GRID_MODE, DYNAMIC_MODE)

HOP_STATS_CSV_HEADER = (
    "pair_id",
    "epoch_s",
    "min_hops",
    "max_hops",
    "mean_hops",
    "spread",
)


@dataclass(frozen=True)
class Path:
    """A walk through a snapshot with its aggregate link metrics."""

    nodes: tuple[str, ...]
    hop_count: int
    total_distance_km: float
    total_propagation_delay_s: float
    bottleneck_capacity_bps: float
    edge_capacities_bps: tuple[float, ...] = ()


def _path_from_nodes(snapshot: TopologySnapshot, nodes: tuple[str, ...]) -> Path:
    adjacency = snapshot.adjacency()
    distance = 0.0
    delay = 0.0
    capacities = []
    for a, b in zip(nodes, nodes[1:]):
        edge = next(e for nbr, e in adjacency[a] if nbr == b)
        distance += edge.distance_km
        delay += edge.delay_s
        capacities.append(edge.capacity_bps)
    bottleneck = min(capacities) if capacities else math.inf
    return Path(
        nodes=nodes,
        hop_count=len(nodes) - 1,
        total_distance_km=distance,
        total_propagation_delay_s=delay,
        bottleneck_capacity_bps=bottleneck,
        edge_capacities_bps=tuple(capacities),
    )


def _best_node_sequence(
    snapshot: TopologySnapshot, src: str, dst: str, metric: str
) -> tuple[str, ...] | None:
    """Label-setting search returning the optimal node sequence.

    Costs are tuples so the comparison is exactly the documented tie-break:
    ``(distance, hops, sequence)`` or ``(hops, sequence)``. Appending the
    same edge to two sequences that end on the same node preserves their
    order, so Dijkstra stays exact under these composite costs.
    """
    adjacency = snapshot.adjacency()
    if src not in adjacency or dst not in adjacency:
        raise ValueError(f"unknown node in pair ({src!r}, {dst!r})")
    if src == dst:
        return (src,)
    if metric == "distance":
        start = (0.0, 0, (src,))
    else:
        start = (0, (src,))
    best: dict[str, tuple] = {src: start}
    heap = [start]
    while heap:
        cost = heapq.heappop(heap)
        nodes = cost[-1]
        here = nodes[-1]
        if cost != best.get(here):
            continue
        if here == dst:
            return nodes
        for neighbor, edge in adjacency[here]:
            if neighbor in nodes:
                continue
            if metric == "distance":
                candidate = (cost[0] + edge.distance_km, cost[1] + 1, nodes + (neighbor,))
            else:
                candidate = (cost[0] + 1, nodes + (neighbor,))
            if neighbor not in best or candidate < best[neighbor]:
                best[neighbor] = candidate
                heapq.heappush(heap, candidate)
    return None


def shortest_distance_path(
    snapshot: TopologySnapshot, src: str, dst: str
) -> Path | None:
    """Minimum total-distance path, or None when the pair is disconnected."""
    nodes = _best_node_sequence(snapshot, src, dst, "distance")
    if nodes is None:
        return None
    return _path_from_nodes(snapshot, nodes)


def min_hop_path(snapshot: TopologySnapshot, src: str, dst: str) -> Path | None:
    """Minimum edge-count path, or None when the pair is disconnected."""
    nodes = _best_node_sequence(snapshot, src, dst, "hops")
    if nodes is None:
        return None
    return _path_from_nodes(snapshot, nodes)


# ---------------------------------------------------------------------------
# Lightweight searches used by the statistics sweeps (counts only, no
# per-path sequences).
# ---------------------------------------------------------------------------


def _isl_adjacency(snapshot: TopologySnapshot) -> dict[str, list[tuple[str, float]]]:
    adj: dict[str, list[tuple[str, float]]] = {}
    for edge in snapshot.edges:
        if edge.link_class != ISL_LASER:
            continue
        adj.setdefault(edge.node_a, []).append((edge.node_b, edge.distance_km))
        adj.setdefault(edge.node_b, []).append((edge.node_a, edge.distance_km))
    for neighbors in adj.values():
        neighbors.sort()
    return adj


def _hops_from(adj: dict[str, list[tuple[str, float]]], src: str) -> dict[str, int]:
    hops = {src: 0}
    queue = deque([src])
    while queue:
        here = queue.popleft()
        for neighbor, _ in adj.get(here, ()):
            if neighbor not in hops:
                hops[neighbor] = hops[here] + 1
                queue.append(neighbor)
    return hops


def _dist_hops_from(
    adj: dict[str, list[tuple[str, float]]], src: str
) -> dict[str, tuple[float, int]]:
    """Per-target (min distance, min hops among min-distance paths)."""
    best = {src: (0.0, 0)}
    heap = [(0.0, 0, src)]
    while heap:
        dist, hops, here = heapq.heappop(heap)
        if (dist, hops) != best.get(here):
            continue
        for neighbor, weight in adj.get(here, ()):
            candidate = (dist + weight, hops + 1)
            if neighbor not in best or candidate < best[neighbor]:
                best[neighbor] = candidate
                heapq.heappush(heap, (candidate[0], candidate[1], neighbor))
    return best


def _build_isl_snapshot(
    config: ConstellationConfig,
    epoch_s: float,
    topology_mode: str,
    *,
    max_isls: int,
    max_range_km: float,
    grazing_altitude_km: float,
) -> TopologySnapshot:
    states = propagate(config, epoch_s)
    if topology_mode == GRID_MODE:
        return build_grid_topology(
            states, config, epoch_s, grazing_altitude_km=grazing_altitude_km
        )
    if topology_mode == DYNAMIC_MODE:
        return build_dynamic_topology(
            states,
            max_isls,
            epoch_s,
            max_range_km=max_range_km,
            policy=NEAREST_FIRST,
            grazing_altitude_km=grazing_altitude_km,
        )
    raise ValueError(f"topology_mode must be one of {TOPOLOGY_MODES}, got {topology_mode!r}")


@dataclass(frozen=True)
class HopStatsRow:
    """Hop-count spread of one ground pair at one epoch.

    ``associations`` counts the (start satellite, end satellite) pairs that
    were reachable; a row is ``skipped`` when an endpoint saw no satellite
    or no association was connected.
    """

    pair_id: str
    epoch_s: float
    min_hops: int | None
    max_hops: int | None
    mean_hops: float | None
    spread: int | None
    associations: int
    skipped: bool

    def csv_values(self) -> tuple:
        blank = ""
        return (
            self.pair_id,
            self.epoch_s,
            blank if self.min_hops is None else self.min_hops,
            blank if self.max_hops is None else self.max_hops,
            blank if self.mean_hops is None else self.mean_hops,
            blank if self.spread is None else self.spread,
        )


def ground_pair_hop_stats(
    config: ConstellationConfig,
    pairs: Sequence[tuple[GroundNode, GroundNode]],
    epochs: Iterable[float],
    topology_mode: str = GRID_MODE,
    *,
    max_isls: int = 4,
    max_range_km: float = DEFAULT_MAX_RANGE_KM,
    grazing_altitude_km: float = DEFAULT_GRAZING_ALTITUDE_KM,
    elevation_mask_deg: float = DEFAULT_ELEVATION_MASK_DEG,
) -> list[HopStatsRow]:
    """MHP hop-count stats over every satellite association of each pair.

    For each pair and epoch, every visible start satellite is associated
    with every visible end satellite and the ISL hop count between them is
    collected; the row reports min/max/mean and the max-min spread.
    """
    if not pairs:
        raise ValueError("pairs must be non-empty")
    epochs = list(epochs)
    if not epochs:
        raise ValueError("epochs must be non-empty")
    rows = []
    for epoch_s in epochs:
        snapshot = _build_isl_snapshot(
            config,
            epoch_s,
            topology_mode,
            max_isls=max_isls,
            max_range_km=max_range_km,
            grazing_altitude_km=grazing_altitude_km,
        )
        adj = _isl_adjacency(snapshot)
        sat_positions = snapshot.positions

        def visible_sats(node: GroundNode) -> list[str]:
            pos = ground_position(node, epoch_s)
            return [
                key
                for key in snapshot.nodes
                if visible_from_ground(pos, sat_positions[key], elevation_mask_deg)
            ]

        visibility_cache: dict[str, list[str]] = {}
        bfs_cache: dict[str, dict[str, int]] = {}
        for node_a, node_b in pairs:
            for node in (node_a, node_b):
                if node.node_id not in visibility_cache:
                    visibility_cache[node.node_id] = visible_sats(node)
            starts = visibility_cache[node_a.node_id]
            ends = visibility_cache[node_b.node_id]
            pair_id = f"{node_a.node_id}|{node_b.node_id}"
            counts = []
            for start in starts:
                if start not in bfs_cache:
                    bfs_cache[start] = _hops_from(adj, start)
                hops = bfs_cache[start]
                counts.extend(hops[end] for end in ends if end in hops)
            if not counts:
                rows.append(
                    HopStatsRow(pair_id, epoch_s, None, None, None, None, 0, True)
                )
                continue
            rows.append(
                HopStatsRow(
                    pair_id=pair_id,
                    epoch_s=epoch_s,
                    min_hops=min(counts),
                    max_hops=max(counts),
                    mean_hops=sum(counts) / len(counts),
                    spread=max(counts) - min(counts),
                    associations=len(counts),
                    skipped=False,
                )
            )
    return rows


@dataclass(frozen=True)
class SdpMhpResult:
    """Fraction of sampled pairs whose SDP hop count equals the MHP's."""

    fraction: float
    pairs_checked: int
    pairs_matched: int
    pairs_unreachable: int


def snapshot_sdp_mhp_fraction(
    snapshot: TopologySnapshot, pairs: Sequence[tuple[str, str]]
) -> SdpMhpResult:
    """Evaluate the SDP-hops == MHP-hops discriminant on explicit pairs."""
    adj = _isl_adjacency(snapshot)
    by_source: dict[str, list[str]] = {}
    for src, dst in pairs:
        by_source.setdefault(src, []).append(dst)
    checked = matched = unreachable = 0
    for src, dsts in by_source.items():
        dist_hops = _dist_hops_from(adj, src)
        bfs = _hops_from(adj, src)
        for dst in dsts:
            if dst not in dist_hops:
                unreachable += 1
                continue
            checked += 1
            if dist_hops[dst][1] == bfs[dst]:
                matched += 1
    fraction = matched / checked if checked else 0.0
    return SdpMhpResult(fraction, checked, matched, unreachable)


def sdp_mhp_fraction(
    config: ConstellationConfig,
    topology_mode: str,
    sample_pairs: int,
    epochs: Iterable[float],
    rng_seed: int,
    *,
    max_isls: int = 4,
    max_range_km: float = DEFAULT_MAX_RANGE_KM,
    grazing_altitude_km: float = DEFAULT_GRAZING_ALTITUDE_KM,
) -> SdpMhpResult:
    """Sample satellite pairs per epoch and report the matched fraction."""
    if sample_pairs < 1:
        raise ValueError(f"sample_pairs must be >= 1, got {sample_pairs}")
    epochs = list(epochs)
    if not epochs:
        raise ValueError("epochs must be non-empty")
    rng = np.random.default_rng(rng_seed)
    checked = matched = unreachable = 0
    for epoch_s in epochs:
        snapshot = _build_isl_snapshot(
            config,
            epoch_s,
            topology_mode,
            max_isls=max_isls,
            max_range_km=max_range_km,
            grazing_altitude_km=grazing_altitude_km,
        )
        nodes = list(snapshot.nodes)
        if len(nodes) < 2:
            continue
        pairs = []
        for _ in range(sample_pairs):
            i = int(rng.integers(0, len(nodes)))
            j = int(rng.integers(0, len(nodes) - 1))
            if j >= i:
                j += 1
            pairs.append((nodes[i], nodes[j]))
        result = snapshot_sdp_mhp_fraction(snapshot, pairs)
        checked += result.pairs_checked
        matched += result.pairs_matched
        unreachable += result.pairs_unreachable
    fraction = matched / checked if checked else 0.0
    return SdpMhpResult(fraction, checked, matched, unreachable)

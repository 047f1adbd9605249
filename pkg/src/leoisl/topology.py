"""Per-epoch link graphs.

Two ISL construction modes: the quasi-permanent +grid (two in-plane
neighbors, two same-slot neighbors in adjacent planes) and a dynamic
degree-capped assignment over everything in communication range. Ground
stations and aircraft are attached afterwards via elevation-masked RF links.

Snapshots are immutable once built; build one per epoch and route on it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import links, orbits
from .links import (
    GROUND_TO_AIR,
    GROUND_TO_SAT,
    ISL_LASER,
    SAT_TO_AIR,
    LinkBudgetParams,
    capacity_bps,
    propagation_delay_s,
)
from .orbits import (
    AIRCRAFT,
    DEFAULT_ELEVATION_MASK_DEG,
    DEFAULT_GRAZING_ALTITUDE_KM,
    GROUND_STATION,
    ConstellationConfig,
    GroundNode,
    SatelliteState,
    ground_position,
    visible,
    visible_from_ground,
)

NEAREST_FIRST = "nearest_first"
INTRA_ORBIT_PREFERRED = "intra_orbit_preferred"
DYNAMIC_POLICIES = (NEAREST_FIRST, INTRA_ORBIT_PREFERRED)

DEFAULT_MAX_RANGE_KM = 5000.0

CSV_HEADER = (
    "epoch_s",
    "node_a",
    "node_b",
    "link_class",
    "distance_km",
    "capacity_bps",
    "delay_s",
)


@dataclass(frozen=True)
class LinkEdge:
    """One undirected link; ``node_a < node_b`` by construction."""

    node_a: str
    node_b: str
    link_class: str
    distance_km: float
    capacity_bps: float
    delay_s: float

    @property
    def key(self) -> tuple[str, str]:
        return (self.node_a, self.node_b)

    def other(self, node: str) -> str:
        return self.node_b if node == self.node_a else self.node_a


@dataclass
class TopologySnapshot:
    """Time-stamped link graph over satellite and ground nodes."""

    epoch_s: float
    nodes: tuple[str, ...]
    edges: tuple[LinkEdge, ...]
    # Excluded from equality: ndarray comparison is elementwise.
    positions: dict[str, np.ndarray] = field(compare=False)
    max_isl_degree: int | None = None
    _adjacency: dict[str, list[tuple[str, LinkEdge]]] | None = field(
        default=None, repr=False, compare=False
    )

    def adjacency(self) -> dict[str, list[tuple[str, LinkEdge]]]:
        """Neighbor lists (sorted by neighbor id) for every node."""
        if self._adjacency is None:
            adj: dict[str, list[tuple[str, LinkEdge]]] = {n: [] for n in self.nodes}
            for edge in self.edges:
                adj[edge.node_a].append((edge.node_b, edge))
                adj[edge.node_b].append((edge.node_a, edge))
            for neighbors in adj.values():
                neighbors.sort(key=lambda item: item[0])
            self._adjacency = adj
        return self._adjacency

    def isl_edges(self) -> list[LinkEdge]:
        return [e for e in self.edges if e.link_class == ISL_LASER]

    def isl_degrees(self) -> dict[str, int]:
        degrees = {n: 0 for n in self.nodes}
        for edge in self.isl_edges():
            degrees[edge.node_a] += 1
            degrees[edge.node_b] += 1
        return degrees

    def csv_rows(self) -> list[tuple]:
        rows = [CSV_HEADER]
        for e in self.edges:
            rows.append(
                (
                    self.epoch_s,
                    e.node_a,
                    e.node_b,
                    e.link_class,
                    e.distance_km,
                    e.capacity_bps,
                    e.delay_s,
                )
            )
        return rows


def _isl_edge(
    key_a: str,
    key_b: str,
    pos_a: np.ndarray,
    pos_b: np.ndarray,
    params: LinkBudgetParams,
) -> LinkEdge:
    a, b = (key_a, key_b) if key_a < key_b else (key_b, key_a)
    distance = float(np.linalg.norm(pos_a - pos_b))
    return LinkEdge(
        node_a=a,
        node_b=b,
        link_class=ISL_LASER,
        distance_km=distance,
        capacity_bps=params.lisl_fixed_rate_bps,
        delay_s=propagation_delay_s(distance),
    )


def build_grid_topology(
    states: list[SatelliteState],
    config: ConstellationConfig,
    epoch_s: float = 0.0,
    *,
    grazing_altitude_km: float = DEFAULT_GRAZING_ALTITUDE_KM,
    isl_params: LinkBudgetParams | None = None,
) -> TopologySnapshot:
    """The +grid pattern: in-plane ring plus same-slot links to adjacent planes.

    Candidate links that fail line-of-sight (Earth plus grazing buffer) are
    dropped, so satellites near unfavorable geometry carry fewer than four
    links. Degenerate shells (single plane, two slots, ...) yield the subset
    of the pattern that exists without duplicate edges.
    """
    if isl_params is None:
        isl_params = links.default_link_params()[ISL_LASER]
    positions = {s.node_key: s.position_km for s in states}
    num_planes, slots = config.num_planes, config.sats_per_plane
    pair_keys: set[tuple[str, str]] = set()
    edges = []
    for plane in range(num_planes):
        for slot in range(slots):
            here = orbits.sat_key(plane, slot)
            neighbors = []
            if slots >= 2:
                neighbors.append(orbits.sat_key(plane, (slot + 1) % slots))
                neighbors.append(orbits.sat_key(plane, (slot - 1) % slots))
            if num_planes >= 2:
                neighbors.append(orbits.sat_key((plane + 1) % num_planes, slot))
                neighbors.append(orbits.sat_key((plane - 1) % num_planes, slot))
            for other in neighbors:
                key = (here, other) if here < other else (other, here)
                if key in pair_keys:
                    continue
                pair_keys.add(key)
                if not visible(positions[here], positions[other], grazing_altitude_km):
                    continue
                edges.append(
                    _isl_edge(here, other, positions[here], positions[other], isl_params)
                )
    edges.sort(key=lambda e: e.key)
    return TopologySnapshot(
        epoch_s=epoch_s,
        nodes=tuple(sorted(positions)),
        edges=tuple(edges),
        positions=positions,
        max_isl_degree=4,
    )


def build_dynamic_topology(
    states: list[SatelliteState],
    max_isls: int,
    epoch_s: float = 0.0,
    *,
    max_range_km: float = DEFAULT_MAX_RANGE_KM,
    policy: str = NEAREST_FIRST,
    grazing_altitude_km: float = DEFAULT_GRAZING_ALTITUDE_KM,
    isl_params: LinkBudgetParams | None = None,
) -> TopologySnapshot:
    """Degree-capped greedy assignment over all pairs in communication range.

    Candidates (visible, within ``max_range_km``) are ranked by the policy
    key; ``intra_orbit_preferred`` boosts same-plane pairs ahead of
    inter-plane ones. Edges are then admitted in budget layers 1..max_isls:
    within each layer a candidate is accepted iff both endpoints still sit
    below the layer's degree. The layering makes the edge set for budget k
    a strict subset of the set for k+1, which a single greedy pass over the
    ranked list does not guarantee.
    """
    if max_isls < 0:
        raise ValueError(f"max_isls must be >= 0, got {max_isls}")
    if policy not in DYNAMIC_POLICIES:
        raise ValueError(f"policy must be one of {DYNAMIC_POLICIES}, got {policy!r}")
    if isl_params is None:
        isl_params = links.default_link_params()[ISL_LASER]

    keyed = sorted(states, key=lambda s: s.node_key)
    positions = {s.node_key: s.position_km for s in keyed}
    planes = {s.node_key: s.sat_id[0] for s in keyed}

    candidates = []
    for i, sa in enumerate(keyed):
        for sb in keyed[i + 1 :]:
            distance = float(np.linalg.norm(sa.position_km - sb.position_km))
            if distance > max_range_km:
                continue
            if not visible(sa.position_km, sb.position_km, grazing_altitude_km):
                continue
            candidates.append((sa.node_key, sb.node_key, distance))
    if policy == INTRA_ORBIT_PREFERRED:
        candidates.sort(
            key=lambda c: (planes[c[0]] != planes[c[1]], c[2], c[0], c[1])
        )
    else:
        candidates.sort(key=lambda c: (c[2], c[0], c[1]))

    accepted: list[tuple[str, str, float]] = []
    if max_isls >= len(keyed) - 1:
        # Every candidate is admitted by the final layer anyway.
        accepted = candidates
    elif max_isls > 0:
        degree = {s.node_key: 0 for s in keyed}
        taken = [False] * len(candidates)
        for level in range(1, max_isls + 1):
            for idx, (a, b, _) in enumerate(candidates):
                if taken[idx]:
                    continue
                if degree[a] < level and degree[b] < level:
                    taken[idx] = True
                    degree[a] += 1
                    degree[b] += 1
        accepted = [c for c, ok in zip(candidates, taken) if ok]

    edges = [
        _isl_edge(a, b, positions[a], positions[b], isl_params)
        for a, b, _ in accepted
    ]
    edges.sort(key=lambda e: e.key)
    return TopologySnapshot(
        epoch_s=epoch_s,
        nodes=tuple(sorted(positions)),
        edges=tuple(edges),
        positions=positions,
        max_isl_degree=max_isls,
    )


def attach_ground_links(
    snapshot: TopologySnapshot,
    ground_nodes: list[GroundNode],
    *,
    link_params: dict[str, LinkBudgetParams] | None = None,
    elevation_mask_deg: float = DEFAULT_ELEVATION_MASK_DEG,
) -> TopologySnapshot:
    """New snapshot with feeder, space-to-air and ground-to-air edges added.

    A ground station links to every satellite above its elevation mask
    (``ground_to_sat``), an aircraft to every such satellite
    (``sat_to_air``), and a ground station to every aircraft above its mask
    (``ground_to_air``). Edge capacities are full-bandwidth; allocation
    factors are applied downstream by the delivery planner.
    """
    if link_params is None:
        link_params = links.default_link_params()
    sat_keys = [n for n in snapshot.nodes if n in snapshot.positions]
    positions = dict(snapshot.positions)
    stations = [g for g in ground_nodes if g.kind == GROUND_STATION]
    aircraft = [g for g in ground_nodes if g.kind == AIRCRAFT]
    for node in ground_nodes:
        if node.node_id in positions:
            raise ValueError(f"duplicate node id {node.node_id!r} in snapshot")
        positions[node.node_id] = ground_position(node, snapshot.epoch_s)

    def rf_edge(ground_id: str, other_id: str, link_class: str) -> LinkEdge | None:
        params = link_params[link_class]
        distance = float(np.linalg.norm(positions[ground_id] - positions[other_id]))
        if distance == 0.0:  # coincident nodes; the loss model is undefined
            return None
        a, b = sorted((ground_id, other_id))
        return LinkEdge(
            node_a=a,
            node_b=b,
            link_class=link_class,
            distance_km=distance,
            capacity_bps=capacity_bps(params, distance, 1.0),
            delay_s=propagation_delay_s(distance),
        )

    new_edges = list(snapshot.edges)

    def attach(ground_id: str, other_id: str, link_class: str) -> None:
        if visible_from_ground(
            positions[ground_id], positions[other_id], elevation_mask_deg
        ):
            link = rf_edge(ground_id, other_id, link_class)
            if link is not None:
                new_edges.append(link)

    for gs in stations:
        for sat in sat_keys:
            attach(gs.node_id, sat, GROUND_TO_SAT)
    for ac in aircraft:
        for sat in sat_keys:
            attach(ac.node_id, sat, SAT_TO_AIR)
    for gs in stations:
        for ac in aircraft:
            attach(gs.node_id, ac.node_id, GROUND_TO_AIR)

    new_edges.sort(key=lambda e: (e.key, e.link_class))
    return TopologySnapshot(
        epoch_s=snapshot.epoch_s,
        nodes=tuple(sorted(positions)),
        edges=tuple(new_edges),
        positions=positions,
        max_isl_degree=snapshot.max_isl_degree,
    )

"""Content delivery to aircraft over the satellite mesh.

Cached files stream in parallel from cache-holding satellites into a serving
satellite and down its space-to-air link; the serving satellite may activate
at most ``max_isls`` holder links, which is the degree budget the whole
study sweeps. Non-cached files travel one chain each: ground station feeder
(with a bandwidth allocation factor), laser relay path to the serving
satellite, then the space-to-air hop; stations split their feeder band
across the non-cached flows they carry.

Download ratios are eliminated in closed form: at the optimum every active
stream finishes simultaneously, so the completion time solves
``sum_c max(0, D - prop_c) * rate_c = bits`` (water-filling over streams).
Relay hops between the entry and serving satellites ride the mesh and do
not count against the degree budget; only links terminating at the serving
satellite do.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Sequence

import numpy as np

from . import links, orbits
from .links import (
    GROUND_TO_AIR,
    GROUND_TO_SAT,
    ISL_LASER,
    SAT_TO_AIR,
    LinkBudgetParams,
    capacity_bps,
    snr_linear,
)
from .topology import (
    LinkEdge,
    TopologySnapshot,
    attach_ground_links,
    build_dynamic_topology,
)

if TYPE_CHECKING:  # pragma: no cover
    from .scenario import Scenario

ASSOC_OPTIMIZED = "optimized"
ASSOC_GREEDY = "greedy"
ASSOC_FULL = "fully_connected"
ASSOC_MODES = (ASSOC_OPTIMIZED, ASSOC_GREEDY, ASSOC_FULL)

BANDWIDTH_OPTIMIZED = "optimized"
BANDWIDTH_EQUAL = "equal"

PER_STREAM = "per_stream"
EQUAL_SPLIT = "equal_split"
AIR_SHARING_MODES = (PER_STREAM, EQUAL_SPLIT)

CUT_THROUGH = "cut_through"
STORE_AND_FORWARD = "store_and_forward"
DELAY_MODELS = (CUT_THROUGH, STORE_AND_FORWARD)

MODE_OPTIMIZED = "optimized"
MODE_GREEDY = "greedy"
MODE_EQUAL = "equal"
MODE_FULL = "full"
SWEEP_MODES = (MODE_OPTIMIZED, MODE_GREEDY, MODE_EQUAL, MODE_FULL)

# sweep mode -> (association mode, bandwidth mode)
_MODE_MAP = {
    MODE_OPTIMIZED: (ASSOC_OPTIMIZED, BANDWIDTH_OPTIMIZED),
    MODE_GREEDY: (ASSOC_GREEDY, BANDWIDTH_OPTIMIZED),
    MODE_EQUAL: (ASSOC_OPTIMIZED, BANDWIDTH_EQUAL),
    MODE_FULL: (ASSOC_FULL, BANDWIDTH_OPTIMIZED),
}

EXHAUSTIVE_CANDIDATE_LIMIT = 12
LOCAL_SEARCH_MAX_ITER = 200
_MIN_SHARE = 1e-9

SWEEP_CSV_HEADER = (
    "max_isls",
    "mode",
    "seed",
    "epoch_s",
    "avg_delay_s",
    "delivered",
    "undelivered",
)


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FileRequest:
    """One aircraft's file request for the current time slot."""

    request_id: str
    aircraft_id: str
    file_class: int
    num_packets: int
    cached: bool
    packet_bits: int = 1080
    cache_holders: frozenset[str] = frozenset()
    source_gs_set: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if self.num_packets <= 0:
            raise ValueError(f"num_packets must be > 0, got {self.num_packets}")
        if self.packet_bits <= 0:
            raise ValueError(f"packet_bits must be > 0, got {self.packet_bits}")

    @property
    def total_bits(self) -> int:
        return self.num_packets * self.packet_bits


@dataclass(frozen=True)
class StreamPlan:
    """One parallel download stream and its share of the file."""

    source: str
    nodes: tuple[str, ...]
    prop_delay_s: float
    rate_bps: float
    ratio: float


@dataclass(frozen=True)
class RequestPlan:
    """Delivery decision for a single request."""

    request: FileRequest
    delivered: bool
    delay_s: float
    serving_satellite: str | None = None
    gs_id: str | None = None
    bandwidth_share: float | None = None
    streams: tuple[StreamPlan, ...] = ()
    activated_isl_edges: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class DeliveryPlan:
    """All per-request decisions of one slot plus the slot aggregates."""

    epoch_s: float
    max_isls: int
    mode: str
    request_plans: tuple[RequestPlan, ...]
    average_delay_s: float
    delivered: int
    undelivered: int

    def gs_bandwidth_shares(self) -> dict[str, dict[str, float]]:
        shares: dict[str, dict[str, float]] = {}
        for plan in self.request_plans:
            if plan.gs_id is not None and plan.bandwidth_share is not None:
                shares.setdefault(plan.gs_id, {})[plan.request.request_id] = (
                    plan.bandwidth_share
                )
        return shares


# ---------------------------------------------------------------------------
# Delay primitives
# ---------------------------------------------------------------------------


def stream_delay(path, bits: float, *, store_and_forward: bool = False) -> float:
    """End-to-end delay of one stream carrying ``bits`` along ``path``.

    Cut-through (default): propagation plus a single transmission time at
    the bottleneck link. Store-and-forward pays the transmission time on
    every hop instead.
    """
    if bits < 0:
        raise ValueError(f"bits must be >= 0, got {bits}")
    prop = path.total_propagation_delay_s
    if bits == 0:
        return prop
    if store_and_forward:
        if any(cap <= 0 for cap in path.edge_capacities_bps):
            return math.inf
        return prop + bits * sum(1.0 / cap for cap in path.edge_capacities_bps)
    if path.bottleneck_capacity_bps <= 0:
        return math.inf
    return prop + bits / path.bottleneck_capacity_bps


def optimal_ratio_delay(
    sources: Sequence[tuple[float, float]], total_bits: float
) -> tuple[float, list[float]]:
    """Minimum completion time over parallel sources and the split achieving it.

    ``sources`` is a list of (propagation delay, rate). The returned D is the
    unique solution of ``sum_c max(0, D - prop_c) * rate_c = total_bits``;
    ratios are ``(D - prop_c) * rate_c / total_bits`` clipped at zero, so all
    active sources finish together at D. Sources with non-positive rate never
    activate; with no usable source the delay is infinite.
    """
    if total_bits < 0:
        raise ValueError(f"total_bits must be >= 0, got {total_bits}")
    ratios = [0.0] * len(sources)
    usable = [
        (prop, rate, idx)
        for idx, (prop, rate) in enumerate(sources)
        if rate > 0 and not math.isinf(prop)
    ]
    if not usable:
        return math.inf, ratios
    usable.sort(key=lambda item: (item[0], item[2]))
    if total_bits == 0:
        ratios[usable[0][2]] = 1.0
        return usable[0][0], ratios
    rate_sum = 0.0
    weighted_prop = 0.0
    delay = math.inf
    active = 0
    for j, (prop, rate, _) in enumerate(usable):
        rate_sum += rate
        weighted_prop += prop * rate
        candidate = (total_bits + weighted_prop) / rate_sum
        if j + 1 == len(usable) or candidate <= usable[j + 1][0]:
            delay = candidate
            active = j + 1
            break
    for prop, rate, idx in usable[:active]:
        ratios[idx] = max(0.0, (delay - prop) * rate / total_bits)
    # The active set satisfies sum((D - p) * r) == bits analytically; divide
    # out the floating-point residue so the ratios sum to exactly one.
    total = sum(ratios)
    if total > 0:
        ratios = [r / total for r in ratios]
    return delay, ratios


# ---------------------------------------------------------------------------
# Ground-station bandwidth allocation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GsFlow:
    """One non-cached flow drawing a share of its ground station's band.

    ``fixed_cap_bps`` is the bottleneck of the share-independent hops
    (infinite when the feeder is the only link); ``fixed_inv_rate`` is the
    summed inverse rate of those hops for the store-and-forward model.
    """

    flow_id: str
    bits: float
    base_prop_s: float
    fixed_cap_bps: float
    feeder_params: LinkBudgetParams
    feeder_distance_km: float
    store_and_forward: bool = False
    fixed_inv_rate: float = 0.0

    def feeder_capacity_bps(self, share: float) -> float:
        return capacity_bps(self.feeder_params, self.feeder_distance_km, share)

    def rate_bps(self, share: float) -> float:
        cap = self.feeder_capacity_bps(share)
        if self.store_and_forward:
            return 1.0 / (1.0 / cap + self.fixed_inv_rate)
        return min(cap, self.fixed_cap_bps)

    def delay_s(self, share: float) -> float:
        rate = self.rate_bps(share)
        if rate <= 0:
            return math.inf
        return self.base_prop_s + self.bits / rate


def _feeder_capacity_slope(params: LinkBudgetParams, distance_km: float, share: float) -> float:
    # d/dshare of share*B*log2(1 + S/share) with S the full-band SNR.
    s_full = snr_linear(params, distance_km, 1.0)
    return (params.bandwidth_hz / math.log(2.0)) * (
        math.log1p(s_full / share) - s_full / (share + s_full)
    )


def _marginal_gain(flow: GsFlow, share: float) -> float:
    """-d(delay)/d(share): how much one more unit of share still buys."""
    cap = flow.feeder_capacity_bps(share)
    slope = _feeder_capacity_slope(flow.feeder_params, flow.feeder_distance_km, share)
    return flow.bits * slope / (cap * cap)


def _share_cap(flow: GsFlow) -> float:
    """Smallest share beyond which more feeder bandwidth cannot help."""
    if flow.store_and_forward or math.isinf(flow.fixed_cap_bps):
        return 1.0
    if flow.feeder_capacity_bps(1.0) <= flow.fixed_cap_bps:
        return 1.0
    lo, hi = _MIN_SHARE, 1.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if flow.feeder_capacity_bps(mid) < flow.fixed_cap_bps:
            lo = mid
        else:
            hi = mid
    return hi


def _share_at_marginal(flow: GsFlow, lam: float, cap: float) -> float:
    if _marginal_gain(flow, cap) >= lam:
        return cap
    lo, hi = _MIN_SHARE, cap
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if _marginal_gain(flow, mid) >= lam:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def optimize_gs_shares(
    flows: Sequence[GsFlow], *, equal: bool = False
) -> dict[str, float]:
    """Feeder shares minimizing the summed delay of one station's flows.

    Subject to the shares summing to at most one. Marginal delay reduction
    is decreasing in the share for every flow, so the optimum equalizes the
    marginals (found by bisection on the common marginal value); flows whose
    delay already hit the downstream bottleneck are capped at the share that
    reaches it. Leftover band is spread evenly, which changes no delay.
    """
    if not flows:
        return {}
    n = len(flows)
    if equal:
        return {flow.flow_id: 1.0 / n for flow in flows}
    caps = [_share_cap(flow) for flow in flows]
    total_cap = sum(caps)
    if total_cap <= 1.0:
        slack = (1.0 - total_cap) / n
        return {flow.flow_id: cap + slack for flow, cap in zip(flows, caps)}

    def shares_at(lam: float) -> list[float]:
        return [
            _share_at_marginal(flow, lam, cap) for flow, cap in zip(flows, caps)
        ]

    hi = 1.0
    while sum(shares_at(hi)) > 1.0:
        hi *= 4.0
    lo = 0.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if sum(shares_at(mid)) > 1.0:
            lo = mid
        else:
            hi = mid
    final = shares_at(hi)
    return {flow.flow_id: share for flow, share in zip(flows, final)}


# ---------------------------------------------------------------------------
# Slot context: indexed view of one epoch's candidate snapshot
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _IslRoute:
    nodes: tuple[str, ...]
    distance_km: float
    delay_s: float
    edge_capacities_bps: tuple[float, ...]

    @property
    def hop_count(self) -> int:
        return len(self.nodes) - 1


class _SlotContext:
    """Per-epoch lookups over the candidate snapshot (mesh plus ground links)."""

    def __init__(
        self,
        snapshot: TopologySnapshot,
        link_params: dict[str, LinkBudgetParams] | None = None,
    ):
        self.snapshot = snapshot
        self.link_params = link_params or links.default_link_params()
        self._by_class_by_node: dict[str, dict[str, list[LinkEdge]]] = {}
        self._isl_adj: dict[str, list[tuple[str, LinkEdge]]] = {}
        self._isl_edge: dict[tuple[str, str], LinkEdge] = {}
        for edge in snapshot.edges:
            per_node = self._by_class_by_node.setdefault(edge.link_class, {})
            per_node.setdefault(edge.node_a, []).append(edge)
            per_node.setdefault(edge.node_b, []).append(edge)
            if edge.link_class == ISL_LASER:
                self._isl_adj.setdefault(edge.node_a, []).append((edge.node_b, edge))
                self._isl_adj.setdefault(edge.node_b, []).append((edge.node_a, edge))
                self._isl_edge[edge.key] = edge
        for per_node in self._by_class_by_node.values():
            for node, edges in per_node.items():
                edges.sort(key=lambda e: (e.distance_km, e.other(node)))
        for neighbors in self._isl_adj.values():
            neighbors.sort(key=lambda item: item[0])
        self._sssp: dict[str, tuple[dict, dict]] = {}

    def edges_at(self, link_class: str, node: str) -> list[LinkEdge]:
        return self._by_class_by_node.get(link_class, {}).get(node, [])

    def edge_between(self, link_class: str, a: str, b: str) -> LinkEdge | None:
        if link_class == ISL_LASER:
            return self._isl_edge.get((a, b) if a < b else (b, a))
        for edge in self.edges_at(link_class, a):
            if edge.other(a) == b:
                return edge
        return None

    def _shortest_tree(self, src: str) -> tuple[dict, dict]:
        if src not in self._sssp:
            best = {src: (0.0, 0)}
            parent: dict[str, str | None] = {src: None}
            heap = [(0.0, 0, src)]
            while heap:
                dist, hops, here = heapq.heappop(heap)
                if (dist, hops) != best.get(here):
                    continue
                for neighbor, edge in self._isl_adj.get(here, ()):
                    candidate = (dist + edge.distance_km, hops + 1)
                    if neighbor not in best or candidate < best[neighbor]:
                        best[neighbor] = candidate
                        parent[neighbor] = here
                        heapq.heappush(heap, (candidate[0], candidate[1], neighbor))
            self._sssp[src] = (best, parent)
        return self._sssp[src]

    def isl_route(self, src: str, dst: str) -> _IslRoute | None:
        """Shortest-distance laser path from src to dst over the mesh."""
        if src == dst:
            return _IslRoute((src,), 0.0, 0.0, ())
        best, parent = self._shortest_tree(dst)
        if src not in best:
            return None
        chain = [src]
        while chain[-1] != dst:
            chain.append(parent[chain[-1]])
        distance = 0.0
        delay = 0.0
        caps = []
        for a, b in zip(chain, chain[1:]):
            edge = self._isl_edge[(a, b) if a < b else (b, a)]
            distance += edge.distance_km
            delay += edge.delay_s
            caps.append(edge.capacity_bps)
        return _IslRoute(tuple(chain), distance, delay, tuple(caps))


def build_slot_context(scenario: "Scenario", epoch_s: float) -> _SlotContext:
    """Candidate snapshot for one epoch: full in-range mesh plus ground links."""
    states = orbits.propagate(scenario.constellation, epoch_s)
    mesh = build_dynamic_topology(
        states,
        max_isls=max(0, len(states) - 1),
        epoch_s=epoch_s,
        max_range_km=scenario.topology.max_range_km,
        grazing_altitude_km=scenario.topology.grazing_altitude_km,
        isl_params=scenario.link_params[ISL_LASER],
    )
    snapshot = attach_ground_links(
        mesh,
        list(scenario.ground_stations) + list(scenario.aircraft),
        link_params=scenario.link_params,
        elevation_mask_deg=scenario.topology.elevation_mask_deg,
    )
    return _SlotContext(snapshot, scenario.link_params)


# ---------------------------------------------------------------------------
# Cached delivery
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _HolderCandidate:
    holder: str
    edge: LinkEdge
    prop_s: float


def _evaluate_cached(
    serving: str,
    aircraft: str,
    air_edge: LinkEdge,
    serving_holds: bool,
    candidates: Sequence[_HolderCandidate],
    chosen: tuple[int, ...],
    bits: float,
    air_sharing: str,
    store_and_forward: bool,
) -> tuple[float, list[StreamPlan]]:
    """Delay of one (serving satellite, holder subset) choice.

    Streams share the serving satellite's air link according to
    ``air_sharing``: ``per_stream`` grants each stream a full-rate beam,
    ``equal_split`` divides the air rate across the streams.
    """
    m = len(chosen) + (1 if serving_holds else 0)
    if m == 0:
        return math.inf, []
    air_rate = air_edge.capacity_bps
    air_prop = air_edge.delay_s
    share = air_rate if air_sharing == PER_STREAM else air_rate / m
    sources = []
    specs = []
    if serving_holds:
        sources.append((air_prop, share))
        specs.append((serving, (serving, aircraft), air_prop, share))
    for idx in chosen:
        cand = candidates[idx]
        if store_and_forward:
            rate = 1.0 / (1.0 / cand.edge.capacity_bps + 1.0 / share)
        else:
            rate = min(cand.edge.capacity_bps, share)
        prop = cand.prop_s + air_prop
        sources.append((prop, rate))
        specs.append((cand.holder, (cand.holder, serving, aircraft), prop, rate))
    delay, ratios = optimal_ratio_delay(sources, bits)
    streams = [
        StreamPlan(source, nodes, prop, rate, ratio)
        for (source, nodes, prop, rate), ratio in zip(specs, ratios)
    ]
    return delay, streams


def _search_subsets(
    serving: str,
    aircraft: str,
    air_edge: LinkEdge,
    serving_holds: bool,
    candidates: list[_HolderCandidate],
    budget: int,
    bits: float,
    air_sharing: str,
    store_and_forward: bool,
) -> tuple[float, tuple[int, ...]]:
    """Best holder subset for a fixed serving satellite.

    Exhaustive over all subsets up to the budget while the candidate count
    stays small; beyond that, prefix ladders (by single-stream rate and by
    propagation) seed a pairwise add/drop/swap local search.
    """

    def evaluate(chosen: tuple[int, ...]) -> float:
        delay, _ = _evaluate_cached(
            serving,
            aircraft,
            air_edge,
            serving_holds,
            candidates,
            chosen,
            bits,
            air_sharing,
            store_and_forward,
        )
        return delay

    n = len(candidates)
    best_delay = math.inf
    best_chosen: tuple[int, ...] = ()
    if n <= EXHAUSTIVE_CANDIDATE_LIMIT:
        for size in range(0, min(budget, n) + 1):
            if size == 0 and not serving_holds:
                continue
            for combo in itertools.combinations(range(n), size):
                delay = evaluate(combo)
                if delay < best_delay:
                    best_delay = delay
                    best_chosen = combo
        return best_delay, best_chosen

    air_rate = air_edge.capacity_bps
    if store_and_forward:
        single_rate = [
            1.0 / (1.0 / c.edge.capacity_bps + 1.0 / air_rate) for c in candidates
        ]
    else:
        single_rate = [min(c.edge.capacity_bps, air_rate) for c in candidates]
    rate_order = sorted(
        range(n), key=lambda i: (-single_rate[i], candidates[i].prop_s, candidates[i].holder)
    )
    limit = min(budget, n)
    seeds = {tuple(sorted(rate_order[:j])) for j in range(limit + 1)}
    seeds.update(tuple(range(j)) for j in range(limit + 1))
    for seed in sorted(seeds):
        if not seed and not serving_holds:
            continue
        delay = evaluate(seed)
        if delay < best_delay:
            best_delay = delay
            best_chosen = seed
    for _ in range(LOCAL_SEARCH_MAX_ITER):
        improved = False
        current = set(best_chosen)
        moves: list[tuple[int, ...]] = []
        if len(current) < limit:
            moves.extend(
                tuple(sorted(current | {i})) for i in range(n) if i not in current
            )
        for i in sorted(current):
            smaller = current - {i}
            if smaller or serving_holds:
                moves.append(tuple(sorted(smaller)))
            moves.extend(
                tuple(sorted(smaller | {j})) for j in range(n) if j not in current
            )
        for move in moves:
            delay = evaluate(move)
            if delay < best_delay:
                best_delay = delay
                best_chosen = move
                improved = True
                break
        if not improved:
            break
    return best_delay, best_chosen


def plan_cached(
    request: FileRequest,
    snapshot: TopologySnapshot,
    max_isls: int,
    mode: str = ASSOC_OPTIMIZED,
    *,
    ctx: _SlotContext | None = None,
    air_sharing: str = PER_STREAM,
    store_and_forward: bool = False,
) -> RequestPlan:
    """Serving-satellite association and holder selection for a cached file.

    ``optimized`` searches every visible serving satellite; ``greedy`` takes
    the nearest one that can deliver and fills its budget with the
    highest-rate holders; ``fully_connected`` lifts the degree budget.
    """
    if mode not in ASSOC_MODES:
        raise ValueError(f"mode must be one of {ASSOC_MODES}, got {mode!r}")
    if air_sharing not in AIR_SHARING_MODES:
        raise ValueError(f"air_sharing must be one of {AIR_SHARING_MODES}")
    if max_isls < 0:
        raise ValueError(f"max_isls must be >= 0, got {max_isls}")
    if not request.cached:
        raise ValueError(f"request {request.request_id} is not cached")
    if ctx is None:
        ctx = _SlotContext(snapshot)
    bits = float(request.total_bits)
    air_edges = ctx.edges_at(SAT_TO_AIR, request.aircraft_id)
    best: tuple[float, str, LinkEdge, bool, list[_HolderCandidate], tuple[int, ...]] | None = None
    for air_edge in air_edges:
        serving = air_edge.other(request.aircraft_id)
        serving_holds = serving in request.cache_holders
        candidates = []
        for holder in sorted(request.cache_holders):
            if holder == serving:
                continue
            edge = ctx.edge_between(ISL_LASER, holder, serving)
            if edge is not None:
                candidates.append(_HolderCandidate(holder, edge, edge.delay_s))
        candidates.sort(key=lambda c: (c.prop_s, c.holder))
        budget = len(candidates) if mode == ASSOC_FULL else min(max_isls, len(candidates))
        if mode == ASSOC_GREEDY:
            air_rate = air_edge.capacity_bps
            if store_and_forward:
                rate_of = lambda c: 1.0 / (1.0 / c.edge.capacity_bps + 1.0 / air_rate)
            else:
                rate_of = lambda c: min(c.edge.capacity_bps, air_rate)
            order = sorted(
                range(len(candidates)),
                key=lambda i: (-rate_of(candidates[i]), candidates[i].prop_s, candidates[i].holder),
            )
            chosen = tuple(sorted(order[:budget]))
            if not chosen and not serving_holds:
                continue  # nothing to stream from here; try the next nearest
            delay, _ = _evaluate_cached(
                serving, request.aircraft_id, air_edge, serving_holds,
                candidates, chosen, bits, air_sharing, store_and_forward,
            )
            best = (delay, serving, air_edge, serving_holds, candidates, chosen)
            break
        delay, chosen = _search_subsets(
            serving, request.aircraft_id, air_edge, serving_holds,
            candidates, budget, bits, air_sharing, store_and_forward,
        )
        if math.isinf(delay):
            continue
        if best is None or delay < best[0]:
            best = (delay, serving, air_edge, serving_holds, candidates, chosen)
    if best is None:
        return RequestPlan(request=request, delivered=False, delay_s=math.inf)
    delay, serving, air_edge, serving_holds, candidates, chosen = best
    _, streams = _evaluate_cached(
        serving, request.aircraft_id, air_edge, serving_holds,
        candidates, chosen, bits, air_sharing, store_and_forward,
    )
    activated = tuple(sorted(candidates[i].edge.key for i in chosen))
    return RequestPlan(
        request=request,
        delivered=True,
        delay_s=delay,
        serving_satellite=serving,
        streams=tuple(streams),
        activated_isl_edges=activated,
    )


# ---------------------------------------------------------------------------
# Non-cached delivery
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _RouteOption:
    """One candidate chain for a non-cached file."""

    gs: str
    entry: str | None
    serving: str | None
    nodes: tuple[str, ...]
    base_prop_s: float
    fixed_cap_bps: float
    fixed_inv_rate: float
    feeder_class: str
    feeder_distance_km: float
    activated_edge: tuple[str, str] | None


def _route_options(
    ctx: _SlotContext, request: FileRequest, max_isls: int
) -> list[_RouteOption]:
    options: list[_RouteOption] = []
    air_edges = ctx.edges_at(SAT_TO_AIR, request.aircraft_id)
    for gs in sorted(request.source_gs_set):
        direct = ctx.edge_between(GROUND_TO_AIR, gs, request.aircraft_id)
        if direct is not None:
            options.append(
                _RouteOption(
                    gs=gs,
                    entry=None,
                    serving=None,
                    nodes=(gs, request.aircraft_id),
                    base_prop_s=direct.delay_s,
                    fixed_cap_bps=math.inf,
                    fixed_inv_rate=0.0,
                    feeder_class=GROUND_TO_AIR,
                    feeder_distance_km=direct.distance_km,
                    activated_edge=None,
                )
            )
        for feeder in ctx.edges_at(GROUND_TO_SAT, gs):
            entry = feeder.other(gs)
            for air_edge in air_edges:
                serving = air_edge.other(request.aircraft_id)
                if max_isls == 0 and entry != serving:
                    continue
                route = ctx.isl_route(entry, serving)
                if route is None:
                    continue
                caps = route.edge_capacities_bps + (air_edge.capacity_bps,)
                options.append(
                    _RouteOption(
                        gs=gs,
                        entry=entry,
                        serving=serving,
                        nodes=(gs,) + route.nodes + (request.aircraft_id,),
                        base_prop_s=feeder.delay_s + route.delay_s + air_edge.delay_s,
                        fixed_cap_bps=min(caps),
                        fixed_inv_rate=sum(1.0 / c for c in caps),
                        feeder_class=GROUND_TO_SAT,
                        feeder_distance_km=feeder.distance_km,
                        activated_edge=(
                            None
                            if route.hop_count == 0
                            else tuple(sorted(route.nodes[-2:]))
                        ),
                    )
                )
    return options


def _flow_for(
    ctx: _SlotContext, request: FileRequest, option: _RouteOption, store_and_forward: bool
) -> GsFlow:
    return GsFlow(
        flow_id=request.request_id,
        bits=float(request.total_bits),
        base_prop_s=option.base_prop_s,
        fixed_cap_bps=option.fixed_cap_bps,
        feeder_params=ctx.link_params[option.feeder_class],
        feeder_distance_km=option.feeder_distance_km,
        store_and_forward=store_and_forward,
        fixed_inv_rate=option.fixed_inv_rate,
    )


def _greedy_route(
    ctx: _SlotContext,
    request: FileRequest,
    options: list[_RouteOption],
    store_and_forward: bool,
) -> _RouteOption:
    def rate_key(option: _RouteOption):
        flow = _flow_for(ctx, request, option, store_and_forward)
        return (
            -flow.rate_bps(1.0),
            option.base_prop_s,
            option.gs,
            option.entry or "",
        )

    for air_edge in ctx.edges_at(SAT_TO_AIR, request.aircraft_id):
        serving = air_edge.other(request.aircraft_id)
        pool = [o for o in options if o.serving == serving]
        if pool:
            return min(pool, key=rate_key)
    direct = [o for o in options if o.serving is None]
    if direct:
        return min(direct, key=rate_key)
    return min(options, key=rate_key)


def plan_non_cached(
    requests: Sequence[FileRequest],
    snapshot: TopologySnapshot,
    max_isls: int,
    mode: str = ASSOC_OPTIMIZED,
    *,
    bandwidth_mode: str = BANDWIDTH_OPTIMIZED,
    ctx: _SlotContext | None = None,
    store_and_forward: bool = False,
) -> list[RequestPlan]:
    """Jointly plan the slot's non-cached files.

    Each file takes one chain. Two route assignments are evaluated end to
    end under the requested bandwidth scheme, per-file standalone-best and
    greedy serving-first, and the cheaper one wins; the greedy baseline mode
    is pinned to the latter, so the optimized plan can never lose to it.
    """
    if mode not in ASSOC_MODES:
        raise ValueError(f"mode must be one of {ASSOC_MODES}, got {mode!r}")
    if bandwidth_mode not in (BANDWIDTH_OPTIMIZED, BANDWIDTH_EQUAL):
        raise ValueError(f"unknown bandwidth_mode {bandwidth_mode!r}")
    if max_isls < 0:
        raise ValueError(f"max_isls must be >= 0, got {max_isls}")
    if ctx is None:
        ctx = _SlotContext(snapshot)
    for request in requests:
        if request.cached:
            raise ValueError(f"request {request.request_id} is cached")

    budget = len(ctx.snapshot.nodes) if mode == ASSOC_FULL else max_isls
    options_by_request: dict[str, list[_RouteOption]] = {}
    plans: dict[str, RequestPlan] = {}
    deliverable: list[FileRequest] = []
    for request in requests:
        options = _route_options(ctx, request, budget)
        if not options:
            plans[request.request_id] = RequestPlan(
                request=request, delivered=False, delay_s=math.inf
            )
            continue
        options_by_request[request.request_id] = options
        deliverable.append(request)

    if deliverable:
        standalone: dict[str, _RouteOption] = {}
        for request in deliverable:
            options = options_by_request[request.request_id]
            standalone[request.request_id] = min(
                options,
                key=lambda o: (
                    _flow_for(ctx, request, o, store_and_forward).delay_s(1.0),
                    o.gs,
                    o.entry or "",
                    o.serving or "",
                ),
            )
        greedy = {
            request.request_id: _greedy_route(
                ctx, request, options_by_request[request.request_id], store_and_forward
            )
            for request in deliverable
        }

        def evaluate(
            assignment: dict[str, _RouteOption], equal: bool
        ) -> tuple[float, dict[str, float], dict[str, float]]:
            by_gs: dict[str, list[GsFlow]] = {}
            for request in deliverable:
                option = assignment[request.request_id]
                by_gs.setdefault(option.gs, []).append(
                    _flow_for(ctx, request, option, store_and_forward)
                )
            shares: dict[str, float] = {}
            for gs in sorted(by_gs):
                shares.update(optimize_gs_shares(by_gs[gs], equal=equal))
            delays = {}
            for request in deliverable:
                option = assignment[request.request_id]
                flow = _flow_for(ctx, request, option, store_and_forward)
                delays[request.request_id] = flow.delay_s(shares[request.request_id])
            return sum(delays.values()), shares, delays

        equal = bandwidth_mode == BANDWIDTH_EQUAL
        if mode == ASSOC_GREEDY:
            assignment = greedy
        else:
            total_standalone, _, _ = evaluate(standalone, equal)
            total_greedy, _, _ = evaluate(greedy, equal)
            assignment = standalone if total_standalone <= total_greedy else greedy
        _, shares, delays = evaluate(assignment, equal)

        for request in deliverable:
            option = assignment[request.request_id]
            share = shares[request.request_id]
            delay = delays[request.request_id]
            flow = _flow_for(ctx, request, option, store_and_forward)
            stream = StreamPlan(
                source=option.gs,
                nodes=option.nodes,
                prop_delay_s=option.base_prop_s,
                rate_bps=flow.rate_bps(share),
                ratio=1.0,
            )
            plans[request.request_id] = RequestPlan(
                request=request,
                delivered=True,
                delay_s=delay,
                serving_satellite=option.serving,
                gs_id=option.gs,
                bandwidth_share=share,
                streams=(stream,),
                activated_isl_edges=(
                    (option.activated_edge,) if option.activated_edge else ()
                ),
            )

    return [plans[request.request_id] for request in requests]


# ---------------------------------------------------------------------------
# Slot execution and the degree sweep
# ---------------------------------------------------------------------------


def generate_requests(scenario: "Scenario", rng_seed: int) -> list[FileRequest]:
    """One request per aircraft, reproducibly drawn from ``rng_seed``.

    File class and size are uniform over the configured class ranges; a
    request is cached with the scenario hit probability. Each class's cache
    placement (a fixed fraction of the fleet) is drawn first, so every
    request of a class sees the same holder set. Non-cached files can be
    fetched from any ground station.
    """
    cfg = scenario.constellation
    sat_nodes = [
        orbits.sat_key(p, s)
        for p in range(cfg.num_planes)
        for s in range(cfg.sats_per_plane)
    ]
    rng = np.random.default_rng(rng_seed)
    ranges = scenario.ifc.file_class_packet_ranges
    n_cache = max(1, round(scenario.ifc.cache_fraction * len(sat_nodes)))
    placements = []
    for _ in ranges:
        perm = rng.permutation(len(sat_nodes))
        placements.append(frozenset(sat_nodes[int(i)] for i in perm[:n_cache]))
    gs_ids = frozenset(g.node_id for g in scenario.ground_stations)
    requests = []
    aircraft = sorted(scenario.aircraft, key=lambda g: g.node_id)
    for idx, ac in enumerate(aircraft):
        file_class = int(rng.integers(0, len(ranges)))
        lo, hi = ranges[file_class]
        packets = int(rng.integers(lo, hi, endpoint=True))
        cached = bool(rng.random() < scenario.ifc.cache_hit_probability)
        requests.append(
            FileRequest(
                request_id=f"req-{idx:03d}",
                aircraft_id=ac.node_id,
                file_class=file_class,
                num_packets=packets,
                cached=cached,
                packet_bits=scenario.ifc.packet_bits,
                cache_holders=placements[file_class] if cached else frozenset(),
                source_gs_set=frozenset() if cached else gs_ids,
            )
        )
    return requests


def run_slot(
    scenario: "Scenario",
    epoch_s: float,
    max_isls: int,
    mode: str,
    rng_seed: int,
    *,
    ctx: _SlotContext | None = None,
) -> DeliveryPlan:
    """Generate and plan one slot's requests; average over delivered files.

    Fully deterministic in (scenario, epoch, max_isls, mode, seed): request
    generation never looks at the degree budget or the mode, so a fixed seed
    compares the same workload across every sweep cell.
    """
    if mode not in SWEEP_MODES:
        raise ValueError(f"mode must be one of {SWEEP_MODES}, got {mode!r}")
    if max_isls < 0:
        raise ValueError(f"max_isls must be >= 0, got {max_isls}")
    assoc_mode, bandwidth_mode = _MODE_MAP[mode]
    if ctx is None:
        ctx = build_slot_context(scenario, epoch_s)
    store_and_forward = scenario.ifc.delay_model == STORE_AND_FORWARD
    requests = generate_requests(scenario, rng_seed)
    plans: dict[str, RequestPlan] = {}
    for request in requests:
        if request.cached:
            plans[request.request_id] = plan_cached(
                request,
                ctx.snapshot,
                max_isls,
                assoc_mode,
                ctx=ctx,
                air_sharing=scenario.ifc.air_link_sharing,
                store_and_forward=store_and_forward,
            )
    non_cached = [r for r in requests if not r.cached]
    for plan in plan_non_cached(
        non_cached,
        ctx.snapshot,
        max_isls,
        assoc_mode,
        bandwidth_mode=bandwidth_mode,
        ctx=ctx,
        store_and_forward=store_and_forward,
    ):
        plans[plan.request.request_id] = plan
    ordered = tuple(plans[r.request_id] for r in requests)
    delivered = [p for p in ordered if p.delivered]
    average = sum(p.delay_s for p in delivered) / len(delivered) if delivered else 0.0
    return DeliveryPlan(
        epoch_s=epoch_s,
        max_isls=max_isls,
        mode=mode,
        request_plans=ordered,
        average_delay_s=average,
        delivered=len(delivered),
        undelivered=len(ordered) - len(delivered),
    )


@dataclass(frozen=True)
class SweepRow:
    max_isls: int
    mode: str
    seed: int
    epoch_s: float
    avg_delay_s: float
    delivered: int
    undelivered: int


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]

    def csv_rows(self) -> list[tuple]:
        out = [SWEEP_CSV_HEADER]
        for r in self.rows:
            out.append(
                (r.max_isls, r.mode, r.seed, r.epoch_s, r.avg_delay_s, r.delivered, r.undelivered)
            )
        return out

    def mean_delay(self, max_isls: int, mode: str) -> float:
        cells = [r.avg_delay_s for r in self.rows if r.max_isls == max_isls and r.mode == mode]
        if not cells:
            raise KeyError(f"no rows for (max_isls={max_isls}, mode={mode!r})")
        return sum(cells) / len(cells)

    def summary(self) -> list[tuple[int, str, float]]:
        keys = sorted({(r.max_isls, r.mode) for r in self.rows})
        return [(k, m, self.mean_delay(k, m)) for k, m in keys]

    def summary_csv_rows(self) -> list[tuple]:
        out = [("max_isls", "mode", "mean_avg_delay_s")]
        out.extend(self.summary())
        return out


def sweep_max_isls(
    scenario: "Scenario",
    isls_values: Iterable[int],
    modes: Iterable[str],
    epochs: Iterable[float],
    seeds: Iterable[int],
) -> SweepResult:
    """Average delay per (degree budget, mode) cell over epochs and seeds."""
    isls_values = list(isls_values)
    modes = list(modes)
    epochs = list(epochs)
    seeds = list(seeds)
    if not isls_values or not modes or not epochs or not seeds:
        raise ValueError("isls_values, modes, epochs and seeds must be non-empty")
    for mode in modes:
        if mode not in SWEEP_MODES:
            raise ValueError(f"mode must be one of {SWEEP_MODES}, got {mode!r}")
    rows = []
    for epoch_s in epochs:
        ctx = build_slot_context(scenario, epoch_s)
        for max_isls in isls_values:
            for mode in modes:
                for seed in seeds:
                    plan = run_slot(scenario, epoch_s, max_isls, mode, seed, ctx=ctx)
                    rows.append(
                        SweepRow(
                            max_isls=max_isls,
                            mode=mode,
                            seed=seed,
                            epoch_s=epoch_s,
                            avg_delay_s=plan.average_delay_s,
                            delivered=plan.delivered,
                            undelivered=plan.undelivered,
                        )
                    )
    rows.sort(key=lambda r: (r.max_isls, r.mode, r.seed, r.epoch_s))
    return SweepResult(tuple(rows))

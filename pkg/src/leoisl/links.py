"""Link-budget models for the four link classes.

RF classes (satellite-to-air, ground-to-air, ground-to-satellite) use free
space path loss plus a Shannon capacity over a kT*B noise floor. Laser
inter-satellite links are modeled as a fixed-rate pipe: the optical power
budget is out of scope, only the class rate and speed-of-light propagation
matter here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

SPEED_OF_LIGHT_KM_S = 299792.458
BOLTZMANN_J_PER_K = 1.380649e-23

SAT_TO_AIR = "sat_to_air"
GROUND_TO_AIR = "ground_to_air"
GROUND_TO_SAT = "ground_to_sat"
ISL_LASER = "isl_laser"
LINK_CLASSES = (SAT_TO_AIR, GROUND_TO_AIR, GROUND_TO_SAT, ISL_LASER)


@dataclass(frozen=True)
class LinkBudgetParams:
    """Per-class link constants.

    ``lisl_fixed_rate_bps`` only matters for ``isl_laser``; the RF fields are
    kept populated there for serialization symmetry but are unused.
    """

    link_class: str
    tx_power_w: float
    tx_gain_db: float
    rx_gain_db: float
    carrier_hz: float
    bandwidth_hz: float
    noise_temperature_k: float = 290.0
    lisl_fixed_rate_bps: float = 1.0e10

    def __post_init__(self) -> None:
        if self.link_class not in LINK_CLASSES:
            raise ValueError(
                f"link_class must be one of {LINK_CLASSES}, got {self.link_class!r}"
            )
        if self.tx_power_w <= 0:
            raise ValueError(f"tx_power_w must be > 0, got {self.tx_power_w}")
        if self.bandwidth_hz <= 0:
            raise ValueError(f"bandwidth_hz must be > 0, got {self.bandwidth_hz}")
        if self.carrier_hz <= 0:
            raise ValueError(f"carrier_hz must be > 0, got {self.carrier_hz}")
        if self.noise_temperature_k <= 0:
            raise ValueError(
                f"noise_temperature_k must be > 0, got {self.noise_temperature_k}"
            )


def default_link_params() -> dict[str, LinkBudgetParams]:
    """Baseline parameter set: 5 W satellites, 10 W ground stations,
    40/30/52 dB satellite/aircraft/ground antenna gains, 100 MHz RF channels
    at 15/18/30 GHz, and 10 Gbps laser ISLs at 197 THz."""
    return {
        SAT_TO_AIR: LinkBudgetParams(
            link_class=SAT_TO_AIR,
            tx_power_w=5.0,
            tx_gain_db=40.0,
            rx_gain_db=30.0,
            carrier_hz=15.0e9,
            bandwidth_hz=100.0e6,
        ),
        GROUND_TO_AIR: LinkBudgetParams(
            link_class=GROUND_TO_AIR,
            tx_power_w=10.0,
            tx_gain_db=52.0,
            rx_gain_db=30.0,
            carrier_hz=18.0e9,
            bandwidth_hz=100.0e6,
        ),
        GROUND_TO_SAT: LinkBudgetParams(
            link_class=GROUND_TO_SAT,
            tx_power_w=10.0,
            tx_gain_db=52.0,
            rx_gain_db=40.0,
            carrier_hz=30.0e9,
            bandwidth_hz=100.0e6,
        ),
        ISL_LASER: LinkBudgetParams(
            link_class=ISL_LASER,
            tx_power_w=5.0,
            tx_gain_db=0.0,
            rx_gain_db=0.0,
            carrier_hz=197.0e12,
            # Nominal placeholder; the laser class is a fixed-rate pipe and
            # never evaluates a Shannon capacity.
            bandwidth_hz=100.0e6,
            lisl_fixed_rate_bps=1.0e10,
        ),
    }


def fspl_db(distance_km: float, carrier_hz: float) -> float:
    """Free-space path loss: 92.45 + 20*log10(f_GHz) + 20*log10(d_km)."""
    if distance_km <= 0:
        raise ValueError(f"distance_km must be > 0, got {distance_km}")
    if carrier_hz <= 0:
        raise ValueError(f"carrier_hz must be > 0, got {carrier_hz}")
    return 92.45 + 20.0 * math.log10(carrier_hz / 1e9) + 20.0 * math.log10(distance_km)


def snr_linear(
    params: LinkBudgetParams, distance_km: float, bandwidth_share: float = 1.0
) -> float:
    """Linear SNR of an RF link over a ``bandwidth_share`` slice of the band."""
    if bandwidth_share <= 0:
        raise ValueError(f"bandwidth_share must be > 0, got {bandwidth_share}")
    rx_dbw = (
        10.0 * math.log10(params.tx_power_w)
        + params.tx_gain_db
        + params.rx_gain_db
        - fspl_db(distance_km, params.carrier_hz)
    )
    noise_w = (
        BOLTZMANN_J_PER_K
        * params.noise_temperature_k
        * params.bandwidth_hz
        * bandwidth_share
    )
    return 10.0 ** (rx_dbw / 10.0) / noise_w


def capacity_bps(
    params: LinkBudgetParams, distance_km: float, bandwidth_share: float = 1.0
) -> float:
    """Achievable rate of one link.

    RF classes: Shannon rate ``B' * log2(1 + SNR)`` with ``B'`` the granted
    bandwidth slice and the SNR recomputed over that slice. Laser ISLs return
    the fixed class rate regardless of distance and share.
    """
    if bandwidth_share <= 0:
        raise ValueError(f"bandwidth_share must be > 0, got {bandwidth_share}")
    if distance_km <= 0:
        raise ValueError(f"distance_km must be > 0, got {distance_km}")
    if params.link_class == ISL_LASER:
        return params.lisl_fixed_rate_bps
    bw = params.bandwidth_hz * bandwidth_share
    return bw * math.log2(1.0 + snr_linear(params, distance_km, bandwidth_share))


def propagation_delay_s(distance_km: float) -> float:
    """Straight-line propagation delay in vacuum."""
    if distance_km < 0:
        raise ValueError(f"distance_km must be >= 0, got {distance_km}")
    return distance_km / SPEED_OF_LIGHT_KM_S

"""
Base-station power consumption and the energy-efficiency objective.

Each active BS draws effective transmitted power (radiated power over amplifier efficiency), transceiver-chain
power (per antenna plus a local oscillator), and a fixed overhead. A BS in standby draws only its standby power.
"""
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, List, Sequence

from remsleep.errors import ConfigError


if TYPE_CHECKING:
    from remsleep.rem import Action


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(watts: float) -> float:
    if watts <= 0:
        raise ValueError(f"Can't express {watts} W in dBm")
    return 10.0 * math.log10(watts) + 30.0


@dataclass(frozen=True)
class PowerParams:
    amplifier_efficiency: float = 0.5
    """eta: fraction of amplifier input power that is radiated"""
    per_antenna_power: float = 0.4  # W per transceiver chain
    oscillator_power: float = 0.2  # W, local oscillator
    fix_power: float = 10.0  # W, backhaul + baseband, paid by every active BS
    standby_power: float = 10.0  # W drawn by a BS in standby

    def __post_init__(self):
        self.validate()

    def validate(self, prefix: str = "power"):
        if not (0.0 < self.amplifier_efficiency <= 1.0):
            raise ConfigError(f"{prefix}.amplifier_efficiency", f"must be in (0, 1], got {self.amplifier_efficiency}")
        for name in ("per_antenna_power", "oscillator_power", "fix_power", "standby_power"):
            value = getattr(self, name)
            if value < 0 or not math.isfinite(value):
                raise ConfigError(f"{prefix}.{name}", f"must be a finite, non-negative power, got {value}")


@dataclass(frozen=True)
class BsPowerProfile:
    antenna_count: int
    transmit_power: float  # W

    def __post_init__(self):
        if self.antenna_count < 1:
            raise ValueError(f"antenna_count must be >= 1, got {self.antenna_count}")
        if self.transmit_power < 0:
            raise ValueError(f"transmit_power must be >= 0, got {self.transmit_power}")

    @staticmethod
    def from_dbm(antenna_count: int, transmit_power_dbm: float) -> "BsPowerProfile":
        return BsPowerProfile(antenna_count, dbm_to_watts(transmit_power_dbm))


def effective_transmitted_power(profile: BsPowerProfile, params: PowerParams) -> float:
    return profile.transmit_power / params.amplifier_efficiency


def transceiver_chain_power(profile: BsPowerProfile, params: PowerParams) -> float:
    return profile.antenna_count * params.per_antenna_power + params.oscillator_power


def bs_total_power(profile: BsPowerProfile, params: PowerParams, active: bool) -> float:
    if not active:
        return params.standby_power
    return (
        effective_transmitted_power(profile, params) + transceiver_chain_power(profile, params) + params.fix_power
    )


def network_power_breakdown(
    profiles: Sequence[BsPowerProfile], params: PowerParams, action: "Action"
) -> List[float]:
    """
    Per-BS power draw under ``action``. ``profiles[0]`` is the macro BS, which is always active; ``profiles[b + 1]``
    is pico BS ``b``.
    """
    if len(profiles) != action.pbs_count + 1:
        raise ValueError(
            f"Expected {action.pbs_count + 1} power profiles (1 macro + {action.pbs_count} pico), got {len(profiles)}"
        )
    out = [bs_total_power(profiles[0], params, True)]
    for b in range(action.pbs_count):
        out.append(bs_total_power(profiles[b + 1], params, action.is_active(b)))
    return out


def network_power(profiles: Sequence[BsPowerProfile], params: PowerParams, action: "Action") -> float:
    return math.fsum(network_power_breakdown(profiles, params, action))


def energy_efficiency(median_bitrate: float, avg_power: float) -> float:
    """bit/s per W: the median UE bitrate divided by the average network power"""
    if not avg_power > 0:
        raise ValueError(f"Average power must be positive to compute energy efficiency, got {avg_power}")
    if median_bitrate < 0:
        raise ValueError(f"Median bitrate must be non-negative, got {median_bitrate}")
    return median_bitrate / avg_power

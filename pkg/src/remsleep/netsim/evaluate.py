import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from remsleep.geometry import PositionSet
from remsleep.netsim.channel import ChannelParams, ShadowingField, fading_losses_db, rss_matrix
from remsleep.netsim.layout import NetworkLayout
from remsleep.netsim.mobility import DEFAULT_HEADING_CHANGE_TIME, UeState, step_mobility, ue_positions
from remsleep.power import PowerParams, energy_efficiency, network_power
from remsleep.rem import Action


logger = logging.getLogger(__name__)

UNSERVED = -1

UeInput = Union[Sequence[UeState], PositionSet, np.ndarray]


@dataclass(frozen=True)
class EvalOutcome:
    median_bitrate: float  # bit/s, c_50
    avg_power: float  # W
    ee: float  # bit/s/W
    served_ues: int
    per_ue_bitrates: Tuple[float, ...]

    @property
    def n_ues(self) -> int:
        return len(self.per_ue_bitrates)


def _points(ues: UeInput) -> np.ndarray:
    if isinstance(ues, PositionSet):
        return ues.points
    if isinstance(ues, np.ndarray):
        return np.atleast_2d(ues)
    return ue_positions(ues)


def _eligible(action: Action, layout: NetworkLayout) -> np.ndarray:
    if action.pbs_count != layout.pbs_count:
        raise ValueError(f"Action has {action.pbs_count} pico BSs but the layout has {layout.pbs_count}")
    return np.array((True,) + action.pbs_active, dtype=bool)


def associate_from_rss(rss_dbm: np.ndarray, action: Action, channel: ChannelParams) -> np.ndarray:
    """Index of the serving BS per UE: the active BS with the highest RSS, or UNSERVED below the threshold."""
    eligible = np.broadcast_to(np.array((True,) + action.pbs_active, dtype=bool), rss_dbm.shape)
    masked = np.where(eligible, rss_dbm, -np.inf)
    best = np.argmax(masked, axis=1)
    best_rss = masked[np.arange(masked.shape[0]), best]
    return np.where(best_rss >= channel.rss_threshold_dbm, best, UNSERVED).astype(np.int64)


def throughput_from_rss(
    assignment: np.ndarray, rss_dbm: np.ndarray, layout: NetworkLayout, action: Action, channel: ChannelParams
) -> np.ndarray:
    """
    Per-UE rate in bit/s. Each BS splits its bandwidth equally among the UEs it serves; interference is the
    suppressed received power of every other active BS.
    """
    eligible = _eligible(action, layout)
    n_bs = len(layout.bss)
    rates = np.zeros(rss_dbm.shape[0], dtype=np.float64)
    served = assignment != UNSERVED
    if not np.any(served):
        return rates

    rx_mw = np.power(10.0, rss_dbm / 10.0)
    bandwidth = np.array([bs.bandwidth_hz for bs in layout.bss], dtype=np.float64)
    noise_mw = np.power(10.0, np.array([channel.noise_power_dbm(bw) for bw in bandwidth]) / 10.0)
    load = np.bincount(assignment[served], minlength=n_bs)

    idx = np.flatnonzero(served)
    serving = assignment[idx]
    signal = rx_mw[idx, serving]
    total_active = rx_mw[idx] @ eligible.astype(np.float64)
    interference = channel.interference_factor * np.maximum(total_active - signal, 0.0)
    sinr = signal / (interference + noise_mw[serving])
    se = np.minimum(np.log2(1.0 + sinr), channel.spectral_efficiency_cap)
    rates[idx] = bandwidth[serving] / load[serving] * se
    return rates


def associate(
    ues: UeInput,
    layout: NetworkLayout,
    action: Action,
    channel: ChannelParams,
    shadowing: Optional[ShadowingField] = None,
    fading_db: Optional[np.ndarray] = None,
) -> np.ndarray:
    _eligible(action, layout)
    rss = rss_matrix(_points(ues), layout, channel, shadowing, fading_db)
    return associate_from_rss(rss, action, channel)


def throughput(
    assignment: np.ndarray,
    ues: UeInput,
    layout: NetworkLayout,
    action: Action,
    channel: ChannelParams,
    shadowing: Optional[ShadowingField] = None,
    fading_db: Optional[np.ndarray] = None,
) -> np.ndarray:
    rss = rss_matrix(_points(ues), layout, channel, shadowing, fading_db)
    return throughput_from_rss(np.asarray(assignment, dtype=np.int64), rss, layout, action, channel)


def evaluate_configuration(
    ues: UeInput,
    layout: NetworkLayout,
    action: Action,
    channel: ChannelParams,
    power_params: PowerParams,
    rng: np.random.Generator,
    *,
    shadowing: Optional[ShadowingField] = None,
    snapshots: int = 1,
    dt: float = 1.0,
    heading_change_time: float = DEFAULT_HEADING_CHANGE_TIME,
) -> EvalOutcome:
    """
    Evaluates ``action`` over ``snapshots`` snapshots ``dt`` seconds apart. Association is recomputed every snapshot
    and fast fading is redrawn for every BS, active or not, from a snapshot key taken from ``rng``: two actions
    evaluated with identically seeded generators see identical radio conditions, and each UE's fading depends on its
    position only, not on its index in ``ues``.

    UEs given as UeStates move between snapshots; UEs given as bare positions stay put.

    A UE counts as served only if it is served in every snapshot. c_50 is the median over UEs of their mean rate.
    """
    if snapshots < 1:
        raise ValueError(f"snapshots must be >= 1, got {snapshots}")
    _eligible(action, layout)

    moving = not isinstance(ues, (PositionSet, np.ndarray))
    state = list(ues) if moving else None
    points = _points(ues)
    n_ues, n_bs = points.shape[0], len(layout.bss)
    if n_ues == 0:
        raise ValueError("Can't evaluate a configuration without UEs")

    rate_sum = np.zeros(n_ues, dtype=np.float64)
    always_served = np.ones(n_ues, dtype=bool)
    for k in range(snapshots):
        snapshot_key = int(rng.integers(0, 2**63))
        fading = fading_losses_db(points, n_bs, snapshot_key, channel)
        rss = rss_matrix(points, layout, channel, shadowing, fading)
        assignment = associate_from_rss(rss, action, channel)
        rate_sum += throughput_from_rss(assignment, rss, layout, action, channel)
        always_served &= assignment != UNSERVED

        if moving and k + 1 < snapshots:
            state = step_mobility(state, dt, layout.area, rng, heading_change_time)
            points = ue_positions(state)

    mean_rates = rate_sum / snapshots
    c50 = float(np.median(mean_rates))
    power = network_power(layout.power_profiles(), power_params, action)
    return EvalOutcome(
        median_bitrate=c50,
        avg_power=power,
        ee=energy_efficiency(c50, power),
        served_ues=int(always_served.sum()),
        per_ue_bitrates=tuple(float(r) for r in mean_rates),
    )

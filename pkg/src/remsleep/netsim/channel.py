"""
A simplified downlink channel: log-distance path loss, beamforming gain that grows with the antenna count, spatially
frozen shadowing and blockage, and per-snapshot fast fading.

Shadowing and blockage are a deterministic function of (channel seed, position cell, BS): revisiting the same spot
reproduces its large-scale radio conditions, which is what lets knowledge learned at one set of positions transfer to
nearby ones.
"""
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import ndtri

from remsleep.errors import ConfigError
from remsleep.netsim.layout import BsConfig, NetworkLayout


@dataclass(frozen=True)
class ChannelParams:
    pathloss_exponent_macro: float = 3.5
    pathloss_exponent_pico: float = 3.7
    reference_loss_db: float = 43.45
    """path loss at 1 m; the free-space value at 3.55 GHz"""
    min_distance: float = 1.0
    beamforming_gain_scale_db: float = 10.0
    """beamforming gain is ``scale * log10(antenna_count)`` dB"""

    shadowing_sigma_db: float = 6.0
    shadowing_cell_size: float = 10.0
    """side of the square cells over which shadowing and blockage are constant, in meters"""
    blockage_probability: float = 0.2
    """chance that a (cell, BS) link is obstructed"""
    blockage_loss_db: float = 80.0
    fading_sigma_db: float = 2.0
    """per-snapshot lognormal fading, redrawn every snapshot"""
    fading_cell_size: float = 1.0
    """side of the cells over which one snapshot's fading is constant, in meters"""

    noise_figure_db: float = 7.0
    thermal_noise_dbm_per_hz: float = -174.0
    rss_threshold_dbm: float = -120.0
    interference_suppression_db: float = -20.0
    """scales the received power of every active non-serving BS. -inf disables interference."""
    spectral_efficiency_cap: float = 7.4  # bit/s/Hz

    def validate(self, prefix: str = "channel"):
        for name in ("pathloss_exponent_macro", "pathloss_exponent_pico"):
            value = getattr(self, name)
            if not (value >= 2 and math.isfinite(value)):
                raise ConfigError(f"{prefix}.{name}", f"must be a finite number >= 2, got {value}")
        if not math.isfinite(self.rss_threshold_dbm):
            raise ConfigError(f"{prefix}.rss_threshold_dbm", f"must be finite, got {self.rss_threshold_dbm}")
        if not self.min_distance > 0:
            raise ConfigError(f"{prefix}.min_distance", f"must be positive, got {self.min_distance}")
        if not self.shadowing_cell_size > 0:
            raise ConfigError(f"{prefix}.shadowing_cell_size", f"must be positive, got {self.shadowing_cell_size}")
        if not self.fading_cell_size > 0:
            raise ConfigError(f"{prefix}.fading_cell_size", f"must be positive, got {self.fading_cell_size}")
        for name in ("shadowing_sigma_db", "fading_sigma_db", "blockage_loss_db"):
            value = getattr(self, name)
            if not (value >= 0 and math.isfinite(value)):
                raise ConfigError(f"{prefix}.{name}", f"must be finite and non-negative, got {value}")
        if not 0.0 <= self.blockage_probability <= 1.0:
            raise ConfigError(f"{prefix}.blockage_probability", f"must be in [0, 1], got {self.blockage_probability}")
        if self.interference_suppression_db > 0 or math.isnan(self.interference_suppression_db):
            raise ConfigError(
                f"{prefix}.interference_suppression_db", f"must be <= 0 dB, got {self.interference_suppression_db}"
            )
        if not self.spectral_efficiency_cap > 0:
            raise ConfigError(
                f"{prefix}.spectral_efficiency_cap", f"must be positive, got {self.spectral_efficiency_cap}"
            )

    def pathloss_exponent(self, bs: BsConfig) -> float:
        return self.pathloss_exponent_macro if bs.is_macro else self.pathloss_exponent_pico

    def beamforming_gain_db(self, antenna_count: int) -> float:
        return self.beamforming_gain_scale_db * math.log10(antenna_count)

    def pathloss_db(self, distance, exponent: float):
        d = np.maximum(distance, self.min_distance)
        return self.reference_loss_db + 10.0 * exponent * np.log10(d)

    def noise_power_dbm(self, bandwidth_hz: float) -> float:
        return self.thermal_noise_dbm_per_hz + 10.0 * math.log10(bandwidth_hz) + self.noise_figure_db

    @property
    def interference_factor(self) -> float:
        return 10.0 ** (self.interference_suppression_db / 10.0)


_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_SALT_SHADOWING = 0x5348
_SALT_BLOCKAGE = 0x424C
_SALT_FADING = 0x4644


def _splitmix64(z: np.ndarray) -> np.ndarray:
    z = z + _GOLDEN
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def _hash_keys(*keys: np.ndarray) -> np.ndarray:
    z = np.zeros(np.broadcast(*keys).shape, dtype=np.uint64)
    for k in keys:
        k = np.asarray(k)
        if k.dtype != np.uint64:
            k = k.astype(np.int64).view(np.uint64)
        z = _splitmix64(z ^ k)
    return z


def _to_unit_interval(z: np.ndarray) -> np.ndarray:
    """Maps 64-bit hashes to floats strictly inside (0, 1)."""
    return ((z >> np.uint64(11)).astype(np.float64) + 0.5) / float(1 << 53)


class ShadowingField:
    """
    Spatially frozen large-scale losses. ``losses_db(points)`` returns an ``(n, n_bs)`` matrix of the shadowing (and
    blockage) loss of every point towards every BS. The value only depends on the channel seed, the BS index and the
    ``cell_size`` grid cell the point falls in.
    """

    def __init__(self, seed: int, channel: ChannelParams, n_bs: int):
        if not 0 <= seed < 2**64:
            raise ValueError(f"seed must fit in an unsigned 64-bit integer, got {seed}")
        self.seed = int(seed)
        self.channel = channel
        self.n_bs = n_bs

    def _cell_keys(self, points: np.ndarray):
        cells = np.floor(np.asarray(points, dtype=np.float64) / self.channel.shadowing_cell_size).astype(np.int64)
        ix = cells[:, 0:1]
        iy = cells[:, 1:2]
        bs = np.arange(self.n_bs, dtype=np.int64)[None, :]
        return ix, iy, bs

    def losses_db(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        ix, iy, bs = self._cell_keys(points)
        seed = np.uint64(self.seed)
        out = np.zeros((points.shape[0], self.n_bs), dtype=np.float64)
        if self.channel.shadowing_sigma_db > 0:
            u = _to_unit_interval(_hash_keys(seed, np.int64(_SALT_SHADOWING), ix, iy, bs))
            out += self.channel.shadowing_sigma_db * ndtri(u)
        if self.channel.blockage_probability > 0 and self.channel.blockage_loss_db > 0:
            u = _to_unit_interval(_hash_keys(seed, np.int64(_SALT_BLOCKAGE), ix, iy, bs))
            out += np.where(u < self.channel.blockage_probability, self.channel.blockage_loss_db, 0.0)
        return out


def fading_losses_db(points: np.ndarray, n_bs: int, snapshot_key: int, channel: ChannelParams) -> np.ndarray:
    """
    ``(n, n_bs)`` fast-fading losses for one snapshot. Like shadowing, the draw is a hash of the position cell and
    the BS, salted with ``snapshot_key`` instead of the channel seed, so it does not depend on the order of ``points``.
    """
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if channel.fading_sigma_db <= 0:
        return np.zeros((points.shape[0], n_bs), dtype=np.float64)
    cells = np.floor(points / channel.fading_cell_size).astype(np.int64)
    bs = np.arange(n_bs, dtype=np.int64)[None, :]
    z = _hash_keys(np.uint64(snapshot_key), np.int64(_SALT_FADING), cells[:, 0:1], cells[:, 1:2], bs)
    return channel.fading_sigma_db * ndtri(_to_unit_interval(z))


def rss(ue, bs: BsConfig, channel: ChannelParams, shadowing_draw: float = 0.0) -> float:
    """Received signal strength in dBm at ``ue`` (a Position) from ``bs``."""
    d = math.hypot(ue.x - bs.position.x, ue.y - bs.position.y)
    loss = float(channel.pathloss_db(d, channel.pathloss_exponent(bs)))
    return bs.tx_power_dbm + channel.beamforming_gain_db(bs.antenna_count) - loss - shadowing_draw


def rss_matrix(
    points: np.ndarray,
    layout: NetworkLayout,
    channel: ChannelParams,
    shadowing: Optional[ShadowingField] = None,
    fading_db: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    ``(n_ues, n_bs)`` RSS in dBm. ``fading_db`` is an optional matrix of the same shape subtracted like shadowing.
    """
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    bs_pos = layout.bs_positions()
    d = np.hypot(points[:, None, 0] - bs_pos[None, :, 0], points[:, None, 1] - bs_pos[None, :, 1])
    exponents = np.array([channel.pathloss_exponent(bs) for bs in layout.bss])
    eirp = np.array([bs.tx_power_dbm + channel.beamforming_gain_db(bs.antenna_count) for bs in layout.bss])
    out = eirp[None, :] - channel.pathloss_db(d, exponents[None, :])
    if shadowing is not None:
        out = out - shadowing.losses_db(points)
    if fading_db is not None:
        out = out - fading_db
    return out

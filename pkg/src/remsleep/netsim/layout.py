import enum
import math
from dataclasses import dataclass, field
from typing import List

import numpy as np

from remsleep.errors import ConfigError
from remsleep.geometry import Position
from remsleep.power import BsPowerProfile


class BsKind(str, enum.Enum):
    MACRO = "macro"
    PICO = "pico"


@dataclass(frozen=True)
class Area:
    """The rectangle ``[0, width] x [0, height]``, in meters."""

    width: float = 500.0
    height: float = 500.0

    def validate(self, prefix: str = "layout.area"):
        for name in ("width", "height"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ConfigError(f"{prefix}.{name}", f"must be a positive, finite length, got {value}")

    def contains(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        return (
            (points[:, 0] >= 0) & (points[:, 0] <= self.width) & (points[:, 1] >= 0) & (points[:, 1] <= self.height)
        )

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.uniform((0.0, 0.0), (self.width, self.height), size=(n, 2))


@dataclass(frozen=True)
class BsConfig:
    position: Position
    kind: str = BsKind.PICO.value
    """macro or pico"""
    antenna_count: int = 32
    tx_power_dbm: float = 30.0
    carrier_hz: float = 3.55e9
    bandwidth_hz: float = 300e6

    @property
    def bs_kind(self) -> BsKind:
        return BsKind(self.kind)

    @property
    def is_macro(self) -> bool:
        return self.bs_kind == BsKind.MACRO

    def power_profile(self) -> BsPowerProfile:
        return BsPowerProfile.from_dbm(self.antenna_count, self.tx_power_dbm)

    def validate(self, prefix: str):
        if self.kind not in (BsKind.MACRO.value, BsKind.PICO.value):
            raise ConfigError(f"{prefix}.kind", f"must be 'macro' or 'pico', got {self.kind!r}")
        if self.antenna_count < 1:
            raise ConfigError(f"{prefix}.antenna_count", f"must be >= 1, got {self.antenna_count}")
        if not math.isfinite(self.tx_power_dbm):
            raise ConfigError(f"{prefix}.tx_power_dbm", f"must be finite, got {self.tx_power_dbm}")
        if not self.carrier_hz > 0:
            raise ConfigError(f"{prefix}.carrier_hz", f"must be positive, got {self.carrier_hz}")
        if not self.bandwidth_hz > 0:
            raise ConfigError(f"{prefix}.bandwidth_hz", f"must be positive, got {self.bandwidth_hz}")


def macro_bs(x: float, y: float) -> BsConfig:
    return BsConfig(Position(x, y), kind=BsKind.MACRO.value, antenna_count=128, tx_power_dbm=46.0)


def pico_bs(x: float, y: float) -> BsConfig:
    return BsConfig(Position(x, y), kind=BsKind.PICO.value, antenna_count=32, tx_power_dbm=30.0)


def ring_layout(
    area: Area = Area(), pbs_count: int = 5, radius: float = 150.0, start_angle: float = math.pi / 2
) -> List[BsConfig]:
    """A macro BS at the center of ``area`` with ``pbs_count`` pico BSs evenly spaced on a ring around it."""
    cx, cy = area.width / 2, area.height / 2
    bss = [macro_bs(cx, cy)]
    for b in range(pbs_count):
        theta = start_angle + 2 * math.pi * b / pbs_count
        bss.append(pico_bs(round(cx + radius * math.cos(theta), 6), round(cy + radius * math.sin(theta), 6)))
    return bss


@dataclass(frozen=True)
class NetworkLayout:
    """Index 0 is the macro BS; index ``b + 1`` is pico BS ``b``."""

    area: Area = field(default_factory=Area)
    bss: List[BsConfig] = field(default_factory=ring_layout)

    def validate(self, prefix: str = "layout"):
        self.area.validate(f"{prefix}.area")
        if len(self.bss) < 2:
            raise ConfigError(f"{prefix}.bss", f"need one macro BS and at least one pico BS, got {len(self.bss)} BSs")
        for i, bs in enumerate(self.bss):
            bs.validate(f"{prefix}.bss[{i}]")
        macros = [i for i, bs in enumerate(self.bss) if bs.is_macro]
        if macros != [0]:
            raise ConfigError(
                f"{prefix}.bss", f"exactly one macro BS is required and it must come first, got macros at {macros}"
            )
        inside = self.area.contains(self.bs_positions())
        if not np.all(inside):
            bad = int(np.flatnonzero(~inside)[0])
            raise ConfigError(f"{prefix}.bss[{bad}].position", "lies outside the area")

    @property
    def pbs_count(self) -> int:
        return len(self.bss) - 1

    def bs_positions(self) -> np.ndarray:
        return np.stack([bs.position.as_array() for bs in self.bss])

    def power_profiles(self) -> List[BsPowerProfile]:
        return [bs.power_profile() for bs in self.bss]

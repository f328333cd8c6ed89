import math
from dataclasses import dataclass

import numpy as np

from remsleep.errors import ConfigError
from remsleep.geometry import PositionSet


PRESETS = {
    "rtk": 0.01,
    "gps": 6.0,
}


@dataclass(frozen=True)
class LocalizationModel:
    """
    Gaussian position-reporting error.

    By default ``sigma`` is the total 2-D RMS error, so each axis gets ``sigma / sqrt(2)``. With ``per_axis`` set,
    ``sigma`` is the standard deviation of each coordinate.
    """

    sigma: float
    per_axis: bool = False
    name: str = "custom"

    def __post_init__(self):
        if not (self.sigma >= 0 and math.isfinite(self.sigma)):
            raise ConfigError(f"localization.{self.name}", f"sigma must be finite and non-negative, got {self.sigma}")

    @staticmethod
    def preset(name: str, per_axis: bool = False) -> "LocalizationModel":
        key = name.strip().lower()
        if key not in PRESETS:
            raise ValueError(f"Unknown localization preset {name!r}. Valid presets: {', '.join(sorted(PRESETS))}")
        return LocalizationModel(PRESETS[key], per_axis=per_axis, name=key)

    @property
    def axis_sigma(self) -> float:
        return self.sigma if self.per_axis else self.sigma / math.sqrt(2.0)


def report_positions(truth: PositionSet, model: LocalizationModel, rng: np.random.Generator) -> PositionSet:
    """``truth`` plus independent zero-mean Gaussian offsets. A zero-sigma model returns ``truth`` unchanged."""
    if model.sigma == 0:
        return truth
    noise = rng.normal(0.0, model.axis_sigma, size=truth.points.shape)
    return PositionSet(truth.points + noise)

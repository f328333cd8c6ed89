import math

import numpy as np
import pytest

from remsleep.errors import ConfigError
from remsleep.geometry import PositionSet
from remsleep.localization import PRESETS, LocalizationModel, report_positions


N = 100_000


def _origin(n=N):
    return PositionSet(np.zeros((n, 2)))


def test_zero_sigma_is_identity():
    truth = PositionSet(np.random.default_rng(0).uniform(0, 500, size=(40, 2)))
    assert report_positions(truth, LocalizationModel(0.0), np.random.default_rng(1)) == truth


def test_cardinality_is_preserved():
    truth = PositionSet(np.random.default_rng(0).uniform(0, 500, size=(37, 2)))
    assert len(report_positions(truth, LocalizationModel.preset("gps"), np.random.default_rng(1))) == 37


def test_offsets_are_zero_mean():
    model = LocalizationModel(6.0)
    offsets = report_positions(_origin(), model, np.random.default_rng(2)).points
    tolerance = 5 * model.axis_sigma / math.sqrt(N)
    assert abs(offsets[:, 0].mean()) < tolerance
    assert abs(offsets[:, 1].mean()) < tolerance


def test_sigma_is_total_rms_error_by_default():
    model = LocalizationModel(6.0)
    assert model.axis_sigma == pytest.approx(6.0 / math.sqrt(2))
    offsets = report_positions(_origin(), model, np.random.default_rng(3)).points
    rms = math.sqrt(np.mean(np.sum(offsets**2, axis=1)))
    assert rms == pytest.approx(6.0, rel=0.02)


def test_per_axis_sigma():
    model = LocalizationModel(6.0, per_axis=True)
    offsets = report_positions(_origin(), model, np.random.default_rng(4)).points
    assert offsets[:, 0].std() == pytest.approx(6.0, rel=0.02)
    assert offsets[:, 1].std() == pytest.approx(6.0, rel=0.02)


def test_draws_are_independent():
    offsets = report_positions(_origin(), LocalizationModel(1.0), np.random.default_rng(5)).points[:, 0]
    rho = np.corrcoef(offsets[:-1], offsets[1:])[0, 1]
    assert abs(rho) < 0.02

    rng = np.random.default_rng(6)
    truth = _origin(10)
    first = report_positions(truth, LocalizationModel(1.0), rng)
    second = report_positions(truth, LocalizationModel(1.0), rng)
    assert first != second


def test_presets():
    assert PRESETS == {"rtk": 0.01, "gps": 6.0}
    assert LocalizationModel.preset("RTK") == LocalizationModel(0.01, name="rtk")
    assert LocalizationModel.preset("gps").sigma == 6.0
    with pytest.raises(ValueError):
        LocalizationModel.preset("galileo")


def test_rejects_negative_sigma():
    with pytest.raises(ConfigError, match="localization.gps"):
        LocalizationModel(-1.0, name="gps")
    with pytest.raises(ConfigError):
        LocalizationModel(math.nan)

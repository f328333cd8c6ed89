"""
Module-level access to the current tracker, so simulation code can report metrics without passing a tracker around.

Only the main thread logs: worker threads of the experiment compute, and their results are logged once they are
collected in order.
"""
import contextlib
import dataclasses
import logging
import os
import tempfile
import warnings
from typing import Any, Iterator, Optional, overload

import draccus

from remsleep.tracker.helpers import hparams_to_dict
from remsleep.tracker.tracker import CompositeTracker, Metrics, Tracker


logger = logging.getLogger(__name__)

_current: Optional[Tracker] = None


def log(metrics: Metrics, *, step: Optional[int]):
    """
    Logs ``metrics`` (e.g. ``{"eval/som/rtk/ee": ...}``) for run ``step``. Dropped silently when no tracker is set,
    so library functions can be called without any setup.
    """
    if _current is not None:
        _current.log(metrics, step=step)


def log_artifact(artifact_path, *, name: Optional[str] = None, type: Optional[str] = None):
    if _current is not None:
        _current.log_artifact(artifact_path, name=name, type=type)


def log_summary(metrics: Metrics):
    if _current is None:
        warnings.warn(f"No tracker set; dropping summary {sorted(metrics)}")
        return
    _current.log_summary(metrics)


def log_hyperparameters(hparams: dict[str, Any]):
    if _current is None:
        warnings.warn("No tracker set; dropping hyperparameters")
        return
    _current.log_hyperparameters(hparams)


def log_configuration(config: Any, config_name: str = "config.yaml"):
    """
    Records ``config`` as hyperparameters. A dataclass config is also dumped as YAML and logged as an artifact, so a
    run can be repeated with ``--config`` on that file.
    """
    if _current is None:
        warnings.warn("No tracker set; dropping configuration")
        return

    _current.log_hyperparameters(hparams_to_dict(config))
    if dataclasses.is_dataclass(config):
        with tempfile.TemporaryDirectory() as tmpdir:
            path = os.path.join(tmpdir, config_name)
            with open(path, "w", encoding="utf-8") as f:
                draccus.dump(config, f)
            _current.log_artifact(path, name=config_name, type="config")


@overload
def current_tracker() -> Tracker:
    ...


@overload
def current_tracker(tracker: Tracker) -> contextlib.AbstractContextManager:
    ...


def current_tracker(tracker: Optional[Tracker] = None):
    """
    Without an argument, returns the current tracker (RuntimeError if there is none). With one, returns a context
    manager that makes ``tracker`` current for the duration of the block and restores the previous one afterwards.
    """
    if tracker is not None:
        return _installed(tracker)
    if _current is None:
        raise RuntimeError("No tracker set")
    return _current


@contextlib.contextmanager
def _installed(tracker: Tracker) -> Iterator[Tracker]:
    global _current
    previous, _current = _current, tracker
    try:
        yield tracker
    finally:
        _current = previous


def get_tracker(name: str) -> Tracker:
    """
    Looks up a tracker by name in the current (possibly composite) tracker.

    Examples:
        >>> from remsleep.tracker import CompositeTracker, NoopTracker, current_tracker, get_tracker
        >>> with current_tracker(CompositeTracker([NoopTracker()])):
        ...     get_tracker("noop").name
        'noop'
    """
    tracker = current_tracker()
    candidates = tracker.loggers if isinstance(tracker, CompositeTracker) else [tracker]
    for t in candidates:
        if t.name == name:
            return t
    raise KeyError(f"No tracker named {name!r}; have {[t.name for t in candidates]}")

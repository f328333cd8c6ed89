import abc
import dataclasses
import logging
import typing
from typing import Any, List, Optional, Tuple

import draccus


Metrics = typing.Mapping[str, Any]


class Tracker(abc.ABC):
    """
    Receives the metrics, summaries and files of one run: per-run EE during learning and evaluation, the per-arm
    summary at the end, and the written REM/CSV outputs.

    Used through [remsleep.tracker.current_tracker][] or as a context manager, which installs it as the current
    tracker.

    Examples:
        >>> from remsleep.tracker import NoopTracker, log
        >>> with NoopTracker():
        ...     log({"eval/ee": 1.0}, step=0)
    """

    name: str

    @abc.abstractmethod
    def log(self, metrics: Metrics, *, step: Optional[int]):
        """``step`` is the learning or evaluation run index."""

    @abc.abstractmethod
    def log_summary(self, metrics: Metrics):
        pass

    def log_hyperparameters(self, hparams: dict[str, Any]):
        pass

    def log_artifact(self, artifact_path, *, name: Optional[str] = None, type: Optional[str] = None):
        pass

    def finish(self):
        """Flushes whatever the backend buffers. Called once when the run ends."""

    def __enter__(self):
        from remsleep.tracker.tracker_fns import current_tracker

        if getattr(self, "_installed", None) is not None:
            raise RuntimeError(f"Tracker {self.name} is already the current tracker")
        self._installed = current_tracker(self)
        self._installed.__enter__()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        installed = getattr(self, "_installed", None)
        if installed is None:
            raise RuntimeError(f"Tracker {self.name} is not the current tracker")
        self._installed = None
        return installed.__exit__(exc_type, exc_val, exc_tb)


class CompositeTracker(Tracker):
    """Fans every call out to several trackers, e.g. ``log`` and ``wandb`` at once."""

    name: str = "composite"

    def __init__(self, loggers: List[Tracker]):
        self.loggers = list(loggers)

    def log(self, metrics: Metrics, *, step: Optional[int]):
        for t in self.loggers:
            t.log(metrics, step=step)

    def log_summary(self, metrics: Metrics):
        for t in self.loggers:
            t.log_summary(metrics)

    def log_hyperparameters(self, hparams: dict[str, Any]):
        for t in self.loggers:
            t.log_hyperparameters(hparams)

    def log_artifact(self, artifact_path, *, name: Optional[str] = None, type: Optional[str] = None):
        for t in self.loggers:
            t.log_artifact(artifact_path, name=name, type=type)

    def finish(self):
        # every tracker gets finished even if an earlier one fails
        errors = []
        for t in self.loggers:
            try:
                t.finish()
            except Exception as e:
                errors.append((t.name, e))
        if errors:
            names = ", ".join(name for name, _ in errors)
            raise RuntimeError(f"Failed to finish trackers: {names}") from errors[0][1]


class TrackerConfig(draccus.PluginRegistry, abc.ABC):
    discover_packages_path = "remsleep.tracker"

    @abc.abstractmethod
    def init(self, run_id: Optional[str]) -> Tracker:
        raise NotImplementedError

    @classmethod
    def default_choice_name(cls) -> Optional[str]:
        return "noop"


class NoopTracker(Tracker):
    name: str = "noop"

    def log(self, metrics: Metrics, *, step: Optional[int]):
        pass

    def log_summary(self, metrics: Metrics):
        pass


@TrackerConfig.register_subclass("noop")
@dataclasses.dataclass
class NoopConfig(TrackerConfig):
    def init(self, run_id: Optional[str]) -> Tracker:
        return NoopTracker()


class LoggingTracker(Tracker):
    """Writes metrics and summaries as log lines. Handy for desk runs without a wandb account."""

    name: str = "log"

    def __init__(self, logger_name: str = "remsleep.metrics", level: int = logging.INFO, every: int = 1):
        self.logger = logging.getLogger(logger_name)
        self.level = level
        self.every = max(1, every)

    def log(self, metrics: Metrics, *, step: Optional[int]):
        if step is not None and step % self.every != 0:
            return
        self.logger.log(self.level, f"step {step}: {_format(metrics)}")

    def log_summary(self, metrics: Metrics):
        self.logger.log(self.level, f"summary: {_format(metrics)}")

    def log_hyperparameters(self, hparams: dict[str, Any]):
        self.logger.log(self.level, f"hparams: {_format(hparams)}")

    def log_artifact(self, artifact_path, *, name: Optional[str] = None, type: Optional[str] = None):
        self.logger.log(self.level, f"artifact {name or artifact_path} ({type or 'file'}): {artifact_path}")


def _format(values: Metrics) -> str:
    return ", ".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}" for k, v in values.items())


@TrackerConfig.register_subclass("log")
@dataclasses.dataclass
class LoggingTrackerConfig(TrackerConfig):
    every: int = 1
    """only log every n-th step"""

    def init(self, run_id: Optional[str]) -> Tracker:
        return LoggingTracker(every=self.every)


class MemoryTracker(Tracker):
    """Keeps everything it is given. Used in tests and notebooks."""

    name: str = "memory"

    def __init__(self):
        self.hparams: dict[str, Any] = {}
        self.metrics: List[Tuple[Optional[int], dict]] = []
        self.summary: dict[str, Any] = {}
        self.artifacts: List[Tuple[Any, Optional[str], Optional[str]]] = []
        self.finished = False

    def log(self, metrics: Metrics, *, step: Optional[int]):
        self.metrics.append((step, dict(metrics)))

    def log_summary(self, metrics: Metrics):
        self.summary.update(metrics)

    def log_hyperparameters(self, hparams: dict[str, Any]):
        self.hparams.update(hparams)

    def log_artifact(self, artifact_path, *, name: Optional[str] = None, type: Optional[str] = None):
        self.artifacts.append((artifact_path, name, type))

    def finish(self):
        self.finished = True

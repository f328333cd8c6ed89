from remsleep.tracker.helpers import capture_time
from remsleep.tracker.tracker import (
    CompositeTracker,
    LoggingTracker,
    MemoryTracker,
    NoopConfig,
    NoopTracker,
    Tracker,
    TrackerConfig,
)
from remsleep.tracker.tracker_fns import (
    current_tracker,
    get_tracker,
    log,
    log_artifact,
    log_configuration,
    log_hyperparameters,
    log_summary,
)


__all__ = [
    "Tracker",
    "TrackerConfig",
    "CompositeTracker",
    "LoggingTracker",
    "MemoryTracker",
    "NoopTracker",
    "NoopConfig",
    "capture_time",
    "current_tracker",
    "get_tracker",
    "log",
    "log_artifact",
    "log_configuration",
    "log_hyperparameters",
    "log_summary",
]

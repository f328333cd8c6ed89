import contextlib
import logging
from dataclasses import dataclass
from typing import Iterator, Optional

import remsleep.tracker
from remsleep.errors import ConfigError
from remsleep.experiment import ExperimentConfig
from remsleep.tracker import NoopTracker, Tracker
from remsleep.utils.logging import init_logging, parse_level


logger = logging.getLogger(__name__)


@dataclass
class RunConfig(ExperimentConfig):
    """An experiment config plus the options every experiment-running subcommand shares."""

    out: str = "results"
    """output directory (any fsspec url)"""
    force: bool = False
    """overwrite existing output files"""
    run_id: Optional[str] = None
    """name of the run in logs and trackers. Defaults to the subcommand name and the seed."""
    log_dir: Optional[str] = None
    """directory for a log file. If unset, logs only go to the console."""
    log_level: str = "INFO"


@contextlib.contextmanager
def run_session(config: RunConfig, command: str) -> Iterator[Tracker]:
    """Sets up logging and the configured tracker for the duration of one subcommand."""
    run_id = config.run_id or f"{command}-seed{config.seed}"
    try:
        level = parse_level(config.log_level)
    except ValueError as e:
        raise ConfigError("log_level", str(e)) from None
    init_logging(config.log_dir, run_id, level)
    tracker = config.tracker.init(run_id)
    with remsleep.tracker.current_tracker(tracker):
        if not isinstance(tracker, NoopTracker):
            remsleep.tracker.log_configuration(config)
        try:
            yield tracker
        finally:
            tracker.finish()

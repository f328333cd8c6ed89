import logging as pylogging
from pathlib import Path
from typing import List, Optional, Union


pylogger = pylogging.getLogger(__name__)


def init_logging(log_dir: Optional[Union[str, Path]], run_id: str, level: int = pylogging.INFO) -> None:
    """
    Initialize logging.Logger with the appropriate name, console, and file handlers.

    :param log_dir: Directory for writing the log file (``{run_id}.log``). If None, only logs to the console.
    :param run_id: name of the run, used for the log file name
    :param level: Default logging level
    """
    log_format = "%(asctime)s - %(name)s - %(filename)s:%(lineno)d - %(levelname)s :: %(message)s"
    # use ISO 8601 format for timestamps, except no TZ, because who cares
    date_format = "%Y-%m-%dT%H:%M:%S"

    handlers: List[pylogging.Handler] = [pylogging.StreamHandler()]
    if log_dir is not None:
        log_dir = Path(log_dir)
        log_dir.mkdir(parents=True, exist_ok=True)
        handlers.insert(0, pylogging.FileHandler(log_dir / f"{run_id}.log", mode="a"))

    # Create Root Logger w/ Base Formatting
    pylogging.basicConfig(level=level, format=log_format, datefmt=date_format, handlers=handlers, force=True)


def parse_level(level: Union[str, int]) -> int:
    """Accepts ``"debug"``, ``"INFO"``, ``20`` and so on."""
    if isinstance(level, int):
        return level
    value = pylogging.getLevelName(level.strip().upper())
    if not isinstance(value, int):
        raise ValueError(f"Unknown log level {level!r}")
    return value

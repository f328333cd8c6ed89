import contextlib
import dataclasses
import logging
import os
import subprocess
import time
import traceback
import typing
from importlib.metadata import distributions
from typing import Any, Callable, Dict, Iterator, Optional


logger = logging.getLogger(__name__)

# frames from installed libraries never point at the experiment's checkout
_LIBRARY_DIR_MARKERS = ("site-packages", "dist-packages", "venv", "opt/homebrew", "conda", "pyenv")


def hparams_to_dict(config: Any, **extra: Any) -> Dict[str, Any]:
    """A config dataclass or mapping as a flat-at-the-top dict for ``log_hyperparameters``."""
    if config is None:
        values: Dict[str, Any] = {}
    elif dataclasses.is_dataclass(config) and not isinstance(config, type):
        values = dataclasses.asdict(config)
    elif isinstance(config, typing.Mapping):
        values = dict(config)
    else:
        raise TypeError(f"Can't turn a {type(config).__name__} into hyperparameters")
    values.update(extra)
    return values


def generate_pip_freeze() -> str:
    """The installed distributions in ``pip freeze`` format, sorted by name."""
    pins = {f"{d.metadata['Name']}=={d.version}" for d in distributions() if d.metadata["Name"]}
    return "\n".join(sorted(pins, key=str.lower))


@contextlib.contextmanager
def capture_time() -> Iterator[Callable[[], float]]:
    """
    Yields a function returning the elapsed seconds: live while the block runs, frozen once it exits.

    Examples:
        >>> with capture_time() as elapsed:
        ...     pass
        >>> elapsed() >= 0
        True
    """
    start = time.perf_counter()
    stopped_at = []

    def elapsed() -> float:
        end = stopped_at[0] if stopped_at else time.perf_counter()
        return end - start

    try:
        yield elapsed
    finally:
        stopped_at.append(time.perf_counter())


def infer_experiment_git_root() -> Optional[str]:
    """
    The working directory of the git checkout that holds the outermost non-library frame on the stack, which is
    usually the script or entry point that started the experiment. None if no frame lives in a checkout.
    """
    from git import InvalidGitRepositoryError, NoSuchPathError, Repo

    for frame in traceback.extract_stack():
        dirname = os.path.dirname(frame.filename)
        if not dirname or any(marker in dirname for marker in _LIBRARY_DIR_MARKERS):
            continue
        try:
            return str(Repo(dirname, search_parent_directories=True).working_dir)
        except (NoSuchPathError, InvalidGitRepositoryError):
            logger.debug(f"{dirname} is not in a git checkout")
    return None


def git_commit_sha(code_dir: Optional[str] = None) -> Optional[str]:
    """
    The commit checked out at ``code_dir`` (by default the experiment's git root). ``GIT_COMMIT`` in the environment
    takes precedence. Returns None outside a git checkout.
    """
    if "GIT_COMMIT" in os.environ:
        return os.environ["GIT_COMMIT"]

    from git import InvalidGitRepositoryError, NoSuchPathError, Repo

    if code_dir is None:
        code_dir = infer_experiment_git_root()
        if code_dir is None:
            return None
    try:
        return Repo(code_dir, search_parent_directories=True).head.commit.hexsha
    except (NoSuchPathError, InvalidGitRepositoryError):
        logger.warning(f"Could not find a git repo at {code_dir}")
        return None
    except ValueError:
        # GitPython fails to resolve HEAD in some checkouts ("SHA is empty"); git itself may not
        try:
            out = subprocess.run(["git", "-C", str(code_dir), "rev-parse", "HEAD"], check=True, capture_output=True)
        except (subprocess.CalledProcessError, FileNotFoundError):
            return None
        return out.stdout.decode().strip()

import logging
from dataclasses import dataclass

import remsleep.config
import remsleep.tracker
from remsleep.experiment import REM_FILE, run_learning_phase
from remsleep.main import RunConfig, run_session
from remsleep.rem import save_rem
from remsleep.utils.fsspec_utils import prepare_output_dir


logger = logging.getLogger(__name__)


@dataclass
class LearnConfig(RunConfig):
    pass


def run(config: LearnConfig) -> int:
    """Builds a REM and writes it to ``{out}/rem.json``."""
    config.validate()
    (rem_path,) = prepare_output_dir(config.out, [REM_FILE], force=config.force)

    with run_session(config, "learn"):
        rem = run_learning_phase(config)
        save_rem(rem, rem_path)
        remsleep.tracker.log_artifact(rem_path, name=REM_FILE, type="rem")

    print(rem.describe())
    return 0


@remsleep.config.main()
def main(config: LearnConfig):
    return run(config)


if __name__ == "__main__":
    main()

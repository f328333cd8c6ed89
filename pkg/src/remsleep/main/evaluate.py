import logging
from dataclasses import dataclass
from typing import Optional

import remsleep.config
from remsleep.errors import ConfigError
from remsleep.experiment import (
    CDF_FILE,
    RESULTS_FILE,
    SUMMARY_FILE,
    log_summary,
    run_evaluation_phase,
    summarize,
    write_results,
)
from remsleep.main import RunConfig, run_session
from remsleep.rem import load_rem
from remsleep.utils.fsspec_utils import prepare_output_dir


logger = logging.getLogger(__name__)


@dataclass
class EvaluateConfig(RunConfig):
    rem: Optional[str] = None
    """path or url of a REM written by ``learn``. Required."""


def run(config: EvaluateConfig) -> int:
    """Evaluates a previously learned REM and writes results.csv, summary.csv and cdf.csv to ``out``."""
    if config.rem is None:
        raise ConfigError("rem", "REM required: pass --rem with a REM file written by `learn`")
    config.validate()
    prepare_output_dir(config.out, [RESULTS_FILE, SUMMARY_FILE, CDF_FILE], force=config.force)
    rem = load_rem(config.rem)

    with run_session(config, "evaluate"):
        results = run_evaluation_phase(config, rem)
        summary = summarize(results)
        log_summary(summary)
        write_results(results, summary, config.out, force=True)

    print(summary.to_frame().to_string(index=False))
    return 0


@remsleep.config.main()
def main(config: EvaluateConfig):
    return run(config)


if __name__ == "__main__":
    main()

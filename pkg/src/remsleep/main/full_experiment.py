import logging
from dataclasses import dataclass

import remsleep.config
from remsleep.experiment import run_full_experiment
from remsleep.main import RunConfig, run_session


logger = logging.getLogger(__name__)


@dataclass
class FullExperimentConfig(RunConfig):
    pass


def run(config: FullExperimentConfig) -> int:
    """Learns a REM, evaluates every arm, and writes results.csv, summary.csv, cdf.csv and rem.json to ``out``."""
    config.validate()
    with run_session(config, "fullexperiment"):
        outcome = run_full_experiment(config, config.out, force=config.force)

    print(outcome.summary.to_frame().to_string(index=False))
    return 0


@remsleep.config.main()
def main(config: FullExperimentConfig):
    return run(config)


if __name__ == "__main__":
    main()

import logging
from dataclasses import dataclass

import remsleep.config
from remsleep.experiment import build_environment
from remsleep.main import RunConfig, run_session
from remsleep.netsim import Scenario, save_scenario
from remsleep.utils.fsspec_utils import prepare_output_dir


logger = logging.getLogger(__name__)

SCENARIO_FILE = "scenario.json"


@dataclass
class GenScenarioConfig(RunConfig):
    include_trajectory: bool = True
    """also dump the motion pattern (one position per UE per snapshot)"""


def run(config: GenScenarioConfig) -> int:
    """Writes the experiment's generated UEs (and their motion pattern) to ``{out}/scenario.json``."""
    config.validate()
    (path,) = prepare_output_dir(config.out, [SCENARIO_FILE], force=config.force)

    with run_session(config, "gen-scenario"):
        env = build_environment(config)
        scenario = Scenario(
            seed=config.seed,
            area=config.layout.area,
            ues=env.ues,
            trajectory=env.trajectory if config.include_trajectory else None,
        )
        save_scenario(scenario, path)

    print(path)
    return 0


@remsleep.config.main()
def main(config: GenScenarioConfig):
    return run(config)


if __name__ == "__main__":
    main()

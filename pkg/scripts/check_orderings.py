"""
Runs the full experiment for a few seeds and checks the qualitative orderings we expect from REM-based switching:

* every metric beats the all-on baseline under RTK,
* sum-of-minimums matches at least as well as average distance under RTK,
* sum-of-minimums does at least as well with RTK as with GPS,
* sum-of-minimums realizes a good share of the oracle's improvement.

    python scripts/check_orderings.py --config default --seeds "[0, 1, 2]"

Exits non-zero if any check fails. The measured oracle fraction is always logged.
"""
import logging
import sys
from dataclasses import dataclass, field
from typing import List

import remsleep.config
from remsleep.experiment import check_orderings, run_full_experiment
from remsleep.main import RunConfig, run_session
from remsleep.tracker import capture_time


logger = logging.getLogger("check_orderings")


@dataclass
class CheckOrderingsConfig(RunConfig):
    seeds: List[int] = field(default_factory=lambda: [0, 1, 2])
    min_oracle_fraction: float = 0.7
    rtk: str = "rtk"
    gps: str = "gps"


@remsleep.config.main()
def main(config: CheckOrderingsConfig):
    if "som" not in config.metrics:
        raise ValueError("the orderings are all about som; add it to metrics")

    failed = False
    with run_session(config, "check_orderings"):
        for seed in config.seeds:
            config.seed = seed
            with capture_time() as elapsed:
                outcome = run_full_experiment(config)
            failures = check_orderings(
                outcome.summary, rtk=config.rtk, gps=config.gps, min_oracle_fraction=config.min_oracle_fraction
            )
            for f in failures:
                logger.error(f"seed {seed}: {f}")
            logger.info(f"seed {seed}: {'FAIL' if failures else 'ok'} in {elapsed():.1f}s")
            failed = failed or bool(failures)

    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())

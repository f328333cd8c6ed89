import logging
from dataclasses import dataclass
from typing import Optional

import pandas as pd

import remsleep.config
from remsleep.errors import ConfigError
from remsleep.rem import Action, load_rem


logger = logging.getLogger(__name__)


@dataclass
class InspectRemConfig:
    rem: Optional[str] = None
    """path or url of a REM file. Required."""
    entry: Optional[int] = None
    """if set, print the full action table of this entry instead of the overview"""


def run(config: InspectRemConfig) -> int:
    if config.rem is None:
        raise ConfigError("rem", "REM required: pass --rem with a REM file")
    rem = load_rem(config.rem)

    if config.entry is None:
        print(rem.describe())
        return 0

    if not 0 <= config.entry < len(rem):
        raise ConfigError("entry", f"must be in [0, {len(rem)}), got {config.entry}")
    entry = rem.entries[config.entry]
    rows = []
    for action in Action.space(rem.pbs_count):
        stats = entry.stats(action)
        rows.append(
            {
                "action": action.bitmask,
                "active": action.active_count,
                "q": stats.q_value,
                "n": stats.visit_count,
                "served": stats.served_ues,
            }
        )
    print(pd.DataFrame(rows).to_string(index=False))
    return 0


@remsleep.config.main()
def main(config: InspectRemConfig):
    return run(config)


if __name__ == "__main__":
    main()

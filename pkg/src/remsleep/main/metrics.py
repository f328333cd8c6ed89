import json
import logging
from dataclasses import dataclass
from typing import Optional

import fsspec

import remsleep.config
from remsleep.errors import ConfigError, InputFormatError
from remsleep.geometry import MetricKind, PositionSet, set_distance


logger = logging.getLogger(__name__)


@dataclass
class MetricsConfig:
    kind: str = "som"
    """hausdorff, mean, average, som, or all"""
    a: Optional[str] = None
    """JSON file with the first point set: [[x, y], ...] or {"positions": [[x, y], ...]}"""
    b: Optional[str] = None
    """JSON file with the second point set"""


def load_position_set(path: str) -> PositionSet:
    with fsspec.open(path, "r", encoding="utf-8") as f:
        text = f.read()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputFormatError(f"{path} is not valid JSON: {e}") from e
    if isinstance(raw, dict):
        raw = raw.get("positions")
    try:
        return PositionSet.from_list(raw)
    except (TypeError, ValueError) as e:
        raise InputFormatError(f"{path} does not hold a list of [x, y] positions: {e}") from e


def run(config: MetricsConfig) -> int:
    """Prints the distance between two point sets."""
    for name in ("a", "b"):
        if getattr(config, name) is None:
            raise ConfigError(name, "a point-set file is required")
    if config.kind.strip().lower() == "all":
        kinds = list(MetricKind)
    else:
        try:
            kinds = [MetricKind.parse(config.kind)]
        except ValueError as e:
            raise ConfigError("kind", str(e)) from None

    a = load_position_set(config.a)  # type: ignore[arg-type]
    b = load_position_set(config.b)  # type: ignore[arg-type]
    if len(kinds) == 1:
        print(repr(set_distance(kinds[0], a, b)))
    else:
        for kind in kinds:
            print(f"{kind.value}\t{set_distance(kind, a, b)!r}")
    return 0


@remsleep.config.main()
def main(config: MetricsConfig):
    return run(config)


if __name__ == "__main__":
    main()

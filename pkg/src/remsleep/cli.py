"""
``remsleep <command> [--config FILE] [--flag value ...]``

Each command is a draccus entry point in [remsleep.main][]; this module only dispatches and turns failures into exit
codes:

    0  success
    1  runtime failure (including refusing to overwrite outputs without --force)
    2  usage error: unknown command or flag, malformed flag value
    3  a config or input file can't be read or understood
    4  the configuration is invalid
"""
import logging
import sys
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence

import yaml

from remsleep.config import parse_config
from remsleep.errors import ConfigArgsError, ConfigError, InfeasibleCoverageError, InputFormatError


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2
EXIT_UNREADABLE = 3
EXIT_INVALID_CONFIG = 4


@dataclass(frozen=True)
class Command:
    name: str
    module: str
    config_class: str
    help: str

    def load(self):
        import importlib

        mod = importlib.import_module(self.module)
        return getattr(mod, self.config_class), mod.run


COMMANDS: Dict[str, Command] = {
    c.name: c
    for c in [
        Command("gen-scenario", "remsleep.main.gen_scenario", "GenScenarioConfig", "dump the generated UEs as JSON"),
        Command("learn", "remsleep.main.learn", "LearnConfig", "build a REM and write rem.json"),
        Command("evaluate", "remsleep.main.evaluate", "EvaluateConfig", "evaluate a REM (--rem) against all arms"),
        Command("metrics", "remsleep.main.metrics", "MetricsConfig", "distance between two point-set files"),
        Command("inspect-rem", "remsleep.main.inspect_rem", "InspectRemConfig", "print a REM summary"),
        Command("fullexperiment", "remsleep.main.full_experiment", "FullExperimentConfig", "learn + evaluate"),
    ]
}

ALIASES = {
    "full-experiment": "fullexperiment",
    "gen_scenario": "gen-scenario",
    "inspect_rem": "inspect-rem",
}


def usage() -> str:
    lines = ["usage: remsleep <command> [--config FILE] [--flag value ...]", "", "commands:"]
    for c in COMMANDS.values():
        lines.append(f"  {c.name:<16}{c.help}")
    lines.append("")
    lines.append("Run `remsleep <command> --help` for the flags of a command.")
    return "\n".join(lines)


def _error(command: Optional[str], message: str):
    prefix = f"remsleep {command}" if command else "remsleep"
    print(f"{prefix}: error: {message}", file=sys.stderr)


def _exit_code(e: SystemExit) -> int:
    if e.code is None:
        return EXIT_OK
    if isinstance(e.code, int):
        return e.code
    print(e.code, file=sys.stderr)
    return EXIT_RUNTIME


def main(argv: Optional[Sequence[str]] = None) -> int:
    args: List[str] = list(sys.argv[1:] if argv is None else argv)
    if not args or args[0] in ("-h", "--help"):
        print(usage())
        return EXIT_OK if args else EXIT_USAGE

    name = ALIASES.get(args[0], args[0])
    if name not in COMMANDS:
        _error(None, f"unknown command {args[0]!r}")
        print(usage(), file=sys.stderr)
        return EXIT_USAGE
    config_class, run = COMMANDS[name].load()

    try:
        config = parse_config(config_class, args[1:])
    except SystemExit as e:
        # argparse: --help exits 0, bad flags exit 2
        return _exit_code(e)
    except (FileNotFoundError, IsADirectoryError, PermissionError, UnicodeDecodeError, yaml.YAMLError) as e:
        _error(name, f"can't read config: {e}")
        return EXIT_UNREADABLE
    except ConfigError as e:
        _error(name, str(e))
        return EXIT_INVALID_CONFIG
    except ConfigArgsError as e:
        _error(name, str(e))
        return EXIT_USAGE
    except Exception as e:  # draccus decoding errors: wrong types, unknown keys, unknown choices
        _error(name, f"invalid config: {e}")
        return EXIT_INVALID_CONFIG

    return _run(name, run, config)


def _run(name: str, run: Callable[[object], int], config) -> int:
    try:
        return run(config)
    except ConfigError as e:
        _error(name, str(e))
        return EXIT_INVALID_CONFIG
    except (FileNotFoundError, IsADirectoryError, PermissionError, InputFormatError) as e:
        _error(name, str(e))
        return EXIT_UNREADABLE
    except FileExistsError as e:
        _error(name, str(e))
        return EXIT_RUNTIME
    except InfeasibleCoverageError as e:
        _error(name, str(e))
        return EXIT_RUNTIME
    except SystemExit as e:
        return _exit_code(e)
    except Exception as e:
        logger.exception(f"{name} failed")
        _error(name, f"{type(e).__name__}: {e}")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())

"""
Config loading on top of draccus: config files may be fsspec urls or names in the config directory, several files can
be layered, and boolean flags may be given bare.
"""
import functools
import inspect
import os
import sys
import tempfile
import urllib.parse
from typing import Any, Dict, List, Optional, Sequence, Tuple, Type, TypeVar

import draccus
import fsspec
import yaml

from remsleep.errors import ConfigArgsError


C = TypeVar("C")

DEFAULT_CONFIG_DIR = os.path.join(os.path.dirname(__file__), "configs")

CONFIG_FLAGS = ("--config", "--config_path", "--configs")

# boolean flags that may be given bare on the command line (``--force`` instead of ``--force true``)
BARE_FLAGS = ("--force",)

CONFIG_SUFFIXES = ("", ".yaml", ".yml", ".json")


def main(fn=None, *, args: Optional[List[str]] = None, config_dir: Optional[str] = DEFAULT_CONFIG_DIR):
    """
    Decorator for entry points taking a config dataclass as their first argument, like ``draccus.wrap`` but going
    through [remsleep.config.parse_config][].

    :param args: the args to parse. If None, uses sys.argv[1:]
    :param config_dir: where bare config names are looked up
    """
    if fn is None:
        return functools.partial(main, args=args, config_dir=config_dir)

    @functools.wraps(fn)
    def wrapper(*fn_args, **fn_kwargs):
        spec = inspect.getfullargspec(fn)
        config_class = spec.annotations[spec.args[0]]
        cmdline = sys.argv[1:] if args is None else args
        config = parse_config(config_class, cmdline, config_dir=config_dir)
        return fn(config, *fn_args, **fn_kwargs)

    return wrapper


def parse_config(config_class: Type[C], args: Sequence[str], *, config_dir: Optional[str] = DEFAULT_CONFIG_DIR) -> C:
    """
    Parses ``args`` into ``config_class``.

    ``--config a.yaml`` (or ``--config_path``) reads one file; ``--configs base.yaml seed3.yaml`` reads several and
    merges them, later files winning key by key inside nested blocks. Command-line flags override every file.

    Raises FileNotFoundError if a named config file can't be found, and yaml.YAMLError if one can't be parsed.
    """
    sources, rest = split_config_args(list(args))
    rest = _expand_bare_flags(rest)
    if not sources:
        return draccus.parse(config_class=config_class, config_path=None, args=rest)

    merged: Dict[str, Any] = {}
    for source in sources:
        merged = merge_config_dicts(merged, load_config_dict(source, config_dir))

    with tempfile.TemporaryDirectory(prefix="remsleep-config") as tmpdir:
        path = os.path.join(tmpdir, "config.yaml")
        with open(path, "w", encoding="utf-8") as f:
            yaml.safe_dump(merged, f, sort_keys=False)
        return draccus.parse(config_class=config_class, config_path=path, args=rest)


def split_config_args(args: List[str]) -> Tuple[List[str], List[str]]:
    """Separates the config file arguments from the remaining flags."""
    present = [flag for flag in CONFIG_FLAGS if flag in args]
    if not present:
        return [], args
    if len(present) > 1 or args.count(present[0]) > 1:
        raise ConfigArgsError(f"Multiple config args found in {args}")

    start = args.index(present[0]) + 1
    end = start
    while end < len(args) and not args[end].startswith("-"):
        end += 1
    sources = args[start:end]
    if not sources:
        raise ConfigArgsError(f"{present[0]} needs at least one path")
    if present[0] != "--configs" and len(sources) > 1:
        raise ConfigArgsError(f"{present[0]} takes one path; use --configs to layer several")
    return sources, args[: start - 1] + args[end:]


def load_config_dict(source: str, config_dir: Optional[str] = DEFAULT_CONFIG_DIR) -> Dict[str, Any]:
    """Reads one YAML or JSON config document from a local path, a config name, or an fsspec url."""
    path = source if urllib.parse.urlparse(source).scheme else _resolve_local(source, config_dir)
    with fsspec.open(path, "r", encoding="utf-8") as f:
        document = yaml.safe_load(f)
    if document is None:
        return {}
    if not isinstance(document, dict):
        raise yaml.YAMLError(f"{source}: a config file must hold a mapping, got {type(document).__name__}")
    return document


def merge_config_dicts(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    """
    Examples:
        >>> merge_config_dicts({"channel": {"a": 1, "b": 2}, "seed": 0}, {"channel": {"b": 3}})
        {'channel': {'a': 1, 'b': 3}, 'seed': 0}
    """
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            # a new choice type replaces the whole block instead of mixing fields of two choices
            if "type" in value and value["type"] != merged[key].get("type"):
                merged[key] = value
            else:
                merged[key] = merge_config_dicts(merged[key], value)
        else:
            merged[key] = value
    return merged


def _resolve_local(name: str, config_dir: Optional[str]) -> str:
    candidates = [f"{name}{suffix}" for suffix in CONFIG_SUFFIXES]
    if config_dir is not None and not os.path.isabs(name):
        candidates += [os.path.join(config_dir, c) for c in candidates]
    for candidate in candidates:
        if os.path.isfile(candidate):
            return candidate
    raise FileNotFoundError(f"Could not find config file {name}")


def _expand_bare_flags(args: List[str]) -> List[str]:
    out: List[str] = []
    for i, arg in enumerate(args):
        out.append(arg)
        if arg in BARE_FLAGS and (i + 1 == len(args) or args[i + 1].startswith("-")):
            out.append("true")
    return out

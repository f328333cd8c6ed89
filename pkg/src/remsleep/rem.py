"""
The Radio Environment Map: per-position-set tables of learned action values for every pico on/off configuration.

Each entry is tagged with the UE positions it was learned at and holds a dense table indexed by the integer value of
the action's bit vector (bit ``b`` set = pico BS ``b`` active). The macro BS is always on and has no bit.
"""
import dataclasses
import json
import logging
import math
import numbers
from dataclasses import dataclass, field
from typing import Iterable, Iterator, List, Optional, Sequence, Union

import fsspec
import numpy as np
from dataclasses_json import config, dataclass_json

from remsleep.errors import RemFormatError
from remsleep.geometry import MetricKind, PositionSet, set_distance


logger = logging.getLogger(__name__)

REM_FORMAT_VERSION = 1

# q-value of a never-visited action
Q_INIT = 0.0
_UNKNOWN_SERVED = -1


@dataclass(frozen=True, order=True)
class Action:
    """A set of active pico BSs, stored as a bit vector."""

    bits: int
    pbs_count: int

    def __post_init__(self):
        if self.pbs_count < 1:
            raise ValueError(f"pbs_count must be >= 1, got {self.pbs_count}")
        if not (0 <= self.bits < (1 << self.pbs_count)):
            raise ValueError(f"Action bits {self.bits} out of range for {self.pbs_count} pico BSs")

    @staticmethod
    def all_on(pbs_count: int) -> "Action":
        return Action((1 << pbs_count) - 1, pbs_count)

    @staticmethod
    def all_off(pbs_count: int) -> "Action":
        return Action(0, pbs_count)

    @staticmethod
    def from_active(active: Iterable[Union[bool, int]], pbs_count: Optional[int] = None) -> "Action":
        """From a per-PBS sequence of flags (``[True, False, True]``) when ``pbs_count`` is None, otherwise from a
        collection of active PBS indices."""
        active = list(active)
        if pbs_count is None:
            bits = sum(1 << b for b, on in enumerate(active) if on)
            return Action(bits, len(active))
        bits = 0
        for b in active:
            if not 0 <= int(b) < pbs_count:
                raise ValueError(f"PBS index {b} out of range for {pbs_count} pico BSs")
            bits |= 1 << int(b)
        return Action(bits, pbs_count)

    @staticmethod
    def from_bitmask(mask: str) -> "Action":
        """Inverse of [Action.bitmask][]: character ``b`` is PBS ``b``."""
        if not mask or any(c not in "01" for c in mask):
            raise ValueError(f"Invalid action bitmask {mask!r}")
        return Action.from_active([c == "1" for c in mask])

    @staticmethod
    def space(pbs_count: int) -> Iterator["Action"]:
        for bits in range(1 << pbs_count):
            yield Action(bits, pbs_count)

    @property
    def index(self) -> int:
        return self.bits

    @property
    def pbs_active(self) -> tuple:
        return tuple(self.is_active(b) for b in range(self.pbs_count))

    def is_active(self, pbs: int) -> bool:
        return bool((self.bits >> pbs) & 1)

    @property
    def active_count(self) -> int:
        return bin(self.bits).count("1")

    @property
    def bitmask(self) -> str:
        """PBS 0 first, e.g. ``"10100"`` = PBS 0 and PBS 2 active."""
        return "".join("1" if on else "0" for on in self.pbs_active)

    def __str__(self):
        return self.bitmask


@dataclass(frozen=True)
class ActionStats:
    q_value: float
    visit_count: int
    served_ues: Optional[int]  # None until the action has been visited


@dataclass
class RemEntry:
    tag: PositionSet
    q: np.ndarray  # float64, one slot per action
    n: np.ndarray  # int64 visit counts
    served: np.ndarray  # int64 served-UE counts, -1 = unknown

    def __post_init__(self):
        size = self.q.shape[0]
        if size < 2 or size & (size - 1):
            raise ValueError(f"Action table length must be a power of two >= 2, got {size}")
        if self.n.shape != (size,) or self.served.shape != (size,):
            raise ValueError("q, n and served tables must have the same length")

    @staticmethod
    def empty(tag: PositionSet, pbs_count: int) -> "RemEntry":
        size = 1 << pbs_count
        return RemEntry(
            tag=tag,
            q=np.full(size, Q_INIT, dtype=np.float64),
            n=np.zeros(size, dtype=np.int64),
            served=np.full(size, _UNKNOWN_SERVED, dtype=np.int64),
        )

    @property
    def n_actions(self) -> int:
        return self.q.shape[0]

    @property
    def pbs_count(self) -> int:
        return self.n_actions.bit_length() - 1

    @property
    def total_visits(self) -> int:
        return int(self.n.sum())

    def stats(self, action: Action) -> ActionStats:
        self._check(action)
        served = int(self.served[action.index])
        return ActionStats(
            q_value=float(self.q[action.index]),
            visit_count=int(self.n[action.index]),
            served_ues=None if served == _UNKNOWN_SERVED else served,
        )

    def is_fully_visited(self) -> bool:
        return bool(np.all(self.n > 0))

    def _check(self, action: Action):
        if action.pbs_count != self.pbs_count:
            raise ValueError(f"Action for {action.pbs_count} pico BSs used with a {self.pbs_count}-PBS REM entry")

    def __eq__(self, other):
        if not isinstance(other, RemEntry):
            return NotImplemented
        return (
            self.tag == other.tag
            and np.array_equal(self.q, other.q)
            and np.array_equal(self.n, other.n)
            and np.array_equal(self.served, other.served)
        )


@dataclass
class Rem:
    pbs_count: int
    entries: List[RemEntry] = field(default_factory=list)

    def __post_init__(self):
        if self.pbs_count < 1:
            raise ValueError(f"pbs_count must be >= 1, got {self.pbs_count}")
        for i, entry in enumerate(self.entries):
            if entry.pbs_count != self.pbs_count:
                raise ValueError(f"Entry {i} has a {entry.pbs_count}-PBS table but the REM has {self.pbs_count}")

    @property
    def n_actions(self) -> int:
        return 1 << self.pbs_count

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, item: int) -> RemEntry:
        return self.entries[item]

    def is_fully_populated(self) -> bool:
        return len(self.entries) > 0 and all(e.is_fully_visited() for e in self.entries)

    def describe(self) -> str:
        lines = [f"REM: {len(self.entries)} entries, {self.pbs_count} pico BSs, {self.n_actions} actions per entry"]
        for i, entry in enumerate(self.entries):
            centroid = entry.tag.centroid()
            if np.any(entry.n > 0):
                best = greedy_action(entry, [a for a in Action.space(self.pbs_count) if entry.n[a.index] > 0])
                best_str = f"best={best.bitmask} q={entry.q[best.index]:.6g}"
            else:
                best_str = "best=<unvisited>"
            lines.append(
                f"  [{i:3d}] ues={len(entry.tag):3d} centroid=({centroid[0]:8.2f}, {centroid[1]:8.2f}) "
                f"visits={entry.total_visits:5d} unvisited={int(np.sum(entry.n == 0)):3d} {best_str}"
            )
        return "\n".join(lines)


def add_entry(rem: Rem, tag: PositionSet) -> int:
    rem.entries.append(RemEntry.empty(tag, rem.pbs_count))
    return len(rem.entries) - 1


def match_distances(rem: Rem, query: PositionSet, kind: Union[MetricKind, str]) -> np.ndarray:
    """Distance from ``query`` to every entry's tag under metric ``kind``."""
    if not rem.entries:
        raise ValueError("Can't match against an empty REM")
    kind = MetricKind.parse(kind)
    return np.array([set_distance(kind, entry.tag, query) for entry in rem.entries], dtype=np.float64)


def match_entry(rem: Rem, query: PositionSet, kind: Union[MetricKind, str]) -> int:
    """Index of the entry whose tag is closest to ``query``. Ties go to the lowest index."""
    # np.argmin returns the first minimum
    return int(np.argmin(match_distances(rem, query, kind)))


def action_space_reduction(entry: RemEntry) -> List[Action]:
    """
    The actions known to serve as many UEs as the all-on configuration. Unvisited actions are excluded because
    their coverage is unknown. The all-on action is always a member.
    """
    all_on = Action.all_on(entry.pbs_count)
    reference = int(entry.served[all_on.index])
    if reference == _UNKNOWN_SERVED:
        raise ValueError("Action space reduction needs the all-on action to have been visited")
    keep = np.flatnonzero(entry.served == reference)
    return [Action(int(bits), entry.pbs_count) for bits in keep]


def greedy_action(entry: RemEntry, reduced: Sequence[Action]) -> Action:
    """
    The action in ``reduced`` with the highest q-value. Ties go to fewer active PBSs, then to the lowest bit vector.
    """
    if not reduced:
        raise ValueError("Can't pick a greedy action from an empty action set")
    for action in reduced:
        entry._check(action)
    return min(reduced, key=lambda a: (-entry.q[a.index], a.active_count, a.bits))


def update_entry(entry: RemEntry, action: Action, reward: float, served: int) -> RemEntry:
    """
    Folds ``reward`` into the action's incremental sample mean and records how many UEs it served.
    Mutates and returns ``entry``.
    """
    entry._check(action)
    if served < 0:
        raise ValueError(f"served must be non-negative, got {served}")
    i = action.index
    entry.n[i] += 1
    entry.q[i] += (reward - entry.q[i]) / entry.n[i]
    entry.served[i] = served
    return entry


# persistence


def _decode_count(value) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral) or value < 0:
        raise ValueError(f"counts must be non-negative integers, got {value!r}")
    return value


def _decode_served(value) -> Optional[int]:
    return None if value is None else _decode_count(value)


@dataclass_json
@dataclass
class StatsDocument:
    q: float
    n: int = field(metadata=config(decoder=_decode_count))
    served: Optional[int] = field(metadata=config(decoder=_decode_served))
    """null for actions that were never visited"""


@dataclass_json
@dataclass
class EntryDocument:
    tag: List[List[float]]
    stats: List[StatsDocument]


@dataclass_json
@dataclass
class RemDocument:
    version: int
    pbs_count: int
    entries: List[EntryDocument] = dataclasses.field(default_factory=list)


def rem_to_document(rem: Rem) -> RemDocument:
    entries = []
    for entry in rem.entries:
        stats = [
            StatsDocument(
                q=float(q),
                n=int(n),
                served=None if int(s) == _UNKNOWN_SERVED else int(s),
            )
            for q, n, s in zip(entry.q, entry.n, entry.served)
        ]
        entries.append(EntryDocument(tag=entry.tag.to_list(), stats=stats))
    return RemDocument(version=REM_FORMAT_VERSION, pbs_count=rem.pbs_count, entries=entries)


def rem_from_document(doc: RemDocument) -> Rem:
    if doc.version != REM_FORMAT_VERSION:
        raise RemFormatError(f"REM format version {doc.version} is not supported (expected {REM_FORMAT_VERSION})")
    if doc.pbs_count < 1:
        raise RemFormatError(f"pbs_count must be >= 1, got {doc.pbs_count}")

    size = 1 << doc.pbs_count
    entries = []
    for i, entry_doc in enumerate(doc.entries):
        if len(entry_doc.stats) != size:
            raise RemFormatError(
                f"Entry {i} has {len(entry_doc.stats)} action slots, expected {size} for {doc.pbs_count} pico BSs"
            )
        try:
            tag = PositionSet.from_list(entry_doc.tag)
        except ValueError as e:
            raise RemFormatError(f"Entry {i} has an invalid tag: {e}") from e

        for s in entry_doc.stats:
            try:
                _decode_count(s.n)
                _decode_served(s.served)
            except ValueError as e:
                raise RemFormatError(f"Entry {i}: {e}") from e
        q = np.array([s.q for s in entry_doc.stats], dtype=np.float64)
        n = np.array([s.n for s in entry_doc.stats], dtype=np.int64)
        served = np.array(
            [_UNKNOWN_SERVED if s.served is None else s.served for s in entry_doc.stats], dtype=np.int64
        )
        if not np.all(np.isfinite(q)):
            raise RemFormatError(f"Entry {i} has non-finite q-values")
        if np.any((served != _UNKNOWN_SERVED) & (n == 0)):
            raise RemFormatError(f"Entry {i} records served-UE counts for actions that were never visited")
        entries.append(RemEntry(tag=tag, q=q, n=n, served=served))

    return Rem(pbs_count=doc.pbs_count, entries=entries)


def save_rem(rem: Rem, destination: str) -> str:
    """Writes ``rem`` as JSON to ``destination`` (any fsspec url)."""
    doc = rem_to_document(rem)
    fs = fsspec.core.url_to_fs(destination)[0]
    parent = _parent(destination)
    if parent:
        fs.makedirs(parent, exist_ok=True)
    with fsspec.open(destination, "w", encoding="utf-8") as f:
        f.write(doc.to_json())  # type: ignore[attr-defined]
    logger.info(f"Saved REM with {len(rem)} entries to {destination}")
    return destination


def load_rem(source: str) -> Rem:
    """
    Loads a REM written by [save_rem][]. Raises FileNotFoundError if it doesn't exist and RemFormatError if it
    isn't a complete, compatible REM document. Never returns a partial REM.
    """
    with fsspec.open(source, "r", encoding="utf-8") as f:
        raw_text = f.read()

    try:
        raw = json.loads(raw_text)
    except json.JSONDecodeError as e:
        raise RemFormatError(f"{source} is not valid JSON: {e}") from e

    if not isinstance(raw, dict) or "version" not in raw:
        raise RemFormatError(f"{source} is not a REM document (no version field)")
    if raw["version"] != REM_FORMAT_VERSION:
        raise RemFormatError(f"REM format version {raw['version']} is not supported (expected {REM_FORMAT_VERSION})")

    try:
        doc = RemDocument.from_dict(raw)  # type: ignore[attr-defined]
    except (KeyError, TypeError, ValueError, AttributeError) as e:
        raise RemFormatError(f"{source} is not a well-formed REM document: {e}") from e

    rem = rem_from_document(doc)
    logger.info(f"Loaded REM with {len(rem)} entries from {source}")
    return rem


def _parent(url: str) -> str:
    protocol, path = fsspec.core.split_protocol(url)
    parent = path.rsplit("/", 1)[0] if "/" in path else ""
    if not parent:
        return ""
    return f"{protocol}://{parent}" if protocol else parent


def q_values_close(a: Rem, b: Rem, rel: float = 1e-12) -> bool:
    """Structural equality of two REMs with a relative tolerance on q-values and exact counts."""
    if a.pbs_count != b.pbs_count or len(a) != len(b):
        return False
    for ea, eb in zip(a.entries, b.entries):
        if ea.tag != eb.tag or not np.array_equal(ea.n, eb.n) or not np.array_equal(ea.served, eb.served):
            return False
        if not all(math.isclose(x, y, rel_tol=rel, abs_tol=0.0) for x, y in zip(ea.q, eb.q)):
            return False
    return True

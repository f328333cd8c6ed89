"""
Random-direction mobility with reflective boundaries, scenario generation, and scenario dumps.
"""
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import fsspec
import numpy as np
from dataclasses_json import dataclass_json

from remsleep.geometry import Position
from remsleep.netsim.layout import Area, NetworkLayout
from remsleep.utils.rng import stream


logger = logging.getLogger(__name__)

DEFAULT_UE_SPEED = 1.5  # m/s
DEFAULT_HEADING_CHANGE_TIME = 10.0  # s, mean time between heading redraws


@dataclass(frozen=True)
class UeState:
    position: Position
    heading: float  # radians, 0 = +x
    speed: float  # m/s

    def __post_init__(self):
        if not self.speed >= 0:
            raise ValueError(f"speed must be non-negative, got {self.speed}")


def ue_positions(ues: Sequence[UeState]) -> np.ndarray:
    return np.array([[u.position.x, u.position.y] for u in ues], dtype=np.float64).reshape(-1, 2)


def _to_states(points: np.ndarray, headings: np.ndarray, speeds: np.ndarray) -> List[UeState]:
    return [
        UeState(Position(float(x), float(y)), float(h), float(s))
        for (x, y), h, s in zip(points, headings, speeds)
    ]


def step_mobility(
    ues: Sequence[UeState],
    dt: float,
    area: Area,
    rng: np.random.Generator,
    heading_change_time: float = DEFAULT_HEADING_CHANGE_TIME,
) -> List[UeState]:
    """
    Advances every UE by ``speed * dt`` along its heading, reflecting off the area's edges. After moving, each UE
    redraws its heading uniformly with probability ``1 - exp(-dt / heading_change_time)``, so heading changes happen
    at exponentially distributed epochs.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if not ues:
        return []

    pos = ue_positions(ues)
    heading = np.array([u.heading for u in ues], dtype=np.float64)
    speed = np.array([u.speed for u in ues], dtype=np.float64)

    x = pos[:, 0] + speed * dt * np.cos(heading)
    y = pos[:, 1] + speed * dt * np.sin(heading)

    x, flip_x = _fold(x, area.width)
    y, flip_y = _fold(y, area.height)

    vx = np.where(flip_x, -np.cos(heading), np.cos(heading))
    vy = np.where(flip_y, -np.sin(heading), np.sin(heading))
    heading = np.where(flip_x | flip_y, np.arctan2(vy, vx), heading)

    # rng consumption depends only on len(ues)
    redraw = rng.random(len(ues)) < -math.expm1(-dt / heading_change_time)
    fresh = rng.uniform(0.0, 2.0 * math.pi, size=len(ues))
    heading = np.mod(np.where(redraw, fresh, heading), 2.0 * math.pi)

    return _to_states(np.stack([x, y], axis=1), heading, speed)


def _fold(coord: np.ndarray, upper: float):
    """Folds coordinates back into [0, upper]; the mask marks coordinates that hit a wall an odd number of times."""
    period = 2.0 * upper
    folded = np.mod(coord, period)
    flipped = folded > upper
    folded = np.where(flipped, period - folded, folded)
    return np.clip(folded, 0.0, upper), flipped


def generate_scenario(
    seed: int,
    n_ues: int,
    layout: Optional[NetworkLayout] = None,
    area: Optional[Area] = None,
    speed: float = DEFAULT_UE_SPEED,
) -> List[UeState]:
    """
    ``n_ues`` UEs placed uniformly in ``area`` (the layout's area by default) with uniform headings and a common
    speed. Deterministic per seed.
    """
    if n_ues < 1:
        raise ValueError(f"n_ues must be >= 1, got {n_ues}")
    if area is None:
        area = layout.area if layout is not None else Area()
    rng = stream(seed, "scenario")
    points = area.sample(rng, n_ues)
    headings = rng.uniform(0.0, 2.0 * math.pi, size=n_ues)
    return _to_states(points, headings, np.full(n_ues, speed))


def simulate_trajectory(
    ues: Sequence[UeState],
    steps: int,
    dt: float,
    area: Area,
    rng: np.random.Generator,
    heading_change_time: float = DEFAULT_HEADING_CHANGE_TIME,
) -> np.ndarray:
    """
    Returns a ``(steps, n_ues, 2)`` array of positions. Snapshot 0 is the initial positions; snapshot ``k`` is taken
    after ``k`` mobility steps of ``dt`` seconds.
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    out = np.empty((steps, len(ues), 2), dtype=np.float64)
    state = list(ues)
    out[0] = ue_positions(state)
    for k in range(1, steps):
        state = step_mobility(state, dt, area, rng, heading_change_time)
        out[k] = ue_positions(state)
    return out


@dataclass_json
@dataclass
class UeDocument:
    x: float
    y: float
    heading: float
    speed: float


@dataclass_json
@dataclass
class ScenarioDocument:
    seed: int
    width: float
    height: float
    ues: List[UeDocument]
    trajectory: Optional[List[List[List[float]]]] = None
    """snapshot-major positions: trajectory[k][i] = [x, y] of UE i at snapshot k"""


@dataclass
class Scenario:
    seed: int
    area: Area
    ues: List[UeState]
    trajectory: Optional[np.ndarray] = None


def save_scenario(scenario: Scenario, destination: str) -> str:
    doc = ScenarioDocument(
        seed=scenario.seed,
        width=scenario.area.width,
        height=scenario.area.height,
        ues=[UeDocument(u.position.x, u.position.y, u.heading, u.speed) for u in scenario.ues],
        trajectory=None if scenario.trajectory is None else scenario.trajectory.tolist(),
    )
    with fsspec.open(destination, "w", encoding="utf-8") as f:
        f.write(doc.to_json())  # type: ignore[attr-defined]
    logger.info(f"Saved scenario with {len(scenario.ues)} UEs to {destination}")
    return destination


def load_scenario(source: str) -> Scenario:
    with fsspec.open(source, "r", encoding="utf-8") as f:
        doc = ScenarioDocument.from_json(f.read())  # type: ignore[attr-defined]
    ues = [UeState(Position(u.x, u.y), u.heading, u.speed) for u in doc.ues]
    trajectory = None if doc.trajectory is None else np.asarray(doc.trajectory, dtype=np.float64)
    return Scenario(seed=doc.seed, area=Area(doc.width, doc.height), ues=ues, trajectory=trajectory)

import logging
import os
import tempfile
import typing
import warnings
from dataclasses import dataclass, field
from typing import Any, List, Optional

import numpy as np

from remsleep.tracker.helpers import generate_pip_freeze, git_commit_sha
from remsleep.tracker.tracker import Metrics, Tracker, TrackerConfig


if typing.TYPE_CHECKING:
    import wandb.sdk.wandb_run


logger = logging.getLogger(__name__)


class WandbTracker(Tracker):
    """
    Sends metrics to a W&B run. Learning and evaluation both count runs from 0, so the run index is logged as a
    ``run`` metric instead of as W&B's monotonic step.
    """

    name: str = "wandb"

    def __init__(self, run: "wandb.sdk.wandb_run.Run"):
        self.run = run

    def log(self, metrics: Metrics, *, step: Optional[int]):
        values = _loggable(dict(metrics))
        if step is not None:
            values.setdefault("run", int(step))
        self.run.log(values)

    def log_summary(self, metrics: Metrics):
        self.run.summary.update(_loggable(dict(metrics)))

    def log_hyperparameters(self, hparams: dict[str, Any]):
        self.run.config.update(_loggable(hparams), allow_val_change=True)

    def log_artifact(self, artifact_path, *, name: Optional[str] = None, type: Optional[str] = None):
        self.run.log_artifact(str(artifact_path), name=name, type=type)

    def finish(self):
        logger.info(f"Finishing wandb run {self.run.id}")
        self.run.finish()


def _loggable(value: Any) -> Any:
    """numpy scalars and arrays to plain python, recursively."""
    if isinstance(value, typing.Mapping):
        return {k: _loggable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_loggable(v) for v in value]
    if isinstance(value, (np.generic, np.ndarray)):
        return value.tolist()
    return value


@TrackerConfig.register_subclass("wandb")
@dataclass
class WandbConfig(TrackerConfig):
    entity: Optional[str] = None
    """user or team that owns the project"""
    project: Optional[str] = "remsleep"
    name: Optional[str] = None
    """display name; defaults to W&B's generated one"""
    tags: List[str] = field(default_factory=list)
    id: Optional[str] = None
    """unique run id in the project; defaults to the experiment's run id"""
    group: Optional[str] = None  # e.g. one group per seed sweep
    mode: Optional[str] = None
    """online, offline or disabled. If None, W&B decides."""

    save_requirements: bool = True
    """log a pip freeze as an artifact"""

    def init(self, run_id: Optional[str]) -> WandbTracker:
        import wandb

        if run_id is not None and self.id is not None and run_id != self.id:
            warnings.warn(f"Both the run id {run_id} and wandb.id {self.id} are set; W&B will use {self.id}")

        sha = git_commit_sha()
        run = wandb.init(
            entity=self.entity,
            project=self.project,
            name=self.name,
            tags=self.tags,
            id=self.id or run_id,
            group=self.group,
            mode=self.mode,
            config={"git_commit": sha} if sha else {},
        )
        if run is None:
            raise RuntimeError("wandb.init did not return a run")

        tracker = WandbTracker(run)
        if self.save_requirements:
            with tempfile.TemporaryDirectory() as tmpdir:
                path = os.path.join(tmpdir, "requirements.txt")
                with open(path, "w") as f:
                    f.write(generate_pip_freeze())
                tracker.log_artifact(path, name="requirements.txt", type="requirements")
        return tracker

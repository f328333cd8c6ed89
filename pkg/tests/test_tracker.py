# NOTE: Do not explicitly import wandb/other trackers here, as this will cause the tests to trivially pass.
import dataclasses
import logging
import pathlib
import warnings
from typing import Tuple

import draccus
import pytest
import yaml

import remsleep.tracker
from remsleep.tracker import CompositeTracker, NoopTracker, TrackerConfig, capture_time
from remsleep.tracker.helpers import git_commit_sha, infer_experiment_git_root
from remsleep.tracker.tracker import LoggingTracker, MemoryTracker, NoopConfig


def test_tracker_plugin_stuff_works():
    assert TrackerConfig.get_choice_class("wandb") is not None
    assert TrackerConfig.get_choice_class("log") is not None
    with pytest.raises(KeyError):
        TrackerConfig.get_choice_class("foo")


def test_tracker_plugin_default_is_noop():
    @dataclasses.dataclass
    class ConfigHolder:
        tracker: TrackerConfig = dataclasses.field(default_factory=NoopConfig)

    assert isinstance(draccus.decode(ConfigHolder, {}).tracker, NoopConfig)

    config = """
    tracker:
        type: wandb
        entity: foo
    """
    tconfig = draccus.decode(ConfigHolder, yaml.safe_load(config)).tracker
    assert isinstance(tconfig, TrackerConfig.get_choice_class("wandb"))
    assert tconfig.entity == "foo"  # type: ignore


def test_tracker_plugin_multi_parsing_work():
    config = """
    tracker:
        type: noop
    """
    parsed = yaml.safe_load(config)

    @dataclasses.dataclass
    class ConfigHolder:
        tracker: TrackerConfig | Tuple[TrackerConfig, ...]

    assert isinstance(draccus.decode(ConfigHolder, parsed).tracker, NoopConfig)

    config = """
    tracker:
        - type: noop
        - type: log
          every: 5
    """
    parsed = yaml.safe_load(config)
    decoded = draccus.decode(ConfigHolder, parsed).tracker
    assert decoded == (NoopConfig(), TrackerConfig.get_choice_class("log")(every=5))


def test_get_tracker_by_name():
    memory = MemoryTracker()
    tracker = CompositeTracker([memory, NoopTracker()])

    with tracker:
        assert remsleep.tracker.get_tracker("memory") is memory
        assert remsleep.tracker.get_tracker("noop") is not None

        with pytest.raises(KeyError):
            remsleep.tracker.get_tracker("foo")


def test_global_functions_forward_to_current_tracker():
    memory = MemoryTracker()
    with remsleep.tracker.current_tracker(memory):
        remsleep.tracker.log({"eval/ee": 1.5}, step=3)
        remsleep.tracker.log_summary({"gain": 1.2})
        remsleep.tracker.log_hyperparameters({"seed": 0})
        remsleep.tracker.log_artifact("results.csv", name="results.csv", type="results")
        assert remsleep.tracker.current_tracker() is memory

    assert memory.metrics == [(3, {"eval/ee": 1.5})]
    assert memory.summary == {"gain": 1.2}
    assert memory.hparams == {"seed": 0}
    assert memory.artifacts == [("results.csv", "results.csv", "results")]

    with pytest.raises(RuntimeError):
        remsleep.tracker.current_tracker()


def test_log_configuration_records_hparams_and_yaml():
    @dataclasses.dataclass
    class Config:
        seed: int = 4
        metrics: Tuple[str, ...] = ("som",)

    memory = MemoryTracker()
    with remsleep.tracker.current_tracker(memory):
        remsleep.tracker.log_configuration(Config())

    assert memory.hparams == {"seed": 4, "metrics": ("som",)}
    assert [(name, kind) for _, name, kind in memory.artifacts] == [("config.yaml", "config")]


def test_metrics_are_dropped_silently_without_tracker():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        remsleep.tracker.log({"x": 1.0}, step=0)
        remsleep.tracker.log_artifact("nothing.csv")

    with pytest.warns(UserWarning):
        remsleep.tracker.log_summary({"x": 1.0})


def test_composite_finish_reports_errors():
    class Broken(NoopTracker):
        def finish(self):
            raise ValueError("boom")

    memory = MemoryTracker()
    with pytest.raises(RuntimeError):
        CompositeTracker([Broken(), memory]).finish()
    assert memory.finished


def test_logging_tracker(caplog):
    tracker = LoggingTracker(every=2)
    with caplog.at_level(logging.INFO, logger="remsleep.metrics"):
        tracker.log({"eval/ee": 1.23456789}, step=0)
        tracker.log({"eval/ee": 2.0}, step=1)
        tracker.log_summary({"gain": 1.5})

    messages = [r.getMessage() for r in caplog.records if r.name == "remsleep.metrics"]
    assert messages == ["step 0: eval/ee=1.23457", "summary: gain=1.5"]


def test_capture_time():
    with capture_time() as elapsed:
        inside = elapsed()
    frozen = elapsed()
    assert 0 <= inside <= frozen
    assert elapsed() == frozen


def test_infer_experiment_git_root():
    git = pytest.importorskip("git")
    try:
        git.Repo(pathlib.Path(__file__), search_parent_directories=True)
    except (git.InvalidGitRepositoryError, git.NoSuchPathError):
        pytest.skip("test not running in a git repo")

    root = infer_experiment_git_root()

    assert root is not None
    assert git.Repo(root).working_dir == root
    assert pathlib.Path(__file__).resolve().is_relative_to(pathlib.Path(root).resolve())


def test_git_commit_sha(tmp_path, monkeypatch):
    git = pytest.importorskip("git")
    monkeypatch.delenv("GIT_COMMIT", raising=False)

    outside = tmp_path / "not_a_checkout"
    outside.mkdir()
    assert git_commit_sha(str(outside)) is None

    checkout = tmp_path / "checkout"
    repo = git.Repo.init(checkout)
    (checkout / "exp.yaml").write_text("seed: 0\n")
    repo.index.add(["exp.yaml"])
    author = git.Actor("remsleep", "remsleep@example.com")
    commit = repo.index.commit("initial config", author=author, committer=author)
    (checkout / "results").mkdir()
    assert git_commit_sha(str(checkout / "results")) == commit.hexsha

    monkeypatch.setenv("GIT_COMMIT", "deadbeef")
    assert git_commit_sha(str(outside)) == "deadbeef"

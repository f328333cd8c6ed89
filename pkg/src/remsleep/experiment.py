"""
The learn-then-evaluate protocol.

Learning fixes one subgroup of UEs moving along a fixed motion pattern, snapshots their (RTK-reported) positions at
``rem_entries_target`` epochs as REM tags, and repeats the pattern ``learning_runs`` times while a bandit policy
explores pico on/off actions per snapshot. Evaluation draws fresh subgroups at random epochs, matches their reported
positions against the REM with each distance metric, and compares the greedy choice with the all-on baseline and an
exhaustive oracle.
"""
import dataclasses
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, TypeVar

import fsspec
import numpy as np
import pandas as pd
from tqdm_loggable.auto import tqdm

import remsleep.tracker
from remsleep.bandit import ExhaustiveSweep, ExplorationPolicy, RewardObservation, reward, select_learning_action
from remsleep.errors import ConfigError, InfeasibleCoverageError
from remsleep.geometry import MetricKind, PositionSet
from remsleep.localization import LocalizationModel, report_positions
from remsleep.netsim import (
    ChannelParams,
    EvalOutcome,
    NetworkLayout,
    ShadowingField,
    UeState,
    evaluate_configuration,
    generate_scenario,
    simulate_trajectory,
)
from remsleep.netsim.mobility import DEFAULT_HEADING_CHANGE_TIME, DEFAULT_UE_SPEED
from remsleep.power import PowerParams
from remsleep.rem import (
    Action,
    Rem,
    RemEntry,
    action_space_reduction,
    add_entry,
    greedy_action,
    match_distances,
    save_rem,
    update_entry,
)
from remsleep.tracker import NoopConfig, TrackerConfig, capture_time
from remsleep.utils.fsspec_utils import prepare_output_dir
from remsleep.utils.rng import stream


logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

RESULTS_FILE = "results.csv"
SUMMARY_FILE = "summary.csv"
CDF_FILE = "cdf.csv"
REM_FILE = "rem.json"
OUTPUT_FILES = (RESULTS_FILE, SUMMARY_FILE, CDF_FILE, REM_FILE)

BASELINE_ARM = "baseline"
ORACLE_ARM = "oracle"


def _default_metrics() -> List[str]:
    return [m.value for m in MetricKind]


def _default_localization() -> Dict[str, float]:
    return {"rtk": 0.01, "gps": 6.0}


@dataclass
class ExperimentConfig:
    seed: int = 0
    """every random draw of the experiment derives from this seed"""

    n_total_ues: int = 50
    n_subgroup: int = 40
    learning_runs: int = 30
    rem_entries_target: int = 15
    """number of snapshots of the motion pattern, and therefore of REM entries"""
    decisions_per_snapshot: int = 3
    """bandit decisions per snapshot per learning run"""
    eval_runs: int = 45
    eval_snapshots: int = 1
    """fast-fading snapshots averaged in every evaluation"""

    snapshot_interval: float = 1.0  # s between snapshots of the motion pattern
    ue_speed: float = DEFAULT_UE_SPEED
    heading_change_time: float = DEFAULT_HEADING_CHANGE_TIME

    metrics: List[str] = field(default_factory=_default_metrics)
    """distance metrics to compare: hausdorff, mean, average, som"""
    localization: Dict[str, float] = field(default_factory=_default_localization)
    """evaluation localization arms: name -> error standard deviation in meters"""
    learning_sigma: float = 0.01
    """localization error of the positions stored as REM tags"""
    sigma_per_axis: bool = False
    """if True, sigma is the per-axis standard deviation instead of the total 2-D RMS error"""

    layout: NetworkLayout = field(default_factory=NetworkLayout)
    channel: ChannelParams = field(default_factory=ChannelParams)
    power: PowerParams = field(default_factory=PowerParams)
    exploration: ExplorationPolicy = field(default_factory=ExhaustiveSweep)
    tracker: TrackerConfig = field(default_factory=NoopConfig)

    workers: int = 1
    """threads used for independent REM entries and evaluation runs. Output does not depend on it."""

    def validate(self):
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed", f"must be an unsigned 64-bit integer, got {self.seed}")
        for name in (
            "n_total_ues",
            "n_subgroup",
            "learning_runs",
            "rem_entries_target",
            "decisions_per_snapshot",
            "eval_runs",
            "eval_snapshots",
            "workers",
        ):
            value = getattr(self, name)
            if value < 1:
                raise ConfigError(name, f"must be >= 1, got {value}")
        if self.n_subgroup > self.n_total_ues:
            raise ConfigError(
                "n_subgroup", f"must be <= n_total_ues (got {self.n_subgroup} > {self.n_total_ues})"
            )
        if not self.snapshot_interval > 0:
            raise ConfigError("snapshot_interval", f"must be positive, got {self.snapshot_interval}")
        if not self.ue_speed >= 0:
            raise ConfigError("ue_speed", f"must be non-negative, got {self.ue_speed}")
        if not self.heading_change_time > 0:
            raise ConfigError("heading_change_time", f"must be positive, got {self.heading_change_time}")

        if not self.metrics:
            raise ConfigError("metrics", "at least one distance metric is required")
        for i, name in enumerate(self.metrics):
            try:
                MetricKind.parse(name)
            except ValueError as e:
                raise ConfigError(f"metrics[{i}]", str(e)) from None
        if len({MetricKind.parse(m) for m in self.metrics}) != len(self.metrics):
            raise ConfigError("metrics", f"duplicate metrics in {self.metrics}")

        if not self.localization:
            raise ConfigError("localization", "at least one localization arm is required")
        for name, sigma in self.localization.items():
            if not (sigma >= 0 and math.isfinite(sigma)):
                raise ConfigError(f"localization.{name}", f"must be finite and non-negative, got {sigma}")
        if not (self.learning_sigma >= 0 and math.isfinite(self.learning_sigma)):
            raise ConfigError("learning_sigma", f"must be finite and non-negative, got {self.learning_sigma}")

        self.layout.validate("layout")
        self.channel.validate("channel")
        self.power.validate("power")
        self.exploration.validate("exploration")

    @property
    def metric_kinds(self) -> List[MetricKind]:
        return [MetricKind.parse(m) for m in self.metrics]

    @property
    def localization_models(self) -> List[LocalizationModel]:
        return [
            LocalizationModel(sigma, per_axis=self.sigma_per_axis, name=name)
            for name, sigma in self.localization.items()
        ]

    @property
    def pbs_count(self) -> int:
        return self.layout.pbs_count


@dataclass(frozen=True)
class Environment:
    """Everything both phases share: the generated UEs, their motion pattern, and the frozen large-scale channel."""

    ues: List[UeState]
    trajectory: np.ndarray  # (snapshots, n_total_ues, 2)
    shadowing: ShadowingField
    learning_subgroup: np.ndarray

    def positions(self, epoch: int, subgroup: np.ndarray) -> np.ndarray:
        return self.trajectory[epoch, subgroup]


def build_environment(config: ExperimentConfig) -> Environment:
    ues = generate_scenario(config.seed, config.n_total_ues, config.layout, speed=config.ue_speed)
    trajectory = simulate_trajectory(
        ues,
        config.rem_entries_target,
        config.snapshot_interval,
        config.layout.area,
        stream(config.seed, "trajectory"),
        config.heading_change_time,
    )
    shadowing = ShadowingField(config.seed, config.channel, len(config.layout.bss))
    subgroup = _draw_subgroup(stream(config.seed, "learn", "subgroup"), config)
    return Environment(ues=ues, trajectory=trajectory, shadowing=shadowing, learning_subgroup=subgroup)


def _draw_subgroup(rng: np.random.Generator, config: ExperimentConfig) -> np.ndarray:
    return np.sort(rng.choice(config.n_total_ues, size=config.n_subgroup, replace=False))


def _evaluate(
    config: ExperimentConfig, env: Environment, positions: np.ndarray, action: Action, rng: np.random.Generator
) -> EvalOutcome:
    return evaluate_configuration(
        positions,
        config.layout,
        action,
        config.channel,
        config.power,
        rng,
        shadowing=env.shadowing,
        snapshots=config.eval_snapshots,
    )


def _map(fn: Callable[[T], R], items: Sequence[T], workers: int, desc: str) -> List[R]:
    """``list(map(fn, items))`` with an optional thread pool. Results keep the order of ``items``."""
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in tqdm(items, desc=desc, total=len(items))]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(tqdm(executor.map(fn, items), desc=desc, total=len(items)))


# learning


@dataclass(frozen=True)
class EntryLearningLog:
    entry: int
    mean_reward_per_run: Tuple[float, ...]
    all_on_served: int
    topped_up: int


def _learn_entry(config: ExperimentConfig, env: Environment, entry: RemEntry, epoch: int) -> EntryLearningLog:
    positions = env.positions(epoch, env.learning_subgroup)
    all_on = Action.all_on(config.pbs_count)
    step = 0
    mean_rewards = []
    served_all_on = -1

    def radio(run: int) -> np.random.Generator:
        # every action of a (snapshot, run) pair sees the same radio draws
        return stream(config.seed, "learn", "radio", epoch, run)

    def observe(action: Action, run: int, baseline: EvalOutcome, cache: Dict[Action, EvalOutcome]) -> float:
        if action not in cache:
            cache[action] = _evaluate(config, env, positions, action, radio(run))
        outcome = cache[action]
        r = reward(RewardObservation(outcome.ee, outcome.served_ues, baseline.served_ues))
        update_entry(entry, action, r, outcome.served_ues)
        return r

    def baseline_for(run: int) -> Tuple[EvalOutcome, Dict[Action, EvalOutcome]]:
        baseline = _evaluate(config, env, positions, all_on, radio(run))
        if baseline.served_ues == 0:
            raise InfeasibleCoverageError(
                f"No UE is served even with every BS active (snapshot {epoch}, run {run}); "
                f"check the layout and channel.rss_threshold_dbm"
            )
        return baseline, {all_on: baseline}

    for run in range(config.learning_runs):
        baseline, cache = baseline_for(run)
        served_all_on = baseline.served_ues
        policy_rng = stream(config.seed, "learn", "policy", epoch, run)
        rewards = []
        for _ in range(config.decisions_per_snapshot):
            action = select_learning_action(entry, config.exploration, step, policy_rng)
            rewards.append(observe(action, run, baseline, cache))
            step += 1
        mean_rewards.append(float(np.mean(rewards)))

    # make sure every action has been tried at least once
    unvisited = [Action(int(bits), config.pbs_count) for bits in np.flatnonzero(entry.n == 0)]
    if unvisited:
        baseline, cache = baseline_for(config.learning_runs)
        for action in unvisited:
            observe(action, config.learning_runs, baseline, cache)

    return EntryLearningLog(
        entry=epoch,
        mean_reward_per_run=tuple(mean_rewards),
        all_on_served=served_all_on,
        topped_up=len(unvisited),
    )


def run_learning_phase(config: ExperimentConfig, env: Optional[Environment] = None) -> Rem:
    """
    Builds a REM with one entry per snapshot of the learning subgroup's motion pattern. Every action of every entry
    is visited at least once.

    Raises InfeasibleCoverageError if some snapshot has no coverage at all.
    """
    config.validate()
    if env is None:
        env = build_environment(config)

    rem = Rem(pbs_count=config.pbs_count)
    learning_model = LocalizationModel(config.learning_sigma, per_axis=config.sigma_per_axis, name="learning")
    for epoch in range(config.rem_entries_target):
        truth = PositionSet(env.positions(epoch, env.learning_subgroup))
        tag = report_positions(truth, learning_model, stream(config.seed, "learn", "tag", epoch))
        add_entry(rem, tag)

    logs = _map(
        lambda epoch: _learn_entry(config, env, rem.entries[epoch], epoch),
        list(range(config.rem_entries_target)),
        config.workers,
        desc="learning",
    )

    for run in range(config.learning_runs):
        remsleep.tracker.log(
            {"learn/mean_reward": float(np.mean([log.mean_reward_per_run[run] for log in logs]))}, step=run
        )
    topped_up = sum(log.topped_up for log in logs)
    if topped_up:
        logger.info(f"Visited {topped_up} actions that exploration had not reached in a final coverage pass")
    logger.info(
        f"Learned a REM with {len(rem)} entries; all-on serves {min(log.all_on_served for log in logs)}-"
        f"{max(log.all_on_served for log in logs)} of {config.n_subgroup} UEs"
    )
    return rem


# evaluation


@dataclass(frozen=True)
class RunResult:
    run: int
    epoch: int
    metric: str
    localization: str
    action: Action
    outcome: EvalOutcome
    matched_entry: int
    match_distance: float
    baseline: EvalOutcome
    oracle_action: Action
    oracle: EvalOutcome

    @property
    def arm(self) -> str:
        return arm_name(self.metric, self.localization)

    @property
    def qos_violation(self) -> bool:
        return self.outcome.served_ues < self.baseline.served_ues

    @property
    def qos_ee(self) -> float:
        """The EE as rewards score it: 0 when the action served fewer UEs than all-on."""
        return 0.0 if self.qos_violation else self.outcome.ee

    def to_row(self) -> Dict[str, object]:
        return {
            "run": self.run,
            "arm": self.arm,
            "metric": self.metric,
            "localization": self.localization,
            "epoch": self.epoch,
            "action": self.action.bitmask,
            "ee": self.outcome.ee,
            "baseline_ee": self.baseline.ee,
            "oracle_ee": self.oracle.ee,
            "qos_ee": self.qos_ee,
            "served": self.outcome.served_ues,
            "baseline_served": self.baseline.served_ues,
            "matched_entry": self.matched_entry,
            "match_distance": self.match_distance,
            "oracle_action": self.oracle_action.bitmask,
            "median_bitrate": self.outcome.median_bitrate,
            "avg_power": self.outcome.avg_power,
            "qos_violation": self.qos_violation,
        }


def arm_name(metric: str, localization: str) -> str:
    return f"{metric}/{localization}"


def oracle_action(outcomes: Dict[Action, EvalOutcome], pbs_count: int) -> Action:
    """The feasible action (serving as many UEs as all-on) with the highest EE; ties as in greedy selection."""
    required = outcomes[Action.all_on(pbs_count)].served_ues
    feasible = [a for a, o in outcomes.items() if o.served_ues == required]
    return min(feasible, key=lambda a: (-outcomes[a].ee, a.active_count, a.bits))


def _check_rem(config: ExperimentConfig, rem: Rem):
    if rem.pbs_count != config.pbs_count:
        raise ConfigError(
            "layout.bss", f"the REM was learned for {rem.pbs_count} pico BSs but the layout has {config.pbs_count}"
        )
    if len(rem) == 0:
        raise ValueError("Can't evaluate against an empty REM")
    all_on = Action.all_on(rem.pbs_count)
    for i, entry in enumerate(rem.entries):
        if entry.n[all_on.index] == 0:
            raise ValueError(f"REM entry {i} has never observed the all-on action")
    if not rem.is_fully_populated():
        logger.warning("The REM has unvisited actions; they will never be selected")


def _evaluate_run(config: ExperimentConfig, env: Environment, rem: Rem, run: int) -> List[RunResult]:
    draw = stream(config.seed, "eval", "draw", run)
    subgroup = _draw_subgroup(draw, config)
    epoch = int(draw.integers(config.rem_entries_target))
    truth = PositionSet(env.positions(epoch, subgroup))

    # one evaluation per action, shared by every arm, the baseline and the oracle
    outcomes = {
        action: _evaluate(config, env, truth.points, action, stream(config.seed, "eval", "radio", run))
        for action in Action.space(config.pbs_count)
    }
    baseline = outcomes[Action.all_on(config.pbs_count)]
    best = oracle_action(outcomes, config.pbs_count)

    results = []
    for li, model in enumerate(config.localization_models):
        reported = report_positions(truth, model, stream(config.seed, "eval", "report", run, li))
        for kind in config.metric_kinds:
            distances = match_distances(rem, reported, kind)
            matched = int(np.argmin(distances))
            chosen = greedy_action(rem.entries[matched], action_space_reduction(rem.entries[matched]))
            results.append(
                RunResult(
                    run=run,
                    epoch=epoch,
                    metric=kind.value,
                    localization=model.name,
                    action=chosen,
                    outcome=outcomes[chosen],
                    matched_entry=matched,
                    match_distance=float(distances[matched]),
                    baseline=baseline,
                    oracle_action=best,
                    oracle=outcomes[best],
                )
            )
    return results


def run_evaluation_phase(
    config: ExperimentConfig, rem: Rem, env: Optional[Environment] = None
) -> List[RunResult]:
    """
    Runs ``eval_runs`` evaluation runs. Each draws a fresh subgroup at a random snapshot and evaluates every
    (metric, localization) arm on it, in config order. Results are ordered by run, then localization, then metric.
    """
    config.validate()
    _check_rem(config, rem)
    if env is None:
        env = build_environment(config)

    per_run = _map(
        lambda run: _evaluate_run(config, env, rem, run),
        list(range(config.eval_runs)),
        config.workers,
        desc="evaluating",
    )

    results: List[RunResult] = []
    for run, run_results in enumerate(per_run):
        metrics = {f"eval/{r.arm}/ee": r.outcome.ee for r in run_results}
        metrics["eval/baseline_ee"] = run_results[0].baseline.ee
        metrics["eval/oracle_ee"] = run_results[0].oracle.ee
        remsleep.tracker.log(metrics, step=run)
        results.extend(run_results)

    violations = sum(r.qos_violation for r in results)
    if violations:
        logger.info(f"{violations} of {len(results)} decisions served fewer UEs than the all-on baseline")
    return results


# summary


@dataclass(frozen=True)
class ArmSummary:
    arm: str
    metric: str
    localization: str
    runs: int
    mean_ee: float
    mean_baseline_ee: float
    mean_oracle_ee: float
    gain: float
    """mean EE of the arm over mean EE of the all-on baseline"""
    oracle_gain: float
    oracle_gain_fraction: float
    """(gain - 1) / (oracle_gain - 1): the share of the achievable improvement the arm realized"""
    mean_qos_ee: float
    """mean EE with QoS-violating runs scored 0; never above mean_oracle_ee"""
    qos_gain: float
    qos_oracle_gain_fraction: float
    qos_violations: int
    oracle_hits: int
    """runs in which the arm chose the oracle's action"""
    mean_active_pbs: float


@dataclass
class SummaryStats:
    arms: List[ArmSummary]
    cdf: Dict[str, np.ndarray]
    """sorted EE samples per arm, plus the baseline and the oracle"""

    def arm(self, name: str) -> ArmSummary:
        for a in self.arms:
            if a.arm == name:
                return a
        raise KeyError(f"No arm named {name}. Arms: {', '.join(a.arm for a in self.arms)}")

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([dataclasses.asdict(a) for a in self.arms])

    def cdf_frame(self) -> pd.DataFrame:
        rows = []
        for name, samples in self.cdf.items():
            n = len(samples)
            for rank, ee in enumerate(samples):
                rows.append({"arm": name, "rank": rank, "quantile": (rank + 1) / n, "ee": float(ee)})
        return pd.DataFrame(rows, columns=["arm", "rank", "quantile", "ee"])


def _ratio(num: float, den: float) -> float:
    return num / den if den > 0 else math.nan


def _oracle_fraction(gain: float, oracle_gain: float) -> float:
    return (gain - 1.0) / (oracle_gain - 1.0) if oracle_gain > 1.0 else math.nan


def summarize(results: Sequence[RunResult]) -> SummaryStats:
    if not results:
        raise ValueError("Can't summarize an empty list of results")

    by_arm: Dict[str, List[RunResult]] = {}
    for r in results:
        by_arm.setdefault(r.arm, []).append(r)

    arms = []
    cdf: Dict[str, np.ndarray] = {}
    for name, rs in by_arm.items():
        ee = np.array([r.outcome.ee for r in rs])
        mean_ee = float(np.mean(ee))
        mean_base = float(np.mean([r.baseline.ee for r in rs]))
        mean_oracle = float(np.mean([r.oracle.ee for r in rs]))
        mean_qos = float(np.mean([r.qos_ee for r in rs]))
        gain = _ratio(mean_ee, mean_base)
        qos_gain = _ratio(mean_qos, mean_base)
        oracle_gain = _ratio(mean_oracle, mean_base)
        arms.append(
            ArmSummary(
                arm=name,
                metric=rs[0].metric,
                localization=rs[0].localization,
                runs=len(rs),
                mean_ee=mean_ee,
                mean_baseline_ee=mean_base,
                mean_oracle_ee=mean_oracle,
                gain=gain,
                oracle_gain=oracle_gain,
                oracle_gain_fraction=_oracle_fraction(gain, oracle_gain),
                mean_qos_ee=mean_qos,
                qos_gain=qos_gain,
                qos_oracle_gain_fraction=_oracle_fraction(qos_gain, oracle_gain),
                qos_violations=sum(r.qos_violation for r in rs),
                oracle_hits=sum(r.action == r.oracle_action for r in rs),
                mean_active_pbs=float(np.mean([r.action.active_count for r in rs])),
            )
        )
        cdf[name] = np.sort(ee)

    per_run: Dict[int, RunResult] = {}
    for r in results:
        per_run.setdefault(r.run, r)
    cdf[BASELINE_ARM] = np.sort([r.baseline.ee for r in per_run.values()])
    cdf[ORACLE_ARM] = np.sort([r.oracle.ee for r in per_run.values()])

    return SummaryStats(arms=arms, cdf=cdf)


def results_frame(results: Iterable[RunResult]) -> pd.DataFrame:
    return pd.DataFrame([r.to_row() for r in results])


def _write_csv(df: pd.DataFrame, path: str):
    with fsspec.open(path, "w", encoding="utf-8", newline="") as f:
        df.to_csv(f, index=False, lineterminator="\n")


def write_results(
    results: Sequence[RunResult],
    summary: SummaryStats,
    out_dir: str,
    *,
    rem: Optional[Rem] = None,
    force: bool = False,
) -> Dict[str, str]:
    """
    Writes results.csv, summary.csv and cdf.csv (and rem.json if ``rem`` is given) to ``out_dir``. Refuses to
    overwrite existing files unless ``force`` is set; in that case nothing is written.
    """
    names = [RESULTS_FILE, SUMMARY_FILE, CDF_FILE] + ([REM_FILE] if rem is not None else [])
    paths = dict(zip(names, prepare_output_dir(out_dir, names, force=force)))

    _write_csv(results_frame(results), paths[RESULTS_FILE])
    _write_csv(summary.to_frame(), paths[SUMMARY_FILE])
    _write_csv(summary.cdf_frame(), paths[CDF_FILE])
    if rem is not None:
        save_rem(rem, paths[REM_FILE])

    for name, path in paths.items():
        remsleep.tracker.log_artifact(path, name=name, type="results")
    logger.info(f"Wrote {', '.join(paths)} to {out_dir}")
    return paths


_SUMMARY_KEYS = ("mean_ee", "gain", "oracle_gain_fraction", "mean_qos_ee", "qos_gain")


def log_summary(summary: SummaryStats):
    for a in summary.arms:
        logger.info(
            f"{a.arm:>20}: mean EE {a.mean_ee:.6g} bit/J, gain {a.gain:.4f} (oracle {a.oracle_gain:.4f}, "
            f"fraction {a.oracle_gain_fraction:.3f}), QoS violations {a.qos_violations}/{a.runs}, "
            f"gain with violations scored 0 {a.qos_gain:.4f} (fraction {a.qos_oracle_gain_fraction:.3f})"
        )
    remsleep.tracker.log_summary({f"{a.arm}/{k}": getattr(a, k) for a in summary.arms for k in _SUMMARY_KEYS})


def check_orderings(
    summary: SummaryStats,
    *,
    rtk: str = "rtk",
    gps: Optional[str] = "gps",
    min_oracle_fraction: float = 0.7,
) -> List[str]:
    """
    Checks the orderings REM-based switching should show and returns a message per failed check:

    * every metric's gain over all-on under ``rtk`` is at least 1,
    * sum-of-minimums does at least as well as average distance under ``rtk``,
    * sum-of-minimums does at least as well under ``rtk`` as under ``gps``,
    * sum-of-minimums realizes at least ``min_oracle_fraction`` of the oracle's gain under ``rtk``.

    Arms missing from ``summary`` skip their check, except ``som`` under ``rtk``, which raises KeyError.
    """
    failures = []
    arms = {a.arm: a for a in summary.arms}
    for arm in arms.values():
        if arm.localization == rtk and arm.gain < 1.0:
            failures.append(f"{arm.arm} gain {arm.gain:.4f} < 1")

    som = summary.arm(arm_name(MetricKind.SUM_OF_MINIMUMS.value, rtk))
    average = arms.get(arm_name(MetricKind.AVERAGE.value, rtk))
    if average is not None and som.mean_ee < average.mean_ee:
        failures.append(f"som mean EE {som.mean_ee:.6g} < average mean EE {average.mean_ee:.6g}")

    som_gps = arms.get(arm_name(MetricKind.SUM_OF_MINIMUMS.value, gps)) if gps is not None else None
    if som_gps is not None and som.mean_ee < som_gps.mean_ee:
        failures.append(f"som with {rtk} {som.mean_ee:.6g} < with {gps} {som_gps.mean_ee:.6g}")

    logger.info(
        f"{som.arm} realizes {som.oracle_gain_fraction:.3f} of the oracle's gain "
        f"({som.qos_oracle_gain_fraction:.3f} with QoS violations scored 0)"
    )
    if not som.oracle_gain_fraction >= min_oracle_fraction:
        failures.append(f"som oracle fraction {som.oracle_gain_fraction:.3f} < {min_oracle_fraction}")
    return failures


@dataclass
class ExperimentOutcome:
    rem: Rem
    results: List[RunResult]
    summary: SummaryStats
    paths: Dict[str, str] = field(default_factory=dict)


def run_full_experiment(
    config: ExperimentConfig, out_dir: Optional[str] = None, *, force: bool = False
) -> ExperimentOutcome:
    """
    Learning, evaluation and summary in one go. If ``out_dir`` is given the CSVs and the REM are written there. The
    overwrite check happens before any simulation runs.
    """
    config.validate()
    if out_dir is not None:
        prepare_output_dir(out_dir, OUTPUT_FILES, force=force)

    env = build_environment(config)
    with capture_time() as learn_time:
        rem = run_learning_phase(config, env)
    with capture_time() as eval_time:
        results = run_evaluation_phase(config, rem, env)
    logger.info(f"Learning took {learn_time():.1f}s, evaluation {eval_time():.1f}s")
    summary = summarize(results)
    log_summary(summary)
    remsleep.tracker.log_summary({"time/learn": learn_time(), "time/eval": eval_time()})

    paths: Dict[str, str] = {}
    if out_dir is not None:
        paths = write_results(results, summary, out_dir, rem=rem, force=True)
    return ExperimentOutcome(rem=rem, results=results, summary=summary, paths=paths)

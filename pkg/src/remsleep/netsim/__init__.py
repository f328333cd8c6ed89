from remsleep.netsim.channel import ChannelParams, ShadowingField, fading_losses_db, rss, rss_matrix
from remsleep.netsim.evaluate import (
    UNSERVED,
    EvalOutcome,
    associate,
    associate_from_rss,
    evaluate_configuration,
    throughput,
    throughput_from_rss,
)
from remsleep.netsim.layout import Area, BsConfig, BsKind, NetworkLayout, macro_bs, pico_bs, ring_layout
from remsleep.netsim.mobility import (
    Scenario,
    UeState,
    generate_scenario,
    load_scenario,
    save_scenario,
    simulate_trajectory,
    step_mobility,
    ue_positions,
)


__all__ = [
    "Area",
    "BsConfig",
    "BsKind",
    "ChannelParams",
    "EvalOutcome",
    "NetworkLayout",
    "Scenario",
    "ShadowingField",
    "UNSERVED",
    "UeState",
    "associate",
    "associate_from_rss",
    "evaluate_configuration",
    "fading_losses_db",
    "generate_scenario",
    "load_scenario",
    "macro_bs",
    "pico_bs",
    "ring_layout",
    "rss",
    "rss_matrix",
    "save_scenario",
    "simulate_trajectory",
    "step_mobility",
    "throughput",
    "throughput_from_rss",
    "ue_positions",
]

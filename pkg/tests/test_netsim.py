import math

import numpy as np
import pytest

from remsleep.errors import ConfigError
from remsleep.geometry import Position, PositionSet
from remsleep.netsim import (
    UNSERVED,
    Area,
    BsConfig,
    ChannelParams,
    NetworkLayout,
    Scenario,
    ShadowingField,
    UeState,
    associate,
    evaluate_configuration,
    fading_losses_db,
    generate_scenario,
    load_scenario,
    macro_bs,
    pico_bs,
    ring_layout,
    rss,
    rss_matrix,
    save_scenario,
    simulate_trajectory,
    step_mobility,
    throughput,
)
from remsleep.power import PowerParams
from remsleep.rem import Action
from remsleep.utils.rng import stream


LAYOUT = NetworkLayout()
# deterministic large-scale channel: no shadowing, blockage or fading
CLEAN = ChannelParams(shadowing_sigma_db=0.0, blockage_probability=0.0, fading_sigma_db=0.0)
# no interference and no spectral-efficiency cap, so rates follow Shannon exactly
IDEAL = ChannelParams(
    shadowing_sigma_db=0.0,
    blockage_probability=0.0,
    fading_sigma_db=0.0,
    interference_suppression_db=-math.inf,
    spectral_efficiency_cap=math.inf,
)


def test_rss_at_reference_distance():
    bs = BsConfig(Position(0, 0), kind="pico", antenna_count=1, tx_power_dbm=30.0)
    channel = ChannelParams(reference_loss_db=40.0)
    assert rss(Position(1, 0), bs, channel) == pytest.approx(-10.0)
    # distances below a meter are clamped
    assert rss(Position(0, 0), bs, channel) == pytest.approx(-10.0)
    assert rss(Position(1, 0), bs, channel, shadowing_draw=3.0) == pytest.approx(-13.0)


def test_rss_log_distance_law():
    bs = BsConfig(Position(0, 0), kind="pico", antenna_count=1, tx_power_dbm=30.0)
    channel = ChannelParams()
    near = rss(Position(50, 0), bs, channel)
    far = rss(Position(100, 0), bs, channel)
    assert near - far == pytest.approx(10 * 3.7 * math.log10(2))

    macro = BsConfig(Position(0, 0), kind="macro", antenna_count=1, tx_power_dbm=30.0)
    assert rss(Position(50, 0), macro, channel) - rss(Position(100, 0), macro, channel) == pytest.approx(
        10 * 3.5 * math.log10(2)
    )


def test_beamforming_gain():
    channel = ChannelParams()
    assert channel.beamforming_gain_db(128) == pytest.approx(21.07, abs=0.01)
    one = BsConfig(Position(0, 0), antenna_count=1)
    many = BsConfig(Position(0, 0), antenna_count=128)
    assert rss(Position(30, 40), many, channel) - rss(Position(30, 40), one, channel) == pytest.approx(
        10 * math.log10(128)
    )


def test_rss_matrix_agrees_with_rss():
    points = np.array([[10.0, 20.0], [400.0, 100.0], [250.0, 250.0]])
    m = rss_matrix(points, LAYOUT, CLEAN)
    assert m.shape == (3, 6)
    for i, (x, y) in enumerate(points):
        for b, bs in enumerate(LAYOUT.bss):
            assert m[i, b] == pytest.approx(rss(Position(x, y), bs, CLEAN))


def test_shadowing_is_spatially_frozen():
    field = ShadowingField(3, ChannelParams(), 6)
    a = field.losses_db(np.array([[12.0, 13.0], [200.0, 200.0]]))
    again = field.losses_db(np.array([[12.0, 13.0], [200.0, 200.0]]))
    same_cell = field.losses_db(np.array([[18.0, 19.5], [205.0, 209.0]]))
    np.testing.assert_array_equal(a, again)
    np.testing.assert_array_equal(a, same_cell)
    other_seed = ShadowingField(4, ChannelParams(), 6)
    assert not np.array_equal(a, other_seed.losses_db(np.array([[12.0, 13.0], [200.0, 200.0]])))


def test_shadowing_statistics():
    channel = ChannelParams(blockage_probability=0.0)
    field = ShadowingField(0, channel, 1)
    grid = np.stack(np.meshgrid(np.arange(200) * 10.0 + 5, np.arange(200) * 10.0 + 5), axis=-1).reshape(-1, 2)
    losses = field.losses_db(grid)[:, 0]
    assert abs(losses.mean()) < 0.1
    assert losses.std() == pytest.approx(6.0, rel=0.03)

    blocked = ShadowingField(0, ChannelParams(shadowing_sigma_db=0.0), 1).losses_db(grid)[:, 0]
    assert set(np.unique(blocked)) <= {0.0, 80.0}
    assert np.mean(blocked > 0) == pytest.approx(0.2, abs=0.02)


def test_associate_all_off_uses_macro():
    points = np.array([[100.0, 100.0], [400.0, 400.0], [250.0, 390.0]])
    assignment = associate(points, LAYOUT, Action.all_off(5), CLEAN)
    assert list(assignment) == [0, 0, 0]


def test_associate_picks_colocated_pico():
    positions = LAYOUT.bs_positions()
    assignment = associate(positions[1:], LAYOUT, Action.all_on(5), CLEAN)
    assert list(assignment) == [1, 2, 3, 4, 5]

    only_pbs_2 = Action.from_active([2], 5)
    assignment = associate(positions[1:], LAYOUT, only_pbs_2, CLEAN)
    assert assignment[2] == 3
    assert assignment[0] == 0


def test_associate_marks_weak_ues_unserved():
    deaf = ChannelParams(shadowing_sigma_db=0.0, blockage_probability=0.0, rss_threshold_dbm=100.0)
    assignment = associate(np.array([[100.0, 100.0], [250.0, 260.0]]), LAYOUT, Action.all_on(5), deaf)
    assert list(assignment) == [UNSERVED, UNSERVED]


def test_throughput_single_ue_is_shannon():
    point = np.array([[250.0, 150.0]])
    action = Action.all_off(5)
    assignment = associate(point, LAYOUT, action, IDEAL)
    rate = throughput(assignment, point, LAYOUT, action, IDEAL)

    macro = LAYOUT.bss[0]
    snr_db = rss(Position(250.0, 150.0), macro, IDEAL) - IDEAL.noise_power_dbm(macro.bandwidth_hz)
    expected = macro.bandwidth_hz * math.log2(1 + 10 ** (snr_db / 10))
    assert rate[0] == pytest.approx(expected, rel=1e-9)


def test_throughput_fair_split_and_unserved():
    action = Action.all_off(5)
    single = np.array([[350.0, 250.0]])
    pair = np.array([[350.0, 250.0], [150.0, 250.0]])
    one = throughput(associate(single, LAYOUT, action, IDEAL), single, LAYOUT, action, IDEAL)
    two = throughput(associate(pair, LAYOUT, action, IDEAL), pair, LAYOUT, action, IDEAL)
    assert two[0] == pytest.approx(one[0] / 2, rel=1e-9)
    assert two[1] == pytest.approx(one[0] / 2, rel=1e-9)

    rates = throughput(np.array([UNSERVED, 0]), pair, LAYOUT, action, IDEAL)
    assert rates[0] == 0
    assert rates[1] == pytest.approx(one[0], rel=1e-9)


def test_spectral_efficiency_cap():
    point = np.array([[250.0, 240.0]])
    action = Action.all_off(5)
    capped = ChannelParams(shadowing_sigma_db=0.0, blockage_probability=0.0, spectral_efficiency_cap=1.0)
    rate = throughput(associate(point, LAYOUT, action, capped), point, LAYOUT, action, capped)
    assert rate[0] == pytest.approx(LAYOUT.bss[0].bandwidth_hz)


def test_interference_lowers_rates():
    points = np.array([[250.0, 390.0], [120.0, 290.0]])
    action = Action.all_on(5)
    loud = ChannelParams(shadowing_sigma_db=0.0, blockage_probability=0.0, interference_suppression_db=0.0)
    quiet = IDEAL
    a = associate(points, LAYOUT, action, loud)
    assert np.all(throughput(a, points, LAYOUT, action, loud) < throughput(a, points, LAYOUT, action, quiet))


def _random_points(seed, n=30):
    return Area().sample(np.random.default_rng(seed), n)


def test_coverage_is_monotone_in_active_set():
    channel = ChannelParams()
    shadowing = ShadowingField(5, channel, 6)
    points = _random_points(5, 60)
    served = {}
    for action in Action.space(5):
        outcome = evaluate_configuration(
            points, LAYOUT, action, channel, PowerParams(), stream(5, "radio"), shadowing=shadowing
        )
        served[action] = outcome.served_ues
    for a in Action.space(5):
        for b in Action.space(5):
            if a.bits & b.bits == a.bits:
                assert served[a] <= served[b]


def test_evaluate_configuration():
    channel = ChannelParams()
    shadowing = ShadowingField(1, channel, 6)
    points = _random_points(1, 40)
    out = evaluate_configuration(
        points, LAYOUT, Action.all_off(5), channel, PowerParams(), stream(1, "radio"), shadowing=shadowing
    )
    assert out.avg_power == pytest.approx(191.0214, abs=1e-4)
    assert out.ee == pytest.approx(out.median_bitrate / out.avg_power)
    assert out.median_bitrate == pytest.approx(float(np.median(out.per_ue_bitrates)))
    assert out.n_ues == 40
    assert 0 <= out.served_ues <= 40

    again = evaluate_configuration(
        points, LAYOUT, Action.all_off(5), channel, PowerParams(), stream(1, "radio"), shadowing=shadowing
    )
    assert again == out


def test_median_is_permutation_invariant():
    channel = ChannelParams()
    shadowing = ShadowingField(0, channel, 6)
    points = _random_points(2, 41)
    perm = np.random.default_rng(0).permutation(41)
    for action in (Action.all_on(5), Action.from_active([1, 3], 5)):
        kwargs = dict(shadowing=shadowing, snapshots=3)
        a = evaluate_configuration(points, LAYOUT, action, channel, PowerParams(), np.random.default_rng(0), **kwargs)
        b = evaluate_configuration(
            points[perm], LAYOUT, action, channel, PowerParams(), np.random.default_rng(0), **kwargs
        )
        assert a.median_bitrate == pytest.approx(b.median_bitrate, rel=1e-12)
        assert a.served_ues == b.served_ues
        np.testing.assert_allclose(np.asarray(b.per_ue_bitrates), np.asarray(a.per_ue_bitrates)[perm], rtol=1e-12)


def test_fading_follows_positions():
    channel = ChannelParams()
    points = _random_points(3, 25)
    perm = np.random.default_rng(1).permutation(25)
    fading = fading_losses_db(points, 6, 17, channel)
    assert fading.shape == (25, 6)
    np.testing.assert_array_equal(fading_losses_db(points[perm], 6, 17, channel), fading[perm])
    assert not np.array_equal(fading_losses_db(points, 6, 18, channel), fading)
    assert not np.any(fading_losses_db(points, 6, 17, CLEAN))

    grid = np.stack(np.meshgrid(np.arange(200) + 0.5, np.arange(200) + 0.5), axis=-1).reshape(-1, 2)
    draws = fading_losses_db(grid, 1, 5, channel)[:, 0]
    assert abs(draws.mean()) < 0.05
    assert draws.std() == pytest.approx(2.0, rel=0.03)


def test_shadowing_accepts_full_u64_seeds():
    points = np.array([[12.0, 13.0], [200.0, 200.0]])
    top = ShadowingField(2**64 - 1, ChannelParams(), 6).losses_db(points)
    assert top.shape == (2, 6)
    assert np.all(np.isfinite(top))
    assert not np.array_equal(top, ShadowingField(2**63, ChannelParams(), 6).losses_db(points))
    with pytest.raises(ValueError):
        ShadowingField(2**64, ChannelParams(), 6)
    with pytest.raises(ValueError):
        ShadowingField(-1, ChannelParams(), 6)


def test_evaluate_moving_ues_over_snapshots():
    ues = generate_scenario(0, 20, LAYOUT)
    channel, power = ChannelParams(), PowerParams()
    out = evaluate_configuration(ues, LAYOUT, Action.all_on(5), channel, power, stream(0, "x"), snapshots=5)
    assert out.n_ues == 20
    with pytest.raises(ValueError):
        evaluate_configuration(ues, LAYOUT, Action.all_on(5), channel, power, stream(0, "x"), snapshots=0)


def test_evaluate_rejects_mismatched_action():
    with pytest.raises(ValueError):
        evaluate_configuration(_random_points(0, 3), LAYOUT, Action.all_on(4), CLEAN, PowerParams(), stream(0))


def test_step_mobility():
    area = Area()
    rng = np.random.default_rng(0)
    (moved,) = step_mobility([UeState(Position(100.0, 100.0), 0.0, 1.5)], 1.0, area, rng, math.inf)
    assert moved.position.x == pytest.approx(101.5)
    assert moved.position.y == pytest.approx(100.0)

    (still,) = step_mobility([UeState(Position(100.0, 100.0), 1.0, 0.0)], 1.0, area, rng, math.inf)
    assert still.position == Position(100.0, 100.0)

    (bounced,) = step_mobility([UeState(Position(499.5, 100.0), 0.0, 1.5)], 1.0, area, rng, math.inf)
    assert bounced.position.x == pytest.approx(499.0)
    assert bounced.heading == pytest.approx(math.pi)

    with pytest.raises(ValueError):
        step_mobility([moved], 0.0, area, rng)


def test_mobility_stays_inside_area():
    area = Area(100.0, 50.0)
    ues = generate_scenario(3, 30, area=area, speed=20.0)
    rng = np.random.default_rng(3)
    for _ in range(100):
        ues = step_mobility(ues, 1.0, area, rng, heading_change_time=5.0)
        for ue in ues:
            assert 0 <= ue.position.x <= 100.0
            assert 0 <= ue.position.y <= 50.0


def test_generate_scenario():
    a = generate_scenario(11, 50, LAYOUT)
    assert len(a) == 50
    assert a == generate_scenario(11, 50, LAYOUT)
    assert a != generate_scenario(12, 50, LAYOUT)
    for ue in a:
        assert 0 <= ue.position.x <= 500 and 0 <= ue.position.y <= 500
        assert ue.speed == 1.5
    with pytest.raises(ValueError):
        generate_scenario(0, 0)


def test_simulate_trajectory():
    ues = generate_scenario(0, 4, LAYOUT)
    traj = simulate_trajectory(ues, 15, 1.0, LAYOUT.area, np.random.default_rng(0))
    assert traj.shape == (15, 4, 2)
    np.testing.assert_array_equal(traj[0], PositionSet([u.position for u in ues]).points)
    steps = np.hypot(*(traj[1:] - traj[:-1]).transpose(2, 0, 1))
    assert np.all(steps <= 1.5 + 1e-9)


def test_scenario_round_trip(tmp_path):
    ues = generate_scenario(0, 5, LAYOUT)
    traj = simulate_trajectory(ues, 3, 1.0, LAYOUT.area, np.random.default_rng(0))
    path = str(tmp_path / "scenario.json")
    save_scenario(Scenario(0, LAYOUT.area, ues, traj), path)
    loaded = load_scenario(path)
    assert loaded.ues == ues
    np.testing.assert_array_equal(loaded.trajectory, traj)
    assert loaded.area == LAYOUT.area


def test_ring_layout():
    bss = ring_layout(Area(), 5, radius=150.0)
    assert bss[0] == macro_bs(250.0, 250.0)
    assert bss[1].position == Position(250.0, 400.0)
    for bs in bss[1:]:
        assert math.hypot(bs.position.x - 250.0, bs.position.y - 250.0) == pytest.approx(150.0, abs=1e-5)


def test_layout_validation():
    LAYOUT.validate()
    with pytest.raises(ConfigError, match=r"layout.bss\[2\].position"):
        NetworkLayout(bss=[macro_bs(250, 250), pico_bs(10, 10), pico_bs(600, 10)]).validate()
    with pytest.raises(ConfigError, match="layout.bss"):
        NetworkLayout(bss=[pico_bs(250, 250), macro_bs(10, 10)]).validate()
    with pytest.raises(ConfigError, match=r"layout.bss\[1\].antenna_count"):
        NetworkLayout(bss=[macro_bs(250, 250), BsConfig(Position(1, 1), antenna_count=0)]).validate()


def test_channel_validation():
    ChannelParams().validate()
    with pytest.raises(ConfigError, match="channel.pathloss_exponent_pico"):
        ChannelParams(pathloss_exponent_pico=1.5).validate()
    with pytest.raises(ConfigError, match="channel.interference_suppression_db"):
        ChannelParams(interference_suppression_db=3.0).validate()
    with pytest.raises(ConfigError, match="channel.blockage_probability"):
        ChannelParams(blockage_probability=1.5).validate()

import pytest
from hypothesis import given
from hypothesis import strategies as st

from idiotransfer.perception import COLLISIONS, Antigen, blob_direction, classify, salient_sensor
from idiotransfer.platforms import EPUCK, PIONEER_SIM
from idiotransfer.world import Blob, SensorFrame

BLOB = Blob("centre", 0.1, 0.0, 0)


def ir(**hot):
    r = [50.0] * 8
    for k, v in hot.items():
        r[int(k[1:])] = v
    return tuple(r)


def sonar(**near):
    r = [5.0] * 16
    for k, v in near.items():
        r[int(k[1:])] = v
    return tuple(r)


def test_epuck_clear_no_blob():
    assert classify(SensorFrame(ir()), EPUCK) == Antigen.TARGET_UNSEEN


def test_epuck_clear_with_blob():
    assert classify(SensorFrame(ir(), BLOB), EPUCK) == Antigen.TARGET_SEEN


def test_epuck_collision_left():
    assert classify(SensorFrame(ir(s6=3000.0)), EPUCK) == Antigen.COLLISION_LEFT


@pytest.mark.parametrize("idx, side", [(0, 3), (1, 3), (2, 3), (3, 4), (4, 4), (5, 5), (6, 5), (7, 5)])
def test_epuck_obstacle_sides(idx, side):
    assert classify(SensorFrame(ir(**{f"s{idx}": 500.0})), EPUCK) == side


def test_pioneer_obstacle_beats_target():
    assert classify(SensorFrame(sonar(s5=0.10), BLOB), PIONEER_SIM) == Antigen.OBSTACLE_RIGHT


@pytest.mark.parametrize("idx, code", [(0, 8), (3, 8), (4, 6), (9, 6), (10, 7), (13, 7), (14, 8), (15, 8)])
def test_pioneer_collision_sides(idx, code):
    assert classify(SensorFrame(sonar(**{f"s{idx}": 0.02})), PIONEER_SIM) == code


def test_thresholds_are_inclusive():
    assert classify(SensorFrame(sonar(s4=0.15)), PIONEER_SIM) == Antigen.OBSTACLE_RIGHT
    assert classify(SensorFrame(sonar(s4=0.04)), PIONEER_SIM) == Antigen.COLLISION_RIGHT
    assert classify(SensorFrame(ir(s0=250.0)), EPUCK) == Antigen.OBSTACLE_RIGHT
    assert classify(SensorFrame(ir(s0=2400.0)), EPUCK) == Antigen.COLLISION_RIGHT


def test_ties_go_to_lowest_index():
    assert salient_sensor([1.0, 3.0, 3.0], True) == 1
    assert salient_sensor([0.1, 0.1, 0.5], False) == 0
    # equal readings on a right and a left sensor: right wins (lower index)
    assert classify(SensorFrame(ir(s2=3000.0, s5=3000.0)), EPUCK) == Antigen.COLLISION_RIGHT


def test_antigen_helpers():
    assert Antigen.TARGET_UNSEEN.index == 0 and Antigen.COLLISION_LEFT.index == 7
    assert [a.danger for a in Antigen] == [0, 0, 1, 1, 1, 2, 2, 2]
    assert COLLISIONS == {6, 7, 8}


def test_blob_direction():
    assert blob_direction(SensorFrame(ir())) == "none"
    assert blob_direction(SensorFrame(ir(), Blob("left", 0.1, 0.3, 0))) == "left"


readings_ir = st.lists(st.floats(0, 4095, allow_nan=False), min_size=8, max_size=8)
readings_sonar = st.lists(st.floats(0, 5, allow_nan=False), min_size=16, max_size=16)


@given(readings_ir, st.booleans())
def test_exactly_one_antigen_danger_first(r, blob):
    a = classify(SensorFrame(tuple(r), BLOB if blob else None), EPUCK)
    assert 1 <= a <= 8
    if max(r) >= EPUCK.obstacle_threshold:
        assert a.danger > 0


@given(readings_sonar, st.integers(0, 15), st.floats(0, 1))
def test_closer_never_demotes_collision(r, k, shrink):
    r = list(r)
    before = classify(SensorFrame(tuple(r)), PIONEER_SIM)
    if before.danger < 2:
        return
    # moving the salient obstacle closer keeps a collision a collision
    s = salient_sensor(r, False)
    r[s] *= shrink
    assert classify(SensorFrame(tuple(r)), PIONEER_SIM).danger == 2


@given(st.floats(0, 4095, allow_nan=False), st.floats(0, 4095, allow_nan=False), st.integers(0, 7))
def test_ir_monotone_per_side(a, b, k):
    lo, hi = sorted((a, b))
    r_lo, r_hi = [0.0] * 8, [0.0] * 8
    r_lo[k], r_hi[k] = lo, hi
    d_lo = classify(SensorFrame(tuple(r_lo)), EPUCK).danger
    d_hi = classify(SensorFrame(tuple(r_hi)), EPUCK).danger
    assert d_hi >= d_lo

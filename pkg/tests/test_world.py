import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import BLUE, RED, make_world, rotate_world
from pushsort.world import (
    ScenarioError,
    all_sorted,
    dumps_world,
    heuristic,
    is_sorted,
    load_world,
    validate,
    world_from_dict,
    world_to_dict,
)


def test_validate_ok(three_world):
    assert validate(three_world) == []


def test_validate_overlap_names_both_ids():
    w = make_world([(0, RED, (0.2, 0.0), 0.03), (1, BLUE, (0.2, 0.0), 0.03)])
    (v,) = validate(w)
    assert v.constraint == "overlap" and v.ids == (0, 1)


def test_validate_off_table():
    w = make_world([(0, RED, (-0.5, 0.0), 0.03)])
    (v,) = validate(w)
    assert v.constraint == "off_table" and v.ids == (0,)


def test_validate_duplicate_ids_and_goals():
    w = make_world([(0, RED, (0.2, 0.0), 0.03), (0, BLUE, (0.4, 0.0), 0.03)])
    assert [v.constraint for v in validate(w)] == ["duplicate_id"]
    w = make_world([], goal_radius=0.02)
    assert validate(w) == []  # no objects: any positive goal radius is fine
    w = make_world([(0, RED, (0.2, 0.0), 0.03)], goal_radius=0.03)
    assert {v.constraint for v in validate(w)} == {"goal_too_small"}


@pytest.mark.parametrize("dist, expected", [(0.0, True), (0.07, True), (0.08, False)])
def test_is_sorted_boundary(dist, expected):
    w = make_world([(0, RED, (0.6 + dist, 0.3), 0.03)])
    assert is_sorted(w.objects[0], w) is expected


def test_heuristic_examples():
    assert heuristic(make_world([(0, RED, (0.6, 0.3), 0.03)])) == 0.0
    w = make_world([(0, RED, (0.6, 0.8), 0.03)])
    assert heuristic(w) == pytest.approx(0.43, abs=1e-12)
    w = make_world([(0, RED, (0.6, 0.8), 0.03), (1, RED, (0.6, -0.2), 0.03)])
    assert heuristic(w) == pytest.approx(0.86, abs=1e-12)


def test_all_sorted_examples():
    assert all_sorted(make_world([]))
    assert not all_sorted(make_world([(0, RED, (0.2, 0.0), 0.03)]))
    assert all_sorted(make_world([(0, RED, (0.62, 0.3), 0.03), (1, BLUE, (0.6, -0.3), 0.03)]))


def _random_world(seed, n):
    rng = np.random.default_rng(seed)
    objs = []
    while len(objs) < n:
        c = rng.uniform((0.1, -0.7), (1.3, 0.7))
        if all(math.dist(c, o[2]) >= 0.06 for o in objs):
            objs.append((len(objs), RED if len(objs) % 2 == 0 else BLUE, tuple(c), 0.03))
    return make_world(objs)


@given(st.integers(0, 10_000), st.integers(0, 8))
def test_heuristic_zero_exactly_on_goal_states(seed, n):
    w = _random_world(seed, n)
    h = heuristic(w)
    assert h >= 0.0
    direct = all(
        math.dist(o.center, w.goal_for(o.kind).center) <= w.goal_for(o.kind).radius - o.radius
        for o in w.objects
    )
    assert (h == 0.0) == direct == all_sorted(w)


@given(st.integers(0, 10_000), st.integers(1, 8), st.floats(-math.pi, math.pi),
       st.floats(-1, 1), st.floats(-1, 1))
def test_heuristic_rigid_invariant(seed, n, theta, tx, ty):
    w = _random_world(seed, n)
    assert heuristic(rotate_world(w, theta, tx, ty)) == pytest.approx(heuristic(w), abs=1e-9)


@given(st.floats(0.0, 0.6), st.floats(0.0, 0.8))
def test_radial_move_reduces_heuristic_by_min_delta(d0, delta):
    # object at 0.07 + d0 from its goal center, moved delta toward it
    r0 = 0.07 + d0
    w = make_world([(0, RED, (0.6, 0.3 + r0), 0.03)])
    moved = make_world([(0, RED, (0.6, 0.3 + max(r0 - delta, 0.0)), 0.03)])
    assert heuristic(w) - heuristic(moved) == pytest.approx(min(delta, d0), abs=1e-12)


def test_scenario_round_trip(tmp_path, three_world):
    path = tmp_path / "s.json"
    path.write_text(dumps_world(three_world))
    assert load_world(path) == three_world


def test_scenario_rejects_unknown_keys(three_world):
    d = world_to_dict(three_world)
    d["extra"] = 1
    with pytest.raises(ScenarioError, match="unknown keys"):
        world_from_dict(d)
    d = world_to_dict(three_world)
    d["objects"][0]["mass"] = 1.0
    with pytest.raises(ScenarioError):
        world_from_dict(d)
    d = world_to_dict(three_world)
    d["objects"][0]["kind"] = "green"
    with pytest.raises(ScenarioError):
        world_from_dict(d)


def test_scenario_rejects_bad_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(ScenarioError):
        load_world(path)
    path.write_text(json.dumps({"table": {}}))
    with pytest.raises(ScenarioError):
        load_world(path)

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import BLUE, RED, broom, make_world, random_scene
from pushsort.geometry import Point2, capsule_disc_penetration, dist_point_segment
from pushsort.push_physics import (
    InfeasibleStart,
    SimParams,
    guaranteed_fixed,
    predict_push,
    swept_band,
)
from pushsort.world import validate

SIM = SimParams()
ORACLE = SIM.refined(10)


def test_zero_length_push_changes_nothing():
    w = make_world([(0, RED, (0.5, 0.2), 0.03)])
    out = predict_push(w, broom((0.5, 0.0), (0.5, 0.0)))
    assert out.final == w
    assert out.displaced_ids == frozenset()
    assert not out.any_off_table


def test_single_disc_displacement_matches_oracle():
    # leading surface at y=0.04; disc surface 0.05 further, so center at 0.12
    w = make_world([(0, RED, (0.5, 0.12), 0.03)])
    spec = broom((0.5, 0.0), (0.5, 0.25))
    out = predict_push(w, spec)
    ref = predict_push(w, spec, ORACLE)
    c = out.final.objects[0].center
    assert c.dist(ref.final.objects[0].center) <= 1e-3
    assert c.y - 0.12 == pytest.approx(0.20, abs=1e-3)
    assert c.x == pytest.approx(0.5, abs=1e-9)
    assert out.displaced_ids == {0}


def test_two_discs_side_by_side_both_move():
    w = make_world([(0, RED, (0.45, 0.15), 0.03), (1, BLUE, (0.55, 0.15), 0.03)])
    spec = broom((0.5, 0.0), (0.5, 0.3))
    out = predict_push(w, spec)
    ref = predict_push(w, spec, ORACLE)
    assert out.displaced_ids == {0, 1}
    assert out.max_residual_penetration <= SIM.penetration_eps
    for a, b in zip(out.final.objects, ref.final.objects):
        assert a.center.dist(b.center) <= 1e-3


def test_chain_push_moves_disc_outside_band():
    w = make_world([(0, RED, (0.5, 0.12), 0.03), (1, BLUE, (0.5, 0.18), 0.03)])
    out = predict_push(w, broom((0.5, 0.0), (0.5, 0.10), length=0.1))
    assert out.displaced_ids == {0, 1}
    assert validate(out.final) == []


def test_infeasible_start():
    w = make_world([(0, RED, (0.5, 0.05), 0.03)])
    with pytest.raises(InfeasibleStart):
        predict_push(w, broom((0.5, 0.0), (0.5, 0.3)))


def test_off_table_is_clamped_and_flagged():
    w = make_world([(0, RED, (0.5, 0.6), 0.03)])  # table top edge at y=0.8
    out = predict_push(w, broom((0.5, 0.45), (0.5, 0.9)))
    assert out.any_off_table
    c = out.final.objects[0].center
    assert c.y == pytest.approx(0.8 - 0.03)
    aborted = predict_push(w, broom((0.5, 0.45), (0.5, 0.9)), abort_on_off_table=True)
    assert aborted.any_off_table and aborted.aborted


def test_deterministic_double_execution():
    for seed in range(20):
        w, spec = random_scene(seed)
        assert predict_push(w, spec) == predict_push(w, spec)


def test_swept_band_zero_length_is_start_capsule():
    spec = broom((0.5, 0.0), (0.5, 0.0))
    band = swept_band(spec)
    cap = spec.capsule_at(spec.start)
    for p in [(0.5, 0.1), (0.9, 0.0), (0.3, -0.3), (0.5, 0.0)]:
        expected = max(0.0, dist_point_segment(Point2(*p), cap.axis) - cap.radius)
        assert band.distance(p) == pytest.approx(expected, abs=1e-12)


def test_disc_far_from_band_stays_fixed():
    w = make_world([(0, RED, (0.5, 0.12), 0.03), (1, BLUE, (1.2, 0.1), 0.03)])
    spec = broom((0.5, 0.0), (0.5, 0.25))
    band = swept_band(spec)
    assert not band.touches_disc(w.objects[1].center, 0.03)
    out = predict_push(w, spec)
    assert out.final.objects[1] is w.objects[1]


def test_direct_screening_single_disc():
    # with one disc there is no chain, so the band test alone is sound
    for seed in range(100):
        w, spec = random_scene(seed, k=1)
        o = w.objects[0]
        if not swept_band(spec).touches_disc(o.center, o.radius):
            assert predict_push(w, spec).final.objects[0] == o


@pytest.mark.parametrize("seed", range(60))
def test_conservation_of_non_contact(seed):
    w, spec = random_scene(seed)
    fixed = guaranteed_fixed(w, spec)
    out = predict_push(w, spec)
    for before, after in zip(w.objects, out.final.objects):
        if before.id in fixed:
            assert after is before


def test_conservation_with_spread_scene():
    objs = [(0, RED, (0.5, 0.15), 0.03), (1, BLUE, (1.3, 0.6), 0.03), (2, RED, (-0.3, -1.0), 0.03)]
    w = make_world(objs, table=((-0.5, -1.2), (1.9, 1.2)))
    spec = broom((0.5, 0.0), (0.5, 0.1))
    assert guaranteed_fixed(w, spec) == {1, 2}
    out = predict_push(w, spec)
    assert out.final.objects[1] is w.objects[1] and out.final.objects[2] is w.objects[2]


@pytest.mark.parametrize("seed", range(40))
def test_non_teleportation(seed):
    w, spec = random_scene(seed)
    predict_push(w, spec, check_motion=True)


def test_residual_is_reported_truthfully():
    for seed in range(40):
        w, spec = random_scene(seed)
        out = predict_push(w, spec)
        cap = spec.capsule_at(spec.end)
        worst = 0.0
        objs = out.final.objects
        for i, a in enumerate(objs):
            hit = capsule_disc_penetration(cap, a.footprint)
            worst = max(worst, hit.depth if hit else 0.0)
            for b in objs[i + 1:]:
                worst = max(worst, a.radius + b.radius - a.center.dist(b.center))
        assert out.max_residual_penetration == pytest.approx(worst, abs=1e-15)


def test_post_state_validity_rate():
    ok = 0
    total = 200
    for seed in range(total):
        w, spec = random_scene(seed)
        out = predict_push(w, spec)
        if out.any_off_table:
            ok += 1
            continue
        if not validate(out.final) and out.max_residual_penetration <= SIM.penetration_eps:
            ok += 1
    assert ok / total >= 0.99


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(0.0, 0.5), min_size=2, max_size=6))
def test_monotone_push_progress(lengths):
    w = make_world([(0, RED, (0.5, 0.15), 0.03)])
    disp = []
    for L in sorted(lengths):
        out = predict_push(w, broom((0.5, 0.0), (0.5, L)))
        disp.append(out.final.objects[0].center.y - 0.15)
    assert all(b >= a - 1e-12 for a, b in zip(disp, disp[1:]))


def test_convergence_against_refined_oracle_sample():
    worst = 0.0
    for seed in range(30):
        w, spec = random_scene(seed)
        a = predict_push(w, spec).final
        b = predict_push(w, spec, ORACLE).final
        worst = max(worst, max(x.center.dist(y.center) for x, y in zip(a.objects, b.objects)))
    assert worst <= 1e-3


def test_sim_params_validation():
    with pytest.raises(ValueError):
        SimParams(substep=0.0)
    with pytest.raises(ValueError):
        SimParams(max_projection_iters=0)
    ref = SimParams().refined(10)
    assert ref.substep == pytest.approx(SimParams().substep / 10) and ref.max_projection_iters == 320

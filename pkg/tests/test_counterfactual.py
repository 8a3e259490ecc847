"""Counterfactual re-simulation and relation classification tests."""
from __future__ import annotations

import itertools

import pytest

from physqa.counterfactual import (
    CAUSE,
    ENABLE,
    NONE,
    PREVENT,
    VariationCache,
    build_variation_set,
    classify_relation,
    counterfact_trace,
)
from physqa.engine import simulate
from physqa.events import ENTER_BASKET, Event, END, START, TOUCH_START, extract_events, intentions
from conftest import ball, build_scene, cause_scene, enable_scene, prevent_scene


def object_events(events, obj_id):
    return [(e.type, e.tick, e.participants) for e in events if obj_id in e.participants]


def test_removing_isolated_object_leaves_others_unchanged():
    scene = build_scene([ball(2.0, 0.35), ball(8.0, 2.0, color="green")])
    isolated, other = scene.dynamics[0].id, scene.dynamics[1].id
    base = extract_events(simulate(scene), scene)
    trace, _graph = counterfact_trace(scene, isolated)
    reduced = scene.without(isolated)
    cf = extract_events(trace, reduced)
    assert object_events(base, other) == object_events(cf, other)


def test_removing_only_mover_leaves_resting_contacts():
    scene = build_scene([ball(2.0, 1.5, vx=4.0), ball(7.0, 0.35, color="green")])
    mover, rester = scene.dynamics[0].id, scene.dynamics[1].id
    _trace, graph = counterfact_trace(scene, mover)
    kinds = [e.type for e in graph.events]
    assert kinds.count(START) == 1
    assert kinds.count(END) == 1
    assert all(k in (START, END, TOUCH_START) for k in kinds)
    assert any(e.type == TOUCH_START and rester in e.participants for e in graph.events)


def test_billiard_striker_removal_stops_struck_ball():
    scene = build_scene([ball(2.0, 0.35, vx=4.0), ball(6.0, 0.35, color="green")])
    striker, struck = scene.dynamics[0].id, scene.dynamics[1].id
    base = extract_events(simulate(scene), scene)
    pair = (min(striker, struck), max(striker, struck))
    assert any(e.participants == pair for e in base if e.type == TOUCH_START)
    cache = VariationCache()
    cf = cache.events_for(scene, striker)
    assert not any(striker in e.participants or e.participants == pair
                   for e in cf if e.participants)
    # the struck ball stays put without the striker
    trace, _ = counterfact_trace(scene, striker, cache)
    k = trace.object_ids.index(struck)
    assert trace.final_state[k][0] == pytest.approx(6.0, abs=1e-3)


def test_variation_rejects_non_dynamic_removal():
    scene = build_scene([ball(2.0, 0.35)])
    with pytest.raises(ValueError):
        counterfact_trace(scene, 999)


def test_variation_set_covers_every_dynamic():
    scene = build_scene([ball(2.0, 0.35), ball(8.0, 0.35, color="green")])
    vs = build_variation_set(scene)
    assert set(vs.variations) == set(scene.dynamic_ids())
    for removed_id, (trace, _graph) in vs.variations.items():
        assert removed_id not in trace.object_ids
        assert len(trace.object_ids) == len(scene.dynamics) - 1


def test_cache_memoizes_per_removed_object():
    scene = build_scene([ball(2.0, 0.35), ball(8.0, 0.35, color="green")])
    cache = VariationCache()
    first = cache.get(scene, scene.dynamics[0].id)
    second = cache.get(scene, scene.dynamics[0].id)
    assert first is second


def _mk_events(patient_enters):
    events = [Event(0, START, 0, ())]
    if patient_enters:
        events.append(Event(1, ENTER_BASKET, 50, (7,)))
    events.append(Event(2, END, 99, ()))
    return events


@pytest.mark.parametrize("actual,without,intended,expected", [
    (True, False, False, CAUSE),
    (True, False, True, ENABLE),
    (False, True, True, PREVENT),
    (True, True, False, NONE),
    (True, True, True, NONE),
    (False, False, False, NONE),
    (False, False, True, NONE),
    (False, True, False, NONE),   # blocked but unintended: outside the trichotomy
])
def test_relation_truth_table(actual, without, intended, expected):
    rel = classify_relation(3, 7, _mk_events(actual), _mk_events(without), intended)
    assert rel == expected


def test_relations_are_mutually_exclusive():
    for actual, without, intended in itertools.product([False, True], repeat=3):
        rel = classify_relation(3, 7, _mk_events(actual), _mk_events(without), intended)
        matches = [r for r in (CAUSE, ENABLE, PREVENT) if r == rel]
        assert len(matches) <= 1


def test_same_object_relation_rejected():
    with pytest.raises(ValueError):
        classify_relation(7, 7, _mk_events(True), _mk_events(False), True)


@pytest.mark.parametrize("builder,expected", [
    (cause_scene, CAUSE),
    (enable_scene, ENABLE),
    (prevent_scene, PREVENT),
])
def test_constructed_scene_produces_expected_relation(builder, expected):
    scene, affector, patient = builder()
    trace = simulate(scene)
    base = extract_events(trace, scene)
    cache = VariationCache()
    cf = cache.events_for(scene, affector)
    rel = classify_relation(affector, patient, base, cf, intentions(trace)[patient])
    assert rel == expected

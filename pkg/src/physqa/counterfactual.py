"""Counterfactual re-simulation (object removal) and causal relation typing.

An affector relates to a patient through a task by comparing the actual
outcome, the outcome with the affector removed, and the patient's
intention:

    cause    patient succeeds, fails without affector, was not intended
    enable   patient succeeds, fails without affector, was intended
    prevent  patient fails, succeeds without affector, was intended
    none     anything else
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .engine import DT, ENGINE_VERSION, SimulationTrace, simulate
from .events import CausalGraph, Event, build_causal_graph, enters_basket, extract_events
from .scene import SceneSpec

CAUSE = "cause"
ENABLE = "enable"
PREVENT = "prevent"
NONE = "none"

TASKS = ("enter_basket",)


class VariationCache:
    """Memoizes (scene, removed object) -> (trace, events).

    Keys include the engine version. Lookups are read-only after insertion;
    results are deterministic, so a racing duplicate computation is benign.
    """

    def __init__(self, duration: float = 10.0, dt: float = DT):
        self.duration = duration
        self.dt = dt
        self._store: dict[tuple, tuple[SimulationTrace, list[Event]]] = {}

    def get(self, scene: SceneSpec, removed_id: int) -> tuple[SimulationTrace, list[Event]]:
        key = (scene.scene_id, removed_id, ENGINE_VERSION)
        hit = self._store.get(key)
        if hit is None:
            reduced = scene.without(removed_id)
            trace = simulate(reduced, duration=self.duration, dt=self.dt, validate=False)
            hit = (trace, extract_events(trace, reduced))
            self._store[key] = hit
        return hit

    def events_for(self, scene: SceneSpec, removed_id: int) -> list[Event]:
        return self.get(scene, removed_id)[1]


def counterfact_trace(scene: SceneSpec, removed_id: int,
                      cache: VariationCache | None = None,
                      duration: float = 10.0, dt: float = DT) -> tuple[SimulationTrace, CausalGraph]:
    """Deterministic re-simulation of the scene minus one dynamic object."""
    if cache is None:
        cache = VariationCache(duration, dt)
    trace, events = cache.get(scene, removed_id)
    remaining = [i for i in scene.dynamic_ids() if i != removed_id]
    return trace, build_causal_graph(events, remaining)


@dataclass
class VariationSet:
    base_scene_id: str
    variations: dict[int, tuple[SimulationTrace, CausalGraph]] = field(default_factory=dict)


def build_variation_set(scene: SceneSpec, cache: VariationCache | None = None,
                        duration: float = 10.0, dt: float = DT) -> VariationSet:
    """One variation per dynamic object of the scene."""
    if cache is None:
        cache = VariationCache(duration, dt)
    out = VariationSet(base_scene_id=scene.scene_id)
    for removed_id in scene.dynamic_ids():
        out.variations[removed_id] = counterfact_trace(scene, removed_id, cache, duration, dt)
    return out


def achieves(events: list[Event], obj_id: int, task: str = "enter_basket") -> bool:
    if task not in TASKS:
        raise ValueError(f"unknown task {task!r}")
    return enters_basket(events, obj_id)


def classify_relation(affector_id: int, patient_id: int,
                      base_events: list[Event], counterfactual_events: list[Event],
                      patient_intended: bool, task: str = "enter_basket") -> str:
    """Relation type from (actual, counterfactual, intention); see module docstring."""
    if affector_id == patient_id:
        raise ValueError("affector and patient must be distinct objects")
    actual = achieves(base_events, patient_id, task)
    without = achieves(counterfactual_events, patient_id, task)
    if actual and not without:
        return ENABLE if patient_intended else CAUSE
    if not actual and without and patient_intended:
        return PREVENT
    return NONE

"""Evaluation context: everything a functional program needs to answer a
question about one simulated scene.

Holds the object universe (statics + dynamics), the extracted events,
start/end kinematics, the intention table, and a lazy counterfactual
provider. Contexts can be built from live simulations or re-assembled
from exported dataset files.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from .counterfactual import VariationCache
from .engine import DT, SimulationTrace, simulate
from .events import Event, extract_events, intentions
from .scene import SceneSpec, scene_from_dict


@dataclass(frozen=True)
class ObjectRef:
    """Identity plus scene-constant attributes of one object."""
    id: int
    is_dynamic: bool
    shape: str | None = None
    size: str | None = None
    color: str | None = None
    kind: str | None = None   # static elements only

    def triple(self) -> tuple[str, str, str] | None:
        if not self.is_dynamic:
            return None
        return (self.size, self.color, self.shape)


class SimContext:
    def __init__(self, scene_id: str, objects: list[ObjectRef], events: list[Event],
                 initial_speed: dict[int, float], final_speed: dict[int, float],
                 intention_table: dict[int, bool],
                 counterfactual_provider: Callable[[int], tuple[Event, ...]]):
        self.scene_id = scene_id
        self.objects = tuple(objects)
        self.by_id = {o.id: o for o in objects}
        self.events = tuple(events)
        self.initial_speed = initial_speed
        self.final_speed = final_speed
        self.intentions = intention_table
        self._counterfactual = counterfactual_provider
        self._cf_memo: dict[int, tuple[Event, ...]] = {}
        self.dynamic_ids = frozenset(o.id for o in objects if o.is_dynamic)
        self.ground_ids = frozenset(o.id for o in objects if o.kind == "ground")
        self.basket_ids = frozenset(o.id for o in objects if o.kind == "basket")

    def counterfactual_events(self, removed_id: int) -> tuple[Event, ...]:
        hit = self._cf_memo.get(removed_id)
        if hit is None:
            hit = tuple(self._counterfactual(removed_id))
            self._cf_memo[removed_id] = hit
        return hit

    def dynamics(self) -> list[ObjectRef]:
        return [o for o in self.objects if o.is_dynamic]

    def speed_at(self, obj_id: int, step: int) -> float:
        table = self.initial_speed if step == 0 else self.final_speed
        return table.get(obj_id, 0.0)

    def find(self, size: str, color: str, shape: str) -> ObjectRef | None:
        for obj in self.objects:
            if obj.is_dynamic and obj.size == size and obj.color == color and obj.shape == shape:
                return obj
        return None


def _object_refs(scene: SceneSpec) -> list[ObjectRef]:
    refs = [ObjectRef(id=s.id, is_dynamic=False, kind=s.kind) for s in scene.statics]
    refs += [ObjectRef(id=d.id, is_dynamic=True, shape=d.shape, size=d.size, color=d.color)
             for d in scene.dynamics]
    refs.sort(key=lambda o: o.id)
    return refs


def _speeds(trace: SimulationTrace, state) -> dict[int, float]:
    out = {}
    for obj_id, s in zip(trace.object_ids, state):
        vx, vy = s[3], s[4]
        out[obj_id] = (vx * vx + vy * vy) ** 0.5
    return out


def build_context(scene: SceneSpec, trace: SimulationTrace | None = None,
                  cache: VariationCache | None = None,
                  duration: float = 10.0, dt: float = DT) -> SimContext:
    """Simulate (if needed), extract events, and wire a lazy variation provider."""
    if trace is None:
        trace = simulate(scene, duration=duration, dt=dt)
    if cache is None:
        cache = VariationCache(duration, dt)
    events = extract_events(trace, scene)

    def provider(removed_id: int) -> tuple[Event, ...]:
        return tuple(cache.events_for(scene, removed_id))

    return SimContext(
        scene_id=scene.scene_id,
        objects=_object_refs(scene),
        events=events,
        initial_speed=_speeds(trace, trace.initial_state),
        final_speed=_speeds(trace, trace.final_state),
        intention_table=intentions(trace),
        counterfactual_provider=provider,
    )


def context_from_export(video_dir) -> SimContext:
    """Rebuild a context from an exported per-video directory.

    Uses scene.json, causal_graph.json, the base trace header states, and
    the variation causal graphs; no re-simulation happens.
    """
    video_dir = Path(video_dir)
    scene = scene_from_dict(json.loads((video_dir / "scene.json").read_text()))
    graph = json.loads((video_dir / "causal_graph.json").read_text())
    events = [Event(e["event_id"], e["type"], e["tick"], tuple(e["participants"]))
              for e in graph["events"]]

    initial_speed: dict[int, float] = {}
    final_speed: dict[int, float] = {}
    first = last = None
    with open(video_dir / "trace.jsonl") as fh:
        header = json.loads(fh.readline())
        for line in fh:
            if first is None:
                first = json.loads(line)
            last_line = line
        last = json.loads(last_line)
    for obj_id, s in zip(header["object_ids"], first["objects"]):
        initial_speed[obj_id] = (s[3] ** 2 + s[4] ** 2) ** 0.5
    for obj_id, s in zip(header["object_ids"], last["objects"]):
        final_speed[obj_id] = (s[3] ** 2 + s[4] ** 2) ** 0.5

    from .events import MOTION_EPS
    intention_table = {oid: speed > MOTION_EPS for oid, speed in initial_speed.items()}

    variations: dict[int, tuple[Event, ...]] = {}
    var_root = video_dir / "variations"
    if var_root.exists():
        for sub in sorted(var_root.iterdir()):
            removed = int(sub.name)
            data = json.loads((sub / "causal_graph.json").read_text())
            variations[removed] = tuple(
                Event(e["event_id"], e["type"], e["tick"], tuple(e["participants"]))
                for e in data["events"])

    def provider(removed_id: int) -> tuple[Event, ...]:
        if removed_id not in variations:
            raise KeyError(f"no exported variation for object {removed_id}")
        return variations[removed_id]

    return SimContext(
        scene_id=scene.scene_id,
        objects=_object_refs(scene),
        events=events,
        initial_speed=initial_speed,
        final_speed=final_speed,
        intention_table=intention_table,
        counterfactual_provider=provider,
    )

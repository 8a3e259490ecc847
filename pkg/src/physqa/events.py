"""Event extraction from simulation traces and causal-graph construction.

Six event types: Start, End, Collision, TouchStart, TouchEnd, EnterBasket.
A contact onset always yields a TouchStart; it additionally yields a
Collision when the pre-solve approach speed exceeds the collision
threshold, which separates impacts from rolling or resting contact.
"""
from __future__ import annotations

from dataclasses import dataclass

from .engine import SimulationTrace
from .scene import SceneSpec

START = "Start"
END = "End"
COLLISION = "Collision"
TOUCH_START = "TouchStart"
TOUCH_END = "TouchEnd"
ENTER_BASKET = "EnterBasket"

# tie-break rank for events sharing a tick
_RANK = {START: 0, TOUCH_START: 1, COLLISION: 2, ENTER_BASKET: 3, TOUCH_END: 4, END: 5}

MOTION_EPS = 1e-3        # m/s; slower means stationary, also the intention threshold
COLLISION_SPEED = 0.5    # m/s relative normal approach speed for a Collision


@dataclass(frozen=True)
class Event:
    event_id: int
    type: str
    tick: int
    participants: tuple[int, ...]

    def sort_key(self) -> tuple:
        return (self.tick, _RANK[self.type], self.participants)


def extract_events(trace: SimulationTrace, scene: SceneSpec) -> list[Event]:
    """All events of a trace, tick-sorted with the deterministic tie-break."""
    raw: list[tuple[str, int, tuple[int, ...]]] = [
        (START, 0, ()),
        (END, trace.tick_count - 1, ()),
    ]
    active: set[tuple[int, int]] = set()
    for tick, records in enumerate(trace.contacts):
        current = set()
        for rec in records:
            pair = (rec[0], rec[1])
            current.add(pair)
            if pair not in active:
                raw.append((TOUCH_START, tick, pair))
                if rec[4] > COLLISION_SPEED:
                    raw.append((COLLISION, tick, pair))
        for pair in active - current:
            raw.append((TOUCH_END, tick, pair))
        active = current

    baskets = [s for s in scene.statics if s.kind == "basket" and s.interior]
    if baskets:
        entered: set[int] = set()
        for tick, state in enumerate(trace.states):
            if len(entered) == len(trace.object_ids):
                break
            for obj_id, obj_state in zip(trace.object_ids, state):
                if obj_id in entered:
                    continue
                x, y = obj_state[0], obj_state[1]
                for basket in baskets:
                    x0, y0, x1, y1 = basket.interior
                    if x0 <= x <= x1 and y0 <= y <= y1:
                        raw.append((ENTER_BASKET, tick, (obj_id,)))
                        entered.add(obj_id)
                        break

    raw.sort(key=lambda e: (e[1], _RANK[e[0]], e[2]))
    return [Event(i, typ, tick, parts) for i, (typ, tick, parts) in enumerate(raw)]


@dataclass
class CausalGraph:
    events: list[Event]
    edges: list[tuple[int, int]]   # (cause event_id, effect event_id)


def build_causal_graph(events: list[Event], dynamic_ids: list[int]) -> CausalGraph:
    """Link each event to the latest earlier event sharing a dynamic object.

    Events without a dynamic-object predecessor hang off Start; each
    object's final event feeds End. Static elements do not thread chains
    (the ground would otherwise connect everything).
    """
    ordered = sorted(events, key=Event.sort_key)
    start = next(e for e in ordered if e.type == START)
    end = next(e for e in ordered if e.type == END)
    dynamic_set = set(dynamic_ids)
    latest: dict[int, Event] = {}
    edges: set[tuple[int, int]] = set()
    for event in ordered:
        if event.type in (START, END):
            continue
        participants = [p for p in event.participants if p in dynamic_set]
        for obj in participants:
            prev = latest.get(obj, start)
            edges.add((prev.event_id, event.event_id))
        for obj in participants:
            latest[obj] = event
    for event in latest.values():
        edges.add((event.event_id, end.event_id))
    if not latest:
        edges.add((start.event_id, end.event_id))
    return CausalGraph(events=ordered, edges=sorted(edges))


def intentions(trace: SimulationTrace) -> dict[int, bool]:
    """intended iff the object starts with a nonzero velocity."""
    table = {}
    for obj_id, state in zip(trace.object_ids, trace.initial_state):
        vx, vy = state[3], state[4]
        table[obj_id] = vx * vx + vy * vy > MOTION_EPS * MOTION_EPS
    return table


def enters_basket(events: list[Event], obj_id: int) -> bool:
    return any(e.type == ENTER_BASKET and obj_id in e.participants for e in events)


def graph_to_dict(graph: CausalGraph) -> dict:
    return {
        "events": [
            {"event_id": e.event_id, "type": e.type, "tick": e.tick,
             "participants": list(e.participants)}
            for e in graph.events
        ],
        "edges": [list(edge) for edge in graph.edges],
    }


def graph_from_dict(data: dict) -> CausalGraph:
    events = [Event(e["event_id"], e["type"], e["tick"], tuple(e["participants"]))
              for e in data["events"]]
    edges = [tuple(edge) for edge in data["edges"]]
    return CausalGraph(events=events, edges=edges)

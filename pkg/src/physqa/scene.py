"""Scene domain types: dynamic objects, static scene elements, scene specs.

The arena is a 10 m x 10 m box bounded by the ground and two walls; all
positions are in meters, angles in radians, gravity acts along -y.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict

from . import geometry
from .geometry import Polygon, Vec

SHAPES = ("cube", "triangle", "circle")
SIZES = ("small", "large")
COLORS = ("gray", "red", "blue", "green", "brown", "purple", "cyan", "yellow")
STATIC_KINDS = ("ramp", "platform", "button", "basket", "left_wall", "right_wall", "ground")

ARENA_WIDTH = 10.0
ARENA_HEIGHT = 10.0
WALL_THICKNESS = 0.5

SMALL_EXTENT = 0.35   # radius / half-width / circumradius
LARGE_EXTENT = 0.7
DENSITY = 1.0         # kg per m^2, uniform for all shapes
DEFAULT_RESTITUTION = 0.2
DEFAULT_FRICTION = 0.4

# maximum initial overlap tolerated by scene validation
PLACEMENT_SLOP = 0.005


class SceneValidationError(ValueError):
    """Raised when a SceneSpec violates a structural invariant."""


def shape_extent(size: str) -> float:
    return SMALL_EXTENT if size == "small" else LARGE_EXTENT


def local_vertices(shape: str, size: str) -> Polygon | None:
    """Local-frame CCW vertices, or None for circles."""
    e = shape_extent(size)
    if shape == "cube":
        return ((-e, -e), (e, -e), (e, e), (-e, e))
    if shape == "triangle":
        pts = []
        for deg in (90.0, 210.0, 330.0):
            a = math.radians(deg)
            pts.append((e * math.cos(a), e * math.sin(a)))
        return tuple(pts)
    return None


def shape_mass(shape: str, size: str) -> float:
    e = shape_extent(size)
    if shape == "circle":
        area = math.pi * e * e
    elif shape == "cube":
        area = 4.0 * e * e
    else:  # equilateral triangle with circumradius e
        area = (3.0 * math.sqrt(3.0) / 4.0) * e * e
    return DENSITY * area


def shape_inertia(shape: str, size: str, mass: float) -> float:
    e = shape_extent(size)
    if shape == "circle":
        return 0.5 * mass * e * e
    verts = local_vertices(shape, size)
    assert verts is not None
    return geometry.polygon_inertia(verts, mass)


@dataclass
class DynamicObject:
    id: int
    shape: str
    size: str
    color: str
    position: Vec
    angle: float = 0.0
    linear_velocity: Vec = (0.0, 0.0)
    angular_velocity: float = 0.0
    mass: float = 0.0
    restitution: float = DEFAULT_RESTITUTION
    friction: float = DEFAULT_FRICTION

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise SceneValidationError(f"unknown shape {self.shape!r}")
        if self.size not in SIZES:
            raise SceneValidationError(f"unknown size {self.size!r}")
        if self.color not in COLORS:
            raise SceneValidationError(f"unknown color {self.color!r}")
        if self.mass <= 0.0:
            self.mass = shape_mass(self.shape, self.size)

    @property
    def extent(self) -> float:
        return shape_extent(self.size)

    def triple(self) -> tuple[str, str, str]:
        return (self.size, self.color, self.shape)

    def world_vertices(self) -> Polygon | None:
        verts = local_vertices(self.shape, self.size)
        if verts is None:
            return None
        c = math.cos(self.angle)
        s = math.sin(self.angle)
        return geometry.transform_points(verts, self.position[0], self.position[1], c, s)


@dataclass
class StaticElement:
    id: int
    kind: str
    parts: tuple[Polygon, ...]            # world-space convex polygons
    position: Vec = (0.0, 0.0)
    orientation: float = 0.0
    interior: tuple[float, float, float, float] | None = None  # baskets only
    friction: float = DEFAULT_FRICTION
    restitution: float = DEFAULT_RESTITUTION

    def __post_init__(self):
        if self.kind not in STATIC_KINDS:
            raise SceneValidationError(f"unknown static kind {self.kind!r}")
        if not self.parts:
            raise SceneValidationError(f"static element {self.id} has no geometry")


def _rect(x0: float, y0: float, x1: float, y1: float) -> Polygon:
    return ((x0, y0), (x1, y0), (x1, y1), (x0, y1))


def make_ground(elem_id: int) -> StaticElement:
    part = _rect(-WALL_THICKNESS, -WALL_THICKNESS, ARENA_WIDTH + WALL_THICKNESS, 0.0)
    return StaticElement(elem_id, "ground", (part,), position=(ARENA_WIDTH / 2, 0.0))


def make_left_wall(elem_id: int) -> StaticElement:
    part = _rect(-WALL_THICKNESS, 0.0, 0.0, ARENA_HEIGHT + WALL_THICKNESS)
    return StaticElement(elem_id, "left_wall", (part,), position=(0.0, ARENA_HEIGHT / 2))


def make_right_wall(elem_id: int) -> StaticElement:
    part = _rect(ARENA_WIDTH, 0.0, ARENA_WIDTH + WALL_THICKNESS, ARENA_HEIGHT + WALL_THICKNESS)
    return StaticElement(elem_id, "right_wall", (part,), position=(ARENA_WIDTH, ARENA_HEIGHT / 2))


def make_platform(elem_id: int, cx: float, top_y: float, half_length: float,
                  thickness: float = 0.15) -> StaticElement:
    part = _rect(cx - half_length, top_y - thickness, cx + half_length, top_y)
    return StaticElement(elem_id, "platform", (part,), position=(cx, top_y))


def make_ramp(elem_id: int, foot_x: float, base_y: float, length: float, height: float,
              facing: str = "right") -> StaticElement:
    """Right-triangle ramp; objects slide toward `facing`."""
    if facing == "right":
        tri = ((foot_x, base_y), (foot_x + length, base_y), (foot_x, base_y + height))
    else:
        tri = ((foot_x, base_y), (foot_x + length, base_y), (foot_x + length, base_y + height))
    return StaticElement(elem_id, "ramp", (tri,), position=(foot_x + length / 2, base_y),
                         orientation=math.atan2(height, length))


def make_basket(elem_id: int, cx: float, base_y: float, inner_width: float,
                wall_height: float, wall_thickness: float = 0.12) -> StaticElement:
    half = inner_width / 2
    bt = wall_thickness
    base = _rect(cx - half - bt, base_y, cx + half + bt, base_y + bt)
    left = _rect(cx - half - bt, base_y + bt, cx - half, base_y + bt + wall_height)
    right = _rect(cx + half, base_y + bt, cx + half + bt, base_y + bt + wall_height)
    interior = (cx - half, base_y + bt, cx + half, base_y + bt + wall_height)
    return StaticElement(elem_id, "basket", (base, left, right),
                         position=(cx, base_y), interior=interior)


def make_button(elem_id: int, cx: float, base_y: float) -> StaticElement:
    part = _rect(cx - 0.18, base_y, cx + 0.18, base_y + 0.08)
    return StaticElement(elem_id, "button", (part,), position=(cx, base_y))


def arena_elements(start_id: int = 0) -> list[StaticElement]:
    return [make_ground(start_id), make_left_wall(start_id + 1), make_right_wall(start_id + 2)]


@dataclass
class SceneSpec:
    scene_id: str
    layout_id: int
    statics: list[StaticElement]
    dynamics: list[DynamicObject]
    rng_seed: int = 0

    def dynamic_ids(self) -> list[int]:
        return [d.id for d in self.dynamics]

    def without(self, removed_id: int) -> "SceneSpec":
        """Copy of this scene with one dynamic object removed; ids are kept."""
        if removed_id not in self.dynamic_ids():
            raise ValueError(f"object {removed_id} is not a dynamic object of {self.scene_id}")
        return SceneSpec(
            scene_id=self.scene_id,
            layout_id=self.layout_id,
            statics=self.statics,
            dynamics=[d for d in self.dynamics if d.id != removed_id],
            rng_seed=self.rng_seed,
        )


def _pair_overlap(a: DynamicObject, b: DynamicObject) -> float:
    if a.shape == "circle" and b.shape == "circle":
        hit = geometry.intersect_circles(a.position, a.extent, b.position, b.extent)
    elif a.shape == "circle":
        hit = geometry.intersect_polygon_circle(b.world_vertices(), b.position, a.position, a.extent)
    elif b.shape == "circle":
        hit = geometry.intersect_polygon_circle(a.world_vertices(), a.position, b.position, b.extent)
    else:
        hit = geometry.intersect_polygons(a.world_vertices(), a.position, b.world_vertices(), b.position)
    return hit[1] if hit else 0.0


def _static_overlap(d: DynamicObject, s: StaticElement) -> float:
    worst = 0.0
    for part in s.parts:
        centroid = geometry.polygon_centroid(part)
        if d.shape == "circle":
            hit = geometry.intersect_polygon_circle(part, centroid, d.position, d.extent)
        else:
            hit = geometry.intersect_polygons(part, centroid, d.world_vertices(), d.position)
        if hit and hit[1] > worst:
            worst = hit[1]
    return worst


def validate_scene(scene: SceneSpec, slop: float = PLACEMENT_SLOP) -> None:
    """Check structural invariants; raises SceneValidationError on the first violation."""
    ids = [s.id for s in scene.statics] + [d.id for d in scene.dynamics]
    if len(ids) != len(set(ids)):
        raise SceneValidationError(f"{scene.scene_id}: duplicate object ids")
    kinds = [s.kind for s in scene.statics]
    for required in ("ground", "left_wall", "right_wall"):
        if required not in kinds:
            raise SceneValidationError(f"{scene.scene_id}: missing {required}")
    triples = [d.triple() for d in scene.dynamics]
    if len(triples) != len(set(triples)):
        raise SceneValidationError(f"{scene.scene_id}: duplicate (size,color,shape) triple")
    for d in scene.dynamics:
        x, y = d.position
        if not (0.0 <= x <= ARENA_WIDTH and 0.0 <= y <= ARENA_HEIGHT + WALL_THICKNESS):
            raise SceneValidationError(f"{scene.scene_id}: object {d.id} outside the arena")
    for i, a in enumerate(scene.dynamics):
        for b in scene.dynamics[i + 1:]:
            if _pair_overlap(a, b) > slop:
                raise SceneValidationError(
                    f"{scene.scene_id}: objects {a.id} and {b.id} interpenetrate")
        for s in scene.statics:
            if _static_overlap(a, s) > slop:
                raise SceneValidationError(
                    f"{scene.scene_id}: object {a.id} interpenetrates static {s.kind}")


def scene_to_dict(scene: SceneSpec) -> dict:
    return {
        "scene_id": scene.scene_id,
        "layout_id": scene.layout_id,
        "rng_seed": scene.rng_seed,
        "statics": [asdict(s) for s in scene.statics],
        "dynamics": [asdict(d) for d in scene.dynamics],
    }


def scene_from_dict(data: dict) -> SceneSpec:
    statics = []
    for s in data["statics"]:
        parts = tuple(tuple(tuple(p) for p in part) for part in s["parts"])
        interior = tuple(s["interior"]) if s.get("interior") else None
        statics.append(StaticElement(
            id=s["id"], kind=s["kind"], parts=parts,
            position=tuple(s["position"]), orientation=s["orientation"],
            interior=interior, friction=s["friction"], restitution=s["restitution"]))
    dynamics = []
    for d in data["dynamics"]:
        dynamics.append(DynamicObject(
            id=d["id"], shape=d["shape"], size=d["size"], color=d["color"],
            position=tuple(d["position"]), angle=d["angle"],
            linear_velocity=tuple(d["linear_velocity"]),
            angular_velocity=d["angular_velocity"], mass=d["mass"],
            restitution=d["restitution"], friction=d["friction"]))
    return SceneSpec(
        scene_id=data["scene_id"], layout_id=data["layout_id"],
        statics=statics, dynamics=dynamics, rng_seed=data["rng_seed"])

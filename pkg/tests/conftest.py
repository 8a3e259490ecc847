"""Shared micro-scene builders used across the test suite."""
from __future__ import annotations

import itertools

import pytest

from physqa.scene import (
    COLORS,
    SHAPES,
    SIZES,
    DynamicObject,
    SceneSpec,
    arena_elements,
    make_basket,
    make_platform,
    make_ramp,
)

_triple_pool = [
    (size, color, shape)
    for color, shape, size in itertools.product(COLORS, SHAPES, SIZES)
]


def build_scene(dynamics=(), extra_statics=(), scene_id="micro", layout_id=0, rng_seed=0):
    """Arena plus the given elements; dynamic ids start after the statics."""
    statics = arena_elements()
    next_id = 3
    for factory in extra_statics:
        statics.append(factory(next_id))
        next_id += 1
    objs = []
    for i, spec in enumerate(dynamics):
        spec = dict(spec)
        size, color, shape = spec.pop("triple", _triple_pool[i])
        objs.append(DynamicObject(
            id=next_id + i, shape=shape, size=size, color=color, **spec))
    return SceneSpec(scene_id=scene_id, layout_id=layout_id,
                     statics=statics, dynamics=objs, rng_seed=rng_seed)


def ball(x, y, vx=0.0, vy=0.0, size="small", color="red", **kw):
    return dict(position=(x, y), linear_velocity=(vx, vy),
                triple=(size, color, "circle"), **kw)


def box(x, y, vx=0.0, vy=0.0, size="small", color="blue", **kw):
    return dict(position=(x, y), linear_velocity=(vx, vy),
                triple=(size, color, "cube"), **kw)


@pytest.fixture
def statics_only_scene():
    return build_scene(scene_id="statics-only")


@pytest.fixture
def basket_factory():
    def factory(cx=7.0, base_y=0.0, inner_width=2.0, wall_height=1.2):
        def make(elem_id):
            return make_basket(elem_id, cx, base_y, inner_width, wall_height)
        return make
    return factory


def platform_at(cx, top_y, half_length):
    def make(elem_id):
        return make_platform(elem_id, cx, top_y, half_length)
    return make


def ramp_at(foot_x, base_y, length, height, facing="right"):
    def make(elem_id):
        return make_ramp(elem_id, foot_x, base_y, length, height, facing)
    return make


def basket_at(cx, base_y=0.0, inner_width=2.0, wall_height=1.2):
    def make(elem_id):
        return make_basket(elem_id, cx, base_y, inner_width, wall_height)
    return make


# Canonical relation micro-scenes: a platform with a basket below its right
# edge. Returns (scene, affector_id, patient_id); empirically verified to
# produce exactly the named relation.

def _platform_basket():
    return [platform_at(4.5, 3.0, 2.0), basket_at(7.3, 0.0, 2.0, 1.2)]


def cause_scene(scene_id="cause-micro"):
    # resting patient knocked off the platform into the basket by the striker
    scene = build_scene(
        [ball(3.0, 3.35, vx=2.0, color="red"),
         ball(6.2, 3.35, color="green")],
        extra_statics=_platform_basket(), scene_id=scene_id)
    return scene, scene.dynamics[0].id, scene.dynamics[1].id


def enable_scene(scene_id="enable-micro"):
    # patient slides toward the edge but friction stalls it; the affector
    # catches up and pushes it over
    scene = build_scene(
        [ball(2.5, 3.7, vx=3.5, size="large", color="red"),
         box(5.9, 3.35, vx=1.2, color="green")],
        extra_statics=_platform_basket(), scene_id=scene_id)
    return scene, scene.dynamics[0].id, scene.dynamics[1].id


def prevent_scene(scene_id="prevent-micro"):
    # heavy resting blocker stops the patient short of the edge
    scene = build_scene(
        [box(6.0, 3.7, size="large", color="red"),
         ball(3.0, 3.35, vx=2.2, color="green")],
        extra_statics=_platform_basket(), scene_id=scene_id)
    return scene, scene.dynamics[0].id, scene.dynamics[1].id

from __future__ import annotations

import pytest

from physqa.engine import simulate
from physqa.render import render_frames
from conftest import ball, build_scene


@pytest.fixture(scope="module")
def short_trace():
    scene = build_scene([ball(5.0, 0.35)])
    return scene, simulate(scene, duration=10.0)


def test_ten_second_trace_at_five_fps_gives_fifty_frames(short_trace):
    scene, trace = short_trace
    frames = render_frames(scene, trace, fps=5, resolution=64)
    assert len(frames) == 50


def test_frame_resolution(short_trace):
    scene, trace = short_trace
    frames = render_frames(scene, trace, fps=1, resolution=256)
    assert frames[0].size == (256, 256)


def test_static_scene_frames_identical():
    scene = build_scene()
    trace = simulate(scene, duration=2.0)
    frames = render_frames(scene, trace, fps=5, resolution=64)
    raw = [f.tobytes() for f in frames]
    assert all(b == raw[0] for b in raw)


def test_bad_arguments_rejected(short_trace):
    scene, trace = short_trace
    with pytest.raises(ValueError):
        render_frames(scene, trace, fps=0)
    with pytest.raises(ValueError):
        render_frames(scene, trace, fps=5, resolution=0)
    with pytest.raises(ValueError):
        render_frames(scene, trace, fps=7)  # 120 ticks/s not divisible


def test_dynamic_object_drawn_in_its_color(short_trace):
    scene, trace = short_trace
    frame = render_frames(scene, trace, fps=1, resolution=256)[0]
    # ball is red at (5, 0.35): sample the pixel at its center
    px = frame.getpixel((128, 256 -9))
    assert px == (173, 35, 35)

"""Rasterize traces to PNG frame sequences.

Static elements are drawn black, dynamic objects in their color; the
arena square maps onto the pixel square with y up.
"""
from __future__ import annotations

import math
from pathlib import Path

from PIL import Image, ImageDraw

from . import geometry
from .engine import SimulationTrace
from .scene import ARENA_HEIGHT, ARENA_WIDTH, SceneSpec, local_vertices

COLOR_RGB = {
    "gray": (87, 87, 87),
    "red": (173, 35, 35),
    "blue": (42, 75, 215),
    "green": (29, 105, 20),
    "brown": (129, 74, 25),
    "purple": (129, 38, 192),
    "cyan": (41, 208, 208),
    "yellow": (255, 238, 51),
}
BACKGROUND = (255, 255, 255)
STATIC_BLACK = (0, 0, 0)


def _mapper(resolution: int):
    sx = resolution / ARENA_WIDTH
    sy = resolution / ARENA_HEIGHT

    def to_pixel(p):
        return (p[0] * sx, resolution - p[1] * sy)

    return to_pixel


def render_frame(scene: SceneSpec, trace: SimulationTrace, tick: int,
                 resolution: int = 256) -> Image.Image:
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    img = Image.new("RGB", (resolution, resolution), BACKGROUND)
    draw = ImageDraw.Draw(img)
    to_pixel = _mapper(resolution)
    for elem in scene.statics:
        for part in elem.parts:
            draw.polygon([to_pixel(p) for p in part], fill=STATIC_BLACK)
    state = trace.states[tick]
    by_id = {obj.id: obj for obj in scene.dynamics}
    for obj_id, (x, y, angle, *_rest) in zip(trace.object_ids, state):
        obj = by_id[obj_id]
        rgb = COLOR_RGB[obj.color]
        if obj.shape == "circle":
            r = obj.extent
            x0, y0 = to_pixel((x - r, y + r))
            x1, y1 = to_pixel((x + r, y - r))
            draw.ellipse([x0, y0, x1, y1], fill=rgb)
        else:
            verts = local_vertices(obj.shape, obj.size)
            world = geometry.transform_points(verts, x, y, math.cos(angle), math.sin(angle))
            draw.polygon([to_pixel(p) for p in world], fill=rgb)
    return img


def render_frames(scene: SceneSpec, trace: SimulationTrace, fps: int = 5,
                  resolution: int = 256) -> list[Image.Image]:
    """Downsample the trace to `fps` and rasterize each sampled tick."""
    if fps <= 0:
        raise ValueError("fps must be positive")
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    tick_rate = 1.0 / trace.dt
    stride = round(tick_rate / fps)
    if stride < 1 or abs(tick_rate / fps - stride) > 1e-9:
        raise ValueError(f"fps {fps} does not divide the tick rate {tick_rate:g}")
    return [render_frame(scene, trace, tick, resolution)
            for tick in range(0, trace.tick_count, stride)]


def save_frames(frames: list[Image.Image], out_dir) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for i, frame in enumerate(frames):
        path = out / f"frame_{i:04d}.png"
        frame.save(path)
        paths.append(path)
    return paths

"""Deterministic fixed-timestep 2D rigid-body simulator.

Per tick: semi-implicit Euler velocity integration, contact detection
(SAT), sequential-impulse velocity solve with fixed iteration counts,
position integration, then a positional overlap-relaxation pass. No
parallelism, no unordered containers in the hot path: replaying the same
scene yields a bit-identical trace.

Once every dynamic body has been (near-)motionless for a quarter second
the remaining ticks are frozen copies of the last state with velocities
zeroed; a settled world cannot produce new contacts, so events are
unaffected.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

from . import geometry
from .scene import SceneSpec, validate_scene

ENGINE_VERSION = "1.0.0"

DT = 1.0 / 120.0
GRAVITY = (0.0, -9.8)
VELOCITY_ITERATIONS = 8
POSITION_ITERATIONS = 3
POSITION_BETA = 0.25
PENETRATION_SLOP = 0.0005
RESTITUTION_THRESHOLD = 1.0   # impacts slower than this don't bounce
ANGULAR_DAMPING = 0.05
MAX_SPEED = 100.0             # blow-up guard, m/s
SLEEP_LINEAR = 5.0e-4
SLEEP_ANGULAR = 5.0e-4
SLEEP_TICKS = 30
SPECULATIVE_MARGIN = 0.08     # approach clamping window; keeps impacts at the surface
TOUCH_DEPTH = -0.002          # pairs closer than this count as touching in contact records


class SimulationBlowupError(RuntimeError):
    """Non-finite or runaway state; the scene should be discarded."""


class _Body:
    __slots__ = ("elem_id", "is_static", "is_circle", "radius", "local_verts",
                 "px", "py", "angle", "vx", "vy", "w",
                 "inv_m", "inv_i", "restitution", "friction",
                 "world_verts", "aabb")

    def __init__(self, elem_id, is_static, is_circle, radius, local_verts,
                 px, py, angle, vx, vy, w, inv_m, inv_i, restitution, friction):
        self.elem_id = elem_id
        self.is_static = is_static
        self.is_circle = is_circle
        self.radius = radius
        self.local_verts = local_verts
        self.px = px
        self.py = py
        self.angle = angle
        self.vx = vx
        self.vy = vy
        self.w = w
        self.inv_m = inv_m
        self.inv_i = inv_i
        self.restitution = restitution
        self.friction = friction
        self.world_verts = None
        self.aabb = (0.0, 0.0, 0.0, 0.0)
        self.update_transform()

    def update_transform(self):
        if self.is_circle:
            r = self.radius
            self.aabb = (self.px - r, self.py - r, self.px + r, self.py + r)
        else:
            c = math.cos(self.angle)
            s = math.sin(self.angle)
            px = self.px
            py = self.py
            self.world_verts = tuple(
                (c * x - s * y + px, s * x + c * y + py) for x, y in self.local_verts)
            self.aabb = geometry.polygon_aabb(self.world_verts)


class _Contact:
    __slots__ = ("a", "b", "nx", "ny", "depth", "points", "approach",
                 "friction", "bias")

    def __init__(self, a, b, nx, ny, depth, points, approach, bias):
        self.a = a
        self.b = b
        self.nx = nx
        self.ny = ny
        self.depth = depth
        self.points = points          # list of [rax, ray, rbx, rby, nmass, tmass, jn, jt]
        self.approach = approach      # pre-solve relative normal approach speed
        self.friction = 0.0
        self.bias = bias              # target relative normal velocity


@dataclass
class SimulationTrace:
    scene_id: str
    tick_count: int
    dt: float
    object_ids: list[int]                       # dynamic object ids, state column order
    states: list[tuple]                          # per tick: tuple of (x, y, angle, vx, vy, w) per object
    contacts: list[tuple]                        # per tick: tuple of (a_id, b_id, nx, ny, approach, impulse)
    engine_version: str = ENGINE_VERSION
    removed_object_id: int | None = None

    @property
    def initial_state(self) -> tuple:
        return self.states[0]

    @property
    def final_state(self) -> tuple:
        return self.states[-1]

    def state_of(self, object_id: int, tick: int) -> tuple:
        return self.states[tick][self.object_ids.index(object_id)]


class World:
    """Mutable simulation state for one scene."""

    def __init__(self, scene: SceneSpec, dt: float = DT, gravity: tuple[float, float] = GRAVITY):
        self.scene = scene
        self.dt = dt
        self.gravity = gravity
        self.tick = 0
        self.statics: list[_Body] = []
        self.dynamics: list[_Body] = []
        self._calm_ticks = 0
        self.asleep = False
        for elem in scene.statics:
            for part in elem.parts:
                centroid = geometry.polygon_centroid(part)
                local = tuple((x - centroid[0], y - centroid[1]) for x, y in part)
                self.statics.append(_Body(
                    elem.id, True, False, 0.0, local,
                    centroid[0], centroid[1], 0.0, 0.0, 0.0, 0.0,
                    0.0, 0.0, elem.restitution, elem.friction))
        for obj in sorted(scene.dynamics, key=lambda d: d.id):
            from .scene import local_vertices, shape_inertia
            verts = local_vertices(obj.shape, obj.size)
            inertia = shape_inertia(obj.shape, obj.size, obj.mass)
            self.dynamics.append(_Body(
                obj.id, False, obj.shape == "circle", obj.extent, verts,
                obj.position[0], obj.position[1], obj.angle,
                obj.linear_velocity[0], obj.linear_velocity[1], obj.angular_velocity,
                1.0 / obj.mass, 1.0 / inertia, obj.restitution, obj.friction))

    def snapshot(self) -> tuple:
        return tuple((b.px, b.py, b.angle, b.vx, b.vy, b.w) for b in self.dynamics)

    def _manifold(self, a: _Body, b: _Body, margin: float = 0.0):
        """Narrow phase; returns (nx, ny, depth, contact_points) or None."""
        if a.is_circle and b.is_circle:
            hit = geometry.intersect_circles((a.px, a.py), a.radius, (b.px, b.py), b.radius, margin)
            if hit is None:
                return None
            (nx, ny), depth = hit
            px = a.px + nx * (a.radius - depth * 0.5)
            py = a.py + ny * (a.radius - depth * 0.5)
            return nx, ny, depth, ((px, py),)
        if a.is_circle:
            hit = geometry.intersect_polygon_circle(b.world_verts, (b.px, b.py), (a.px, a.py), a.radius, margin)
            if hit is None:
                return None
            (nx, ny), depth = hit  # normal points poly -> circle, i.e. b -> a
            point = geometry.contact_point_polygon_circle(b.world_verts, (a.px, a.py))
            return -nx, -ny, depth, (point,)
        if b.is_circle:
            hit = geometry.intersect_polygon_circle(a.world_verts, (a.px, a.py), (b.px, b.py), b.radius, margin)
            if hit is None:
                return None
            (nx, ny), depth = hit
            point = geometry.contact_point_polygon_circle(a.world_verts, (b.px, b.py))
            return nx, ny, depth, (point,)
        hit = geometry.intersect_polygons(a.world_verts, (a.px, a.py), b.world_verts, (b.px, b.py), margin)
        if hit is None:
            return None
        (nx, ny), depth = hit
        points = geometry.contact_points_polygons(a.world_verts, b.world_verts)
        return nx, ny, depth, points

    def _detect(self) -> list[_Contact]:
        contacts = []
        dynamics = self.dynamics
        nd = len(dynamics)
        m = SPECULATIVE_MARGIN
        for i in range(nd):
            a = dynamics[i]
            a0, a1, a2, a3 = a.aabb
            a0 -= m
            a1 -= m
            a2 += m
            a3 += m
            for j in range(i + 1, nd):
                b = dynamics[j]
                bb = b.aabb
                if a0 <= bb[2] and bb[0] <= a2 and a1 <= bb[3] and bb[1] <= a3:
                    self._add_contact(contacts, a, b)
            for s in self.statics:
                bb = s.aabb
                if a0 <= bb[2] and bb[0] <= a2 and a1 <= bb[3] and bb[1] <= a3:
                    self._add_contact(contacts, a, s)
        return contacts

    def _add_contact(self, contacts: list, a: _Body, b: _Body):
        m = self._manifold(a, b, SPECULATIVE_MARGIN)
        if m is None:
            return
        nx, ny, depth, points = m
        if not points:
            return
        restitution = max(a.restitution, b.restitution)
        # pre-solve approach speed at the fastest contact point
        approach = 0.0
        pts = []
        for px, py in points:
            rax = px - a.px
            ray = py - a.py
            rbx = px - b.px
            rby = py - b.py
            dvx = (b.vx - b.w * rby) - (a.vx - a.w * ray)
            dvy = (b.vy + b.w * rbx) - (a.vy + a.w * rax)
            vn = dvx * nx + dvy * ny
            if -vn > approach:
                approach = -vn
            rn_a = rax * ny - ray * nx
            rn_b = rbx * ny - rby * nx
            k = a.inv_m + b.inv_m + rn_a * rn_a * a.inv_i + rn_b * rn_b * b.inv_i
            tx, ty = -ny, nx
            rt_a = rax * ty - ray * tx
            rt_b = rbx * ty - rby * tx
            kt = a.inv_m + b.inv_m + rt_a * rt_a * a.inv_i + rt_b * rt_b * b.inv_i
            pts.append([rax, ray, rbx, rby,
                        1.0 / k if k > 0.0 else 0.0,
                        1.0 / kt if kt > 0.0 else 0.0,
                        0.0, 0.0])
        # target normal velocity: restitution bounce for real impacts, a
        # speculative gap-closing clamp otherwise
        if depth > 0.0:
            bias = restitution * approach if approach > RESTITUTION_THRESHOLD else 0.0
        else:
            gap = -depth
            engages = approach * self.dt >= gap
            if engages and approach > RESTITUTION_THRESHOLD:
                bias = restitution * approach
            else:
                bias = -gap / self.dt
        contact = _Contact(a, b, nx, ny, depth, pts, approach, bias)
        contact.friction = math.sqrt(a.friction * b.friction)
        contacts.append(contact)

    def _solve_velocities(self, contacts: list[_Contact]):
        for _ in range(VELOCITY_ITERATIONS):
            worst = 0.0
            for c in contacts:
                a = c.a
                b = c.b
                nx = c.nx
                ny = c.ny
                tx = -ny
                ty = nx
                mu = c.friction
                bias = c.bias
                a_vx = a.vx
                a_vy = a.vy
                a_w = a.w
                a_im = a.inv_m
                a_ii = a.inv_i
                b_vx = b.vx
                b_vy = b.vy
                b_w = b.w
                b_im = b.inv_m
                b_ii = b.inv_i
                for p in c.points:
                    rax, ray, rbx, rby, nmass, tmass, jn, jt = p
                    dvx = (b_vx - b_w * rby) - (a_vx - a_w * ray)
                    dvy = (b_vy + b_w * rbx) - (a_vy + a_w * rax)
                    vn = dvx * nx + dvy * ny
                    djn = nmass * (bias - vn)
                    new_jn = jn + djn
                    if new_jn < 0.0:
                        new_jn = 0.0
                    djn = new_jn - jn
                    p[6] = new_jn
                    pnx = djn * nx
                    pny = djn * ny
                    a_vx -= pnx * a_im
                    a_vy -= pny * a_im
                    a_w -= (rax * pny - ray * pnx) * a_ii
                    b_vx += pnx * b_im
                    b_vy += pny * b_im
                    b_w += (rbx * pny - rby * pnx) * b_ii
                    # friction against the updated velocities
                    dvx = (b_vx - b_w * rby) - (a_vx - a_w * ray)
                    dvy = (b_vy + b_w * rbx) - (a_vy + a_w * rax)
                    vt = dvx * tx + dvy * ty
                    djt = -tmass * vt
                    max_jt = mu * new_jn
                    new_jt = jt + djt
                    if new_jt > max_jt:
                        new_jt = max_jt
                    elif new_jt < -max_jt:
                        new_jt = -max_jt
                    djt = new_jt - jt
                    p[7] = new_jt
                    ptx = djt * tx
                    pty = djt * ty
                    a_vx -= ptx * a_im
                    a_vy -= pty * a_im
                    a_w -= (rax * pty - ray * ptx) * a_ii
                    b_vx += ptx * b_im
                    b_vy += pty * b_im
                    b_w += (rbx * pty - rby * ptx) * b_ii
                    moved = abs(djn) + abs(djt)
                    if moved > worst:
                        worst = moved
                a.vx = a_vx
                a.vy = a_vy
                a.w = a_w
                b.vx = b_vx
                b.vy = b_vy
                b.w = b_w
            if worst < 1e-9:
                break

    def _correct_positions(self, contacts: list[_Contact]):
        # only pairs that penetrated beyond the slop at detection can still
        # be in excess after the velocity solve
        deep = [c for c in contacts if c.depth > PENETRATION_SLOP]
        if not deep:
            return
        for _ in range(POSITION_ITERATIONS):
            corrected = False
            for c in deep:
                a = c.a
                b = c.b
                m = self._manifold(a, b)
                if m is None:
                    continue
                nx, ny, depth, _pts = m
                excess = depth - PENETRATION_SLOP
                if excess <= 0.0:
                    continue
                total = a.inv_m + b.inv_m
                if total <= 0.0:
                    continue
                corrected = True
                push = POSITION_BETA * excess / total
                if not a.is_static:
                    a.px -= nx * push * a.inv_m
                    a.py -= ny * push * a.inv_m
                    a.update_transform()
                if not b.is_static:
                    b.px += nx * push * b.inv_m
                    b.py += ny * push * b.inv_m
                    b.update_transform()
            if not corrected:
                break

    def step(self, dt: float) -> list[tuple]:
        """Advance one tick; returns the tick's contact records."""
        if abs(dt - self.dt) > 1e-12:
            raise ValueError(f"step dt {dt} does not match the configured timestep {self.dt}")
        if self.asleep:
            self.tick += 1
            return self._sleep_records()
        gx, gy = self.gravity
        damp = 1.0 / (1.0 + dt * ANGULAR_DAMPING)
        for body in self.dynamics:
            body.vx += gx * dt
            body.vy += gy * dt
            body.w *= damp
            speed2 = body.vx * body.vx + body.vy * body.vy
            if not (speed2 < MAX_SPEED * MAX_SPEED):
                raise SimulationBlowupError(
                    f"{self.scene.scene_id}: object {body.elem_id} exceeded "
                    f"{MAX_SPEED} m/s at tick {self.tick}")
        contacts = self._detect()
        contacts.sort(key=_contact_order)
        self._solve_velocities(contacts)
        for body in self.dynamics:
            body.px += body.vx * dt
            body.py += body.vy * dt
            body.angle += body.w * dt
            body.update_transform()
        self._correct_positions(contacts)
        self.tick += 1
        self._update_sleep()
        return self._records(contacts)

    def _update_sleep(self):
        for body in self.dynamics:
            if (body.vx * body.vx + body.vy * body.vy > SLEEP_LINEAR * SLEEP_LINEAR
                    or abs(body.w) > SLEEP_ANGULAR):
                self._calm_ticks = 0
                return
        self._calm_ticks += 1
        if self._calm_ticks >= SLEEP_TICKS:
            self.asleep = True
            self._sleep_contacts = self._detect()
            self._sleep_contacts.sort(key=_contact_order)
            for body in self.dynamics:
                body.vx = 0.0
                body.vy = 0.0
                body.w = 0.0

    def _sleep_records(self) -> list[tuple]:
        return self._merge_records(self._sleep_contacts, zero=True)

    def _records(self, contacts: list[_Contact]) -> list[tuple]:
        return self._merge_records(contacts)

    def _merge_records(self, contacts, zero: bool = False) -> list[tuple]:
        """One record per touching element pair; multi-part statics collapse to one.

        Speculative (separated) contacts only count when the solver actually
        intervened.
        """
        merged: dict[tuple[int, int], list] = {}
        for c in contacts:
            if c.depth < TOUCH_DEPTH and sum(p[6] for p in c.points) <= 1e-9:
                continue
            ia, ib = c.a.elem_id, c.b.elem_id
            if ia > ib:
                key = (ib, ia)
                nx, ny = -c.nx, -c.ny
            else:
                key = (ia, ib)
                nx, ny = c.nx, c.ny
            approach = 0.0 if zero else c.approach
            impulse = 0.0 if zero else sum(p[6] for p in c.points)
            rec = merged.get(key)
            if rec is None:
                merged[key] = [nx, ny, approach, impulse]
            else:
                if approach > rec[2]:
                    rec[0], rec[1], rec[2] = nx, ny, approach
                rec[3] += impulse
        return [(a, b, r[0], r[1], r[2], r[3])
                for (a, b), r in sorted(merged.items())]

    def initial_contact_records(self) -> list[tuple]:
        contacts = self._detect()
        contacts.sort(key=_contact_order)
        return self._merge_records(contacts, zero=False)


def _contact_order(c: _Contact) -> tuple:
    a, b = c.a.elem_id, c.b.elem_id
    return (a, b, c.a.px, c.b.px) if a <= b else (b, a, c.b.px, c.a.px)


def simulate(scene: SceneSpec, duration: float = 10.0, dt: float = DT,
             validate: bool = True, gravity: tuple[float, float] = GRAVITY) -> SimulationTrace:
    """Run a scene for `duration` seconds and record every tick."""
    if validate:
        validate_scene(scene)
    tick_count = round(duration / dt)
    world = World(scene, dt, gravity)
    states = [world.snapshot()]
    contacts = [tuple(world.initial_contact_records())]
    for _ in range(tick_count - 1):
        recs = world.step(dt)
        states.append(world.snapshot())
        contacts.append(tuple(recs))
    return SimulationTrace(
        scene_id=scene.scene_id,
        tick_count=tick_count,
        dt=dt,
        object_ids=[b.elem_id for b in world.dynamics],
        states=states,
        contacts=contacts,
    )


def write_trace_jsonl(trace: SimulationTrace, path) -> None:
    """One JSON record per tick after a header line; floats at micrometer scale."""
    with open(path, "w") as fh:
        header = {
            "scene_id": trace.scene_id,
            "dt": trace.dt,
            "tick_count": trace.tick_count,
            "engine_version": trace.engine_version,
            "object_ids": trace.object_ids,
        }
        if trace.removed_object_id is not None:
            header["removed_object_id"] = trace.removed_object_id
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for t in range(trace.tick_count):
            row = {
                "t": t,
                "objects": [[round(v, 6) for v in obj] for obj in trace.states[t]],
                "contacts": [[rec[0], rec[1]] + [round(v, 6) for v in rec[2:]]
                             for rec in trace.contacts[t]],
            }
            fh.write(json.dumps(row, sort_keys=True) + "\n")


def read_trace_header(path) -> dict:
    with open(path) as fh:
        return json.loads(fh.readline())

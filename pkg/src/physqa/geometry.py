"""2D vector and convex-polygon helpers for the rigid-body engine.

Vectors are plain (x, y) float tuples and polygons are CCW vertex tuples;
everything here is allocation-light because it sits inside the per-tick
contact loop.
"""
from __future__ import annotations

import math

Vec = tuple[float, float]
Polygon = tuple[Vec, ...]


def dot(a: Vec, b: Vec) -> float:
    return a[0] * b[0] + a[1] * b[1]


def sub(a: Vec, b: Vec) -> Vec:
    return (a[0] - b[0], a[1] - b[1])


def add(a: Vec, b: Vec) -> Vec:
    return (a[0] + b[0], a[1] + b[1])


def scale(a: Vec, s: float) -> Vec:
    return (a[0] * s, a[1] * s)


def cross(a: Vec, b: Vec) -> float:
    return a[0] * b[1] - a[1] * b[0]


def perp(a: Vec) -> Vec:
    """Counter-clockwise perpendicular."""
    return (-a[1], a[0])


def length(a: Vec) -> float:
    return math.sqrt(a[0] * a[0] + a[1] * a[1])


def normalize(a: Vec) -> Vec:
    n = math.sqrt(a[0] * a[0] + a[1] * a[1])
    if n < 1e-12:
        return (0.0, 1.0)
    return (a[0] / n, a[1] / n)


def transform_points(points: Polygon, px: float, py: float, c: float, s: float) -> Polygon:
    """Rotate local points by (cos, sin) and translate to (px, py)."""
    return tuple((c * x - s * y + px, s * x + c * y + py) for x, y in points)


def polygon_aabb(points: Polygon) -> tuple[float, float, float, float]:
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    return (min(xs), min(ys), max(xs), max(ys))


def polygon_area(points: Polygon) -> float:
    a = 0.0
    n = len(points)
    for i in range(n):
        x0, y0 = points[i]
        x1, y1 = points[(i + 1) % n]
        a += x0 * y1 - x1 * y0
    return 0.5 * a


def polygon_centroid(points: Polygon) -> Vec:
    a = 0.0
    cx = 0.0
    cy = 0.0
    n = len(points)
    for i in range(n):
        x0, y0 = points[i]
        x1, y1 = points[(i + 1) % n]
        w = x0 * y1 - x1 * y0
        a += w
        cx += (x0 + x1) * w
        cy += (y0 + y1) * w
    a *= 0.5
    return (cx / (6.0 * a), cy / (6.0 * a))


def polygon_inertia(points: Polygon, mass: float) -> float:
    """Moment of inertia about the centroid for a uniform convex polygon."""
    cx, cy = polygon_centroid(points)
    shifted = [(x - cx, y - cy) for x, y in points]
    num = 0.0
    den = 0.0
    n = len(shifted)
    for i in range(n):
        x0, y0 = shifted[i]
        x1, y1 = shifted[(i + 1) % n]
        c = x0 * y1 - x1 * y0
        num += c * (x0 * x0 + x0 * x1 + x1 * x1 + y0 * y0 + y0 * y1 + y1 * y1)
        den += c
    return mass * num / (6.0 * den)


def _project(points: Polygon, ax: float, ay: float) -> tuple[float, float]:
    lo = hi = points[0][0] * ax + points[0][1] * ay
    for x, y in points:
        d = x * ax + y * ay
        if d < lo:
            lo = d
        elif d > hi:
            hi = d
    return lo, hi


def intersect_circles(pa: Vec, ra: float, pb: Vec, rb: float, margin: float = 0.0):
    """Overlap test; returns (normal a->b, depth) or None.

    With a positive margin, near misses are reported with a negative depth
    (the gap) down to -margin, for speculative contacts.
    """
    dx = pb[0] - pa[0]
    dy = pb[1] - pa[1]
    rsum = ra + rb
    reach = rsum + margin
    d2 = dx * dx + dy * dy
    if d2 >= reach * reach:
        return None
    d = math.sqrt(d2)
    if d < 1e-12:
        # coincident centers: deterministic fallback normal
        return (0.0, 1.0), rsum
    return (dx / d, dy / d), rsum - d


def intersect_polygons(va: Polygon, ca: Vec, vb: Polygon, cb: Vec, margin: float = 0.0):
    """SAT test for convex polygons; returns (normal a->b, depth) or None.

    Depth is signed: positive when overlapping (minimum translation along
    the returned axis), negative down to -margin when separated.
    """
    best_depth = math.inf
    best_nx = 0.0
    best_ny = 0.0
    for verts in (va, vb):
        n = len(verts)
        for i in range(n):
            x0, y0 = verts[i]
            x1, y1 = verts[(i + 1) % n]
            ax = y0 - y1
            ay = x1 - x0
            inv = 1.0 / math.sqrt(ax * ax + ay * ay)
            ax *= inv
            ay *= inv
            lo_a, hi_a = _project(va, ax, ay)
            lo_b, hi_b = _project(vb, ax, ay)
            depth = min(hi_b - lo_a, hi_a - lo_b)
            if depth <= -margin:
                return None
            if depth < best_depth:
                best_depth = depth
                best_nx = ax
                best_ny = ay
    if (cb[0] - ca[0]) * best_nx + (cb[1] - ca[1]) * best_ny < 0.0:
        best_nx = -best_nx
        best_ny = -best_ny
    return (best_nx, best_ny), best_depth


def intersect_polygon_circle(verts: Polygon, pc: Vec, center: Vec, radius: float,
                             margin: float = 0.0):
    """SAT test for polygon vs circle; returns (normal poly->circle, depth) or None.

    Signed depth as in intersect_polygons.
    """
    best_depth = math.inf
    best_nx = 0.0
    best_ny = 0.0
    n = len(verts)
    for i in range(n):
        x0, y0 = verts[i]
        x1, y1 = verts[(i + 1) % n]
        ax = y0 - y1
        ay = x1 - x0
        inv = 1.0 / math.sqrt(ax * ax + ay * ay)
        ax *= inv
        ay *= inv
        lo_a, hi_a = _project(verts, ax, ay)
        c = center[0] * ax + center[1] * ay
        lo_b, hi_b = c - radius, c + radius
        depth = min(hi_b - lo_a, hi_a - lo_b)
        if depth <= -margin:
            return None
        if depth < best_depth:
            best_depth = depth
            best_nx = ax
            best_ny = ay
    # axis from the closest vertex to the circle center catches corner contacts
    cx, cy = center
    best_v = verts[0]
    best_d2 = math.inf
    for x, y in verts:
        d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy)
        if d2 < best_d2:
            best_d2 = d2
            best_v = (x, y)
    ax = cx - best_v[0]
    ay = cy - best_v[1]
    alen = math.sqrt(ax * ax + ay * ay)
    if alen > 1e-12:
        ax /= alen
        ay /= alen
        lo_a, hi_a = _project(verts, ax, ay)
        c = cx * ax + cy * ay
        lo_b, hi_b = c - radius, c + radius
        depth = min(hi_b - lo_a, hi_a - lo_b)
        if depth <= -margin:
            return None
        if depth < best_depth:
            best_depth = depth
            best_nx = ax
            best_ny = ay
    if (center[0] - pc[0]) * best_nx + (center[1] - pc[1]) * best_ny < 0.0:
        best_nx = -best_nx
        best_ny = -best_ny
    return (best_nx, best_ny), best_depth


def _closest_on_segment(px: float, py: float, ax: float, ay: float, bx: float, by: float):
    abx = bx - ax
    aby = by - ay
    denom = abx * abx + aby * aby
    if denom < 1e-12:
        t = 0.0
    else:
        t = ((px - ax) * abx + (py - ay) * aby) / denom
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
    cx = ax + abx * t
    cy = ay + aby * t
    dx = px - cx
    dy = py - cy
    return (cx, cy), dx * dx + dy * dy


CONTACT_MATCH_TOL = 2e-3  # support points within this distance of the deepest one count


def contact_points_polygons(va: Polygon, vb: Polygon) -> tuple[Vec, ...]:
    """Up to two support points between two overlapping polygons.

    Near-flat contacts (box resting on a platform) need both corners in the
    manifold even when one is infinitesimally deeper, otherwise the solver
    rocks the body corner to corner.
    """
    candidates: list[tuple[float, Vec]] = []
    min_d = math.inf
    for verts, other in ((va, vb), (vb, va)):
        n = len(other)
        for px, py in verts:
            best_d2 = math.inf
            best_point = None
            for j in range(n):
                x0, y0 = other[j]
                x1, y1 = other[(j + 1) % n]
                point, d2 = _closest_on_segment(px, py, x0, y0, x1, y1)
                if d2 < best_d2:
                    best_d2 = d2
                    best_point = point
            d = math.sqrt(best_d2)
            candidates.append((d, best_point))
            if d < min_d:
                min_d = d
    picked: list[Vec] = []
    for d, point in candidates:
        if d > min_d + CONTACT_MATCH_TOL:
            continue
        qx, qy = point
        if any((bx - qx) ** 2 + (by - qy) ** 2 < 1e-6 for bx, by in picked):
            continue
        picked.append(point)
        if len(picked) == 2:
            break
    return tuple(picked)


def contact_point_polygon_circle(verts: Polygon, center: Vec) -> Vec:
    cx, cy = center
    best_point = verts[0]
    min_d2 = math.inf
    n = len(verts)
    for j in range(n):
        x0, y0 = verts[j]
        x1, y1 = verts[(j + 1) % n]
        point, d2 = _closest_on_segment(cx, cy, x0, y0, x1, y1)
        if d2 < min_d2:
            min_d2 = d2
            best_point = point
    return best_point


def point_in_aabb(p: Vec, box: tuple[float, float, float, float]) -> bool:
    return box[0] <= p[0] <= box[2] and box[1] <= p[1] <= box[3]

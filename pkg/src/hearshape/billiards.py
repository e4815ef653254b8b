"""Short closed billiard orbits in trapezoids.

Two orbit classes compete for the shortest closed geodesic of an acute
trapezoid: the bouncing-ball family between the parallel sides (length
2h) and 3-bounce (triangular) orbits. The second class is searched
exhaustively here.

For a fixed triple of sides the perimeter of an inscribed triangle with
one vertex per side is a sum of norms of affine maps of the three
arc-length fractions, hence convex on the unit cube. A triangular orbit
is an interior critical point of that function and therefore its global
minimum, so minimising over each of the four side triples finds every
triangular orbit there is.
"""
from __future__ import annotations

import itertools
import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .polygon import Polygon, TrapezoidParams

DEFECT_TOL = 1e-6


class LemmaViolation(RuntimeError):
    """An orbit shorter than the bouncing ball was found in an acute trapezoid."""


@dataclass(frozen=True)
class OrbitCertificate:
    kind: str  # "bouncing_ball" or "triangle_candidate"
    length: float
    bounce_points: tuple
    reflection_defects: tuple
    sides: tuple = ()

    def __post_init__(self):
        if self.kind not in ("bouncing_ball", "triangle_candidate"):
            raise ValueError(f"unknown orbit kind {self.kind!r}")
        if not self.length > 0:
            raise ValueError("orbit length must be positive")

    @property
    def admissible(self) -> bool:
        return max(self.reflection_defects) < DEFECT_TOL

    def to_json(self) -> str:
        return json.dumps({
            "kind": self.kind,
            "length": self.length,
            "bounce_points": [list(map(float, p)) for p in self.bounce_points],
            "defects": list(map(float, self.reflection_defects)),
        }, indent=2)


def reflection_defect(point, prev_point, next_point, tangent) -> float:
    """|angle of incidence - angle of reflection| at ``point`` on a side with direction ``tangent``."""
    p = np.asarray(point, float)
    tau = np.asarray(tangent, float) / np.linalg.norm(tangent)
    uq = np.asarray(prev_point, float) - p
    ur = np.asarray(next_point, float) - p
    uq /= np.linalg.norm(uq)
    ur /= np.linalg.norm(ur)
    return abs(math.acos(np.clip(tau @ uq, -1, 1)) - math.acos(np.clip(-tau @ ur, -1, 1)))


def incidence_angle(point, other, tangent) -> float:
    """Angle between the chord to ``other`` and the side direction."""
    u = np.asarray(other, float) - np.asarray(point, float)
    tau = np.asarray(tangent, float)
    return math.acos(np.clip(u @ tau / np.linalg.norm(u) / np.linalg.norm(tau), -1, 1))


def _require_trapezoid(t) -> None:
    if not isinstance(t, TrapezoidParams):
        raise TypeError(f"expected TrapezoidParams, got {type(t).__name__}")


def _require_acute(t: TrapezoidParams) -> None:
    if not t.is_acute:
        raise ValueError(f"not an acute trapezoid: alpha + beta = {t.alpha + t.beta} >= pi/2")


def bouncing_ball_orbit(t: TrapezoidParams) -> OrbitCertificate:
    """Perpendicular 2-bounce orbit through the middle of the top side."""
    _require_trapezoid(t)
    _require_acute(t)
    v = t.polygon().vertices
    x = 0.5 * (v[2, 0] + v[3, 0])
    bottom, top = (x, 0.0), (x, t.h)
    d_bottom = reflection_defect(bottom, top, top, v[1] - v[0])
    d_top = reflection_defect(top, bottom, bottom, v[3] - v[2])
    return OrbitCertificate("bouncing_ball", 2 * t.h, (bottom, top), (d_bottom, d_top), (0, 2))


def bouncing_ball_length(t: TrapezoidParams) -> float:
    """Length 2h of the bouncing-ball orbits between the parallel sides."""
    return bouncing_ball_orbit(t).length


def _segment_min(a, d, q, r) -> float:
    """Fraction s in [0, 1] minimising |a + s d - q| + |a + s d - r| (exact)."""
    n = np.array([-d[1], d[0]])
    dq, dr = (q - a) @ n, (r - a) @ n
    if dq * dr > 0:  # same side: reflect r through the line
        r = r - 2 * dr / (n @ n) * n
        dr = -dr
    denom = dq - dr
    dd = d @ d
    if abs(denom) < 1e-300:
        # both points on the line: any s between their projections is optimal
        s = 0.5 * ((q - a) @ d + (r - a) @ d) / dd
    else:
        lam = dq / denom
        x = q + lam * (r - q)
        s = (x - a) @ d / dd
    return float(min(1.0, max(0.0, s)))


def _triangle_perimeter(pts) -> float:
    return sum(float(np.linalg.norm(pts[i] - pts[(i + 1) % 3])) for i in range(3))


def _minimise_triple(starts, dirs, resolution: int, max_sweeps: int = 20000):
    grid = (np.arange(resolution) + 0.5) / resolution
    s1, s2, s3 = np.meshgrid(grid, grid, grid, indexing="ij")
    pts = [starts[k] + sk[..., None] * dirs[k] for k, sk in enumerate((s1, s2, s3))]
    per = sum(np.linalg.norm(pts[k] - pts[(k + 1) % 3], axis=-1) for k in range(3))
    i = np.unravel_index(np.argmin(per), per.shape)
    s = np.array([grid[i[0]], grid[i[1]], grid[i[2]]])
    for _ in range(max_sweeps):
        old = s.copy()
        for k in range(3):
            q = starts[(k - 1) % 3] + s[(k - 1) % 3] * dirs[(k - 1) % 3]
            r = starts[(k + 1) % 3] + s[(k + 1) % 3] * dirs[(k + 1) % 3]
            s[k] = _segment_min(starts[k], dirs[k], q, r)
        if np.max(np.abs(s - old)) < 1e-15:
            break
    pts = [starts[k] + s[k] * dirs[k] for k in range(3)]
    return s, pts, _triangle_perimeter(pts)


def triangular_orbit_candidates(t: TrapezoidParams, resolution: int = 64) -> list[OrbitCertificate]:
    """Minimal inscribed triangle for each of the four side triples.

    Each candidate carries its reflection-law defects; a candidate with a
    vertex pinned at a corner of the trapezoid gets an infinite defect.
    """
    _require_trapezoid(t)
    if resolution < 32:
        raise ValueError("resolution must be >= 32")
    poly: Polygon = t.polygon()
    v = poly.vertices
    out = []
    for sides in itertools.combinations(range(4), 3):
        starts = [v[k] for k in sides]
        dirs = [v[(k + 1) % 4] - v[k] for k in sides]
        s, pts, length = _minimise_triple(starts, dirs, resolution)
        defects = []
        for k in range(3):
            if not 1e-12 < s[k] < 1 - 1e-12:
                defects.append(math.inf)
            else:
                defects.append(reflection_defect(pts[k], pts[(k - 1) % 3], pts[(k + 1) % 3], dirs[k]))
        out.append(OrbitCertificate("triangle_candidate", length,
                                    tuple(tuple(map(float, p)) for p in pts), tuple(defects), sides))
    out.sort(key=lambda c: (c.length, c.sides))
    return out


def search_triangular_orbits(t: TrapezoidParams, resolution: int = 64) -> OrbitCertificate | None:
    """Shortest admissible triangular orbit shorter than 2h, or None.

    For acute trapezoids the result must be None. Other trapezoids are
    searched as well, but without that guarantee (a warning is issued).
    """
    _require_trapezoid(t)
    if not t.is_acute:
        warnings.warn("alpha + beta >= pi/2: the shortest-orbit lemma does not apply", stacklevel=2)
    bound = 2 * t.h
    for cand in triangular_orbit_candidates(t, resolution):
        if cand.admissible and cand.length < bound:
            return cand
    return None


def shortest_closed_geodesic(t: TrapezoidParams, resolution: int = 64) -> tuple[float, OrbitCertificate]:
    """Length 2h and the bouncing-ball certificate, audited against triangular orbits."""
    _require_trapezoid(t)
    _require_acute(t)
    audit = search_triangular_orbits(t, resolution)
    if audit is not None:
        raise LemmaViolation(f"triangular orbit of length {audit.length} < 2h = {2 * t.h}")
    cert = bouncing_ball_orbit(t)
    return cert.length, cert

"""Planar polygons: construction, measurement, convexity and congruence.

All polygons are stored counter-clockwise. Geometric predicates use an
absolute tolerance of ``GEOM_TOL`` on unit-scale data.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import linprog

GEOM_TOL = 1e-9


class PolygonError(ValueError):
    """Raised when vertex data does not describe a valid simple polygon."""


def _signed_area(v: np.ndarray) -> float:
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _segments_intersect(p1, p2, q1, q2) -> bool:
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1 = orient(q1, q2, p1)
    d2 = orient(q1, q2, p2)
    d3 = orient(p1, p2, q1)
    d4 = orient(p1, p2, q2)
    if ((d1 > GEOM_TOL and d2 < -GEOM_TOL) or (d1 < -GEOM_TOL and d2 > GEOM_TOL)) and (
        (d3 > GEOM_TOL and d4 < -GEOM_TOL) or (d3 < -GEOM_TOL and d4 > GEOM_TOL)
    ):
        return True

    def on_segment(a, b, c, d):
        if abs(d) > GEOM_TOL:
            return False
        return (min(a[0], b[0]) - GEOM_TOL <= c[0] <= max(a[0], b[0]) + GEOM_TOL
                and min(a[1], b[1]) - GEOM_TOL <= c[1] <= max(a[1], b[1]) + GEOM_TOL)

    return (on_segment(q1, q2, p1, d1) or on_segment(q1, q2, p2, d2)
            or on_segment(p1, p2, q1, d3) or on_segment(p1, p2, q2, d4))


@dataclass(frozen=True)
class Polygon:
    """Simple planar polygon with counter-clockwise vertices.

    Clockwise input is reversed. Construction rejects fewer than three
    vertices, duplicate vertices, three consecutive collinear vertices and
    self-intersections.
    """

    vertices: np.ndarray

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2:
            raise PolygonError("vertices must be an (n, 2) array")
        n = len(v)
        if n < 3:
            raise PolygonError(f"a polygon needs at least 3 vertices, got {n}")
        if not np.all(np.isfinite(v)):
            raise PolygonError("vertices must be finite")
        edges = np.roll(v, -1, axis=0) - v
        lengths = np.hypot(edges[:, 0], edges[:, 1])
        if np.any(lengths <= GEOM_TOL):
            i = int(np.argmin(lengths))
            raise PolygonError(f"duplicate vertices at indices {i} and {(i + 1) % n}")
        area = _signed_area(v)
        if abs(area) <= GEOM_TOL:
            raise PolygonError("degenerate polygon: zero area")
        if area < 0:
            v = v[::-1].copy()
            edges = np.roll(v, -1, axis=0) - v
            lengths = np.hypot(edges[:, 0], edges[:, 1])
        prev = np.roll(edges, 1, axis=0)
        cross = prev[:, 0] * edges[:, 1] - prev[:, 1] * edges[:, 0]
        sines = cross / (np.roll(lengths, 1) * lengths)
        bad = np.flatnonzero(np.abs(sines) <= GEOM_TOL)
        if bad.size:
            raise PolygonError(f"collinear consecutive vertices at index {int(bad[0])}")
        for i in range(n):
            for j in range(i + 2, n):
                if i == 0 and j == n - 1:
                    continue
                if _segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]):
                    raise PolygonError(f"self-intersection between edges {i} and {j}")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def edges(self) -> np.ndarray:
        """Edge vectors; edge ``i`` runs from vertex ``i`` to vertex ``i+1``."""
        return np.roll(self.vertices, -1, axis=0) - self.vertices

    @property
    def edge_lengths(self) -> np.ndarray:
        e = self.edges
        return np.hypot(e[:, 0], e[:, 1])

    @property
    def area(self) -> float:
        return _signed_area(self.vertices)

    @property
    def perimeter(self) -> float:
        return float(self.edge_lengths.sum())

    @property
    def interior_angles(self) -> np.ndarray:
        """Interior angle at each vertex, in (0, 2*pi)."""
        e = self.edges
        prev = np.roll(e, 1, axis=0)
        cross = prev[:, 0] * e[:, 1] - prev[:, 1] * e[:, 0]
        dot = np.einsum("ij,ij->i", prev, e)
        turn = np.arctan2(cross, dot)
        return np.pi - turn

    def is_convex(self) -> bool:
        return bool(np.all(self.interior_angles < np.pi - GEOM_TOL))

    @property
    def centroid(self) -> np.ndarray:
        v = self.vertices
        w = np.roll(v, -1, axis=0)
        c = v[:, 0] * w[:, 1] - w[:, 0] * v[:, 1]
        a = 0.5 * c.sum()
        return np.array([((v[:, 0] + w[:, 0]) * c).sum(), ((v[:, 1] + w[:, 1]) * c).sum()]) / (6 * a)

    def scaled(self, c: float) -> "Polygon":
        return Polygon(self.vertices * c)

    def transformed(self, angle: float = 0.0, shift=(0.0, 0.0), reflect: bool = False) -> "Polygon":
        """Rigid motion: optional reflection in the y-axis, rotation, then shift."""
        v = self.vertices.copy()
        if reflect:
            v[:, 0] = -v[:, 0]
        c, s = math.cos(angle), math.sin(angle)
        rot = np.array([[c, -s], [s, c]])
        return Polygon(v @ rot.T + np.asarray(shift, dtype=float))

    def contains(self, point, tol: float = GEOM_TOL) -> bool:
        """True if ``point`` is inside or on the boundary."""
        x, y = point
        v = self.vertices
        if np.min(_point_segment_distance(np.asarray(point, float), v, np.roll(v, -1, axis=0))) <= tol:
            return True
        inside = False
        for (x1, y1), (x2, y2) in zip(v, np.roll(v, -1, axis=0)):
            if (y1 > y) != (y2 > y):
                xi = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
                if xi > x:
                    inside = not inside
        return inside

    def to_json(self) -> str:
        return json.dumps({"vertices": self.vertices.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "Polygon":
        data = json.loads(text)
        if not isinstance(data, dict) or "vertices" not in data:
            raise PolygonError('polygon JSON must be an object with a "vertices" list')
        return cls(np.asarray(data["vertices"], dtype=float))

    def save(self, path) -> None:
        Path(path).write_text(self.to_json() + "\n")

    @classmethod
    def load(cls, path) -> "Polygon":
        return cls.from_json(Path(path).read_text())


def _point_segment_distance(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ab = b - a
    t = np.clip(np.einsum("ij,ij->i", p - a, ab) / np.einsum("ij,ij->i", ab, ab), 0.0, 1.0)
    proj = a + t[:, None] * ab
    return np.hypot(*(p - proj).T)


def measurements(p: Polygon) -> tuple[float, float, np.ndarray]:
    """Return ``(area, perimeter, interior_angles)``."""
    return p.area, p.perimeter, p.interior_angles


def shape_functional(p: Polygon) -> float:
    """Area over squared perimeter; scale invariant, at most 1/(4*pi)."""
    return p.area / p.perimeter**2


def regular_shape_functional(n: int) -> float:
    """Value of :func:`shape_functional` on any regular n-gon."""
    return 1.0 / (4 * n * math.tan(math.pi / n))


# -- constructors -----------------------------------------------------------

def make_regular_ngon(n: int, side: float = 1.0) -> Polygon:
    if n < 3:
        raise PolygonError(f"a regular n-gon needs n >= 3, got {n}")
    if side <= 0:
        raise PolygonError("side must be positive")
    radius = side / (2 * math.sin(math.pi / n))
    theta = 2 * np.pi * np.arange(n) / n - np.pi / 2 - np.pi / n
    return Polygon(radius * np.column_stack([np.cos(theta), np.sin(theta)]))


def make_rectangle(l: float, w: float) -> Polygon:
    return Polygon([[0, 0], [l, 0], [l, w], [0, w]])


def make_parallelogram(L: float, W: float, alpha: float) -> Polygon:
    """Parallelogram with sides ``L`` (along the x-axis) and ``W`` and angle ``alpha`` at the origin."""
    dx, dy = W * math.cos(alpha), W * math.sin(alpha)
    return Polygon([[0, 0], [L, 0], [L + dx, dy], [dx, dy]])


def inscribed_polygon(n: int, radius: float = 1.0) -> Polygon:
    """Regular n-gon inscribed in the circle of given radius, centred at the origin."""
    theta = 2 * np.pi * np.arange(n) / n
    return Polygon(radius * np.column_stack([np.cos(theta), np.sin(theta)]))


def thin_triangle(w: float, d: float) -> Polygon:
    """Triangle with vertices (0, w/2), (0, -w/2) and (d/3, 0)."""
    return Polygon([[0, -w / 2], [d / 3, 0], [0, w / 2]])


def random_convex_polygon(n: int, rng: np.random.Generator, jitter: float = 0.35,
                          min_angle: float = 0.05) -> Polygon:
    """Random convex n-gon with vertices on a perturbed ellipse.

    Draws are repeated until every interior angle lies in
    ``(min_angle, pi - min_angle)``.
    """
    for _ in range(1000):
        gaps = rng.uniform(1 - jitter, 1 + jitter, n)
        theta = np.cumsum(gaps) / gaps.sum() * 2 * np.pi + rng.uniform(0, 2 * np.pi)
        axes = rng.uniform(0.5, 1.5, 2)
        pts = np.column_stack([axes[0] * np.cos(theta), axes[1] * np.sin(theta)])
        try:
            p = Polygon(pts)
        except PolygonError:
            continue
        ang = p.interior_angles
        if np.all(ang > min_angle) and np.all(ang < np.pi - min_angle):
            return p
    raise RuntimeError("failed to draw a random convex polygon")


def gww_pair() -> tuple[Polygon, Polygon]:
    """The classical isospectral pair built from seven right isosceles half-squares.

    Each domain has area 7/2 (legs of length 1) and eight vertices. The
    coordinates come from enumerating all 317 edge-connected arrangements of
    seven half-squares on the reflection tiling and keeping the one
    non-congruent pair whose finite element spectra converge together.
    """
    first = Polygon([[0, 2], [1, 2], [1, 1], [2, 0], [2, 1], [3, 1], [1, 3], [0, 3]])
    second = Polygon([[3, 1], [3, 2], [1, 2], [1, 3], [0, 2], [1, 1], [2, 1], [2, 0]])
    return first, second


@dataclass(frozen=True)
class ParallelogramParams:
    """Longer side ``L``, adjacent side ``W`` and smallest angle ``alpha``."""

    L: float
    W: float
    alpha: float

    def __post_init__(self):
        if not 0 < self.W <= self.L * (1 + 1e-12):
            raise PolygonError(f"need 0 < W <= L, got L={self.L}, W={self.W}")
        if not 0 < self.alpha <= math.pi / 2 + 1e-12:
            raise PolygonError(f"alpha must lie in (0, pi/2], got {self.alpha}")

    @property
    def height(self) -> float:
        return self.W * math.sin(self.alpha)

    def polygon(self) -> Polygon:
        return make_parallelogram(self.L, self.W, self.alpha)


@dataclass(frozen=True)
class TrapezoidParams:
    """Trapezoid with base ``B``, top ``b``, height ``h`` and base angles ``alpha >= beta``.

    Both base angles must be below pi/2 (legs lean inwards). The stricter
    condition ``alpha + beta < pi/2`` of an *acute* trapezoid in the sense
    used for hearing is reported by :attr:`is_acute` and enforced by the
    operations that rely on it.
    """

    B: float
    b: float
    h: float
    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.h > 0 and self.b > 0 and self.B >= self.b * (1 - 1e-12)):
            raise PolygonError(f"need B >= b > 0 and h > 0, got B={self.B}, b={self.b}, h={self.h}")
        if not (0 < self.beta <= self.alpha * (1 + 1e-12) and self.alpha < math.pi / 2):
            raise PolygonError(f"need 0 < beta <= alpha < pi/2, got alpha={self.alpha}, beta={self.beta}")
        b_expected = self.B - self.h * (1 / math.tan(self.alpha) + 1 / math.tan(self.beta))
        if abs(b_expected - self.b) > 1e-9 * max(1.0, self.B):
            raise PolygonError(f"inconsistent trapezoid: b={self.b} but B - h(cot a + cot b) = {b_expected}")

    @classmethod
    def from_base(cls, B: float, h: float, alpha: float, beta: float) -> "TrapezoidParams":
        """Build from base, height and base angles (ordered so that alpha >= beta)."""
        alpha, beta = max(alpha, beta), min(alpha, beta)
        b = B - h * (1 / math.tan(alpha) + 1 / math.tan(beta))
        return cls(B, b, h, alpha, beta)

    @property
    def is_acute(self) -> bool:
        return self.alpha + self.beta < math.pi / 2

    @property
    def legs(self) -> tuple[float, float]:
        return self.h / math.sin(self.alpha), self.h / math.sin(self.beta)

    @property
    def area(self) -> float:
        return 0.5 * (self.B + self.b) * self.h

    @property
    def perimeter(self) -> float:
        return self.B + self.b + sum(self.legs)

    def scaled(self, c: float) -> "TrapezoidParams":
        return TrapezoidParams(c * self.B, c * self.b, c * self.h, self.alpha, self.beta)

    def polygon(self) -> Polygon:
        """Base on the x-axis from (0, 0) to (B, 0); angle ``alpha`` at the origin."""
        x0 = self.h / math.tan(self.alpha)
        x1 = self.B - self.h / math.tan(self.beta)
        return Polygon([[0, 0], [self.B, 0], [x1, self.h], [x0, self.h]])


# -- extents ---------------------------------------------------------------

def diameter(p: Polygon) -> float:
    v = p.vertices
    d = v[:, None, :] - v[None, :, :]
    return float(np.sqrt((d**2).sum(-1)).max())


def _require_convex(p: Polygon, what: str) -> None:
    if not p.is_convex():
        raise PolygonError(f"{what} is only defined here for convex polygons")


def width(p: Polygon) -> float:
    """Minimal thickness of a strip containing a convex polygon."""
    _require_convex(p, "width")
    e = p.edges
    normals = np.column_stack([e[:, 1], -e[:, 0]]) / p.edge_lengths[:, None]
    proj = p.vertices @ normals.T
    return float((proj.max(axis=0) - proj.min(axis=0)).min())


def inradius(p: Polygon) -> tuple[float, np.ndarray]:
    """Largest inscribed disk of a convex polygon as ``(radius, centre)``.

    Solved as the linear program: maximise r subject to
    ``n_i . c + r <= n_i . v_i`` for each outward unit edge normal ``n_i``.
    """
    _require_convex(p, "inradius")
    e = p.edges
    normals = np.column_stack([e[:, 1], -e[:, 0]]) / p.edge_lengths[:, None]
    offsets = np.einsum("ij,ij->i", normals, p.vertices)
    a_ub = np.column_stack([normals, np.ones(len(normals))])
    res = linprog(c=[0.0, 0.0, -1.0], A_ub=a_ub, b_ub=offsets,
                  bounds=[(None, None), (None, None), (0, None)], method="highs")
    if res.status != 0:
        raise RuntimeError(f"inradius LP failed: {res.message}")
    return float(res.x[2]), res.x[:2]


def extents(p: Polygon) -> tuple[float, float, float]:
    """Return ``(diameter, inradius, width)`` of a convex polygon."""
    return diameter(p), inradius(p)[0], width(p)


# -- congruence ------------------------------------------------------------

@dataclass(frozen=True)
class CongruenceSignature:
    """Cyclic (interior angle, following edge length) sequence of a polygon.

    ``canonical`` is the lexicographically smallest rotation over both the
    polygon and its mirror image; ``matches`` compares with a relative
    per-entry tolerance and tries every alignment, so it does not depend on
    ties in the canonical choice.
    """

    pairs: np.ndarray
    mirrored: np.ndarray
    canonical: tuple = field(compare=False)

    def matches(self, other: "CongruenceSignature", tol: float = 1e-9) -> bool:
        a = self.pairs
        if a.shape != other.pairs.shape:
            return False
        n = len(a)
        for cand in (other.pairs, other.mirrored):
            for k in range(n):
                b = np.roll(cand, k, axis=0)
                scale = np.maximum(np.abs(a), np.abs(b))
                if np.all(np.abs(a - b) <= tol * np.maximum(scale, 1e-300)):
                    return True
        return False


def _pairs(p: Polygon) -> np.ndarray:
    return np.column_stack([p.interior_angles, p.edge_lengths])


def congruence_signature(p: Polygon) -> CongruenceSignature:
    pairs = _pairs(p)
    mirrored = _pairs(p.transformed(reflect=True))
    rotations = [tuple(map(tuple, np.roll(arr, k, axis=0)))
                 for arr in (pairs, mirrored) for k in range(len(pairs))]
    return CongruenceSignature(pairs, mirrored, min(rotations))


def congruent(p: Polygon, q: Polygon, tol: float = 1e-9) -> bool:
    """Congruence up to rigid motion and reflection, relative tolerance ``tol``."""
    if p.n != q.n:
        return False
    return congruence_signature(p).matches(congruence_signature(q), tol)

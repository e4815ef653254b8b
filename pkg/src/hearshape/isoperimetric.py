"""Maximising f = area / perimeter**2 over convex n-gons.

Three local moves are used, each accepted only if f does not decrease:

* ``side_equalize`` slides a vertex parallel to the chord of its
  neighbours until the two adjacent sides are equal (area is unchanged,
  perimeter does not grow);
* ``edge_translate`` pushes one edge outward along its normal, with step
  given by the first variation of f;
* ``vertex_gradient`` moves all vertices along the gradient of f.

The third move is needed because for even n every rhombus-like polygon
with equal sides and alternating angles is a fixed point of the first two.

Angles passed to ``phi`` are EXTERIOR angles, converted from the interior
angles stored by :class:`Polygon` in :func:`exterior_angles` only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from .polygon import Polygon, PolygonError, regular_shape_functional


class IsoperimetricError(ValueError):
    pass


@dataclass(frozen=True)
class AdjustmentStep:
    kind: str  # side_equalize, edge_translate or vertex_gradient
    index: int
    magnitude: float
    f_before: float
    f_after: float


@dataclass(frozen=True)
class MaximizeOptions:
    tol: float = 1e-10
    max_iter: int = 5000
    min_angle: float = 1e-3
    record_steps: bool = False


@dataclass
class MaximizeResult:
    polygon: Polygon
    f: float
    stationarity_residual: float
    converged: bool
    iterations: int
    trajectory: list = field(default_factory=list)  # (iteration, f, residual)
    steps: list = field(default_factory=list)

    def trajectory_csv(self) -> str:
        rows = ["iteration,f,stationarity_residual"]
        rows += [f"{i},{f!r},{r!r}" for i, f, r in self.trajectory]
        return "\n".join(rows) + "\n"


# -- raw-array helpers (vertices as (n, 2) CCW arrays) ----------------------

def _area(v: np.ndarray) -> float:
    x, y = v[:, 0], v[:, 1]
    return 0.5 * math.fsum(x * np.roll(y, -1) - np.roll(x, -1) * y)


def _edge_lengths(v: np.ndarray) -> np.ndarray:
    d = np.roll(v, -1, axis=0) - v
    return np.hypot(d[:, 0], d[:, 1])


def _f(v: np.ndarray) -> float:
    return _area(v) / math.fsum(_edge_lengths(v)) ** 2


def _f_precise(v: np.ndarray):
    """f in 40-digit arithmetic, so acceptance is not decided by rounding noise."""
    with mpmath.workdps(40):
        x = [mpmath.mpf(float(a)) for a in v[:, 0]]
        y = [mpmath.mpf(float(b)) for b in v[:, 1]]
        n = len(x)
        area = mpmath.fsum(x[i] * y[(i + 1) % n] - x[(i + 1) % n] * y[i] for i in range(n)) / 2
        perim = mpmath.fsum(mpmath.hypot(x[(i + 1) % n] - x[i], y[(i + 1) % n] - y[i]) for i in range(n))
        return area / perim**2


def _interior_angles(v: np.ndarray) -> np.ndarray:
    a = np.roll(v, 1, axis=0) - v
    b = np.roll(v, -1, axis=0) - v
    cross = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
    dot = (a * b).sum(axis=1)
    # CCW convex vertex: angle from b to a is the interior angle
    return np.mod(np.arctan2(-cross, dot), 2 * np.pi)


def _admissible(v: np.ndarray, min_angle: float) -> bool:
    ang = _interior_angles(v)
    return bool(np.all(np.isfinite(ang)) and np.all(ang >= min_angle)
                and np.all(ang <= np.pi - min_angle) and _area(v) > 0
                and abs(ang.sum() - (len(v) - 2) * np.pi) < 1e-8)


def _normalize(v: np.ndarray) -> np.ndarray:
    """Rescale about the vertex mean so that the perimeter equals n."""
    c = v.mean(axis=0)
    return c + (v - c) * (len(v) / math.fsum(_edge_lengths(v)))


def exterior_angles(p: Polygon) -> np.ndarray:
    return np.pi - p.interior_angles


def phi(x):
    """``tan(x/2)`` of an exterior angle ``x``."""
    return np.tan(np.asarray(x) / 2)


def _stationarity(v: np.ndarray) -> float:
    v = _normalize(v)
    ext = np.pi - _interior_angles(v)
    L, A = math.fsum(_edge_lengths(v)), _area(v)
    ph = phi(ext)
    return float(np.max(np.abs(ph + np.roll(ph, -1) - L / (2 * A))))


def stationarity_residual(p: Polygon) -> float:
    """``max_i |phi_i + phi_{i+1} - L/(2A)|`` after scaling the perimeter to n.

    At that scale a polygon with unit sides has zero first variation of f
    for every edge exactly when the residual vanishes. The scaling matters:
    for a triangle the weighted condition ``phi_i + phi_{i+1} = e_i L/(2A)``
    holds identically, while this residual also measures ``|e_i - 1|``.
    """
    return _stationarity(p.vertices)


# -- local moves --------------------------------------------------------------

def _equalize(v: np.ndarray, i: int) -> np.ndarray:
    n = len(v)
    a, b = v[(i - 1) % n], v[(i + 1) % n]
    d = b - a
    m = 0.5 * (a + b)
    out = v.copy()
    out[i] = v[i] - ((v[i] - m) @ d) / (d @ d) * d
    return out


def steiner_side_equalize(p: Polygon, vertex_index: int) -> Polygon:
    """Make the two sides at ``vertex_index`` equal, keeping the area.

    Raises IsoperimetricError if the result is not convex.
    """
    v = p.vertices
    n = p.n
    i = vertex_index % n
    a, b = v[(i - 1) % n], v[(i + 1) % n]
    cross = (v[i] - a)[0] * (b - a)[1] - (v[i] - a)[1] * (b - a)[0]
    if abs(cross) <= 1e-12 * np.linalg.norm(b - a) ** 2:
        raise IsoperimetricError(f"vertex {i} is collinear with its neighbours")
    try:
        q = Polygon(_equalize(v, i))
    except PolygonError as exc:
        raise IsoperimetricError(f"equalizing vertex {i} gives an invalid polygon: {exc}") from exc
    if p.is_convex() and not q.is_convex():
        raise IsoperimetricError(f"equalizing vertex {i} breaks convexity")
    return q


def _line_intersection(p1, d1, p2, d2) -> np.ndarray:
    m = np.column_stack([d1, -d2])
    s = np.linalg.solve(m, p2 - p1)
    return p1 + s[0] * d1


def _translate(v: np.ndarray, i: int, t: float) -> np.ndarray:
    n = len(v)
    j = (i + 1) % n
    d = v[j] - v[i]
    normal = np.array([d[1], -d[0]]) / math.hypot(*d)
    base = v[i] + t * normal
    out = v.copy()
    out[i] = _line_intersection(base, d, v[(i - 1) % n], v[i] - v[(i - 1) % n])
    out[j] = _line_intersection(base, d, v[j], v[(j + 1) % n] - v[j])
    return out


def edge_translate(p: Polygon, edge_index: int, t: float) -> Polygon:
    """Move edge ``edge_index`` (vertex i to i+1) by ``t`` along its outward normal.

    The two neighbouring edges are extended or shortened to meet it.
    Raises IsoperimetricError if convexity or simplicity is lost.
    """
    if t == 0:
        return p
    moved = _translate(p.vertices, edge_index % p.n, t)
    old_e, new_e = np.roll(p.vertices, -1, 0) - p.vertices, np.roll(moved, -1, 0) - moved
    if np.any(np.einsum("ij,ij->i", old_e, new_e) <= 0):
        raise IsoperimetricError(f"translating edge {edge_index} by {t} collapses an edge")
    try:
        q = Polygon(moved)
    except (PolygonError, np.linalg.LinAlgError) as exc:
        raise IsoperimetricError(f"translating edge {edge_index} by {t}: {exc}") from exc
    if not q.is_convex() or q.n != p.n:
        raise IsoperimetricError(f"translating edge {edge_index} by {t} breaks convexity")
    return q


def f_first_variation(p: Polygon, edge_index: int) -> float:
    """d/dt of f along :func:`edge_translate` at t = 0.

    ``e/L**2 - (2A/L**3) (phi_i + phi_{i+1})`` with e the edge length and
    phi of the exterior angles at the edge's two endpoints.
    """
    return _first_variation(p.vertices, edge_index % p.n)


def _first_variation(v: np.ndarray, i: int) -> float:
    n = len(v)
    ext = np.pi - _interior_angles(v)
    e = _edge_lengths(v)
    A, L = _area(v), math.fsum(e)
    return float(e[i] / L**2 - 2 * A / L**3 * (phi(ext[i]) + phi(ext[(i + 1) % n])))


def _f_gradient(v: np.ndarray) -> np.ndarray:
    prev, nxt = np.roll(v, 1, axis=0), np.roll(v, -1, axis=0)
    dA = 0.5 * np.column_stack([nxt[:, 1] - prev[:, 1], prev[:, 0] - nxt[:, 0]])
    to_prev, to_next = v - prev, v - nxt
    dL = (to_prev / np.linalg.norm(to_prev, axis=1)[:, None]
          + to_next / np.linalg.norm(to_next, axis=1)[:, None])
    A, L = _area(v), math.fsum(_edge_lengths(v))
    return dA / L**2 - 2 * A * dL / L**3


# -- the optimiser ------------------------------------------------------------

def maximize_f(n: int, seed_polygon: Polygon, options: MaximizeOptions | None = None) -> MaximizeResult:
    """Ascend f from a convex seed until the stationarity residual is below ``tol``.

    Every recorded iterate has perimeter n, so at convergence the polygon
    is the regular n-gon with unit sides. If ``max_iter`` is reached the
    best iterate is returned with ``converged = False``.
    """
    opt = options or MaximizeOptions()
    if seed_polygon.n != n:
        raise IsoperimetricError(f"seed has {seed_polygon.n} vertices, expected {n}")
    if not seed_polygon.is_convex():
        raise IsoperimetricError("seed polygon must be convex")
    v = _normalize(seed_polygon.vertices)
    if not _admissible(v, opt.min_angle):
        raise IsoperimetricError("seed violates the minimum-angle guard")
    f = _f_precise(v)
    res = _stationarity(v)
    trajectory = [(0, float(f), res)]
    steps = []
    gstep = 0.1
    prev_x = prev_g = None

    def attempt(cand, kind, idx, mag):
        nonlocal v, f
        cand = _normalize(cand)
        if not _admissible(cand, opt.min_angle):
            return False
        fc = _f_precise(cand)
        if fc < f or np.array_equal(cand, v):
            return False
        if opt.record_steps:
            steps.append(AdjustmentStep(kind, idx, mag, float(f), float(fc)))
        v, f = cand, fc
        return True

    it = stalls = 0
    while res >= opt.tol and it < opt.max_iter:
        it += 1
        moved = 0
        for i in range(n):
            moved += attempt(_equalize(v, i), "side_equalize", i, 0.0)
        for i in range(n):
            t = _first_variation(v, i) * n**2
            for _ in range(30):
                try:
                    cand = _translate(v, i, t)
                except np.linalg.LinAlgError:
                    cand = None
                if cand is not None and attempt(cand, "edge_translate", i, t):
                    moved += 1
                    break
                t *= 0.5
        # vertex gradient step with Barzilai-Borwein length and backtracking
        g = _f_gradient(v)
        if prev_x is not None:
            s, y = (v - prev_x).ravel(), (g - prev_g).ravel()
            sy = s @ y
            if sy < 0:
                gstep = min(max(-(s @ s) / sy, 1e-6), 1e3)
        prev_x, prev_g = v.copy(), g
        step = gstep
        for _ in range(40):
            if attempt(v + step * g, "vertex_gradient", -1, step):
                moved += 1
                break
            step *= 0.5
        res = _stationarity(v)
        trajectory.append((it, float(f), res))
        if moved:
            stalls = 0
            continue
        # nothing accepted: restart the step-length model, then give up
        # (gains are then below what float vertices can express)
        stalls += 1
        gstep, prev_x, prev_g = 0.1, None, None
        if stalls >= 3:
            break
    return MaximizeResult(Polygon(v), float(f), res, res < opt.tol, it, trajectory, steps)


def regular_gap(result: MaximizeResult) -> float:
    return abs(result.f - regular_shape_functional(result.polygon.n))

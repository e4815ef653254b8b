"""Reconstruct polygons from spectral invariants.

* parallelograms from (area, perimeter, a0);
* acute trapezoids from (area, perimeter, a0) plus the shortest closed
  geodesic 2h;
* regular n-gons from (area, perimeter).

All ``hear_*`` functions take ``rtol``, a relative slack applied to the
feasibility guards (discriminants, isosceles boundary). The default 0
assumes exact invariants; fitted invariants need something like 1e-6.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .heat_trace import HeatInvariants, geometric_heat_invariants
from .polygon import ParallelogramParams, Polygon, PolygonError, TrapezoidParams, congruent

PI = math.pi


class NotInClassError(ValueError):
    """The invariants do not belong to any shape of the requested family."""


# -- parallelograms ---------------------------------------------------------

def parallelogram_angle(a0: float, rtol: float = 0.0) -> float:
    """Smallest angle alpha in (0, pi/2] with ``alpha (pi - alpha) = pi**2 / (12 (a0 + 1/12))``."""
    if not a0 + 1 / 12 > 0:
        raise NotInClassError(f"a0 = {a0} is not the corner sum of a parallelogram")
    c = PI**2 / (12 * (a0 + 1 / 12))
    disc = PI**2 / 4 - c
    if disc < 0:
        if disc < -max(rtol, 4 * np.finfo(float).eps) * PI**2 / 4:
            raise NotInClassError(f"a0 = {a0} is below the rectangle value 1/4")
        disc = 0.0
    return PI / 2 - math.sqrt(disc)


def hear_parallelogram(inv: HeatInvariants, rtol: float = 0.0) -> ParallelogramParams:
    """The unique parallelogram with the given heat invariants.

    The height is the smaller root of ``A = h (P/2 - h / sin(alpha))``. It is
    evaluated through the larger side ``L = (P/2 + sqrt(D)) / 2`` and
    ``W = A / (L sin(alpha))``, with ``D = P**2/4 - 4A/sin(alpha)``, which is
    the same root without cancellation when W is much smaller than L.
    """
    alpha = parallelogram_angle(inv.a0, rtol)
    sa = math.sin(alpha)
    P, A = inv.perimeter, inv.area
    disc = P**2 / 4 - 4 * A / sa
    if disc < 0:
        if disc < -max(rtol, 16 * np.finfo(float).eps) * P**2 / 4:
            raise NotInClassError("negative discriminant: area too large for this perimeter and angle")
        disc = 0.0
    L = 0.5 * (P / 2 + math.sqrt(disc))
    W = A / (L * sa)
    if W > L:
        # only reachable through a clamped discriminant: the equal-sides case
        if W > L * (1 + max(rtol, 1e-12)):
            raise RuntimeError(f"internal inconsistency: reconstructed W={W} > L={L}")
        L = W = math.sqrt(A / sa)
    return ParallelogramParams(L, W, alpha)


# -- acute trapezoids -------------------------------------------------------

@dataclass(frozen=True)
class TrapezoidSystem:
    """Right-hand sides of ``csc a + csc b = p`` and ``1/(a(pi-a)) + 1/(b(pi-b)) = q``."""

    p: float
    q: float

    def __post_init__(self):
        if not self.p > 2:
            raise NotInClassError(f"p = {self.p} must exceed 2 (each cosecant exceeds 1)")
        if not self.q >= 8 / PI**2 * (1 - 1e-12):
            raise NotInClassError(f"q = {self.q} is below the minimum 8/pi**2")


def trapezoid_system_from_invariants(inv: HeatInvariants, geodesic: float):
    """Return ``(system, h, B + b, leg sum)`` from heat invariants and the geodesic 2h."""
    if not geodesic > 0:
        raise ValueError("geodesic length must be positive")
    h = geodesic / 2
    sum_parallel = 2 * inv.area / h
    sum_legs = inv.perimeter - sum_parallel
    if not sum_legs > 0:
        raise NotInClassError("leg sum P - 2A/h is not positive; no trapezoid has these invariants")
    system = TrapezoidSystem(sum_legs / h, 24 * (inv.a0 + 1 / 12) / PI**2)
    return system, h, sum_parallel, sum_legs


def _corner(x):
    return 1.0 / (x * (PI - x))


def beta_of_alpha(alpha, q):
    """Smaller root beta of the a0 equation given alpha (nan where it does not exist).

    ``beta = pi/2 - sqrt(pi**2/4 + X)`` with ``X = a(pi-a) / (1 - q a(pi-a))``,
    evaluated as ``-X / (pi/2 + sqrt(pi**2/4 + X))``.
    """
    alpha = np.asarray(alpha, dtype=float)
    m = alpha * (PI - alpha)
    with np.errstate(divide="ignore", invalid="ignore"):
        x = m / (1 - q * m)
        rad = PI**2 / 4 + x
        beta = np.where(rad >= 0, -x / (PI / 2 + np.sqrt(np.maximum(rad, 0))), np.nan)
    return beta


def _f_aux(x):
    # csc(x) cot(x) divided by the derivative of 1/(x(pi - x))
    return x**2 * (PI - x) ** 2 * np.cos(x) / ((2 * x - PI) * np.sin(x) ** 2)


def g_function(alpha, q):
    """``csc(alpha) + csc(beta(alpha))``."""
    return 1 / np.sin(alpha) + 1 / np.sin(beta_of_alpha(alpha, q))


def g_prime(alpha, q):
    """Derivative of :func:`g_function`: ``(pi - 2a) / (a**2 (pi - a)**2) (F(a) - F(beta))``."""
    beta = beta_of_alpha(alpha, q)
    return (PI - 2 * alpha) / (alpha**2 * (PI - alpha) ** 2) * (_f_aux(alpha) - _f_aux(beta))


def isosceles_angle(q: float) -> float:
    """Base angle of the isosceles solution ``2 / (a (pi - a)) = q``."""
    return PI / 2 - math.sqrt(max(PI**2 / 4 - 2 / q, 0.0))


def _admissible(alpha, beta):
    return (np.isfinite(beta) & (beta > 0) & (beta <= alpha) & (alpha + beta < PI / 2))


def solve_angle_system(system: TrapezoidSystem, scan_points: int = 10_000,
                       rtol: float = 0.0) -> tuple[float, float]:
    """Solve for the base angles ``alpha >= beta`` of an acute trapezoid.

    The admissible alpha-interval is scanned, the first sign change of
    ``g - p`` is bracketed and bisected, and the root is polished by
    Newton steps using the closed-form derivative. Since g' vanishes at the
    isosceles point, that point is tested directly first.
    """
    p, q = system.p, system.q
    a_iso = isosceles_angle(q)
    g_iso = 2 / math.sin(a_iso)
    if a_iso < PI / 4 and abs(g_iso - p) <= max(rtol, 1e-13) * p:
        return a_iso, a_iso
    grid = np.concatenate([[a_iso], np.linspace(0, PI / 2, scan_points + 2)[1:-1]])
    grid = np.unique(grid[grid >= a_iso])
    beta = beta_of_alpha(grid, q)
    ok = _admissible(grid, beta)
    if not ok.any():
        raise NotInClassError("no admissible base angles for this q")
    resid = np.where(ok, g_function(grid, q) - p, np.nan)
    sign = np.sign(resid)
    hits = np.flatnonzero(ok[:-1] & ok[1:] & (sign[:-1] * sign[1:] <= 0))
    if hits.size == 0:
        lo = np.nanmin(resid) + p
        raise NotInClassError(
            f"no acute trapezoid with these invariants: g ranges over [{lo:.6g}, "
            f"{np.nanmax(resid) + p:.6g}] on the admissible interval, p = {p:.6g}")
    i = hits[0]
    a, b = grid[i], grid[i + 1]
    fa = resid[i]
    if resid[i] == 0:
        b = a
    elif resid[i + 1] == 0:
        a = b
    while b - a > 4 * np.finfo(float).eps * b:
        mid = 0.5 * (a + b)
        fm = float(g_function(mid, q) - p)
        if fm == 0:
            a = b = mid
            break
        if np.sign(fm) == np.sign(fa):
            a, fa = mid, fm
        else:
            b = mid
    lo, hi = grid[i], grid[i + 1]
    alpha = 0.5 * (a + b)
    for _ in range(3):
        d = float(g_prime(alpha, q))
        if d == 0 or not np.isfinite(d):
            break
        step = float(g_function(alpha, q) - p) / d
        if not lo <= alpha - step <= hi:
            break
        alpha -= step
    beta = float(beta_of_alpha(alpha, q))
    return float(alpha), beta


def angle_residuals(alpha: float, beta: float, system: TrapezoidSystem) -> tuple[float, float]:
    return (1 / math.sin(alpha) + 1 / math.sin(beta) - system.p,
            _corner(alpha) + _corner(beta) - system.q)


def hear_acute_trapezoid(inv: HeatInvariants, geodesic: float, rtol: float = 0.0) -> TrapezoidParams:
    """The unique acute trapezoid with these heat invariants and shortest geodesic."""
    system, h, s, _ = trapezoid_system_from_invariants(inv, geodesic)
    alpha, beta = solve_angle_system(system, rtol=rtol)
    B = 0.5 * (s + h * (1 / math.tan(alpha) + 1 / math.tan(beta)))
    b = s - B
    if not b > 0:
        raise NotInClassError(f"reconstructed top side b = {b} is not positive")
    return TrapezoidParams(B, b, h, alpha, beta)


def trapezoid_invariants(t: TrapezoidParams) -> tuple[HeatInvariants, float]:
    """Heat invariants and shortest-geodesic length 2h of an acute trapezoid."""
    return geometric_heat_invariants(t.polygon()), 2 * t.h


# -- the lemma's monotonicity claim ---------------------------------------

def _v(x):
    """``1/x**3 - cos(x)/sin(x)**3``, by its Taylor series for small x."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 0.1
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = 1 / x**3 - np.cos(x) / np.sin(x) ** 3
    series = x / 15 + 4 * x**3 / 189 + x**5 / 225 + 8 * x**7 / 10395 + 1382 * x**9 / 11609325
    return np.where(small, series, direct)


def _v_prime(x):
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 0.1
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = -3 / x**4 - 2 / np.sin(x) ** 2 + 3 / np.sin(x) ** 4
    series = 1 / 15 + 4 * x**2 / 63 + x**4 / 45 + 8 * x**6 / 1485 + 1382 * x**8 / 1289925
    return np.where(small, series, direct)


def u_function(alpha):
    """Logarithmic derivative of the auxiliary function F on (0, pi/2)."""
    a = np.asarray(alpha, dtype=float)
    # pair each pole with its cotangent so the cancellation happens in one place
    return _inv_minus_cot(PI / 2 - a) + 2 * _inv_minus_cot(a) + 2 / (a - PI)


def _inv_minus_cot(x):
    """``1/x - cot(x)``, by its Taylor series for small x."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = 1 / x - 1 / np.tan(x)
    series = x / 3 + x**3 / 45 + 2 * x**5 / 945 + x**7 / 4725
    return np.where(np.abs(x) < 0.1, series, direct)


def u_second_derivative(alpha):
    """``4/(a - pi)**3 + 4 v(a) + 2 v(pi/2 - a)``."""
    a = np.asarray(alpha, dtype=float)
    return 4 / (a - PI) ** 3 + 4 * _v(a) + 2 * _v(PI / 2 - a)


@dataclass
class UniquenessReport:
    grid_size: int
    u_max: float
    u_second_min: float
    v_prime_min: float
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {**asdict(self), "ok": self.ok}


def uniqueness_scan(grid_size: int = 10_000) -> UniquenessReport:
    """Check u < 0, u'' > 0 and v' >= 0 on an interior grid of (0, pi/2)."""
    if grid_size < 100:
        raise ValueError("grid_size must be >= 100")
    a = np.linspace(0, PI / 2, grid_size + 2)[1:-1]
    u = u_function(a)
    upp = u_second_derivative(a)
    vp = _v_prime(a)
    violations = []
    for name, bad in (("u >= 0", u >= 0), ("u'' <= 0", upp <= 0), ("v' < 0", vp < 0)):
        violations += [(name, float(x)) for x in a[bad]]
    return UniquenessReport(grid_size, float(u.max()), float(upp.min()), float(vp.min()), violations)


# -- regular polygons -------------------------------------------------------

def detect_regular(n: int, area: float, perimeter: float, tol: float = 1e-9) -> float | None:
    """Side length if ``area/perimeter**2`` equals the regular n-gon value within ``tol``."""
    if n < 3:
        raise ValueError("n must be >= 3")
    if not (area > 0 and perimeter > 0):
        raise ValueError("area and perimeter must be positive")
    target = 1 / (4 * n * math.tan(PI / n))
    if abs(area / perimeter**2 - target) <= tol:
        return perimeter / n
    return None


# -- trapezoids sharing the heat invariants ---------------------------------

def trapezoid_with_height(inv: HeatInvariants, h: float) -> TrapezoidParams:
    """The acute trapezoid with invariants ``inv`` and height ``h`` (if any)."""
    return hear_acute_trapezoid(inv, 2 * h)


def is_nontrivial_pair(t1: TrapezoidParams, t2: TrapezoidParams, tol: float = 1e-6) -> bool:
    return not congruent(t1.polygon(), t2.polygon(), tol)


def find_isoinvariant_trapezoids(seed: TrapezoidParams, budget: int = 40, tol: float = 1e-8,
                                 step: float = 0.1):
    """Two non-congruent acute trapezoids with equal area, perimeter and a0.

    Keeping (A, P, a0) of ``seed`` fixed, the height is moved to
    ``h (1 +- step / 2**k)`` for k = 0..budget-1. For each height the angle
    system yields at most one acute trapezoid, and the first valid one whose
    invariants match to ``tol`` (relative) is paired with ``seed``. Returns
    ``(seed, other, mismatch)`` or None. ``tol <= 0`` never accepts a
    floating-point match and returns None.
    """
    if tol <= 0:
        return None
    if not seed.is_acute:
        raise ValueError("seed must be an acute trapezoid")
    inv = geometric_heat_invariants(seed.polygon())
    for k in range(budget):
        for sgn in (1, -1):
            h = seed.h * (1 + sgn * step / 2**k)
            if h <= 0:
                continue
            try:
                other = trapezoid_with_height(inv, h)
            except (NotInClassError, PolygonError):
                continue
            if not other.is_acute or not is_nontrivial_pair(seed, other):
                continue
            got = geometric_heat_invariants(other.polygon())
            mismatch = max(abs(got.area - inv.area) / inv.area,
                           abs(got.perimeter - inv.perimeter) / inv.perimeter,
                           abs(got.a0 - inv.a0) / abs(inv.a0))
            if mismatch <= tol:
                return seed, other, mismatch
    return None


# -- reports ------------------------------------------------------------------

def hear_report(kind: str, inputs: dict, params, residuals: dict,
                truth: Polygon | None = None, reconstructed: Polygon | None = None,
                tol: float = 1e-7) -> str:
    """JSON report of an inverse computation, with an optional congruence verdict."""
    out = {"kind": kind, "inputs": inputs,
           "reconstructed": asdict(params) if params is not None else None,
           "residuals": residuals}
    if truth is not None and reconstructed is not None:
        out["congruent_to_truth"] = congruent(truth, reconstructed, tol)
    return json.dumps(out, indent=2)

"""Heat trace invariants of polygons.

For small t the heat trace of a polygon behaves like

    area / (4 pi t) - perimeter / (8 sqrt(pi t)) + a0,

where a0 adds one corner term per interior angle. This module evaluates
the three coefficients from geometry, sums truncated traces from spectra,
and recovers the coefficients from spectral data by least squares.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .exact_spectra import Spectrum
from .polygon import Polygon


class HeatTraceError(ValueError):
    pass


@dataclass(frozen=True)
class HeatInvariants:
    area: float
    perimeter: float
    a0: float

    def __post_init__(self):
        if not self.area > 0 or not self.perimeter > 0:
            raise HeatTraceError("area and perimeter must be positive")
        if not math.isfinite(self.a0):
            raise HeatTraceError("a0 must be finite")
        if self.area > self.perimeter**2 / (4 * math.pi) * (1 + 1e-9):
            raise HeatTraceError("area exceeds the isoperimetric bound perimeter**2/(4 pi)")

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "HeatInvariants":
        return cls(float(d["area"]), float(d["perimeter"]), float(d["a0"]))


def corner_term(angle: float) -> float:
    """Corner contribution ``(pi**2 - angle**2) / (24 pi angle)`` to a0."""
    if not 0 < angle < 2 * math.pi:
        raise HeatTraceError(f"corner angle must lie in (0, 2 pi), got {angle}")
    return (math.pi**2 - angle**2) / (24 * math.pi * angle)


def geometric_heat_invariants(p: Polygon) -> HeatInvariants:
    """Area, perimeter and corner sum of a polygon.

    For non-convex polygons the reflex corners contribute negative terms;
    the three-term expansion is then used beyond its convex setting.
    """
    a0 = math.fsum(corner_term(float(a)) for a in p.interior_angles)
    return HeatInvariants(p.area, p.perimeter, a0)


def parallelogram_a0(alpha: float) -> float:
    """a0 of a parallelogram with smallest angle ``alpha``."""
    return math.pi**2 / (12 * alpha * (math.pi - alpha)) - 1 / 12


def trapezoid_a0(alpha: float, beta: float) -> float:
    """a0 of a trapezoid with base angles ``alpha`` and ``beta``."""
    return math.pi**2 / 24 * (1 / (alpha * (math.pi - alpha)) + 1 / (beta * (math.pi - beta))) - 1 / 12


def expansion(inv: HeatInvariants, t):
    """Three-term small-t heat trace predicted by ``inv``."""
    t = np.asarray(t, dtype=float)
    return inv.area / (4 * np.pi * t) - inv.perimeter / (8 * np.sqrt(np.pi * t)) + inv.a0


def _weyl_area(s: Spectrum) -> float:
    lam_max = s.complete_up_to
    n = np.searchsorted(s.eigenvalues, lam_max, side="right")
    return 4 * np.pi * n / lam_max


def truncated_heat_trace(s: Spectrum, t: float, area: float | None = None) -> tuple[float, float]:
    """``sum exp(-lam_k t)`` over the available eigenvalues, and a tail bound.

    The omitted part beyond the completeness ceiling L is bounded by the
    Weyl density ``area/(4 pi)`` inflated by 2:
    ``2 * area/(4 pi) * exp(-L t) / t``. Without ``area`` it is estimated
    from the spectrum's own counting function.
    """
    if not t > 0:
        raise HeatTraceError("t must be positive")
    value = math.fsum(np.exp(-s.eigenvalues * t))
    a = _weyl_area(s) if area is None else area
    lam_max = s.complete_up_to
    tail = 2 * a / (4 * np.pi) * math.exp(-lam_max * t) / t
    return value, tail


def heat_trace_table(s: Spectrum, t_grid, area: float | None = None) -> str:
    """Tab-separated ``t trace tail_bound`` rows."""
    rows = ["t\ttrace\ttail_bound"]
    for t in t_grid:
        v, tail = truncated_heat_trace(s, float(t), area)
        rows.append(f"{float(t)!r}\t{v!r}\t{tail!r}")
    return "\n".join(rows) + "\n"


def default_t_grid(s: Spectrum, points: int = 24, decades: float = 2.0,
                   area: float | None = None) -> tuple[np.ndarray, dict]:
    """Log-spaced grid starting where both admission bounds hold.

    The lower end is the larger of ``area/(4 pi 1e4)`` (keeps the leading
    term below 1e4) and the smallest t whose tail bound is under 1e-6 of
    the trace. Returns the grid and the two bounds.
    """
    a = _weyl_area(s) if area is None else area
    t_headroom = a / (4 * np.pi * 1e4)
    lam_max = s.complete_up_to
    # tail/value ~ 2 exp(-L t) since value ~ area/(4 pi t); solve 2 exp(-L t) = 1e-6
    t_tail = math.log(2e6) / lam_max
    while True:
        v, tail = truncated_heat_trace(s, t_tail, area)
        if tail < 1e-6 * v:
            break
        t_tail *= 1.1
    t_min = max(t_headroom, t_tail)
    grid = np.logspace(math.log10(t_min), math.log10(t_min) + decades, points)
    return grid, {"t_headroom": t_headroom, "t_tail": t_tail}


def fit_heat_invariants(s: Spectrum, t_grid, area: float | None = None,
                        max_condition: float = 1e8) -> tuple[HeatInvariants, float]:
    """Least-squares fit of (area, perimeter, a0) to truncated heat traces.

    Rows are weighted by ``1/value(t)``. Every t must satisfy
    ``tail_bound(t) < 1e-6 value(t)``, and the grid must have at least
    three points spanning a decade. Returns the invariants and the RMS
    relative residual.
    """
    t = np.asarray(sorted(float(x) for x in t_grid))
    if t.size < 3:
        raise HeatTraceError("the t-grid needs at least 3 points")
    if t[0] <= 0:
        raise HeatTraceError("t values must be positive")
    if t[-1] < 10 * t[0]:
        raise HeatTraceError("the t-grid must span at least one decade")
    vals = np.empty_like(t)
    for i, ti in enumerate(t):
        v, tail = truncated_heat_trace(s, ti, area)
        if not tail < 1e-6 * v:
            raise HeatTraceError(
                f"truncation tail at t={ti:.3g} is {tail / v:.2e} of the trace; "
                "the window is too small for the available eigenvalues")
        vals[i] = v
    design = np.column_stack([1 / (4 * np.pi * t), -1 / (8 * np.sqrt(np.pi * t)), np.ones_like(t)])
    w = 1 / vals
    a = design * w[:, None]
    b = vals * w
    col = np.linalg.norm(a, axis=0)
    cond = np.linalg.cond(a / col)
    if not cond < max_condition:
        raise HeatTraceError(f"design matrix condition {cond:.2e} too large for window "
                             f"[{t[0]:.3g}, {t[-1]:.3g}]")
    coef, *_ = np.linalg.lstsq(a / col, b, rcond=None)
    coef = coef / col
    resid = float(np.sqrt(np.mean((a @ coef - b) ** 2)))
    area_fit, perim_fit, a0_fit = coef
    inv = HeatInvariants(float(area_fit), float(abs(perim_fit)), float(a0_fit))
    return inv, resid


def fit_report(inv: HeatInvariants, residual: float, t_grid) -> str:
    t = np.asarray(t_grid, dtype=float)
    return json.dumps({**inv.to_dict(), "residual": residual,
                       "window": [float(t.min()), float(t.max())]}, indent=2)

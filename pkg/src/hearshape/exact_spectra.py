"""Closed-form Dirichlet spectra: string, rectangle and disk.

These serve as oracles for the finite element solver and the heat trace
fits. Multiplicities are represented by repetition, so ``eigenvalues[k-1]``
is literally the k-th eigenvalue.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import jv, jvp

PROVENANCES = ("exact", "fem", "fitted")


class SpectrumError(ValueError):
    pass


@dataclass(frozen=True)
class Spectrum:
    """Sorted Dirichlet eigenvalues with per-entry error estimates.

    ``truncation`` is either ``("count", k)`` (the first k eigenvalues) or
    ``("ceiling", lam)`` (every eigenvalue <= lam).
    """

    eigenvalues: np.ndarray
    error_estimates: np.ndarray | None = None
    truncation: tuple = ("count", 0)
    provenance: str = "exact"
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        lam = np.asarray(self.eigenvalues, dtype=float).copy()
        if lam.ndim != 1 or lam.size == 0:
            raise SpectrumError("a spectrum needs at least one eigenvalue")
        if lam[0] <= 0:
            raise SpectrumError(f"first eigenvalue must be positive, got {lam[0]}")
        if np.any(np.diff(lam) < 0):
            raise SpectrumError("eigenvalues must be sorted nondecreasing")
        if lam.size > 1 and not lam[1] > lam[0]:
            raise SpectrumError("the first eigenvalue must be simple")
        if self.provenance not in PROVENANCES:
            raise SpectrumError(f"unknown provenance {self.provenance!r}")
        err = np.zeros_like(lam) if self.error_estimates is None else np.asarray(self.error_estimates, float).copy()
        if err.shape != lam.shape or np.any(err < 0):
            raise SpectrumError("error estimates must be nonnegative and match the eigenvalues")
        if self.provenance == "exact" and np.any(err != 0):
            raise SpectrumError("exact spectra carry zero error estimates")
        kind = self.truncation[0]
        if kind not in ("count", "ceiling"):
            raise SpectrumError(f"unknown truncation {self.truncation!r}")
        trunc = ("count", lam.size) if kind == "count" else ("ceiling", float(self.truncation[1]))
        lam.setflags(write=False)
        err.setflags(write=False)
        object.__setattr__(self, "eigenvalues", lam)
        object.__setattr__(self, "error_estimates", err)
        object.__setattr__(self, "truncation", trunc)

    def __len__(self):
        return len(self.eigenvalues)

    def __getitem__(self, k):
        return self.eigenvalues[k]

    @property
    def complete_up_to(self) -> float:
        """Largest lambda below which no eigenvalue is missing."""
        if self.truncation[0] == "ceiling":
            return self.truncation[1]
        return float(self.eigenvalues[-1])

    def scaled(self, c: float) -> "Spectrum":
        """Spectrum of the domain scaled by ``c`` (eigenvalues divide by c**2)."""
        trunc = self.truncation if self.truncation[0] == "count" else ("ceiling", self.truncation[1] / c**2)
        return Spectrum(self.eigenvalues / c**2, self.error_estimates / c**2, trunc, self.provenance)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "eigenvalue", "error_estimate"])
        for k, (lam, err) in enumerate(zip(self.eigenvalues, self.error_estimates), start=1):
            w.writerow([k, repr(float(lam)), repr(float(err))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, provenance: str = "exact") -> "Spectrum":
        rows = list(csv.DictReader(io.StringIO(text)))
        if not rows or set(rows[0]) != {"index", "eigenvalue", "error_estimate"}:
            raise SpectrumError("spectrum CSV needs header index,eigenvalue,error_estimate")
        rows.sort(key=lambda r: int(r["index"]))
        lam = np.array([float(r["eigenvalue"]) for r in rows])
        err = np.array([float(r["error_estimate"]) for r in rows])
        if provenance == "exact" and np.any(err):
            provenance = "fem"
        return cls(lam, err, ("count", len(lam)), provenance)

    def save_csv(self, path) -> None:
        Path(path).write_text(self.to_csv())

    @classmethod
    def load_csv(cls, path, provenance: str = "exact") -> "Spectrum":
        return cls.from_csv(Path(path).read_text(), provenance)


def _check_count_or_ceiling(count, ceiling):
    if (count is None) == (ceiling is None):
        raise ValueError("give exactly one of count or ceiling")
    if count is not None and count < 1:
        raise ValueError("count must be >= 1")
    if ceiling is not None and ceiling <= 0:
        raise ValueError("ceiling must be positive")


def string_spectrum(length: float, count: int) -> Spectrum:
    """Fixed-end string: ``k**2 pi**2 / length**2`` for k = 1..count."""
    if length <= 0:
        raise ValueError("string length must be positive")
    if count < 1:
        raise ValueError("count must be >= 1")
    k = np.arange(1, count + 1, dtype=float)
    return Spectrum(k**2 * np.pi**2 / length**2, truncation=("count", count))


def string_length(lambda1: float) -> float:
    """Length of the string whose first eigenvalue is ``lambda1``."""
    return math.sqrt(math.pi**2 / lambda1)


def _rectangle_values(l: float, w: float, ceiling: float) -> np.ndarray:
    mmax = int(math.floor(l * math.sqrt(ceiling) / math.pi)) + 1
    out = []
    m = np.arange(1, mmax + 1, dtype=float)
    base = np.pi**2 * m**2 / l**2
    for mi, b in zip(m, base):
        if b + np.pi**2 / w**2 > ceiling:
            break
        nmax = int(math.floor(w * math.sqrt(max(ceiling - b, 0.0)) / math.pi))
        n = np.arange(1, nmax + 1, dtype=float)
        vals = b + np.pi**2 * n**2 / w**2
        out.append(vals[vals <= ceiling])
    if not out:
        return np.empty(0)
    return np.sort(np.concatenate(out))


def rectangle_spectrum(l: float, w: float, count: int | None = None, ceiling: float | None = None) -> Spectrum:
    """Eigenvalues ``pi**2 (m**2/l**2 + n**2/w**2)``, m, n >= 1.

    Either the first ``count`` entries or all entries ``<= ceiling``.
    Enumeration runs under a ceiling that provably contains the requested
    entries, so no multiplicity is cut short.
    """
    if l <= 0 or w <= 0:
        raise ValueError("rectangle sides must be positive")
    _check_count_or_ceiling(count, ceiling)
    if ceiling is not None:
        vals = _rectangle_values(l, w, ceiling)
        if vals.size == 0:
            raise SpectrumError("no eigenvalue below the ceiling")
        return Spectrum(vals, truncation=("ceiling", ceiling))
    area, perim = l * w, 2 * (l + w)
    # N(lam) >= A lam/(4 pi) - P sqrt(lam)/(4 pi) - 1; grow until enough.
    lam = max(4 * np.pi * count / area, np.pi**2 * (1 / l**2 + 1 / w**2))
    while True:
        cap = 1.2 * lam + perim * math.sqrt(lam)
        vals = _rectangle_values(l, w, cap)
        if vals.size >= count:
            return Spectrum(vals[:count], truncation=("count", count))
        lam *= 1.5


# -- Bessel zeros -------------------------------------------------------------

class BesselZeroError(RuntimeError):
    pass


def _refine_zero(order: int, a: float, b: float) -> float:
    """Bisection to a tight bracket, then guarded Newton on J_order."""
    fa, fb = jv(order, a), jv(order, b)
    if fa == 0:
        return a
    if fb == 0:
        return b
    if np.sign(fa) == np.sign(fb):
        raise BesselZeroError(f"no sign change of J_{order} on [{a}, {b}]")
    for _ in range(60):
        if b - a < 1e-6:
            break
        m = 0.5 * (a + b)
        fm = jv(order, m)
        if np.sign(fm) == np.sign(fa):
            a, fa = m, fm
        else:
            b, fb = m, fm
    x = 0.5 * (a + b)
    for _ in range(50):
        step = jv(order, x) / jvp(order, x)
        xn = x - step
        if not a <= xn <= b:
            raise BesselZeroError(f"Newton left the bracket for J_{order} near {x}")
        if abs(xn - x) <= 1e-15 * max(1.0, abs(x)):
            x = xn
            break
        x = xn
    else:
        raise BesselZeroError(f"Newton did not converge for J_{order} near {x}")
    return float(x)


def bessel_zeros_below(order: int, xmax: float) -> np.ndarray:
    """All positive zeros of J_order that are smaller than ``xmax``, sorted.

    Zeros of J_order are separated by more than 2.5 and the first exceeds
    ``order``, so a scan with step 0.5 starting at ``order`` (or just above
    zero for order 0) brackets every one of them by a sign change.
    """
    if order < 0:
        raise ValueError("order must be >= 0")
    start = max(float(order), 1e-3)
    if xmax <= start:
        return np.empty(0)
    grid = np.arange(start, xmax + 0.5, 0.5)
    vals = jv(order, grid)
    idx = np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)
    exact = np.flatnonzero(vals == 0)
    zeros = [_refine_zero(order, grid[i], grid[i + 1]) for i in idx]
    zeros += [float(grid[i]) for i in exact]
    zeros = np.unique(np.array(zeros, dtype=float))
    return zeros[zeros < xmax]


def bessel_zero(order: int, index: int) -> float:
    """The ``index``-th positive zero of J_order (written j_{index, order}).

    Raises :class:`BesselZeroError` rather than returning an unverified root.
    """
    if order < 0 or index < 1:
        raise ValueError("need order >= 0 and index >= 1")
    # McMahon: j ~ (index + order/2 - 1/4) pi; pad generously for the scan.
    xmax = (index + order / 2.0 + 1.0) * np.pi + order + 5.0
    for _ in range(20):
        zeros = bessel_zeros_below(order, xmax)
        if len(zeros) >= index:
            return float(zeros[index - 1])
        xmax *= 1.5
    raise BesselZeroError(f"could not locate zero {index} of J_{order}")


def _disk_values(radius: float, ceiling: float) -> np.ndarray:
    xmax = radius * math.sqrt(ceiling)
    out = []
    order = 0
    while order < xmax:
        z = bessel_zeros_below(order, xmax)
        if z.size == 0:
            break
        vals = (z / radius) ** 2
        vals = vals[vals <= ceiling]
        out.append(vals if order == 0 else np.repeat(vals, 2))
        order += 1
    if not out:
        return np.empty(0)
    return np.sort(np.concatenate(out))


def disk_spectrum(radius: float, count: int | None = None, ceiling: float | None = None) -> Spectrum:
    """Disk eigenvalues ``j_{m,n}**2 / radius**2``; orders n >= 1 appear twice."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    _check_count_or_ceiling(count, ceiling)
    if ceiling is not None:
        vals = _disk_values(radius, ceiling)
        if vals.size == 0:
            raise SpectrumError("no eigenvalue below the ceiling")
        return Spectrum(vals, truncation=("ceiling", ceiling))
    area, perim = np.pi * radius**2, 2 * np.pi * radius
    lam = max(4 * np.pi * count / area, 5.8 / radius**2)
    while True:
        cap = 1.2 * lam + perim * math.sqrt(lam)
        vals = _disk_values(radius, cap)
        if vals.size >= count:
            return Spectrum(vals[:count], truncation=("count", count))
        lam *= 1.5


def weyl_ratio(s: Spectrum, lambda_cut: float) -> float:
    """``N(lambda_cut) / lambda_cut``; tends to area/(4 pi)."""
    if lambda_cut <= 0:
        raise ValueError("lambda_cut must be positive")
    complete = s.complete_up_to
    if s.truncation[0] == "count":
        # the last entry may be part of a cut multiplicity
        ok = lambda_cut < complete
    else:
        ok = lambda_cut <= complete
    if not ok:
        raise SpectrumError(f"spectrum is only complete up to {complete}, cannot count to {lambda_cut}")
    n = int(np.searchsorted(s.eigenvalues, lambda_cut, side="right"))
    return n / lambda_cut

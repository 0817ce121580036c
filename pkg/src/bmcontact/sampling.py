"""Deterministic low-discrepancy sample points on chart boxes.

Three regimes: ``box`` fills the whole box, ``off`` keeps |z| at least
``delta`` times the z-width away from 0, ``on`` pins z = 0.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy.stats import qmc

DEFAULT_DELTA = 1e-3


def unit_points(n: int, d: int, seed: int = 42) -> np.ndarray:
    if n < 1:
        raise ValueError("need at least one sample")
    if d == 0:
        return np.zeros((n, 0))
    return qmc.Halton(d=d, scramble=True, seed=seed).random(n)


def _scale(u: np.ndarray, box) -> np.ndarray:
    lo = np.array([b[0] for b in box])
    hi = np.array([b[1] for b in box])
    return lo + u * (hi - lo)


def sample(chart, n: int, region: str = "off", seed: int = 42, delta: float = DEFAULT_DELTA) -> np.ndarray:
    """``n`` points as rows, columns in ``chart.coords`` order."""
    if region == "box" or chart.z is None:
        if region == "on":
            raise ValueError("chart has no critical slice to sample")
        return _scale(unit_points(n, chart.dim, seed), chart.box)
    iz = chart.coords.index(chart.z)
    lo, hi = chart.box[iz]
    u = unit_points(n, chart.dim, seed)
    pts = _scale(u, chart.box)
    if region == "on":
        if not (lo <= 0.0 <= hi):
            raise ValueError("critical slice lies outside the box")
        pts[:, iz] = 0.0
        return pts
    if region != "off":
        raise ValueError(f"unknown sampling region {region!r}")
    gap = delta * (hi - lo)
    a, b = (lo, min(-gap, hi)), (max(gap, lo), hi)
    len_a = max(0.0, a[1] - a[0])
    len_b = max(0.0, b[1] - b[0])
    if len_a + len_b <= 0:
        raise ValueError("box too thin to avoid the critical slice")
    t = u[:, iz] * (len_a + len_b)
    pts[:, iz] = np.where(t < len_a, a[0] + t, b[0] + (t - len_a))
    return pts


def sample_where(chart, n: int, keep, seed: int = 42, region: str = "box", oversample: int = 8) -> np.ndarray:
    """First ``n`` points of a larger sample that satisfy ``keep(points)``."""
    pts = sample(chart, n * oversample, region=region, seed=seed)
    mask = np.asarray(keep(pts), dtype=bool)
    sel = pts[mask]
    if sel.shape[0] < n:
        raise ValueError(f"only {sel.shape[0]} of {n} requested points satisfy the filter")
    return sel[:n]


def slab(chart, n: int, zmin: float, seed: int = 42) -> np.ndarray:
    """Points with |z| >= zmin (both sides when available)."""
    iz = chart.coords.index(chart.z)

    def keep(p):
        return np.abs(p[:, iz]) >= zmin

    return sample_where(chart, n, keep, seed=seed)


def regular_grid(chart, counts: dict[str, int], fixed: dict[str, float] | None = None,
                 endpoint: bool = False) -> tuple[np.ndarray, tuple[int, ...]]:
    """Tensor grid; returns rows in coords order and the grid shape."""
    fixed = fixed or {}
    axes = []
    shape = []
    for name, (lo, hi) in zip(chart.coords, chart.box):
        if name in fixed:
            axes.append(np.array([fixed[name]]))
        else:
            k = counts.get(name, 1)
            axes.append(np.linspace(lo, hi, k, endpoint=endpoint) if k > 1 else np.array([(lo + hi) / 2]))
        shape.append(len(axes[-1]))
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in mesh], axis=1), tuple(shape)


@dataclass(frozen=True)
class GridConfig:
    """Sample sizes and tolerances shared by all grid checks."""

    n_off: int = 200
    n_on: int = 100
    tol: float = 1e-8
    seed: int = 42
    delta: float = DEFAULT_DELTA

    def __post_init__(self):
        if self.n_off < 1 or self.n_on < 1:
            raise ValueError("grid sizes must be positive")
        if not (self.tol > 0 and self.delta > 0):
            raise ValueError("tolerance and margin must be positive")

    def off(self, chart) -> np.ndarray:
        return sample(chart, self.n_off, region="off", seed=self.seed, delta=self.delta)

    def on(self, chart) -> np.ndarray | None:
        if chart.z is None:
            return None
        lo, hi = chart.interval(chart.z)
        if not (lo <= 0.0 <= hi):
            return None
        return sample(chart, self.n_on, region="on", seed=self.seed)

    def both(self, chart) -> np.ndarray:
        on = self.on(chart)
        off = self.off(chart)
        return off if on is None else np.vstack([off, on])

    def to_dict(self) -> dict:
        return asdict(self)


DEFAULT_GRID = GridConfig()

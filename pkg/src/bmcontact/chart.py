"""Coordinate charts with an optional distinguished defining coordinate."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import sympy as sp

from .scalar import coord


class ChartError(ValueError):
    pass


@dataclass(frozen=True)
class Chart:
    """Named coordinates, a domain box and optional singular data.

    ``z`` names the defining coordinate. With ``m >= 1`` the chart carries
    the b^m frame (σ = dz/z^m, ζ = z^m ∂z); with ``m == 0`` it is smooth but
    still orders ``z`` first, which is what deformations of b^m forms use.
    The frame order is always ``(z, other coords in order)``.
    """

    coords: tuple[str, ...]
    box: tuple[tuple[float, float], ...]
    z: str | None = None
    m: int = 0

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))
        object.__setattr__(self, "box", tuple((float(lo), float(hi)) for lo, hi in self.box))
        if len(set(self.coords)) != len(self.coords):
            raise ChartError("coordinate names must be distinct")
        if len(self.box) != len(self.coords):
            raise ChartError("box needs one interval per coordinate")
        for name, (lo, hi) in zip(self.coords, self.box):
            if not (lo < hi) or not (math.isfinite(lo) and math.isfinite(hi)):
                raise ChartError(f"bad interval for {name}: [{lo}, {hi}]")
        if self.m < 0:
            raise ChartError("order m must be >= 0")
        if self.z is None:
            if self.m:
                raise ChartError("singular order given without a defining coordinate")
        else:
            if self.z not in self.coords:
                raise ChartError(f"defining coordinate {self.z} is not a chart coordinate")
            lo, hi = self.interval(self.z)
            if self.m >= 1 and not (lo < 0 < hi):
                raise ChartError("the z-interval must contain 0 in its interior")

    # --- structure -------------------------------------------------------
    @property
    def dim(self) -> int:
        return len(self.coords)

    @property
    def singular(self) -> bool:
        return self.z is not None and self.m >= 1

    @property
    def frame(self) -> tuple[str, ...]:
        """Coordinate names in frame order (defining coordinate first)."""
        if self.z is None:
            return self.coords
        return (self.z,) + tuple(c for c in self.coords if c != self.z)

    def slot(self, name: str) -> int:
        try:
            return self.frame.index(name)
        except ValueError:
            raise ChartError(f"{name} is not a coordinate of this chart") from None

    def interval(self, name: str) -> tuple[float, float]:
        return self.box[self.coords.index(name)]

    def symbol(self, name: str) -> sp.Symbol:
        if name not in self.coords:
            raise ChartError(f"{name} is not a coordinate of this chart")
        return coord(name)

    @property
    def zsym(self) -> sp.Symbol | None:
        return coord(self.z) if self.z is not None else None

    def contains(self, point) -> bool:
        return all(lo - 1e-12 <= point[c] <= hi + 1e-12 for c, (lo, hi) in zip(self.coords, self.box))

    # --- derived charts --------------------------------------------------
    def with_order(self, m: int) -> "Chart":
        return Chart(self.coords, self.box, self.z, m)

    def smooth(self) -> "Chart":
        """Same coordinates and frame order, ordinary (co)tangent frame."""
        return self.with_order(0)

    def with_box(self, name: str, lo: float, hi: float) -> "Chart":
        box = tuple((lo, hi) if c == name else b for c, b in zip(self.coords, self.box))
        return Chart(self.coords, box, self.z, self.m)

    def fresh_name(self, preferred: str) -> str:
        if preferred not in self.coords:
            return preferred
        i = 1
        while f"{preferred}{i}" in self.coords:
            i += 1
        return f"{preferred}{i}"

    def extended(self, name: str, interval=(-1.0, 1.0)) -> "Chart":
        """Product with a line; the new coordinate goes last."""
        if name in self.coords:
            raise ChartError(f"{name} already used")
        return Chart(self.coords + (name,), self.box + (tuple(interval),), self.z, self.m)

    def with_defining(self, name: str, m: int) -> "Chart":
        return Chart(self.coords, self.box, name, m)

    # --- serialization ---------------------------------------------------
    def to_dict(self) -> dict:
        d = {"coords": list(self.coords), "box": [list(b) for b in self.box]}
        if self.z is not None:
            d["z"] = self.z
            d["m"] = self.m
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "Chart":
        try:
            coords = d["coords"]
            box = d["box"]
        except (KeyError, TypeError):
            raise ChartError("chart document needs 'coords' and 'box'") from None
        z = d.get("z")
        m = int(d.get("m", 1 if z is not None else 0))
        return cls(tuple(coords), tuple(tuple(b) for b in box), z, m)

    @classmethod
    def from_json(cls, text: str) -> "Chart":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ChartError(f"invalid chart JSON: {exc}") from None


def chart(coords: Sequence[str], box: Iterable[Sequence[float]], z: str | None = None, m: int = 0) -> Chart:
    return Chart(tuple(coords), tuple(tuple(b) for b in box), z, m)

"""Seeded random scalars and forms for property checks."""

from __future__ import annotations

import numpy as np
import sympy as sp

from . import exterior as E
from . import scalar as S
from .chart import Chart

_UNARY = (sp.sin, sp.cos, lambda e: sp.exp(e / 2))


def random_scalar(chart: Chart, rng: np.random.Generator, depth: int = 2) -> sp.Expr:
    """Small random expression in the chart coordinates."""
    xs = [S.coord(c) for c in chart.coords]
    if depth == 0:
        return xs[rng.integers(len(xs))] * int(rng.integers(-2, 3)) + int(rng.integers(-2, 3))
    a = random_scalar(chart, rng, depth - 1)
    b = random_scalar(chart, rng, depth - 1)
    op = int(rng.integers(3))
    if op == 0:
        return a + b
    if op == 1:
        return a * b
    return _UNARY[int(rng.integers(len(_UNARY)))](a)


def random_form(chart: Chart, degree: int, rng: np.random.Generator, terms: int = 2) -> E.BForm:
    blades = E.blades(chart.dim, degree)
    picks = rng.choice(len(blades), size=min(terms, len(blades)), replace=False)
    return E.BForm(chart, degree, {blades[i]: random_scalar(chart, rng) for i in picks})

"""Scalar expressions on charts.

Expressions are plain sympy trees restricted to the node set used throughout
the package: exact rationals, real coordinate symbols, sums, products, integer
powers, sin, cos, exp, log, and opaque profile nodes (tabulated one-variable
functions with known derivatives, see :class:`ProfileNode`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np
import sympy as sp

ScalarExpr = sp.Expr

ZERO = sp.Integer(0)
ONE = sp.Integer(1)


class DomainError(ArithmeticError):
    """Raised when an expression is evaluated outside its domain."""

    def __init__(self, message: str, subexpr: sp.Expr | None = None):
        super().__init__(message)
        self.subexpr = subexpr


class UnknownCoordinateError(KeyError):
    pass


@lru_cache(maxsize=None)
def coord(name: str) -> sp.Symbol:
    """The real symbol used for coordinate ``name``."""
    return sp.Symbol(name, real=True)


def _names(chart_or_names) -> tuple[str, ...]:
    if hasattr(chart_or_names, "coords"):
        return tuple(chart_or_names.coords)
    return tuple(chart_or_names)


# --------------------------------------------------------------------------
# profile nodes


class ProfileNode(sp.Function):
    """Application of a tabulated one-variable function.

    Concrete subclasses are generated by :func:`profile_function`; each one is
    bound to an object exposing ``evaluate(x, order)`` and a ``name``.
    """

    nargs = 1
    profile = None
    order = 0

    def fdiff(self, argindex=1):
        return profile_function(self.profile, self.order + 1)(self.args[0])

    @classmethod
    def eval(cls, arg):
        return None


_PROFILE_CLASSES: dict[tuple[int, int], type] = {}


def profile_function(profile, order: int = 0) -> type:
    """sympy function class evaluating ``profile`` (or its derivative)."""
    key = (id(profile), order)
    cls = _PROFILE_CLASSES.get(key)
    if cls is None:
        name = f"{profile.name}_d{order}" if order else profile.name

        def _imp(x, _p=profile, _j=order):
            return _p.evaluate(np.asarray(x, dtype=float), _j)

        cls = type(name, (ProfileNode,), {"profile": profile, "order": order, "_imp_": staticmethod(_imp)})
        _PROFILE_CLASSES[key] = cls
    return cls


def has_profile_nodes(e: sp.Expr) -> bool:
    return bool(e.atoms(ProfileNode))


# --------------------------------------------------------------------------
# simplification


def _trig_rule(e: sp.Expr) -> sp.Expr:
    # sin(a)^n -> sin(a)^(n mod 2) * (1 - cos(a)^2)^(n div 2)
    def repl(p):
        n = int(p.exp)
        return sp.sin(p.base.args[0]) ** (n % 2) * (1 - sp.cos(p.base.args[0]) ** 2) ** (n // 2)

    return e.replace(
        lambda p: p.is_Pow and isinstance(p.base, sp.sin) and p.exp.is_Integer and p.exp >= 2,
        repl,
    )


def simplify(e) -> sp.Expr:
    """Canonical rational normal form plus the sin^2 + cos^2 = 1 rule.

    Idempotent: applying it twice gives a structurally equal tree.
    """
    e = sp.sympify(e)
    if e.is_Number or e.is_Symbol:
        return e
    e = sp.cancel(e)
    if e.has(sp.sin):
        e2 = _trig_rule(e)
        if e2 != e:
            e = sp.cancel(e2)
    return e


def is_zero(e) -> bool:
    return simplify(e) == 0


def diff(e, x) -> sp.Expr:
    """Exact partial derivative with respect to coordinate ``x``."""
    if isinstance(x, str):
        x = coord(x)
    return simplify(sp.diff(e, x))


# --------------------------------------------------------------------------
# evaluation


def evaluate(e, point: Mapping[str, float], chart=None, extended: bool = False) -> float:
    """Evaluate ``e`` at ``point`` with explicit domain checking.

    With ``extended=True`` a negative power of a vanishing base returns a
    signed infinity instead of raising.
    """
    e = sp.sympify(e)
    if chart is not None:
        allowed = set(_names(chart))
        for s in e.free_symbols:
            if s.name not in allowed:
                raise UnknownCoordinateError(f"{s.name} is not a coordinate of the chart")
    return _eval(e, point, extended)


def _eval(e: sp.Expr, point: Mapping[str, float], extended: bool) -> float:
    if e.is_Number:
        return float(e)
    if e.is_Symbol:
        try:
            return float(point[e.name])
        except KeyError:
            raise UnknownCoordinateError(f"no value for coordinate {e.name}") from None
    if e.is_Add:
        return math.fsum(_eval(a, point, extended) for a in e.args)
    if e.is_Mul:
        out = 1.0
        for a in e.args:
            out *= _eval(a, point, extended)
        return out
    if e.is_Pow:
        base = _eval(e.base, point, extended)
        if not e.exp.is_Integer:
            raise DomainError(f"non-integer power in {e}", e)
        n = int(e.exp)
        if n < 0 and base == 0.0:
            if extended:
                return math.inf if (n % 2 == 0 or math.copysign(1.0, base) > 0) else -math.inf
            raise DomainError(f"division by zero in {e}", e)
        return base**n
    if isinstance(e, sp.sin):
        return math.sin(_eval(e.args[0], point, extended))
    if isinstance(e, sp.cos):
        return math.cos(_eval(e.args[0], point, extended))
    if isinstance(e, sp.exp):
        return math.exp(_eval(e.args[0], point, extended))
    if isinstance(e, sp.log):
        a = _eval(e.args[0], point, extended)
        if a <= 0.0:
            raise DomainError(f"log of non-positive value in {e}", e)
        return math.log(a)
    if isinstance(e, ProfileNode):
        v = float(e.profile.evaluate(np.asarray([_eval(e.args[0], point, extended)]), e.order)[0])
        if not math.isfinite(v):
            if extended:
                return v
            raise DomainError(f"profile singularity in {e}", e)
        return v
    if e is sp.pi:
        return math.pi
    raise TypeError(f"unsupported node {type(e).__name__} in {e}")


@lru_cache(maxsize=20000)
def _compiled(e: sp.Expr, names: tuple[str, ...]):
    return sp.lambdify([coord(n) for n in names], e, modules=["numpy"])


def evaluate_grid(e, chart_or_names, points: np.ndarray) -> np.ndarray:
    """Vectorized evaluation at the rows of ``points`` (columns = chart coords).

    Domain violations show up as inf/nan entries rather than exceptions.
    """
    names = _names(chart_or_names)
    e = sp.sympify(e)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if e.is_Number:
        return np.full(pts.shape[0], float(e))
    fn = _compiled(e, names)
    with np.errstate(all="ignore"):
        out = fn(*[pts[:, i] for i in range(len(names))])
    out = np.asarray(out, dtype=float)
    if out.shape != (pts.shape[0],):
        out = np.broadcast_to(out, (pts.shape[0],)).copy()
    return out


@dataclass
class GridComparison:
    equal: bool
    max_discrepancy: float
    n_points: int
    skipped: list[tuple[float, ...]] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.equal


def equal_on_grid(e1, e2, chart, n: int = 200, tol: float = 1e-8, seed: int = 42,
                  region: str = "off", points: np.ndarray | None = None) -> GridComparison:
    """Compare two expressions at ``n`` low-discrepancy sample points.

    ``region`` selects the sampler: ``"off"`` keeps the defining coordinate
    away from zero, ``"on"`` samples the critical slice, ``"box"`` ignores it.
    Points where either side is undefined are skipped and listed.
    """
    from .sampling import sample

    if n < 1:
        raise ValueError("n must be >= 1")
    pts = sample(chart, n, region=region, seed=seed) if points is None else points
    a = evaluate_grid(e1, chart, pts)
    b = evaluate_grid(e2, chart, pts)
    ok = np.isfinite(a) & np.isfinite(b)
    skipped = [tuple(p) for p in pts[~ok]]
    diffs = np.abs(a[ok] - b[ok])
    worst = float(diffs.max()) if diffs.size else 0.0
    return GridComparison(bool(worst <= tol), worst, int(pts.shape[0]), skipped)


def max_abs_on(e, chart, points: np.ndarray) -> float:
    vals = evaluate_grid(e, chart, points)
    if not np.all(np.isfinite(vals)):
        return math.inf
    return float(np.max(np.abs(vals))) if vals.size else 0.0


def min_abs_on(e, chart, points: np.ndarray) -> tuple[float, int]:
    vals = np.abs(evaluate_grid(e, chart, points))
    vals = np.where(np.isfinite(vals), vals, 0.0)
    i = int(np.argmin(vals))
    return float(vals[i]), i


# --------------------------------------------------------------------------
# printing


def to_text(e) -> str:
    """Print ``e`` in the scalar grammar accepted by :func:`parse_scalar`."""
    return _print(sp.sympify(e))


def _print_number(e) -> str:
    if e.is_Integer:
        return str(int(e))
    if e.is_Rational:
        return f"{e.p}/{e.q}"
    return repr(float(e))


def _needs_parens(e) -> bool:
    return not (e.is_Symbol or (e.is_Integer and e >= 0) or isinstance(e, (sp.Function,)))


def _print_factor(base, n: int) -> str:
    b = _print(base)
    if _needs_parens(base):
        b = f"({b})"
    return b if n == 1 else f"{b}^{n}"


def _print_product(e) -> str:
    coeff, factors = e.as_coeff_mul()
    num, den = [], []
    if coeff.is_Rational and coeff.q != 1:
        den.append(str(coeff.q))
        coeff = sp.Integer(coeff.p)
    for f in factors:
        if f.is_Pow and f.exp.is_Integer and f.exp < 0:
            den.append(_print_factor(f.base, -int(f.exp)))
        elif f.is_Pow and f.exp.is_Integer:
            num.append(_print_factor(f.base, int(f.exp)))
        else:
            num.append(_print_factor(f, 1))
    if coeff == -1:
        head = "-1"
    elif coeff != 1:
        head = _print_number(coeff)
        if coeff < 0:
            head = f"({head})"
    else:
        head = None
    parts = ([head] if head else []) + num
    text = "*".join(parts) if parts else "1"
    for d in den:
        text += "/" + d
    return text


def _print(e) -> str:
    if e.is_Number:
        s = _print_number(e)
        return f"({s})" if e < 0 or (e.is_Rational and e.q != 1) else s
    if e.is_Symbol:
        return e.name
    if e is sp.pi:
        return "pi"
    if e.is_Add:
        terms = sorted(e.args, key=sp.default_sort_key)
        out = ""
        for i, t in enumerate(terms):
            c, _ = t.as_coeff_Mul()
            negative = c.is_Number and c < 0
            body = _print(-t) if negative else _print(t)
            if i == 0:
                out = f"-1*({body})" if negative else body
            else:
                out += (" - " if negative else " + ") + body
        return out
    if e.is_Mul or (e.is_Pow and e.exp.is_Integer and e.exp < 0):
        return _print_product(sp.Mul(e, evaluate=False) if e.is_Pow else e)
    if e.is_Pow:
        if not e.exp.is_Integer:
            raise ValueError(f"non-integer power {e} is not representable")
        return _print_factor(e.base, int(e.exp))
    if isinstance(e, (sp.sin, sp.cos, sp.exp, sp.log)):
        return f"{type(e).__name__}({_print(e.args[0])})"
    if isinstance(e, ProfileNode):
        return f"{type(e).__name__}({_print(e.args[0])})"
    raise TypeError(f"cannot print node {type(e).__name__}")


def parse_scalar(text: str, chart) -> sp.Expr:
    """Parse ``text`` in the scalar grammar over the coordinates of ``chart``."""
    from .parsing import parse_expression

    return parse_expression(text, _names(chart), allow_forms=False)


def free_coords(e) -> set[str]:
    return {s.name for s in sp.sympify(e).free_symbols}


def substitute(e, values: Mapping[str, object]) -> sp.Expr:
    return sp.sympify(e).xreplace({coord(k): sp.sympify(v) for k, v in values.items()})


def exact(x) -> sp.Expr:
    """Exact rational from a float/str/int, e.g. ``exact(0.1) == 1/10``."""
    if isinstance(x, sp.Basic):
        return x
    if isinstance(x, float):
        return sp.Rational(repr(x))
    return sp.Rational(x)


def all_nodes_supported(e) -> bool:
    for node in sp.preorder_traversal(sp.sympify(e)):
        if node.is_Number or node.is_Symbol or node.is_Add or node.is_Mul:
            continue
        if node.is_Pow and node.exp.is_Integer:
            continue
        if isinstance(node, (sp.sin, sp.cos, sp.exp, sp.log, ProfileNode)):
            continue
        return False
    return True


def symbols_of(names: Iterable[str]) -> list[sp.Symbol]:
    return [coord(n) for n in names]


def collect_points(names: Sequence[str], pts: np.ndarray) -> list[dict[str, float]]:
    return [dict(zip(names, map(float, row))) for row in np.atleast_2d(pts)]

"""Piecewise profile functions with Hermite-blended joins.

A :class:`Piecewise1D` is a list of contiguous pieces covering the real
line. Symbolic pieces hold a sympy expression in ``x``; join pieces hold a
polynomial in the local variable s = (x - lo)/(hi - lo), built by
Bernstein-form Hermite interpolation.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb

import numpy as np
import sympy as sp
from numpy.polynomial import Polynomial
from scipy.interpolate import BPoly

X = sp.Symbol("x", real=True)


class ProfileError(ValueError):
    """A profile failed one of its construction invariants."""


# ----------------------------------------------------------------------------
# pieces


class SymPiece:
    __slots__ = ("lo", "hi", "expr", "_fns")

    def __init__(self, lo: float, hi: float, expr):
        self.lo, self.hi = float(lo), float(hi)
        self.expr = sp.sympify(expr)
        self._fns: dict[int, object] = {}

    def _fn(self, order: int):
        fn = self._fns.get(order)
        if fn is None:
            e = sp.diff(self.expr, X, order) if order else self.expr
            fn = sp.lambdify(X, e, modules=["numpy"])
            self._fns[order] = fn
        return fn

    def evaluate(self, x: np.ndarray, order: int = 0) -> np.ndarray:
        with np.errstate(all="ignore"):
            out = self._fn(order)(x)
        return np.broadcast_to(np.asarray(out, dtype=float), np.shape(x)).copy()

    def clip(self, lo, hi):
        return SymPiece(lo, hi, self.expr)

    def transform(self, fn_sym, fn_poly):
        return SymPiece(self.lo, self.hi, fn_sym(self.expr))

    def describe(self) -> dict:
        return {"interval": [self.lo, self.hi], "kind": "symbolic", "expr": str(self.expr)}


class PolyPiece:
    __slots__ = ("lo", "hi", "poly")

    def __init__(self, lo: float, hi: float, poly: Polynomial):
        self.lo, self.hi = float(lo), float(hi)
        self.poly = poly

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def evaluate(self, x: np.ndarray, order: int = 0) -> np.ndarray:
        s = (np.asarray(x, dtype=float) - self.lo) / self.width
        p = self.poly.deriv(order) if order else self.poly
        return p(s) / self.width ** order

    def clip(self, lo, hi):
        w = self.width
        local = Polynomial([(lo - self.lo) / w, (hi - lo) / w])
        return PolyPiece(lo, hi, self.poly(local))

    def transform(self, fn_sym, fn_poly):
        return PolyPiece(self.lo, self.hi, fn_poly(self))

    def describe(self) -> dict:
        return {"interval": [self.lo, self.hi], "kind": "hermite", "degree": int(self.poly.degree())}


def _bernstein_to_power(c: np.ndarray) -> Polynomial:
    n = len(c) - 1
    out = Polynomial([0.0])
    s = Polynomial([0.0, 1.0])
    one_minus = Polynomial([1.0, -1.0])
    for a, ca in enumerate(c):
        out = out + ca * comb(n, a) * s ** a * one_minus ** (n - a)
    return out


def hermite_piece(lo: float, hi: float, left: list[float], right: list[float]) -> PolyPiece:
    """Polynomial matching value and derivatives ``left`` at lo, ``right`` at hi."""
    w = hi - lo
    ls = [v * w ** j for j, v in enumerate(left)]
    rs = [v * w ** j for j, v in enumerate(right)]
    bp = BPoly.from_derivatives([0.0, 1.0], [ls, rs])
    return PolyPiece(lo, hi, _bernstein_to_power(bp.c[:, 0]))


# ----------------------------------------------------------------------------
# piecewise functions

_counter = itertools.count()


class Piecewise1D:
    """Contiguous pieces covering (-inf, inf); evaluation is vectorized."""

    def __init__(self, pieces, name: str):
        pieces = sorted(pieces, key=lambda p: p.lo)
        for a, b in zip(pieces, pieces[1:]):
            if not math.isclose(a.hi, b.lo, rel_tol=1e-12, abs_tol=1e-15):
                raise ProfileError(f"pieces do not meet: {a.hi} vs {b.lo}")
        if pieces[0].lo != -math.inf or pieces[-1].hi != math.inf:
            raise ProfileError("pieces must cover the real line")
        self.pieces = pieces
        self.knots = np.array([p.lo for p in pieces[1:]])
        self.name = f"{name}_{next(_counter)}"

    def piece_index(self, x: np.ndarray) -> np.ndarray:
        return np.searchsorted(self.knots, x, side="right")

    def evaluate(self, x, order: int = 0) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        flat = x.ravel()
        out = np.empty_like(flat)
        idx = self.piece_index(flat)
        for i in np.unique(idx):
            sel = idx == i
            out[sel] = self.pieces[i].evaluate(flat[sel], order)
        return out.reshape(x.shape)

    def __call__(self, x, order: int = 0):
        return self.evaluate(x, order)

    def one_sided(self, x: float, order: int, side: str) -> float:
        """Value of the piece left or right of a knot, evaluated at the knot."""
        i = int(self.piece_index(np.array([x]))[0])
        if side == "left" and i > 0 and math.isclose(self.pieces[i].lo, x, abs_tol=1e-15):
            i -= 1
        return float(self.pieces[i].evaluate(np.array([x]), order)[0])

    # -- transforms ------------------------------------------------------
    def transform(self, fn_sym, fn_poly, name: str) -> "Piecewise1D":
        return Piecewise1D([p.transform(fn_sym, fn_poly) for p in self.pieces], name)

    def derivative(self) -> "Piecewise1D":
        return self.transform(
            lambda e: sp.diff(e, X),
            lambda p: p.poly.deriv() / p.width,
            self.name.rsplit("_", 1)[0] + "_d",
        )

    def times_power(self, m: int, name: str | None = None) -> "Piecewise1D":
        def poly(p):
            return p.poly * Polynomial([p.lo, p.width]) ** m

        return self.transform(lambda e: sp.cancel(e * X ** m), poly, name or self.name.rsplit("_", 1)[0] + f"_x{m}")

    def shifted(self, c: float, name: str | None = None) -> "Piecewise1D":
        """x -> f(x - c)."""
        out = []
        for p in self.pieces:
            if isinstance(p, SymPiece):
                out.append(SymPiece(p.lo + c, p.hi + c, p.expr.xreplace({X: X - c})))
            else:
                out.append(PolyPiece(p.lo + c, p.hi + c, p.poly))
        return Piecewise1D(out, name or self.name.rsplit("_", 1)[0] + "_sh")

    def scaled(self, sign: float = 1.0) -> "Piecewise1D":
        return self.transform(lambda e: sign * e, lambda p: sign * p.poly, self.name.rsplit("_", 1)[0] + "_neg")

    def splice(self, inner: "Piecewise1D", lo: float, hi: float, name: str) -> "Piecewise1D":
        """``inner`` on [lo, hi], ``self`` elsewhere."""
        out = []
        for p in self.pieces:
            if p.hi <= lo or p.lo >= hi:
                out.append(p)
                continue
            if p.lo < lo:
                out.append(p.clip(p.lo, lo) if isinstance(p, PolyPiece) else SymPiece(p.lo, lo, p.expr))
            if p.hi > hi:
                out.append(p.clip(hi, p.hi) if isinstance(p, PolyPiece) else SymPiece(hi, p.hi, p.expr))
        for p in inner.pieces:
            a, b = max(p.lo, lo), min(p.hi, hi)
            if a < b:
                out.append(p.clip(a, b))
        return Piecewise1D(out, name)

    def describe(self) -> list[dict]:
        return [p.describe() for p in self.pieces]


def _reflect_piece(p, parity: int):
    """Image of a piece under x -> -x; parity +1 even, -1 odd."""
    if isinstance(p, SymPiece):
        return SymPiece(-p.hi, -p.lo, parity * p.expr.xreplace({X: -X}))
    return PolyPiece(-p.hi, -p.lo, parity * p.poly(Polynomial([1.0, -1.0])))


def symmetric(right_pieces, parity: int, name: str, center=None) -> Piecewise1D:
    """Extend pieces on [0, inf) (plus an optional central piece) by symmetry."""
    pieces = list(right_pieces) + [_reflect_piece(p, parity) for p in right_pieces]
    if center is not None:
        pieces.append(center)
    return Piecewise1D(pieces, name)


# ----------------------------------------------------------------------------
# joins


def _derivs(expr, x0: float, r: int) -> list[float]:
    return [float(sp.diff(expr, X, j).subs(X, x0)) if j else float(expr.subs(X, x0)) for j in range(r + 1)]


def _monotone(pieces, sign: int, n: int = 2001) -> bool:
    for p in pieces:
        xs = np.linspace(p.lo, p.hi, n)
        d = p.evaluate(xs, 1) * sign
        if not np.all(d > 0):
            return False
    return True


def monotone_join(lo, hi, left_expr, right_expr, r: int, sign: int, odd: bool = False):
    """Hermite join of two symbolic pieces with derivative sign ``sign``.

    Subdivides once at the midpoint if the single join is not monotone.
    Returns the list of join pieces.
    """
    left = _derivs(left_expr, lo, r)
    right = _derivs(right_expr, hi, r)
    single = hermite_piece(lo, hi, left, right)
    if _monotone([single], sign):
        return [single]
    mid = 0.5 * (lo + hi)
    value = 0.0 if odd else float(single.evaluate(np.array([mid]))[0])
    slope = (right[0] - left[0]) / (hi - lo)
    mid_data = [value, slope] + [0.0] * (r - 1)
    pair = [hermite_piece(lo, mid, left, mid_data), hermite_piece(mid, hi, mid_data, right)]
    if _monotone(pair, sign):
        return pair
    blend = blend_piece(lo, hi, left_expr, right_expr, r)
    if _monotone([blend], sign):
        return [blend]
    raise ProfileError(f"join on [{lo:g}, {hi:g}] is not monotone after subdivision")


@lru_cache(maxsize=None)
def smoothstep(r: int) -> sp.Expr:
    """Polynomial ψ on [0, 1]: ψ(0)=0, ψ(1)=1, derivatives 1..r vanish at both ends."""
    p = hermite_piece(0.0, 1.0, [0.0] * (r + 1), [1.0] + [0.0] * r).poly
    s = sp.Symbol("s")
    return sum(sp.nsimplify(round(c)) * s ** i for i, c in enumerate(p.coef))


def blend_piece(lo: float, hi: float, left_expr, right_expr, r: int) -> SymPiece:
    """(1 − ψ) A + ψ B with ψ the order-r smoothstep in (x − lo)/(hi − lo).

    Matches A to order r at lo and B to order r at hi. When A < B and both
    increase, every term of the derivative is positive.
    """
    lo_q, w_q = sp.nsimplify(lo, rational=True), sp.nsimplify(hi - lo, rational=True)
    psi = smoothstep(r).xreplace({sp.Symbol("s"): (X - lo_q) / w_q})
    return SymPiece(lo, hi, (1 - psi) * left_expr + psi * right_expr)


def join_order(k: int) -> int:
    return max(2, min(4, 2 * k + 1))


# ----------------------------------------------------------------------------
# the five profile kinds

KINDS = ("desing-even", "desing-odd", "sing-even", "sing-odd", "sing-onesided")


def order_of(kind: str, k: int) -> int:
    """Singularity order m served by a profile."""
    if kind in ("desing-even", "sing-even"):
        return 2 * k
    return 2 * k + 1


@dataclass
class ProfileFn:
    kind: str
    k: int
    eps: float
    m: int
    f: Piecewise1D
    join_order: int
    outer: dict[str, str]
    singular_points: tuple[float, ...] = ()
    checks: dict[str, bool] = field(default_factory=dict)

    @property
    def name(self) -> str:
        return self.f.name

    def evaluate(self, x, order: int = 0):
        return self.f.evaluate(x, order)

    def __call__(self, x, order: int = 0):
        return self.f.evaluate(x, order)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "k": self.k,
            "m": self.m,
            "eps": self.eps,
            "join_order": self.join_order,
            "outer_pieces": self.outer,
            "pieces": self.f.describe(),
            "singular_points": list(self.singular_points),
            "checks": self.checks,
        }


def _scale_base(pieces, eps: float, power: int):
    """f_ε(x) = ε^{-power} f(x/ε) piecewise."""
    out = []
    c = eps ** (-power)
    for p in pieces:
        lo, hi = p.lo * eps, p.hi * eps
        if isinstance(p, SymPiece):
            e = sp.nsimplify(c, rational=True) * p.expr.xreplace({X: X / sp.nsimplify(eps, rational=True)})
            out.append(SymPiece(lo, hi, e))
        else:
            out.append(PolyPiece(lo, hi, c * p.poly))
    return out


def _desing_even(k: int, eps: float):
    if k < 1:
        raise ProfileError("desing-even needs k >= 1")
    r = join_order(k)
    q = 2 * k - 1
    right = -1 / (q * X ** q) + 2
    left = -1 / (q * X ** q) - 2
    join = monotone_join(-1.0, 1.0, left, right, r, +1, odd=True)
    base = [SymPiece(-math.inf, -1.0, left)] + join + [SymPiece(1.0, math.inf, right)]
    f = Piecewise1D(_scale_base(base, eps, q), f"fdes_even_k{k}")
    outer = {"x<-1": str(left), "x>1": str(right)}
    return f, r, outer, ()


def _desing_odd(k: int, eps: float):
    if k < 0:
        raise ProfileError("desing-odd needs k >= 0")
    r = join_order(k)
    inner = X ** 2 - 2
    out_expr = sp.log(X) if k == 0 else -1 / (2 * k * X ** (2 * k))
    join = monotone_join(1.0, 2.0, inner, out_expr, r, +1)
    right = [SymPiece(0.0, 1.0, inner)] + join + [SymPiece(2.0, math.inf, out_expr)]
    base = right + [_reflect_piece(p, +1) for p in right]
    f = Piecewise1D(_scale_base(base, eps, 2 * k), f"fdes_odd_k{k}")
    outer_txt = "log|x|" if k == 0 else str(-1 / (2 * k * X ** (2 * k)))
    return f, r, {"|x|<=1": str(inner), "|x|>2": outer_txt}, ()


def _sing_even(k: int, eps: float):
    if k < 1:
        raise ProfileError("sing-even needs k >= 1")
    r = join_order(k)
    q = 2 * k - 1
    sing = -1 / X ** q
    join = monotone_join(eps, 2 * eps, sing, X, r, +1)
    right = [SymPiece(0.0, eps, sing)] + join + [SymPiece(2 * eps, math.inf, X)]
    f = symmetric(right, -1, f"sing_even_k{k}")
    return f, r, {"0<|x|<=eps": str(sing), "|x|>=2eps": "x"}, (0.0,)


def _sing_odd(k: int, eps: float):
    if k < 0:
        raise ProfileError("sing-odd needs k >= 0")
    r = join_order(k)
    c = sp.nsimplify(sp.Rational(3, 8) * sp.nsimplify(eps, rational=True))
    w = X - c
    sing = sp.log(w) if k == 0 else -1 / (2 * k * w ** (2 * k))
    # log|w| on the left half: use log(c - x) there
    sing_left = sp.log(c - X) if k == 0 else sing
    a, b, d = eps / 4, eps / 2, 3 * eps / 4
    join = monotone_join(b, d, sing, X, r, +1)
    right = [SymPiece(a, 3 * eps / 8, sing_left), SymPiece(3 * eps / 8, b, sing)] + join + [SymPiece(d, math.inf, X)]
    mirror = [_reflect_piece(p, -1) for p in right]
    # central odd join on [-eps/4, eps/4], decreasing
    left_mirror = -sing_left.xreplace({X: -X})
    center = monotone_join(-a, a, left_mirror, sing_left, r, -1, odd=True)
    f = Piecewise1D(right + mirror + center, f"sing_odd_k{k}")
    txt = "log|t-3eps/8|" if k == 0 else f"-1/({2 * k}*(t-3eps/8)^{2 * k})"
    return f, r, {"eps/4<=t<=eps/2": txt, "|t|>=3eps/4": "t"}, (-3 * eps / 8, 3 * eps / 8)


def _sing_onesided(k: int, eps: float):
    if k < 0:
        raise ProfileError("sing-onesided needs k >= 0")
    r = join_order(k)
    sing = sp.log(X) if k == 0 else -1 / (2 * k * X ** (2 * k))
    join = monotone_join(eps, 2 * eps, sing, X, r, +1)
    right = [SymPiece(0.0, eps, sing)] + join + [SymPiece(2 * eps, math.inf, X)]
    f = symmetric(right, +1, f"sing_onesided_k{k}")
    txt = "log(t)" if k == 0 else str(sing)
    return f, r, {"0<t<=eps": txt, "t>=2eps": "t", "t<0": "even extension"}, (0.0,)


_BUILDERS = {
    "desing-even": _desing_even,
    "desing-odd": _desing_odd,
    "sing-even": _sing_even,
    "sing-odd": _sing_odd,
    "sing-onesided": _sing_onesided,
}


@lru_cache(maxsize=None)
def build_profile(kind: str, k: int, eps: float) -> ProfileFn:
    """Construct and verify a profile; raises :class:`ProfileError` on failure."""
    if kind not in _BUILDERS:
        raise ProfileError(f"unknown profile kind {kind!r}")
    if not eps > 0:
        raise ProfileError("eps must be positive")
    f, r, outer, sing = _BUILDERS[kind](int(k), float(eps))
    prof = ProfileFn(kind, int(k), float(eps), order_of(kind, k), f, r, outer, tuple(sing))
    prof.checks = verify_profile(prof)
    failed = [name for name, ok in prof.checks.items() if not ok]
    if failed:
        raise ProfileError(f"{kind} k={k} eps={eps}: failed {', '.join(failed)}")
    return prof


# ----------------------------------------------------------------------------
# invariants


def _grid(prof: ProfileFn, n: int = 1000) -> np.ndarray:
    span = 3.0 * prof.eps
    xs = np.linspace(-span, span, n)
    keep = np.ones_like(xs, dtype=bool)
    for s in prof.singular_points:
        keep &= np.abs(xs - s) > 1e-9 * prof.eps
    return xs[keep]


def _piece_scale(p, j: int) -> float:
    lo = p.lo if math.isfinite(p.lo) else p.hi - 1.0
    hi = p.hi if math.isfinite(p.hi) else p.lo + 1.0
    v = p.evaluate(np.linspace(lo, hi, 11), j)
    v = v[np.isfinite(v)]
    return float(np.max(np.abs(v))) if v.size else 0.0


def _continuity(prof: ProfileFn) -> bool:
    f = prof.f
    for x0 in f.knots:
        if any(abs(x0 - s) < 1e-12 for s in prof.singular_points):
            continue
        i = int(f.piece_index(np.array([x0]))[0])
        for j in range(prof.join_order + 1):
            a = f.one_sided(x0, j, "left")
            b = f.one_sided(x0, j, "right")
            # roundoff in high derivatives scales with their size on the adjacent pieces
            scale = max(1.0, abs(a), abs(b), _piece_scale(f.pieces[i - 1], j), _piece_scale(f.pieces[i], j))
            if abs(a - b) > 1e-6 * scale:
                return False
    return True


def verify_profile(prof: ProfileFn) -> dict[str, bool]:
    f, eps, k = prof.f, prof.eps, prof.k
    xs = _grid(prof)
    val = f.evaluate(xs)
    der = f.evaluate(xs, 1)
    fin = np.isfinite(val) & np.isfinite(der)
    checks = {"continuity": _continuity(prof)}
    if prof.kind == "desing-even":
        checks["odd"] = bool(np.allclose(f.evaluate(-xs), -val, rtol=1e-9, atol=1e-9))
        checks["derivative positive"] = bool(np.all(der > 0))
        q = 2 * k - 1
        far = np.array([1.5, 2.5, 5.0]) * eps
        exact = eps ** (-q) * (-1 / (q * (far / eps) ** q) + 2)
        checks["outer pieces"] = bool(np.allclose(f.evaluate(far), exact, rtol=1e-10)
                                      and np.allclose(f.evaluate(-far), -exact, rtol=1e-10))
    elif prof.kind == "desing-odd":
        checks["even"] = bool(np.allclose(f.evaluate(-xs), val, rtol=1e-9, atol=1e-9))
        nz = np.abs(xs) > 1e-9 * eps
        checks["derivative sign"] = bool(np.all(np.sign(der[nz]) == np.sign(xs[nz])))
        near = np.linspace(-0.5, 0.5, 101) * eps
        near = near[near != 0]
        ratio = f.evaluate(near, 1) / near
        checks["simple zero at 0"] = bool(np.min(ratio) > 0 and abs(float(f.evaluate(np.array([0.0]), 1)[0])) < 1e-12)
        far = np.array([2.5, 4.0]) * eps
        want = np.log(far) if k == 0 else -1 / (2 * k * far ** (2 * k))
        if k == 0:
            want = want - math.log(eps)
        checks["outer pieces"] = bool(np.allclose(f.evaluate(far), want, rtol=1e-9)
                                      and np.allclose(f.evaluate(far, 1), far ** (-(2 * k + 1)), rtol=1e-9))
    elif prof.kind == "sing-even":
        checks["odd"] = bool(np.allclose(f.evaluate(-xs), -val, rtol=1e-9, atol=1e-9))
        checks["derivative positive"] = bool(np.all(der[fin] > 0))
        q = 2 * k - 1
        pts = np.array([0.3, 0.5, 1.0]) * eps
        far = np.array([2.0, 2.5, 4.0]) * eps
        checks["outer pieces"] = bool(np.allclose(f.evaluate(pts), -1 / pts ** q, rtol=1e-10)
                                      and np.allclose(f.evaluate(far), far, rtol=1e-12))
    elif prof.kind == "sing-odd":
        checks["odd"] = bool(np.allclose(f.evaluate(-xs[fin]), -val[fin], rtol=1e-9, atol=1e-9))
        checks["derivative nonzero"] = bool(np.all(np.abs(der[fin]) > 0))
        c = 3 * eps / 8
        pts = np.array([0.26, 0.3, 0.45, 0.49]) * eps
        want = np.log(np.abs(pts - c)) if k == 0 else -1 / (2 * k * (pts - c) ** (2 * k))
        far = np.array([0.75, 0.9, 1.0, 3.0]) * eps
        checks["outer pieces"] = bool(np.allclose(f.evaluate(pts), want, rtol=1e-10)
                                      and np.allclose(f.evaluate(far), far, rtol=1e-12))
        cen = np.linspace(-eps / 4, eps / 4, 401)
        checks["central join decreasing"] = bool(np.all(f.evaluate(cen, 1) < 0))
    elif prof.kind == "sing-onesided":
        checks["even"] = bool(np.allclose(f.evaluate(-xs[fin]), val[fin], rtol=1e-9, atol=1e-9))
        pos = xs[fin] > 0
        checks["derivative positive for t>0"] = bool(np.all(der[fin][pos] > 0))
        pts = np.array([0.3, 0.9]) * eps
        want = np.log(pts) if k == 0 else -1 / (2 * k * pts ** (2 * k))
        far = np.array([2.0, 3.0]) * eps
        checks["outer pieces"] = bool(np.allclose(f.evaluate(pts), want, rtol=1e-10)
                                      and np.allclose(f.evaluate(far), far, rtol=1e-12))
    return checks

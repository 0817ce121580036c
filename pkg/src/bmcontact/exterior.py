"""Exterior calculus over the b^m frame of a chart.

Frame slot 0 is the defining coordinate when the chart has one. On a
singular chart slot 0 carries σ = dz/z^m (forms) and ζ = z^m ∂z (vectors);
otherwise it carries dz and ∂z. Because the frame commutes, d, the Lie
bracket and the Schouten bracket reduce to coordinate formulas in the frame
derivatives e_i = ζ or ∂x_i.
"""

from __future__ import annotations

from contextlib import contextmanager
from contextvars import ContextVar
from itertools import combinations
from types import MappingProxyType
from typing import Callable, Iterable, Mapping

import numpy as np
import sympy as sp

from . import scalar as S
from .chart import Chart, ChartError
from .parsing import FormOps, parse_expression

_LAZY: ContextVar[bool] = ContextVar("lazy", default=False)


@contextmanager
def lazy():
    """Skip coefficient simplification; for results that are only evaluated numerically."""
    token = _LAZY.set(True)
    try:
        yield
    finally:
        _LAZY.reset(token)


class ChartMismatchError(ValueError):
    pass


class CompatibilityError(ValueError):
    """A chart map does not respect the defining functions."""


class UnsupportedDegreeError(ValueError):
    pass


Blade = tuple[int, ...]


def _sort_sign(seq: Iterable[int]) -> tuple[int, Blade | None]:
    """Sign of the sorting permutation, or (0, None) on a repeated index."""
    s = list(seq)
    if len(set(s)) != len(s):
        return 0, None
    sign = 1
    for i in range(len(s)):
        for j in range(len(s) - 1 - i):
            if s[j] > s[j + 1]:
                s[j], s[j + 1] = s[j + 1], s[j]
                sign = -sign
    return sign, tuple(s)


class _Alternating:
    """Shared storage for forms and multivector fields: blade -> coefficient."""

    __slots__ = ("chart", "degree", "_c")
    kind = "alt"

    def __init__(self, chart: Chart, degree: int, coeffs: Mapping[Blade, object] | None = None,
                 simplify: bool = True):
        if degree < 0 or degree > chart.dim:
            raise UnsupportedDegreeError(f"degree {degree} out of range for a {chart.dim}-dimensional chart")
        out: dict[Blade, sp.Expr] = {}
        for blade, c in (coeffs or {}).items():
            blade = tuple(blade)
            if len(blade) != degree or any(b < 0 or b >= chart.dim for b in blade):
                raise ValueError(f"bad blade {blade} for degree {degree}")
            if list(blade) != sorted(set(blade)):
                raise ValueError(f"blade {blade} must be strictly increasing")
            c = S.simplify(c) if simplify and not _LAZY.get() else sp.sympify(c)
            if c != 0:
                out[blade] = c
        self.chart = chart
        self.degree = degree
        self._c = MappingProxyType(dict(sorted(out.items())))

    # -- access -------------------------------------------------------------
    @property
    def coeffs(self) -> Mapping[Blade, sp.Expr]:
        return self._c

    def __getitem__(self, blade) -> sp.Expr:
        return self._c.get(tuple(blade), S.ZERO)

    def items(self):
        return self._c.items()

    def is_zero(self) -> bool:
        return not self._c

    def _new(self, coeffs, degree=None, chart=None, simplify=True):
        return type(self)(chart or self.chart, self.degree if degree is None else degree, coeffs, simplify)

    def _check(self, other):
        if not isinstance(other, _Alternating) or other.kind != self.kind:
            raise TypeError(f"cannot combine {self.kind} with {type(other).__name__}")
        if other.chart != self.chart:
            raise ChartMismatchError("operands live on different charts")

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, _Alternating) and sp.sympify(other) == 0:
            return self
        self._check(other)
        if other.degree != self.degree:
            raise ValueError("cannot add objects of different degree")
        out = dict(self._c)
        for b, c in other.items():
            out[b] = out.get(b, 0) + c
        return self._new(out)

    __radd__ = __add__

    def __neg__(self):
        return self._new({b: -c for b, c in self.items()}, simplify=False)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, f):
        if isinstance(f, _Alternating):
            return NotImplemented
        f = sp.sympify(f)
        return self._new({b: f * c for b, c in self.items()})

    __rmul__ = __mul__

    def __truediv__(self, f):
        return self * sp.Pow(sp.sympify(f), -1)

    def __eq__(self, other):
        return (isinstance(other, _Alternating) and other.kind == self.kind and other.chart == self.chart
                and other.degree == self.degree and dict(other._c) == dict(self._c))

    def __hash__(self):
        return hash((self.kind, self.chart, self.degree, tuple(self._c.items())))

    def map(self, fn: Callable[[sp.Expr], sp.Expr]):
        return self._new({b: fn(c) for b, c in self.items()})

    def xreplace(self, values: Mapping[str, object]):
        return self.map(lambda c: S.substitute(c, values))

    def on_chart(self, chart: Chart):
        """Same coefficients viewed on another chart with the same frame."""
        if chart.frame != self.chart.frame:
            raise ChartMismatchError("frames differ")
        return self._new(dict(self._c), chart=chart, simplify=False)

    # -- numerics -----------------------------------------------------------
    def values(self, points: np.ndarray) -> dict[Blade, np.ndarray]:
        return {b: S.evaluate_grid(c, self.chart, points) for b, c in self.items()}

    def max_abs(self, points: np.ndarray) -> float:
        worst = 0.0
        for v in self.values(points).values():
            if v.size:
                if not np.all(np.isfinite(v)):
                    return float("inf")
                worst = max(worst, float(np.max(np.abs(v))))
        return worst

    def at(self, point: Mapping[str, float]) -> dict[Blade, float]:
        return {b: S.evaluate(c, point) for b, c in self.items()}

    # -- display ------------------------------------------------------------
    def blade_name(self, blade: Blade) -> str:
        raise NotImplementedError

    def to_dict(self) -> dict[str, str]:
        return {self.blade_name(b): S.to_text(c) for b, c in self.items()}

    def __repr__(self):
        body = ", ".join(f"{k}: {v}" for k, v in self.to_dict().items()) or "0"
        return f"{type(self).__name__}[{self.degree}]({body})"


class BForm(_Alternating):
    kind = "form"

    def blade_name(self, blade):
        names = [_covector_name(self.chart, i) for i in blade]
        return "^".join(names) if names else "1"

    def to_text(self) -> str:
        """Form literal accepted by :func:`parse_form`."""
        if self.is_zero():
            return "0"
        terms = []
        for b, c in self.items():
            atoms = [("B" if (i == 0 and self.chart.singular) else f"D({self.chart.frame[i]})") for i in b]
            if not atoms:
                terms.append(f"({S.to_text(c)})")
                continue
            basis = atoms[0] if len(atoms) == 1 else f"W({', '.join(atoms)})"
            terms.append(f"({S.to_text(c)})*{basis}")
        return " + ".join(terms)


class BMultiVector(_Alternating):
    kind = "multivector"

    def blade_name(self, blade):
        names = [_vector_name(self.chart, i) for i in blade]
        return "^".join(names) if names else "1"


def _covector_name(chart: Chart, i: int) -> str:
    if i == 0 and chart.singular:
        return "sigma"
    return "d" + chart.frame[i]


def _vector_name(chart: Chart, i: int) -> str:
    if i == 0 and chart.singular:
        return "zeta"
    return "d/d" + chart.frame[i]


# ----------------------------------------------------------------------------
# constructors


def zero_form(chart: Chart, degree: int) -> BForm:
    return BForm(chart, degree, {})


def function(chart: Chart, f) -> BForm:
    return BForm(chart, 0, {(): f})


def sigma(chart: Chart) -> BForm:
    if not chart.singular:
        raise ChartError("σ exists only on singular charts")
    return BForm(chart, 1, {(0,): 1})


def basis_covector(chart: Chart, slot: int) -> BForm:
    return BForm(chart, 1, {(slot,): 1})


def basis_vector(chart: Chart, slot: int) -> BMultiVector:
    return BMultiVector(chart, 1, {(slot,): 1})


def dcoord(chart: Chart, name: str) -> BForm:
    """The differential of a coordinate; dz = z^m σ on singular charts."""
    i = chart.slot(name)
    if i == 0 and chart.singular:
        return BForm(chart, 1, {(0,): chart.zsym ** chart.m})
    return basis_covector(chart, i)


def partial(chart: Chart, name: str) -> BMultiVector:
    """∂/∂name; on a singular chart ∂/∂z is not a b-field, use ζ instead."""
    i = chart.slot(name)
    if i == 0 and chart.singular:
        raise ChartError("∂/∂z is not a smooth b-vector field; use zeta()")
    return basis_vector(chart, i)


def zeta(chart: Chart) -> BMultiVector:
    if not chart.singular:
        raise ChartError("ζ exists only on singular charts")
    return basis_vector(chart, 0)


def one_form(chart: Chart, coeffs: Mapping[str, object]) -> BForm:
    """Degree-1 form from a map frame name -> coefficient ("sigma" for σ)."""
    out = {}
    for k, c in coeffs.items():
        slot = 0 if (k == "sigma" and chart.singular) else chart.slot(k)
        out[(slot,)] = out.get((slot,), 0) + c
    return BForm(chart, 1, out)


def vector_field(chart: Chart, coeffs: Mapping[str, object]) -> BMultiVector:
    """Degree-1 multivector from frame name -> coefficient ("zeta" for ζ)."""
    out = {}
    for k, c in coeffs.items():
        slot = 0 if (k == "zeta" and chart.singular) else chart.slot(k)
        if slot == 0 and chart.singular and k != "zeta":
            raise ChartError("use 'zeta' for the singular direction")
        out[(slot,)] = out.get((slot,), 0) + c
    return BMultiVector(chart, 1, out)


# ----------------------------------------------------------------------------
# algebra


def wedge(a: _Alternating, b: _Alternating) -> _Alternating:
    a._check(b)
    deg = a.degree + b.degree
    if deg > a.chart.dim:
        return _Overflow(a.chart, deg, a.kind)
    out: dict[Blade, sp.Expr] = {}
    for ba, ca in a.items():
        for bb, cb in b.items():
            sign, blade = _sort_sign(ba + bb)
            if sign:
                out[blade] = out.get(blade, 0) + sign * ca * cb
    return type(a)(a.chart, deg, out)


class _Overflow:
    """The zero object in a degree above the chart dimension."""

    coeffs = MappingProxyType({})

    def __init__(self, chart, degree, kind):
        self.chart, self.degree, self.kind = chart, degree, kind

    def is_zero(self):
        return True

    def items(self):
        return iter(())

    def max_abs(self, points):
        return 0.0

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __sub__(self, other):
        return self

    def __neg__(self):
        return self

    def __mul__(self, f):
        return self

    __rmul__ = __mul__

    def __repr__(self):
        return f"zero[{self.degree}]"


def wedge_all(items: Iterable[_Alternating]) -> _Alternating:
    items = list(items)
    out = items[0]
    for x in items[1:]:
        out = wedge(out, x)
    return out


def power(a: _Alternating, k: int) -> _Alternating:
    """k-fold wedge power (k >= 0)."""
    if k == 0:
        return type(a)(a.chart, 0, {(): 1})
    return wedge_all([a] * k)


def frame_derivative(chart: Chart, slot: int, f) -> sp.Expr:
    """e_slot(f): ζ(f) = z^m ∂f/∂z on the singular slot, ∂f/∂x otherwise."""
    name = chart.frame[slot]
    d = S.diff(f, name)
    if slot == 0 and chart.singular:
        e = chart.zsym ** chart.m * d
        return e if _LAZY.get() else S.simplify(e)
    return d


def ext_d(w: BForm) -> BForm:
    """Exterior derivative with dσ = 0 and the graded Leibniz rule."""
    if not isinstance(w, BForm):
        raise TypeError("ext_d expects a BForm")
    ch = w.chart
    if w.degree + 1 > ch.dim:
        return _Overflow(ch, w.degree + 1, "form")
    out: dict[Blade, sp.Expr] = {}
    for blade, c in w.items():
        for j in range(ch.dim):
            if j in blade:
                continue
            dc = frame_derivative(ch, j, c)
            if dc == 0:
                continue
            sign, b = _sort_sign((j,) + blade)
            out[b] = out.get(b, 0) + sign * dc
    return BForm(ch, w.degree + 1, out)


def d(f_or_form, chart: Chart | None = None) -> BForm:
    if isinstance(f_or_form, BForm):
        return ext_d(f_or_form)
    return ext_d(function(chart, f_or_form))


def decompose(w: BForm) -> tuple[BForm, BForm]:
    """Split ω = σ∧α + β with α, β free of σ."""
    ch = w.chart
    if not ch.singular or w.degree == 0:
        return zero_form(ch, max(w.degree - 1, 0)), w
    alpha, beta = {}, {}
    for blade, c in w.items():
        if blade and blade[0] == 0:
            alpha[blade[1:]] = c
        else:
            beta[blade] = c
    return BForm(ch, w.degree - 1, alpha), BForm(ch, w.degree, beta)


def reassemble(alpha: BForm, beta: BForm) -> BForm:
    return wedge(sigma(alpha.chart), alpha) + beta


def sigma_coefficient(w: BForm) -> sp.Expr:
    """u in ω = u σ + β for a 1-form (0 on smooth charts)."""
    if w.degree != 1:
        raise ValueError("sigma_coefficient needs a 1-form")
    return w[(0,)] if w.chart.singular else S.ZERO


def interior(X: BMultiVector, w: BForm) -> BForm:
    """ι_X ω for a vector field X."""
    if X.chart != w.chart:
        raise ChartMismatchError("interior: charts differ")
    if X.degree != 1:
        raise UnsupportedDegreeError("interior product needs a vector field")
    if w.degree == 0:
        return zero_form(w.chart, 0)
    out: dict[Blade, sp.Expr] = {}
    for (j,), x in X.items():
        for blade, c in w.items():
            if j not in blade:
                continue
            r = blade.index(j)
            b = blade[:r] + blade[r + 1:]
            out[b] = out.get(b, 0) + (-1) ** r * x * c
    return BForm(w.chart, w.degree - 1, out)


def contract(g: BForm, P: BMultiVector) -> BMultiVector:
    """ι_γ P for a covector γ, so (ι_γ Λ)(δ) = Λ(γ, δ)."""
    if g.chart != P.chart:
        raise ChartMismatchError("contract: charts differ")
    if g.degree != 1:
        raise UnsupportedDegreeError("contract needs a 1-form")
    out: dict[Blade, sp.Expr] = {}
    for (j,), x in g.items():
        for blade, c in P.items():
            if j not in blade:
                continue
            r = blade.index(j)
            b = blade[:r] + blade[r + 1:]
            out[b] = out.get(b, 0) + (-1) ** r * x * c
    return BMultiVector(P.chart, P.degree - 1, out)


def pair(w: BForm, P: BMultiVector) -> sp.Expr:
    """Full pairing of equal-degree form and multivector (determinant convention)."""
    if w.degree != P.degree:
        raise ValueError("pairing needs equal degrees")
    return S.simplify(sum((c * P[b] for b, c in w.items()), S.ZERO))


def evaluate_on(P: BMultiVector, *covectors: BForm) -> sp.Expr:
    """P(γ1, ..., γk)."""
    return pair(wedge_all(covectors), P) if covectors else P[()]


def top_coefficient(w: _Alternating) -> sp.Expr:
    if isinstance(w, _Overflow):
        return S.ZERO
    if w.degree != w.chart.dim:
        raise ValueError("not a top-degree object")
    return w[tuple(range(w.chart.dim))]


# ----------------------------------------------------------------------------
# brackets and Lie derivatives


def lie_bracket(X: BMultiVector, Y: BMultiVector) -> BMultiVector:
    if X.degree != 1 or Y.degree != 1:
        raise UnsupportedDegreeError("lie_bracket needs vector fields")
    X._check(Y)
    ch = X.chart
    out: dict[Blade, sp.Expr] = {}
    for k in range(ch.dim):
        acc = S.ZERO
        for (j,), xj in X.items():
            acc += xj * frame_derivative(ch, j, Y[(k,)])
        for (j,), yj in Y.items():
            acc -= yj * frame_derivative(ch, j, X[(k,)])
        out[(k,)] = acc
    return BMultiVector(ch, 1, out)


def _right_derivative(P: BMultiVector, i: int) -> dict[Blade, sp.Expr]:
    out: dict[Blade, sp.Expr] = {}
    for blade, c in P.items():
        if i in blade:
            k = blade.index(i)
            b = blade[:k] + blade[k + 1:]
            out[b] = out.get(b, 0) + (-1) ** (len(blade) - 1 - k) * c
    return out


def _wedge_raw(ch, a: Mapping[Blade, sp.Expr], b: Mapping[Blade, sp.Expr], acc: dict, scale=1):
    for ba, ca in a.items():
        for bb, cb in b.items():
            sign, blade = _sort_sign(ba + bb)
            if sign:
                acc[blade] = acc.get(blade, 0) + scale * sign * ca * cb


def schouten(P: BMultiVector, Q: BMultiVector, max_degree: int = 2) -> BMultiVector:
    """Schouten–Nijenhuis bracket in the commuting frame.

    [P,Q] = ε (Σ_i ∂_r P/∂θ_i ∧ e_i(Q) − (−1)^{(p−1)(q−1)} ∂_r Q/∂θ_i ∧ e_i(P))
    with ε = (−1)^{(p−1)(q−1)}: the Lie bracket on vector fields, L_X on
    multivectors, and [Λ,Λ] = 2E∧Λ for Jacobi pairs.
    """
    P._check(Q)
    p, q = P.degree, Q.degree
    for deg in (p, q):
        if not 1 <= deg <= max_degree:
            raise UnsupportedDegreeError(f"schouten supports degrees 1..{max_degree}, got {deg}")
    ch = P.chart
    deg = p + q - 1
    if deg > ch.dim:
        return _Overflow(ch, deg, "multivector")
    eps = (-1) ** ((p - 1) * (q - 1))
    sign = -eps
    acc: dict[Blade, sp.Expr] = {}
    for i in range(ch.dim):
        rP, rQ = _right_derivative(P, i), _right_derivative(Q, i)
        if rP:
            eQ = {b: frame_derivative(ch, i, c) for b, c in Q.items()}
            _wedge_raw(ch, rP, eQ, acc)
        if rQ:
            eP = {b: frame_derivative(ch, i, c) for b, c in P.items()}
            _wedge_raw(ch, rQ, eP, acc, scale=sign)
    if eps < 0:
        acc = {b: -c for b, c in acc.items()}
    return BMultiVector(ch, deg, acc)


def lie_derivative(X: BMultiVector, w):
    """L_X on forms (Cartan formula) or multivectors ([X, P])."""
    if isinstance(w, BMultiVector):
        return schouten(X, w, max_degree=max(2, w.degree))
    if X.degree != 1:
        raise UnsupportedDegreeError("Lie derivative along a vector field only")
    dw = ext_d(w)
    first = interior(X, dw) if not isinstance(dw, _Overflow) else zero_form(w.chart, w.degree)
    if w.degree == 0:
        return first
    return first + ext_d(interior(X, w))


# ----------------------------------------------------------------------------
# frame changes


def to_smooth_frame(obj: _Alternating) -> _Alternating:
    """Re-express in the ordinary frame (σ = z^-m dz, ζ = z^m ∂z)."""
    ch = obj.chart
    if not ch.singular:
        return obj
    z, m = ch.zsym, ch.m
    factor = z ** (-m) if isinstance(obj, BForm) else z ** m
    out = {b: (factor * c if b and b[0] == 0 else c) for b, c in obj.items()}
    return type(obj)(ch.smooth(), obj.degree, out)


def from_smooth_form(w: BForm, m: int) -> BForm:
    """Embed a form on a smooth z-chart into the b^m frame: dz = z^m σ."""
    ch = w.chart
    if ch.z is None or ch.m != 0:
        raise ChartError("expected a smooth chart with a distinguished coordinate")
    target = ch.with_order(m)
    z = ch.zsym
    out = {b: (z ** m * c if b and b[0] == 0 else c) for b, c in w.items()}
    return BForm(target, w.degree, out)


def to_dz_form(w: BForm) -> BForm:
    """Partial inverse of :func:`from_smooth_form` (needs z^m | σ-coefficients)."""
    ch = w.chart
    if not ch.singular:
        return w
    z, m = ch.zsym, ch.m
    out = {}
    for b, c in w.items():
        if b and b[0] == 0:
            c = S.simplify(c * z ** (-m))
            if _z_in_denominator(c, z):
                raise CompatibilityError("σ-coefficient is not divisible by z^m")
        out[b] = c
    return BForm(ch.smooth(), w.degree, out)


def _z_in_denominator(c, z) -> bool:
    den = sp.denom(sp.together(c))
    return bool(den.has(z)) and S.simplify(den.xreplace({z: 0})) == 0


# ----------------------------------------------------------------------------
# chart maps


class ChartMap:
    """A map source -> target, given by target-coordinate expressions."""

    def __init__(self, source: Chart, target: Chart, exprs: Mapping[str, object]):
        missing = set(target.coords) - set(exprs)
        if missing:
            raise ValueError(f"chart map lacks components for {sorted(missing)}")
        self.source = source
        self.target = target
        self.exprs = {k: S.simplify(exprs[k]) for k in target.coords}
        for k, e in self.exprs.items():
            extra = S.free_coords(e) - set(source.coords)
            if extra:
                raise ValueError(f"component {k} uses non-source symbols {sorted(extra)}")

    @classmethod
    def parse(cls, source: Chart, target: Chart, texts: Mapping[str, str]) -> "ChartMap":
        return cls(source, target, {k: S.parse_scalar(v, source) for k, v in texts.items()})

    def substitute(self, e) -> sp.Expr:
        return S.simplify(S.substitute(e, self.exprs))

    def defining_exponent(self, n: int = 100, seed: int = 42) -> tuple[int, sp.Expr]:
        """(e, unit) with z_target∘φ = unit · z_source^e, unit nonvanishing on Z."""
        from .sampling import sample

        if not (self.source.singular and self.target.singular):
            raise CompatibilityError("both charts must be singular")
        zs = self.source.zsym
        zt = self.exprs[self.target.z]
        pts = sample(self.source, n, region="on", seed=seed)
        for e in range(6, 0, -1):
            unit = S.simplify(zt * zs ** (-e))
            if _z_in_denominator(unit, zs):
                continue
            vals = S.evaluate_grid(unit, self.source, pts)
            if np.all(np.isfinite(vals)) and np.min(np.abs(vals)) > 1e-12:
                return e, unit
        raise CompatibilityError("target defining function is not a unit times a power of the source one")

    def covector_images(self) -> list[BForm]:
        """φ*θ^j for every target frame slot j, as source b-forms."""
        src, tgt = self.source, self.target
        out = []
        for j, name in enumerate(tgt.frame):
            phi = self.exprs[name]
            comps = {(i,): frame_derivative(src, i, phi) for i in range(src.dim)}
            if j == 0 and tgt.singular:
                comps = {b: c * phi ** (-tgt.m) for b, c in comps.items()}
            out.append(BForm(src, 1, comps))
        return out

    def jacobian(self) -> list[list[sp.Expr]]:
        """J[j][i] = (φ*θ^j)(e_i): frame components of φ_* e_i."""
        imgs = self.covector_images()
        return [[img[(i,)] for i in range(self.source.dim)] for img in imgs]


def pullback(phi: ChartMap, w: BForm) -> BForm:
    if w.chart != phi.target:
        raise ChartMismatchError("form does not live on the map's target chart")
    src = phi.source
    imgs = phi.covector_images()
    acc: dict[Blade, sp.Expr] = {}
    for blade, c in w.items():
        cs = phi.substitute(c)
        if not blade:
            acc[()] = acc.get((), 0) + cs
            continue
        piece = wedge_all([imgs[j] for j in blade])
        if isinstance(piece, _Overflow):
            continue
        for b, v in piece.items():
            acc[b] = acc.get(b, 0) + cs * v
    result = BForm(src, w.degree, acc)
    if src.singular:
        for c in result.coeffs.values():
            if _z_in_denominator(c, src.zsym):
                raise CompatibilityError("pullback has coefficients singular on the critical set")
    return result


def identity_map(chart: Chart) -> ChartMap:
    return ChartMap(chart, chart, {c: S.coord(c) for c in chart.coords})


# ----------------------------------------------------------------------------
# literals


def _form_ops(chart: Chart) -> FormOps:
    def as_form(v):
        return v if isinstance(v, BForm) else function(chart, v)

    def wedge_values(a, b):
        return wedge(as_form(a), as_form(b))

    return FormOps(
        dcoord=lambda n: dcoord(chart, n),
        sigma=lambda: sigma(chart),
        wedge=wedge_values,
        is_form=lambda v: isinstance(v, BForm),
        has_sigma=chart.singular,
    )


def parse_form(text: str, chart: Chart) -> BForm:
    """Parse a form literal; a bare scalar gives a 0-form."""
    v = parse_expression(text, chart.coords, allow_forms=True, forms=_form_ops(chart))
    if isinstance(v, BForm):
        return v
    return function(chart, v)


def sample_points(chart: Chart, n: int, seed: int = 42, region: str = "off") -> np.ndarray:
    from .sampling import sample

    return sample(chart, n, region=region, seed=seed)


def blades(dim: int, degree: int) -> list[Blade]:
    return list(combinations(range(dim), degree))


def reframe(w: _Alternating, target: Chart) -> _Alternating:
    """Re-index blades by coordinate name onto a chart with another frame order.

    Only valid between charts whose slot-0 frame elements agree in meaning,
    i.e. both smooth, or the same singular data.
    """
    src = w.chart
    if set(src.coords) != set(target.coords):
        raise ChartMismatchError("reframe needs the same coordinate names")
    if src.singular or target.singular:
        if (src.z, src.m) != (target.z, target.m):
            raise ChartMismatchError("cannot reframe across different singular data")
    perm = [target.slot(n) for n in src.frame]
    out: dict[Blade, sp.Expr] = {}
    for b, c in w.items():
        sign, nb = _sort_sign(perm[i] for i in b)
        out[nb] = out.get(nb, 0) + sign * c
    return type(w)(target, w.degree, out)

"""Contact checks, Reeb and Hamiltonian fields, point classes, convexity."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
import sympy as sp
from scipy import ndimage

from . import exterior as E
from . import scalar as S
from .chart import Chart, ChartError
from .sampling import DEFAULT_GRID, GridConfig, regular_grid


class DimensionError(ValueError):
    pass


class SingularSystemError(ArithmeticError):
    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class NotContactVectorFieldError(ValueError):
    pass


def _n_of(chart: Chart) -> int:
    if chart.dim < 3 or chart.dim % 2 == 0:
        raise DimensionError(f"contact forms need odd dimension >= 3, chart has {chart.dim}")
    return (chart.dim - 1) // 2


def _as_one_form(alpha) -> E.BForm:
    if not isinstance(alpha, E.BForm) or alpha.degree != 1:
        raise DimensionError("expected a 1-form")
    return alpha


def contact_coeff(alpha: E.BForm) -> sp.Expr:
    """c with α∧(dα)^n = c · θ^0∧…∧θ^{2n} in frame order."""
    alpha = _as_one_form(alpha)
    n = _n_of(alpha.chart)
    return E.top_coefficient(E.wedge(alpha, E.power(E.ext_d(alpha), n)))


@dataclass
class ContactReport:
    coeff: sp.Expr
    min_off: float
    min_on: float | None
    verdict: str
    witnesses: list[dict] = field(default_factory=list)

    @property
    def contact(self) -> bool:
        return self.verdict == "contact"

    def to_dict(self) -> dict:
        return {
            "coeff": S.to_text(self.coeff),
            "min_abs_off_Z": self.min_off,
            "min_abs_on_Z": self.min_on,
            "verdict": self.verdict,
            "witnesses": self.witnesses,
        }


def _point(chart: Chart, row) -> dict:
    return {c: float(v) for c, v in zip(chart.coords, row)}


def is_contact(alpha: E.BForm, grid: GridConfig = DEFAULT_GRID) -> ContactReport:
    c = contact_coeff(alpha)
    ch = alpha.chart
    off = grid.off(ch)
    on = grid.on(ch)
    v_off = np.abs(S.evaluate_grid(c, ch, off))
    v_off = np.where(np.isfinite(v_off), v_off, 0.0)
    i_off = int(np.argmin(v_off))
    witnesses = [{"region": "off", "point": _point(ch, off[i_off]), "abs_c": float(v_off[i_off])}]
    min_on = None
    ok_on = True
    if on is not None:
        v_on = np.abs(S.evaluate_grid(c, ch, on))
        v_on = np.where(np.isfinite(v_on), v_on, 0.0)
        i_on = int(np.argmin(v_on))
        min_on = float(v_on[i_on])
        ok_on = min_on >= grid.tol
        witnesses.append({"region": "on", "point": _point(ch, on[i_on]), "abs_c": min_on})
    ok_off = float(v_off[i_off]) >= grid.tol
    if ok_off and ok_on:
        verdict = "contact"
    elif ok_off:
        verdict = "contact away from a vanishing locus"
    else:
        verdict = "not contact"
    return ContactReport(c, float(v_off[i_off]), min_on, verdict, witnesses)


# ----------------------------------------------------------------------------
# Reeb and Hamiltonian fields


def _dual_vector(F: E.BForm, c: sp.Expr) -> E.BMultiVector:
    """V with ι_V(c·vol) = F for a (dim-1)-form F."""
    ch = F.chart
    dim = ch.dim
    inv = sp.Pow(c, -1)
    comps = {}
    for i in range(dim):
        hat = tuple(j for j in range(dim) if j != i)
        comps[(i,)] = (-1) ** i * F[hat] * inv
    return E.BMultiVector(ch, 1, comps)


def _check_pivot(c: sp.Expr, chart: Chart, grid: GridConfig):
    if c.is_Number:
        if c == 0:
            raise SingularSystemError("contact coefficient vanishes identically")
        return
    pts = grid.both(chart)
    vals = np.abs(S.evaluate_grid(c, chart, pts))
    bad = ~np.isfinite(vals) | (vals < grid.tol)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise SingularSystemError("linear system is singular at a sample point", _point(chart, pts[i]))


@dataclass
class ReebResult:
    field: E.BMultiVector
    residual: float


def reeb(alpha: E.BForm, grid: GridConfig = DEFAULT_GRID, verify: bool = True) -> E.BMultiVector:
    """Solve ι_R dα = 0, α(R) = 1.

    Uses ι_R(α∧(dα)^n) = (dα)^n, i.e. R^i = (−1)^i [(dα)^n]_î / c.
    """
    return reeb_with_residual(alpha, grid, verify).field


def reeb_with_residual(alpha: E.BForm, grid: GridConfig = DEFAULT_GRID, verify: bool = True) -> ReebResult:
    alpha = _as_one_form(alpha)
    n = _n_of(alpha.chart)
    c = contact_coeff(alpha)
    _check_pivot(c, alpha.chart, grid)
    da = E.ext_d(alpha)
    R = _dual_vector(E.power(da, n), c)
    res = reeb_residual(alpha, R, grid) if verify else 0.0
    if verify and not res <= grid.tol:
        raise SingularSystemError(f"Reeb back-substitution residual {res:.3e} exceeds tolerance")
    return ReebResult(R, res)


def reeb_residual(alpha: E.BForm, R: E.BMultiVector, grid: GridConfig = DEFAULT_GRID) -> float:
    pts = grid.both(alpha.chart)
    a = E.interior(R, E.ext_d(alpha)).max_abs(pts)
    b = E.function(alpha.chart, S.simplify(E.interior(R, alpha)[()] - 1)).max_abs(pts)
    return max(a, b)


def hamiltonian_field(alpha: E.BForm, H, grid: GridConfig = DEFAULT_GRID, verify: bool = True) -> E.BMultiVector:
    """X_H with α(X_H) = H and ι_{X_H}dα = −dH + R(H)α.

    ι_X(α∧(dα)^n) = H(dα)^n + n α∧dH∧(dα)^{n−1}.
    """
    alpha = _as_one_form(alpha)
    ch = alpha.chart
    n = _n_of(ch)
    H = S.simplify(H)
    c = contact_coeff(alpha)
    _check_pivot(c, ch, grid)
    da = E.ext_d(alpha)
    dH = E.ext_d(E.function(ch, H))
    F = H * E.power(da, n)
    if not dH.is_zero():
        F = F + n * E.wedge_all([alpha, dH, E.power(da, n - 1)]) if n > 1 else F + n * E.wedge(alpha, dH)
    X = _dual_vector(F, c)
    if verify:
        res = hamiltonian_residual(alpha, H, X, grid)
        if not res <= grid.tol:
            raise SingularSystemError(f"Hamiltonian back-substitution residual {res:.3e} exceeds tolerance")
    return X


def hamiltonian_residual(alpha, H, X, grid: GridConfig = DEFAULT_GRID) -> float:
    ch = alpha.chart
    R = reeb(alpha, grid, verify=False)
    dH = E.ext_d(E.function(ch, H))
    RH = E.interior(R, dH)[()] if not dH.is_zero() else S.ZERO
    lhs = E.interior(X, E.ext_d(alpha))
    rhs = RH * alpha - dH if not dH.is_zero() else E.zero_form(ch, 1)
    pts = grid.both(ch)
    r1 = (lhs - rhs).max_abs(pts)
    r2 = E.function(ch, E.interior(X, alpha)[()] - H).max_abs(pts)
    return max(r1, r2)


# ----------------------------------------------------------------------------
# point classes


class PointClass(enum.Enum):
    RegularReebSingularXi = "1a"
    RegularReebRegularXi = "1b"
    SingularReeb = "2"


@dataclass
class PointClassification:
    cls: PointClass
    reeb_at_p: dict[str, float]
    u_at_p: float

    def to_dict(self) -> dict:
        return {"class": self.cls.value, "reeb": self.reeb_at_p, "u": self.u_at_p}


def classify_point(alpha: E.BForm, p: dict, tol: float = 1e-9, R: E.BMultiVector | None = None) -> PointClassification:
    ch = alpha.chart
    if not ch.singular:
        raise ChartError("point classes are defined on singular charts")
    if abs(float(p[ch.z])) > 1e-12:
        raise ValueError(f"point is not on the critical set ({ch.z} = {p[ch.z]})")
    p = dict(p)
    p[ch.z] = 0.0
    if R is None:
        R = reeb(alpha, verify=False)
    Rs = E.to_smooth_frame(R)
    vals = {name: S.evaluate(Rs[(i,)], p) for i, name in enumerate(ch.frame)}
    u = S.evaluate(E.sigma_coefficient(alpha), p)
    if max(abs(v) for v in vals.values()) <= tol:
        cls = PointClass.SingularReeb
    elif abs(u) <= tol:
        cls = PointClass.RegularReebSingularXi
    else:
        cls = PointClass.RegularReebRegularXi
    return PointClassification(cls, vals, u)


# ----------------------------------------------------------------------------
# critical-set data in dimension 3


def critical_chart(chart: Chart) -> Chart:
    """The slice z = 0 as a smooth chart on the remaining coordinates."""
    names = chart.frame[1:]
    return Chart(names, tuple(chart.interval(n) for n in names))


def restrict_form(w: E.BForm, target: Chart) -> E.BForm:
    """Drop σ-blades, set z = 0 and shift slots onto the critical chart."""
    z = w.chart.z
    out = {}
    for b, c in w.items():
        if 0 in b:
            continue
        out[tuple(i - 1 for i in b)] = S.substitute(c, {z: 0})
    return E.BForm(target, w.degree, out)


def restrict_field(X: E.BMultiVector, target: Chart) -> E.BMultiVector:
    z = X.chart.z
    out = {tuple(i - 1 for i in b): S.substitute(c, {z: 0}) for b, c in X.items() if 0 not in b}
    return E.BMultiVector(target, X.degree, out)


@dataclass
class ThetaReport:
    theta: E.BForm
    u_on_Z: sp.Expr
    sign: int
    residual: float
    min_area: float
    nondegenerate: bool
    hamiltonian_ok: bool

    @property
    def ok(self) -> bool:
        return self.nondegenerate and self.hamiltonian_ok

    def to_dict(self) -> dict:
        return {
            "theta": self.theta.to_dict(),
            "u_on_Z": S.to_text(self.u_on_Z),
            "sign": self.sign,
            "residual": self.residual,
            "min_abs_area": self.min_area,
            "nondegenerate": self.nondegenerate,
            "hamiltonian": self.hamiltonian_ok,
        }


def theta_form(alpha: E.BForm, grid: GridConfig = DEFAULT_GRID) -> ThetaReport:
    """Θ = u dβ + β∧du on Z and the sign s with ι_{R|Z}Θ = s·du."""
    ch = alpha.chart
    if ch.dim != 3:
        raise DimensionError("theta_form needs a 3-dimensional chart")
    if not ch.singular:
        raise ChartError("theta_form needs a singular chart")
    u = E.sigma_coefficient(alpha)
    _, beta = E.decompose(alpha)
    du = E.ext_d(E.function(ch, u))
    theta_full = u * E.ext_d(beta) + E.wedge(beta, du)
    Zc = critical_chart(ch)
    theta = restrict_form(theta_full, Zc)
    uZ = S.substitute(u, {ch.z: 0})
    duZ = E.ext_d(E.function(Zc, uZ))
    R = reeb(alpha, grid)
    RZ = restrict_field(R, Zc)
    pts = grid.on(ch)
    zpts = pts[:, [ch.coords.index(n) for n in Zc.coords]]
    area = np.abs(S.evaluate_grid(theta[(0, 1)], Zc, zpts))
    min_area = float(np.min(area)) if area.size else 0.0
    iota = E.interior(RZ, theta)
    best = None
    for s in (1, -1):
        r = (iota - s * duZ).max_abs(zpts)
        if best is None or r < best[1]:
            best = (s, r)
    s, r = best
    return ThetaReport(theta, uZ, s, r, min_area, min_area >= grid.tol, r <= grid.tol)


def reeb_zero_clusters(alpha: E.BForm, counts: dict[str, int], periodic: tuple[str, ...] = ()) -> tuple[int, np.ndarray]:
    """Connected clusters of near-zeros of R|_Z on a regular grid of Z.

    A node counts as a near-zero when |R| is below half the largest jump of
    |R| between neighbouring nodes, so every true zero marks its cell.
    """
    ch = alpha.chart
    R = reeb(alpha, verify=False)
    Zc = critical_chart(ch)
    RZ = restrict_field(R, Zc)
    pts, shape = regular_grid(Zc, counts, endpoint=False)
    norm = np.zeros(pts.shape[0])
    for b, c in RZ.items():
        norm += S.evaluate_grid(c, Zc, pts) ** 2
    norm = np.sqrt(norm).reshape(shape)
    jump = 0.0
    for ax in range(norm.ndim):
        if shape[ax] > 1:
            jump = max(jump, float(np.max(np.abs(np.diff(norm, axis=ax)))))
    mask = norm <= 0.5 * jump + 1e-12
    labels, count = ndimage.label(mask)
    for ax, name in enumerate(Zc.coords):
        if name not in periodic or shape[ax] < 2:
            continue
        first = np.take(labels, 0, axis=ax)
        last = np.take(labels, shape[ax] - 1, axis=ax)
        for a, b in zip(first.ravel(), last.ravel()):
            if a and b and a != b:
                labels[labels == b] = a
    uniq = sorted(set(labels.ravel()) - {0})
    return len(uniq), mask


# ----------------------------------------------------------------------------
# convexity and vertical invariance


class ConvexityKind(enum.Enum):
    Convex = "convex"
    AlmostConvex = "almost convex"
    NotAlmostConvex = "not almost convex"


@dataclass
class ConvexityClass:
    kind: ConvexityKind
    offending: dict[str, str] = field(default_factory=dict)

    @property
    def almost_convex(self) -> bool:
        return self.kind in (ConvexityKind.Convex, ConvexityKind.AlmostConvex)

    def to_dict(self) -> dict:
        return {"class": self.kind.value, "offending": self.offending}


def _vanishes(e, chart, pts, tol) -> bool:
    e = S.simplify(e)
    if e == 0:
        return True
    vals = S.evaluate_grid(e, chart, pts)
    return bool(np.all(np.isfinite(vals)) and np.max(np.abs(vals)) <= tol)


def convexity_classify(alpha: E.BForm, grid: GridConfig = DEFAULT_GRID) -> ConvexityClass:
    ch = alpha.chart
    if not ch.singular:
        raise ChartError("convexity is defined for singular charts")
    z = ch.z
    pts = grid.both(ch)
    offending = {}
    u = E.sigma_coefficient(alpha)
    for b, c in alpha.items():
        if b == (0,):
            continue
        dc = S.diff(c, z)
        if not _vanishes(dc, ch, pts, grid.tol):
            offending[f"d/d{z} of {alpha.blade_name(b)} coefficient"] = S.to_text(dc)
    if offending:
        return ConvexityClass(ConvexityKind.NotAlmostConvex, offending)
    du = S.diff(u, z)
    if not _vanishes(du, ch, pts, grid.tol):
        return ConvexityClass(ConvexityKind.AlmostConvex, {f"d/d{z} of sigma coefficient": S.to_text(du)})
    return ConvexityClass(ConvexityKind.Convex)


def verticalize(alpha: E.BForm, t: str, grid: GridConfig = DEFAULT_GRID, t0: float | None = None) -> E.BForm:
    """Divide out the factor making ∂/∂t a strict contact symmetry.

    Requires L_{∂t}α ∥ α. Since then α(t, x) = e^{h(t,x)} α(t0, x), the
    t-invariant representative is α restricted to t = t0.
    """
    ch = alpha.chart
    if ch.singular:
        raise ChartError("verticalize works on smooth charts")
    T = E.basis_vector(ch, ch.slot(t))
    L = E.lie_derivative(T, alpha)
    pts = grid.off(ch) if ch.z is not None else grid.both(ch)
    par = E.wedge(L, alpha)
    if par.max_abs(pts) > grid.tol:
        raise NotContactVectorFieldError(f"∂/∂{t} is not a contact vector field for this form")
    if t0 is None:
        lo, hi = ch.interval(t)
        t0 = 0.0 if lo <= 0.0 <= hi else 0.5 * (lo + hi)
    out = alpha.xreplace({t: S.exact(t0)})
    ratio_ok = E.wedge(alpha, out).max_abs(pts) <= grid.tol
    c = contact_coeff(out)
    vals = np.abs(S.evaluate_grid(c, ch, pts))
    if not ratio_ok or not np.all(np.isfinite(vals)) or np.min(vals) < grid.tol:
        raise SingularSystemError("normalizing factor vanishes on the grid")
    return out


def split_vertical(alpha: E.BForm, t: str) -> tuple[sp.Expr, E.BForm]:
    """(u, β) with α = u dt + β on a smooth chart."""
    slot = alpha.chart.slot(t)
    u = alpha[(slot,)]
    beta = E.BForm(alpha.chart, 1, {b: c for b, c in alpha.items() if b != (slot,)})
    return u, beta


def min_abs(e, chart, pts) -> float:
    v = np.abs(S.evaluate_grid(e, chart, pts))
    return float(np.min(v)) if v.size else math.inf

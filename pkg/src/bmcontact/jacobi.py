"""Jacobi pairs from b-contact forms, Poissonization, symplectization."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
import sympy as sp

from . import exterior as E
from . import scalar as S
from .chart import Chart
from .contact import (ContactReport, DimensionError, _check_pivot, _dual_vector, _n_of, contact_coeff,
                      is_contact, reeb)
from .sampling import DEFAULT_GRID, GridConfig

JACOBI_TOL = 1e-7


class NotLiouvilleError(ValueError):
    pass


class NotTransverseError(ValueError):
    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


@dataclass
class JacobiPair:
    Lam: E.BMultiVector
    R: E.BMultiVector
    residuals: dict[str, float] = field(default_factory=dict)
    verified: bool = False

    @property
    def chart(self) -> Chart:
        return self.Lam.chart

    def to_dict(self) -> dict:
        return {
            "Lambda": self.Lam.to_dict(),
            "R": self.R.to_dict(),
            "residuals": self.residuals,
            "verified": self.verified,
        }


def jacobi_residuals(Lam: E.BMultiVector, R: E.BMultiVector, pts: np.ndarray) -> dict[str, float]:
    """Grid sup of [Λ,Λ] − 2R∧Λ and [Λ,R]."""
    with E.lazy():
        ll = E.schouten(Lam, Lam)
        r1 = (ll - 2 * E.wedge(R, Lam)).max_abs(pts) if not isinstance(ll, E._Overflow) else 0.0
        r2 = E.schouten(Lam, R).max_abs(pts)
    return {"[L,L]-2R^L": float(r1), "[L,R]": float(r2)}


def make_pair(Lam, R, grid: GridConfig = DEFAULT_GRID, tol: float = JACOBI_TOL) -> JacobiPair:
    res = jacobi_residuals(Lam, R, grid.both(Lam.chart))
    return JacobiPair(Lam, R, res, all(v <= tol for v in res.values()))


def _y_field(alpha, gamma: E.BForm, n: int, c) -> E.BMultiVector:
    """Y with α(Y) = 0 and ι_Y dα = −(γ − γ(R)α)."""
    da = E.ext_d(alpha)
    F = E.wedge(alpha, gamma)
    if n > 1:
        F = E.wedge(F, E.power(da, n - 1))
    return _dual_vector(n * F, c)


def jacobi_from_contact(alpha: E.BForm, grid: GridConfig = DEFAULT_GRID, verify: bool = True,
                        tol: float = JACOBI_TOL) -> JacobiPair:
    """Λ(γ, δ) = δ(Y_γ) and R the Reeb field."""
    ch = alpha.chart
    n = _n_of(ch)
    c = contact_coeff(alpha)
    _check_pivot(c, ch, grid)
    R = reeb(alpha, grid, verify=verify)
    lam = {}
    for p in range(ch.dim):
        Y = _y_field(alpha, E.basis_covector(ch, p), n, c)
        for (k,), v in Y.items():
            if k > p:
                lam[(p, k)] = v
    Lam = E.BMultiVector(ch, 2, lam)
    if not verify:
        return JacobiPair(Lam, R)
    return make_pair(Lam, R, grid, tol)


def _reference_slot(R: E.BMultiVector, pts) -> int:
    best, best_val = None, -1.0
    for (p,), v in R.items():
        if v.is_Number:
            return p
        m = float(np.min(np.abs(S.evaluate_grid(v, R.chart, pts))))
        if m > best_val:
            best, best_val = p, m
    if best is None:
        raise ValueError("Reeb field vanishes identically")
    return best


def dual_bivector(alpha: E.BForm, R: E.BMultiVector, grid: GridConfig = DEFAULT_GRID) -> E.BMultiVector:
    """Π with Π^♯(ι_V dα) = −V on ker θ^p, where θ^p is the frame covector
    best aligned with R; Π^♯(θ^p) = 0."""
    ch = alpha.chart
    n = _n_of(ch)
    c = contact_coeff(alpha)
    pts = grid.both(ch)
    p = _reference_slot(R, pts)
    Rp = R[(p,)]
    eta = E.basis_covector(ch, p)
    lam = {}
    for q in range(ch.dim):
        if q == p:
            continue
        gq = E.basis_covector(ch, q) - (R[(q,)] / Rp) * eta
        Y = _y_field(alpha, gq, n, c)
        Y = Y - (Y[(p,)] / Rp) * R
        for (k,), v in Y.items():
            if k > q:
                lam[(q, k)] = v
    return E.BMultiVector(ch, 2, lam)


@dataclass
class LiouvilleJacobi:
    pair: JacobiPair
    Pi: E.BMultiVector
    discriminant_max: float
    liouville_checked: bool

    @property
    def discriminant_vanishes(self) -> bool:
        return self.discriminant_max <= JACOBI_TOL

    @property
    def lemma_consistent(self) -> bool:
        """Forward direction only: a vanishing discriminant forces the identities."""
        return not self.discriminant_vanishes or self.pair.verified

    def to_dict(self) -> dict:
        d = self.pair.to_dict()
        d.update({"Pi": self.Pi.to_dict(), "discriminant_max": self.discriminant_max,
                  "lemma_consistent": self.lemma_consistent, "liouville_checked": self.liouville_checked})
        return d


def jacobi_via_liouville(alpha: E.BForm, X: E.BMultiVector, grid: GridConfig = DEFAULT_GRID,
                         check_liouville: bool = True, tol: float = JACOBI_TOL) -> LiouvilleJacobi:
    """Λ = Π + R∧X for a Liouville field X of dα.

    ``check_liouville=False`` skips the precondition, which is how a field
    with a non-vanishing discriminant R∧[X,R]∧X can be examined.
    """
    ch = alpha.chart
    pts = grid.both(ch)
    da = E.ext_d(alpha)
    if check_liouville:
        if (E.lie_derivative(X, da) - da).max_abs(pts) > grid.tol:
            raise NotLiouvilleError("X is not a Liouville field for dα")
    R = reeb(alpha, grid)
    Pi = dual_bivector(alpha, R, grid)
    Lam = Pi + E.wedge(R, X)
    disc = E.wedge_all([R, E.lie_bracket(X, R), X])
    dmax = 0.0 if isinstance(disc, E._Overflow) else disc.max_abs(pts)
    pair = make_pair(Lam, R, grid, tol)
    return LiouvilleJacobi(pair, Pi, float(dmax), check_liouville)


# ----------------------------------------------------------------------------
# transversality, leaves


@dataclass
class TransversalityReport:
    coeff: sp.Expr
    verdict: str
    max_on: float | None
    min_grad_on: float | None
    min_off: float

    @property
    def transversal(self) -> bool:
        return self.verdict == "transversal"

    def to_dict(self) -> dict:
        return {"coeff": S.to_text(self.coeff), "verdict": self.verdict, "max_abs_on_Z": self.max_on,
                "min_abs_grad_on_Z": self.min_grad_on, "min_abs_off_Z": self.min_off}


def bjacobi_transversality(J: JacobiPair, grid: GridConfig = DEFAULT_GRID, grad_tol: float = 1e-6) -> TransversalityReport:
    ch = J.chart
    n = _n_of(ch)
    Ls, Rs = E.to_smooth_frame(J.Lam), E.to_smooth_frame(J.R)
    top = E.wedge(E.power(Ls, n), Rs)
    c = E.top_coefficient(top)
    off = grid.off(ch)
    v_off = np.abs(S.evaluate_grid(c, Ls.chart, off))
    min_off = float(np.min(v_off))
    if not ch.singular:
        verdict = "no critical set" if min_off >= grid.tol else "degenerate"
        return TransversalityReport(c, verdict, None, None, min_off)
    on = grid.on(ch)
    v_on = np.abs(S.evaluate_grid(c, Ls.chart, on))
    g = np.abs(S.evaluate_grid(S.diff(c, ch.z), Ls.chart, on))
    max_on, min_grad = float(np.max(v_on)), float(np.min(g))
    if max_on <= grid.tol and min_grad >= grad_tol and min_off > 0:
        verdict = "transversal"
    else:
        verdict = "not transversal"
    return TransversalityReport(c, verdict, max_on, min_grad, min_off)


class LeafKind(enum.Enum):
    ContactLeaf = "contact"
    LCSLeaf = "lcs"


@dataclass
class LeafClass:
    kind: LeafKind
    residual: float

    def to_dict(self) -> dict:
        return {"class": self.kind.value, "residual": self.residual}


def leaf_classify(J: JacobiPair, p: dict, tol: float = JACOBI_TOL) -> LeafClass:
    """Least-squares test of R ∈ Im Λ^♯ at p (smooth frame)."""
    Ls, Rs = E.to_smooth_frame(J.Lam), E.to_smooth_frame(J.R)
    dim = J.chart.dim
    M = np.zeros((dim, dim))
    for (a, b), v in Ls.items():
        val = S.evaluate(v, p)
        M[b, a] = val
        M[a, b] = -val
    r = np.array([S.evaluate(Rs[(i,)], p) for i in range(dim)])
    gamma, *_ = np.linalg.lstsq(M, r, rcond=None)
    res = float(np.linalg.norm(M @ gamma - r))
    return LeafClass(LeafKind.ContactLeaf if res > tol else LeafKind.LCSLeaf, res)


# ----------------------------------------------------------------------------
# Poissonization and symplectization


def lift(obj, chart: Chart):
    """View an object on a chart extended by trailing coordinates."""
    return type(obj)(chart, obj.degree, dict(obj.coeffs), simplify=False)


@dataclass
class PoissonReport:
    Pi: E.BMultiVector
    chart: Chart
    residual_bracket: float
    residual_homogeneity: float
    top_ratio: float | None
    top_ratio_spread: float | None
    residual_top_identity: float | None

    def ok(self, tol: float = JACOBI_TOL) -> bool:
        return self.residual_bracket <= tol and self.residual_homogeneity <= tol

    def to_dict(self) -> dict:
        return {"Pi": self.Pi.to_dict(), "chart": self.chart.to_dict(),
                "residual_[Pi,Pi]": self.residual_bracket, "residual_L_T_Pi+Pi": self.residual_homogeneity,
                "top_power_ratio": self.top_ratio, "top_power_ratio_spread": self.top_ratio_spread,
                "residual_top_identity": self.residual_top_identity}


def poissonize(J: JacobiPair, grid: GridConfig = DEFAULT_GRID, name: str = "tau") -> PoissonReport:
    """Π = e^{−τ}(Λ + ∂τ∧R) on chart × line, with its checks.

    The top-power check compares Π^{n+1} with −e^{−(n+1)τ} ∂τ∧Λ^n∧R, where
    powers are plain wedge powers divided by the factorial of the exponent.
    ``top_ratio`` is the realized constant ratio of the two sides.
    """
    ch = J.chart
    ext = ch.extended(ch.fresh_name(name))
    tau = S.coord(ext.coords[-1])
    Lam, R = lift(J.Lam, ext), lift(J.R, ext)
    T = E.basis_vector(ext, ext.dim - 1)
    w = sp.exp(-tau)
    Pi = w * (Lam + E.wedge(T, R))
    pts = grid.both(ext)
    pp = E.schouten(Pi, Pi)
    r1 = pp.max_abs(pts)
    r2 = (E.schouten(T, Pi) + Pi).max_abs(pts)
    ratio = spread = rtop = None
    if ch.dim % 2 == 1 and ch.dim >= 3:
        n = (ch.dim - 1) // 2
        lhs = E.top_coefficient(E.power(Pi, n + 1)) / math.factorial(n + 1)
        rhs = -sp.exp(-(n + 1) * tau) * E.top_coefficient(E.wedge_all([T, E.power(Lam, n), R])) / math.factorial(n)
        a = S.evaluate_grid(lhs, ext, pts)
        b = S.evaluate_grid(rhs, ext, pts)
        good = np.abs(b) > 1e-12
        if np.any(good):
            q = a[good] / b[good]
            ratio, spread = float(np.median(q)), float(np.max(q) - np.min(q))
        rtop = float(np.max(np.abs(a - b)))
    return PoissonReport(Pi, ext, float(r1), float(r2), ratio, spread, rtop)


@dataclass
class SymplectizeReport:
    omega: E.BForm
    chart: Chart
    closed: bool
    top_factor: float | None
    top_factor_spread: float | None
    residual_liouville: float
    residual_restriction: float

    def ok(self, tol: float) -> bool:
        return (self.closed and self.residual_liouville <= tol and self.residual_restriction <= tol
                and self.top_factor_spread is not None and self.top_factor_spread <= tol)

    def to_dict(self) -> dict:
        return {"omega": self.omega.to_dict(), "chart": self.chart.to_dict(), "closed": self.closed,
                "top_power_factor": self.top_factor, "top_power_factor_spread": self.top_factor_spread,
                "residual_L_dt_omega-omega": self.residual_liouville,
                "residual_restriction": self.residual_restriction}


def symplectize(alpha: E.BForm, grid: GridConfig = DEFAULT_GRID, name: str = "t") -> SymplectizeReport:
    """ω = d(e^t α) on chart × line.

    ``top_factor`` is ω^{n+1} / (e^{(n+1)t} · c(α)) in frame order; with plain
    wedge powers it is ±(n+1).
    """
    ch = alpha.chart
    n = _n_of(ch)
    ext = ch.extended(ch.fresh_name(name))
    t = S.coord(ext.coords[-1])
    a = lift(alpha, ext)
    omega = E.ext_d(sp.exp(t) * a)
    closed = E.ext_d(omega)
    is_closed = isinstance(closed, E._Overflow) or closed.is_zero()
    pts = grid.both(ext)
    top = E.top_coefficient(E.power(omega, n + 1))
    ref = sp.exp((n + 1) * t) * contact_coeff(alpha)
    va, vb = S.evaluate_grid(top, ext, pts), S.evaluate_grid(ref, ext, pts)
    good = np.abs(vb) > 1e-12
    factor = spread = None
    if np.any(good):
        q = va[good] / vb[good]
        factor, spread = float(np.median(q)), float(np.max(q) - np.min(q))
    T = E.basis_vector(ext, ext.dim - 1)
    r_l = (E.lie_derivative(T, omega) - omega).max_abs(pts)
    restr = E.interior(T, omega).xreplace({ext.coords[-1]: 0})
    r_r = (restr - a).max_abs(pts)
    return SymplectizeReport(omega, ext, is_closed, factor, spread, float(r_l), float(r_r))


# ----------------------------------------------------------------------------
# hypersurfaces transverse to a Liouville field


def check_liouville(omega: E.BForm, X: E.BMultiVector, grid: GridConfig = DEFAULT_GRID) -> float:
    r = (E.lie_derivative(X, omega) - omega).max_abs(grid.both(omega.chart))
    if r > grid.tol:
        raise NotLiouvilleError(f"L_X ω ≠ ω (residual {r:.3e})")
    return r


def check_transverse(X: E.BMultiVector, emb: E.ChartMap, grid: GridConfig = DEFAULT_GRID) -> float:
    """Smallest |det[φ_* e_1, …, φ_* e_k, X∘φ]| over the source grid."""
    src = emb.source
    J = emb.jacobian()
    Xs = [emb.substitute(X[(j,)]) for j in range(emb.target.dim)]
    pts = grid.both(src)
    cols = [[S.evaluate_grid(J[j][i], src, pts) for j in range(emb.target.dim)] for i in range(src.dim)]
    cols.append([S.evaluate_grid(x, src, pts) for x in Xs])
    M = np.array(cols).transpose(2, 1, 0)  # points x target x columns
    dets = np.abs(np.linalg.det(M))
    i = int(np.argmin(dets))
    if not dets[i] > grid.tol:
        raise NotTransverseError("X is tangent to the hypersurface at a sample point",
                                 {c: float(v) for c, v in zip(src.coords, pts[i])})
    return float(dets[i])


@dataclass
class ContractionResult:
    alpha: E.BForm
    report: ContactReport
    liouville_residual: float
    min_transverse_det: float

    def to_dict(self) -> dict:
        return {"alpha": self.alpha.to_text(), "contact": self.report.to_dict(),
                "liouville_residual": self.liouville_residual, "min_transverse_det": self.min_transverse_det}


def liouville_contract(omega: E.BForm, X: E.BMultiVector, emb: E.ChartMap,
                       grid: GridConfig = DEFAULT_GRID) -> ContractionResult:
    """φ*(ι_X ω) on a hypersurface transverse to the Liouville field X."""
    if omega.degree != 2:
        raise DimensionError("expected a 2-form")
    lr = check_liouville(omega, X, grid)
    det = check_transverse(X, emb, grid)
    alpha = E.pullback(emb, E.interior(X, omega))
    return ContractionResult(alpha, is_contact(alpha, grid), lr, det)


@dataclass
class OrthogonalityReport:
    residual: float
    pullback_residual: float
    holds: bool

    def to_dict(self) -> dict:
        return {"residual": self.residual, "residual_phi*omega-dalpha": self.pullback_residual, "holds": self.holds}


def reeb_orthogonality_check(omega: E.BForm, X: E.BMultiVector, emb: E.ChartMap,
                             grid: GridConfig = DEFAULT_GRID) -> OrthogonalityReport:
    """ι_{φ_*R} ω vanishes on vectors tangent to the hypersurface."""
    res = liouville_contract(omega, X, emb, grid)
    R = reeb(res.alpha, grid)
    src = emb.source
    pts = grid.both(src)
    pw = E.pullback(emb, omega)
    r = E.interior(R, pw).max_abs(pts)
    r2 = (pw - E.ext_d(res.alpha)).max_abs(pts)
    return OrthogonalityReport(float(r), float(r2), bool(r <= grid.tol and r2 <= grid.tol))

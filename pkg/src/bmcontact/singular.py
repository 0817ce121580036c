"""Desingularization, singularization and folded-contact diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import sympy as sp
from scipy.optimize import brentq, minimize_scalar

from . import exterior as E
from . import scalar as S
from .chart import Chart, ChartError
from .contact import (ContactReport, DimensionError, contact_coeff, convexity_classify, is_contact,
                      split_vertical)
from .jacobi import jacobi_from_contact
from .profiles import X as PX
from .profiles import ProfileFn, SymPiece, build_profile
from .sampling import DEFAULT_GRID, GridConfig, sample, unit_points

AGREE_TOL = 1e-10
IDENTITY_RTOL = 1e-8
GRAD_TOL = 1e-6


class NotAlmostConvexError(ValueError):
    pass


class ParityError(ValueError):
    pass


class NotVerticallyInvariantError(ValueError):
    pass


def _region_points(chart: Chart, axis: str, keep, n: int, seed: int) -> np.ndarray:
    """Up to ``n`` sample points whose ``axis`` value satisfies ``keep``."""
    pts = sample(chart, 8 * n, region="box", seed=seed)
    sel = pts[keep(pts[:, chart.coords.index(axis)])]
    return sel[:n]


def _coeff_gap(a: E._Alternating, b: E._Alternating, pts: np.ndarray) -> float:
    """Sup over ``pts`` of coefficient differences; charts must share coords."""
    if pts.shape[0] == 0:
        return 0.0
    worst = 0.0
    for blade in set(a.coeffs) | set(b.coeffs):
        va = S.evaluate_grid(a[blade], a.chart, pts)
        vb = S.evaluate_grid(b[blade], b.chart, pts)
        worst = max(worst, float(np.max(np.abs(va - vb))))
    return worst


# ----------------------------------------------------------------------------
# folded contact forms


@dataclass
class FoldReport:
    verdict: str
    axis: str
    components: list[dict]
    roots: np.ndarray
    min_grad: float | None
    cell: float
    min_abs_coeff: float

    @property
    def folded(self) -> bool:
        return self.verdict == "folded"

    @property
    def n_components(self) -> int:
        return len(self.components)

    def max_distance_to(self, centers) -> float:
        if self.roots.size == 0:
            return math.inf
        c = np.asarray(centers, dtype=float)
        return float(np.max(np.min(np.abs(self.roots[:, None] - c[None, :]), axis=1)))

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "axis": self.axis, "components": self.components,
                "n_roots": int(self.roots.size), "min_abs_grad_on_fold": self.min_grad,
                "grid_cell": self.cell, "min_abs_coeff": self.min_abs_coeff}


def folded_check(alpha: E.BForm, grid: GridConfig = DEFAULT_GRID, axis: str | None = None,
                 n_lines: int = 40, n_axis: int = 801, grad_tol: float = GRAD_TOL) -> FoldReport:
    """Locate the zero set of α∧(dα)^n by sign changes along lines parallel to ``axis``."""
    ch = alpha.chart
    if ch.singular:
        raise ChartError("folded_check expects a smooth chart")
    if ch.dim < 3:
        raise DimensionError("folded contact forms need dimension 2n+1 >= 3")
    c = contact_coeff(alpha)
    axis = axis or ch.z or ch.coords[0]
    ia = ch.coords.index(axis)
    lo, hi = ch.interval(axis)
    zs = np.linspace(lo, hi, n_axis)
    cell = (hi - lo) / (n_axis - 1)
    others = [i for i in range(ch.dim) if i != ia]
    u = unit_points(n_lines, len(others), seed=grid.seed)
    base = np.empty((n_lines, ch.dim))
    for j, i in enumerate(others):
        a, b = ch.box[i]
        base[:, i] = a + u[:, j] * (b - a)
    pts = np.repeat(base, n_axis, axis=0)
    pts[:, ia] = np.tile(zs, n_lines)
    vals = S.evaluate_grid(c, ch, pts).reshape(n_lines, n_axis)
    grads = [S.diff(c, name) for name in ch.coords]
    roots, root_pts = [], []
    for line in range(n_lines):
        v = vals[line]
        sgn = np.sign(v)

        def f(z, _line=line):
            p = base[_line].copy()
            p[ia] = z
            return float(S.evaluate_grid(c, ch, p[None, :])[0])

        for i in range(n_axis):
            if sgn[i] == 0:
                roots.append(zs[i])
            elif i + 1 < n_axis and sgn[i] * sgn[i + 1] < 0 and np.isfinite(v[i]) and np.isfinite(v[i + 1]):
                roots.append(brentq(f, zs[i], zs[i + 1], xtol=1e-14))
            else:
                continue
            p = base[line].copy()
            p[ia] = roots[-1]
            root_pts.append(p)
    finite = vals[np.isfinite(vals)]
    min_abs = float(np.min(np.abs(finite))) if finite.size else math.nan
    roots = np.array(roots)
    if roots.size == 0:
        verdict = "no fold, contact everywhere" if min_abs > grid.tol else "degenerate: zero without sign change"
        return FoldReport(verdict, axis, [], roots, None, cell, min_abs)
    rp = np.array(root_pts)
    g = np.sqrt(sum(S.evaluate_grid(gi, ch, rp) ** 2 for gi in grads))
    min_grad = float(np.min(g))
    order = np.sort(roots)
    comps, start = [], 0
    for i in range(1, order.size + 1):
        if i == order.size or order[i] - order[i - 1] > 3 * cell:
            seg = order[start:i]
            comps.append({"center": float(np.mean(seg)), "min": float(seg[0]), "max": float(seg[-1]),
                          "n_roots": int(seg.size)})
            start = i
    verdict = "folded" if min_grad >= grad_tol else "degenerate fold"
    return FoldReport(verdict, axis, comps, roots, min_grad, cell, min_abs)


# ----------------------------------------------------------------------------
# desingularization


@dataclass
class DesingResult:
    alpha_eps: E.BForm
    profile: ProfileFn
    agreement: float
    identity_residual: float
    contact: ContactReport | None = None
    fold: FoldReport | None = None

    @property
    def ok(self) -> bool:
        good = self.agreement <= AGREE_TOL and self.identity_residual <= IDENTITY_RTOL
        if self.contact is not None:
            return good and self.contact.contact
        return good and self.fold is not None and self.fold.folded

    def to_dict(self) -> dict:
        d = {"alpha_eps": self.alpha_eps.to_dict(), "profile": self.profile.to_dict(),
             "agreement_outside_2eps": self.agreement, "identity_relative_residual": self.identity_residual}
        if self.contact is not None:
            d["contact"] = self.contact.to_dict()
        if self.fold is not None:
            d["fold"] = self.fold.to_dict()
        return d


def _check_parity(kind: str, m: int, prof: ProfileFn):
    if kind == "desing-even" and m % 2:
        raise ParityError(f"desing-even profile needs even m, chart has m={m}")
    if kind == "desing-odd" and m % 2 == 0:
        raise ParityError(f"desing-odd profile needs odd m, chart has m={m}")
    if kind not in ("desing-even", "desing-odd"):
        raise ParityError(f"{kind} is not a desingularizing profile")
    if prof.m != m:
        raise ParityError(f"profile order {prof.m} does not match chart order {m}")


def desingularize(alpha: E.BForm, prof: ProfileFn, grid: GridConfig = DEFAULT_GRID,
                  check_convexity: bool = True) -> DesingResult:
    """Replace σ by f_ε'(z) dz."""
    ch = alpha.chart
    if not ch.singular:
        raise ChartError("desingularize expects a b^m form")
    _check_parity(prof.kind, ch.m, prof)
    if check_convexity:
        cls = convexity_classify(alpha, grid)
        if not cls.almost_convex:
            raise NotAlmostConvexError(f"form is not almost convex: {cls.offending}")
    sm = ch.smooth()
    z = ch.zsym
    F1 = S.profile_function(prof.f, 1)(z)
    coeffs = {b: c for b, c in alpha.items() if b != (0,)}
    coeffs[(0,)] = E.sigma_coefficient(alpha) * F1
    a_eps = E.BForm(sm, 1, coeffs, simplify=False)
    eps = prof.eps
    far = _region_points(sm, ch.z, lambda v: np.abs(v) > 2 * eps, grid.n_off, grid.seed)
    agree = _coeff_gap(a_eps, E.to_smooth_frame(alpha), far)
    # c(α_ε) = f_ε'(z)·z^m·c(α) with c(α) taken in the smooth frame
    lhs = contact_coeff(a_eps)
    rhs = F1 * contact_coeff(alpha)
    pts = grid.off(sm)
    va, vb = S.evaluate_grid(lhs, sm, pts), S.evaluate_grid(rhs, sm, pts)
    rel = float(np.max(np.abs(va - vb) / np.maximum(1.0, np.abs(vb))))
    res = DesingResult(a_eps, prof, agree, rel)
    if ch.m % 2 == 0:
        res.contact = is_contact(a_eps, grid)
    else:
        res.fold = folded_check(a_eps, grid, axis=ch.z)
    return res


# ----------------------------------------------------------------------------
# singularization


@dataclass
class CriticalComponent:
    position: float
    expected: float | None = None

    def to_dict(self) -> dict:
        return {"t": self.position, "expected": self.expected}


def critical_components(prof: ProfileFn, lo: float, hi: float, n: int = 4001, tol: float = 1e-8) -> list[float]:
    """Zeros of 1/s' on [lo, hi]: where the profile derivative blows up."""
    ts = np.linspace(lo, hi, n)
    with np.errstate(all="ignore"):
        g = np.abs(1.0 / prof.evaluate(ts, 1))
    g = np.where(np.isfinite(g), g, 0.0)
    out: list[float] = []
    cell = (hi - lo) / (n - 1)
    for i in range(n):
        left = g[i - 1] if i > 0 else math.inf
        right = g[i + 1] if i + 1 < n else math.inf
        if g[i] < 1e-2 and g[i] <= left and g[i] <= right and (g[i] < left or g[i] < right):
            a, b = ts[max(i - 1, 0)], ts[min(i + 1, n - 1)]

            def h(t):
                with np.errstate(all="ignore"):
                    v = abs(1.0 / float(prof.evaluate(np.array([t]), 1)[0]))
                return v if np.isfinite(v) else 0.0

            r = minimize_scalar(h, bounds=(a, b), method="bounded", options={"xatol": 1e-13})
            t, val = (float(r.x), float(r.fun)) if r.fun <= g[i] else (float(ts[i]), float(g[i]))
            if val <= tol and not any(abs(t - s) <= 3 * cell for s in out):
                out.append(t)
    return out


@dataclass
class SingResult:
    kind: str
    forms: list[E.BForm]
    centers: list[float]
    smooth_form: E.BForm
    profile: ProfileFn
    agreement: float
    disagreement_other_side: float | None
    contact: list[ContactReport]
    convexity: list[str]
    components: list[float]

    @property
    def ok(self) -> bool:
        return (self.agreement <= AGREE_TOL and all(r.contact for r in self.contact)
                and all(c == "convex" for c in self.convexity))

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "forms": [{"chart": f.chart.to_dict(), "form": f.to_dict(), "center": c}
                      for f, c in zip(self.forms, self.centers)],
            "smooth_form": self.smooth_form.to_dict(),
            "profile": self.profile.to_dict(),
            "agreement": self.agreement,
            "disagreement_other_side": self.disagreement_other_side,
            "contact": [r.to_dict() for r in self.contact],
            "convexity": self.convexity,
            "critical_components": self.components,
        }


def _on_collar(w: E.BForm, t: str, eps: float) -> E.BForm:
    lo, hi = w.chart.interval(t)
    return E.BForm(w.chart.with_box(t, max(lo, -eps), min(hi, eps)), w.degree, dict(w.coeffs), simplify=False)


def check_vertical(alpha: E.BForm, t: str, grid: GridConfig = DEFAULT_GRID):
    ch = alpha.chart
    pts = grid.both(ch)
    for b, c in alpha.items():
        d = S.simplify(S.diff(c, t))
        if d != 0 and np.max(np.abs(S.evaluate_grid(d, ch, pts))) > grid.tol:
            raise NotVerticallyInvariantError(f"coefficient of {alpha.blade_name(b)} depends on {t}")


def singularize(alpha: E.BForm, prof: ProfileFn, t: str | None = None,
                grid: GridConfig = DEFAULT_GRID) -> SingResult:
    """α = u dt + β ↦ u ds_ε + β written in a b^m frame along the critical set."""
    ch = alpha.chart
    if ch.singular:
        raise ChartError("singularize expects a smooth form")
    if prof.kind not in ("sing-even", "sing-odd", "sing-onesided"):
        raise ParityError(f"{prof.kind} is not a singularizing profile")
    t = t or ch.z or "t"
    if t not in ch.coords:
        raise ChartError(f"no coordinate {t!r} on the chart")
    check_vertical(alpha, t, grid)
    pre = is_contact(alpha, grid)
    if not pre.contact:
        raise ValueError(f"input is not contact: {pre.verdict}")
    m, eps = prof.m, prof.eps
    ts = S.coord(t)
    smooth_t = Chart(ch.coords, ch.box, t, 0)
    a0 = E.reframe(alpha, smooth_t)
    u, beta = split_vertical(a0, t)
    rest = dict(beta.coeffs)
    H = S.profile_function(prof.f, 1)(ts)
    smooth = E.BForm(smooth_t, 1, {**rest, (0,): u * H}, simplify=False)
    lo, hi = ch.interval(t)

    forms, centers = [], []
    if prof.kind == "sing-odd":
        c = sp.Rational(3, 8) * sp.nsimplify(eps, rational=True)
        sing = [p for p in prof.f.pieces if isinstance(p, SymPiece) and p.lo >= eps / 4 - 1e-15
                and p.hi <= eps / 2 + 1e-15 and p.lo >= 3 * eps / 8 - 1e-15][0].expr
        ds = sp.diff(sing, PX)
        for sign in (+1, -1):
            w_name = ch.fresh_name(f"{t}{'p' if sign > 0 else 'm'}")
            w = S.coord(w_name)
            # s'(t) near t = ±c: s' is even, so s'(−c + w) = s'(c − w)
            arg = c + w if sign > 0 else c - w
            G = sp.cancel(ds.xreplace({PX: arg}) * w ** m)
            coords = tuple(w_name if n == t else n for n in ch.coords)
            box = tuple((-eps / 8, eps / 8) if n == t else b for n, b in zip(ch.coords, ch.box))
            sub = Chart(coords, box, w_name, m)
            sub_rest = {}
            for b, v in rest.items():
                sub_rest[b] = v.xreplace({ts: w + sign * c})
            forms.append(E.BForm(sub, 1, {**sub_rest, (0,): u.xreplace({ts: w + sign * c}) * G}))
            centers.append(float(sign * c))
        far = _region_points(smooth_t, t, lambda v: np.abs(v) > eps, grid.n_off, grid.seed)
        other = None
    else:
        G = S.profile_function(prof.f.derivative().times_power(m), 0)(ts)
        target = Chart(ch.coords, ch.box, t, m)
        forms.append(E.BForm(target, 1, {**rest, (0,): u * G}, simplify=False))
        centers.append(0.0)
        if prof.kind == "sing-onesided":
            far = _region_points(smooth_t, t, lambda v: v > 2 * eps, grid.n_off, grid.seed)
            opp = _region_points(smooth_t, t, lambda v: v < -2 * eps, grid.n_off, grid.seed)
            other = _coeff_gap(smooth, a0, opp)
        else:
            far = _region_points(smooth_t, t, lambda v: np.abs(v) > 2 * eps, grid.n_off, grid.seed)
            other = None
    agree = _coeff_gap(smooth, a0, far)
    reports = [is_contact(f, grid) for f in forms]
    # convexity is a property of the germ along Z: judge it on the collar |t| <= ε
    collar = [f if prof.kind == "sing-odd" else _on_collar(f, t, eps) for f in forms]
    conv = [convexity_classify(f, grid).kind.value for f in collar]
    comps = critical_components(prof, lo, hi)
    return SingResult(prof.kind, forms, centers, smooth, prof, agree, other, reports, conv, comps)


# ----------------------------------------------------------------------------
# orientation obstruction


def orientation_obstruction_check(m: int, components: int, n: int = 200, seed: int = 42) -> dict:
    """Sign of the contact coefficient of σ + x dy on both sides of Z.

    With a single critical hypersurface separating a connected complement,
    an odd order forces opposite signs and hence opposite orientations.
    """
    if m < 1 or components < 1:
        raise ValueError("need m >= 1 and at least one component")
    ch = Chart(("z", "x", "y"), ((-1.0, 1.0),) * 3, "z", m)
    cand = E.one_form(ch, {"sigma": 1, "x": 0}) + S.coord("x") * E.dcoord(ch, "y")
    c = contact_coeff(E.to_smooth_frame(cand))
    pts = sample(ch, n, region="off", seed=seed)
    v = S.evaluate_grid(c, ch, pts)
    zc = pts[:, 0]
    left, right = np.sign(v[zc < 0]), np.sign(v[zc > 0])
    flips = bool(np.all(left == -right[0]) and np.all(right == right[0]))
    obstructed = m % 2 == 1 and components == 1
    return {"m": m, "components": components, "sign_left": int(left[0]), "sign_right": int(right[0]),
            "sign_flip": flips, "verdict": "obstructed" if obstructed else "admissible"}


# ----------------------------------------------------------------------------
# convergence of Jacobi data


@dataclass
class ConvergenceReport:
    k: int
    kappa: float
    rows: list[dict] = field(default_factory=list)
    reeb_residual: dict[float, float] = field(default_factory=dict)

    @property
    def eps_list(self) -> list[float]:
        return sorted({r["eps"] for r in self.rows}, reverse=True)

    def series(self, j: int, region: str = "fixed") -> list[float]:
        return [r["sup_diff"] for r in sorted(self.rows, key=lambda r: -r["eps"])
                if r["j"] == j and r["region"] == region]

    def strictly_decreasing(self, j: int, region: str = "fixed") -> bool:
        s = self.series(j, region)
        return len(s) >= 2 and all(b < a for a, b in zip(s, s[1:]))

    def slope(self, j: int, region: str = "fixed") -> float | None:
        s = np.array(self.series(j, region))
        e = np.array(self.eps_list)
        if s.size < 2 or np.any(s <= 0):
            return None
        return float(np.polyfit(np.log(e), np.log(s), 1)[0])

    def to_csv(self, region: str = "fixed") -> str:
        lines = ["eps,j,sup_diff"]
        for r in sorted(self.rows, key=lambda r: (-r["eps"], r["j"])):
            if r["region"] == region:
                lines.append(f"{r['eps']!r},{r['j']},{r['sup_diff']!r}")
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        js = sorted({r["j"] for r in self.rows})
        return {
            "k": self.k, "kappa": self.kappa, "rows": self.rows,
            "slopes": {f"{reg}:j={j}": self.slope(j, reg) for reg in ("fixed", "support") for j in js},
            "strictly_decreasing": {f"{reg}:j={j}": self.strictly_decreasing(j, reg)
                                    for reg in ("fixed", "support") for j in js},
            "reeb_z_residual": {repr(e): v for e, v in self.reeb_residual.items()},
        }


def _jacobi_gap(A, B, axis: str, j: int, pts) -> float:
    worst = 0.0
    if pts.shape[0] == 0:
        return 0.0
    for P, Q in ((A[0], B[0]), (A[1], B[1])):
        for blade in set(P.coeffs) | set(Q.coeffs):
            d = P[blade] - Q[blade]
            for _ in range(j):
                d = S.diff(d, axis)
            v = S.evaluate_grid(d, P.chart, pts)
            worst = max(worst, float(np.max(np.abs(v))))
    return worst


def convergence_report(alpha: E.BForm, eps_list, kappa: float = 0.5,
                       grid: GridConfig = DEFAULT_GRID, n: int = 200) -> ConvergenceReport:
    """C^j gaps (j < 2k) between Jacobi data of α_ε and α in the smooth frame.

    Two regions are tabulated: ``fixed`` is |z| ≥ κ and ``support`` is
    |z| ≤ 2ε, where the deformation actually acts.
    """
    ch = alpha.chart
    if not ch.singular or ch.m % 2:
        raise ParityError("convergence_report expects a b^{2k} form")
    k = ch.m // 2
    eps_list = sorted(eps_list, reverse=True)
    J0 = jacobi_from_contact(alpha, grid, verify=False)
    base = (E.to_smooth_frame(J0.Lam), E.to_smooth_frame(J0.R))
    g = J0.R[(0,)]
    rep = ConvergenceReport(k, kappa)
    sm = ch.smooth()
    fixed = _region_points(sm, ch.z, lambda v: np.abs(v) >= kappa, n, grid.seed)
    for eps in eps_list:
        prof = build_profile("desing-even", k, eps)
        res = desingularize(alpha, prof, grid)
        Je = jacobi_from_contact(res.alpha_eps, grid, verify=False)
        pair = (Je.Lam, Je.R)
        support = _region_points(sm, ch.z, lambda v: np.abs(v) <= 2 * eps, n, grid.seed)
        for j in range(2 * k):
            for region, pts in (("fixed", fixed), ("support", support)):
                rep.rows.append({"eps": eps, "j": j, "region": region,
                                 "sup_diff": _jacobi_gap(pair, base, ch.z, j, pts)})
        F1 = S.profile_function(prof.f, 1)(ch.zsym)
        pts = grid.off(sm)
        rz = S.evaluate_grid(Je.R[(0,)], sm, pts) - S.evaluate_grid(g / F1, sm, pts)
        rep.reeb_residual[eps] = float(np.max(np.abs(rz)))
    return rep


# ----------------------------------------------------------------------------
# two-component folded forms


@dataclass
class CorollaryResult:
    sing: SingResult
    alpha: E.BForm
    fold: FoldReport
    inner_eps: float

    @property
    def ok(self) -> bool:
        return self.fold.folded and self.fold.n_components == 2

    def to_dict(self) -> dict:
        return {"singularization": self.sing.to_dict(), "alpha": self.alpha.to_dict(),
                "fold": self.fold.to_dict(), "inner_eps": self.inner_eps}


def folded_from_vertical(alpha: E.BForm, eps: float, t: str | None = None,
                         grid: GridConfig = DEFAULT_GRID, inner_ratio: float = 1 / 32) -> CorollaryResult:
    """sing-odd (k=0) singularization followed by desing-odd (k=0) at each component."""
    prof = build_profile("sing-odd", 0, eps)
    sres = singularize(alpha, prof, t, grid)
    e2 = eps * inner_ratio
    des = build_profile("desing-odd", 0, e2)
    c = 3 * eps / 8
    d1 = des.f.derivative()
    h = prof.f.derivative()
    h = h.splice(d1.shifted(c), c - 2 * e2, c + 2 * e2, "h_fold")
    h = h.splice(d1.shifted(-c).scaled(-1.0), -c - 2 * e2, -c + 2 * e2, "h_fold")
    smooth = sres.smooth_form
    u, _ = split_vertical(E.reframe(alpha, smooth.chart), smooth.chart.z)
    H = S.profile_function(h, 0)(smooth.chart.zsym)
    coeffs = {b: v for b, v in smooth.items() if b != (0,)}
    coeffs[(0,)] = u * H
    out = E.BForm(smooth.chart, 1, coeffs, simplify=False)
    fold = folded_check(out, grid, axis=smooth.chart.z)
    return CorollaryResult(sres, out, fold, e2)


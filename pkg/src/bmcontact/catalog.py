"""Named b^m-contact examples and local Jacobi models with their expected properties."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import sympy as sp

from . import exterior as E
from . import scalar as S
from .chart import Chart, chart
from .contact import (PointClass, classify_point, convexity_classify, critical_chart, is_contact,
                      reeb_with_residual, reeb_zero_clusters, theta_form)
from .jacobi import (LeafKind, bjacobi_transversality, jacobi_from_contact, jacobi_residuals,
                     jacobi_via_liouville, leaf_classify, liouville_contract, reeb_orthogonality_check)
from .sampling import DEFAULT_GRID, GridConfig

TWO_PI = 2 * math.pi


class UnknownEntryError(KeyError):
    pass


Check = Callable[["CatalogEntry", GridConfig], tuple[bool, dict]]


@dataclass
class Expectation:
    name: str
    check: Check
    tol: float


@dataclass
class CatalogEntry:
    name: str
    chart: Chart
    note: str
    form: E.BForm | None = None
    pair: tuple[E.BMultiVector, E.BMultiVector] | None = None
    expectations: list[Expectation] = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {"name": self.name, "chart": self.chart.to_dict(), "note": self.note,
             "expectations": [e.name for e in self.expectations]}
        if self.form is not None:
            d["form"] = self.form.to_text()
        if self.pair is not None:
            d["Lambda"] = self.pair[0].to_dict()
            d["R"] = self.pair[1].to_dict()
        return d


@dataclass
class VerifyReport:
    name: str
    results: list[dict]

    @property
    def passed(self) -> bool:
        return all(r["passed"] for r in self.results)

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "results": self.results}


# ----------------------------------------------------------------------------
# expectation factories


def _grid_for(g: GridConfig, tol: float) -> GridConfig:
    return GridConfig(g.n_off, g.n_on, tol, g.seed, g.delta)


def _vec(ch: Chart, spec: dict[str, str]) -> E.BMultiVector:
    return E.vector_field(ch, {k: S.parse_scalar(v, ch) for k, v in spec.items()})


def expect_contact(verdict: str = "contact", tol: float = 1e-8) -> Expectation:
    def check(e, g):
        rep = is_contact(e.form, _grid_for(g, tol))
        return rep.verdict == verdict, {"verdict": rep.verdict, "min_off": rep.min_off, "min_on": rep.min_on}
    return Expectation(f"contact verdict is {verdict!r}", check, tol)


def expect_reeb(spec: dict[str, str] | None, tol: float = 1e-8) -> Expectation:
    """Back-substitution residual, and symbolic match when ``spec`` is given."""
    def check(e, g):
        res = reeb_with_residual(e.form, _grid_for(g, tol))
        info = {"R": res.field.to_dict(), "residual": res.residual}
        ok = res.residual <= tol
        if spec is not None:
            diff = res.field - _vec(e.chart, spec)
            info["symbolic_match"] = diff.is_zero()
            ok = ok and info["symbolic_match"]
        return ok, info
    return Expectation("Reeb field" + (" matches closed form" if spec else " residual"), check, tol)


def expect_class(point: dict, cls: str) -> Expectation:
    def check(e, g):
        pc = classify_point(e.form, point)
        return pc.cls.value == cls, pc.to_dict()
    return Expectation(f"point class {cls} at {point}", check, 1e-9)


def expect_theta(theta_text: str | None = None, tol: float = 1e-8) -> Expectation:
    def check(e, g):
        rep = theta_form(e.form, _grid_for(g, tol))
        info = rep.to_dict()
        ok = rep.ok
        if theta_text is not None:
            want = E.parse_form(theta_text, critical_chart(e.chart))
            info["matches"] = (rep.theta - want).is_zero()
            ok = ok and info["matches"]
        return ok, info
    label = "Theta on Z nondegenerate with iota_R Theta = s du"
    return Expectation(label + (f", Theta = {theta_text}" if theta_text else ""), check, tol)


def expect_zero_clusters(at_least: int, counts: dict[str, int], periodic=()) -> Expectation:
    def check(e, g):
        n, _ = reeb_zero_clusters(e.form, counts, tuple(periodic))
        return n >= at_least, {"clusters": n}
    return Expectation(f"at least {at_least} zero clusters of R on Z", check, 0.0)


def expect_jacobi(tol: float = 1e-7) -> Expectation:
    def check(e, g):
        if e.pair is not None:
            res = jacobi_residuals(*e.pair, g.both(e.chart))
        else:
            res = jacobi_from_contact(e.form, g, tol=tol).residuals
        return all(v <= tol for v in res.values()), res
    return Expectation("Jacobi identities hold", check, tol)


def expect_transversal(value: bool) -> Expectation:
    def check(e, g):
        rep = bjacobi_transversality(jacobi_from_contact(e.form, g, verify=False), g)
        return rep.transversal == value, rep.to_dict()
    return Expectation(f"b-Jacobi transversality is {value}", check, 1e-6)


def expect_ddzero() -> Expectation:
    def check(e, g):
        dd = E.ext_d(E.ext_d(e.form))
        return dd.is_zero(), {}
    return Expectation("d(d alpha) = 0", check, 0.0)


def expect_convexity(kind: str) -> Expectation:
    def check(e, g):
        c = convexity_classify(e.form, g)
        return c.kind.value == kind, c.to_dict()
    return Expectation(f"convexity class is {kind!r}", check, 1e-8)


def expect_leaf(point: dict, kind: LeafKind) -> Expectation:
    def check(e, g):
        lc = leaf_classify(jacobi_from_contact(e.form, g, verify=False), point)
        return lc.kind == kind, lc.to_dict()
    return Expectation(f"leaf through {point} is {kind.name}", check, 1e-7)


def expect_contraction(expected: str, tol: float = 1e-8) -> Expectation:
    def check(e, g):
        x = e.extras
        res = liouville_contract(x["omega"], x["X"], x["emb"], _grid_for(g, tol))
        info = res.to_dict()
        ok = res.report.contact
        if expected:
            info["matches"] = (res.alpha - E.parse_form(expected, e.chart)).is_zero()
            ok = ok and info["matches"]
        return ok, info
    label = "contraction is contact" + (f" and equals {expected}" if expected else "")
    return Expectation(label, check, tol)


def expect_orthogonality(tol: float = 1e-8) -> Expectation:
    def check(e, g):
        x = e.extras
        rep = reeb_orthogonality_check(x["omega"], x["X"], x["emb"], _grid_for(g, tol))
        return rep.holds, rep.to_dict()
    return Expectation("Reeb field is dω-orthogonal to the hypersurface", check, tol)


def expect_liouville_restriction(X: dict[str, str], on_Z: dict[tuple[str, str], str], tol: float = 1e-8) -> Expectation:
    """Λ = Π + R∧X satisfies the Jacobi identities and restricts to ``on_Z``."""
    def check(e, g):
        ch = e.chart
        lj = jacobi_via_liouville(e.form, _vec(ch, X), _grid_for(g, tol))
        Ls = E.to_smooth_frame(lj.pair.Lam)
        want = {}
        for (a, b), txt in on_Z.items():
            i, j = ch.frame.index(a), ch.frame.index(b)
            sign = 1 if i < j else -1
            want[tuple(sorted((i, j)))] = sign * S.parse_scalar(txt, ch)
        got = E.BMultiVector(Ls.chart, 2, {k: S.substitute(v, {ch.z: 0}) for k, v in Ls.items()})
        match = (got - E.BMultiVector(Ls.chart, 2, want)).is_zero()
        return match and lj.pair.verified, {"Lambda_on_Z": got.to_dict(), "jacobi": lj.pair.residuals}
    return Expectation("Liouville construction restricts to the normal form on Z", check, tol)


# ----------------------------------------------------------------------------
# entries

_BUILDERS: dict[str, Callable[[], CatalogEntry]] = {}


def _entry(fn):
    _BUILDERS[fn.__name__] = fn
    return fn


def _box(n, lo=-1.0, hi=1.0):
    return [[lo, hi]] * n


def _form(name, coords, box, z, m, text, note, expectations, **extras):
    ch = chart(coords, box, z, m)
    return CatalogEntry(name, ch, note, E.parse_form(text, ch), None, expectations, extras)


@_entry
def extended_phase_space_n1():
    return _form("extended_phase_space_n1", ["t", "x1", "z"], _box(3), "z", 1, "D(t) + x1*B",
                 "dt plus the canonical one-form on the b-cotangent bundle of a line",
                 [expect_ddzero(), expect_contact(), expect_reeb({"t": "1"}), expect_jacobi(),
                  expect_class({"t": 0, "x1": 0, "z": 0}, "1a"), expect_class({"t": 0.2, "x1": 0.5, "z": 0}, "1b"),
                  expect_theta("D(t)^D(x1)"), expect_transversal(True), expect_convexity("convex")])


@_entry
def extended_phase_space_n2():
    return _form("extended_phase_space_n2", ["t", "x1", "x2", "z", "y2"], _box(5), "z", 1,
                 "D(t) + x1*B + x2*D(y2)",
                 "dt plus the canonical one-form on the b-cotangent bundle of a plane",
                 [expect_ddzero(), expect_contact(), expect_reeb({"t": "1"}), expect_jacobi(),
                  expect_class({"t": 0, "x1": 0, "x2": 0.3, "z": 0, "y2": 0.1}, "1a"), expect_transversal(True)])


@_entry
def singular_reeb_n1():
    return _form("singular_reeb_n1", ["z", "x1", "y1"], _box(3), "z", 1, "B + x1*D(y1)",
                 "dz/z plus x dy; the distribution keeps full rank on Z",
                 [expect_ddzero(), expect_contact(), expect_reeb({"zeta": "1"}), expect_jacobi(),
                  expect_class({"z": 0, "x1": 0.3, "y1": -0.2}, "2"), expect_theta("D(x1)^D(y1)"),
                  expect_transversal(True), expect_convexity("convex"),
                  expect_leaf({"z": 0, "x1": 0.3, "y1": 0.1}, LeafKind.LCSLeaf)])


@_entry
def singular_reeb_n2():
    return _form("singular_reeb_n2", ["z", "x1", "y1", "x2", "y2"], _box(5), "z", 1,
                 "B + x1*D(y1) + x2*D(y2)", "dz/z plus x1 dy1 + x2 dy2",
                 [expect_ddzero(), expect_contact(), expect_reeb({"zeta": "1"}), expect_jacobi(),
                  expect_class({"z": 0, "x1": 0.1, "y1": 0.2, "x2": 0.3, "y2": 0.4}, "2"), expect_transversal(True)])


def _mobius_map(target: Chart) -> E.ChartMap:
    """Ball → half space (inverse Möbius map) in coordinates (s, u, v).

    A ball point is (1 − s)·ω(u, v) with ω the inverse stereographic
    projection from (1, 0, 0); the boundary sphere is s = 0.
    """
    src = chart(["s", "u", "v"], [[-0.2, 0.2], [-0.5, 0.5], [-0.5, 0.5]], "s", 1)
    s, u, v = (S.coord(n) for n in ("s", "u", "v"))
    q = 1 + u ** 2 + v ** 2
    a = [(1 - s) * (u ** 2 + v ** 2 - 1) / q, (1 - s) * 2 * u / q, (1 - s) * 2 * v / q]
    D = (a[0] - 1) ** 2 + a[1] ** 2 + a[2] ** 2
    first = sp.cancel((1 - a[0] ** 2 - a[1] ** 2 - a[2] ** 2) / D)
    names = target.coords
    rest = [sp.cancel(2 * a[1] / D), sp.cancel(2 * a[2] / D)]
    exprs = {target.z: first}
    exprs.update(dict(zip([n for n in names if n != target.z], rest)))
    return E.ChartMap(src, target, exprs)


def _mobius(name, text, note, cls_expect):
    tgt = chart(["z", "x1", "t"], _box(3), "z", 1)
    phi = _mobius_map(tgt)
    alpha = E.pullback(phi, E.parse_form(text, tgt))
    return CatalogEntry(name, phi.source, note, alpha, None,
                        [expect_contact(), expect_reeb(None), expect_jacobi(), expect_transversal(True), cls_expect])


@_entry
def mobius_ball_regular():
    return _mobius("mobius_ball_regular", "D(t) + x1*B",
                   "pullback of dt + x dz/z to the unit ball; Z is the unit sphere (s = 0)",
                   expect_class({"s": 0, "u": 0, "v": 0}, "1a"))


@_entry
def mobius_ball_singular():
    return _mobius("mobius_ball_singular", "B + x1*D(t)",
                   "pullback of dz/z + x dt to the unit ball; Z is the unit sphere (s = 0)",
                   expect_class({"s": 0, "u": 0, "v": 0}, "2"))


@_entry
def s2xs1():
    return _form("s2xs1", ["h", "theta", "phi"], [[-1, 1], [0, TWO_PI], [0, TWO_PI]], "h", 1,
                 "sin(phi)*D(theta) + cos(phi)*B",
                 "S^2 x S^1 near the equator h = 0 of the sphere; theta, phi periodic",
                 [expect_ddzero(), expect_contact(), expect_reeb({"theta": "sin(phi)", "zeta": "cos(phi)"}),
                  expect_jacobi(), expect_class({"h": 0, "theta": 1.0, "phi": math.pi / 2}, "1a"),
                  expect_class({"h": 0, "theta": 1.0, "phi": 0.0}, "2"), expect_theta("D(phi)^D(theta)"),
                  expect_zero_clusters(2, {"theta": 64, "phi": 64}, ("theta", "phi")), expect_transversal(True),
                  expect_convexity("convex")])


@_entry
def torus3_b1():
    return _form("torus3_b1", ["z", "y", "phi"], [[-1, 1], [0, TWO_PI], [0, TWO_PI]], "z", 1,
                 "sin(phi)*B + cos(phi)*D(y)",
                 "unit cotangent bundle of the b-torus; z = tan(x/2) turns dx/sin(x) into dz/z",
                 [expect_ddzero(), expect_contact(), expect_reeb({"zeta": "sin(phi)", "y": "cos(phi)"}),
                  expect_jacobi(), expect_theta(), expect_zero_clusters(2, {"y": 64, "phi": 64}, ("y", "phi")),
                  expect_transversal(True), expect_convexity("convex")])


@_entry
def torus3_b2():
    return _form("torus3_b2", ["z", "y", "phi"], [[-1, 1], [0, TWO_PI], [0, TWO_PI]], "z", 2,
                 "sin(phi)*B + cos(phi)*D(y)",
                 "the 3-torus form with a b^2 singularity along z = 0",
                 [expect_ddzero(), expect_contact(), expect_reeb({"zeta": "sin(phi)", "y": "cos(phi)"}),
                  expect_jacobi(), expect_transversal(False), expect_convexity("convex")])


@_entry
def klein_prequotient():
    return _form("klein_prequotient", ["z", "y", "theta"], [[-1, 1], [0, 1], [0, TWO_PI]], "z", 1,
                 "cos(theta)/(2*pi)*B + sin(theta)*D(y)",
                 "torus form invariant under (x, y) -> (1 - x, y); z = tan(pi x) near x = 0, "
                 "the other component x = 1/2 is not covered; the quotient is not built",
                 [expect_contact(), expect_reeb(None), expect_jacobi(), expect_theta(), expect_transversal(True)])


@_entry
def product_singular_reeb_r2():
    return _form("product_singular_reeb_r2", ["z", "x1", "y1", "p", "q"], _box(5), "z", 1,
                 "B + x1*D(y1) + p*D(q)", "singular Reeb model times (R^2, d(p dq))",
                 [expect_contact(), expect_reeb({"zeta": "1"}), expect_jacobi()])


@_entry
def product_extended_r2():
    return _form("product_extended_r2", ["t", "x1", "z", "p", "q"], _box(5), "z", 1,
                 "D(t) + x1*B + p*D(q)", "extended phase space times (R^2, d(p dq))",
                 [expect_contact(), expect_reeb({"t": "1"}), expect_jacobi()])


@_entry
def darboux_1a_n1():
    return _form("darboux_1a_n1", ["z", "x1", "y1"], _box(3), "z", 1, "D(x1) + y1*B",
                 "regular Reeb field, singular distribution at the origin",
                 [expect_contact(), expect_reeb({"x1": "1"}), expect_jacobi(),
                  expect_class({"z": 0, "x1": 0, "y1": 0}, "1a"),
                  expect_leaf({"z": 0, "x1": 0.1, "y1": 0.0}, LeafKind.ContactLeaf),
                  expect_leaf({"z": 0, "x1": 0.1, "y1": 0.3}, LeafKind.LCSLeaf),
                  expect_liouville_restriction({"y1": "y1"}, {("x1", "y1"): "y1"})])


@_entry
def darboux_1b_n1():
    return _form("darboux_1b_n1", ["z", "x1", "y1"], _box(3), "z", 1, "D(x1) + y1*B + B",
                 "regular Reeb field, regular distribution at the origin",
                 [expect_contact(), expect_reeb({"x1": "1"}), expect_jacobi(),
                  expect_class({"z": 0, "x1": 0, "y1": 0}, "1b"),
                  expect_leaf({"z": 0, "x1": 0.1, "y1": 0.3}, LeafKind.LCSLeaf)])


@_entry
def darboux_2_n1():
    return _form("darboux_2_n1", ["z", "x1", "y1"], _box(3), "z", 1, "B + x1*D(y1)",
                 "singular Reeb field at the origin",
                 [expect_contact(), expect_reeb({"zeta": "1"}), expect_jacobi(),
                  expect_class({"z": 0, "x1": 0, "y1": 0}, "2"),
                  expect_leaf({"z": 0, "x1": 0.2, "y1": -0.4}, LeafKind.LCSLeaf)])


@_entry
def darboux_1a_n2():
    return _form("darboux_1a_n2", ["z", "x1", "y1", "x2", "y2"], _box(5), "z", 1,
                 "D(x1) + y1*B + x2*D(y2)", "regular Reeb model in dimension 5",
                 [expect_contact(), expect_reeb({"x1": "1"}), expect_jacobi(),
                  expect_class({"z": 0, "x1": 0, "y1": 0, "x2": 0.2, "y2": 0.1}, "1a"),
                  expect_liouville_restriction({"y1": "y1", "y2": "y2"},
                                               {("x2", "y2"): "1", ("x1", "y1"): "y1", ("x1", "y2"): "y2"})])


def _r4():
    W = chart(["z", "t", "x", "y"], _box(4, -2.0, 2.0), "z", 1)
    omega = E.parse_form("B^D(t) + D(x)^D(y)", W)
    X = _vec(W, {"t": "t", "x": "x"})
    return W, omega, X


@_entry
def r4_slice_M1():
    W, omega, X = _r4()
    src = chart(["z", "y", "t"], _box(3), "z", 1)
    emb = E.ChartMap.parse(src, W, {"z": "z", "t": "-t", "x": "1", "y": "y"})
    return CatalogEntry("r4_slice_M1", src, "slice x = 1 of (R^4, dz/z^dt + dx^dy), t reversed", None, None,
                        [expect_contraction("D(y) + t*B"), expect_orthogonality()],
                        {"omega": omega, "X": X, "emb": emb})


@_entry
def r4_slice_M2():
    W, omega, X = _r4()
    src = chart(["z", "x", "y"], _box(3), "z", 1)
    emb = E.ChartMap.parse(src, W, {"z": "z", "t": "-1", "x": "x", "y": "y"})
    return CatalogEntry("r4_slice_M2", src, "slice t = -1 of (R^4, dz/z^dt + dx^dy)", None, None,
                        [expect_contraction("B + x*D(y)"), expect_orthogonality()],
                        {"omega": omega, "X": X, "emb": emb})


@_entry
def s3():
    W = chart(["x1", "y1", "x2", "y2"], _box(4, -1.5, 1.5), "x1", 1)
    omega = E.parse_form("B^D(y1) + D(x2)^D(y2)", W)
    X = _vec(W, {"zeta": "1/2", "y1": "y1", "x2": "x2/2", "y2": "y2/2"})
    src = chart(["s", "v", "psi"], [[-0.5, 0.5], [-0.5, 0.5], [0, TWO_PI]], "s", 1)
    s_, v_, psi = (S.coord(n) for n in ("s", "v", "psi"))
    r = sp.sqrt(1 - s_ ** 2 - v_ ** 2)
    emb = E.ChartMap(src, W, {"x1": s_, "y1": v_, "x2": r * sp.cos(psi), "y2": r * sp.sin(psi)})
    return CatalogEntry("s3", src, "unit sphere in (R^4, dx1/x1^dy1 + dx2^dy2); Z is the 2-sphere x1 = 0",
                        None, None, [expect_contraction("D(v)/2 - v*B + (1 - s^2 - v^2)/2*D(psi)"), expect_orthogonality()],
                        {"omega": omega, "X": X, "emb": emb})


@_entry
def unit_bcotangent_n2():
    W = chart(["z", "y2", "x1", "x2"], [[-1, 1], [-1, 1], [-1.5, 1.5], [-1.5, 1.5]], "z", 1)
    omega = E.ext_d(E.parse_form("x1*B + x2*D(y2)", W))
    X = _vec(W, {"x1": "x1", "x2": "x2"})
    src = chart(["z", "y2", "phi"], [[-1, 1], [-1, 1], [0, TWO_PI]], "z", 1)
    emb = E.ChartMap.parse(src, W, {"z": "z", "y2": "y2", "x1": "cos(phi)", "x2": "sin(phi)"})
    return CatalogEntry("unit_bcotangent_n2", src, "unit b-cotangent bundle of a b-surface, x1^2 + x2^2 = 1",
                        None, None, [expect_contraction("cos(phi)*B + sin(phi)*D(y2)"), expect_orthogonality()],
                        {"omega": omega, "X": X, "emb": emb})


def _pair_entry(name, coords, lam: dict, R: dict, note, extra=()):
    ch = chart(coords, _box(len(coords)))
    L = E.BMultiVector(ch, 2, {tuple(sorted((ch.slot(a), ch.slot(b)))): (1 if ch.slot(a) < ch.slot(b) else -1)
                                * S.parse_scalar(v, ch) for (a, b), v in lam.items()})
    return CatalogEntry(name, ch, note, None, (L, _vec(ch, R)), [expect_jacobi(), *extra])


@_entry
def appendixB_2q_model():
    # q = 1 block times N = (line, Λ_N = 0, R_N = ∂w); R is R_N
    return _pair_entry("appendixB_2q_model", ["x1", "x2", "w"],
                       {("x2", "x1"): "1", ("x2", "w"): "-x2"}, {"w": "1"},
                       "even-leaf local model: Λ_2 + Λ_N − Z_2^R_N with N a line")


@_entry
def appendixB_2q1_model():
    # q = 1 block times a homogeneous Poisson plane (Λ_N = ∂a^∂b, Z_N = (a∂a + b∂b)/2)
    return _pair_entry("appendixB_2q1_model", ["x0", "x1", "x2", "a", "b"],
                       {("x0", "x2"): "x2", ("x1", "x2"): "-1", ("a", "b"): "1",
                        ("x0", "a"): "a/2", ("x0", "b"): "b/2"}, {"x0": "1"},
                       "odd-leaf local model: Λ_3 + Λ_N + R_3^Z_N with a homogeneous Poisson plane")


@_entry
def appendixB_contact_model():
    return _pair_entry("appendixB_contact_model", ["x0", "x1", "x2"],
                       {("x0", "x2"): "x2", ("x1", "x2"): "-1"}, {"x0": "1"},
                       "three-dimensional contact leaf model (Λ_3, R_3)")


# ----------------------------------------------------------------------------
# public API


def list_entries() -> list[str]:
    return sorted(_BUILDERS)


@lru_cache(maxsize=None)
def get(name: str) -> CatalogEntry:
    if name not in _BUILDERS:
        raise UnknownEntryError(name)
    return _BUILDERS[name]()


def verify(name: str, grid: GridConfig = DEFAULT_GRID) -> VerifyReport:
    return _verify_cached(name, grid)


@lru_cache(maxsize=None)
def _verify_cached(name: str, grid: GridConfig) -> VerifyReport:
    entry = get(name)
    results = []
    for exp in entry.expectations:
        try:
            ok, info = exp.check(entry, grid)
        except Exception as err:  # an expectation that raises is a failure, not a crash
            ok, info = False, {"error": f"{type(err).__name__}: {err}"}
        results.append({"expectation": exp.name, "tol": exp.tol, "passed": bool(ok), "details": info})
    return VerifyReport(name, results)


def contact_entries() -> list[str]:
    return [n for n in list_entries() if get(n).form is not None]


def point_class(value: str) -> PointClass:
    return PointClass(value)

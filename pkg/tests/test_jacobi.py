import math

import pytest

from bmcontact import chart
from bmcontact import exterior as E
from bmcontact import jacobi as J
from bmcontact import scalar as S
from bmcontact.contact import DimensionError

B1 = chart(["z", "x1", "y1"], [[-1, 1]] * 3, "z", 1)
B1_5 = chart(["z", "x1", "y1", "x2", "y2"], [[-1, 1]] * 5, "z", 1)


def F(text, ch=B1):
    return E.parse_form(text, ch)


def V(ch, **spec):
    return E.vector_field(ch, {k: S.parse_scalar(v, ch) for k, v in spec.items()})


@pytest.mark.parametrize("text, ch", [("B + x1*D(y1)", B1), ("D(x1) + y1*B", B1),
                                      ("B + x1*D(y1) + x2*D(y2)", B1_5)])
def test_jacobi_from_contact_identities(text, ch, grid):
    pair = J.jacobi_from_contact(F(text, ch), grid)
    assert pair.verified
    assert max(pair.residuals.values()) < 1e-7


def test_jacobi_pair_oracle():
    # σ + x dy: R = ζ, Λ = ∂x∧∂y + x ζ∧∂x, and α lies in the kernel of Λ
    alpha = F("B + x1*D(y1)")
    pair = J.jacobi_from_contact(alpha)
    assert (pair.R - V(B1, zeta="1")).is_zero()
    want = E.wedge(V(B1, x1="1"), V(B1, y1="1")) + E.wedge(V(B1, zeta="x1"), V(B1, x1="1"))
    assert (pair.Lam - want).is_zero()
    assert E.contract(alpha, pair.Lam).is_zero()


def test_s2xs1_jacobi(s2xs1, grid):
    assert max(J.jacobi_from_contact(s2xs1, grid).residuals.values()) < 1e-7


def test_liouville_construction_agrees_in_dimension_3(grid):
    alpha = F("D(x1) + y1*B")
    lj = J.jacobi_via_liouville(alpha, V(B1, y1="y1"), grid)
    assert lj.pair.verified and lj.discriminant_vanishes and lj.lemma_consistent
    ref = J.jacobi_from_contact(alpha, grid)
    assert (lj.pair.Lam - ref.Lam).is_zero()


def test_liouville_precondition(grid):
    with pytest.raises(J.NotLiouvilleError):
        J.jacobi_via_liouville(F("D(x1) + y1*B"), V(B1, y1="x1", zeta="1"), grid)


def test_discriminant_counterexample(grid):
    # X = x1 ∂y1 + ζ is not Liouville; R∧[X,R]∧X = ∂x1∧∂y1∧ζ does not vanish
    lj = J.jacobi_via_liouville(F("D(x1) + y1*B"), V(B1, y1="x1", zeta="1"), grid, check_liouville=False)
    assert lj.discriminant_max == pytest.approx(1.0)
    assert lj.pair.residuals["[L,R]"] == pytest.approx(1.0)
    assert not lj.pair.verified
    assert lj.lemma_consistent


def test_transversality_m1_vs_m2(torus_b1, torus_b2, grid):
    assert J.bjacobi_transversality(J.jacobi_from_contact(torus_b1, grid), grid).transversal
    rep = J.bjacobi_transversality(J.jacobi_from_contact(torus_b2, grid), grid)
    assert not rep.transversal
    assert rep.verdict == "not transversal"


def test_transversality_smooth_chart(grid):
    ch = chart(["x", "y", "w"], [[-1, 1]] * 3)
    rep = J.bjacobi_transversality(J.jacobi_from_contact(E.parse_form("D(w) - y*D(x)", ch), grid), grid)
    assert rep.verdict == "no critical set"


@pytest.mark.parametrize("text, point, kind", [
    ("B + x1*D(y1)", {"z": 0, "x1": 0.3, "y1": 0.1}, J.LeafKind.LCSLeaf),
    ("D(x1) + y1*B", {"z": 0, "x1": 0.1, "y1": 0.0}, J.LeafKind.ContactLeaf),
    ("D(x1) + y1*B", {"z": 0, "x1": 0.1, "y1": 0.3}, J.LeafKind.LCSLeaf),
    ("B + x1*D(y1)", {"z": 0.4, "x1": 0.3, "y1": 0.1}, J.LeafKind.ContactLeaf),
])
def test_leaf_classes(text, point, kind):
    assert J.leaf_classify(J.jacobi_from_contact(F(text)), point).kind == kind


def test_poissonization(s2xs1, grid):
    rep = J.poissonize(J.jacobi_from_contact(s2xs1, grid), grid)
    assert rep.residual_bracket < 1e-7
    assert rep.residual_homogeneity < 1e-7
    assert rep.ok()
    # with divided powers the top-power ratio is the constant −1
    assert rep.top_ratio == pytest.approx(-1.0)
    assert rep.top_ratio_spread < 1e-9


@pytest.mark.parametrize("ch, text, factor", [(B1, "B + x1*D(y1)", -2.0),
                                              (B1_5, "B + x1*D(y1) + x2*D(y2)", -3.0)])
def test_symplectization(ch, text, factor, grid):
    rep = J.symplectize(F(text, ch), grid)
    assert rep.closed
    assert rep.top_factor == pytest.approx(factor)
    assert rep.residual_liouville < 1e-10 and rep.residual_restriction < 1e-10


def test_symplectize_fresh_name(grid):
    ch = chart(["t", "x1", "z"], [[-1, 1]] * 3, "z", 1)
    rep = J.symplectize(E.parse_form("D(t) + x1*B", ch), grid)
    assert "t1" in rep.chart.coords


def _r4():
    W = chart(["z", "t", "x", "y"], [[-2, 2]] * 4, "z", 1)
    return W, E.parse_form("W(B, D(t)) + W(D(x), D(y))", W), V(W, t="t", x="x")


def test_contraction_m2(grid):
    W, omega, X = _r4()
    src = chart(["z", "x", "y"], [[-1, 1]] * 3, "z", 1)
    emb = E.ChartMap.parse(src, W, {"z": "z", "t": "-1", "x": "x", "y": "y"})
    res = J.liouville_contract(omega, X, emb, grid)
    assert (res.alpha - E.parse_form("B + x*D(y)", src)).is_zero()
    assert res.report.contact
    assert J.reeb_orthogonality_check(omega, X, emb, grid).holds


def test_contraction_requires_transversality(grid):
    W, omega, X = _r4()
    src = chart(["z", "t", "y"], [[-1, 1]] * 3, "z", 1)
    emb = E.ChartMap.parse(src, W, {"z": "z", "t": "t", "x": "0", "y": "y"})
    with pytest.raises(J.NotTransverseError):
        J.liouville_contract(omega, X, emb, grid)


def test_contraction_rejects_non_liouville(grid):
    W, omega, _ = _r4()
    src = chart(["z", "x", "y"], [[-1, 1]] * 3, "z", 1)
    emb = E.ChartMap.parse(src, W, {"z": "z", "t": "-1", "x": "x", "y": "y"})
    with pytest.raises(J.NotLiouvilleError):
        J.liouville_contract(omega, V(W, t="1"), emb, grid)
    with pytest.raises(DimensionError):
        J.liouville_contract(E.parse_form("D(x)", W), V(W, t="t"), emb, grid)

import numpy as np
import pytest

from bmcontact import chart
from bmcontact import exterior as E
from bmcontact import singular as G
from bmcontact.chart import ChartError
from bmcontact.contact import DimensionError
from bmcontact.profiles import build_profile


def test_desing_even_is_contact_and_agrees(torus_b2, grid):
    res = G.desingularize(torus_b2, build_profile("desing-even", 1, 0.1), grid)
    assert res.contact.contact
    assert res.agreement < 1e-10
    assert res.identity_residual < 1e-8
    assert res.ok
    assert not res.alpha_eps.chart.singular


def test_desing_odd_folds_at_zero(torus_b1, grid):
    res = G.desingularize(torus_b1, build_profile("desing-odd", 0, 0.1), grid)
    fold = res.fold
    assert fold.folded and fold.n_components == 1
    assert fold.max_distance_to([0.0]) <= fold.cell
    # c(α_ε) = f'(z)·z·c(α) = ±(z·f'(z)) and its z-slope at 0 is 2/ε
    assert fold.min_grad == pytest.approx(200.0, rel=1e-6)


def test_parity_and_convexity_guards(torus_b1, torus_b2, grid):
    with pytest.raises(G.ParityError):
        G.desingularize(torus_b1, build_profile("desing-even", 1, 0.1), grid)
    with pytest.raises(G.ParityError):
        G.desingularize(torus_b2, build_profile("desing-odd", 0, 0.1), grid)
    bad = E.parse_form("sin(phi)*B + (1 + z)*cos(phi)*D(y)", torus_b1.chart)
    with pytest.raises(G.NotAlmostConvexError):
        G.desingularize(bad, build_profile("desing-odd", 0, 0.1), grid)


def test_folded_check_verdicts(grid):
    ch = chart(["z", "x", "y"], [[-1, 1]] * 3)
    # c(dx + z^2 dy) = −2z: transverse zero
    rep = G.folded_check(E.parse_form("D(x) + z^2*D(y)", ch), grid, axis="z")
    assert rep.verdict == "folded" and rep.min_grad == pytest.approx(2.0)
    assert G.folded_check(E.parse_form("z*D(x) + D(y)", ch), grid, axis="z").verdict \
        == "no fold, contact everywhere"
    # c ∝ z^3 changes sign with vanishing gradient
    assert G.folded_check(E.parse_form("D(x) + z^4*D(y)", ch), grid, axis="z").verdict == "degenerate fold"
    with pytest.raises(ChartError):
        G.folded_check(E.parse_form("B + x*D(y)", chart(["z", "x", "y"], [[-1, 1]] * 3, "z", 1)), grid)
    with pytest.raises(DimensionError):
        G.folded_check(E.parse_form("D(z)", chart(["z"], [[-1, 1]])), grid)


def test_sing_even(vertical, grid):
    res = G.singularize(vertical, build_profile("sing-even", 1, 0.1), "t", grid)
    assert res.ok
    assert res.forms[0].chart.m == 2
    assert all(c.contact for c in res.contact)
    assert res.convexity == ["convex"]
    assert res.components == pytest.approx([0.0])
    assert res.agreement < 1e-10


def test_sing_odd_two_components(vertical, grid):
    eps = 0.1
    res = G.singularize(vertical, build_profile("sing-odd", 0, eps), "t", grid)
    assert res.ok
    assert len(res.forms) == 2
    assert res.components == pytest.approx([-3 * eps / 8, 3 * eps / 8], abs=1e-3)


def test_sing_onesided(vertical, grid):
    res = G.singularize(vertical, build_profile("sing-onesided", 0, 0.1), "t", grid)
    assert res.ok
    assert res.components == pytest.approx([0.0])
    # the other side is not the input form
    assert res.disagreement_other_side > 1.0


def test_sing_rejects_bad_input(vertical, torus_b1, grid):
    with pytest.raises(ChartError):
        G.singularize(torus_b1, build_profile("sing-even", 1, 0.1), grid=grid)
    with pytest.raises(G.ParityError):
        G.singularize(vertical, build_profile("desing-even", 1, 0.1), "t", grid)
    tilted = E.parse_form("cos(phi)*D(t) + (1 + t)*sin(phi)*D(theta)", vertical.chart)
    with pytest.raises(G.NotVerticallyInvariantError):
        G.singularize(tilted, build_profile("sing-even", 1, 0.1), "t", grid)


@pytest.mark.parametrize("m, comps, verdict", [(1, 1, "obstructed"), (3, 1, "obstructed"),
                                               (1, 2, "admissible"), (2, 1, "admissible")])
def test_orientation_obstruction(m, comps, verdict):
    out = G.orientation_obstruction_check(m, comps)
    assert out["verdict"] == verdict
    assert out["sign_flip"] == (m % 2 == 1)


def test_convergence_support_region(torus_b2, grid):
    rep = G.convergence_report(torus_b2, [0.2, 0.1, 0.05], grid=grid)
    for j in (0, 1):
        assert rep.strictly_decreasing(j, "support")
        assert max(rep.series(j, "fixed")) < 1e-12
    assert rep.slope(0, "support") == pytest.approx(2.0, abs=0.15)
    assert rep.slope(1, "support") == pytest.approx(1.0, abs=0.15)
    assert max(rep.reeb_residual.values()) < 1e-10
    csv = rep.to_csv("support").splitlines()
    assert csv[0] == "eps,j,sup_diff" and len(csv) == 7


def test_convergence_needs_even_order(torus_b1, grid):
    with pytest.raises(G.ParityError):
        G.convergence_report(torus_b1, [0.1], grid=grid)


def test_corollary_pipeline(vertical, grid):
    out = G.folded_from_vertical(vertical, 0.1, "t", grid)
    assert out.ok
    assert out.fold.n_components == 2
    assert np.allclose(sorted(c["center"] for c in out.fold.components), [-0.0375, 0.0375], atol=2e-3)

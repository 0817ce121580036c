import math

import pytest

from bmcontact import chart
from bmcontact import contact as C
from bmcontact import exterior as E
from bmcontact import scalar as S
from bmcontact.chart import ChartError

B1 = chart(["z", "x", "y"], [[-1, 1]] * 3, "z", 1)
SM = chart(["x", "y", "w"], [[-1, 1]] * 3)


def V(ch, **spec):
    return E.vector_field(ch, {k: S.parse_scalar(v, ch) for k, v in spec.items()})


def test_contact_coefficient_oracle(s2xs1):
    # α∧dα = −σ∧dθ∧dφ
    assert C.contact_coeff(s2xs1) == -1


@pytest.mark.parametrize("text, verdict", [
    ("B + x*D(y)", "contact"),
    ("D(x) + y*B", "contact"),
    ("z*B + x*D(y)", "contact away from a vanishing locus"),
    ("B + D(x)", "not contact"),
])
def test_contact_verdicts(text, verdict, grid):
    rep = C.is_contact(E.parse_form(text, B1), grid)
    assert rep.verdict == verdict
    assert rep.witnesses


def test_not_a_one_form():
    with pytest.raises(C.DimensionError):
        C.is_contact(E.parse_form("W(D(x), D(y))", B1))


def test_reeb_closed_forms(s2xs1, grid):
    R = C.reeb(s2xs1, grid)
    assert (R - V(s2xs1.chart, theta="sin(phi)", zeta="cos(phi)")).is_zero()
    assert (C.reeb(E.parse_form("B + x*D(y)", B1), grid) - V(B1, zeta="1")).is_zero()
    assert (C.reeb(E.parse_form("D(w) - y*D(x)", SM), grid) - V(SM, w="1")).is_zero()


def test_reeb_residual_small(s2xs1, grid):
    assert C.reeb_with_residual(s2xs1, grid).residual < 1e-12


def test_reeb_fails_on_degenerate_form(grid):
    with pytest.raises(C.SingularSystemError):
        C.reeb(E.parse_form("B + D(x)", B1), grid)


def test_hamiltonian_field(grid):
    alpha = E.parse_form("D(w) - y*D(x)", SM)
    # H = 1 gives the Reeb field
    assert (C.hamiltonian_field(alpha, S.ONE, grid) - V(SM, w="1")).is_zero()
    H = S.parse_scalar("x*y + w", SM)
    X = C.hamiltonian_field(alpha, H, grid)
    assert S.is_zero(E.interior(X, alpha)[()] - H)
    assert C.hamiltonian_residual(alpha, H, X, grid) < 1e-12


@pytest.mark.parametrize("phi, cls", [(0.0, "2"), (math.pi / 2, "1a"), (math.pi / 4, "1b")])
def test_point_classes(s2xs1, phi, cls):
    pc = C.classify_point(s2xs1, {"h": 0.0, "theta": 1.0, "phi": phi})
    assert pc.cls.value == cls


def test_point_class_needs_critical_point(s2xs1):
    with pytest.raises(ValueError):
        C.classify_point(s2xs1, {"h": 0.3, "theta": 1.0, "phi": 0.0})
    with pytest.raises(ChartError):
        C.classify_point(E.parse_form("D(w) - y*D(x)", SM), {"x": 0, "y": 0, "w": 0})


def test_theta_on_s2xs1(s2xs1, grid):
    rep = C.theta_form(s2xs1, grid)
    want = E.parse_form("W(D(phi), D(theta))", C.critical_chart(s2xs1.chart))
    assert (rep.theta - want).is_zero()
    assert rep.ok and rep.sign in (-1, 1)
    assert rep.residual < 1e-8


def test_zero_clusters_s2xs1(s2xs1):
    n, pts = C.reeb_zero_clusters(s2xs1, {"theta": 48, "phi": 48}, ("theta", "phi"))
    assert n == 2


@pytest.mark.parametrize("text, kind", [
    ("B + x*D(y)", "convex"),
    ("(1 + z)*B + x*D(y)", "almost convex"),
    ("B + (x + z)*D(y)", "not almost convex"),
])
def test_convexity(text, kind, grid):
    assert C.convexity_classify(E.parse_form(text, B1), grid).kind.value == kind


def test_split_and_verticalize(vertical, grid):
    u, beta = C.split_vertical(vertical, "t")
    assert u == S.simplify(S.parse_scalar("cos(phi)", vertical.chart))
    assert (beta - E.parse_form("sin(phi)*D(theta)", vertical.chart)).is_zero()
    scaled = vertical * S.parse_scalar("exp(t)", vertical.chart)
    out = C.verticalize(scaled, "t", grid)
    assert (out - vertical).is_zero()


def test_verticalize_rejects_non_symmetry(grid):
    ch = chart(["t", "x", "y"], [[-1, 1]] * 3)
    with pytest.raises(C.NotContactVectorFieldError):
        C.verticalize(E.parse_form("D(t) + (x + t)*D(y)", ch), "t", grid)

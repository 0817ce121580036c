import json

import numpy as np
import pytest

from bmcontact import chart
from bmcontact import exterior as E
from bmcontact import scalar as S
from bmcontact.chart import Chart, ChartError
from bmcontact.parsing import ParseError
from bmcontact.testing import random_form

B1 = chart(["z", "x", "y"], [[-1, 1]] * 3, "z", 1)
B2 = chart(["z", "x", "y"], [[-1, 1]] * 3, "z", 2)
SM = chart(["x", "y", "w"], [[-1, 1]] * 3)


def F(text, ch=B1):
    return E.parse_form(text, ch)


def V(ch, **spec):
    return E.vector_field(ch, {k: S.parse_scalar(v, ch) for k, v in spec.items()})


@pytest.mark.parametrize("ch", [B1, B2, SM], ids=["b1", "b2", "smooth"])
@pytest.mark.parametrize("degree", [0, 1, 2])
def test_dd_zero_random(ch, degree):
    rng = np.random.default_rng(7 + degree)
    for _ in range(4):
        w = random_form(ch, degree, rng)
        assert E.ext_d(E.ext_d(w)).is_zero()


def test_sigma_closed_and_frame_derivative():
    for ch in (B1, B2):
        assert E.ext_d(E.sigma(ch)).is_zero()
    # ζ(z) = z^m
    assert E.frame_derivative(B2, 0, S.coord("z")) == S.coord("z") ** 2
    # d(z) = z^m σ
    assert (E.ext_d(E.function(B2, S.coord("z"))) - F("z^2*B", B2)).is_zero()


def test_d_of_b_form_in_frame():
    # d(x σ) = dx∧σ = −σ∧dx
    assert (E.ext_d(F("x*B")) + F("W(B, D(x))")).is_zero()
    # d(z x dy) in b^1: z σ∧dy·z... ζ(zx) = z·x, so d = z x σ∧dy + z dx∧dy
    assert (E.ext_d(F("z*x*D(y)")) - F("z*x*W(B, D(y)) + z*W(D(x), D(y))")).is_zero()


def test_graded_leibniz():
    rng = np.random.default_rng(3)
    a = random_form(B1, 1, rng)
    b = random_form(B1, 1, rng)
    lhs = E.ext_d(E.wedge(a, b))
    rhs = E.wedge(E.ext_d(a), b) - E.wedge(a, E.ext_d(b))
    assert (lhs - rhs).is_zero()


def test_wedge_antisymmetry_and_caret():
    assert (F("D(x)^D(y)") + F("D(y)^D(x)")).is_zero()
    assert F("D(x)^D(x)").is_zero()
    assert (F("W(B, D(x), D(y))") - F("B^D(x)^D(y)")).is_zero()


def test_decompose_round_trip():
    rng = np.random.default_rng(11)
    for deg in (1, 2):
        w = random_form(B2, deg, rng, terms=3)
        a, b = E.decompose(w)
        assert (E.reassemble(a, b) - w).is_zero()
        assert E.sigma_coefficient(b) == 0 if deg == 1 else True


def test_interior_and_pairing():
    X = V(B1, zeta="2", x="y")
    w = F("B + x*D(x)")
    assert E.interior(X, w)[()] == S.simplify(S.parse_scalar("2 + x*y", B1))
    assert (E.interior(X, F("W(B, D(x))")) - F("2*D(x) - y*B")).is_zero()


def test_lie_bracket_oracle():
    ch = SM
    X, Y = V(ch, y="x"), V(ch, x="y")
    assert (E.lie_bracket(X, Y) - V(ch, x="x", y="-y")).is_zero()
    # [ζ, x ∂x] = 0 and [ζ, z ∂x] = z^m ∂x in b^2 (ζ = z^2 ∂z)
    assert (E.lie_bracket(V(B2, zeta="1"), V(B2, x="z")) - V(B2, x="z^2")).is_zero()


def test_schouten_of_vector_fields_is_lie_bracket():
    X, Y = V(SM, x="y*w"), V(SM, y="x^2")
    assert (E.schouten(X, Y) - E.lie_bracket(X, Y)).is_zero()


def test_schouten_poisson_bivector_vanishes():
    # ∂x∧∂y with a Casimir-weighted coefficient is Poisson in dimension 3
    P = E.wedge(V(SM, x="1"), V(SM, y="w^2 + 1"))
    assert E.schouten(P, P).is_zero()


def test_schouten_contact_jacobi_identity():
    # standard contact form dw − y dx: Λ = (∂x + y∂w)∧∂y, R = ∂w
    Lam = E.wedge(V(SM, x="1", w="y"), V(SM, y="1"))
    R = V(SM, w="1")
    assert (E.schouten(Lam, Lam) - 2 * E.wedge(R, Lam)).is_zero()
    assert E.schouten(Lam, R).is_zero()


def test_lie_derivative_cartan():
    rng = np.random.default_rng(5)
    w = random_form(B1, 1, rng)
    X = V(B1, zeta="x", y="z")
    cartan = E.interior(X, E.ext_d(w)) + E.ext_d(E.interior(X, w))
    assert (E.lie_derivative(X, w) - cartan).is_zero()


def test_smooth_frame_conversion():
    w = F("x*B + D(y)", B2)
    sm = E.to_smooth_frame(w)
    assert not sm.chart.singular
    assert (E.from_smooth_form(sm, 2) - w).is_zero()


def test_parse_form_errors():
    with pytest.raises(ParseError):
        E.parse_form("B", SM)
    with pytest.raises(ParseError):
        F("D(x)*D(y)")
    with pytest.raises(ParseError):
        F("x/D(y)")


def test_text_round_trip():
    for text in ("sin(x)*B + (z + y)*D(x)", "x*W(B, D(y)) - exp(y)*W(D(x), D(y))"):
        w = F(text)
        assert (F(w.to_text()) - w).is_zero()


def test_chart_json_round_trip_and_errors():
    doc = B2.to_json()
    assert Chart.from_json(doc) == B2
    assert json.loads(doc)["m"] == 2
    with pytest.raises(ChartError):
        chart(["x", "x"], [[0, 1]] * 2)
    with pytest.raises(ChartError):
        chart(["z", "x"], [[0.1, 1], [0, 1]], "z", 1)
    with pytest.raises(ChartError):
        Chart.from_json("{not json")


def test_pullback_of_sigma_under_scaling():
    # z = 2s: dz/z = ds/s
    src = chart(["s", "x", "y"], [[-0.5, 0.5], [-1, 1], [-1, 1]], "s", 1)
    phi = E.ChartMap.parse(src, B1, {"z": "2*s", "x": "x", "y": "y"})
    assert (E.pullback(phi, F("B + x*D(y)")) - E.parse_form("B + x*D(y)", src)).is_zero()

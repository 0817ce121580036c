import math

import numpy as np
import pytest
import sympy as sp

from bmcontact import chart
from bmcontact import scalar as S
from bmcontact.parsing import ParseError, UnknownIdentifierError


CH = chart(["z", "x", "y"], [[-1, 1]] * 3, "z", 1)


def P(text):
    return S.parse_scalar(text, CH)


def test_pythagorean_rule():
    assert S.is_zero(P("sin(x)^2 + cos(x)^2 - 1"))
    assert S.simplify(P("sin(x)^4 + sin(x)^2*cos(x)^2")) == S.simplify(P("1 - cos(x)^2"))


def test_simplify_idempotent():
    e = P("(x + y)^2/(x + y) + sin(z)^3")
    once = S.simplify(e)
    assert S.simplify(once) == once


def test_derivatives():
    assert S.diff(P("x^3*y"), "x") == S.simplify(P("3*x^2*y"))
    assert S.is_zero(S.diff(P("exp(x)*sin(y)"), "y") - P("exp(x)*cos(y)"))
    assert S.diff(P("log(x)"), "x") == S.simplify(P("x^-1"))


def test_evaluate_values():
    assert S.evaluate(P("x^2 + 2*y"), {"x": 3.0, "y": 0.5}) == pytest.approx(10.0)
    assert S.evaluate(P("sin(x)"), {"x": math.pi / 2}) == pytest.approx(1.0)


def test_domain_errors():
    with pytest.raises(S.DomainError):
        S.evaluate(P("1/z"), {"z": 0.0})
    with pytest.raises(S.DomainError):
        S.evaluate(P("log(x)"), {"x": -1.0})
    assert S.evaluate(P("z^-2"), {"z": 0.0}, extended=True) == math.inf


def test_unknown_coordinate():
    with pytest.raises(S.UnknownCoordinateError):
        S.evaluate(sp.Symbol("w"), {"w": 1.0}, chart=CH)


def test_grid_evaluation_matches_pointwise():
    e = P("x*exp(y) - cos(z)")
    pts = np.array([[0.1, 0.2, 0.3], [-0.5, 0.4, 0.0]])
    vals = S.evaluate_grid(e, CH, pts)
    for row, v in zip(pts, vals):
        assert v == pytest.approx(S.evaluate(e, dict(zip(CH.coords, row))))


def test_equal_on_grid():
    assert S.equal_on_grid(P("sin(2*x)"), P("2*sin(x)*cos(x)"), CH).equal
    assert not S.equal_on_grid(P("sin(2*x)"), P("sin(x)"), CH).equal


def test_parse_errors_have_columns():
    with pytest.raises(UnknownIdentifierError) as info:
        P("x + foo")
    assert info.value.column == 5
    with pytest.raises(ParseError):
        P("x^2^3")
    with pytest.raises(ParseError):
        P("x^y")
    with pytest.raises(ParseError):
        P("(x + 1")


def test_precedence():
    assert S.simplify(P("-x^2")) == -S.coord("x") ** 2
    assert S.simplify(P("2*x/4")) == S.coord("x") / 2
    assert S.simplify(P("x^-1")) == 1 / S.coord("x")


def test_text_round_trip():
    e = S.simplify(P("sin(x)*exp(y)/(1 + z^2) - 3"))
    assert S.simplify(P(S.to_text(e)) - e) == 0


def test_pi_constant():
    e = P("cos(x)/(2*pi)")
    assert S.evaluate(e, {"x": 0.0}) == pytest.approx(1 / (2 * math.pi))
    assert S.simplify(P(S.to_text(e)) - e) == 0
    named = chart(["pi", "x"], [[-1, 1]] * 2)
    assert S.parse_scalar("pi", named) == S.coord("pi")

"""Recursive-descent parser for scalar and form literals.

Scalar grammar::

    expr   := term (("+"|"-") term)*
    term   := factor (("*"|"/") factor)*
    factor := "-" factor | base ("^" ["-"] integer)?
    base   := number | ident | "pi" | "(" expr ")" | fname "(" expr ")"

``pi`` is the constant unless the chart has a coordinate of that name.

Form literals add three atoms: ``D(coord)`` (a coordinate differential),
``B`` (the singular covector) and ``W(a, b, ...)`` (wedge of the arguments).
When the left operand of ``^`` is a form, ``^`` means wedge.
Columns in error messages are 1-based.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Sequence

import sympy as sp

from .scalar import coord

FUNCTIONS = {"sin": sp.sin, "cos": sp.cos, "exp": sp.exp, "log": sp.log}
FORM_ATOMS = {"D", "B", "W"}

_TOKEN = re.compile(r"\s*(?:(\d+\.\d*|\.\d+|\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


class ParseError(ValueError):
    def __init__(self, message: str, column: int):
        super().__init__(f"{message} at column {column}")
        self.column = column
        self.reason = message


class UnknownIdentifierError(ParseError):
    def __init__(self, name: str, column: int):
        super().__init__(f"unknown identifier '{name}'", column)
        self.name = name


@dataclass
class _Tok:
    kind: str  # num, id, op, end
    text: str
    col: int


def tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        if m.group(1):
            toks.append(_Tok("num", m.group(1), m.start(1) + 1))
        elif m.group(2):
            toks.append(_Tok("id", m.group(2), m.start(2) + 1))
        elif m.group(3):
            ch = m.group(3)
            if ch not in "+-*/^(),":
                raise ParseError(f"unexpected character '{ch}'", m.start(3) + 1)
            toks.append(_Tok("op", ch, m.start(3) + 1))
        pos = m.end()
    toks.append(_Tok("end", "", len(text) + 1))
    return toks


@dataclass
class FormOps:
    """Hooks supplied by the exterior module when form literals are allowed."""

    dcoord: Callable[[str], object]
    sigma: Callable[[], object]
    wedge: Callable[[object, object], object]
    is_form: Callable[[object], bool]
    has_sigma: bool = True


class _Parser:
    def __init__(self, text: str, names: Sequence[str], forms: FormOps | None):
        self.toks = tokenize(text)
        self.i = 0
        self.names = set(names)
        self.forms = forms

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def advance(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> _Tok:
        t = self.tok
        if t.kind != "op" or t.text != text:
            found = "end of input" if t.kind == "end" else f"'{t.text}'"
            raise ParseError(f"expected '{text}' but found {found}", t.col)
        return self.advance()

    def is_form(self, v) -> bool:
        return self.forms is not None and self.forms.is_form(v)

    def parse(self):
        v = self.expr()
        if self.tok.kind != "end":
            raise ParseError(f"unexpected '{self.tok.text}'", self.tok.col)
        return v

    def expr(self):
        v = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance()
            rhs = self.term()
            if self.is_form(v) != self.is_form(rhs):
                zero_l = not self.is_form(v) and v == 0
                zero_r = not self.is_form(rhs) and rhs == 0
                if not (zero_l or zero_r):
                    raise ParseError("cannot add a scalar and a form", op.col)
                if zero_l:
                    v = rhs if op.text == "+" else -rhs
                continue
            v = v + rhs if op.text == "+" else v - rhs
        return v

    def term(self):
        v = self.factor()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.advance()
            rhs = self.factor()
            if op.text == "*":
                if self.is_form(v) and self.is_form(rhs):
                    raise ParseError("use W(...) or '^' to multiply forms", op.col)
                v = rhs * v if self.is_form(rhs) else v * rhs
            else:
                if self.is_form(rhs):
                    raise ParseError("cannot divide by a form", op.col)
                v = v * sp.Pow(rhs, -1)
        return v

    def factor(self):
        if self.tok.kind == "op" and self.tok.text == "-":
            # unary minus binds looser than '^': -x^2 = -(x^2)
            self.advance()
            return -self.factor()
        v = self.base()
        while self.tok.kind == "op" and self.tok.text == "^":
            op = self.advance()
            if self.is_form(v):
                v = self.forms.wedge(v, self.base())
                continue
            sign = 1
            if self.tok.kind == "op" and self.tok.text == "-":
                self.advance()
                sign = -1
            t = self.tok
            if t.kind != "num" or not t.text.isdigit():
                raise ParseError("expected an integer exponent", t.col)
            self.advance()
            v = sp.Pow(v, sign * int(t.text))
            break
        if self.tok.kind == "op" and self.tok.text == "^":
            raise ParseError("chained exponents are not allowed", self.tok.col)
        return v

    def base(self):
        t = self.tok
        if t.kind == "num":
            self.advance()
            return sp.Rational(t.text)
        if t.kind == "op" and t.text == "(":
            self.advance()
            v = self.expr()
            self.expect(")")
            return v
        if t.kind == "op" and t.text == "-":
            self.advance()
            return -self.base()
        if t.kind == "id":
            self.advance()
            if t.text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                if self.is_form(arg):
                    raise ParseError(f"{t.text} of a form", t.col)
                self.expect(")")
                return FUNCTIONS[t.text](arg)
            if self.forms is not None and t.text in FORM_ATOMS and t.text not in self.names:
                return self.form_atom(t)
            if t.text == "pi" and t.text not in self.names:
                return sp.pi
            if t.text not in self.names:
                raise UnknownIdentifierError(t.text, t.col)
            return coord(t.text)
        if t.kind == "end":
            raise ParseError("unexpected end of input", t.col)
        raise ParseError(f"unexpected '{t.text}'", t.col)

    def form_atom(self, t: _Tok):
        if t.text == "B":
            if not self.forms.has_sigma:
                raise ParseError("B used on a chart without a singular coordinate", t.col)
            return self.forms.sigma()
        self.expect("(")
        if t.text == "D":
            n = self.tok
            if n.kind != "id" or n.text not in self.names:
                raise UnknownIdentifierError(n.text or "<end>", n.col)
            self.advance()
            self.expect(")")
            return self.forms.dcoord(n.text)
        # W(...)
        v = self.expr()
        while self.tok.kind == "op" and self.tok.text == ",":
            self.advance()
            v = self.forms.wedge(v, self.expr())
        self.expect(")")
        return v


def parse_expression(text: str, names: Sequence[str], allow_forms: bool = False,
                     forms: FormOps | None = None):
    if not isinstance(text, str):
        raise TypeError("expression text must be a string")
    return _Parser(text, names, forms if allow_forms else None).parse()

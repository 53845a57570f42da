"""Text notation for trees and tree polynomials.

Grammar (whitespace is ignored)::

    tree   := factor ('*' factor)*
    factor := atom ('{beta=' degree '}')? ('^' int)?
    atom   := '1' | 'Xi' ('(' int ')')? | 'X^(' ints ')'
            | 'I' ('[' ints ']')? '(' tree ')' | '(' tree ')'

``I[k](t)`` is an integration edge carrying the derivative multi-index ``k``.
A ``{beta=r}`` suffix adds ``r`` to the extended label of that factor's root.
The printer emits the root's extended label as a leading ``1{beta=r}``
factor and groups repeated planted factors with ``^``.

Tree polynomials print as ``<tree> - 3*c1 <tree>``: every tree is wrapped in
angle brackets and preceded by its coefficient.
"""

from __future__ import annotations

import re

from .polys import Poly, parse_poly
from .symbols import (
    ONE,
    DecoratedTree,
    NodeLabel,
    TreePolynomial,
    format_degree,
    parse_degree,
    plant,
    tree_power,
    tree_product,
    xi,
)


def _fmt_mi(k: tuple) -> str:
    return "(" + ",".join(str(x) for x in k) + ")"


def format_tree(t: DecoratedTree) -> str:
    lab = t.label
    factors = []
    if not lab.ext.is_zero():
        factors.append("1{beta=" + format_degree(lab.ext) + "}")
    if lab.noise:
        factors.append("Xi" if lab.noise == 1 else f"Xi({lab.noise})")
    if lab.poly:
        factors.append("X^" + _fmt_mi(lab.poly))
    i = 0
    kids = t.children
    while i < len(kids):
        j = i
        while j + 1 < len(kids) and kids[j + 1] == kids[i]:
            j += 1
        e, c = kids[i]
        s = ("I" + ("[" + ",".join(map(str, e)) + "]" if e else "")) + "(" + format_tree(c) + ")"
        n = j - i + 1
        factors.append(s if n == 1 else f"{s}^{n}")
        i = j + 1
    return "*".join(factors) if factors else "1"


_TOK = re.compile(r"\s*(Xi|X\^|I|\d+|\{beta=[^}]*\}|[()\[\],*^])")


class TreeSyntaxError(ValueError):
    pass


def _tokenize(text: str) -> list:
    toks = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOK.match(text, pos)
        if m is None:
            raise TreeSyntaxError(f"unexpected character {text[pos]!r} at offset {pos} in {text!r}")
        toks.append((m.group(1), m.start(1)))
        pos = m.end()
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def expect(self, tok):
        got = self.peek()
        if got != tok:
            where = self.toks[self.i][1] if self.i < len(self.toks) else len(self.text)
            raise TreeSyntaxError(f"expected {tok!r} at offset {where} in {self.text!r}, got {got!r}")
        self.i += 1

    def integer(self) -> int:
        tok = self.peek()
        if tok is None or not tok.isdigit():
            raise TreeSyntaxError(f"expected an integer in {self.text!r}")
        self.i += 1
        return int(tok)

    def ints(self, close: str) -> tuple:
        out = [self.integer()]
        while self.peek() == ",":
            self.i += 1
            out.append(self.integer())
        self.expect(close)
        return tuple(out)

    def tree(self) -> DecoratedTree:
        out = self.factor()
        while self.peek() == "*":
            self.i += 1
            out = tree_product(out, self.factor())
        return out

    def factor(self) -> DecoratedTree:
        t = self.atom()
        tok = self.peek()
        if tok is not None and tok.startswith("{beta="):
            self.i += 1
            beta = parse_degree(tok[len("{beta=") : -1])
            lab = t.label
            t = t.with_label(NodeLabel(lab.poly, lab.noise, lab.ext + beta))
        if self.peek() == "^":
            self.i += 1
            t = tree_power(t, self.integer())
        return t

    def atom(self) -> DecoratedTree:
        tok = self.peek()
        if tok == "1":
            self.i += 1
            return ONE
        if tok == "Xi":
            self.i += 1
            if self.peek() == "(":
                self.i += 1
                j = self.integer()
                self.expect(")")
                return xi(j)
            return xi(1)
        if tok == "X^":
            self.i += 1
            self.expect("(")
            return DecoratedTree(NodeLabel(poly=self.ints(")")))
        if tok == "I":
            self.i += 1
            deriv = ()
            if self.peek() == "[":
                self.i += 1
                deriv = self.ints("]")
            self.expect("(")
            inner = self.tree()
            self.expect(")")
            return plant(inner, deriv)
        if tok == "(":
            self.i += 1
            inner = self.tree()
            self.expect(")")
            return inner
        where = self.toks[self.i][1] if self.i < len(self.toks) else len(self.text)
        raise TreeSyntaxError(f"unexpected token {tok!r} at offset {where} in {self.text!r}")


def parse_tree(text: str) -> DecoratedTree:
    p = _Parser(text)
    t = p.tree()
    if p.i != len(p.toks):
        raise TreeSyntaxError(f"trailing input at offset {p.toks[p.i][1]} in {text!r}")
    return t


# --------------------------------------------------------------------------
# tree polynomials


def format_tree_polynomial(p: TreePolynomial) -> str:
    if p.is_zero():
        return "0"
    parts = []
    for t, c in p:
        if c.is_constant():
            v = c.constant_value()
            sign = "-" if v < 0 else "+"
            coef = "" if abs(v) == 1 else f"{abs(v)} "
        elif len(c.terms) == 1:
            (m, v), = c.terms.items()
            sign = "-" if v < 0 else "+"
            coef = str(-c if v < 0 else c) + " "
        else:
            sign = "+"
            coef = f"({c}) "
        parts.append((sign, f"{coef}<{format_tree(t)}>"))
    s0, b0 = parts[0]
    out = ("-" if s0 == "-" else "") + b0
    for s, b in parts[1:]:
        out += f" {s} {b}"
    return out


def parse_tree_polynomial(text: str) -> TreePolynomial:
    """Inverse of :func:`format_tree_polynomial` (also accepts ``0``)."""
    if text.strip() == "0":
        return TreePolynomial()
    acc = []
    pos = 0
    coef_start = 0
    while True:
        lt = text.find("<", pos)
        if lt < 0:
            if text[pos:].strip():
                raise TreeSyntaxError(f"trailing text {text[pos:]!r} in tree polynomial")
            break
        gt = text.find(">", lt)
        if gt < 0:
            raise TreeSyntaxError("unterminated '<' in tree polynomial")
        coef_txt = text[coef_start:lt].strip()
        sign = 1
        if coef_txt.startswith("+"):
            coef_txt = coef_txt[1:].strip()
        elif coef_txt.startswith("-"):
            sign = -1
            coef_txt = coef_txt[1:].strip()
        coef = parse_poly(coef_txt) if coef_txt else Poly.const(1)
        acc.append((parse_tree(text[lt + 1 : gt]), coef * sign))
        pos = coef_start = gt + 1
    return TreePolynomial(acc)


# --------------------------------------------------------------------------
# shorthand for the cubic model's symbols


def bracket(code: str) -> DecoratedTree:
    """Short names for the cubic model's trees.

    ``"n"`` is ``I(Xi)^n``; ``"0b"`` is ``I(<b>)``; ``"ab"`` with ``a > 0``
    is ``I(<a>) * <b>`` where ``<0>`` is the unit.
    """
    if not code or not code.isdigit():
        raise ValueError(f"bad bracket code {code!r}")
    if len(code) == 1:
        return tree_power(plant(xi(1)), int(code))
    if len(code) == 2:
        a, b = code
        if a == "0":
            return plant(bracket(b))
        rest = ONE if b == "0" else bracket(b)
        return tree_product(plant(bracket(a)), rest)
    raise ValueError(f"bad bracket code {code!r}")


"""Sparse polynomials with exact rational coefficients in named scalars.

This is the coefficient ring shared by tree polynomials and renormalisation
characters: things like ``3*c1^2`` or ``-6*phi`` must be compared exactly.
"""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational

Monomial = tuple  # tuple of (name, exponent) pairs sorted by name

_ONE: Monomial = ()


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    out = dict(a)
    for name, e in b:
        out[name] = out.get(name, 0) + e
    return tuple(sorted(out.items()))


class Poly:
    """Polynomial in named scalars over the rationals.

    Zero coefficients are never stored. Instances are treated as immutable.
    """

    __slots__ = ("terms", "_hash")

    def __init__(self, terms=None):
        if terms is None:
            terms = {}
        self.terms = {m: Fraction(c) for m, c in terms.items() if c != 0}
        self._hash = None

    @classmethod
    def const(cls, value) -> "Poly":
        return cls({_ONE: Fraction(value)}) if value != 0 else cls()

    @classmethod
    def var(cls, name: str, power: int = 1) -> "Poly":
        if power == 0:
            return cls.const(1)
        return cls({((name, power),): Fraction(1)})

    @staticmethod
    def coerce(x) -> "Poly":
        if isinstance(x, Poly):
            return x
        if isinstance(x, (int, Rational)):
            return Poly.const(Fraction(x))
        if isinstance(x, str):
            return parse_poly(x)
        if isinstance(x, float):
            return Poly.const(Fraction(x))
        raise TypeError(f"cannot use {type(x).__name__} as a polynomial coefficient")

    # -- queries ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(m == _ONE for m in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not a constant")
        return self.terms.get(_ONE, Fraction(0))

    def variables(self) -> set:
        return {name for m in self.terms for name, _ in m}

    def degree_in(self, name: str) -> int:
        return max((dict(m).get(name, 0) for m in self.terms), default=0)

    # -- arithmetic ------------------------------------------------------

    def __add__(self, other):
        other = Poly.coerce(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Poly(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-Poly.coerce(other))

    def __rsub__(self, other):
        return Poly.coerce(other) - self

    def __mul__(self, other):
        other = Poly.coerce(other)
        if not self.terms or not other.terms:
            return Poly()
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return Poly(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = Fraction(other)
        return Poly({m: c / other for m, c in self.terms.items()})

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not polynomials")
        result = Poly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        try:
            other = Poly.coerce(other)
        except TypeError:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    # -- substitution ----------------------------------------------------

    def subs(self, values: dict) -> "Poly":
        """Substitute scalars (numbers or polynomials) for named variables."""
        result = Poly()
        for m, c in self.terms.items():
            term = Poly.const(c)
            for name, e in m:
                if name in values:
                    term = term * Poly.coerce(values[name]) ** e
                else:
                    term = term * Poly.var(name, e)
            result = result + term
        return result

    def evaluate(self, values: dict):
        """Numeric value; every variable must be supplied."""
        total = 0
        for m, c in self.terms.items():
            term = c
            for name, e in m:
                term = term * values[name] ** e
            total = total + term
        return total

    # -- printing --------------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in sorted(self.terms.items(), key=lambda mc: _mono_sort_key(mc[0])):
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            factors = [n if e == 1 else f"{n}^{e}" for n, e in m]
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(mag)] + factors)
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"Poly({str(self)!r})"


def _mono_sort_key(m: Monomial):
    return (-sum(e for _, e in m), m)


_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


def parse_poly(text: str) -> Poly:
    """Parse ``3*c1^2 - 1/2*phi + 4`` style expressions (with parentheses)."""
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        num, name, sym = m.groups()
        if num is not None:
            tokens.append(("num", Fraction(num)))
        elif name is not None:
            tokens.append(("name", name))
        else:
            tokens.append(("sym", sym))
        pos = m.end()
    if text[pos:].strip():
        raise ValueError(f"cannot parse polynomial {text!r}")
    p = _PolyParser(tokens, text)
    out = p.expr()
    if p.i != len(tokens):
        raise ValueError(f"unexpected trailing input in polynomial {text!r}")
    return out


class _PolyParser:
    def __init__(self, tokens, text):
        self.tokens = tokens
        self.text = text
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expr(self) -> Poly:
        sign = 1
        if self.peek() == ("sym", "-"):
            self.take()
            sign = -1
        elif self.peek() == ("sym", "+"):
            self.take()
        out = self.term() * sign
        while self.peek() in (("sym", "+"), ("sym", "-")):
            _, op = self.take()
            t = self.term()
            out = out + t if op == "+" else out - t
        return out

    def term(self) -> Poly:
        out = self.power()
        while self.peek() == ("sym", "*"):
            self.take()
            out = out * self.power()
        return out

    def power(self) -> Poly:
        base = self.atom()
        if self.peek() == ("sym", "^"):
            self.take()
            kind, val = self.take()
            if kind != "num" or val.denominator != 1:
                raise ValueError(f"bad exponent in {self.text!r}")
            base = base ** int(val)
        return base

    def atom(self) -> Poly:
        kind, val = self.take()
        if kind == "num":
            return Poly.const(val)
        if kind == "name":
            return Poly.var(val)
        if (kind, val) == ("sym", "("):
            inner = self.expr()
            if self.take() != ("sym", ")"):
                raise ValueError(f"unbalanced parentheses in {self.text!r}")
            return inner
        if (kind, val) == ("sym", "-"):
            return -self.atom()
        raise ValueError(f"unexpected token {val!r} in {self.text!r}")

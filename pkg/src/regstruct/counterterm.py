"""Renormalised equations for the dynamic cubic model and coupling-constant maps.

The pipeline is: build the local expansion of the solution, expand the cubic
nonlinearity with products truncated at the right regularity, apply the
extended renormalisation map, drop everything that vanishes when evaluated
at the base point, and read off the multiple of the solution that is left.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .notation import bracket
from .polys import Poly
from .renorm import Character, renorm_map
from .symbols import (
    ONE,
    ZERO_DEGREE,
    Degree,
    DecoratedTree,
    Grading,
    TreePolynomial,
    as_degree,
    plant,
    project_extended,
    unit_index,
    x_power,
    xi,
)


class ResidualTerms(Exception):
    """Survivors of the reduction that are not a multiple of the solution head."""

    def __init__(self, terms: TreePolynomial):
        self.terms = terms
        super().__init__(f"terms not proportional to the solution: {terms}")


# --------------------------------------------------------------------------
# truncated jets


@dataclass(frozen=True)
class Jet:
    """A tree polynomial together with the regularity up to which it is exact."""

    terms: TreePolynomial
    gamma: Degree
    grading: Grading

    def lowest(self) -> Degree:
        """Lowest degree present, capped at zero."""
        low = ZERO_DEGREE
        for t in self.terms.terms:
            d = self.grading.degree(t)
            if d < low:
                low = d
        return low

    def truncate(self, gamma=None) -> "Jet":
        g = self.gamma if gamma is None else as_degree(gamma)
        return Jet(self.terms.filter(lambda t: self.grading.degree(t) < g), g, self.grading)

    def times(self, other: "Jet", rule: str = "product") -> "Jet":
        """Product of two jets.

        With ``rule="product"`` the result is exact up to
        ``min(low1 + gamma2, low2 + gamma1)``; with ``rule="fixed"`` every
        product is cut at the common cutoff of the factors.
        """
        if rule == "product":
            g = min(self.lowest() + other.gamma, other.lowest() + self.gamma)
        elif rule == "fixed":
            g = min(self.gamma, other.gamma)
        else:
            raise ValueError(f"unknown truncation rule {rule!r}")
        deg = self.grading.degree
        return Jet(self.terms.product(other.terms, keep=lambda t: deg(t) < g), g, self.grading)


@dataclass(frozen=True)
class Ansatz:
    expansion: TreePolynomial
    gamma: Degree
    grading: Grading

    def __post_init__(self):
        deg = self.grading.degree
        for t in self.expansion.terms:
            if not deg(t) < self.gamma:
                raise ValueError(f"ansatz term {t} has degree {deg(t)} >= {self.gamma}")
        low = self.leading_tree()
        if low is not None and self.expansion.coefficient(low) != 1:
            raise ValueError("the lowest-degree term of an ansatz must have coefficient 1")

    def leading_tree(self):
        deg = self.grading.degree
        ts = sorted(self.expansion.terms, key=lambda t: (deg(t), t.sort_key()))
        return ts[0] if ts else None

    @property
    def jet(self) -> Jet:
        return Jet(self.expansion, self.gamma, self.grading)

    def head(self) -> TreePolynomial:
        """The part of the expansion that survives base-point evaluation."""
        return eval_at_basepoint_reduce(self.expansion, self.grading)


def truncated_power(a: Ansatz, n: int, rule: str = "product") -> TreePolynomial:
    if n < 1:
        raise ValueError("power must be at least 1")
    j = a.jet
    out = j
    for _ in range(n - 1):
        out = out.times(j, rule)
    return out.terms


def truncated_power_jet(a: Ansatz, n: int, rule: str = "product") -> Jet:
    j = a.jet
    out = j
    for _ in range(n - 1):
        out = out.times(j, rule)
    return out


# --------------------------------------------------------------------------
# the cubic model


PHI4_3_NOISE = Degree(Fraction(-5, 2), -1)
PHI4_2_NOISE = Degree(-2, -1)
PHI4_GAMMA = Degree(1, 3)


def gradient_names(dimension: int) -> list:
    return [f"dphi{i}" for i in range(1, dimension + 1)]


def _plant_jet(p: TreePolynomial, grading: Grading, gamma: Degree) -> TreePolynomial:
    """Integrate term by term; polynomials integrate to zero, the rest is cut at ``gamma``."""
    acc = []
    for t, c in p.terms.items():
        if t.is_polynomial():
            continue
        pt = plant(t)
        if grading.degree(pt) < gamma:
            acc.append((pt, c))
    return TreePolynomial(acc)


def phi4_ansatz(dimension: int = 3, noise_degree=None, gamma=None, coupling: str = "c", max_iter: int = 20) -> Ansatz:
    """Local expansion of the solution of ``du = Lu + xi + c u - u^3``.

    Found by iterating ``u = I(xi + c u - u^3) + phi 1 + <grad phi, X>``
    with every product truncated by the product rule.
    """
    noise_degree = as_degree(noise_degree) if noise_degree is not None else (PHI4_3_NOISE if dimension == 3 else PHI4_2_NOISE)
    gamma = as_degree(gamma) if gamma is not None else PHI4_GAMMA
    grading = Grading((noise_degree,), 2)
    poly = TreePolynomial.of(ONE, Poly.var("phi"))
    for i, name in enumerate(gradient_names(dimension), start=1):
        xi_tree = x_power(unit_index(i))
        if grading.degree(xi_tree) < gamma:
            poly = poly + TreePolynomial.of(xi_tree, Poly.var(name))
    u = TreePolynomial.of(plant(xi(1))) + poly
    for _ in range(max_iter):
        cube = truncated_power_jet(Ansatz(u, gamma, grading), 3)
        rhs = TreePolynomial.of(xi(1)) + u.scale(Poly.var(coupling)) - cube.terms
        new = _plant_jet(rhs, grading, gamma) + poly
        if new == u:
            break
        u = new
    else:
        raise RuntimeError("ansatz iteration did not settle")
    return Ansatz(u, gamma, grading)


def phi4_character(grading: Grading, c1="c1", c2="c2") -> Character:
    """``g(<2>) = -c1`` and ``g(<22>) = -c2``, keeping only negative trees."""
    vals = {}
    for code, v in (("2", c1), ("22", c2)):
        t = bracket(code)
        if grading.degree(t) < ZERO_DEGREE:
            vals[t] = -Poly.coerce(v)
    return Character(vals, grading)


# --------------------------------------------------------------------------
# reduction and counterterms


def _drop_at_basepoint(t: DecoratedTree, grading: Grading) -> bool:
    if t.label.poly:
        return True
    for e, c in t.children:
        if grading.degree(DecoratedTree(children=[(e, c)])) > ZERO_DEGREE:
            return True
    return False


def eval_at_basepoint_reduce(p: TreePolynomial, grading: Grading) -> TreePolynomial:
    """Drop trees that vanish at the base point.

    A tree goes if its root carries ``X^k`` with ``k != 0`` or if one of its
    root factors ``I(sigma)`` has strictly positive (extended) degree.
    """
    return p.filter(lambda t: not _drop_at_basepoint(t, grading))


@dataclass
class Counterterm:
    counterterm: TreePolynomial  # multiple of the solution head
    factor: Poly  # the scalar multiple
    dual: dict  # coupling name -> new value
    survivors: TreePolynomial  # reduced extended terms before projection

    def dual_text(self) -> str:
        return ", ".join(f"{k} -> {v}" for k, v in self.dual.items())


def renormalised_rhs(ansatz: Ansatz, rhs: TreePolynomial, g: Character, coupling: str = "c") -> Counterterm:
    """Counterterm produced by ``g`` on the right hand side ``rhs``.

    ``rhs`` is rewritten as ``M_g rhs``; what differs after base-point
    reduction and projection must be ``lambda * head`` and then the coupling
    ``c`` in front of the solution becomes ``c + lambda``.
    """
    gr = ansatz.grading
    renormed = renorm_map(g, rhs, extended=True, grading=gr)
    diff = eval_at_basepoint_reduce(renormed - rhs, gr)
    projected = TreePolynomial([(project_extended(t), c) for t, c in diff.terms.items()])
    head = ansatz.head()
    lead = ansatz.leading_tree()
    lam = projected.coefficient(lead)
    residual = projected - head.scale(lam)
    if not residual.is_zero():
        raise ResidualTerms(residual)
    dual = {coupling: Poly.var(coupling) + lam}
    return Counterterm(head.scale(lam), lam, dual, diff)


def phi4_counterterm(dimension: int = 3, g: Character | None = None) -> Counterterm:
    a = phi4_ansatz(dimension)
    if g is None:
        g = phi4_character(a.grading)
    return renormalised_rhs(a, -truncated_power(a, 3), g)


# --------------------------------------------------------------------------
# the two-level toy model and coupling scalings


def simple_model_action(g, z):
    """Act on the triple ``(X1, X2, X3)`` standing for a field and its powers.

    A scalar ``g`` gives ``(X1, X2 - g, X3 - 3 g X1)``; a pair ``(g1, g2)``
    gives ``(X1, X2 - g1, X3 - 3 g1 X1 - g2)``.
    """
    x1, x2, x3 = (Poly.coerce(v) for v in z)
    if isinstance(g, (tuple, list)):
        g1, g2 = (Poly.coerce(v) for v in g)
    else:
        g1, g2 = Poly.coerce(g), Poly()
    return (x1, x2 - g1, x3 - g1 * x1 * 3 - g2)


def simple_model_dual(g, c):
    """Induced map on couplings: ``c -> c + 3g``, or on ``(c0, c1, c2)`` for a pair."""
    if isinstance(g, (tuple, list)):
        g1, g2 = (Poly.coerce(v) for v in g)
        c0, c1, c2 = (Poly.coerce(v) for v in c)
        return (c0 - c2 * g1 + g2, c1 + g1 * 3, c2)
    return Poly.coerce(c) + Poly.coerce(g) * 3


def _exact_sqrt(x):
    if isinstance(x, (int, Fraction)):
        x = Fraction(x)
        if x < 0:
            raise ValueError("scale must be positive")
        rn, rd = math.isqrt(x.numerator), math.isqrt(x.denominator)
        if rn * rn == x.numerator and rd * rd == x.denominator:
            return Fraction(rn, rd)
    return math.sqrt(x)


def scaling_action(family: str, lam, c, a=0):
    """The coupling-constant maps ``T^lam`` under rescaling.

    ``"kpz"``: ``(c1, c2) -> (lam^(1/2) c1, lam^(3/2) c2)``.
    ``"phi4_3"``: ``(c1, c2) -> (lam^(3/2) (c1 + a c2^3 log lam), lam^(1/2) c2)``.
    Rational input with a perfect-square ``lam`` stays exact for ``kpz``.
    """
    if lam <= 0:
        raise ValueError("scale must be positive")
    c1, c2 = c
    r = _exact_sqrt(lam)
    fam = family.lower().replace("-", "_")
    if fam == "kpz":
        return (r * c1, r * lam * c2)
    if fam in ("phi4_3", "phi4"):
        if lam == 1:
            return (c1, c2)
        return (r * lam * (c1 + a * c2 ** 3 * math.log(lam)), r * c2)
    raise ValueError(f"unknown family {family!r}")

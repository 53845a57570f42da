"""Decorated trees, exact degrees and the tree algebra primitives.

Trees are stored in canonical form: every child multiset is sorted by a
fixed total order on canonical forms, so structural equality of the stored
objects is exactly equality modulo commutativity, associativity and the unit
law of the tree product.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, Iterator, Sequence

from .polys import Poly


# --------------------------------------------------------------------------
# degrees


@total_ordering
@dataclass(frozen=True)
class Degree:
    """Exact affine degree ``const + kappa * k`` for an infinitesimal ``k > 0``.

    The order is the ``k -> 0+`` limit order: compare constants first, then
    the kappa coefficients.
    """

    const: Fraction = Fraction(0)
    kappa: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "const", Fraction(self.const))
        object.__setattr__(self, "kappa", Fraction(self.kappa))

    def __add__(self, other):
        other = as_degree(other)
        return Degree(self.const + other.const, self.kappa + other.kappa)

    __radd__ = __add__

    def __neg__(self):
        return Degree(-self.const, -self.kappa)

    def __sub__(self, other):
        return self + (-as_degree(other))

    def __rsub__(self, other):
        return as_degree(other) - self

    def __mul__(self, scalar):
        s = Fraction(scalar)
        return Degree(self.const * s, self.kappa * s)

    __rmul__ = __mul__

    def __lt__(self, other):
        other = as_degree(other)
        return (self.const, self.kappa) < (other.const, other.kappa)

    def __eq__(self, other):
        try:
            other = as_degree(other)
        except TypeError:
            return NotImplemented
        return self.const == other.const and self.kappa == other.kappa

    def __hash__(self):
        return hash((self.const, self.kappa))

    def is_zero(self) -> bool:
        return self.const == 0 and self.kappa == 0

    def at(self, kappa: float) -> float:
        """Numeric value for a concrete small ``kappa``."""
        return float(self.const) + float(self.kappa) * kappa

    def __str__(self):
        return format_degree(self)

    def __repr__(self):
        return f"Degree({format_degree(self)!r})"


def as_degree(x) -> Degree:
    if isinstance(x, Degree):
        return x
    if isinstance(x, str):
        return parse_degree(x)
    if isinstance(x, (int, Fraction)):
        return Degree(Fraction(x), Fraction(0))
    raise TypeError(f"cannot interpret {x!r} as a degree")


def format_degree(d: Degree) -> str:
    if d.kappa == 0:
        return str(d.const)
    sign = "+" if d.kappa > 0 else "-"
    mag = abs(d.kappa)
    k = "k" if mag == 1 else f"{mag}k"
    return f"{d.const} {sign} {k}"


def parse_degree(text: str) -> Degree:
    """Parse ``-1/2 - k``, ``0 - 4k``, ``-1-2k``, ``3/2`` and similar."""
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty degree")
    const = Fraction(0)
    kappa = Fraction(0)
    i = 0
    while i < len(s):
        sign = 1
        if s[i] in "+-":
            sign = -1 if s[i] == "-" else 1
            i += 1
        j = i
        while j < len(s) and (s[j].isdigit() or s[j] == "/"):
            j += 1
        num = s[i:j]
        if j < len(s) and s[j] == "*":
            j += 1
        if j < len(s) and s[j] in "kκ":
            kappa += sign * (Fraction(num) if num else Fraction(1))
            j += 1
        else:
            if not num:
                raise ValueError(f"cannot parse degree {text!r}")
            const += sign * Fraction(num)
        if j < len(s) and s[j] not in "+-":
            raise ValueError(f"cannot parse degree {text!r}")
        i = j
    return Degree(const, kappa)


ZERO_DEGREE = Degree()


# --------------------------------------------------------------------------
# multi-indices


def _mi(k: Iterable[int] | None) -> tuple:
    """Normalise a multi-index: trailing zeros stripped, so () is zero."""
    if not k:
        return ()
    k = tuple(int(x) for x in k)
    if any(x < 0 for x in k):
        raise ValueError(f"negative multi-index {k}")
    n = len(k)
    while n and k[n - 1] == 0:
        n -= 1
    return k[:n]


def mi_add(a: tuple, b: tuple) -> tuple:
    if not a:
        return b
    if not b:
        return a
    n = max(len(a), len(b))
    return _mi(tuple((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)))


def unit_index(i: int) -> tuple:
    """Multi-index with a single 1 in slot ``i`` (slot 0 is time)."""
    return _mi((0,) * i + (1,))


# --------------------------------------------------------------------------
# labels and trees


@dataclass(frozen=True)
class NodeLabel:
    poly: tuple = ()
    noise: int = 0
    ext: Degree = ZERO_DEGREE

    def __post_init__(self):
        object.__setattr__(self, "poly", _mi(self.poly))
        object.__setattr__(self, "ext", as_degree(self.ext))
        if self.noise < 0:
            raise ValueError("noise index must be non-negative")
        if self.ext > ZERO_DEGREE:
            raise ValueError(f"extended label must be <= 0, got {self.ext}")

    def key(self) -> tuple:
        return (self.noise, self.poly, self.ext.const, self.ext.kappa)

    def is_blank(self) -> bool:
        return not self.poly and self.noise == 0 and self.ext.is_zero()


BLANK = NodeLabel()


class DecoratedTree:
    """Rooted tree with decorated nodes; each child edge is one integration.

    ``children`` is a sorted tuple of ``(edge_derivative, subtree)`` pairs,
    where ``edge_derivative`` is a multi-index (``()`` for a plain
    integration map).
    """

    __slots__ = ("label", "children", "_key", "_hash", "_size")

    def __init__(self, label: NodeLabel = BLANK, children: Iterable = ()):
        kids = []
        for c in children:
            if isinstance(c, DecoratedTree):
                kids.append(((), c))
            else:
                e, t = c
                kids.append((_mi(e), t))
        kids.sort(key=lambda et: (et[1]._key, et[0]))
        self.label = label
        self.children = tuple(kids)
        self._size = 1 + sum(t._size for _, t in kids)
        self._key = (self._size, label.key(), tuple((t._key, e) for e, t in self.children))
        self._hash = hash(self._key)

    # structural identity
    def __eq__(self, other):
        return isinstance(other, DecoratedTree) and self._hash == other._hash and self._key == other._key

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self._key < other._key

    def sort_key(self):
        return self._key

    @property
    def n_nodes(self) -> int:
        return self._size

    @property
    def n_edges(self) -> int:
        return self._size - 1

    def nodes(self) -> Iterator["DecoratedTree"]:
        yield self
        for _, c in self.children:
            yield from c.nodes()

    def has_poly(self) -> bool:
        return any(n.label.poly for n in self.nodes())

    def has_noise(self) -> bool:
        return any(n.label.noise for n in self.nodes())

    def has_ext(self) -> bool:
        return any(not n.label.ext.is_zero() for n in self.nodes())

    def is_polynomial(self) -> bool:
        """True for ``X^k`` symbols (a single node carrying only a poly label)."""
        return not self.children and self.label.noise == 0 and self.label.ext.is_zero()

    def with_label(self, label: NodeLabel) -> "DecoratedTree":
        return DecoratedTree(label, self.children)

    def __str__(self):
        from .notation import format_tree

        return format_tree(self)

    def __repr__(self):
        return f"tree({str(self)!r})"


def canonicalize(t: DecoratedTree) -> DecoratedTree:
    """Rebuild ``t`` bottom-up; trees are canonical on construction, so this is idempotent."""
    return DecoratedTree(t.label, [(e, canonicalize(c)) for e, c in t.children])


ONE = DecoratedTree()


def xi(j: int = 1) -> DecoratedTree:
    return DecoratedTree(NodeLabel(noise=j))


def x_power(k) -> DecoratedTree:
    return DecoratedTree(NodeLabel(poly=k))


def plant(t: DecoratedTree, derivative=()) -> DecoratedTree:
    """The abstract integration map: new blank root with ``t`` as only child."""
    return DecoratedTree(BLANK, [(derivative, t)])


class NoiseCollision(ValueError):
    """Product of two noises at the same node, which has no meaning here."""


def tree_product(t1: DecoratedTree, t2: DecoratedTree) -> DecoratedTree:
    a, b = t1.label, t2.label
    if a.noise and b.noise:
        raise NoiseCollision(f"cannot multiply noises at one point: {t1} * {t2}")
    label = NodeLabel(mi_add(a.poly, b.poly), a.noise or b.noise, a.ext + b.ext)
    return DecoratedTree(label, t1.children + t2.children)


def product(trees: Iterable[DecoratedTree]) -> DecoratedTree:
    out = ONE
    for t in trees:
        out = tree_product(out, t)
    return out


def tree_power(t: DecoratedTree, n: int) -> DecoratedTree:
    return product([t] * n)


def project_extended(t: DecoratedTree) -> DecoratedTree:
    """Forget every extended label."""
    lab = t.label
    if not lab.ext.is_zero():
        lab = NodeLabel(lab.poly, lab.noise)
    return DecoratedTree(lab, [(e, project_extended(c)) for e, c in t.children])


def strip_poly(t: DecoratedTree) -> DecoratedTree:
    """Zero the polynomial decoration of every node."""
    lab = t.label
    if lab.poly:
        lab = NodeLabel((), lab.noise, lab.ext)
    return DecoratedTree(lab, [(e, strip_poly(c)) for e, c in t.children])


def root_factors(t: DecoratedTree) -> list:
    """Split ``t`` at its root into its planted factors ``[(edge, subtree)]``."""
    return list(t.children)


# --------------------------------------------------------------------------
# grading


@dataclass(frozen=True)
class Grading:
    """Everything needed to assign a degree to a tree.

    Multi-index slot 0 is time and weighs ``kernel_order``; every other
    slot is a spatial coordinate of weight one.
    """

    noise_degrees: tuple = ()
    kernel_order: Fraction = Fraction(2)

    def __post_init__(self):
        object.__setattr__(self, "noise_degrees", tuple(as_degree(d) for d in self.noise_degrees))
        object.__setattr__(self, "kernel_order", Fraction(self.kernel_order))

    def weighted(self, k: tuple) -> Fraction:
        if not k:
            return Fraction(0)
        return k[0] * self.kernel_order + sum(k[1:])

    def degree(self, t: DecoratedTree) -> Degree:
        return degree(t, self.noise_degrees, self.kernel_order)


_degree_cache: dict = {}


def degree(t: DecoratedTree, noise_degrees: Sequence, kernel_order=2) -> Degree:
    """Degree of a decorated tree.

    Sum over nodes of the (parabolically weighted) polynomial degree, the
    noise degree and the extended label, plus ``kernel_order - |derivative|``
    per edge.
    """
    noise_degrees = tuple(as_degree(d) for d in noise_degrees)
    ko = Fraction(kernel_order)
    key = (t, noise_degrees, ko)
    hit = _degree_cache.get(key)
    if hit is not None:
        return hit
    g = Grading(noise_degrees, ko)
    const, kap = Fraction(0), Fraction(0)
    stack = [t]
    while stack:
        n = stack.pop()
        lab = n.label
        const += g.weighted(lab.poly) + lab.ext.const
        kap += lab.ext.kappa
        if lab.noise:
            if lab.noise > len(noise_degrees):
                raise IndexError(f"noise index {lab.noise} but only {len(noise_degrees)} noise degrees given")
            nd = noise_degrees[lab.noise - 1]
            const += nd.const
            kap += nd.kappa
        for e, c in n.children:
            const += ko - g.weighted(e)
            stack.append(c)
    out = Degree(const, kap)
    if len(_degree_cache) > 200_000:
        _degree_cache.clear()
    _degree_cache[key] = out
    return out


# --------------------------------------------------------------------------
# forests


class Forest:
    """Multiset of trees: an element of the free commutative algebra on trees.

    ``Forest.ZERO`` is the absorbing zero produced when an extraction hits a
    component outside the negative sector.
    """

    __slots__ = ("trees", "is_zero", "_hash")

    def __init__(self, trees: Iterable[DecoratedTree] = (), zero: bool = False):
        self.trees = () if zero else tuple(sorted(trees))
        self.is_zero = zero
        self._hash = hash((self.trees, zero))

    def __mul__(self, other: "Forest") -> "Forest":
        if self.is_zero or other.is_zero:
            return Forest.ZERO
        return Forest(self.trees + other.trees)

    def __eq__(self, other):
        return isinstance(other, Forest) and self.is_zero == other.is_zero and self.trees == other.trees

    def __hash__(self):
        return self._hash

    def __len__(self):
        return len(self.trees)

    def __iter__(self):
        return iter(self.trees)

    def is_unit(self) -> bool:
        return not self.is_zero and not self.trees

    def __str__(self):
        if self.is_zero:
            return "0"
        if not self.trees:
            return "{}"
        return " . ".join(f"[{t}]" for t in self.trees)

    __repr__ = __str__


Forest.ZERO = Forest(zero=True)
Forest.UNIT = Forest()


# --------------------------------------------------------------------------
# tree polynomials


class TreePolynomial:
    """Finite linear combination of trees with polynomial coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        out = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for t, c in items:
                c = Poly.coerce(c)
                if c.is_zero():
                    continue
                prev = out.get(t)
                s = c if prev is None else prev + c
                if s.is_zero():
                    out.pop(t, None)
                else:
                    out[t] = s
        self.terms = out

    @classmethod
    def of(cls, t: DecoratedTree, coeff=1) -> "TreePolynomial":
        return cls({t: coeff})

    def __add__(self, other):
        if isinstance(other, DecoratedTree):
            other = TreePolynomial.of(other)
        return TreePolynomial(list(self.terms.items()) + list(other.terms.items()))

    __radd__ = __add__

    def __neg__(self):
        return TreePolynomial({t: -c for t, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, DecoratedTree):
            other = TreePolynomial.of(other)
        return self + (-other)

    def scale(self, c) -> "TreePolynomial":
        c = Poly.coerce(c)
        return TreePolynomial({t: v * c for t, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (TreePolynomial, DecoratedTree)):
            return self.product(other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def product(self, other, keep=None) -> "TreePolynomial":
        """Bilinear tree product; ``keep(tree)`` filters the resulting terms."""
        if isinstance(other, DecoratedTree):
            other = TreePolynomial.of(other)
        acc = []
        for t1, c1 in self.terms.items():
            for t2, c2 in other.terms.items():
                t = tree_product(t1, t2)
                if keep is None or keep(t):
                    acc.append((t, c1 * c2))
        return TreePolynomial(acc)

    def map_linear(self, f) -> "TreePolynomial":
        """Apply a linear map given on basis trees (``f(tree) -> TreePolynomial``)."""
        acc = []
        for t, c in self.terms.items():
            for t2, c2 in f(t).terms.items():
                acc.append((t2, c2 * c))
        return TreePolynomial(acc)

    def filter(self, pred) -> "TreePolynomial":
        return TreePolynomial({t: c for t, c in self.terms.items() if pred(t)})

    def subs(self, values: dict) -> "TreePolynomial":
        return TreePolynomial({t: c.subs(values) for t, c in self.terms.items()})

    def coefficient(self, t: DecoratedTree) -> Poly:
        return self.terms.get(t, Poly())

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, DecoratedTree):
            other = TreePolynomial.of(other)
        if not isinstance(other, TreePolynomial):
            return NotImplemented
        return self.terms == other.terms

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(sorted(self.terms.items(), key=lambda tc: tc[0].sort_key()))

    def __str__(self):
        from .notation import format_tree_polynomial

        return format_tree_polynomial(self)

    def __repr__(self):
        return f"TreePolynomial({str(self)!r})"

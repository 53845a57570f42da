"""Renormalisation characters acting on trees by extraction and contraction.

For a tree ``T`` and a subset of its edges, every connected piece of the
subset is cut out (``extract``) and collapsed to a single vertex
(``contract``).  A character ``g`` on negative trees then acts by

    M_g T = sum over edge subsets S of g(extract(S)) * contract(S).

The extended flavour records the degree of each collapsed piece on the new
vertex so that every term keeps the degree of ``T``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

from .polys import Poly
from .symbols import (
    ZERO_DEGREE,
    DecoratedTree,
    Forest,
    Grading,
    NodeLabel,
    TreePolynomial,
    mi_add,
    project_extended,
)


# --------------------------------------------------------------------------
# flattened trees


class _Flat:
    """Preorder node arrays; edge ``v`` is the edge from ``parent[v]`` to ``v``."""

    __slots__ = ("labels", "parent", "deriv", "kids", "n")

    def __init__(self, t: DecoratedTree):
        self.labels = []
        self.parent = []
        self.deriv = []
        self.kids = []
        stack = [(t, -1, ())]
        while stack:
            node, par, e = stack.pop()
            idx = len(self.labels)
            self.labels.append(node.label)
            self.parent.append(par)
            self.deriv.append(e)
            self.kids.append([])
            if par >= 0:
                self.kids[par].append(idx)
            for ce, c in reversed(node.children):
                stack.append((c, idx, ce))
        self.n = len(self.labels)


_flat_cache: dict = {}


def _flat(t: DecoratedTree) -> _Flat:
    f = _flat_cache.get(t)
    if f is None:
        if len(_flat_cache) > 50_000:
            _flat_cache.clear()
        f = _flat_cache[t] = _Flat(t)
    return f


@dataclass(frozen=True)
class Extraction:
    """An edge subset of ``host`` with its connected pieces.

    Edges are named by their lower endpoint in preorder. Each component is
    ``(top, members)`` where ``top`` is the member nearest the root.
    """

    host: DecoratedTree
    edges: frozenset
    components: tuple

    @property
    def is_empty(self) -> bool:
        return not self.edges


def _components(f: _Flat, edges) -> tuple:
    comp = list(range(f.n))
    for v in range(1, f.n):
        if v in edges:
            comp[v] = comp[f.parent[v]]
    groups: dict = {}
    for v in range(f.n):
        groups.setdefault(comp[v], []).append(v)
    return tuple((top, tuple(m)) for top, m in sorted(groups.items()) if len(m) > 1)


def enumerate_subgraphs(t: DecoratedTree) -> Iterator[Extraction]:
    """Every edge subset of ``t`` exactly once, in increasing bitmask order."""
    f = _flat(t)
    edge_ids = list(range(1, f.n))
    for mask in range(1 << len(edge_ids)):
        edges = frozenset(e for i, e in enumerate(edge_ids) if mask >> i & 1)
        yield Extraction(t, edges, _components(f, edges))


def _subtree(f: _Flat, top: int, edges, extended: bool) -> DecoratedTree:
    lab = f.labels[top]
    lab = NodeLabel((), lab.noise, lab.ext if extended else ZERO_DEGREE)
    kids = [(f.deriv[v], _subtree(f, v, edges, extended)) for v in f.kids[top] if v in edges]
    return DecoratedTree(lab, kids)


def component_trees(x: Extraction, extended: bool = False) -> list:
    """The pieces of ``x`` as trees, with polynomial labels dropped."""
    f = _flat(x.host)
    return [_subtree(f, top, x.edges, extended) for top, _ in x.components]


def extract(x: Extraction, grading: Grading, extended: bool = False) -> Forest:
    """The forest of extracted pieces, or ``Forest.ZERO`` if any piece has degree >= 0."""
    trees = component_trees(x, extended)
    for t in trees:
        if not grading.degree(t) < ZERO_DEGREE:
            return Forest.ZERO
    return Forest(trees)


def contract(x: Extraction, extended: bool = False, grading: Grading | None = None) -> DecoratedTree:
    """Collapse every piece of ``x`` to one vertex.

    The new vertex carries the summed polynomial label, no noise, and in the
    extended flavour the degree of the removed piece as its extended label.
    A piece containing the host root becomes the new root.
    """
    f = _flat(x.host)
    if x.is_empty:
        return x.host
    if extended and grading is None:
        raise ValueError("extended contraction needs a grading")
    members_of = {v: (v,) for v in range(f.n)}
    label_of = {}
    for top, members in x.components:
        members_of[top] = members
        poly = ()
        for m in members:
            poly = mi_add(poly, f.labels[m].poly)
        beta = ZERO_DEGREE
        if extended:
            beta = grading.degree(_subtree(f, top, x.edges, True))
        label_of[top] = NodeLabel(poly, 0, beta)

    def build(r: int) -> DecoratedTree:
        kids = []
        for m in members_of[r]:
            for v in f.kids[m]:
                if v not in x.edges:
                    kids.append((f.deriv[v], build(v)))
        return DecoratedTree(label_of.get(r, f.labels[r]), kids)

    return build(0)


# --------------------------------------------------------------------------
# characters


class CharacterError(ValueError):
    pass


class Character:
    """Sparse map from negative trees to coefficients, multiplicative on forests.

    ``flavour`` is ``"plain"`` or ``"extended"``. A plain character applied
    to an extended tree reads the value of its projection. ``sector`` is an
    optional list of trees on which the character is regarded as defined;
    it only widens the domain used by :func:`compose` and :func:`invert`.
    """

    def __init__(self, values=None, grading: Grading | None = None, flavour: str = "plain", sector=()):
        if flavour not in ("plain", "extended"):
            raise CharacterError(f"unknown flavour {flavour!r}")
        self.flavour = flavour
        self.grading = grading
        self.values = {}
        for t, v in (values or {}).items():
            v = Poly.coerce(v)
            if t.has_poly():
                raise CharacterError(f"character key {t} carries polynomial labels")
            if flavour == "plain" and t.has_ext():
                raise CharacterError(f"plain character key {t} carries extended labels")
            if grading is not None and not grading.degree(t) < ZERO_DEGREE:
                raise CharacterError(f"character key {t} has degree {grading.degree(t)} >= 0")
            if not v.is_zero():
                self.values[t] = v
        self.sector = tuple(sector)

    @classmethod
    def counit(cls, grading: Grading | None = None, flavour: str = "plain") -> "Character":
        return cls({}, grading, flavour)

    def value(self, t: DecoratedTree) -> Poly:
        if self.flavour == "plain" and t.has_ext():
            t = project_extended(t)
        return self.values.get(t, _ZERO)

    def __call__(self, t):
        if isinstance(t, Forest):
            return self.forest_value(t)
        return self.value(t)

    def forest_value(self, forest: Forest) -> Poly:
        if forest.is_zero:
            return _ZERO
        out = _ONE
        for t in forest:
            v = self.value(t)
            if v.is_zero():
                return _ZERO
            out = out * v
        return out

    def subs(self, values: dict) -> "Character":
        return Character({t: v.subs(values) for t, v in self.values.items()}, self.grading, self.flavour, self.sector)

    def agrees_with(self, other: "Character", trees: Iterable[DecoratedTree]) -> bool:
        return all(self.value(t) == other.value(t) for t in trees)

    def is_counit_on(self, trees: Iterable[DecoratedTree]) -> bool:
        return all(self.value(t).is_zero() for t in trees)

    def items(self):
        return sorted(self.values.items(), key=lambda tv: tv[0].sort_key())

    def __repr__(self):
        body = ", ".join(f"{t}: {v}" for t, v in self.items())
        return f"Character[{self.flavour}]({{{body}}})"


_ZERO = Poly()
_ONE = Poly.const(1)


# --------------------------------------------------------------------------
# the action


_decomp_cache: dict = {}


def decomposition(t: DecoratedTree, grading: Grading, extended: bool = False) -> list:
    """``[(forest, quotient, multiplicity)]`` over all edge subsets of ``t``.

    Subsets whose extraction is the zero forest are left out; identical
    (forest, quotient) pairs from different subsets are merged.
    """
    key = (t, grading, extended)
    hit = _decomp_cache.get(key)
    if hit is not None:
        return hit
    acc: dict = {}
    for x in enumerate_subgraphs(t):
        forest = extract(x, grading, extended)
        if forest.is_zero:
            continue
        q = contract(x, extended, grading)
        acc[(forest, q)] = acc.get((forest, q), 0) + 1
    out = [(fo, q, n) for (fo, q), n in acc.items()]
    if len(_decomp_cache) > 20_000:
        _decomp_cache.clear()
    _decomp_cache[key] = out
    return out


def _grading_of(g: Character, grading: Grading | None) -> Grading:
    gr = grading or g.grading
    if gr is None:
        raise CharacterError("a grading is needed to decide which pieces are negative")
    return gr


def renorm_map(g: Character, p, extended: bool | None = None, grading: Grading | None = None) -> TreePolynomial:
    """Apply ``M_g`` to a tree or tree polynomial.

    ``extended`` defaults to the flavour of ``g``; a plain ``g`` may be used
    with ``extended=True``, in which case it is evaluated on projections.
    """
    gr = _grading_of(g, grading)
    if extended is None:
        extended = g.flavour == "extended"
    if isinstance(p, DecoratedTree):
        p = TreePolynomial.of(p)
    acc = []
    for t, c in p.terms.items():
        for forest, q, n in decomposition(t, gr, extended):
            v = g.forest_value(forest)
            if not v.is_zero():
                acc.append((q, v * c * n))
    return TreePolynomial(acc)


def negative_pieces(trees: Iterable[DecoratedTree], grading: Grading, extended: bool = False) -> list:
    """All trees occurring as extracted pieces of edge subsets of ``trees``."""
    seen = set()
    for t in trees:
        for forest, _, _ in decomposition(t, grading, extended):
            seen.update(forest.trees)
    return sorted(seen)


def _domain(chars, grading, extended, domain) -> list:
    base = set()
    for c in chars:
        base.update(c.values)
        base.update(c.sector)
    if domain is not None:
        base.update(domain)
    return negative_pieces(base, grading, extended)


def _quotient_value(f: Character, q: DecoratedTree, grading: Grading) -> Poly:
    if not q.children:
        return _ONE
    if not grading.degree(q) < ZERO_DEGREE:
        return _ZERO
    return f.value(q)


def compose(f: Character, g: Character, domain=None, grading: Grading | None = None) -> Character:
    """The character ``f o g`` with ``M_f M_g = M_{f o g}``.

    Values are computed on every negative piece of the trees in ``domain``
    together with the keys and sectors of ``f`` and ``g``.
    """
    if f.flavour != g.flavour:
        raise CharacterError("cannot compose characters of different flavours")
    gr = grading or f.grading or g.grading
    if gr is None:
        raise CharacterError("a grading is needed to compose characters")
    extended = f.flavour == "extended"
    dom = _domain((f, g), gr, extended, domain)
    out = {}
    for a in dom:
        total = _ZERO
        for forest, q, n in decomposition(a, gr, extended):
            gv = g.forest_value(forest)
            if gv.is_zero():
                continue
            fv = _quotient_value(f, q, gr)
            if not fv.is_zero():
                total = total + gv * fv * n
        out[a] = total
    return Character(out, gr, f.flavour, sector=dom)


def invert(g: Character, domain=None, grading: Grading | None = None) -> Character:
    """The character ``h`` with ``h o g = g o h = counit``, by induction on edge count."""
    gr = _grading_of(g, grading)
    extended = g.flavour == "extended"
    dom = _domain((g,), gr, extended, domain)
    memo: dict = {}

    def h(a: DecoratedTree) -> Poly:
        if not a.children:
            return _ONE
        if not gr.degree(a) < ZERO_DEGREE:
            return _ZERO
        hit = memo.get(a)
        if hit is not None:
            return hit
        total = _ZERO
        for forest, q, n in decomposition(a, gr, extended):
            if forest.is_unit():
                continue
            gv = g.forest_value(forest)
            if gv.is_zero():
                continue
            hv = h(q)
            if not hv.is_zero():
                total = total - gv * hv * n
        memo[a] = total
        return total

    return Character({a: h(a) for a in dom}, gr, g.flavour, sector=dom)


def random_character(sector, grading: Grading, rng: random.Random, flavour: str = "plain", max_num: int = 9) -> Character:
    """Random small rationals on ``sector``, for property tests."""
    vals = {}
    for t in sector:
        vals[t] = Fraction(rng.randint(-max_num, max_num), rng.randint(1, max_num))
    return Character(vals, grading, flavour, sector=sector)


# --------------------------------------------------------------------------
# text form


def character_to_json(g: Character) -> dict:
    from .notation import format_tree

    return {"flavour": g.flavour, "values": [[format_tree(t), str(v)] for t, v in g.items()]}


def character_from_json(data: dict, grading: Grading | None = None) -> Character:
    from .notation import parse_tree

    vals = {}
    for tree_txt, v in data.get("values", []):
        t = parse_tree(tree_txt)
        vals[t] = vals.get(t, _ZERO) + Poly.coerce(v if isinstance(v, str) else Fraction(v))
    return Character(vals, grading, data.get("flavour", "plain"))


__all__ = [
    "Character",
    "CharacterError",
    "Extraction",
    "compose",
    "component_trees",
    "contract",
    "decomposition",
    "enumerate_subgraphs",
    "extract",
    "invert",
    "negative_pieces",
    "project_extended",
    "random_character",
    "renorm_map",
]

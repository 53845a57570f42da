"""Power counting for Feynman-type integrals over self-similar kernels.

Every edge ``e`` carries a kernel of order ``a_e`` (it blows up like
``|x|^-a_e``) and the graph lives in a space of scaling dimension ``D``.
The integral converges if every subset ``V`` of at least two vertices has

    sum of a_e over edges inside V  <  D (|V| - 1).

Only induced edge sets need checking: dropping edges from a subgraph can
only lower its sum, since every exponent is non-negative.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

DEFAULT_EXPONENTS = {"P": Fraction(3), "K": Fraction(9, 4), "testfn": Fraction(0)}

MAX_VERTICES = 20


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class Edge:
    u: int
    v: int
    exponent: Fraction
    kind: str = "custom"


@dataclass
class FeynmanGraph:
    vertices: list
    edges: list  # list of Edge, endpoints are indices into ``vertices``
    dimension: Fraction
    root: Optional[int] = None
    name: str = ""

    def __post_init__(self):
        self.dimension = Fraction(self.dimension)
        for e in self.edges:
            if e.exponent < 0:
                raise GraphError(f"negative exponent on edge {self.vertices[e.u]}-{self.vertices[e.v]}")
            if e.kind == "testfn" and e.exponent != 0:
                raise GraphError("test-function edges must have exponent 0")

    @classmethod
    def build(cls, edges, dimension, kinds=None, root=None, name="", vertices=None):
        """From ``(u, v, kind)`` or ``(u, v, kind, exponent)`` tuples with named vertices."""
        table = dict(DEFAULT_EXPONENTS)
        if kinds:
            table.update({k: Fraction(str(v)) for k, v in kinds.items()})
        names = list(vertices) if vertices else []
        index = {n: i for i, n in enumerate(names)}

        def vid(n):
            if n not in index:
                index[n] = len(names)
                names.append(n)
            return index[n]

        out = []
        for item in edges:
            u, v, kind = item[0], item[1], item[2]
            if len(item) > 3:
                a = Fraction(str(item[3]))
            elif kind in table:
                a = table[kind]
            else:
                raise GraphError(f"no exponent known for edge kind {kind!r}")
            out.append(Edge(vid(u), vid(v), a, kind))
        r = vid(root) if root is not None else None
        return cls(names, out, Fraction(dimension), r, name)

    @property
    def n(self) -> int:
        return len(self.vertices)

    def is_connected(self, edges=None, vertices=None) -> bool:
        edges = self.edges if edges is None else edges
        vs = set(range(self.n)) if vertices is None else set(vertices)
        if not vs:
            return True
        adj = {v: [] for v in vs}
        for e in edges:
            if e.u in vs and e.v in vs:
                adj[e.u].append(e.v)
                adj[e.v].append(e.u)
        start = next(iter(vs))
        seen = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return seen == vs

    def with_edge(self, u, v, kind="testfn", exponent=0) -> "FeynmanGraph":
        return FeynmanGraph(list(self.vertices), self.edges + [Edge(u, v, Fraction(exponent), kind)], self.dimension, self.root, self.name)

    def scaled(self, s) -> "FeynmanGraph":
        s = Fraction(s)
        return FeynmanGraph(
            list(self.vertices),
            [Edge(e.u, e.v, e.exponent * s, e.kind) for e in self.edges],
            self.dimension * s,
            self.root,
            self.name,
        )


@dataclass
class WeinbergResult:
    convergent: bool
    worst_subgraph: tuple  # vertex names
    margin: Fraction
    edge_sum: Fraction = Fraction(0)
    bound: Fraction = Fraction(0)

    def summary(self) -> str:
        verdict = "convergent" if self.convergent else "divergent"
        rel = "<" if self.convergent else (">" if self.margin < 0 else "=")
        return (
            f"{verdict}, margin {self.margin}, subgraph sum {_num(self.edge_sum)} {rel} {_num(self.bound)}"
            f" on {{{', '.join(map(str, self.worst_subgraph))}}}"
        )


def _num(x: Fraction) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    d = x.denominator
    for p in (2, 5):
        while d % p == 0:
            d //= p
    return repr(float(x)) if d == 1 else str(x)


def _integer_scale(g: FeynmanGraph) -> int:
    den = g.dimension.denominator
    for e in g.edges:
        den = math.lcm(den, e.exponent.denominator)
    return den


def induced_sums(g: FeynmanGraph) -> np.ndarray:
    """Integer-scaled induced edge sums for every vertex bitmask."""
    scale = _integer_scale(g)
    masks = np.arange(1 << g.n, dtype=np.int64)
    total = np.zeros(1 << g.n, dtype=np.int64)
    for e in g.edges:
        a = int(e.exponent * scale)
        if a == 0:
            continue
        inside = ((masks >> e.u) & 1) & ((masks >> e.v) & 1)
        total += a * inside
    return total


def weinberg_check(g: FeynmanGraph) -> WeinbergResult:
    if g.n > MAX_VERTICES:
        raise GraphError(f"{g.n} vertices exceeds the exhaustive-search limit of {MAX_VERTICES}")
    if not g.is_connected():
        raise GraphError("graph is not connected")
    if g.n < 2:
        raise GraphError("need at least two vertices")
    scale = _integer_scale(g)
    sums = induced_sums(g)
    masks = np.arange(1 << g.n, dtype=np.int64)
    sizes = np.zeros(1 << g.n, dtype=np.int64)
    for i in range(g.n):
        sizes += (masks >> i) & 1
    D = int(g.dimension * scale)
    margins = D * (sizes - 1) - sums
    valid = sizes >= 2
    best = int(margins[valid].min())
    cands = masks[valid & (margins == best)]
    # lexicographic order on sorted vertex index tuples
    subsets = sorted(tuple(i for i in range(g.n) if m >> i & 1) for m in cands.tolist())
    pick = subsets[0]
    m = sum(1 << i for i in pick)
    margin = Fraction(best, scale)
    edge_sum = Fraction(int(sums[m]), scale)
    bound = g.dimension * (len(pick) - 1)
    return WeinbergResult(margin > 0, tuple(g.vertices[i] for i in pick), margin, edge_sum, bound)


def kernel_conv_order(a1, a2, D) -> Fraction:
    """Order of the convolution of two self-similar kernels: ``a1 + a2 - D``."""
    a1, a2, D = Fraction(a1), Fraction(a2), Fraction(D)
    if not a1 < D:
        raise ValueError(f"need a1 < D, got a1 = {a1}, D = {D}")
    if not a2 < D:
        raise ValueError(f"need a2 < D, got a2 = {a2}, D = {D}")
    if not a1 + a2 > D:
        raise ValueError(f"need a1 + a2 > D, got {a1 + a2} <= {D}")
    return a1 + a2 - D


def two_connectivity(g: FeynmanGraph, exclude_test: bool = True, exclude_root: bool = True) -> bool:
    """True iff the remaining graph is connected and no single edge is a bridge.

    Test-function edges and the root vertex are removed first unless told
    otherwise.
    """
    edges = [e for e in g.edges if not (exclude_test and e.kind == "testfn")]
    vs = set(range(g.n))
    if exclude_root and g.root is not None:
        vs.discard(g.root)
        edges = [e for e in edges if g.root not in (e.u, e.v)]
    if len(vs) < 2:
        return False
    if not g.is_connected(edges, vs):
        return False
    for i in range(len(edges)):
        if not g.is_connected(edges[:i] + edges[i + 1 :], vs):
            return False
    return True


# --------------------------------------------------------------------------
# corpus files


def graph_from_dict(data: dict, default_dimension=None) -> FeynmanGraph:
    try:
        D = data.get("dimension", default_dimension)
        if D is None:
            raise GraphError("graph needs a scaling dimension")
        return FeynmanGraph.build(
            data["edges"],
            Fraction(str(D)),
            data.get("kinds"),
            data.get("root"),
            data.get("name", ""),
            data.get("vertices"),
        )
    except KeyError as e:
        raise GraphError(f"missing field {e.args[0]!r}") from None


def load_graphs(path) -> list:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as e:
            raise GraphError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from None
    if "graphs" in data:
        kinds = data.get("kinds")
        out = []
        for gd in data["graphs"]:
            gd = dict(gd)
            if kinds and "kinds" not in gd:
                gd["kinds"] = kinds
            out.append(graph_from_dict(gd, data.get("dimension")))
        return out
    return [graph_from_dict(data)]


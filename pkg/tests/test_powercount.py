import itertools
import random
from fractions import Fraction

import numpy as np
import pytest

from regstruct.cli import data_file
from regstruct.powercount import (
    Edge,
    FeynmanGraph,
    GraphError,
    kernel_conv_order,
    load_graphs,
    two_connectivity,
    weinberg_check,
)


def brute_force(g):
    """Minimum of D(|V| - 1) - sum over every (vertex subset, edge subset inside it)."""
    best = None
    for r in range(2, g.n + 1):
        for vs in itertools.combinations(range(g.n), r):
            inside = np.array([float(e.exponent) for e in g.edges if e.u in vs and e.v in vs])
            bound = float(g.dimension) * (r - 1)
            if inside.size:
                bits = (np.arange(1 << inside.size)[:, None] >> np.arange(inside.size)) & 1
                worst = float((bits @ inside).max())
            else:
                worst = 0.0
            m = bound - worst
            best = m if best is None else min(best, m)
    return best


def random_graph(rng, n):
    exps = [Fraction(0), Fraction(1), Fraction(3, 2), Fraction(2), Fraction(9, 4), Fraction(3), Fraction(7, 2)]
    edges = []
    for v in range(1, n):
        edges.append(Edge(rng.randrange(v), v, rng.choice(exps)))
    for _ in range(rng.randint(0, 2)):
        u, v = rng.sample(range(n), 2)
        edges.append(Edge(u, v, rng.choice(exps)))
    return FeynmanGraph([f"v{i}" for i in range(n)], edges, rng.choice([3, 4, 5]))


def test_weinberg_matches_brute_force_on_random_graphs():
    rng = random.Random(99)
    for _ in range(200):
        g = random_graph(rng, rng.randint(2, 8))
        r = weinberg_check(g)
        assert float(r.margin) == pytest.approx(brute_force(g), abs=1e-12)
        assert r.convergent == (brute_force(g) > 0)


def test_forbidden_graph():
    (g,) = load_graphs(data_file("graph_forbidden.json"))
    r = weinberg_check(g)
    assert not r.convergent
    assert r.edge_sum == Fraction(21, 2)
    assert r.bound == 10
    assert r.margin == Fraction(-1, 2)
    assert r.summary().startswith("divergent, margin -1/2, subgraph sum 10.5 > 10")
    assert not two_connectivity(g)


def test_variance_graphs_converge_and_are_two_connected():
    graphs = load_graphs(data_file("graphs_variance.json"))
    assert len(graphs) == 3
    for g in graphs:
        assert weinberg_check(g).convergent, g.name
        assert two_connectivity(g), g.name


def test_single_edge():
    (g,) = load_graphs(data_file("graph_single_edge.json"))
    r = weinberg_check(g)
    assert r.convergent and r.margin == 2
    assert r.summary().startswith("convergent")


def test_kernel_chain():
    first = kernel_conv_order(3, Fraction(9, 2), 5)
    assert first == Fraction(5, 2)
    assert kernel_conv_order(first, 3, 5) == Fraction(1, 2)
    assert kernel_conv_order(Fraction(7, 2), Fraction(7, 2), 5) == 2
    with pytest.raises(ValueError, match="a1 \\+ a2 > D"):
        kernel_conv_order(2, 3, 5)
    with pytest.raises(ValueError, match="a1 < D"):
        kernel_conv_order(5, 3, 5)


def test_scaling_preserves_the_verdict():
    rng = random.Random(3)
    for _ in range(20):
        g = random_graph(rng, rng.randint(2, 6))
        r, s = weinberg_check(g), weinberg_check(g.scaled(3))
        assert r.convergent == s.convergent
        assert s.margin == 3 * r.margin


def test_adding_an_edge_never_helps():
    rng = random.Random(4)
    for _ in range(30):
        g = random_graph(rng, rng.randint(2, 6))
        u, v = rng.sample(range(g.n), 2)
        assert weinberg_check(g.with_edge(u, v, "P", 3)).margin <= weinberg_check(g).margin


def test_graph_errors():
    with pytest.raises(GraphError, match="not connected"):
        weinberg_check(FeynmanGraph(["a", "b", "c"], [Edge(0, 1, Fraction(3))], 5))
    with pytest.raises(GraphError):
        FeynmanGraph(["a", "b"], [Edge(0, 1, Fraction(-1))], 5)
    with pytest.raises(GraphError):
        FeynmanGraph.build([("a", "b", "Q")], 5)
    with pytest.raises(GraphError):
        weinberg_check(FeynmanGraph(["a"], [], 5))


def test_two_connectivity_examples():
    cycle = FeynmanGraph.build([("a", "b", "P"), ("b", "c", "P"), ("c", "a", "P")], 5)
    path = FeynmanGraph.build([("a", "b", "P"), ("b", "c", "P")], 5)
    assert two_connectivity(cycle)
    assert not two_connectivity(path)
    rooted = FeynmanGraph.build([("r", "a", "P"), ("a", "b", "P"), ("b", "a", "K"), ("r", "b", "testfn")], 5, root="r")
    assert two_connectivity(rooted)

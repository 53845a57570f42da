import random
from fractions import Fraction

import pytest

from regstruct import ONE, Degree, bracket, parse_tree, plant, xi
from regstruct.notation import parse_tree_polynomial
from regstruct.polys import Poly, parse_poly
from regstruct.renorm import (
    Character,
    CharacterError,
    character_from_json,
    character_to_json,
    compose,
    contract,
    decomposition,
    enumerate_subgraphs,
    extract,
    invert,
    random_character,
    renorm_map,
)
from regstruct.symbols import DecoratedTree, Forest, NodeLabel, TreePolynomial, project_extended


def preorder_edges(t):
    """``[(parent, child)]`` with nodes numbered in preorder."""
    edges = []

    def walk(node, me, counter):
        for _, c in node.children:
            counter[0] += 1
            child = counter[0]
            edges.append((me, child))
            walk(c, child, counter)

    walk(t, 0, [0])
    return edges


def preorder_labels(t):
    out = []

    def walk(node):
        out.append(node.label)
        for _, c in node.children:
            walk(c)

    walk(t)
    return out


def root_pair(t, grading):
    """The extraction of two root edges carrying ``I(Xi)^2``."""
    root_kids = frozenset(v for u, v in preorder_edges(t) if u == 0)
    hits = [
        x
        for x in enumerate_subgraphs(t)
        if len(x.edges) == 2 and x.edges <= root_kids and extract(x, grading) == Forest([bracket("2")])
    ]
    assert len(hits) == 1
    return hits[0]


def union_find_components(n, edges):
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for u, v in edges:
        parent[find(u)] = find(v)
    groups = {}
    for v in range(n):
        groups.setdefault(find(v), set()).add(v)
    return {frozenset(g) for g in groups.values() if len(g) > 1}


@pytest.mark.parametrize("code,count", [("3", 8), ("22", 32), ("32", 64)])
def test_subgraph_enumeration_against_union_find(code, count):
    t = bracket(code)
    xs = list(enumerate_subgraphs(t))
    assert len(xs) == count
    edges = preorder_edges(t)
    assert len({x.edges for x in xs}) == count
    for x in xs:
        chosen = [(u, v) for u, v in edges if v in x.edges]
        expected = union_find_components(t.n_nodes, chosen)
        got = {frozenset(m) for _, m in x.components}
        assert got == expected


def test_extract_examples(phi4_grading):
    t = bracket("22")
    empty = next(iter(enumerate_subgraphs(t)))
    assert extract(empty, phi4_grading).is_unit()
    assert extract(root_pair(t, phi4_grading), phi4_grading) == Forest([bracket("2")])
    # I(I(Xi)) has positive degree, so extracting it gives the zero forest
    chain = plant(plant(xi()))
    full = list(enumerate_subgraphs(chain))[-1]
    assert phi4_grading.degree(chain) > 0
    assert extract(full, phi4_grading) is Forest.ZERO


def test_contraction_of_the_thirteen_edge_example():
    # node -> (children); every node gets a distinct polynomial label so it can be traced
    shape = {
        "root": ["left", "right"],
        "left": ["leftl", "leftr"],
        "leftl": ["leftll", "leftlc", "leftlr"],
        "right": ["rightl", "rightr"],
        "rightl": ["rightll", "rightlr"],
        "rightr": ["rightrl", "rightrr"],
    }
    names = ["root", "left", "leftl", "leftll", "leftlc", "leftlr", "leftr", "right", "rightl", "rightll", "rightlr", "rightr", "rightrl", "rightrr"]
    label = {n: tuple([0] * (i + 1) + [1]) for i, n in enumerate(names)}

    def build(n):
        return DecoratedTree(NodeLabel(poly=label[n]), [((), build(c)) for c in shape.get(n, [])])

    host = build("root")
    assert host.n_edges == 13
    blue = {("right", "root"), ("rightr", "right"), ("rightrl", "rightr"), ("rightl", "right"), ("rightlr", "rightl")}
    red = {("leftl", "left"), ("leftlr", "leftl"), ("leftr", "left")}

    # locate the chosen edges by the label of their lower endpoint
    labels = preorder_labels(host)
    wanted = {label[child] for child, _ in blue | red}
    chosen = frozenset(v for _, v in preorder_edges(host) if labels[v].poly in wanted)
    x = next(x for x in enumerate_subgraphs(host) if x.edges == chosen)
    assert len(x.components) == 2

    def total(group):
        out = [0] * 16
        for n in group:
            for i, v in enumerate(label[n]):
                out[i] += v
        while out and out[-1] == 0:
            out.pop()
        return tuple(out)

    blue_nodes = {"root", "right", "rightr", "rightrl", "rightl", "rightlr"}
    red_nodes = {"left", "leftl", "leftlr", "leftr"}
    leaf = lambda n: DecoratedTree(NodeLabel(poly=label[n]))
    red_vertex = DecoratedTree(NodeLabel(poly=total(red_nodes)), [((), leaf("leftll")), ((), leaf("leftlc"))])
    expected = DecoratedTree(
        NodeLabel(poly=total(blue_nodes)),
        [((), red_vertex), ((), leaf("rightll")), ((), leaf("rightrr"))],
    )
    q = contract(x)
    assert q == expected
    assert q.n_nodes == 6


def test_extended_contraction_records_the_degree(phi4_grading):
    t = bracket("22")
    q = contract(root_pair(t, phi4_grading), extended=True, grading=phi4_grading)
    assert project_extended(q) == plant(bracket("2"))
    assert q.label.ext == Degree(-1, -2)
    assert phi4_grading.degree(q) == phi4_grading.degree(t)
    assert contract(next(iter(enumerate_subgraphs(t)))) == t


def test_the_three_displayed_identities(phi4_grading):
    g = Character({bracket("2"): "-c1", bracket("22"): "-c2"}, phi4_grading)
    B = bracket
    c1, c2 = Poly.var("c1"), Poly.var("c2")
    assert renorm_map(g, B("3")) == TreePolynomial([(B("3"), 1), (B("1"), -3 * c1)])
    assert renorm_map(g, B("31")) == TreePolynomial([(B("31"), 1), (B("11"), -3 * c1)])
    expected = TreePolynomial(
        [(B("32"), 1), (B("12"), -3 * c1), (B("30"), -c1), (B("01"), 3 * c1 * c1), (B("1"), -3 * c2)]
    )
    assert renorm_map(g, B("32")) == expected


def test_unit_and_noise_are_fixed(phi4_grading, rng, phi4_table):
    g = random_character(phi4_table.negative_sector, phi4_grading, rng)
    assert renorm_map(g, ONE) == TreePolynomial.of(ONE)
    assert renorm_map(g, xi()) == TreePolynomial.of(xi())


def test_counit_is_the_identity(phi4_grading, phi4_table):
    e = Character.counit(phi4_grading)
    for t in phi4_table.trees:
        assert renorm_map(e, t) == TreePolynomial.of(t)


def _small_trees(table, max_edges=6):
    return [t for t in table.trees if t.n_edges <= max_edges]


def test_group_law_on_random_characters(phi4_table, phi4_grading):
    rng = random.Random(20240)
    trees = _small_trees(phi4_table)
    sector = [t for t in phi4_table.negative_sector if t.n_edges <= 6]
    ident = {t: TreePolynomial.of(t) for t in trees}
    for _ in range(100):
        f = random_character(sector, phi4_grading, rng)
        g = random_character(sector, phi4_grading, rng)
        fg = compose(f, g, trees, phi4_grading)
        gi = invert(g, trees, phi4_grading)
        for t in trees:
            mg = renorm_map(g, t)
            assert renorm_map(f, mg) == renorm_map(fg, t)
            assert renorm_map(gi, mg) == ident[t]


def test_inverse_of_the_cubic_character(phi4_grading):
    g = Character({bracket("2"): "-c1", bracket("22"): "-c2"}, phi4_grading)
    h = invert(g, [bracket("32")], phi4_grading)
    assert h.value(bracket("2")) == parse_poly("c1")
    assert h.value(bracket("22")) == parse_poly("c2")
    assert compose(h, g, [bracket("32")], phi4_grading).is_counit_on([bracket("2"), bracket("22"), bracket("3"), bracket("32")])


def test_extended_homogeneity_and_projection(phi4_table, phi4_grading):
    rng = random.Random(7)
    deg = phi4_grading.degree
    for _ in range(8):
        g = random_character(phi4_table.negative_sector, phi4_grading, rng)
        for t in phi4_table.trees:
            ex = renorm_map(g, t, extended=True)
            assert all(deg(s) == deg(t) for s in ex.terms)
            projected = TreePolynomial([(project_extended(s), c) for s, c in ex.terms.items()])
            assert projected == renorm_map(g, t, extended=False)


def test_decomposition_multiplicities_sum_to_subset_count(phi4_grading):
    t = bracket("32")
    total = sum(n for _, _, n in decomposition(t, phi4_grading))
    zero = sum(1 for x in enumerate_subgraphs(t) if extract(x, phi4_grading).is_zero)
    assert total + zero == 64


def test_character_validation(phi4_grading):
    with pytest.raises(CharacterError):
        Character({parse_tree("X^(0,1)*I(Xi)^2"): 1}, phi4_grading)
    with pytest.raises(CharacterError):
        Character({plant(bracket("2")): 1}, phi4_grading)
    with pytest.raises(CharacterError):
        Character({parse_tree("1{beta=-1}*I(Xi)^2"): 1}, phi4_grading)
    Character({parse_tree("1{beta=-1}*I(Xi)^2"): 1}, phi4_grading, "extended")


def test_character_json_round_trip(phi4_grading):
    g = Character({bracket("2"): Fraction(-3, 4), bracket("22"): "c2"}, phi4_grading)
    h = character_from_json(character_to_json(g), phi4_grading)
    assert h.agrees_with(g, [bracket("2"), bracket("22"), bracket("3")])


def test_compose_with_counit(phi4_table, phi4_grading, rng):
    trees = _small_trees(phi4_table)
    g = random_character(phi4_table.negative_sector, phi4_grading, rng)
    e = Character.counit(phi4_grading)
    for t in trees:
        assert renorm_map(compose(e, g, trees), t) == renorm_map(g, t)
        assert renorm_map(compose(g, e, trees), t) == renorm_map(g, t)


def test_polynomial_coefficients_are_symbolic(phi4_grading):
    g = Character({bracket("2"): "-c1"}, phi4_grading)
    out = renorm_map(g, bracket("3"))
    assert out == parse_tree_polynomial("<I(Xi)^3> - 3*c1 <I(Xi)>")

from fractions import Fraction

import pytest
from hypothesis import given, settings

from regstruct import ONE, Degree, Grading, bracket, format_tree, parse_tree, plant, tree_product, xi
from regstruct.notation import TreeSyntaxError, format_tree_polynomial, parse_tree_polynomial
from regstruct.polys import Poly, parse_poly
from regstruct.symbols import (
    DecoratedTree,
    NodeLabel,
    TreePolynomial,
    as_degree,
    format_degree,
    parse_degree,
    project_extended,
    tree_power,
    x_power,
)

from conftest import trees

ALPHA = Degree(0, -1)  # noise degree -alpha, alpha carried in the second slot


@pytest.mark.parametrize(
    "code,expected",
    [("1", Degree(2, -1)), ("2", Degree(4, -2)), ("3", Degree(6, -3)), ("22", Degree(10, -4)), ("32", Degree(12, -5)), ("01", Degree(4, -1))],
)
def test_bracket_degrees_in_alpha(code, expected):
    g = Grading((ALPHA,), 2)
    assert g.degree(bracket(code)) == expected


def test_bracket_shapes():
    i1 = plant(xi())
    assert bracket("1") == i1
    assert bracket("3") == tree_power(i1, 3)
    assert bracket("22") == tree_product(plant(tree_power(i1, 2)), tree_power(i1, 2))
    assert bracket("30") == plant(bracket("3"))
    assert bracket("12") == tree_product(plant(i1), tree_power(i1, 2))
    assert bracket("22").n_edges == 5
    assert bracket("32").n_edges == 6
    with pytest.raises(ValueError):
        bracket("123")


def test_degree_counting_matches_node_count():
    g = Grading((ALPHA,), 2)
    for code in ["1", "2", "3", "11", "21", "31", "22", "32", "01", "02", "03"]:
        t = bracket(code)
        n_xi = sum(1 for n in t.nodes() if n.label.noise)
        assert g.degree(t) == ALPHA * n_xi + Degree(2 * t.n_edges)


def test_degree_order_is_lexicographic():
    assert Degree(-1, 5) < Degree(0, -100)
    assert Degree(0, -1) < Degree(0)
    assert Degree(0) == 0
    assert as_degree("3/2 - k") == Degree(Fraction(3, 2), -1)
    assert format_degree(Degree(0, -4)) == "0 - 4k"
    for d in [Degree(0, -4), Degree(Fraction(-5, 2), -1), Degree(1, 3), Degree(0), Degree(Fraction(7, 3))]:
        assert parse_degree(format_degree(d)) == d


def test_polynomial_labels_and_weights():
    g = Grading((ALPHA,), 2)
    assert g.degree(x_power((1,))) == Degree(2)
    assert g.degree(x_power((0, 1, 1))) == Degree(2)
    assert x_power((0, 0, 0)) == ONE


def test_extended_labels_and_projection():
    t = parse_tree("1{beta=-1 - 2k}*I(Xi)^2")
    assert t.has_ext()
    assert project_extended(t) == bracket("2")
    g = Grading((Degree(Fraction(-5, 2), -1),), 2)
    assert g.degree(t) == g.degree(bracket("2")) + Degree(-1, -2)


def test_product_is_commutative_and_associative():
    a, b, c = bracket("1"), bracket("02"), x_power((0, 1))
    assert tree_product(a, b) == tree_product(b, a)
    assert tree_product(tree_product(a, b), c) == tree_product(a, tree_product(b, c))
    assert tree_product(ONE, a) == a


@settings(max_examples=200, deadline=None)
@given(trees)
def test_notation_round_trip(t):
    assert parse_tree(format_tree(t)) == t


@settings(max_examples=100, deadline=None)
@given(trees, trees)
def test_product_commutes_on_random_trees(s, t):
    try:
        st_ = tree_product(s, t)
    except ValueError:
        return
    assert st_ == tree_product(t, s)


@pytest.mark.parametrize("bad", ["I(Xi", "Xi)", "Q", "X^(1,)", "I[](Xi)"])
def test_parse_errors(bad):
    with pytest.raises(TreeSyntaxError):
        parse_tree(bad)


def test_tree_polynomial_round_trip_and_algebra():
    text = "(3*c1 - 9*c2) <1> - 3*c1 <I(Xi)> + c1^2 <I(I(Xi))>"
    p = parse_tree_polynomial(text)
    assert parse_tree_polynomial(format_tree_polynomial(p)) == p
    q = p - p
    assert q.is_zero()
    assert (p + p) == p.scale(Poly.const(2))
    assert p.coefficient(bracket("1")) == parse_poly("-3*c1")


def test_poly_ring():
    a = parse_poly("c1 + 2*c2")
    b = parse_poly("c1 - c2")
    assert a * b == parse_poly("c1^2 + c1*c2 - 2*c2^2")
    assert (a - a).is_zero()
    assert a.subs({"c1": Fraction(1, 2)}) == parse_poly("1/2 + 2*c2")
    assert parse_poly(str(a * b)) == a * b

from fractions import Fraction

import pytest

from regstruct import Degree, bracket
from regstruct.cli import data_file
from regstruct.structgen import (
    EquationSpec,
    NonSubcritical,
    Shape,
    SpecError,
    check_subcriticality,
    critical_noise_degree,
    generate_symbols,
    load_spec,
    spec_from_dict,
    white_noise_degree,
)
from regstruct.symbols import x_power

F0_EXPECTED = ["1", "01", "02", "03"]
F1_EXPECTED = ["1", "2", "3", "11", "21", "31", "22", "32"]


def cubic(dimension=3, noise=None, gamma=None):
    noise = white_noise_degree(dimension) if noise is None else noise
    return EquationSpec(dimension, [("xi", noise)], [Shape(noise=1), Shape(factors=3)], 2, gamma)


def test_white_noise_degrees():
    assert white_noise_degree(3) == Degree(Fraction(-5, 2), -1)
    assert white_noise_degree(2) == Degree(-2, -1)
    assert white_noise_degree(1, 2) == Degree(Fraction(-3, 2), -1)


def test_phi4_table_contains_the_listed_symbols():
    table = generate_symbols(cubic(gamma=Degree(2)))
    f0, f1 = set(table.f0), set(table.f1)
    for code in F0_EXPECTED:
        assert bracket(code) in f0, code
    for code in F1_EXPECTED:
        assert bracket(code) in f1, code


def test_phi4_table_degrees(phi4_table):
    expected = {
        "1": Degree(Fraction(-1, 2), -1),
        "2": Degree(-1, -2),
        "3": Degree(Fraction(-3, 2), -3),
        "22": Degree(0, -4),
        "32": Degree(Fraction(-1, 2), -5),
        "31": Degree(0, -4),
    }
    for code, d in expected.items():
        assert phi4_table.degree(bracket(code)) == d


def test_negative_sector_of_phi4_3(phi4_table):
    neg = set(phi4_table.negative_sector)
    for code in ["1", "2", "3", "22", "31", "32"]:
        assert bracket(code) in neg
    assert all(not t.has_poly() for t in neg)
    assert all(phi4_table.degree(t) < 0 for t in neg)
    # X_i I(Xi)^2 is negative but carries a polynomial label
    assert any(t.has_poly() and phi4_table.degree(t) < 0 for t in phi4_table.trees)


def test_every_symbol_is_below_gamma(phi4_table):
    assert all(phi4_table.degree(t) < phi4_table.gamma for t in phi4_table.trees)


def test_generation_is_closed_under_the_rules():
    spec = cubic(gamma=Degree(1))
    table = generate_symbols(spec)
    g = spec.grading
    from regstruct.symbols import plant, product

    f0 = table.f0
    for a in f0:
        for b in f0:
            for c in f0:
                t = product([a, b, c])
                if g.degree(t) < table.gamma:
                    assert t in set(table.f1)
    for t in table.f1:
        if not t.is_polynomial() and g.degree(plant(t)) < table.gamma:
            assert plant(t) in set(table.f0)


def test_subcriticality_flips_at_minus_three():
    assert check_subcriticality(cubic(noise=Degree(-3, 1)))[0]
    assert not check_subcriticality(cubic(noise=Degree(-3)))[0]
    assert not check_subcriticality(cubic(noise=Degree(-3, -1)))[0]
    assert critical_noise_degree(cubic()) == Degree(-3)


def test_white_noise_critical_dimension():
    assert check_subcriticality(cubic(2))[0]
    assert check_subcriticality(cubic(3))[0]
    assert not check_subcriticality(cubic(4))[0]
    with pytest.raises(NonSubcritical) as err:
        generate_symbols(cubic(4))
    assert err.value.witness


def test_kpz_critical_dimension():
    kpz1 = load_spec(data_file("kpz_d1.json"))
    kpz2 = load_spec(data_file("kpz_d2.json"))
    assert check_subcriticality(kpz1)[0]
    assert not check_subcriticality(kpz2)[0]
    # (dI(Xi))^2 has degree 2a + 2, which beats a exactly when a > -2
    assert critical_noise_degree(kpz1) == Degree(-2)


def test_polynomial_only_table():
    table = generate_symbols(load_spec(data_file("polynomial.json")))
    assert all(t.is_polynomial() for t in table.trees)
    assert x_power((1,)) in table
    assert table.negative_sector == []


def test_spec_errors(tmp_path):
    with pytest.raises(SpecError):
        spec_from_dict({"dimension": 3})
    with pytest.raises(SpecError):
        spec_from_dict({"dimension": 3, "noises": [{"name": "xi", "degree": "white"}], "shapes": [{"noise": "eta"}]})
    p = tmp_path / "bad.json"
    p.write_text('{"dimension": 3,')
    with pytest.raises(SpecError, match="bad.json:1"):
        load_spec(p)


def test_rows_are_sorted_by_degree(phi4_table):
    rows = list(phi4_table.rows())
    degs = [Degree(c, k) for _, c, k, _ in rows]
    assert degs == sorted(degs)
    assert len(rows) == len(phi4_table)

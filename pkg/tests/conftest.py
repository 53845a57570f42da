import random

import pytest
from hypothesis import strategies as st

from regstruct.cli import data_file
from regstruct.structgen import generate_symbols, load_spec
from regstruct.symbols import DecoratedTree, NodeLabel, plant, tree_product, xi


@pytest.fixture(scope="session")
def phi4_spec():
    return load_spec(data_file("phi4_d3.json"))


@pytest.fixture(scope="session")
def phi4_table(phi4_spec):
    return generate_symbols(phi4_spec)


@pytest.fixture(scope="session")
def phi4_grading(phi4_spec):
    return phi4_spec.grading


@pytest.fixture
def rng():
    return random.Random(1234)


def _leaf():
    return st.one_of(
        st.just(DecoratedTree()),
        st.just(xi(1)),
        st.tuples(st.integers(0, 2), st.integers(0, 1)).map(lambda k: DecoratedTree(NodeLabel(poly=k))),
    )


def _extend(children):
    planted = st.tuples(children, st.sampled_from([(), (0, 1), (0, 0, 1)])).map(lambda p: plant(*p))
    return st.lists(planted, min_size=1, max_size=3).map(_product)


def _product(ts):
    out = ts[0]
    for t in ts[1:]:
        out = tree_product(out, t)
    return out


trees = st.recursive(_leaf(), _extend, max_leaves=6)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])

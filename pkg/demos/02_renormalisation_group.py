"""Acting on trees by extraction and contraction, and checking that the characters form a group."""

import random

from regstruct import bracket
from regstruct.cli import data_file
from regstruct.notation import format_tree_polynomial
from regstruct.renorm import Character, compose, invert, random_character, renorm_map
from regstruct.structgen import generate_symbols, load_spec

spec = load_spec(data_file("phi4_d3.json"))
gr = spec.grading

# The character that only sees the two divergent shapes <2> and <22>.
g = Character({bracket("2"): "-c1", bracket("22"): "-c2"}, gr)
for code in ("3", "31", "32"):
    print(f"M_g <{code}> =", format_tree_polynomial(renorm_map(g, bracket(code))))

# Its inverse flips both signs.
h = invert(g, [bracket("32")], gr)
print("inverse:", h)

# Random rational characters compose like the maps they induce.
table = generate_symbols(spec)
trees = [t for t in table.trees if t.n_edges <= 6]
sector = [t for t in table.negative_sector if t.n_edges <= 6]
rng = random.Random(0)
f, k = random_character(sector, gr, rng), random_character(sector, gr, rng)
fk = compose(f, k, trees, gr)
same = all(renorm_map(f, renorm_map(k, t)) == renorm_map(fk, t) for t in trees)
print(f"M_f M_k == M_(f o k) on {len(trees)} trees: {same}")

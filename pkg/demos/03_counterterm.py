"""From the local expansion of the solution to the shift of the mass term."""

from regstruct.counterterm import phi4_ansatz, phi4_counterterm, truncated_power
from regstruct.notation import format_tree_polynomial

for d in (3, 2):
    a = phi4_ansatz(d)
    print(f"d = {d}")
    print("  solution:", format_tree_polynomial(a.expansion))
    print("  cube:    ", format_tree_polynomial(truncated_power(a, 3)))
    ct = phi4_counterterm(d)
    print("  renormalised equation:", ct.dual_text())

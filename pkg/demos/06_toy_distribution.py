"""A distribution that needs a diverging coupling to have a limit."""

import math

from regstruct.numerics import convergence_table, observed_rate

phi = lambda x: math.exp(-((x - 0.3) ** 2))
eps = [1e-1, 1e-2, 1e-3, 1e-4]
for eta in ("flat", "tent", "skew"):
    table = convergence_table(eta, eps, (1.0, 0.5), phi)
    errs = "  ".join(f"{err:.1e}" for _, _, err in table)
    print(f"{eta:>6}: errors {errs}   rate {observed_rate(table):.2f}")

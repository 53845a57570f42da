"""Does a Feynman integral converge? Check every vertex subset."""

from regstruct.cli import data_file
from regstruct.powercount import kernel_conv_order, load_graphs, two_connectivity, weinberg_check

for name in ("graphs_variance.json", "graph_forbidden.json", "graph_single_edge.json"):
    for g in load_graphs(data_file(name)):
        r = weinberg_check(g)
        print(f"{g.name}: {r.summary()}; 2-connected: {two_connectivity(g)}")

# heat kernel (order 3) against the squared mollified kernel (order 9/2), then the heat kernel again
first = kernel_conv_order(3, "9/2", 5)
print("P * K^2 has order", first, "and with one more P:", kernel_conv_order(first, 3, 5))

"""Compute preclusion numbers by exhaustive search in stream order."""
from fracpreclusion.families import build_augmented_cube
from fracpreclusion.graph import complete_graph, cycle_graph
from fracpreclusion.preclusion import MODES, preclusion_number

for n in range(4, 9):
    k, f = preclusion_number(complete_graph(n), "fsmp")
    print(f"fsmp(K_{n}) = {k}, first optimal set {f.to_json()}")

for name, g in [("C_4", cycle_graph(4)), ("AQ_3", build_augmented_cube(3))]:
    numbers = {mode: preclusion_number(g, mode)[0] for mode in MODES}
    print(name, numbers, "min degree", g.min_degree())

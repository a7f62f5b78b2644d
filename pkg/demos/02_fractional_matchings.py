"""Decide fractional perfect matchings and compare with the brute-force subset conditions."""
from fracpreclusion.graph import FaultSet, cycle_graph, delete_faults, petersen_graph, star_graph
from fracpreclusion.families import build_augmented_cube
from fracpreclusion.matching import (
    fractional_pm_witness,
    has_perfect_matching,
    scheinerman_violation,
    tutte_oracle,
)

# An odd cycle has no perfect matching but every edge can take weight 1/2.
c5 = cycle_graph(5)
w = fractional_pm_witness(c5)
print("C_5 witness:", w.to_json(), "total", w.total)

# A star fails: removing the centre leaves three isolated leaves.
print("K_1,3 blocking set:", scheinerman_violation(star_graph(3)))

p = petersen_graph()
print("Petersen: perfect matching", has_perfect_matching(p), "| Tutte condition", tutte_oracle(p))

# Cutting all seven edges at one vertex of AQ_4 isolates it.
g = build_augmented_cube(4)
h = delete_faults(g, FaultSet(edges=g.incident_edges(0)))
print("AQ_4 minus the edges at 0: witness", fractional_pm_witness(h), "| blocking set", scheinerman_violation(h))

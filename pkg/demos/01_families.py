"""Build augmented cubes and random generalized members, and check their structure."""
from fracpreclusion.families import (
    aq_cross_matchings,
    build_augmented_cube,
    build_family,
    check_neighborhood_lemmas,
    cross_cycle_lengths,
    family_cross_matchings,
    family_spec,
)

# %% augmented cubes are (2n-1)-regular on 2^n vertices
for n in range(1, 7):
    g = build_augmented_cube(n)
    print(f"AQ_{n}: {g.n} vertices, {g.m} edges, degree {g.min_degree()}")

# %% the two matchings that join the halves of AQ_5 form 4-cycles
print("AQ_5 alternating cycles:", cross_cycle_lengths(aq_cross_matchings(5)))

# %% a restricted member: the top-level join has no 4- or 6-cycles
spec = family_spec("rgaq", 5, seed=1)
g = build_family(spec)
print("RGAQ_5 alternating cycles:", cross_cycle_lengths(family_cross_matchings(spec)))
print("spec JSON:", spec.dumps()[:80], "...")

# %% every pair of vertices keeps at least two private neighbours
for gap in (1, 2):
    print(f"gap {gap} holds:", check_neighborhood_lemmas(g, gap).ok)

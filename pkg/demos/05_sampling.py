"""Sampled evidence on restricted 5-dimensional cubes, where exhaustion is out of reach."""
from fracpreclusion.families import build_family, family_spec
from fracpreclusion.preclusion import sampled_check

for seed in range(3):
    spec = family_spec("rgaq", 5, seed)
    g = build_family(spec)
    below = sampled_check(g, 8, 20_000, seed, "fsmp", spec=spec)
    # uniform draws almost never cut off a vertex; local draws concentrate near one
    at = sampled_check(g, 9, 20_000, seed, "fsmp", strategy="local", spec=spec)
    print(f"seed {seed}: size 8 -> {below.preclusive} preclusive; "
          f"size 9 (local) -> {at.preclusive} preclusive, {at.basic} basic")
    if at.preclusive:
        print("  example:", at.certificates()[0].dumps()[:120], "...")

"""Hypercubes, augmented cubes and their generalized (restricted) variants.

Labels are ``n``-bit strings ``u1 u2 ... un`` mapped to integers big-endian,
so ``u1`` is the most significant bit and the copy containing a vertex is
read off its high bit: ``H_0`` holds ids ``< 2**(n-1)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .graph import Edge, Graph, _build

KINDS = ("hypercube", "augmented_cube", "gaq", "rgaq")
MAX_DIMENSION = 6
RETRY_BUDGET = 10_000


def _check_dimension(n: int) -> None:
    if not 1 <= n <= MAX_DIMENSION:
        raise ValueError(f"dimension must be in 1..{MAX_DIMENSION}, got {n}")


def build_hypercube(n: int) -> Graph:
    _check_dimension(n)
    size = 1 << n
    return _build(size, ((v, v ^ (1 << i)) for v in range(size) for i in range(n) if v < v ^ (1 << i)))


def _as_bits(x: Union[str, int], n: int) -> str:
    if isinstance(x, str):
        if len(x) != n or set(x) - {"0", "1"}:
            raise ValueError(f"label {x!r} is not a {n}-bit string")
        return x
    if not 0 <= x < 1 << n:
        raise ValueError(f"label {x} does not fit in {n} bits")
    return format(x, f"0{n}b")


def aq_adjacent(u: Union[str, int], v: Union[str, int], n: int) -> bool:
    """Adjacency in the n-dimensional augmented cube.

    True iff for some position ``i`` the labels agree everywhere except at
    ``i``, or agree before ``i`` and are complementary from ``i`` to the end.
    """
    a, b = _as_bits(u, n), _as_bits(v, n)
    if a == b:
        return False
    for i in range(n):
        if a[:i] != b[:i]:
            break
        if a[i + 1:] == b[i + 1:]:
            return True
        if all(x != y for x, y in zip(a[i:], b[i:])):
            return True
    return False


def build_augmented_cube(n: int) -> Graph:
    _check_dimension(n)
    size = 1 << n
    return _build(
        size, ((u, v) for u in range(size) for v in range(u + 1, size) if aq_adjacent(u, v, n))
    )


@dataclass(frozen=True)
class CrossMatchings:
    """Two perfect matchings between side 0 and side 1, each ``half_size`` vertices.

    Pairs are ``(i, j)`` with ``i`` a side-0 id and ``j`` a side-1 id, both
    local (``0 .. half_size - 1``).
    """

    half_size: int
    m1: tuple[Edge, ...]
    m2: tuple[Edge, ...]

    def problems(self) -> list[str]:
        out = []
        h = self.half_size
        for name, m in (("m1", self.m1), ("m2", self.m2)):
            left = sorted(i for i, _ in m)
            right = sorted(j for _, j in m)
            if left != list(range(h)) or right != list(range(h)):
                out.append(f"{name} is not a perfect matching between the sides")
        shared = sorted(set(self.m1) & set(self.m2))
        if shared:
            out.append(f"m1 and m2 share edges {shared}")
        return out

    def validate(self) -> None:
        problems = self.problems()
        if problems:
            raise ValueError("invalid cross matchings: " + "; ".join(problems))

    def to_json(self) -> dict:
        return {"half_size": self.half_size, "m1": [list(e) for e in self.m1],
                "m2": [list(e) for e in self.m2]}

    @classmethod
    def from_json(cls, obj: dict) -> CrossMatchings:
        return cls(obj["half_size"], tuple(map(tuple, obj["m1"])), tuple(map(tuple, obj["m2"])))


def aq_cross_matchings(n: int) -> CrossMatchings:
    """The cross and complement matchings joining the two copies of ``AQ_{n-1}`` in ``AQ_n``."""
    if n < 2:
        raise ValueError("augmented cubes have two distinct cross matchings only for n >= 2")
    h = 1 << (n - 1)
    return CrossMatchings(h, tuple((i, i) for i in range(h)), tuple((i, ~i & (h - 1)) for i in range(h)))


def _permutation_cycles(perm: np.ndarray) -> list[int]:
    seen = np.zeros(len(perm), dtype=bool)
    lengths = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        x = start
        while not seen[x]:
            seen[x] = True
            x = perm[x]
            length += 1
        lengths.append(length)
    return lengths


def cross_cycle_lengths(cm: CrossMatchings) -> list[int]:
    """Lengths of the alternating cycles of ``m1 ∪ m2``, sorted ascending."""
    h = cm.half_size
    via_m1 = np.empty(h, dtype=np.int64)
    back_m2 = np.empty(h, dtype=np.int64)
    for i, j in cm.m1:
        via_m1[i] = j
    for i, j in cm.m2:
        back_m2[j] = i
    # side-0 walk i -> m1 -> m2^-1; each step crosses two edges
    return sorted(2 * c for c in _permutation_cycles(back_m2[via_m1]))


def is_restricted(cm: CrossMatchings) -> bool:
    return min(cross_cycle_lengths(cm)) >= 8


def random_cross_matchings(half_size: int, seed: int, restricted: bool = False,
                           max_tries: int = RETRY_BUDGET) -> CrossMatchings:
    """Draw two edge-disjoint perfect matchings by rejection sampling permutation pairs.

    With ``restricted=True`` the union is also required to have no 4- or
    6-cycles. Raises ``RuntimeError`` after ``max_tries`` rejected draws.
    """
    if half_size < 2 or half_size & (half_size - 1):
        raise ValueError(f"half_size must be a power of two >= 2, got {half_size}")
    rng = np.random.default_rng(seed)
    p1 = rng.permutation(half_size)
    for _ in range(max_tries):
        p2 = rng.permutation(half_size)
        # cycles of p1 followed by p2^-1 on side 0 <-> alternating cycles of double length
        cycles = _permutation_cycles(np.argsort(p2)[p1])
        shortest = min(cycles)
        if shortest >= (4 if restricted else 2):
            return CrossMatchings(
                half_size,
                tuple((i, int(p1[i])) for i in range(half_size)),
                tuple((i, int(p2[i])) for i in range(half_size)),
            )
    raise RuntimeError(
        f"no {'restricted ' if restricted else ''}cross matchings for half_size={half_size} "
        f"after {max_tries} draws (seed={seed})"
    )


@dataclass(frozen=True)
class FamilySpec:
    """Recipe for one family member; ``build_family(spec)`` is deterministic."""

    kind: str
    n: int
    seed: int | None = None
    halves: tuple["FamilySpec", "FamilySpec"] | None = None
    cross: CrossMatchings | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown family kind {self.kind!r}; expected one of {KINDS}")
        _check_dimension(self.n)
        if self.kind in ("gaq", "rgaq"):
            if self.n < 5:
                raise ValueError("generalized augmented cubes are built for n >= 5 (GAQ_4 = {AQ_4})")
            if self.halves is not None and any(h.n != self.n - 1 for h in self.halves):
                raise ValueError(f"halves of a dimension-{self.n} cube must have dimension {self.n - 1}")

    def to_json(self) -> dict:
        obj: dict = {"kind": self.kind, "n": self.n, "seed": self.seed,
                     "halves": [h.to_json() for h in self.halves] if self.halves else []}
        if self.cross is not None:
            obj["cross"] = self.cross.to_json()
        return obj

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, obj: dict) -> FamilySpec:
        halves = obj.get("halves") or None
        cross = obj.get("cross")
        return cls(
            obj["kind"], obj["n"], obj.get("seed"),
            tuple(cls.from_json(h) for h in halves) if halves else None,
            CrossMatchings.from_json(cross) if cross else None,
        )


def _child_seed(seed: int, slot: int) -> int:
    return int(np.random.SeedSequence([seed, slot]).generate_state(1, dtype=np.uint32)[0])


def family_spec(kind: str, n: int, seed: int | None = None) -> FamilySpec:
    """Fully expanded spec: random members get explicit seeds for every half.

    Halves of a ``gaq``/``rgaq`` member are general ``gaq`` members of one
    dimension lower (``AQ_4`` at the bottom), matching how restricted cubes
    are assembled from arbitrary generalized halves.
    """
    if kind in ("hypercube", "augmented_cube"):
        return FamilySpec(kind, n)
    if seed is None:
        raise ValueError(f"{kind} members need an explicit seed")
    if n - 1 == 4:
        halves = (FamilySpec("augmented_cube", 4), FamilySpec("augmented_cube", 4))
    else:
        halves = (family_spec("gaq", n - 1, _child_seed(seed, 0)),
                  family_spec("gaq", n - 1, _child_seed(seed, 1)))
    return FamilySpec(kind, n, seed, halves)


def build_gaq(half0: Graph | FamilySpec, half1: Graph | FamilySpec, cm: CrossMatchings) -> Graph:
    """Join two halves by the cross matchings; side 1 ids are shifted by ``half_size``."""
    g0 = build_family(half0) if isinstance(half0, FamilySpec) else half0
    g1 = build_family(half1) if isinstance(half1, FamilySpec) else half1
    h = cm.half_size
    dim = h.bit_length() - 1
    if h & (h - 1) or g0.n != h or g1.n != h:
        raise ValueError(f"halves must have {h} vertices to match the cross matchings; "
                         f"got {g0.n} and {g1.n}")
    for g in (g0, g1):
        if g.is_faulted or not g.is_regular(2 * dim - 1):
            raise ValueError(f"each half must be a {2 * dim - 1}-regular graph on {h} vertices")
    cm.validate()
    edges = list(g0.edges)
    edges.extend((u + h, v + h) for u, v in g1.edges)
    edges.extend((i, j + h) for i, j in cm.m1)
    edges.extend((i, j + h) for i, j in cm.m2)
    return _build(2 * h, edges)


def family_cross_matchings(spec: FamilySpec) -> CrossMatchings:
    if spec.cross is not None:
        return spec.cross
    if spec.kind == "augmented_cube":
        return aq_cross_matchings(spec.n)
    if spec.kind == "hypercube":
        raise ValueError("hypercubes join their halves by a single matching")
    return random_cross_matchings(1 << (spec.n - 1), _child_seed(spec.seed, 2),
                                  restricted=spec.kind == "rgaq")


def build_family(spec: FamilySpec) -> Graph:
    if spec.kind == "hypercube":
        return build_hypercube(spec.n)
    if spec.kind == "augmented_cube":
        return build_augmented_cube(spec.n)
    if spec.halves is None:
        spec = family_spec(spec.kind, spec.n, spec.seed)
    return build_gaq(spec.halves[0], spec.halves[1], family_cross_matchings(spec))


def is_augmented_cube(g: Graph) -> bool:
    n = g.n.bit_length() - 1
    if g.n != 1 << n or not 1 <= n <= MAX_DIMENSION or g.is_faulted:
        return False
    return g == build_augmented_cube(n)


@dataclass
class NeighborhoodReport:
    gap: int
    adjacent: list[tuple[int, int, int]] = field(default_factory=list)
    nonadjacent: list[tuple[int, int, int]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.adjacent and not self.nonadjacent

    def to_json(self) -> dict:
        return {"gap": self.gap, "ok": self.ok,
                "adjacent": [list(x) for x in self.adjacent],
                "nonadjacent": [list(x) for x in self.nonadjacent]}


def check_neighborhood_lemmas(g: Graph, gap: int) -> NeighborhoodReport:
    """Find ordered vertex pairs whose private neighborhoods are too small.

    For an edge ``ab`` the private part is ``(N(a) - b) \\ (N(b) - a)``; for
    a non-edge it is ``N(a) \\ N(b)``. Each triple is ``(a, b, size)`` for
    a private part smaller than ``gap``.
    """
    report = NeighborhoodReport(gap)
    verts = g.vertices
    for a in verts:
        ra = g.rows[a]
        for b in verts:
            if a == b:
                continue
            rb = g.rows[b]
            if ra >> b & 1:
                size = ((ra & ~(1 << b)) & ~(rb & ~(1 << a))).bit_count()
                if size < gap:
                    report.adjacent.append((a, b, size))
            else:
                size = (ra & ~rb).bit_count()
                if size < gap:
                    report.nonadjacent.append((a, b, size))
    return report


def family_invariant_problems(g: Graph, n: int) -> list[str]:
    """Check the shared invariants of every generalized augmented cube of dimension ``n``."""
    out = []
    if g.n != 1 << n:
        out.append(f"expected {1 << n} vertices, got {g.n}")
    if not g.is_regular(2 * n - 1):
        out.append(f"not {2 * n - 1}-regular: degrees {sorted(set(g.degrees().values()))}")
    return out


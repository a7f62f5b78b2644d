"""Exact decisions for perfect, almost-perfect and fractional perfect matchings.

Fractional perfect matchings are decided through the bipartite double
cover: a perfect matching ``v -> sigma(v)`` of the cover yields the
half-integral weighting ``f(uv) = ([sigma(u) = v] + [sigma(v) = u]) / 2``,
and every graph with a fractional perfect matching has a half-integral
one. Weights are kept as integer numerators over 2, never floats.

The two ``*_oracle`` functions decide the same questions by brute-force
subset enumeration and share no code with the matching routines.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels as K
from .graph import Edge, Graph, canonical_edge, delete_vertices, iter_bits

SCHEINERMAN_MAX_VERTICES = 24
TUTTE_MAX_VERTICES = 20


@dataclass(frozen=True)
class Matching:
    edges: tuple[Edge, ...]

    @property
    def size(self) -> int:
        return len(self.edges)

    def __len__(self) -> int:
        return len(self.edges)

    def covered(self) -> set[int]:
        return {x for e in self.edges for x in e}

    def problems(self, g: Graph) -> list[str]:
        out = []
        seen: set[int] = set()
        for u, v in self.edges:
            if not g.has_edge(u, v):
                out.append(f"({u}, {v}) is not an edge")
            if u in seen or v in seen:
                out.append(f"({u}, {v}) shares an endpoint with another edge")
            seen.update((u, v))
        return out


@dataclass(frozen=True)
class FractionalMatching:
    """Edge weights in halves: ``(u, v, numerator)`` with numerator 1 or 2.

    Edges absent from ``weights`` carry weight 0.
    """

    weights: tuple[tuple[int, int, int], ...]

    DENOMINATOR = 2

    def value(self, e: Edge) -> Fraction:
        e = canonical_edge(*e)
        for u, v, num in self.weights:
            if (u, v) == e:
                return Fraction(num, 2)
        return Fraction(0)

    def vertex_sum(self, v: int) -> Fraction:
        return Fraction(sum(num for a, b, num in self.weights if v in (a, b)), 2)

    @property
    def total(self) -> Fraction:
        return Fraction(sum(num for _, _, num in self.weights), 2)

    def problems(self, g: Graph) -> list[str]:
        """Reasons this is not a fractional perfect matching of ``g`` (empty if it is)."""
        out = []
        sums = dict.fromkeys(g.vertices, 0)
        for u, v, num in self.weights:
            if num not in (1, 2):
                out.append(f"weight {num}/2 on ({u}, {v}) not in {{1/2, 1}}")
            if not g.has_edge(u, v):
                out.append(f"({u}, {v}) is not an edge")
                continue
            sums[u] += num
            sums[v] += num
        out.extend(f"vertex {v} has weight {s}/2" for v, s in sums.items() if s != 2)
        if 2 * self.total != g.order:
            out.append(f"total weight {self.total} != {g.order}/2")
        return out

    def to_json(self) -> dict:
        return {"edges": [[u, v, num] for u, v, num in self.weights], "denominator": 2}

    @classmethod
    def from_json(cls, obj: dict) -> FractionalMatching:
        if obj.get("denominator") != 2:
            raise ValueError("only half-integral weights (denominator 2) are supported")
        return cls(tuple(sorted((*canonical_edge(u, v), int(num)) for u, v, num in obj["edges"])))


def _arrays(g: Graph) -> tuple[np.ndarray, np.int64]:
    return g.rows_array, g.alive_word


def max_matching(g: Graph) -> Matching:
    """Maximum-cardinality matching (Edmonds' blossom algorithm)."""
    rows, alive = _arrays(g)
    match = K.max_matching(rows, alive)
    return Matching(tuple((v, int(match[v])) for v in g.vertices if match[v] > v))


def matching_number(g: Graph) -> int:
    return max_matching(g).size


def has_perfect_matching(g: Graph) -> bool:
    if g.order % 2:
        return False
    return 2 * matching_number(g) == g.order


def has_almost_perfect_matching(g: Graph) -> bool:
    if g.order % 2 == 0:
        return False
    return 2 * matching_number(g) == g.order - 1


def _cover_mate(g: Graph) -> np.ndarray | None:
    if any(g.rows[v] == 0 for v in g.vertices):
        return None
    rows, alive = _arrays(g)
    ok, mate = K.has_cover_pm(rows, alive)
    return mate if ok else None


def has_fractional_pm(g: Graph) -> bool:
    if g.order == 0:
        return True
    return _cover_mate(g) is not None


def fractional_pm_witness(g: Graph) -> FractionalMatching | None:
    if g.order == 0:
        return FractionalMatching(())
    mate = _cover_mate(g)
    if mate is None:
        return None
    weights: dict[Edge, int] = {}
    for v in g.vertices:
        e = canonical_edge(v, int(mate[v]))
        weights[e] = weights.get(e, 0) + 1
    return FractionalMatching(tuple(sorted((u, v, num) for (u, v), num in weights.items())))


def has_fractional_apm(g: Graph) -> bool:
    """True iff some vertex can be left uncovered while every other vertex gets weight 1."""
    return any(has_fractional_pm(delete_vertices(g, [v])) for v in g.vertices)


def cover_matching_number(g: Graph) -> int:
    """Matching number of the bipartite double cover, computed without building it."""
    rows, alive = _arrays(g)
    size, _ = K.cover_max_matching(rows, alive)
    return int(size)


def _mask_to_set(mask) -> set[int]:
    return set(iter_bits(int(np.array([mask], dtype=np.int64).view(np.uint64)[0])))


def scheinerman_violation(g: Graph) -> set[int] | None:
    """A set ``S`` with ``i(G - S) > |S|``, or None when none exists."""
    if g.order > SCHEINERMAN_MAX_VERTICES:
        raise ValueError(f"subset oracle limited to {SCHEINERMAN_MAX_VERTICES} vertices, got {g.order}")
    rows, alive = _arrays(g)
    ok, sub = K.scheinerman_violation(rows, alive)
    return None if ok else _mask_to_set(sub)


def scheinerman_oracle(g: Graph) -> bool:
    return scheinerman_violation(g) is None


def tutte_violation(g: Graph) -> set[int] | None:
    """A set ``S`` with ``o(G - S) > |S|``, or None when none exists."""
    if g.order > TUTTE_MAX_VERTICES:
        raise ValueError(f"subset oracle limited to {TUTTE_MAX_VERTICES} vertices, got {g.order}")
    rows, alive = _arrays(g)
    ok, sub = K.tutte_violation(rows, alive)
    return None if ok else _mask_to_set(sub)


def tutte_oracle(g: Graph) -> bool:
    return tutte_violation(g) is None

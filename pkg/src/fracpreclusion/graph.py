"""Compact undirected graphs with bitmask adjacency, fault sets and edge-list I/O.

Vertices are integer ids ``0..n-1``. Deleting vertices never relabels: a
faulted graph keeps the id space of its host and records which ids survive
in the ``alive`` bitmask.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

Edge = tuple[int, int]

#: Largest id space the compiled kernels accept (one machine word per row).
KERNEL_MAX_VERTICES = 64


def canonical_edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable simple graph.

    Use :func:`graph_from_edges` rather than calling the constructor; it
    validates the input and canonicalizes the edge list.
    """

    n: int
    edges: tuple[Edge, ...]
    rows: tuple[int, ...] = field(repr=False)
    alive: int = field(repr=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.n, self.alive, self.edges) == (other.n, other.alive, other.edges)

    def __hash__(self) -> int:
        return hash((self.n, self.alive, self.edges))

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def order(self) -> int:
        """Number of surviving vertices."""
        return self.alive.bit_count()

    @cached_property
    def vertices(self) -> tuple[int, ...]:
        return tuple(iter_bits(self.alive))

    @property
    def is_faulted(self) -> bool:
        return self.alive != (1 << self.n) - 1

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.rows[u] >> v & 1)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return tuple(iter_bits(self.rows[v]))

    def degree(self, v: int) -> int:
        return self.rows[v].bit_count()

    def degrees(self) -> dict[int, int]:
        return {v: self.rows[v].bit_count() for v in self.vertices}

    def min_degree(self) -> int:
        return min((self.rows[v].bit_count() for v in self.vertices), default=0)

    def max_degree(self) -> int:
        return max((self.rows[v].bit_count() for v in self.vertices), default=0)

    def is_regular(self, d: int | None = None) -> bool:
        degs = {self.rows[v].bit_count() for v in self.vertices}
        if d is None:
            return len(degs) <= 1
        return degs <= {d}

    def incident_edges(self, v: int) -> tuple[Edge, ...]:
        """The edge set with exactly one end at ``v``."""
        return tuple(canonical_edge(v, u) for u in iter_bits(self.rows[v]))

    @cached_property
    def edge_index(self) -> dict[Edge, int]:
        return {e: i for i, e in enumerate(self.edges)}

    @cached_property
    def rows_array(self) -> np.ndarray:
        """Adjacency rows as ``int64`` words (bit ``u`` of row ``v`` set iff uv is an edge)."""
        if self.n > KERNEL_MAX_VERTICES:
            raise ValueError(
                f"compiled routines support at most {KERNEL_MAX_VERTICES} vertices, got {self.n}"
            )
        return np.array(self.rows, dtype=np.uint64).view(np.int64)

    @property
    def alive_word(self) -> np.int64:
        if self.n > KERNEL_MAX_VERTICES:
            raise ValueError(
                f"compiled routines support at most {KERNEL_MAX_VERTICES} vertices, got {self.n}"
            )
        return np.array([self.alive], dtype=np.uint64).view(np.int64)[0]

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        eu = np.array([e[0] for e in self.edges], dtype=np.int64)
        ev = np.array([e[1] for e in self.edges], dtype=np.int64)
        return eu, ev

    def sha256(self) -> str:
        return hashlib.sha256(write_graph(self).encode()).hexdigest()


def _build(n: int, edges: Iterable[Edge], alive: int | None = None) -> Graph:
    edges = tuple(sorted(edges))
    rows = [0] * n
    for u, v in edges:
        rows[u] |= 1 << v
        rows[v] |= 1 << u
    return Graph(n, edges, tuple(rows), (1 << n) - 1 if alive is None else alive)


def graph_from_edges(n: int, edges: Iterable[Sequence[int]]) -> Graph:
    """Build a graph on ids ``0..n-1``.

    Raises ``ValueError`` on self-loops, out-of-range endpoints and
    duplicate edges (``(u, v)`` and ``(v, u)`` count as the same edge).
    """
    if n < 0:
        raise ValueError(f"vertex count must be non-negative, got {n}")
    seen: set[Edge] = set()
    for pair in edges:
        u, v = (int(x) for x in pair)
        if u == v:
            raise ValueError(f"self-loop at vertex {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
        e = canonical_edge(u, v)
        if e in seen:
            raise ValueError(f"duplicate edge {e}")
        seen.add(e)
    return _build(n, seen)


def complete_graph(n: int) -> Graph:
    return _build(n, ((u, v) for u in range(n) for v in range(u + 1, n)))


def cycle_graph(n: int) -> Graph:
    return graph_from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> Graph:
    return graph_from_edges(n, [(i, i + 1) for i in range(n - 1)])


def star_graph(leaves: int) -> Graph:
    return graph_from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def petersen_graph() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return graph_from_edges(10, outer + spokes + inner)


def disjoint_union(*graphs: Graph) -> Graph:
    edges: list[Edge] = []
    offset = 0
    alive = 0
    for g in graphs:
        edges.extend((u + offset, v + offset) for u, v in g.edges)
        alive |= g.alive << offset
        offset += g.n
    return _build(offset, edges, alive)


@dataclass(frozen=True)
class FaultSet:
    """Faulty vertices and edges. Both tuples are kept sorted."""

    vertices: tuple[int, ...] = ()
    edges: tuple[Edge, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertices", tuple(sorted(set(int(v) for v in self.vertices))))
        object.__setattr__(
            self, "edges", tuple(sorted({canonical_edge(int(u), int(v)) for u, v in self.edges}))
        )

    @property
    def size(self) -> int:
        return len(self.vertices) + len(self.edges)

    def __len__(self) -> int:
        return self.size

    @property
    def vertex_mask(self) -> int:
        mask = 0
        for v in self.vertices:
            mask |= 1 << v
        return mask

    def validate(self, g: Graph) -> None:
        for v in self.vertices:
            if not (0 <= v < g.n) or not g.alive >> v & 1:
                raise ValueError(f"fault vertex {v} is not a vertex of the graph")
        for u, v in self.edges:
            if not (0 <= u < g.n and 0 <= v < g.n) or not g.has_edge(u, v):
                raise ValueError(f"fault edge ({u}, {v}) is not an edge of the graph")

    def is_subset(self, other: FaultSet) -> bool:
        return set(self.vertices) <= set(other.vertices) and set(self.edges) <= set(other.edges)

    def to_json(self) -> dict:
        return {"fault_vertices": list(self.vertices), "fault_edges": [list(e) for e in self.edges]}


def delete_faults(g: Graph, faults: FaultSet) -> Graph:
    """Return ``G - F``; deleted vertices keep their ids but leave ``alive``."""
    faults.validate(g)
    dead = faults.vertex_mask
    dropped = set(faults.edges)
    edges = [
        (u, v)
        for u, v in g.edges
        if not (dead >> u & 1 or dead >> v & 1) and (u, v) not in dropped
    ]
    return _build(g.n, edges, g.alive & ~dead)


def delete_vertices(g: Graph, vertices: Iterable[int]) -> Graph:
    return delete_faults(g, FaultSet(vertices=tuple(vertices)))


def isolated_vertices(g: Graph) -> set[int]:
    return {v for v in g.vertices if g.rows[v] == 0}


def bipartite_double_cover(g: Graph) -> Graph:
    """Cover graph with ``v`` for the 0-copy and ``v + n`` for the 1-copy of each vertex.

    Each edge ``uv`` lifts to ``(u, v + n)`` and ``(v, u + n)``; deleted
    vertices of ``g`` stay deleted in both copies.
    """
    n = g.n
    edges = []
    for u, v in g.edges:
        edges.append((u, v + n))
        edges.append((v, u + n))
    return _build(2 * n, edges, g.alive | g.alive << n)


def is_bipartite_by_sides(g: Graph, side_mask: int) -> bool:
    return all((side_mask >> u & 1) != (side_mask >> v & 1) for u, v in g.edges)


def read_graph(text: str) -> Graph:
    """Parse the edge-list format: ``#`` comments, an ``n m`` header, then ``m`` lines ``u v``."""
    lines = [ln.strip() for ln in text.splitlines()]
    data = [ln for ln in lines if ln and not ln.startswith("#")]
    if not data:
        raise ValueError("missing 'n m' header")
    header = data[0].split()
    if len(header) != 2:
        raise ValueError(f"malformed header {data[0]!r}")
    try:
        n, m = int(header[0]), int(header[1])
    except ValueError:
        raise ValueError(f"malformed header {data[0]!r}") from None
    if n < 0 or m < 0:
        raise ValueError(f"malformed header {data[0]!r}")
    body = data[1:]
    if len(body) != m:
        raise ValueError(f"header announces {m} edges, found {len(body)}")
    pairs = []
    for ln in body:
        parts = ln.split()
        if len(parts) != 2:
            raise ValueError(f"malformed edge line {ln!r}")
        try:
            pairs.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise ValueError(f"malformed edge line {ln!r}") from None
    return graph_from_edges(n, pairs)


def write_graph(g: Graph) -> str:
    """Serialize in canonical sorted order; the output is byte-exact for a given graph."""
    if g.is_faulted:
        raise ValueError("cannot serialize a graph with deleted vertices; store the fault set instead")
    out = [f"{g.n} {g.m}"]
    out.extend(f"{u} {v}" for u, v in g.edges)
    return "\n".join(out) + "\n"



def load_graph(path) -> Graph:
    with open(path) as fh:
        return read_graph(fh.read())


def save_graph(g: Graph, path) -> None:
    with open(path, "w") as fh:
        fh.write(write_graph(g))

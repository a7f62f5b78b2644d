"""Fault-set classification, preclusion numbers and super-matched verification.

A fault stream is fixed by an :class:`EnumerationPlan`: fault sets of size
``k`` grouped by vertex count (ascending), then by vertex combination, then
by edge combination, each combination in lexicographic order. Every set in
the stream has a global index, so the stream can be cut into contiguous
chunks, processed out of order by compiled workers, and resumed from a
checkpoint naming the last completed chunk.
"""

from __future__ import annotations

import bisect
import hashlib
import itertools
import json
import logging
import math
import os
import time
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Callable, Iterator

import numba
import numpy as np

from . import _kernels as K
from .families import FamilySpec, build_family, is_augmented_cube
from .graph import FaultSet, Graph, delete_faults, iter_bits
from .matching import (
    fractional_pm_witness,
    has_almost_perfect_matching,
    has_fractional_pm,
    has_perfect_matching,
    max_matching,
)

log = logging.getLogger(__name__)

MODES = ("mp", "smp", "fmp", "fsmp")
FRACTIONAL_MODES = ("fmp", "fsmp")
EDGE_ONLY_MODES = ("mp", "fmp")
CHUNK_SIZE = 100_000
CASE_BUDGET = 10**10
BLOCK_BUDGET = 20_000_000
_INT64_MAX = np.iinfo(np.int64).max


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")


@dataclass(frozen=True)
class Classification:
    preclusive: bool
    basic: bool
    trivial: bool

    def to_json(self) -> dict:
        return {"preclusive": self.preclusive, "basic": self.basic, "trivial": self.trivial}

    @classmethod
    def from_flag(cls, flag: int) -> Classification:
        return cls(bool(flag & K.PRECLUSIVE), bool(flag & K.BASIC), bool(flag & K.TRIVIAL))

    def is_violation(self, mode: str) -> bool:
        """Preclusive but not of the expected kind: non-basic (fractional) or non-trivial (integer)."""
        if not self.preclusive:
            return False
        return not (self.basic if mode in FRACTIONAL_MODES else self.trivial)


def classify_fault_set(g: Graph, faults: FaultSet, mode: str) -> Classification:
    """Classify ``faults`` for ``g`` with the reference (non-streaming) matching routines."""
    _check_mode(mode)
    if mode in EDGE_ONLY_MODES and faults.vertices:
        raise ValueError(f"mode {mode} only admits edge faults")
    h = delete_faults(g, faults)
    if mode in FRACTIONAL_MODES:
        preclusive = not has_fractional_pm(h)
    else:
        preclusive = not (has_perfect_matching(h) or has_almost_perfect_matching(h)) and h.order > 0
    basic = any(h.rows[v] == 0 for v in h.vertices)
    trivial = basic and g.order % 2 == 0 and len(faults.vertices) % 2 == 0
    return Classification(preclusive, basic, trivial)


def matching_witness(g: Graph, faults: FaultSet, mode: str) -> dict | None:
    """A matching showing ``faults`` is not preclusive, in its JSON form."""
    h = delete_faults(g, faults)
    if mode in FRACTIONAL_MODES:
        f = fractional_pm_witness(h)
        return None if f is None else f.to_json()
    m = max_matching(h)
    if 2 * m.size < h.order - 1:
        return None
    return {"edges": [list(e) for e in m.edges]}


@dataclass(frozen=True)
class Certificate:
    """Replayable record of one classified fault set."""

    spec: dict
    mode: str
    faults: FaultSet
    classification: Classification
    witness: dict | None = None

    def to_json(self) -> dict:
        obj = {"spec": self.spec, "mode": self.mode, **self.faults.to_json(),
               **self.classification.to_json()}
        if self.witness is not None:
            obj["witness"] = self.witness
        return obj

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, obj: dict) -> Certificate:
        return cls(
            obj["spec"], obj["mode"],
            FaultSet(tuple(obj["fault_vertices"]), tuple(map(tuple, obj["fault_edges"]))),
            Classification(obj["preclusive"], obj["basic"], obj["trivial"]),
            obj.get("witness"),
        )


def graph_ref(g: Graph, spec: FamilySpec | None = None) -> dict:
    if spec is not None:
        return {"family": spec.to_json()}
    return {"graph_sha256": g.sha256()}


def replay_certificate(cert: Certificate, g: Graph | None = None) -> bool:
    """Rebuild the host graph (or check ``g`` against the recorded hash) and reclassify."""
    if "family" in cert.spec:
        host = build_family(FamilySpec.from_json(cert.spec["family"]))
        if g is not None and g != host:
            raise ValueError("graph does not match the certificate's family spec")
    else:
        if g is None:
            raise ValueError("certificate records only a graph hash; pass the graph")
        if g.sha256() != cert.spec.get("graph_sha256"):
            raise ValueError("graph hash does not match the certificate")
        host = g
    return classify_fault_set(host, cert.faults, cert.mode) == cert.classification


def read_certificates(path) -> list[Certificate]:
    with open(path) as fh:
        return [Certificate.from_json(json.loads(line)) for line in fh if line.strip()]


# ---------------------------------------------------------------------------
# Enumeration plans
# ---------------------------------------------------------------------------


@dataclass
class _Blocks:
    vmask: np.ndarray      # int64 vertex mask per block
    nv: np.ndarray         # fault-vertex count per block
    offset: np.ndarray     # global index of the first set of each block, plus a sentinel
    pool_start: np.ndarray
    pool_len: np.ndarray
    pool_idx: np.ndarray   # concatenated edge pools

    @property
    def total(self) -> int:
        return int(self.offset[-1])


def _mask_word(mask: int) -> np.int64:
    return np.array([mask], dtype=np.uint64).view(np.int64)[0]


@dataclass(frozen=True)
class EnumerationPlan:
    """Deterministic stream of fault sets of size ``k``.

    ``fix_vertex`` forces one vertex into every set; ``max_vertices=0``
    gives edge-only streams; ``forbid_incident`` drops sets in which a
    fault edge touches a fault vertex.
    """

    graph: Graph
    k: int
    fix_vertex: int | None = None
    min_vertices: int = 0
    max_vertices: int | None = None
    forbid_incident: bool = False
    chunk_size: int = CHUNK_SIZE

    def __post_init__(self) -> None:
        if self.k < 0:
            raise ValueError("fault-set size must be non-negative")
        if self.chunk_size < 1:
            raise ValueError("chunk_size must be positive")
        if self.fix_vertex is not None:
            if not (0 <= self.fix_vertex < self.graph.n) or not self.graph.alive >> self.fix_vertex & 1:
                raise ValueError(f"fixed vertex {self.fix_vertex} is not a vertex of the graph")
            if self.max_vertices == 0:
                raise ValueError("a fixed vertex needs vertex faults")

    def to_json(self) -> dict:
        return {
            "graph_sha256": self.graph.sha256() if not self.graph.is_faulted else _faulted_hash(self.graph),
            "k": self.k, "fix_vertex": self.fix_vertex, "min_vertices": self.min_vertices,
            "max_vertices": self.max_vertices, "forbid_incident": self.forbid_incident,
            "chunk_size": self.chunk_size,
        }

    @cached_property
    def plan_hash(self) -> str:
        return hashlib.sha256(json.dumps(self.to_json(), sort_keys=True).encode()).hexdigest()

    @property
    def _candidates(self) -> list[int]:
        return [v for v in self.graph.vertices if v != self.fix_vertex]

    def _vertex_range(self) -> range:
        fixed = self.fix_vertex is not None
        lo = max(self.min_vertices, int(fixed))
        hi = self.k if self.max_vertices is None else min(self.k, self.max_vertices)
        hi = min(hi, len(self._candidates) + fixed)
        return range(lo, hi + 1)

    def upper_bound(self) -> int:
        """Stream length ignoring the incidence filter (exact when it is off)."""
        fixed = self.fix_vertex is not None
        c = len(self._candidates)
        return sum(math.comb(c, nv - fixed) * math.comb(self.graph.m, self.k - nv)
                   for nv in self._vertex_range())

    def check_budget(self, budget: int = CASE_BUDGET) -> None:
        bound = self.upper_bound()
        if bound > budget:
            raise ValueError(f"plan has up to {bound:.3e} cases, over the budget of {budget:.0e}")
        fixed = self.fix_vertex is not None
        blocks = sum(math.comb(len(self._candidates), nv - fixed) for nv in self._vertex_range())
        if blocks > BLOCK_BUDGET:
            raise ValueError(f"plan has {blocks} vertex combinations, over {BLOCK_BUDGET}")

    @cached_property
    def blocks(self) -> _Blocks:
        self.check_budget()
        g = self.graph
        fixed = () if self.fix_vertex is None else (self.fix_vertex,)
        masks = [(1 << u) | (1 << v) for u, v in g.edges]
        every = list(range(g.m))
        vm, nvs, offs, starts, lens = [], [], [0], [], []
        pools: list[list[int]] = [every]
        pool_cursor = len(every)
        for nv in self._vertex_range():
            t = self.k - nv
            for combo in itertools.combinations(self._candidates, nv - len(fixed)):
                vmask = 0
                for v in (*fixed, *combo):
                    vmask |= 1 << v
                if self.forbid_incident and vmask:
                    pool = [i for i, em in enumerate(masks) if not em & vmask]
                    start = pool_cursor
                    pools.append(pool)
                    pool_cursor += len(pool)
                else:
                    pool = every
                    start = 0
                count = math.comb(len(pool), t)
                if count == 0:
                    if pool is not every:
                        pools.pop()
                        pool_cursor -= len(pool)
                    continue
                vm.append(vmask)
                nvs.append(nv)
                offs.append(offs[-1] + count)
                starts.append(start)
                lens.append(len(pool))
        return _Blocks(
            np.array(vm, dtype=np.uint64).view(np.int64),
            np.array(nvs, dtype=np.int64),
            np.array(offs, dtype=np.int64),
            np.array(starts, dtype=np.int64),
            np.array(lens, dtype=np.int64),
            np.array(list(itertools.chain.from_iterable(pools)), dtype=np.int64),
        )

    @property
    def total(self) -> int:
        return self.blocks.total

    @property
    def nchunks(self) -> int:
        return -(-self.total // self.chunk_size)

    @cached_property
    def _block_of_mask(self) -> dict[int, int]:
        return {int(m): i for i, m in enumerate(self.blocks.vmask.view(np.uint64))}

    @cached_property
    def binom(self) -> np.ndarray:
        rows = max(self.graph.m, 1) + 1
        table = np.zeros((rows, self.k + 1), dtype=np.int64)
        for a in range(rows):
            for b in range(self.k + 1):
                table[a, b] = min(math.comb(a, b), _INT64_MAX)
        return table

    def _pool(self, b: int) -> np.ndarray:
        bl = self.blocks
        s = bl.pool_start[b]
        return bl.pool_idx[s:s + bl.pool_len[b]]

    def _decode(self, b: int, comb: tuple[int, ...] | list[int]) -> FaultSet:
        bl = self.blocks
        pool = self._pool(b)
        edges = self.graph.edges
        vmask = int(np.array([bl.vmask[b]]).view(np.uint64)[0])
        return FaultSet(tuple(iter_bits(vmask)), tuple(edges[pool[c]] for c in comb))

    def fault_set_at(self, index: int) -> FaultSet:
        if not 0 <= index < self.total:
            raise IndexError(f"index {index} outside stream of length {self.total}")
        bl = self.blocks
        b = bisect.bisect_right(bl.offset, index) - 1
        t = self.k - int(bl.nv[b])
        p = int(bl.pool_len[b])
        return self._decode(b, _unrank(index - int(bl.offset[b]), t, p))

    def index_of(self, faults: FaultSet) -> int | None:
        """Global index of ``faults`` in the stream, or None if the plan excludes it."""
        if faults.size != self.k:
            return None
        b = self._block_of_mask.get(faults.vertex_mask)
        if b is None:
            return None
        positions = {int(e): i for i, e in enumerate(self._pool(b))}
        try:
            comb = sorted(positions[self.graph.edge_index[e]] for e in faults.edges)
        except KeyError:
            return None
        return int(self.blocks.offset[b]) + _rank(comb, int(self.blocks.pool_len[b]))


def _faulted_hash(g: Graph) -> str:
    h = hashlib.sha256(f"{g.n} {g.alive}\n".encode())
    h.update("".join(f"{u} {v}\n" for u, v in g.edges).encode())
    return h.hexdigest()


def _unrank(r: int, t: int, p: int) -> list[int]:
    out, x = [], 0
    for i in range(t):
        while True:
            cnt = math.comb(p - x - 1, t - i - 1)
            if r < cnt:
                break
            r -= cnt
            x += 1
        out.append(x)
        x += 1
    return out


def _rank(comb: list[int], p: int) -> int:
    t = len(comb)
    r, prev = 0, -1
    for i, c in enumerate(comb):
        for x in range(prev + 1, c):
            r += math.comb(p - x - 1, t - i - 1)
        prev = c
    return r


def _next_comb(comb: list[int], p: int) -> bool:
    t = len(comb)
    i = t - 1
    while i >= 0 and comb[i] == p - t + i:
        i -= 1
    if i < 0:
        return False
    comb[i] += 1
    for j in range(i + 1, t):
        comb[j] = comb[j - 1] + 1
    return True


@dataclass(frozen=True)
class Checkpoint:
    plan_hash: str
    chunk_index: int
    counts: dict = field(default_factory=dict)
    certificates: int = 0

    def to_json(self) -> dict:
        return {"plan_hash": self.plan_hash, "chunk_index": self.chunk_index,
                "counts": self.counts, "certificates": self.certificates}

    @classmethod
    def load(cls, path) -> Checkpoint:
        with open(path) as fh:
            obj = json.load(fh)
        return cls(obj["plan_hash"], obj["chunk_index"], obj.get("counts", {}),
                   obj.get("certificates", 0))

    def save(self, path) -> None:
        tmp = f"{path}.tmp"
        with open(tmp, "w") as fh:
            json.dump(self.to_json(), fh, sort_keys=True)
        os.replace(tmp, path)


def _resume_chunk(plan: EnumerationPlan, checkpoint: Checkpoint | dict | None) -> int:
    if checkpoint is None:
        return 0
    if isinstance(checkpoint, dict):
        checkpoint = Checkpoint(checkpoint["plan_hash"], checkpoint["chunk_index"])
    if checkpoint.plan_hash != plan.plan_hash:
        raise ValueError("checkpoint belongs to a different plan")
    if not -1 <= checkpoint.chunk_index < plan.nchunks:
        raise ValueError(f"checkpoint chunk {checkpoint.chunk_index} outside 0..{plan.nchunks - 1}")
    return checkpoint.chunk_index + 1


def enumerate_fault_sets(plan: EnumerationPlan, checkpoint: Checkpoint | dict | None = None,
                         start: int | None = None, stop: int | None = None) -> Iterator[FaultSet]:
    """Yield the plan's fault sets in stream order.

    Resuming from ``checkpoint`` continues with the first chunk after the
    recorded one; ``start``/``stop`` select a raw index range instead.
    """
    if start is None:
        start = _resume_chunk(plan, checkpoint) * plan.chunk_size
    stop = plan.total if stop is None else min(stop, plan.total)
    if start >= stop:
        return
    bl = plan.blocks
    b = bisect.bisect_right(bl.offset, start) - 1
    comb = _unrank(start - int(bl.offset[b]), plan.k - int(bl.nv[b]), int(bl.pool_len[b]))
    for _ in range(start, stop):
        yield plan._decode(b, comb)
        if not _next_comb(comb, int(bl.pool_len[b])):
            b += 1
            if b < len(bl.nv):
                comb = list(range(plan.k - int(bl.nv[b])))


def iter_chunk(plan: EnumerationPlan, chunk: int) -> Iterator[FaultSet]:
    s = chunk * plan.chunk_size
    return enumerate_fault_sets(plan, start=s, stop=s + plan.chunk_size)


# ---------------------------------------------------------------------------
# Compiled stream evaluation
# ---------------------------------------------------------------------------


def _set_threads(threads: int) -> None:
    numba.set_num_threads(max(1, min(threads, numba.config.NUMBA_NUM_THREADS)))


def _kernel_args(plan: EnumerationPlan):
    g = plan.graph
    eu, ev = g.edge_arrays()
    bl = plan.blocks
    return (g.rows_array, g.alive_word, eu, ev, bl.vmask, bl.nv, bl.offset,
            bl.pool_start, bl.pool_len, bl.pool_idx, plan.k, plan.binom)


def run_chunks(plan: EnumerationPlan, mode: str, first_chunk: int, nchunks: int) -> np.ndarray:
    """Flags for every case in chunks ``first_chunk .. first_chunk + nchunks - 1``."""
    _check_mode(mode)
    nchunks = max(0, min(nchunks, plan.nchunks - first_chunk))
    out = np.zeros(nchunks * plan.chunk_size, dtype=np.uint8)
    if nchunks:
        K.run_chunks(first_chunk, nchunks, plan.chunk_size, plan.total, out,
                     *_kernel_args(plan), mode in FRACTIONAL_MODES, plan.graph.order % 2 == 0)
    end = min((first_chunk + nchunks) * plan.chunk_size, plan.total)
    return out[: max(0, end - first_chunk * plan.chunk_size)]


def stream_flags(plan: EnumerationPlan, mode: str, start: int, stop: int) -> np.ndarray:
    """Flags for global indices ``start .. stop - 1`` (serial, no chunk alignment)."""
    _check_mode(mode)
    stop = min(stop, plan.total)
    out = np.zeros(max(0, stop - start), dtype=np.uint8)
    if stop > start:
        K._run_range(start, stop, out, 0, *_kernel_args(plan),
                     mode in FRACTIONAL_MODES, plan.graph.order % 2 == 0)
    return out


def plan_for_mode(g: Graph, mode: str, k: int, *, fix_vertex: int | None = None,
                  min_vertices: int = 0, forbid_incident: bool = False,
                  chunk_size: int = CHUNK_SIZE) -> EnumerationPlan:
    _check_mode(mode)
    if mode in EDGE_ONLY_MODES:
        if fix_vertex is not None or min_vertices:
            raise ValueError(f"mode {mode} only admits edge faults")
        return EnumerationPlan(g, k, max_vertices=0, chunk_size=chunk_size)
    return EnumerationPlan(g, k, fix_vertex=fix_vertex, min_vertices=min_vertices,
                           forbid_incident=forbid_incident, chunk_size=chunk_size)


def preclusion_number(g: Graph, mode: str, *, threads: int = 1,
                      budget: int = CASE_BUDGET) -> tuple[int, FaultSet]:
    """Smallest preclusive fault-set size and the first preclusive set in stream order."""
    _set_threads(threads)
    limit = g.order + g.m
    for k in range(limit + 1):
        plan = plan_for_mode(g, mode, k)
        plan.check_budget(budget)
        if plan.total == 0:
            break
        batch = max(1, threads) * 2
        for c in range(0, plan.nchunks, batch):
            flags = run_chunks(plan, mode, c, batch)
            hits = np.flatnonzero(flags & K.PRECLUSIVE)
            if hits.size:
                return k, plan.fault_set_at(c * plan.chunk_size + int(hits[0]))
    raise ValueError(f"no {mode} preclusion set exists for this graph")


# ---------------------------------------------------------------------------
# Exhaustive verification
# ---------------------------------------------------------------------------


_COUNT_KEYS = ("total", "preclusive", "basic", "trivial", "violations")


@dataclass
class VerifyReport:
    mode: str
    plan: EnumerationPlan
    graph: dict
    counts: dict
    complete: bool
    certificates: list[Certificate] = field(default_factory=list)
    elapsed_seconds: float = 0.0

    @property
    def violations(self) -> int:
        return self.counts["violations"]

    def to_json(self) -> dict:
        """Deterministic summary; wall-clock time lives in :meth:`metadata`."""
        return {"graph": self.graph, "mode": self.mode, "plan": self.plan.to_json(),
                "plan_hash": self.plan.plan_hash, "complete": self.complete, **self.counts}

    def metadata(self) -> dict:
        return {"elapsed_seconds": round(self.elapsed_seconds, 3)}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2) + "\n"

    def write(self, path) -> None:
        Path(path).write_text(self.dumps())
        Path(f"{path}.meta.json").write_text(json.dumps(self.metadata(), sort_keys=True) + "\n")


def _count(flags: np.ndarray) -> dict:
    pre = (flags & K.PRECLUSIVE) != 0
    return {
        "total": int(flags.size),
        "preclusive": int(pre.sum()),
        "basic": int((pre & ((flags & K.BASIC) != 0)).sum()),
        "trivial": int((pre & ((flags & K.TRIVIAL) != 0)).sum()),
        "violations": int(((flags & K.VIOLATION) != 0).sum()),
    }


def verify_super(
    g: Graph,
    mode: str,
    k: int | None = None,
    *,
    fix_vertex: int | None = None,
    min_vertices: int = 0,
    forbid_incident: bool = False,
    spec: FamilySpec | None = None,
    threads: int = 1,
    chunk_size: int = CHUNK_SIZE,
    checkpoint_path=None,
    certs_path=None,
    resume: bool = False,
    stop_after_chunks: int | None = None,
    progress: Callable[[int, int], None] | None = None,
    progress_every: int = 10**6,
    budget: int = CASE_BUDGET,
) -> VerifyReport:
    """Classify every fault set of size ``k`` (default: minimum degree) in the plan's slice.

    Violations are preclusive sets that are not basic (fractional modes)
    or not trivial (integer modes); each one becomes a certificate. With
    ``checkpoint_path`` the run records progress after every batch and,
    with ``resume=True``, continues from it. ``stop_after_chunks`` ends the
    run early with ``complete=False``, the same state an interrupted run
    leaves behind.
    """
    start_time = time.perf_counter()
    k = g.min_degree() if k is None else k
    plan = plan_for_mode(g, mode, k, fix_vertex=fix_vertex, min_vertices=min_vertices,
                         forbid_incident=forbid_incident, chunk_size=chunk_size)
    plan.check_budget(budget)
    if fix_vertex is not None and not is_augmented_cube(g):
        log.warning("fixing a vertex assumes vertex-transitivity, which is only established "
                    "for augmented cubes; results cover that slice only")
    ref = graph_ref(g, spec)
    counts = dict.fromkeys(_COUNT_KEYS, 0)
    first = 0
    certs: list[Certificate] = []
    ncerts = 0
    if resume and checkpoint_path and Path(checkpoint_path).exists():
        ck = Checkpoint.load(checkpoint_path)
        first = _resume_chunk(plan, ck)
        counts.update(ck.counts)
        ncerts = ck.certificates
        if certs_path and Path(certs_path).exists():
            with open(certs_path) as fh:
                kept = [line for _, line in zip(range(ncerts), fh)]
            if len(kept) < ncerts:
                raise ValueError("certificate file is shorter than the checkpoint records")
            Path(certs_path).write_text("".join(kept))
            certs = [Certificate.from_json(json.loads(line)) for line in kept]
    elif certs_path:
        Path(certs_path).write_text("")

    _set_threads(threads)
    batch = max(1, threads) * 2
    next_report = (counts["total"] // progress_every + 1) * progress_every
    done_chunks = 0
    c = first
    while c < plan.nchunks:
        n = min(batch, plan.nchunks - c)
        if stop_after_chunks is not None:
            n = min(n, stop_after_chunks - done_chunks)
            if n <= 0:
                break
        flags = run_chunks(plan, mode, c, n)
        for key, val in _count(flags).items():
            counts[key] += val
        new = []
        for i in np.flatnonzero(flags & K.VIOLATION):
            fs = plan.fault_set_at(c * plan.chunk_size + int(i))
            new.append(Certificate(ref, mode, fs, Classification.from_flag(int(flags[i]))))
        certs.extend(new)
        ncerts += len(new)
        if certs_path and new:
            with open(certs_path, "a") as fh:
                fh.writelines(cert.dumps() + "\n" for cert in new)
        c += n
        done_chunks += n
        if checkpoint_path:
            Checkpoint(plan.plan_hash, c - 1, dict(counts), ncerts).save(checkpoint_path)
        if progress and counts["total"] >= next_report:
            progress(counts["total"], plan.total)
            next_report = (counts["total"] // progress_every + 1) * progress_every

    return VerifyReport(mode, plan, ref, counts, c >= plan.nchunks, certs,
                        time.perf_counter() - start_time)


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------


@dataclass
class SampleReport:
    mode: str
    k: int
    min_degree: int
    strategy: str
    seed: int
    flags: np.ndarray = field(repr=False)
    vmasks: np.ndarray = field(repr=False)
    edge_sets: np.ndarray = field(repr=False)
    graph: Graph = field(repr=False)
    spec: dict = field(default_factory=dict)

    @property
    def samples(self) -> int:
        return int(self.flags.size)

    @property
    def preclusive(self) -> int:
        return int(((self.flags & K.PRECLUSIVE) != 0).sum())

    @property
    def basic(self) -> int:
        f = self.flags
        return int((((f & K.PRECLUSIVE) != 0) & ((f & K.BASIC) != 0)).sum())

    @property
    def below_degree(self) -> list[int]:
        """Indices of preclusive samples smaller than the minimum degree."""
        if self.k >= self.min_degree:
            return []
        return np.flatnonzero(self.flags & K.PRECLUSIVE).tolist()

    @property
    def nonbasic_at_degree(self) -> list[int]:
        """Indices of violating samples (non-basic / non-trivial) at size equal to the minimum degree."""
        if self.k != self.min_degree:
            return []
        return np.flatnonzero(self.flags & K.VIOLATION).tolist()

    def fault_set(self, i: int) -> FaultSet:
        vmask = int(self.vmasks[i:i + 1].view(np.uint64)[0])
        edges = tuple(self.graph.edges[e] for e in self.edge_sets[i] if e >= 0)
        return FaultSet(tuple(iter_bits(vmask)), edges)

    def classification(self, i: int) -> Classification:
        return Classification.from_flag(int(self.flags[i]))

    def certificates(self) -> list[Certificate]:
        hits = np.flatnonzero(self.flags & K.PRECLUSIVE)
        return [Certificate(self.spec, self.mode, self.fault_set(int(i)), self.classification(int(i)))
                for i in hits]

    def to_json(self) -> dict:
        return {
            "mode": self.mode, "size": self.k, "samples": self.samples, "seed": self.seed,
            "strategy": self.strategy, "min_degree": self.min_degree,
            "preclusive": self.preclusive, "basic": self.basic,
            "below_degree": len(self.below_degree),
            "nonbasic_at_degree": len(self.nonbasic_at_degree),
        }


def _draw_uniform(g: Graph, k: int, count: int, rng: np.random.Generator, fix_vertex,
                  min_vertices, max_vertices, forbid_incident, edge_only):
    cand = [v for v in g.vertices if v != fix_vertex]
    if edge_only:
        cand = []
    nc = len(cand)
    universe = nc + g.m
    fixed = fix_vertex is not None
    kk = k - fixed
    if kk < 0 or kk > universe:
        raise ValueError(f"cannot draw fault sets of size {k}")
    vbit = np.array([1 << v for v in cand] + [0], dtype=np.uint64).view(np.int64)
    base = np.int64(0) if not fixed else _mask_word(1 << fix_vertex)
    eu, ev = g.edge_arrays()
    ebits = (np.left_shift(np.int64(1), eu) | np.left_shift(np.int64(1), ev)) if g.m else np.zeros(0, np.int64)
    lo = max(min_vertices, int(fixed))
    hi = k if max_vertices is None else max_vertices
    vm_out, nv_out, es_out = [], [], []
    got = 0
    attempts = 0
    while got < count:
        attempts += 1
        if attempts > 10_000:
            raise RuntimeError("constraint rejection rate too high for sampling")
        b = min(max(2 * (count - got), 1024), 20_000)
        if kk:
            keys = rng.random((b, universe))
            idx = np.sort(np.argpartition(keys, kk - 1, axis=1)[:, :kk], axis=1)
        else:
            idx = np.zeros((b, 0), dtype=np.int64)
        is_v = idx < nc
        vm = np.bitwise_or.reduce(np.where(is_v, vbit[np.minimum(idx, nc)], 0), axis=1) | base
        nv = is_v.sum(axis=1) + fixed
        es = np.where(is_v, -1, idx - nc)
        keep = (nv >= lo) & (nv <= hi)
        if forbid_incident and kk:
            touch = np.where(es >= 0, ebits[np.maximum(es, 0)], 0) & vm[:, None]
            keep &= ~(touch != 0).any(axis=1)
        es = np.sort(np.where(es >= 0, es, np.iinfo(np.int64).max), axis=1)
        es[es == np.iinfo(np.int64).max] = -1
        vm_out.append(vm[keep])
        nv_out.append(nv[keep])
        es_out.append(es[keep])
        got += int(keep.sum())
    return (np.concatenate(vm_out)[:count], np.concatenate(nv_out)[:count],
            np.concatenate(es_out)[:count])


def _draw_local(g: Graph, k: int, count: int, rng: np.random.Generator, edge_only: bool):
    """Fault sets drawn from around a random center: its neighbors, its edges, and
    edges among its neighbors."""
    verts = np.array(g.vertices)
    centers = rng.choice(verts, size=count)
    vm = np.zeros(count, dtype=np.int64)
    nv = np.zeros(count, dtype=np.int64)
    es = np.full((count, k), -1, dtype=np.int64)
    for c in np.unique(centers):
        rows = np.flatnonzero(centers == c)
        nbrs = g.neighbors(int(c))
        nmask = sum(1 << u for u in nbrs)
        pool_e = [i for i, (u, v) in enumerate(g.edges)
                  if u == c or v == c or (nmask >> u & 1 and nmask >> v & 1)]
        pool_v = [] if edge_only else list(nbrs)
        size = len(pool_v) + len(pool_e)
        if size < k:
            raise ValueError(f"local pool of vertex {c} has only {size} elements")
        keys = rng.random((rows.size, size))
        pick = np.sort(np.argpartition(keys, k - 1, axis=1)[:, :k], axis=1) if k else \
            np.zeros((rows.size, 0), dtype=np.int64)
        nvb = len(pool_v)
        vbits = np.array([1 << u for u in pool_v] + [0], dtype=np.uint64).view(np.int64)
        is_v = pick < nvb
        vm[rows] = np.bitwise_or.reduce(np.where(is_v, vbits[np.minimum(pick, nvb)], 0), axis=1)
        nv[rows] = is_v.sum(axis=1)
        pe = np.array(pool_e + [-1], dtype=np.int64)
        edge_col = np.where(is_v, -1, pe[np.clip(pick - nvb, 0, len(pool_e))])
        edge_col = np.sort(np.where(edge_col >= 0, edge_col, np.iinfo(np.int64).max), axis=1)
        edge_col[edge_col == np.iinfo(np.int64).max] = -1
        es[rows] = edge_col
    return vm, nv, es


def sampled_check(
    g: Graph,
    k: int,
    samples: int,
    seed: int,
    mode: str,
    *,
    fix_vertex: int | None = None,
    min_vertices: int = 0,
    max_vertices: int | None = None,
    forbid_incident: bool = False,
    strategy: str = "uniform",
    threads: int = 1,
    spec: FamilySpec | None = None,
) -> SampleReport:
    """Classify ``samples`` random fault sets of size ``k``.

    ``strategy="uniform"`` draws uniformly from all fault sets meeting the
    constraints. ``strategy="local"`` concentrates each set around a random
    center vertex (neighbors, incident edges, edges among the neighbors),
    which is where preclusive sets of size near the minimum degree live.
    """
    _check_mode(mode)
    edge_only = mode in EDGE_ONLY_MODES
    if edge_only and (fix_vertex is not None or min_vertices):
        raise ValueError(f"mode {mode} only admits edge faults")
    rng = np.random.default_rng(seed)
    if strategy == "uniform":
        vm, nv, es = _draw_uniform(g, k, samples, rng, fix_vertex, min_vertices,
                                   0 if edge_only else max_vertices, forbid_incident, edge_only)
    elif strategy == "local":
        if fix_vertex is not None or min_vertices or forbid_incident:
            raise ValueError("local sampling takes no plan constraints")
        vm, nv, es = _draw_local(g, k, samples, rng, edge_only)
    else:
        raise ValueError(f"unknown sampling strategy {strategy!r}")
    if es.shape[1] == 0:
        es = np.full((len(vm), 1), -1, dtype=np.int64)
    flags = np.zeros(len(vm), dtype=np.uint8)
    _set_threads(threads)
    eu, ev = g.edge_arrays()
    K.classify_many(flags, g.rows_array, g.alive_word, eu, ev, vm, nv, np.ascontiguousarray(es),
                    mode in FRACTIONAL_MODES, g.order % 2 == 0)
    return SampleReport(mode, k, g.min_degree(), strategy, seed, flags, vm, es, g, graph_ref(g, spec))

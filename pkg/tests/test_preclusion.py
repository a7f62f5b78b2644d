import itertools
import json
import math
import random
from collections import Counter

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_graph, small_graphs
from fracpreclusion.families import build_augmented_cube, build_family, build_hypercube, family_spec
from fracpreclusion.graph import (
    FaultSet,
    complete_graph,
    cycle_graph,
    graph_from_edges,
    petersen_graph,
)
from fracpreclusion.preclusion import (
    MODES,
    Certificate,
    Checkpoint,
    Classification,
    EnumerationPlan,
    classify_fault_set,
    enumerate_fault_sets,
    iter_chunk,
    matching_witness,
    plan_for_mode,
    preclusion_number,
    read_certificates,
    replay_certificate,
    run_chunks,
    sampled_check,
    stream_flags,
    verify_super,
)

AQ3 = build_augmented_cube(3)
AQ4 = build_augmented_cube(4)


def brute_stream(g, k, fix=None, minv=0, maxv=None, forbid=False):
    elems = [("v", v) for v in g.vertices] + [("e", e) for e in g.edges]
    out = []
    for c in itertools.combinations(elems, k):
        vs = [x for t, x in c if t == "v"]
        es = [x for t, x in c if t == "e"]
        if fix is not None and fix not in vs:
            continue
        if len(vs) < minv or (maxv is not None and len(vs) > maxv):
            continue
        if forbid and any(u in vs or v in vs for u, v in es):
            continue
        out.append(FaultSet(tuple(vs), tuple(es)))
    out.sort(key=lambda f: (len(f.vertices), f.vertices, [g.edge_index[e] for e in f.edges]))
    return out


PLAN_KWARGS = [{}, {"max_vertices": 0}, {"fix_vertex": 0, "forbid_incident": True},
               {"min_vertices": 2}, {"fix_vertex": 1, "min_vertices": 2}]


@pytest.mark.parametrize("g", [petersen_graph(), complete_graph(5), cycle_graph(6), AQ3],
                         ids=["petersen", "k5", "c6", "aq3"])
@pytest.mark.parametrize("kw", PLAN_KWARGS, ids=lambda kw: ",".join(kw) or "none")
def test_stream_matches_brute_force(g, kw):
    for k in range(5):
        plan = EnumerationPlan(g, k, chunk_size=7, **kw)
        expected = brute_stream(g, k, kw.get("fix_vertex"), kw.get("min_vertices", 0),
                                kw.get("max_vertices"), kw.get("forbid_incident", False))
        got = list(enumerate_fault_sets(plan))
        assert got == expected
        assert plan.total == len(expected)
        for i, f in enumerate(got):
            assert plan.fault_set_at(i) == f
            assert plan.index_of(f) == i
        assert [f for c in range(plan.nchunks) for f in iter_chunk(plan, c)] == got


def test_k4_size3_count():
    assert EnumerationPlan(complete_graph(4), 3).total == 120 == math.comb(10, 3)


def test_index_of_rejects_excluded_sets():
    plan = EnumerationPlan(AQ3, 3, fix_vertex=0, forbid_incident=True)
    assert plan.index_of(FaultSet((1, 2), ((3, 4),))) is None
    assert plan.index_of(FaultSet((0,), ((0, 1), (5, 6)))) is None
    assert plan.index_of(FaultSet((0,), ((5, 6),))) is None


def edges_avoiding(g, vs):
    return sum(1 for u, v in g.edges if u not in vs and v not in vs)


def test_base_case_count_matches_closed_form_per_vertex_choice():
    plan = EnumerationPlan(AQ4, 7, fix_vertex=0, min_vertices=1, forbid_incident=True)
    bl = plan.blocks
    sizes = {int(m): int(bl.offset[i + 1] - bl.offset[i])
             for i, m in enumerate(bl.vmask.view(np.uint64))}
    total = 0
    for j in range(1, 8):
        for rest in itertools.combinations(range(1, 16), j - 1):
            vs = {0, *rest}
            count = math.comb(edges_avoiding(AQ4, vs), 7 - j)
            mask = sum(1 << v for v in vs)
            assert sizes.get(mask, 0) == count
            total += count
    assert total == plan.total == 36_538_174
    # walk a few vertex choices through the public stream
    rng = random.Random(0)
    for b in rng.sample(range(len(bl.nv)), 5):
        lo, hi = int(bl.offset[b]), int(bl.offset[b + 1])
        sets = list(enumerate_fault_sets(plan, start=lo, stop=hi))
        assert len(sets) == hi - lo
        assert len({f.vertices for f in sets}) == 1
        assert all(f.size == 7 and 0 in f.vertices for f in sets)


def test_resume_continues_identically():
    plan = EnumerationPlan(petersen_graph(), 3, chunk_size=50)
    full = list(enumerate_fault_sets(plan))
    for c in (0, 3, plan.nchunks - 2):
        rest = list(enumerate_fault_sets(plan, Checkpoint(plan.plan_hash, c)))
        assert rest == full[(c + 1) * 50:]
    assert list(enumerate_fault_sets(plan, {"plan_hash": plan.plan_hash, "chunk_index": plan.nchunks - 1})) == []


def test_bad_checkpoints():
    plan = EnumerationPlan(petersen_graph(), 3, chunk_size=50)
    other = EnumerationPlan(petersen_graph(), 3, chunk_size=51)
    assert plan.plan_hash != other.plan_hash
    with pytest.raises(ValueError, match="different plan"):
        next(enumerate_fault_sets(plan, Checkpoint(other.plan_hash, 0)))
    with pytest.raises(ValueError, match="outside"):
        next(enumerate_fault_sets(plan, Checkpoint(plan.plan_hash, plan.nchunks + 4)))


def test_plan_validation():
    with pytest.raises(ValueError):
        EnumerationPlan(AQ3, 3, fix_vertex=8)
    with pytest.raises(ValueError):
        EnumerationPlan(AQ3, 3, fix_vertex=0, max_vertices=0)
    with pytest.raises(ValueError):
        EnumerationPlan(AQ3, -1)
    with pytest.raises(ValueError, match="budget"):
        EnumerationPlan(complete_graph(20), 10).check_budget()


def test_classification_examples():
    for v in (0, 7, 12):
        c = classify_fault_set(AQ4, FaultSet(edges=AQ4.incident_edges(v)), "fsmp")
        assert c == Classification(True, True, True)
    k5 = classify_fault_set(complete_graph(5), FaultSet((0, 1), ((2, 3),)), "fsmp")
    assert k5.preclusive and not k5.basic and not k5.trivial
    rng = random.Random(1)
    elems = [("v", v) for v in AQ4.vertices] + [("e", e) for e in AQ4.edges]
    for _ in range(500):
        pick = rng.sample(elems, 6)
        f = FaultSet(tuple(x for t, x in pick if t == "v"), tuple(x for t, x in pick if t == "e"))
        assert not classify_fault_set(AQ4, f, "fsmp").preclusive


def test_edge_only_modes_reject_vertices():
    for mode in ("mp", "fmp"):
        with pytest.raises(ValueError, match="edge faults"):
            classify_fault_set(AQ3, FaultSet((0,)), mode)
        with pytest.raises(ValueError):
            plan_for_mode(AQ3, mode, 3, fix_vertex=0)
    with pytest.raises(ValueError):
        classify_fault_set(AQ3, FaultSet(), "xmp")


@given(small_graphs(max_n=8), st.data())
def test_trivial_implies_basic(g, data):
    elems = [("v", v) for v in g.vertices] + [("e", e) for e in g.edges]
    pick = data.draw(st.lists(st.sampled_from(elems), unique=True)) if elems else []
    f = FaultSet(tuple(x for t, x in pick if t == "v"), tuple(x for t, x in pick if t == "e"))
    for mode in ("smp", "fsmp"):
        c = classify_fault_set(g, f, mode)
        assert not c.trivial or c.basic


@pytest.mark.parametrize("g, mode, k", [
    (complete_graph(6), "fsmp", 4), (complete_graph(5), "smp", 4), (cycle_graph(4), "fsmp", 1),
])
def test_number_examples(g, mode, k):
    assert preclusion_number(g, mode)[0] == k


def brute_number(g, mode):
    elems = [("e", e) for e in g.edges]
    if mode in ("smp", "fsmp"):
        elems = [("v", v) for v in g.vertices] + elems
    for k in range(len(elems) + 1):
        hits = []
        for c in itertools.combinations(elems, k):
            f = FaultSet(tuple(x for t, x in c if t == "v"), tuple(x for t, x in c if t == "e"))
            if classify_fault_set(g, f, mode).preclusive:
                hits.append(f)
        if hits:
            return k, hits
    return None, []


def test_c4_fsmp_witness_is_first():
    k, f = preclusion_number(cycle_graph(4), "fsmp")
    assert (k, f) == (1, FaultSet((0,)))
    assert brute_number(cycle_graph(4), "fsmp")[0] == 1


@given(st.integers(0, 10**6), st.sampled_from(MODES))
def test_number_matches_brute_force(seed, mode):
    rng = random.Random(seed)
    g = random_graph(rng, rng.randint(2, 6), rng.uniform(0.3, 1.0))
    k, hits = brute_number(g, mode)
    if k is None:
        with pytest.raises(ValueError):
            preclusion_number(g, mode)
        return
    got_k, witness = preclusion_number(g, mode)
    plan = plan_for_mode(g, mode, k)
    assert got_k == k
    assert witness in hits
    assert plan.index_of(witness) == min(plan.index_of(h) for h in hits)


def _prism():
    return graph_from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (0, 3), (1, 4), (2, 5)])


CORPUS = {"k4": complete_graph(4), "k6": complete_graph(6), "c4": cycle_graph(4),
          "c6": cycle_graph(6), "q3": build_hypercube(3), "aq3": AQ3,
          "petersen": petersen_graph(), "prism": _prism()}


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_chain_inequalities(name):
    g = CORPUS[name]
    assert g.order % 2 == 0
    num = {mode: preclusion_number(g, mode)[0] for mode in MODES}
    delta = g.min_degree()
    assert num["smp"] <= num["mp"] <= delta
    assert num["mp"] <= num["fmp"]
    assert num["fsmp"] <= num["fmp"] <= delta
    if num["mp"] == delta:
        assert num["fmp"] == delta


@given(small_graphs(min_n=2, max_n=8), st.data(), st.sampled_from(MODES))
def test_edge_superset_monotonicity(g, data, mode):
    elems = [("e", e) for e in g.edges]
    if mode in ("smp", "fsmp"):
        elems += [("v", v) for v in g.vertices]
    pick = data.draw(st.lists(st.sampled_from(elems), unique=True)) if elems else []
    f = FaultSet(tuple(x for t, x in pick if t == "v"), tuple(x for t, x in pick if t == "e"))
    vs = set(f.vertices)
    free = [e for e in g.edges if e not in f.edges and e[0] not in vs and e[1] not in vs]
    extra = data.draw(st.lists(st.sampled_from(free), unique=True)) if free else []
    f2 = FaultSet(f.vertices, f.edges + tuple(extra))
    if classify_fault_set(g, f, mode).preclusive:
        assert classify_fault_set(g, f2, mode).preclusive


def test_vertex_supersets_can_lose_preclusion():
    from fracpreclusion.graph import path_graph, star_graph

    k13 = star_graph(3)
    assert classify_fault_set(k13, FaultSet(), "smp").preclusive
    assert not classify_fault_set(k13, FaultSet((1,)), "smp").preclusive
    p3 = path_graph(3)
    assert classify_fault_set(p3, FaultSet(), "fsmp").preclusive
    assert not classify_fault_set(p3, FaultSet((0,)), "fsmp").preclusive


def test_stream_flags_match_reference_classification():
    for g, mode, k, kw in [(AQ3, "fsmp", 3, {}), (AQ3, "smp", 4, {"min_vertices": 1}),
                           (petersen_graph(), "mp", 3, {}), (complete_graph(6), "fmp", 5, {})]:
        plan = plan_for_mode(g, mode, k, chunk_size=13, **kw)
        flags = run_chunks(plan, mode, 0, plan.nchunks)
        assert flags.size == plan.total
        assert np.array_equal(flags, stream_flags(plan, mode, 0, plan.total))
        for i, f in enumerate(enumerate_fault_sets(plan)):
            c = classify_fault_set(g, f, mode)
            assert Classification.from_flag(int(flags[i])) == c
            assert bool(flags[i] & 8) == c.is_violation(mode)


def test_verify_k5_finds_nonbasic_sets(tmp_path):
    k5 = complete_graph(5)
    certs = tmp_path / "c.jsonl"
    rep = verify_super(k5, "fsmp", 3, certs_path=certs)
    assert rep.complete and rep.violations > 0
    stored = read_certificates(certs)
    assert stored == rep.certificates
    assert FaultSet((0, 1), ((2, 3),)) in {c.faults for c in stored}
    for c in stored:
        assert c.classification.preclusive and not c.classification.basic
        assert replay_certificate(c, k5)
    expected = [f for f in brute_stream(k5, 3) if classify_fault_set(k5, f, "fsmp").is_violation("fsmp")]
    assert [c.faults for c in stored] == expected


def test_verify_aq3_mp_all_optimal_trivial():
    rep = verify_super(AQ3, "mp", 5, spec=family_spec("augmented_cube", 3))
    assert rep.counts["total"] == math.comb(20, 5)
    assert rep.counts["preclusive"] == rep.counts["trivial"] > 0
    assert rep.violations == 0


def test_verify_defaults_to_min_degree():
    rep = verify_super(complete_graph(4), "fsmp")
    assert rep.plan.k == 3


def test_verify_resume_is_identical(tmp_path):
    g = build_family(family_spec("augmented_cube", 3))
    kw = dict(mode="smp", k=4, chunk_size=97)
    full = verify_super(g, **kw, certs_path=tmp_path / "a.jsonl")
    full.write(tmp_path / "a.json")
    ck, certs = tmp_path / "b.ck", tmp_path / "b.jsonl"
    part = verify_super(g, **kw, checkpoint_path=ck, certs_path=certs, stop_after_chunks=9)
    assert not part.complete
    # simulate a crash after the checkpoint: a stray certificate line must be discarded
    with open(certs, "a") as fh:
        fh.write('{"partial": true}\n')
    rest = verify_super(g, **kw, checkpoint_path=ck, certs_path=certs, resume=True)
    assert rest.complete
    rest.write(tmp_path / "b.json")
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    assert (tmp_path / "a.jsonl").read_bytes() == certs.read_bytes()
    assert full.violations > 0
    assert json.loads((tmp_path / "b.json.meta.json").read_text())["elapsed_seconds"] >= 0


def test_resume_rejects_foreign_checkpoint(tmp_path):
    ck = tmp_path / "ck.json"
    Checkpoint("0" * 64, 0).save(ck)
    with pytest.raises(ValueError, match="different plan"):
        verify_super(AQ3, "fsmp", 3, checkpoint_path=ck, resume=True)


def test_certificate_replay_from_family_spec():
    spec = family_spec("gaq", 5, seed=2)
    g = build_family(spec)
    f = FaultSet(edges=g.incident_edges(3))
    cert = Certificate({"family": spec.to_json()}, "fsmp", f, classify_fault_set(g, f, "fsmp"))
    assert replay_certificate(Certificate.from_json(json.loads(cert.dumps())))
    wrong = Certificate(cert.spec, "fsmp", f, Classification(False, True, True))
    assert not replay_certificate(wrong)
    hashed = Certificate({"graph_sha256": AQ3.sha256()}, "fsmp", FaultSet(), Classification(False, False, False))
    assert replay_certificate(hashed, AQ3)
    with pytest.raises(ValueError):
        replay_certificate(hashed, AQ4)
    with pytest.raises(ValueError):
        replay_certificate(hashed)


def test_matching_witness():
    w = matching_witness(AQ3, FaultSet((0,), ((1, 2),)), "fsmp")
    assert w is not None and w["denominator"] == 2
    assert matching_witness(AQ3, FaultSet(edges=AQ3.incident_edges(0)), "fsmp") is None
    m = matching_witness(AQ3, FaultSet((0,)), "smp")
    assert len(m["edges"]) == 3


def test_sampling_is_deterministic_and_constrained():
    a = sampled_check(AQ4, 7, 2000, 9, "fsmp", fix_vertex=0, min_vertices=1, forbid_incident=True)
    b = sampled_check(AQ4, 7, 2000, 9, "fsmp", fix_vertex=0, min_vertices=1, forbid_incident=True)
    assert np.array_equal(a.vmasks, b.vmasks) and np.array_equal(a.edge_sets, b.edge_sets)
    assert np.array_equal(a.flags, b.flags)
    for i in range(a.samples):
        f = a.fault_set(i)
        assert f.size == 7 and 0 in f.vertices
        assert not any(u in f.vertices or v in f.vertices for u, v in f.edges)


def test_sampling_agrees_with_stream():
    plan = plan_for_mode(AQ4, "fsmp", 7, fix_vertex=0, min_vertices=1, forbid_incident=True)
    rep = sampled_check(AQ4, 7, 500, 3, "fsmp", fix_vertex=0, min_vertices=1, forbid_incident=True)
    for i in range(rep.samples):
        idx = plan.index_of(rep.fault_set(i))
        assert idx is not None
        assert stream_flags(plan, "fsmp", idx, idx + 1)[0] == rep.flags[i]


def test_local_sampling_hits_preclusive_sets():
    rep = sampled_check(AQ4, 7, 3000, 1, "fsmp", strategy="local")
    assert rep.preclusive > 0 and rep.basic == rep.preclusive
    for i in np.flatnonzero(rep.flags & 1)[:20]:
        f = rep.fault_set(int(i))
        assert rep.classification(int(i)) == classify_fault_set(AQ4, f, "fsmp")
    with pytest.raises(ValueError):
        sampled_check(AQ4, 7, 10, 1, "fsmp", strategy="local", fix_vertex=0)
    with pytest.raises(ValueError):
        sampled_check(AQ4, 7, 10, 1, "fsmp", strategy="bogus")


def test_uniform_sampling_is_uniform():
    g = complete_graph(4)
    plan = EnumerationPlan(g, 2)
    n = 300 * plan.total
    rep = sampled_check(g, 2, n, 5, "smp")
    counts = Counter(plan.index_of(rep.fault_set(i)) for i in range(rep.samples))
    assert set(counts) == set(range(plan.total))
    expected = n / plan.total
    chi2 = sum((c - expected) ** 2 / expected for c in counts.values())
    # 44 degrees of freedom; the 0.999 quantile is about 78
    assert chi2 < 78


def test_sample_report_fields():
    rep = sampled_check(AQ4, 6, 1000, 0, "fsmp")
    assert rep.preclusive == 0 and rep.below_degree == []
    hit = sampled_check(AQ4, 7, 1000, 0, "fsmp", strategy="local")
    assert hit.nonbasic_at_degree == []
    assert hit.to_json()["samples"] == 1000
    assert len(hit.certificates()) == hit.preclusive


def test_sample_edge_only_mode():
    rep = sampled_check(AQ4, 7, 1000, 0, "fmp")
    assert all(not rep.fault_set(i).vertices for i in range(rep.samples))

import json
import subprocess
import sys

import pytest

from fracpreclusion.cli import run_cli
from fracpreclusion.families import FamilySpec, build_family
from fracpreclusion.graph import complete_graph, load_graph, save_graph, star_graph
from fracpreclusion.preclusion import read_certificates, replay_certificate


def cli(*args):
    return run_cli([str(a) for a in args])


def test_build_aq4(tmp_cwd):
    out = cli("build", "--family", "aq", "--dim", 4, "--out", "aq4.edges")
    assert out.exit_code == 0
    g = load_graph("aq4.edges")
    assert (g.n, g.m) == (16, 56) and g.is_regular(7)
    spec = FamilySpec.from_json(json.loads((tmp_cwd / "aq4.edges.spec.json").read_text()))
    assert build_family(spec) == g


def test_build_random_family_is_reproducible(tmp_cwd):
    for name in ("a", "b"):
        assert cli("build", "--family", "rgaq", "--dim", 5, "--seed", 7, "--out", f"{name}.edges").exit_code == 0
    assert (tmp_cwd / "a.edges").read_bytes() == (tmp_cwd / "b.edges").read_bytes()
    assert (tmp_cwd / "a.edges.spec.json").read_bytes() == (tmp_cwd / "b.edges.spec.json").read_bytes()


def test_number_k6(tmp_cwd, capsys):
    save_graph(complete_graph(6), "k6.edges")
    out = cli("number", "--graph", "k6.edges", "--mode", "fsmp")
    assert out.exit_code == 0
    assert capsys.readouterr().out.splitlines()[0] == "4"


def test_verify_aq3_exit_zero(tmp_cwd):
    cli("build", "--family", "aq", "--dim", 3, "--out", "aq3.edges")
    out = cli("verify", "--graph", "aq3.edges", "--mode", "mp", "--size", 5, "--threads", 2,
              "--report", "r.json", "--certs", "c.jsonl")
    assert out.exit_code == 0
    rep = json.loads((tmp_cwd / "r.json").read_text())
    assert rep["violations"] == 0 and rep["complete"]
    assert "elapsed_seconds" not in rep
    assert "elapsed_seconds" in json.loads((tmp_cwd / "r.json.meta.json").read_text())
    assert (tmp_cwd / "c.jsonl").read_text() == ""


def test_verify_violation_exit_one(tmp_cwd):
    save_graph(complete_graph(5), "k5.edges")
    out = cli("verify", "--graph", "k5.edges", "--mode", "fsmp", "--size", 3, "--certs", "c.jsonl")
    assert out.exit_code == 1
    certs = read_certificates("c.jsonl")
    assert certs and all(replay_certificate(c, complete_graph(5)) for c in certs)


def test_verify_prints_certificates_without_file(tmp_cwd, capsys):
    save_graph(complete_graph(5), "k5.edges")
    assert cli("verify", "--graph", "k5.edges", "--mode", "fsmp", "--size", 3).exit_code == 1
    lines = capsys.readouterr().out.splitlines()
    assert json.loads(lines[1])["preclusive"] is True


def test_verify_resume_matches(tmp_cwd):
    cli("build", "--family", "aq", "--dim", 4, "--out", "aq4.edges")
    base = ["verify", "--graph", "aq4.edges", "--mode", "fmp", "--size", 4]
    assert cli(*base, "--report", "full.json").exit_code == 0
    part = cli(*base, "--checkpoint", "ck.json", "--max-chunks", 1, "--report", "part.json")
    assert part.exit_code == 0 and not (tmp_cwd / "part.json").exists()
    assert cli(*base, "--checkpoint", "ck.json", "--resume", "--report", "part.json").exit_code == 0
    assert (tmp_cwd / "full.json").read_bytes() == (tmp_cwd / "part.json").read_bytes()


def test_fpm_oracle_lemmas(tmp_cwd, capsys):
    save_graph(star_graph(3), "star.edges")
    cli("build", "--family", "aq", "--dim", 4, "--out", "aq4.edges")
    capsys.readouterr()
    assert cli("fpm", "--graph", "star.edges").exit_code == 0
    assert capsys.readouterr().out.strip() == "fractional perfect matching: no"
    assert cli("fpm", "--graph", "aq4.edges", "--witness").exit_code == 0
    w = json.loads(capsys.readouterr().out.splitlines()[1])
    assert w["denominator"] == 2
    cli("oracle", "--graph", "star.edges", "--method", "scheinerman")
    assert "fails at S = [0]" in capsys.readouterr().out
    cli("oracle", "--graph", "aq4.edges", "--method", "tutte")
    assert "holds" in capsys.readouterr().out
    assert cli("lemmas", "--graph", "aq4.edges", "--gap", 2, "--report", "l.json").exit_code == 0
    assert json.loads((tmp_cwd / "l.json").read_text())["ok"]
    save_graph(complete_graph(4), "k4.edges")
    assert cli("lemmas", "--graph", "k4.edges", "--gap", 1).exit_code == 1


def test_sample_deterministic(tmp_cwd):
    cli("build", "--family", "aq", "--dim", 4, "--out", "aq4.edges")
    for name in ("a", "b"):
        out = cli("sample", "--graph", "aq4.edges", "--mode", "fsmp", "--size", 7, "--samples", 2000,
                  "--seed", 5, "--strategy", "local", "--report", f"{name}.json", "--certs", f"{name}.jsonl")
        assert out.exit_code == 0
    assert (tmp_cwd / "a.json").read_bytes() == (tmp_cwd / "b.json").read_bytes()
    assert (tmp_cwd / "a.jsonl").read_bytes() == (tmp_cwd / "b.jsonl").read_bytes()
    assert read_certificates("a.jsonl")


@pytest.mark.parametrize("args", [
    [],
    ["number", "--graph", "x.edges"],
    ["number", "--graph", "missing.edges", "--mode", "fsmp"],
    ["number", "--graph", "k4.edges", "--mode", "xsmp"],
    ["sample", "--graph", "k4.edges", "--mode", "fsmp", "--size", 2, "--samples", 10],
    ["build", "--family", "gaq", "--dim", 5, "--out", "g.edges"],
    ["build", "--family", "aq", "--dim", 9, "--out", "g.edges"],
    ["verify", "--graph", "k4.edges", "--mode", "fmp", "--fix-vertex", 0],
    ["verify", "--graph", "k4.edges", "--mode", "fsmp", "--resume"],
    ["verify", "--graph", "k4.edges", "--mode", "fsmp", "--size", -1],
    ["lemmas", "--graph", "k4.edges", "--gap", 3],
])
def test_usage_errors(tmp_cwd, args):
    save_graph(complete_graph(4), "k4.edges")
    assert cli(*args).exit_code == 2


def test_mismatched_spec_file(tmp_cwd):
    cli("build", "--family", "aq", "--dim", 3, "--out", "g.edges")
    save_graph(complete_graph(8), "g.edges")
    assert cli("fpm", "--graph", "g.edges").exit_code == 2


def test_module_entry_point(tmp_cwd):
    save_graph(complete_graph(5), "k5.edges")
    res = subprocess.run([sys.executable, "-m", "fracpreclusion", "number", "--graph", "k5.edges",
                          "--mode", "smp"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip() == "4"
    res = subprocess.run([sys.executable, "-m", "fracpreclusion", "bogus"], capture_output=True, text=True)
    assert res.returncode == 2 and "invalid choice" in res.stderr

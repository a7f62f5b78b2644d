"""Command-line entry point: ``fracpreclusion <subcommand> ...``.

Exit codes: 0 when the command succeeded and the checked property holds,
1 when violations were found (their certificates are written), 2 on usage
or input errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .families import (
    FamilySpec,
    build_family,
    check_neighborhood_lemmas,
    family_invariant_problems,
    family_spec,
)
from .graph import Graph, load_graph, save_graph
from .matching import fractional_pm_witness, scheinerman_violation, tutte_violation
from .preclusion import MODES, preclusion_number, sampled_check, verify_super

FAMILY_ALIASES = {"hypercube": "hypercube", "aq": "augmented_cube",
                  "augmented_cube": "augmented_cube", "gaq": "gaq", "rgaq": "rgaq"}

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class CommandOutcome:
    exit_code: int
    summary: list[str] = field(default_factory=list)
    report_path: str | None = None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def spec_path(graph_path) -> Path:
    return Path(f"{graph_path}.spec.json")


def _load(path: str) -> tuple[Graph, FamilySpec | None]:
    """Read a graph file and the family spec written next to it by ``build``, if any."""
    g = load_graph(path)
    sp = spec_path(path)
    if not sp.exists():
        return g, None
    spec = FamilySpec.from_json(json.loads(sp.read_text()))
    if build_family(spec) != g:
        raise UsageError(f"{sp} does not describe the graph in {path}")
    return g, spec


def _stderr_progress(done: int, total: int) -> None:
    print(f"{done}/{total} cases ({100 * done / max(total, 1):.1f}%)", file=sys.stderr, flush=True)


def cmd_build(a) -> CommandOutcome:
    kind = FAMILY_ALIASES[a.family]
    if kind in ("gaq", "rgaq") and a.seed is None:
        raise UsageError(f"--seed is required for --family {a.family}")
    spec = family_spec(kind, a.dim, a.seed)
    g = build_family(spec)
    problems = family_invariant_problems(g, a.dim) if kind != "hypercube" else []
    save_graph(g, a.out)
    spec_path(a.out).write_text(json.dumps(spec.to_json(), sort_keys=True, indent=2) + "\n")
    lines = [f"wrote {a.out}: {g.n} vertices, {g.m} edges"]
    lines.extend(f"invariant failure: {p}" for p in problems)
    return CommandOutcome(EXIT_VIOLATION if problems else EXIT_OK, lines, a.out)


def cmd_fpm(a) -> CommandOutcome:
    g, _ = _load(a.graph)
    w = fractional_pm_witness(g)
    lines = ["fractional perfect matching: " + ("yes" if w is not None else "no")]
    if w is not None and a.witness:
        lines.append(json.dumps(w.to_json(), sort_keys=True))
    return CommandOutcome(EXIT_OK, lines)


def cmd_oracle(a) -> CommandOutcome:
    g, _ = _load(a.graph)
    s = scheinerman_violation(g) if a.method == "scheinerman" else tutte_violation(g)
    if s is None:
        return CommandOutcome(EXIT_OK, [f"{a.method} condition holds"])
    return CommandOutcome(EXIT_OK, [f"{a.method} condition fails at S = {sorted(s)}"])


def cmd_lemmas(a) -> CommandOutcome:
    g, _ = _load(a.graph)
    rep = check_neighborhood_lemmas(g, a.gap)
    lines = [f"gap {a.gap}: {len(rep.adjacent)} adjacent and {len(rep.nonadjacent)} "
             f"non-adjacent pairs below the bound"]
    lines.extend(f"  adjacent {x} {y}: {s}" for x, y, s in rep.adjacent[:20])
    lines.extend(f"  non-adjacent {x} {y}: {s}" for x, y, s in rep.nonadjacent[:20])
    if a.report:
        Path(a.report).write_text(json.dumps(rep.to_json(), sort_keys=True, indent=2) + "\n")
    return CommandOutcome(EXIT_OK if rep.ok else EXIT_VIOLATION, lines, a.report)


def cmd_number(a) -> CommandOutcome:
    g, _ = _load(a.graph)
    k, witness = preclusion_number(g, a.mode, threads=a.threads)
    lines = [str(k)]
    if a.witness:
        lines.append(json.dumps(witness.to_json(), sort_keys=True))
    return CommandOutcome(EXIT_OK, lines)


def _write_certs(certs, path) -> list[str]:
    """Certificates go to ``path`` if given, else to standard output."""
    text = [c.dumps() for c in certs]
    if path:
        Path(path).write_text("".join(t + "\n" for t in text))
        return []
    return text


def cmd_verify(a) -> CommandOutcome:
    g, spec = _load(a.graph)
    if a.resume and not a.checkpoint:
        raise UsageError("--resume needs --checkpoint")
    rep = verify_super(
        g, a.mode, a.size, fix_vertex=a.fix_vertex, min_vertices=a.min_vertices,
        forbid_incident=a.no_incident, spec=spec, threads=a.threads,
        checkpoint_path=a.checkpoint, certs_path=a.certs, resume=a.resume,
        stop_after_chunks=a.max_chunks, progress=_stderr_progress,
        progress_every=a.progress_every,
    )
    c = rep.counts
    lines = [f"{'complete' if rep.complete else 'partial'}: {c['total']} of {rep.plan.total} cases, "
             f"{c['preclusive']} preclusive ({c['basic']} basic, {c['trivial']} trivial), "
             f"{c['violations']} violations"]
    if not rep.complete:
        return CommandOutcome(EXIT_OK, lines)
    if a.report:
        rep.write(a.report)
    if rep.violations and not a.certs:
        lines.extend(cert.dumps() for cert in rep.certificates)
    return CommandOutcome(EXIT_VIOLATION if rep.violations else EXIT_OK, lines, a.report)


def cmd_sample(a) -> CommandOutcome:
    g, spec = _load(a.graph)
    rep = sampled_check(
        g, a.size, a.samples, a.seed, a.mode, fix_vertex=a.fix_vertex,
        min_vertices=a.min_vertices, forbid_incident=a.no_incident,
        strategy=a.strategy, threads=a.threads, spec=spec,
    )
    bad = len(rep.below_degree) + len(rep.nonbasic_at_degree)
    lines = [f"{rep.samples} samples of size {a.size}: {rep.preclusive} preclusive "
             f"({rep.basic} basic); {len(rep.below_degree)} below minimum degree, "
             f"{len(rep.nonbasic_at_degree)} violating at minimum degree"]
    lines.extend(_write_certs(rep.certificates(), a.certs))
    if a.report:
        Path(a.report).write_text(json.dumps(rep.to_json(), sort_keys=True, indent=2) + "\n")
    return CommandOutcome(EXIT_VIOLATION if bad else EXIT_OK, lines, a.report)


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fracpreclusion", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("build", help="write a family member as an edge-list file plus its spec JSON")
    b.add_argument("--family", required=True, choices=sorted(FAMILY_ALIASES))
    b.add_argument("--dim", required=True, type=_positive)
    b.add_argument("--seed", type=_nonneg, help="required for gaq and rgaq")
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_build)

    f = sub.add_parser("fpm", help="decide whether a fractional perfect matching exists")
    f.add_argument("--graph", required=True)
    f.add_argument("--witness", action="store_true", help="print a half-integral witness")
    f.set_defaults(func=cmd_fpm)

    o = sub.add_parser("oracle", help="brute-force subset condition check")
    o.add_argument("--graph", required=True)
    o.add_argument("--method", required=True, choices=["scheinerman", "tutte"])
    o.set_defaults(func=cmd_oracle)

    le = sub.add_parser("lemmas", help="check private-neighborhood sizes")
    le.add_argument("--graph", required=True)
    le.add_argument("--gap", required=True, type=int, choices=[1, 2])
    le.add_argument("--report")
    le.set_defaults(func=cmd_lemmas)

    n = sub.add_parser("number", help="compute a preclusion number by exhaustive search")
    n.add_argument("--graph", required=True)
    n.add_argument("--mode", required=True, choices=MODES)
    n.add_argument("--threads", type=_positive, default=1)
    n.add_argument("--witness", action="store_true", help="also print the first optimal fault set")
    n.set_defaults(func=cmd_number)

    def plan_flags(sp):
        sp.add_argument("--graph", required=True)
        sp.add_argument("--mode", required=True, choices=MODES)
        sp.add_argument("--fix-vertex", type=_nonneg)
        sp.add_argument("--min-vertices", type=_nonneg, default=0)
        sp.add_argument("--no-incident", action="store_true",
                        help="skip fault sets with an edge touching a fault vertex")
        sp.add_argument("--threads", type=_positive, default=1)
        sp.add_argument("--certs", help="JSON-lines certificate file")
        sp.add_argument("--report", help="JSON summary file")

    v = sub.add_parser("verify", help="exhaustively check that every optimal fault set is basic/trivial")
    plan_flags(v)
    v.add_argument("--size", type=_nonneg, help="fault-set size (default: minimum degree)")
    v.add_argument("--checkpoint")
    v.add_argument("--resume", action="store_true")
    v.add_argument("--progress-every", type=_positive, default=10**6)
    v.add_argument("--max-chunks", type=_positive, help="stop after this many chunks (resume later)")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("sample", help="classify uniformly sampled fault sets")
    plan_flags(s)
    s.add_argument("--size", required=True, type=_nonneg)
    s.add_argument("--samples", required=True, type=_positive)
    s.add_argument("--seed", required=True, type=_nonneg)
    s.add_argument("--strategy", choices=["uniform", "local"], default="uniform")
    s.set_defaults(func=cmd_sample)
    return p


def run_cli(argv: list[str] | None = None, echo: bool = True) -> CommandOutcome:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        out = CommandOutcome(EXIT_USAGE, [str(exc)])
        print(parser.format_usage().rstrip(), file=sys.stderr)
        print(exc, file=sys.stderr)
        return out
    except SystemExit as exc:  # --help
        return CommandOutcome(int(exc.code or 0))
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        outcome = args.func(args)
    except (UsageError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return CommandOutcome(EXIT_USAGE, [f"error: {exc}"])
    if echo:
        for line in outcome.summary:
            print(line)
    return outcome


def main(argv: list[str] | None = None) -> int:
    return run_cli(argv).exit_code

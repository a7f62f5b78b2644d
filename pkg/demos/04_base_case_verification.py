"""Exhaustive 7-fault check on AQ_4 with checkpointing.

The slice fixes vertex 0 as a fault (AQ_4 is vertex-transitive), needs at
least one fault vertex, and skips fault edges touching fault vertices.
Takes roughly ten seconds per core-equivalent.
"""
import sys
import tempfile
from pathlib import Path

from fracpreclusion.families import build_augmented_cube, family_spec
from fracpreclusion.preclusion import verify_super

g = build_augmented_cube(4)
spec = family_spec("augmented_cube", 4)
work = Path(tempfile.mkdtemp())
kw = dict(fix_vertex=0, min_vertices=1, forbid_incident=True, spec=spec,
          checkpoint_path=work / "ck.json", certs_path=work / "certs.jsonl")

# run the first 100 chunks, then pick up where the checkpoint left off
part = verify_super(g, "fsmp", 7, stop_after_chunks=100, **kw)
print("after interruption:", part.counts, "complete:", part.complete)
rep = verify_super(g, "fsmp", 7, resume=True,
                   progress=lambda done, total: print(f"  {done}/{total}", file=sys.stderr), **kw)
rep.write(work / "report.json")
print((work / "report.json").read_text())
print("non-basic preclusive sets:", rep.violations)

"""
The command-line pipeline
=========================

Every capability is reachable from ``diffmap``. This script drives the same
entry point in-process and lists what each subcommand writes.
"""

import json
import tempfile
from pathlib import Path

from diffmap import DatasetSpec
from diffmap.cli import main

work = Path(tempfile.mkdtemp(prefix="diffmap-demo-"))
spec = DatasetSpec.gaussians([((-1, 0), 0.25, 200), ((1, 0), 0.25, 200)], seed=0)
(work / "spec.json").write_text(spec.to_json())

steps = [
    ["generate", str(work / "spec.json"), str(work / "blobs.csv")],
    ["embed", str(work / "blobs.csv"), str(work / "blobs"), "--k", "2", "--t", "1"],
    ["cluster", str(work / "blobs.csv"), str(work / "blobs"), "--k", "auto", "--seed", "0"],
    ["validate-fp", str(work / "uniform"), "--potential", "const", "--grid", "0,1,400"],
    ["exit-time", str(work / "well"), "--potential", "double_well:1,1", "--trials", "300"],
]
for argv in steps:
    print("diffmap", " ".join(argv), "->", main(argv))

gap = json.loads((work / "blobs_gap.json").read_text())
print(f"chosen k = {gap['k']}, accuracy {gap['accuracy']:.3f}")
exit_report = json.loads((work / "well_exit.json").read_text())
print(f"tau |mu_1| = {exit_report['tau_times_mu1']:.3f}")
print("files:", sorted(p.name for p in work.iterdir()))

#!/usr/bin/env python3
"""Run the full fixture check suite through the CLI and write one canonical
JSON report per command into an output directory.

Usage: python3 scripts/run_fixture_suite.py OUTDIR [--workspace PATH]

Exit status is the worst exit code over all commands (0 hold, 1 some verdict
fails, 2 some verdict unknown-within-bound).  Failing verdicts are expected
for the deliberately negative fixtures; the point of the suite is that the
reports, not the verdicts, are bit-reproducible.
"""
from __future__ import annotations

import argparse
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from qvbench.cli import emit_report, load_workspace, run

SUITE = [
    ("membership-chain3", "membership", {"algebra": "Chain3", "in": "DL"}),
    ("cg-chain3-total", "cg", {"algebra": "Chain3", "in": "DL", "pairs": "(0,2)"}),
    ("cg-chain3-upper", "cg", {"algebra": "Chain3", "in": "DL", "pairs": "(1,2)"}),
    ("free-dl-2", "free", {"in": "DL", "generators": "x,y"}),
    ("free-bool-2", "free", {"in": "BOOL", "generators": "x,y"}),
    ("expand-diamond", "expand", {"algebra": "Diamond", "expansion": "DLcompl"}),
    ("expand-chain3", "expand", {"algebra": "Chain3", "expansion": "DLcompl"}),
    ("reflect-chain3", "reflect", {"algebra": "Chain3", "expansion": "DLtoBOOL"}),
    ("reflect-diamond-msl", "reflect", {"algebra": "DiamondMS", "expansion": "MSLtoDL"}),
    ("unit-dl-bool", "unit", {"expansion": "DLtoBOOL", "max_size": 4}),
    ("unit-msl-dl", "unit", {"expansion": "MSLtoDL", "max_size": 4}),
    ("counit-dl-bool", "counit", {"expansion": "DLtoBOOL", "max_size": 4}),
    ("counit-msl-dl", "counit", {"expansion": "MSLtoDL", "max_size": 4}),
    ("check-simple-compl", "check-simple", {"expansion": "DLcompl", "max_size": 4}),
    ("check-simple-jc", "check-simple", {"expansion": "DLjc", "max_size": 4}),
    ("check-beth-compl", "check-beth", {"expansion": "DLcompl", "ops": "compl", "max_size": 4}),
    ("check-regular-twoba", "check-regular",
     {"in": "BOOL", "source": "TwoBA", "target": "FourBA", "map": "0:0,1:3", "ext_bound": 4}),
    ("check-extendable-chain3", "check-extendable",
     {"ppop": "compl", "in": "DL", "algebra": "Chain3", "tuple": "(1)", "ext_bound": 4}),
    ("check-unique-witnesses-compl", "check-unique-witnesses",
     {"ppop": "compl", "in": "DL", "max_size": 4}),
    ("check-unique-witnesses-padded", "check-unique-witnesses",
     {"ppop": "complpad", "in": "DL", "max_size": 4}),
    ("term-equiv-not-imp", "term-equiv",
     {"m1": "BOOL", "m2": "BIMPQ", "tau": "notToImp", "rho": "impToNot",
      "in": "DL", "max_size": 4, "transfer": True}),
    ("cross-validate-dl-bool", "cross-validate",
     {"expansion": "DLtoBOOL", "pp_expansion": "DLcompl", "max_size": 4}),
    ("cross-validate-msl-dl", "cross-validate", {"expansion": "MSLtoDL", "max_size": 4}),
    ("cross-validate-trivial", "cross-validate", {"expansion": "DLtriv", "max_size": 4}),
    ("amalgamate-chains", "amalgamate",
     {"in": "DL", "apex": "Chain2", "left": "Chain3", "right": "Chain3",
      "left_map": "0:0,1:2", "right_map": "0:0,1:2", "ext_bound": 4}),
    ("enumerate-dl-4", "enumerate", {"in": "DL", "size": 4}),
    ("enumerate-msl-4", "enumerate", {"in": "MSLQ", "size": 4}),
]


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("outdir")
    ap.add_argument(
        "--workspace",
        default=str(pathlib.Path(__file__).resolve().parent.parent / "workspaces" / "fixtures.qvw"),
    )
    args = ap.parse_args()
    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    worst = 0
    for label, command, flags in SUITE:
        ws = load_workspace(args.workspace)
        report, code = run(command, ws, dict(flags))
        (outdir / f"{label}.json").write_bytes(emit_report(report, "json"))
        print(f"[exit {code}] {label}: {report.summary}")
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())

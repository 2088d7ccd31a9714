#!/usr/bin/env python3
"""Regenerate the golden gamma reports used by the regression tests.

Usage: python scripts/regen_goldens.py
"""

import json
import os
import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from cubeporos.cli import main  # noqa: E402

GOLDEN_DIR = Path(__file__).resolve().parents[1] / "tests" / "golden"


def regen():
    GOLDEN_DIR.mkdir(parents=True, exist_ok=True)
    os.environ["CUBEPOROS_THREADS"] = "1"
    with tempfile.TemporaryDirectory() as tmp:
        set_path = Path(tmp) / "origin.json"
        set_path.write_text(json.dumps({"kind": "points", "points": [["0/1"]]}))
        for seed in (11, 12, 13):
            out = Path(tmp) / f"gamma_seed{seed}.json"
            code = main(["gamma", "--set", str(set_path), "--gamma", "3/2",
                         "--depth", "5", "--seed", str(seed), "--out", str(out)])
            if code != 0:
                raise SystemExit(f"gamma run for seed {seed} exited with {code}")
            target = GOLDEN_DIR / f"gamma_seed{seed}.json"
            target.write_text(out.read_text())
            print(f"wrote {target}")


if __name__ == "__main__":
    regen()

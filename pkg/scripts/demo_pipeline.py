#!/usr/bin/env python3
"""End-to-end demo: score a small bundled corpus with the rule backend,
then produce the correlation matrix, the qualitative report and the
training-pair export under ./demo_out/."""

from __future__ import annotations

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from laser_eval.cli import main  # noqa: E402

DEMO = [
    {"id": "hi-001", "lang": "hi",
     "ref": "vo bhajansangraha ke paas walaa A.T.M. das times sundar hai skool se",
     "hyp": "vaha bhajan sangraha komal paaswala aytiem 10 par taims sundar hain skul se"},
    {"id": "hi-002", "lang": "hi", "ref": "ladki bahut sundar hai", "hyp": "ladkee bahut sundar hai"},
    {"id": "hi-003", "lang": "hi", "ref": "mujhe 1300 rupaye chahiye", "hyp": "mujhe terah sau rupaye chahiye"},
    {"id": "hi-004", "lang": "hi", "ref": "kumar ghar gaya", "hyp": "kamar ghar gaya"},
    {"id": "hi-005", "lang": "hi", "ref": "ek do teen", "hyp": "ek do teen"},
    {"id": "hi-006", "lang": "hi", "ref": "sundar phool hai", "hyp": "bhadda phool hai"},
]


def run() -> None:
    out = Path("demo_out")
    out.mkdir(exist_ok=True)
    corpus = out / "corpus.jsonl"
    corpus.write_text("".join(json.dumps(r, ensure_ascii=False) + "\n" for r in DEMO), "utf-8")

    steps = [
        ["score", "--corpus", str(corpus), "--lang", "hi", "--out", str(out / "scored")],
        ["correlate", "--evals", f"laser_rules={out / 'scored' / 'evaluations.jsonl'}",
         "--out", str(out / "correlations")],
        ["report", "--evals", str(out / "scored" / "evaluations.jsonl"),
         "--out", str(out / "report")],
        ["export-pairs", "--evals", str(out / "scored" / "evaluations.jsonl"),
         "--rate", "0.35", "--seed", "0", "--out", str(out / "pairs")],
    ]
    for step in steps:
        print(f"$ laser-eval {' '.join(step)}")
        code = main(step)
        if code != 0:
            raise SystemExit(code)
    print(f"\nDemo artifacts under {out}/")


if __name__ == "__main__":
    run()

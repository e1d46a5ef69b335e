"""Print the extension classifications for the 0|2 and 1|1 worked examples.

Usage: python3 scripts/reproduce_moduli.py [--parallel]
"""

import argparse
from pathlib import Path

from assocext.cli import parse, run

ROOT = Path(__file__).resolve().parent.parent / "problems"

RUNS = [
    ("0|2 case 1: delta = mu = 0", "case02_1.txt"),
    ("0|2 case 2: delta = psi[1,1->1], mu = 0", "case02_2.txt"),
    ("0|2 case 3: delta = 0, mu = psi[2,2->2]", "case02_3.txt"),
    ("0|2 case 4: delta = psi[1,1->1], mu = psi[2,2->2]", "case02_4.txt"),
    ("1|1, W odd: delta = psi[2,2->2], mu = 0", "case11_w_odd.txt"),
    ("1|1, M odd: delta = 0, mu = psi[2,2->2]", "case11_m_odd_mu.txt"),
    ("1|1, M odd: delta = mu = 0", "case11_m_odd_zero.txt"),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--parallel", action="store_true")
    args = ap.parse_args()
    for title, name in RUNS:
        report = run(parse((ROOT / name).read_text()), parallel=args.parallel)
        print(f"{title}  [{report.status}]")
        for c in report.results["classes"]:
            print(f"    d = {c['d']['text']}")
        print()


if __name__ == "__main__":
    main()

"""Tabulate printed closed forms against the engine for sorted r with entries <= --max."""
import argparse
from collections import defaultdict

from zeta5.lemmas import verify_lemmas


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max", type=int, default=6)
    ap.add_argument("--show", type=int, default=5, help="mismatching cases to print per lemma")
    args = ap.parse_args()

    by_lemma = defaultdict(list)
    for c in verify_lemmas(args.max):
        by_lemma[c.lemma].append(c)
    print(f"{'lemma':<10} {'cases':>6} {'match':>6}  suspect terms")
    for label in sorted(by_lemma):
        cs = by_lemma[label]
        suspects = sorted({t for c in cs for t in c.suspect_terms})
        print(f"{label:<10} {len(cs):>6} {sum(c.matches for c in cs):>6}  {suspects or '-'}")
    for label in sorted(by_lemma):
        bad = [c for c in by_lemma[label] if not c.matches][: args.show]
        for c in bad:
            m = c.mismatched_symbols[0]
            print(f"  {label} r={c.r}: {m['symbol']} printed {m['printed']} engine {m['engine']}")


if __name__ == "__main__":
    main()

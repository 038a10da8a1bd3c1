"""Run the approximation replay over n and a grid of eps, summarizing failing steps."""
import argparse
import json
from collections import Counter
from fractions import Fraction

from zeta5.approximation import AuditParameters, audit_many


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=10)
    ap.add_argument("--eps", nargs="+", default=["1/100", "1/1000"])
    ap.add_argument("--prec", type=int, default=256)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default=None, help="write all traces as a JSON list")
    args = ap.parse_args()

    everything = []
    for eps in args.eps:
        params = AuditParameters(eps=Fraction(eps), precision_bits=args.prec)
        traces = [json.loads(t) for t in audit_many(range(args.n_max + 1), params, args.workers)]
        everything.extend(traces)
        failing = Counter(d["name"] for t in traces for d in t["decisions"] if d["verdict"] == "fails")
        print(f"eps = {eps}: final verdicts {Counter(t['final'] for t in traces)}")
        for name, count in failing.most_common():
            print(f"  {count:>3} x {name}")
        for t in traces:
            if t["L"] is not None:
                print(f"  n={t['n']:>2} L={t['L']:<24} m={t['m']:<20} gamma={t['gamma']}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(everything, fh, indent=1, sort_keys=True)


if __name__ == "__main__":
    main()

"""Counting identity table for every shipped rule."""

import argparse

from orbitzeta.periodic import aggregate_identity
from orbitzeta.subdivision import load_rule, shipped_rules


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=10)
    args = ap.parse_args()
    print("rule,n,trace_tile,trace_edge_color,trace_edge,n_vertex,lhs,rhs")
    for name in shipped_rules():
        rule = load_rule(name)
        for n in range(1, args.n_max + 1):
            r = aggregate_identity(rule, n)
            print(f"{name},{n},{r.trace_tile},{r.trace_edge_color},{r.trace_edge},{r.n_vertex},{r.lhs},{r.rhs}")


if __name__ == "__main__":
    main()

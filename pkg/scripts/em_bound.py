"""Distribution of card E_m over sampled itineraries against m 2^(n/m)."""

import argparse
from collections import Counter

from orbitzeta.em import check_Em_bound
from orbitzeta.subdivision import load_rule


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=14)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--n-max", type=int, default=28)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rep = check_Em_bound(load_rule("pillow2x2"), args.m, args.trials, args.n_max, args.seed, strict=False)
    sizes = Counter(t.size for t in rep.trials)
    print("size,trials")
    for k in sorted(sizes):
        print(f"{k},{sizes[k]}")
    print(f"# max ratio {rep.max_ratio:.4f}; within bound {rep.all_within_bound}; "
          f"recursion = direct {rep.all_match_direct}")


if __name__ == "__main__":
    main()

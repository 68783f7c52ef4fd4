"""Spectral vs periodic-sum vs preimage-sum pressure as the truncation grows."""

import argparse

from orbitzeta.potential import Potential
from orbitzeta.shifts import tile_shift
from orbitzeta.subdivision import DATA_DIR, load_rule
from orbitzeta.thermo import pressure


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rule", default="pillow2x2")
    ap.add_argument("--t", type=float, default=1.0)
    ap.add_argument("--n-max", type=int, default=24)
    args = ap.parse_args()
    ts = tile_shift(load_rule(args.rule))
    print("potential,n,periodic_sum_err,preimage_sum_err")
    for name in ("potential_mild", "potential_spread", "potential_k3"):
        pot = Potential.load(DATA_DIR / f"{name}.json")
        ref = pressure(ts, pot, args.t).value
        for n in range(4, args.n_max + 1, 4):
            a = pressure(ts, pot, args.t, "periodic_sum", n).value - ref
            b = pressure(ts, pot, args.t, "preimage_sum", n).value - ref
            print(f"{name},{n},{a:.6e},{b:.6e}")


if __name__ == "__main__":
    main()

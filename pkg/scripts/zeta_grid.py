"""Truncated and determinant tile zeta on a vertical line Re s = s0 + offset."""

import argparse

import numpy as np

from orbitzeta.potential import Potential
from orbitzeta.shifts import tile_shift
from orbitzeta.subdivision import DATA_DIR, load_rule
from orbitzeta.thermo import solve_s0
from orbitzeta.zeta import zeta_determinant, zeta_truncated


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--potential", default="potential_mild")
    ap.add_argument("--offset", type=float, default=0.5)
    ap.add_argument("--N", type=int, default=12)
    args = ap.parse_args()
    ts = tile_shift(load_rule("pillow2x2"))
    pot = Potential.load(DATA_DIR / f"{args.potential}.json")
    s0 = solve_s0(pot, ts)
    print("im_s,abs_truncated,abs_determinant,difference,error_bound")
    for y in np.linspace(-10, 10, 41):
        s = complex(s0 + args.offset, y)
        v = zeta_truncated(ts, pot, s, args.N)
        d = zeta_determinant(ts, pot, s)
        print(f"{y:.2f},{abs(v.value):.10g},{abs(d):.10g},{abs(v.value - d):.3e},{v.error_bound:.3e}")


if __name__ == "__main__":
    main()

"""pi(T) against the comparison function for phi = 1 and a shipped potential."""

import argparse

from orbitzeta.orbitcount import orbit_length_asymptotic, pi_T, pot_table, safe_grid
from orbitzeta.periodic import primitive_orbits
from orbitzeta.potential import Potential
from orbitzeta.subdivision import DATA_DIR, load_rule


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rule", default="pillow2x2")
    ap.add_argument("--potential", default="potential_mild")
    ap.add_argument("--n-max", type=int, default=12)
    args = ap.parse_args()
    rule = load_rule(args.rule)
    one = primitive_orbits(rule, args.n_max, Potential.constant(rule, 1.0))
    print("# phi = 1: T, pi(T), pi(T) / (deg^(T+1) / ((deg-1) T))")
    for T in range(1, args.n_max + 1):
        p = pi_T(one, T)
        print(f"{T},{p},{p / orbit_length_asymptotic(rule.degree, T):.6f}")
    pot = Potential.load(DATA_DIR / f"{args.potential}.json")
    tab = primitive_orbits(rule, args.n_max, pot)
    grid = safe_grid(tab, [0.5 * i for i in range(2, 4 * args.n_max)])
    print(f"# {args.potential}")
    print(pot_table(rule, pot, grid, orbits=tab).to_csv(), end="")


if __name__ == "__main__":
    main()

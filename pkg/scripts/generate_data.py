"""Regenerate the shipped rule and potential files under src/orbitzeta/data."""

import json

from orbitzeta.pillow import BUILTIN_MAPS, build_rule
from orbitzeta.potential import Potential
from orbitzeta.subdivision import DATA_DIR, load_rule

# (file stem, block level, value range, seed)
POTENTIALS = [
    ("potential_mild", 1, (0.8, 1.2), 0),
    ("potential_spread", 1, (1.0, 2.0), 1),
    ("potential_k3", 3, (0.8, 1.2), 0),
]


def write(path, doc):
    path.write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")


def main():
    for name, pmap in BUILTIN_MAPS.items():
        write(DATA_DIR / f"{name}.json", build_rule(pmap))
    rule = load_rule("pillow2x2")
    for stem, k, (lo, hi), seed in POTENTIALS:
        pot = Potential.random(rule, k, lo, hi, seed)
        write(DATA_DIR / f"{stem}.json", pot.to_document())
        print(stem, len(pot.values), "values")


if __name__ == "__main__":
    main()

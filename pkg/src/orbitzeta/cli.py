"""Command-line front end: ``orbitzeta <subcommand> --rule ... --out DIR``.

Every run writes ``<subcommand>.csv`` (and sometimes extra files) plus
``<subcommand>_manifest.json`` into the output directory.  Exit codes:
0 success, 1 domain failure, 2 I/O or usage error.
"""

from __future__ import annotations

import argparse
import cmath
import csv
import hashlib
import io
import json
import math
import sys
import time
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from .em import EmBoundViolation, check_Em_bound
from .orbitcount import IncompleteTableError, pot_table, safe_grid, svg_chart
from .periodic import BudgetExceeded, aggregate_identity, primitive_orbits
from .potential import Potential, PotentialError, induced_weights
from .shifts import tile_shift
from .subdivision import DATA_DIR, RuleParseError, SubdivisionRule, load_rule, validate_rule
from .thermo import METHODS, NotEventuallyPositiveError, cohomology_test, pressure, solve_s0
from .zeta import PoleError, product_identity, zeta_determinant, zeta_truncated


class UsageError(Exception):
    pass


class DomainFailure(Exception):
    pass


def fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.12g}"
    return str(x)


def csv_text(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


# --------------------------------------------------------------------------
# argument helpers


def rule_path(name: str) -> Path:
    p = Path(name)
    if p.exists():
        return p
    q = DATA_DIR / f"{name}.json"
    if q.exists():
        return q
    raise FileNotFoundError(f"rule file not found: {name}")


def read_potential(spec: Optional[str], rule: SubdivisionRule) -> Potential:
    """A file path, a shipped potential name, or ``const:c`` (default const:1)."""
    if spec is None:
        return Potential.constant(rule, 1.0)
    if spec.startswith("const:"):
        try:
            return Potential.constant(rule, float(spec[6:]))
        except ValueError as e:
            raise UsageError(f"bad constant potential {spec!r}") from e
    p = Path(spec)
    if not p.exists():
        p = DATA_DIR / f"{spec}.json"
    if not p.exists():
        raise FileNotFoundError(f"potential file not found: {spec}")
    try:
        return Potential.load(p)
    except (ValueError, KeyError) as e:
        raise UsageError(f"cannot read potential {spec}: {e}") from e


def parse_reals(text: str, s0: Optional[Callable[[], float]] = None) -> List[float]:
    """Comma list of numbers; 's0', 's0+x' and 's0-x' refer to the critical exponent."""
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if tok.startswith("s0"):
            if s0 is None:
                raise UsageError("s0 is not available here")
            rest = tok[2:]
            out.append(s0() + (float(rest) if rest else 0.0))
        else:
            try:
                out.append(float(tok))
            except ValueError as e:
                raise UsageError(f"not a number: {tok!r}") from e
    return out


def parse_grid(text: str) -> List[float]:
    """``a:b:h`` (inclusive of b up to rounding) or a comma list."""
    if ":" in text:
        try:
            a, b, h = (float(x) for x in text.split(":"))
        except ValueError as e:
            raise UsageError(f"bad grid {text!r}; expected a:b:h") from e
        if h <= 0 or b < a:
            raise UsageError("grid needs a <= b and h > 0")
        n = int(math.floor((b - a) / h + 1e-9))
        return [a + i * h for i in range(n + 1)]
    return parse_reals(text) if text.strip() else []


# --------------------------------------------------------------------------
# subcommands


def _opt(value: Optional[int], default: int) -> int:
    return default if value is None else value


class Run:
    def __init__(self, args):
        self.args = args
        self.outputs: Dict[str, str] = {}
        self._rule = None

    @property
    def rule(self) -> SubdivisionRule:
        if self._rule is None:
            self._rule = load_rule(rule_path(self.args.rule))
        return self._rule

    def potential(self) -> Potential:
        return read_potential(self.args.potential, self.rule)

    def emit(self, name: str, text: str) -> None:
        self.outputs[name] = text


def cmd_validate(run: Run) -> int:
    rep = validate_rule(run.rule)
    for v in rep.violations:
        print(f"VIOLATION {v.invariant}: {v.detail}")
    print("valid" if rep.ok else f"{len(rep.violations)} violation(s)")
    run.emit("validate.json", json.dumps(rep.to_dict(), indent=1, sort_keys=True, default=str) + "\n")
    return 0 if rep.ok else 1


def cmd_identity(run: Run) -> int:
    n_max = _opt(run.args.n, 8)
    if n_max < 1:
        raise UsageError("--n must be at least 1")
    rows = [aggregate_identity(run.rule, n) for n in range(1, n_max + 1)]
    run.emit("identity.csv", csv_text(["n", "trace_tile", "trace_edge_color", "trace_edge", "n_vertex",
                                       "lhs", "rhs", "equal"],
                                      [(r.n, r.trace_tile, r.trace_edge_color, r.trace_edge, r.n_vertex,
                                        r.lhs, r.rhs, r.equal) for r in rows]))
    ok = all(r.equal for r in rows)
    print("identity holds" if ok else "identity FAILS")
    return 0 if ok else 1


def cmd_pressure(run: Run) -> int:
    ts = tile_shift(run.rule)
    pot = run.potential()
    n = _opt(run.args.n, 12)
    rows = []
    for m in METHODS:
        rep = pressure(ts, pot, run.args.t, m, n=n)
        rows.append((m, rep.n, rep.value, rep.residual))
        print(f"{m}: {fmt(rep.value)}")
    run.emit("pressure.csv", csv_text(["method", "n", "value", "residual"], rows))
    return 0


def cmd_s0(run: Run) -> int:
    s0 = solve_s0(run.potential(), tile_shift(run.rule))
    print(fmt(s0))
    run.emit("s0.csv", csv_text(["s0"], [(s0,)]))
    return 0


def _s0_thunk(run: Run):
    cache = {}

    def get():
        if "s0" not in cache:
            cache["s0"] = solve_s0(run.potential(), tile_shift(run.rule))
        return cache["s0"]
    return get


def cmd_zeta(run: Run) -> int:
    pot = run.potential()
    iw = induced_weights(run.rule, pot)
    w = getattr(iw, run.args.system)
    N = _opt(run.args.N, 12)
    s0 = _s0_thunk(run)
    rows = []
    for re_s in parse_reals(run.args.s_re, s0):
        for im_s in parse_reals(run.args.s_im, s0):
            s = complex(re_s, im_s)
            tv = zeta_truncated(w, s=s, N=N)
            try:
                dv = zeta_determinant(w, s=s)
            except PoleError:
                dv = complex("nan+nanj")
            tail = "" if tv.tail_bound is None else tv.tail_bound
            err = "" if tv.error_bound is None else tv.error_bound
            rows.append((re_s, im_s, abs(tv.value), cmath.phase(tv.value), abs(dv), cmath.phase(dv),
                         abs(tv.value - dv), tail, err))
    run.emit("zeta.csv", csv_text(["re_s", "im_s", "abs", "arg", "det_abs", "det_arg", "difference",
                                   "tail_bound", "error_bound"], rows))
    return 0


def cmd_dirichlet(run: Run) -> int:
    pot = run.potential()
    N = _opt(run.args.N, 12)
    s0 = _s0_thunk(run)
    tab = primitive_orbits(run.rule, N, pot)
    rows = []
    for re_s in parse_reals(run.args.s_re, s0):
        for im_s in parse_reals(run.args.s_im, s0):
            s = complex(re_s, im_s)
            pi = product_identity(run.rule, pot, s, N, tab)
            D = pi.dirichlet
            rows.append((re_s, im_s, D.value.real, D.value.imag, pi.product.real, pi.product.imag,
                         pi.residual, "" if D.tail_bound is None else D.tail_bound))
    run.emit("dirichlet.csv", csv_text(["re_s", "im_s", "re", "im", "product_re", "product_im",
                                        "residual", "tail_bound"], rows))
    return 0


def cmd_orbits(run: Run) -> int:
    n = _opt(run.args.n, 6)
    tab = primitive_orbits(run.rule, n, run.potential())
    run.emit("orbits.csv", csv_text(["period", "kind", "address", "weight", "degree"], list(tab.to_csv_rows())))
    print(f"{len(tab)} primitive orbits with period <= {n}")
    return 0


def cmd_pot(run: Run) -> int:
    pot = run.potential()
    n = _opt(run.args.n, 12)
    tab = primitive_orbits(run.rule, n, pot)
    grid = parse_grid(run.args.T_grid)
    safe = safe_grid(tab, grid)
    if len(safe) < len(grid):
        print(f"dropping {len(grid) - len(safe)} grid point(s) outside the complete range", file=sys.stderr)
    table = pot_table(run.rule, pot, safe, orbits=tab)
    run.emit("pot.csv", table.to_csv())
    if run.args.svg:
        run.emit("pot.svg", svg_chart(table))
    for r in table.rows:
        print(f"T={fmt(r.T)} pi={r.piT} ratio={fmt(r.ratio)}")
    return 0


def cmd_em(run: Run) -> int:
    rep = check_Em_bound(run.rule, run.args.m, run.args.trials, _opt(run.args.n, 28),
                         seed=run.args.seed, strict=False)
    rows = [(i, t.n, t.size, t.bound, t.ratio, t.matches_direct) for i, t in enumerate(rep.trials)]
    run.emit("em.csv", csv_text(["trial", "n", "size", "bound", "ratio", "matches_direct"], rows))
    print(f"max ratio {fmt(rep.max_ratio)}; all within bound: {rep.all_within_bound}; "
          f"recursion = direct: {rep.all_match_direct}")
    if not rep.all_within_bound:
        bad = next(t for t in rep.trials if t.size > t.bound)
        raise DomainFailure("bound violated at itinerary " + ", ".join(str(p) for p in bad.itinerary)
                            + f"; q = {bad.q}")
    return 0 if rep.ok else 1


def cmd_cohomology(run: Run) -> int:
    v = cohomology_test(run.rule, run.potential(), _opt(run.args.n, 6))
    if v.constant:
        print(f"constant K = {fmt(v.K)}")
        rows = [("constant", v.K, "", "", "", "")]
    else:
        a, b = v.witness
        print(f"not constant: {'-'.join(a.address)} mean {fmt(v.means[0])}, "
              f"{'-'.join(b.address)} mean {fmt(v.means[1])}")
        rows = [("witness", "", "-".join(a.address), v.means[0], "-".join(b.address), v.means[1])]
    run.emit("cohomology.csv", csv_text(["verdict", "K", "orbit_1", "mean_1", "orbit_2", "mean_2"], rows))
    return 0


COMMANDS = {
    "validate": cmd_validate, "identity": cmd_identity, "pressure": cmd_pressure, "s0": cmd_s0,
    "zeta": cmd_zeta, "dirichlet": cmd_dirichlet, "orbits": cmd_orbits, "pot": cmd_pot,
    "em": cmd_em, "cohomology": cmd_cohomology,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="orbitzeta", description="Periodic orbits, pressure and zeta "
                                "functions of subdivision rules.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--rule", default="pillow2x2", help="rule JSON path or shipped rule name")
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--potential", default=None,
                        help="potential JSON path, shipped potential name, or const:c")
        sp.add_argument("--t", type=float, default=1.0)
        sp.add_argument("--n", type=int, default=None)
        sp.add_argument("--N", type=int, default=None)
        sp.add_argument("--s-re", dest="s_re", default="s0+0.5")
        sp.add_argument("--s-im", dest="s_im", default="0")
        sp.add_argument("--T-grid", dest="T_grid", default="1:14:1")
        if name == "zeta":
            sp.add_argument("--system", default="tile", choices=["tile", "edge", "edge_color", "vertex"])
        if name == "em":
            sp.add_argument("--m", type=int, default=14)
            sp.add_argument("--trials", type=int, default=200)
            sp.add_argument("--seed", type=int, default=0)
        if name == "pot":
            sp.add_argument("--svg", action="store_true")
    return p


def _manifest(run: Run, command: str, wall: float, files: List[str], status: int) -> dict:
    params = {k: v for k, v in sorted(vars(run.args).items()) if k != "command"}
    digest = None
    try:
        digest = hashlib.sha256(rule_path(run.args.rule).read_bytes()).hexdigest()
    except OSError:
        pass
    return {"subcommand": command, "rule_sha256": digest, "parameters": params,
            "version": __version__, "wall_time_s": round(wall, 6), "outputs": files,
            "exit_code": status}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    run = Run(args)
    t0 = time.perf_counter()
    try:
        status = COMMANDS[args.command](run)
    except (UsageError, ValueError) as e:  # includes parse errors of rules and potentials
        code = 2 if isinstance(e, (UsageError, RuleParseError, PotentialError)) else 1
        print(f"error: {e}", file=sys.stderr)
        status = code
    except (FileNotFoundError, PermissionError, IsADirectoryError) as e:
        print(f"error: {e}", file=sys.stderr)
        status = 2
    except (DomainFailure, EmBoundViolation, BudgetExceeded, PoleError, NotEventuallyPositiveError,
            IncompleteTableError, ArithmeticError) as e:
        print(f"error: {e}", file=sys.stderr)
        status = 1
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        files = []
        for name, text in run.outputs.items():
            (out / name).write_text(text, encoding="utf-8")
            files.append(name)
        manifest = _manifest(run, args.command, time.perf_counter() - t0, files, status)
        (out / f"{args.command}_manifest.json").write_text(
            json.dumps(manifest, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as e:
        print(f"error: cannot write outputs: {e}", file=sys.stderr)
        return 2
    return status


if __name__ == "__main__":
    sys.exit(main())

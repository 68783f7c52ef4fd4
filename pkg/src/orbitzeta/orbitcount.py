"""Prime orbit counting: the logarithmic integral, pi(T) and comparison tables."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Union

import numpy as np
from scipy.integrate import quad

from .periodic import DEFAULT_CAP, OrbitRecord, OrbitTable, primitive_orbits
from .potential import Potential
from .shifts import tile_shift
from .subdivision import SubdivisionRule
from .thermo import cohomology_test, solve_s0


class IncompleteTableError(ValueError):
    pass


_LOG2 = math.log(2.0)


def li(y: float) -> float:
    """Eulerian logarithmic integral Li(y) = int_2^y du / log u.

    Computed as int_{log 2}^{log y} e^v / v dv; an interval that crosses
    v = 0 (y < 1) is taken as a Cauchy principal value.
    """
    y = float(y)
    if not y > 0:
        raise ValueError("Li is defined for y > 0")
    if y == 1.0:
        raise ValueError("Li diverges at y = 1")
    b = math.log(y)
    if b == _LOG2:
        return 0.0
    if b > 0:
        # split so each piece has moderate dynamic range
        pts = np.linspace(min(b, _LOG2), max(b, _LOG2), max(2, int(abs(b - _LOG2)) + 2))
        total = math.fsum(quad(lambda v: math.exp(v) / v, lo, hi, epsabs=1e-12, epsrel=1e-12,
                               limit=200)[0] for lo, hi in zip(pts, pts[1:]))
        return total if b > _LOG2 else -total
    # y < 1: -(PV int_{log y}^{log 2} e^v / v dv)
    pv = quad(lambda v: math.exp(v), b, _LOG2, weight="cauchy", wvar=0.0,
              epsabs=1e-12, epsrel=1e-12, limit=200)[0]
    return -pv


def orbit_length_asymptotic(degree: int, T: float) -> float:
    """deg^(T+1) / ((deg - 1) T), the phi = 1 growth of pi(T)."""
    return degree ** (T + 1) / ((degree - 1) * T)


def constant_comparison(s0: float, c: float, T: float, n: int = 1) -> float:
    """n s0 c e^(n s0 c) / (e^(n s0 c) - 1) * Li(e^(s0 T)) for phi cohomologous to c."""
    x = n * s0 * c
    return x * math.exp(x) / math.expm1(x) * li(math.exp(s0 * T))


# --------------------------------------------------------------------------
# pi(T)


def safe_T(table: OrbitTable) -> float:
    """Supremum of the T values for which the table is complete."""
    if table.min_step <= 0:
        return 0.0
    return table.min_step * (table.n_max + 1)


def pi_T(records: Union[OrbitTable, Iterable[OrbitRecord]], T: float,
         n_max: Optional[int] = None, min_value: Optional[float] = None) -> int:
    """card{orbits tau : l(tau) <= T}, guarded so that the count is complete."""
    if isinstance(records, OrbitTable):
        limit = safe_T(records)
        weights = records.weight
    else:
        recs = list(records)
        weights = np.array([r.weight for r in recs], dtype=float)
        limit = math.inf if n_max is None or min_value is None else min_value * (n_max + 1)
    if not T < limit:
        raise IncompleteTableError(f"T = {T} is outside the complete range T < {limit:.12g}")
    return int(np.count_nonzero(weights <= T))


@dataclass(frozen=True)
class CountingRow:
    T: float
    piT: int
    li: float
    ratio: float


@dataclass
class CountingTable:
    rows: List[CountingRow] = field(default_factory=list)
    s0: float = math.nan
    comparison: str = "Li"  # "Li" or "constant"

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def ratios(self) -> List[float]:
        return [r.ratio for r in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["T", "piT", "li", "ratio"])
        for r in self.rows:
            w.writerow([f"{r.T:.12g}", r.piT, f"{r.li:.12g}", f"{r.ratio:.12g}"])
        return buf.getvalue()


def safe_grid(table: OrbitTable, grid: Sequence[float]) -> List[float]:
    lim = safe_T(table)
    return [T for T in grid if T < lim]


def pot_table(rule: SubdivisionRule, potential: Potential, T_grid: Sequence[float],
              n_max: int = 12, orbits: Optional[OrbitTable] = None,
              cohomologous: Optional[bool] = None, cap: int = DEFAULT_CAP) -> CountingTable:
    """(T, pi(T), comparison, ratio) rows over the grid.

    The comparison is Li(e^(s0 T)), or the constant-potential expression when
    the potential is cohomologous to a constant.
    """
    grid = list(T_grid)
    if not grid:
        return CountingTable()
    tab = orbits if orbits is not None else primitive_orbits(rule, n_max, potential, cap)
    s0 = solve_s0(potential, tile_shift(rule))
    K = None
    if cohomologous is None:
        verdict = cohomology_test(rule, potential, orbits=tab)
        cohomologous, K = verdict.constant, verdict.K
    elif cohomologous:
        K = float(np.median(tab.weight / tab.period))
    rows = []
    for T in grid:
        p = pi_T(tab, T)
        ref = constant_comparison(s0, K, T) if cohomologous else li(math.exp(s0 * T))
        rows.append(CountingRow(float(T), p, ref, p / ref))
    return CountingTable(rows, s0, "constant" if cohomologous else "Li")


def svg_chart(table: CountingTable, width: int = 480, height: int = 240) -> str:
    """Plain-text SVG line chart of the ratio column."""
    if not table.rows:
        return f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}"/>\n'
    xs = [r.T for r in table.rows]
    ys = [r.ratio for r in table.rows]
    x0, x1 = min(xs), max(xs) if max(xs) > min(xs) else min(xs) + 1
    y0, y1 = min(ys + [1.0]), max(ys + [1.0])
    if y1 == y0:
        y1 = y0 + 1
    pad = 20

    def px(x, y):
        return (pad + (x - x0) / (x1 - x0) * (width - 2 * pad),
                height - pad - (y - y0) / (y1 - y0) * (height - 2 * pad))

    pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in (px(x, y) for x, y in zip(xs, ys)))
    ya = px(x0, 1.0)[1]
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">\n'
            f'<line x1="{pad}" y1="{ya:.2f}" x2="{width - pad}" y2="{ya:.2f}" stroke="gray"/>\n'
            f'<polyline fill="none" stroke="black" points="{pts}"/>\n</svg>\n')

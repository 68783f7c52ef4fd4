"""Dynamical zeta functions and the degree-weighted Dirichlet series.

Every factor is attached to a ``Weights`` object (a locally constant
function on one of the four symbolic systems).  With B(s) the weighted
transition matrix on the block system, Z^(n)(s) = trace B(s)^n and

    zeta(s) = exp(sum_n Z^(n)(s) / n) = 1 / det(I - B(s)).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np

from .periodic import DEFAULT_CAP, OrbitRecord, OrbitTable, primitive_orbits
from .potential import Potential, Weights, induced_weights
from .shifts import TransitionSystem, tile_shift
from .subdivision import Color, SubdivisionRule
from .thermo import spectral_radius, transfer_matrix


class PoleError(ArithmeticError):
    """I - B(s) is numerically singular: s sits on a pole of the zeta function."""


class DivergenceError(ArithmeticError):
    pass


@dataclass(frozen=True)
class SeriesValue:
    s: complex
    value: complex
    truncation: int
    tail_bound: Optional[float]  # None when no certified majorant is available
    log_value: complex = 0j
    rounding: float = 0.0  # floating-point allowance for the computed partial sum

    @property
    def certified(self) -> bool:
        return self.tail_bound is not None

    @property
    def error_bound(self) -> Optional[float]:
        """Truncation tail plus rounding: bounds |value - exact value|."""
        return None if self.tail_bound is None else self.tail_bound + self.rounding


_EPS = float(np.finfo(float).eps)


def _rounding(value: complex, terms: np.ndarray, S: int) -> float:
    # each trace carries ~ S n eps relative error; exp turns absolute log error into relative error
    N = terms.size
    return 4 * S * N * _EPS * abs(value) * (1.0 + float(np.sum(np.abs(terms))))


def _as_weights(system: Union[TransitionSystem, Weights], potential=None) -> Weights:
    if isinstance(system, Weights):
        return system
    if isinstance(potential, Weights):
        return potential
    if potential is None:
        raise ValueError("a potential is required")
    return potential.weights(system)


def certified_growth(w: Weights, re_s: float) -> Optional[Tuple[float, int]]:
    """(lam, S) with |Z^(n)(s)| <= S lam^n for all n, or None if lam >= 1 can't be avoided.

    |trace B(s)^n| <= trace B(Re s)^n, and a positive r with B r <= lam r gives
    trace B^n <= S lam^n.  r = (I - B/lam)^{-1} 1 satisfies B r = lam (r - 1).
    """
    B = transfer_matrix(w.block, w, re_s).real
    S = B.shape[0]
    rho = spectral_radius(B)
    lam = rho * (1 + 1e-9) + 1e-300
    for _ in range(60):
        if lam >= 1:
            return None
        try:
            r = np.linalg.solve(np.eye(S) - B / lam, np.ones(S))
        except np.linalg.LinAlgError:
            r = None
        if r is not None and np.all(r > 0) and np.all(B @ r <= lam * r * (1 + 1e-15)):
            lam *= 1 + 1e-12  # absorb the rounding slack of the check above
            return (lam, S) if lam < 1 else None
        lam = lam * 1.01 + 1e-12
    return None  # pragma: no cover


def log_tail(lam: float, S: int, N: int) -> float:
    """sum_{n>N} S lam^n / n <= S lam^(N+1) / ((N+1)(1-lam))."""
    return S * lam ** (N + 1) / ((N + 1) * (1 - lam))


def traces(w: Weights, s: complex, N: int) -> np.ndarray:
    """Z^(1..N)(s) = trace B(s)^n."""
    B = transfer_matrix(w.block, w, s).astype(complex)
    out = np.zeros(N, dtype=complex)
    P = np.eye(B.shape[0], dtype=complex)
    for n in range(N):
        P = P @ B
        out[n] = np.trace(P)
    return out


def zeta_truncated(system: Union[TransitionSystem, Weights], potential=None, s: complex = 1.0,
                   N: int = 12) -> SeriesValue:
    """exp(sum_{n<=N} Z^(n)(s) / n) with a certified tail bound when available."""
    if N < 1:
        raise ValueError("truncation N must be at least 1")
    w = _as_weights(system, potential)
    s = complex(s)
    Z = traces(w, s, N)
    L = complex(np.sum(Z / np.arange(1, N + 1)))
    value = cmath.exp(L)
    g = certified_growth(w, s.real)
    tail = None
    if g is not None:
        tau = log_tail(g[0], g[1], N)
        tail = abs(value) * math.expm1(tau)
    return SeriesValue(s, value, N, tail, L, _rounding(value, Z / np.arange(1, N + 1), w.block.size))


def det_I_minus_B(system: Union[TransitionSystem, Weights], potential=None, s: complex = 1.0) -> complex:
    w = _as_weights(system, potential)
    B = transfer_matrix(w.block, w, complex(s)).astype(complex)
    return complex(np.linalg.det(np.eye(B.shape[0]) - B))


def zeta_determinant(system: Union[TransitionSystem, Weights], potential=None, s: complex = 1.0) -> complex:
    """1 / det(I - B(s)); raises PoleError when the determinant vanishes numerically."""
    w = _as_weights(system, potential)
    B = transfer_matrix(w.block, w, complex(s)).astype(complex)
    M = np.eye(B.shape[0]) - B
    d = complex(np.linalg.det(M))
    if abs(d) < 1e-13 * max(np.linalg.norm(M, 2), 1.0):
        raise PoleError(f"det(I - B(s)) = {abs(d):.3e} at s = {s}")
    return 1 / d


# --------------------------------------------------------------------------
# subdivision-level series


def _orbit_columns(orbits: Union[OrbitTable, Iterable[OrbitRecord]]):
    if isinstance(orbits, OrbitTable):
        return (orbits.period.astype(np.int64), orbits.weight.astype(float),
                orbits.degree.astype(float))
    recs = list(orbits)
    return (np.array([r.period for r in recs], dtype=np.int64),
            np.array([r.weight for r in recs], dtype=float),
            np.array([r.degree for r in recs], dtype=float))


def inner_sums(orbits: Union[OrbitTable, Iterable[OrbitRecord]], s: complex, N: int,
               coefficient: str = "degree") -> np.ndarray:
    """a_n = sum over x in Fix(f^n) of w_n(x) exp(-s S_n phi(x)), n = 1..N.

    A primitive orbit of period d contributes d w^(n/d) exp(-s (n/d) l) to every n divisible by d.
    """
    period, length, deg = _orbit_columns(orbits)
    if coefficient == "one":
        deg = np.ones_like(deg)
    elif coefficient != "degree":
        raise ValueError("coefficient is 'one' or 'degree'")
    out = np.zeros(N, dtype=complex)
    s = complex(s)
    for n in range(1, N + 1):
        mask = (n % period) == 0
        if not mask.any():
            continue
        r = n // period[mask]
        out[n - 1] = np.sum(period[mask] * deg[mask] ** r * np.exp(-s * r * length[mask]))
    return out


def dirichlet_truncated(rule: SubdivisionRule, potential: Potential, s: complex, N: int = 12,
                        orbits: Optional[OrbitTable] = None, coefficient: str = "degree",
                        cap: int = DEFAULT_CAP, curve_color: Color = Color.white) -> SeriesValue:
    """exp(sum_{n<=N} a_n / n) over the geometric periodic points of f."""
    if N < 1:
        raise ValueError("truncation N must be at least 1")
    tab = orbits if orbits is not None else primitive_orbits(rule, N, potential, cap, curve_color)
    if tab.n_max < N:
        raise ValueError(f"orbit table stops at period {tab.n_max} < N = {N}")
    a = inner_sums(tab, s, N, coefficient)
    L = complex(np.sum(a / np.arange(1, N + 1)))
    value = cmath.exp(L)
    # |a_n| is majorised by the four trace sums of the counting identity
    iw = induced_weights(rule, potential, curve_color)
    rnd = _rounding(value, a / np.arange(1, N + 1), max(iw.tile.block.size, 1))
    tau = 0.0
    for w in (iw.tile, iw.edge, iw.edge_color, iw.vertex):
        g = certified_growth(w, complex(s).real)
        if g is None:
            return SeriesValue(complex(s), value, N, None, L, rnd)
        tau += log_tail(g[0], g[1], N)
    return SeriesValue(complex(s), value, N, abs(value) * math.expm1(tau), L, rnd)


def euler_product(records: Union[OrbitTable, Iterable[OrbitRecord]], coefficient: str = "one",
                  s: complex = 1.0, L_max: Optional[int] = None) -> complex:
    """prod over primitive orbits of period <= L_max of (1 - w exp(-s l))^{-1}."""
    period, length, deg = _orbit_columns(records)
    if coefficient == "one":
        deg = np.ones_like(deg)
    elif coefficient != "degree":
        raise ValueError("coefficient is 'one' or 'degree'")
    if L_max is not None:
        keep = period <= L_max
        period, length, deg = period[keep], length[keep], deg[keep]
    z = deg * np.exp(-complex(s) * length)
    if np.any(np.abs(z) >= 1):
        raise DivergenceError("an Euler factor has base of modulus >= 1")
    return complex(np.exp(-np.sum(np.log1p(-z))))


@dataclass(frozen=True)
class ProductIdentity:
    dirichlet: SeriesValue
    tile: SeriesValue
    edge: SeriesValue
    edge_color: SeriesValue
    vertex: SeriesValue

    @property
    def product(self) -> complex:
        return self.tile.value * self.edge.value * self.vertex.value / self.edge_color.value

    @property
    def residual(self) -> float:
        return abs(self.dirichlet.value - self.product)


def product_identity(rule: SubdivisionRule, potential: Potential, s: complex, N: int = 12,
                     orbits: Optional[OrbitTable] = None,
                     curve_color: Color = Color.white) -> ProductIdentity:
    iw = induced_weights(rule, potential, curve_color)
    D = dirichlet_truncated(rule, potential, s, N, orbits, "degree", curve_color=curve_color)
    return ProductIdentity(D, zeta_truncated(iw.tile, s=s, N=N), zeta_truncated(iw.edge, s=s, N=N),
                           zeta_truncated(iw.edge_color, s=s, N=N),
                           zeta_truncated(iw.vertex, s=s, N=N))


def product_identity_residual(rule: SubdivisionRule, potential: Potential, s: complex, N: int = 12,
                              orbits: Optional[OrbitTable] = None) -> float:
    """|D_N - zeta_tile zeta_edge zeta_vertex / zeta_edgecolor| at truncation N."""
    return product_identity(rule, potential, s, N, orbits).residual


def zeta_grid(system: Union[TransitionSystem, Weights], potential, s_values: Sequence[complex],
              N: int = 12):
    """Rows (Re s, Im s, |value|, arg value) of the truncated zeta function."""
    rows = []
    for s in s_values:
        v = zeta_truncated(system, potential, s, N).value
        rows.append((complex(s).real, complex(s).imag, abs(v), cmath.phase(v)))
    return rows

"""Pressure, the critical exponent, Markov equilibrium measures and related checks.

Convention: ``pressure(ts, potential, t)`` is the pressure of -t * phi, so
B(t)[w, w'] = A[w, w'] exp(-t phi(w)) and P = log rho(B(t)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .em import check_Em_bound, enumerate_Em  # noqa: F401  (re-exported)
from .periodic import DEFAULT_CAP, OrbitTable, primitive_orbits
from .potential import Potential, PotentialError, Weights, edge_color_weights, edge_weights, \
    lifted_edge_weights, vertex_weights
from .shifts import BlockSystem, TransitionSystem, edge_color_shift, edge_shift, is_mixing, \
    tile_shift, vertex_system
from .subdivision import Color, SubdivisionRule

METHODS = ("spectral", "periodic_sum", "preimage_sum")


class NotMixingError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    pass


class NotEventuallyPositiveError(ValueError):
    pass


@dataclass(frozen=True)
class PressureReport:
    value: float
    method: str
    n: int  # truncation level or iteration count
    residual: float


def _weights(ts: TransitionSystem, potential: Union[Potential, Weights]) -> Weights:
    if isinstance(potential, Weights):
        return potential
    base = ts.base if isinstance(ts, BlockSystem) and ts.base is not None else ts
    w = potential.weights(base)
    if isinstance(ts, BlockSystem) and ts.k != potential.k:
        raise PotentialError(f"potential has level {potential.k}, block system has level {ts.k}")
    return w


def birkhoff_sum(potential: Union[Potential, Weights], word: Sequence, n: int,
                 periodic: bool = False, ts: Optional[TransitionSystem] = None) -> float:
    """S_n phi along a word; periodic words wrap around."""
    if n == 0:
        return 0.0
    if isinstance(potential, Weights):
        k = potential.k
        get = lambda win: float(potential.table[tuple(win)])
    else:
        k = potential.k
        get = lambda win: potential.values[tuple(win)]
    word = list(word)
    if not periodic and len(word) < n + k - 1:
        raise ValueError(f"word of length {len(word)} is too short for {n} windows of length {k}")
    L = len(word)
    return math.fsum(get([word[(i + j) % L] for j in range(k)]) for i in range(n))


def transfer_matrix(ts: TransitionSystem, potential: Union[Potential, Weights], t: complex) -> np.ndarray:
    """B(t)[w, w'] = A[w, w'] exp(-t phi(w)) on the block system of the potential."""
    w = _weights(ts, potential)
    A = w.block.matrix.astype(float)
    scale = np.exp(-t * w.block_values)
    return A * scale[:, None]


def _power(B: np.ndarray, tol: float = 1e-13, max_iter: int = 100000):
    """Perron root and right vector of a primitive nonnegative matrix."""
    x = np.ones(B.shape[0])
    x /= x.sum()
    lam = 0.0
    for it in range(1, max_iter + 1):
        y = B @ x
        lam_new = y.sum()
        y /= lam_new
        res = np.max(np.abs(B @ y - lam_new * y)) / lam_new
        x = y
        if res < tol:
            return lam_new, x, it, res
        lam = lam_new
    raise ConvergenceError(f"power iteration did not converge (residual {res:.3e})")


def spectral_radius(B: np.ndarray) -> float:
    """Spectral radius of a nonnegative matrix, block by strongly connected component."""
    n = B.shape[0]
    ncomp, labels = connected_components(csr_matrix(B > 0), directed=True, connection="strong")
    best = 0.0
    for c in range(ncomp):
        idx = np.flatnonzero(labels == c)
        sub = B[np.ix_(idx, idx)]
        if not sub.any():
            continue
        best = max(best, float(np.max(np.abs(np.linalg.eigvals(sub)))))
    return best


def pressure(ts: TransitionSystem, potential: Union[Potential, Weights], t: float = 1.0,
             method: str = "spectral", n: int = 12, base_state: int = 0) -> PressureReport:
    w = _weights(ts, potential)
    B = transfer_matrix(ts, w, t)
    if method == "spectral":
        if not is_mixing(w.block):
            raise NotMixingError("spectral pressure needs a mixing shift")
        lam, _, it, res = _power(B)
        return PressureReport(math.log(lam), method, it, res)
    if method == "periodic_sum":
        # (1/n) log trace(B^n), with per-step rescaling to avoid overflow
        return PressureReport(_log_trace_power(B, n) / n, method, n, 0.0)
    if method == "preimage_sum":
        v = np.zeros(B.shape[0])
        v[base_state] = 1.0
        logs = 0.0
        for _ in range(n):
            v = B @ v
            s = v.sum()
            logs += math.log(s)
            v /= s
        return PressureReport(logs / n, method, n, 0.0)
    raise ValueError(f"unknown method {method!r}")


def _log_trace_power(B: np.ndarray, n: int) -> float:
    M = np.eye(B.shape[0])
    logs = 0.0
    for _ in range(n):
        M = M @ B
        s = np.abs(M).max()
        logs += math.log(s)
        M /= s
    return logs + math.log(np.trace(M))


def log_rho(ts: TransitionSystem, potential: Union[Potential, Weights], t: float) -> float:
    """log spectral radius of B(t), valid for reducible systems too."""
    return math.log(spectral_radius(transfer_matrix(ts, potential, t)))


# --------------------------------------------------------------------------
# eventual positivity and s0


@dataclass(frozen=True)
class PositivityVerdict:
    positive: bool
    min_cycle_mean: float
    witness: Tuple[str, ...]  # a cycle attaining the minimum mean (block labels)

    def __bool__(self) -> bool:
        return self.positive


def min_cycle_mean(ts: TransitionSystem, values: np.ndarray) -> Tuple[float, List[int]]:
    """Karp's algorithm with weights on the source state of each edge."""
    n = ts.size
    INF = math.inf
    best_mean, best_cycle = INF, []
    ncomp, labels = connected_components(csr_matrix(ts.matrix > 0), directed=True, connection="strong")
    for c in range(ncomp):
        nodes = [int(i) for i in np.flatnonzero(labels == c)]
        local = {v: i for i, v in enumerate(nodes)}
        edges = [(local[u], local[v]) for u in nodes for v in ts.succ[u] if v in local]
        if not edges:
            continue
        N = len(nodes)
        D = [[INF] * N for _ in range(N + 1)]
        P = [[-1] * N for _ in range(N + 1)]
        D[0] = [0.0] * N
        for k in range(1, N + 1):
            Dk, Pk, Dp = D[k], P[k], D[k - 1]
            for u, v in edges:
                if Dp[u] < INF:
                    cand = Dp[u] + float(values[nodes[u]])
                    if cand < Dk[v]:
                        Dk[v], Pk[v] = cand, u
        comp_best, arg = INF, -1
        for v in range(N):
            if D[N][v] == INF:
                continue
            worst = max((D[N][v] - D[k][v]) / (N - k) for k in range(N) if D[k][v] < INF)
            if worst < comp_best:
                comp_best, arg = worst, v
        if comp_best < best_mean and arg >= 0:
            # walk back from arg to extract a cycle on the optimal walk
            path = [arg]
            v = arg
            for k in range(N, 0, -1):
                v = P[k][v]
                path.append(v)
            path.reverse()
            seen: Dict[int, int] = {}
            cyc = None
            for i, v in enumerate(path):
                if v in seen:
                    cyc = path[seen[v]:i]
                    break
                seen[v] = i
            best_c = cyc
            best_mean = comp_best
            best_cycle = [nodes[x] for x in (best_c or [])]
    return best_mean, best_cycle


def eventually_positive(potential: Union[Potential, Weights], ts: Optional[TransitionSystem] = None,
                        rule: Optional[SubdivisionRule] = None) -> PositivityVerdict:
    if isinstance(potential, Weights):
        w = potential
    else:
        if ts is None:
            if rule is None:
                raise ValueError("need the tile shift or the rule")
            ts = tile_shift(rule)
        w = potential.weights(ts)
    mean, cyc = min_cycle_mean(w.block, w.block_values)
    labels = tuple(w.block.labels[i] for i in cyc)
    return PositivityVerdict(mean > 0, mean, labels)


def solve_s0(potential: Union[Potential, Weights], ts: Optional[TransitionSystem] = None,
             rule: Optional[SubdivisionRule] = None, tol: float = 1e-10) -> float:
    """Unique t with P(-t phi) = 0 on the tile shift."""
    if ts is None and not isinstance(potential, Weights):
        if rule is None:
            raise ValueError("need the tile shift or the rule")
        ts = tile_shift(rule)
    w = potential if isinstance(potential, Weights) else potential.weights(ts)
    verdict = eventually_positive(w)
    if not verdict:
        raise NotEventuallyPositiveError(
            "potential is not eventually positive: some Birkhoff sums along the "
            f"cycle {'/'.join(verdict.witness)} stay nonpositive (mean {verdict.min_cycle_mean:.6g})")

    def P(t):
        return pressure(w.block, w, t).value

    lo, hi = 0.0, 1.0
    while P(hi) >= 0:
        lo, hi = hi, 2 * hi
        if hi > 1e12:
            raise ConvergenceError("could not bracket s0")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if P(mid) >= 0:
            lo = mid
        else:
            hi = mid
    s0 = 0.5 * (lo + hi)
    if abs(P(s0)) > max(tol, 1e-12):
        raise ConvergenceError(f"|P(s0)| = {abs(P(s0)):.3e} above tolerance")
    return s0


# --------------------------------------------------------------------------
# equilibrium measures


@dataclass(frozen=True, eq=False)
class MarkovMeasure:
    system: BlockSystem
    stationary: np.ndarray
    kernel: np.ndarray
    rho: float
    left: np.ndarray
    right: np.ndarray

    def stationarity_residual(self) -> float:
        return float(np.max(np.abs(self.stationary @ self.kernel - self.stationary)))

    def entropy(self) -> float:
        K = self.kernel
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(K > 0, K * np.log(K), 0.0)
        return float(-(self.stationary @ terms.sum(axis=1)))

    def integrate(self, values: np.ndarray) -> float:
        return float(self.stationary @ values)


def _power_tight(B: np.ndarray):
    """Perron pair from the dense eigendecomposition, polished by power steps."""
    vals, vecs = np.linalg.eig(B)
    i = int(np.argmax(vals.real))
    v = np.abs(vecs[:, i].real)
    v /= v.sum()
    lam = float(vals[i].real)
    for _ in range(50):
        y = B @ v
        lam = y.sum()
        y /= lam
        if np.max(np.abs(y - v)) < 1e-17:
            v = y
            break
        v = y
    return lam, v


def equilibrium_measure(ts: TransitionSystem, potential: Union[Potential, Weights], t: float = 1.0) -> MarkovMeasure:
    """Markov measure for -t phi: kernel B r / (rho r), stationary l * r."""
    w = _weights(ts, potential)
    if not is_mixing(w.block):
        raise NotMixingError("equilibrium measure needs a mixing shift")
    B = transfer_matrix(w.block, w, t)
    rho, r = _power_tight(B)
    _, l = _power_tight(B.T)
    K = B * r[None, :] / (rho * r[:, None])
    K /= K.sum(axis=1, keepdims=True)
    pi = l * r
    pi /= pi.sum()
    return MarkovMeasure(w.block, pi, K, rho, l, r)


def variational_gap(ts: TransitionSystem, potential: Union[Potential, Weights], t: float = 1.0) -> float:
    """|h_mu + int(-t phi) dmu - P(-t phi)| for the Markov equilibrium measure."""
    w = _weights(ts, potential)
    mu = equilibrium_measure(ts, w, t)
    P = pressure(w.block, w, t).value
    return abs(mu.entropy() + mu.integrate(-t * w.block_values) - P)


@dataclass(frozen=True)
class DerivativeCheck:
    slope: float
    integral: float
    discrepancy: float


def pressure_derivative_check(ts: TransitionSystem, gamma: Potential, phi: Potential,
                              t0: float, h: float = 1e-4) -> DerivativeCheck:
    """d/dt P(phi + t gamma) at t0 by central difference against int gamma dmu."""
    if gamma.k != phi.k:
        raise PotentialError("potentials on different block levels")
    if h <= 0:
        raise ValueError("h must be positive")
    g = gamma.weights(ts)
    f = phi.weights(ts)

    def P(t):
        # pressure(-s psi) with s = -1 is the pressure of psi itself
        w = Weights(f.system, f.k, f.table + t * g.table)
        return pressure(w.block, w, -1.0).value

    slope = (P(t0 + h) - P(t0 - h)) / (2 * h)
    w0 = Weights(f.system, f.k, f.table + t0 * g.table)
    mu = equilibrium_measure(w0.block, w0, -1.0)
    integral = mu.integrate(g.block_values)
    return DerivativeCheck(slope, integral, abs(slope - integral))


# --------------------------------------------------------------------------
# boundary systems


@dataclass(frozen=True)
class BoundaryPressures:
    tile: float
    edge: float  # edge shift, first-letter color = curve_color
    edge_alt: float  # edge shift, the other first-letter color
    edge_color: float  # edge-color shift with the lifted edge potential
    edge_color_h: float  # edge-color shift with the h-map potential
    vertex: float

    def as_dict(self) -> Dict[str, float]:
        return dict(self.__dict__)

    @property
    def gap(self) -> float:
        return self.tile - max(self.edge, self.edge_alt, self.edge_color_h, self.vertex)


def boundary_pressures(rule: SubdivisionRule, potential: Potential, t: float = 1.0,
                       curve_color: Color = Color.white) -> BoundaryPressures:
    """Pressures of -t phi on the four systems (curve sides by the documented conventions)."""
    ts = tile_shift(rule)
    tile = pressure(ts, potential.weights(ts), t).value
    e1 = log_rho(edge_shift(rule), edge_weights(rule, potential, curve_color), t)
    e2 = log_rho(edge_shift(rule), edge_weights(rule, potential, curve_color.other()), t)
    lifted = log_rho(edge_color_shift(rule), lifted_edge_weights(rule, potential, curve_color), t)
    h = log_rho(edge_color_shift(rule), edge_color_weights(rule, potential), t)
    vw = vertex_weights(rule, potential, curve_color)
    vertex = vertex_pressure(vw, t)
    return BoundaryPressures(tile, e1, e2, lifted, h, vertex)


def vertex_pressure(w: Weights, t: float) -> float:
    """Pressure of -t phi on the functional graph: the largest cycle mean."""
    vs = w.system
    best = -math.inf
    for v in range(vs.size):
        x, cyc = v, []
        seen = set()
        while x not in seen:
            seen.add(x)
            cyc.append(x)
            x = vs.succ[x][0]
        if x == v:
            best = max(best, -t * math.fsum(float(w.table[y]) for y in cyc) / len(cyc) + 0.0)
    return best


# --------------------------------------------------------------------------
# temporal distance


class TemporalDistanceError(ValueError):
    pass


def _delta(ts: TransitionSystem, w: Weights, xi: Sequence[int], x: Sequence[int],
           y: Sequence[int], depth: int) -> Fraction:
    """Delta_{phi, xi}(x, y) truncated at depth, in exact rational arithmetic."""
    total = Fraction(0)
    for i in range(depth):
        if i >= len(xi):
            break
        past = list(reversed(xi[: i + 1]))  # xi_{-i}, ..., xi_0
        wx = (past + list(x))[: w.k]
        wy = (past + list(y))[: w.k]
        if len(wx) < w.k or len(wy) < w.k:
            raise TemporalDistanceError("addresses are too short for the potential level")
        total += Fraction(float(w.table[tuple(wx)])) - Fraction(float(w.table[tuple(wy)]))
    return total


def _check_backward(ts: TransitionSystem, xi: Sequence[int], name: str) -> None:
    for a, b in zip(xi, xi[1:]):
        if not ts.allows(b, a):
            raise TemporalDistanceError(f"{name} is not an admissible backward word")


def delta(ts: TransitionSystem, potential: Union[Potential, Weights], xi: Sequence[str],
          x: Sequence[str], y: Sequence[str], depth: Optional[int] = None) -> Fraction:
    w = _weights(ts, potential)
    idx = ts.label_index
    xi_i, x_i, y_i = ([idx[s] for s in seq] for seq in (xi, x, y))
    _check_backward(ts, xi_i, "xi")
    if not ts.admissible(x_i) or not ts.admissible(y_i):
        raise TemporalDistanceError("x or y is not admissible")
    if x_i[0] != y_i[0]:
        raise TemporalDistanceError("x and y are not in a common 1-tile")
    if not ts.allows(xi_i[0], x_i[0]):
        raise TemporalDistanceError("the tile of x is not inside f(xi_0)")
    depth = w.k if depth is None else depth
    if depth < w.k:
        raise TemporalDistanceError("depth below the potential block level")
    return _delta(ts, w, xi_i, x_i, y_i, depth)


def temporal_distance(ts: TransitionSystem, potential: Union[Potential, Weights],
                      xi: Sequence[str], eta: Sequence[str], x: Sequence[str], y: Sequence[str],
                      depth: Optional[int] = None, exact: bool = False):
    idx = ts.label_index
    if not xi or not eta:
        raise TemporalDistanceError("backward words must be nonempty")
    s = ts.succ
    if set(s[idx[xi[0]]]) != set(s[idx[eta[0]]]):
        raise TemporalDistanceError("f(xi_0) and f(eta_0) differ (image colors do not match)")
    d = delta(ts, potential, xi, x, y, depth) - delta(ts, potential, eta, x, y, depth)
    return d if exact else float(d)


# --------------------------------------------------------------------------
# cohomology screen


@dataclass(frozen=True)
class CohomologyVerdict:
    constant: bool
    K: Optional[float]
    witness: Tuple = ()  # two OrbitRecords with different means
    means: Tuple[float, float] = ()


def cohomology_test(rule: SubdivisionRule, potential: Potential, n_max: int = 6,
                    orbits: Optional[OrbitTable] = None, tol: float = 1e-12,
                    cap: int = DEFAULT_CAP) -> CohomologyVerdict:
    """Compare l_phi(tau) / period over all primitive orbits up to n_max."""
    tab = orbits or primitive_orbits(rule, n_max, potential, cap=cap)
    means = tab.weight / tab.period
    i, j = int(np.argmin(means)), int(np.argmax(means))
    if means[j] - means[i] <= tol * max(1.0, abs(means[j])):
        vals = list(potential.values.values())
        K = vals[0] if potential.is_constant() else float(np.median(means))
        return CohomologyVerdict(True, K)
    return CohomologyVerdict(False, None, (tab.record(i), tab.record(j)), (float(means[i]), float(means[j])))

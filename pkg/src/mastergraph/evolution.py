"""Time evolution ``p_t = expm(G t) p0``.

The primary route is uniformization: with ``L >= max |G_jj|`` the matrix
``P = I + G / L`` is column-stochastic and nonnegative, and

    expm(G t) = sum_k Poisson(k; L t) P^k

so every partial sum is a nonnegative matrix whose columns sum to at most
one.  ``scipy.linalg.expm`` (scaling and squaring) is kept as a cross-check.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.stats import poisson

from .errors import NegativeTime, NumericMismatch, TooLarge
from .network import StateNetwork, as_probability_vector, build_generator
from .steady_state import NULLITY_TOL, kernel_dimension

UNIFORMIZATION_FACTOR = 1.05
POISSON_TAIL = 1e-12
MASS_DEFECT_TOL = 1e-10
SPECTRAL_MAX_N = 200
EXPM_ORACLE_MAX_N = 50


def _check_time(t: float) -> float:
    t = float(t)
    if not t >= 0 or not math.isfinite(t):
        raise NegativeTime(f"time must be finite and >= 0, got {t!r}")
    return t


def uniformize(G: np.ndarray, X: np.ndarray, t: float) -> np.ndarray:
    """Apply ``expm(G t)`` to the vector or matrix ``X`` by uniformization."""
    t = _check_time(t)
    X = np.array(X, dtype=float)
    rate = UNIFORMIZATION_FACTOR * float(np.max(-np.diag(G), initial=0.0))
    if t == 0 or rate == 0:
        return X
    P = np.eye(G.shape[0]) + G / rate
    mu = rate * t
    last = int(poisson.isf(POISSON_TAIL, mu)) + 1
    cap = int(10 * mu + 50)
    if last > cap:
        raise TooLarge(f"uniformization needs {last} terms, cap is {cap}")
    weights = poisson.pmf(np.arange(last + 1), mu)
    # leading terms below this carry no representable mass
    first = int(np.argmax(weights > 1e-300 * weights.max()))
    term = X
    out = np.zeros_like(X)
    for k in range(last + 1):
        if k >= first:
            out += weights[k] * term
        if k < last:
            term = P @ term
    captured = math.fsum(weights)
    defect = np.abs(out.sum(axis=0) - captured * X.sum(axis=0)).max()
    if defect > MASS_DEFECT_TOL or 1.0 - captured > MASS_DEFECT_TOL:
        raise NumericMismatch(f"uniformization lost probability mass ({defect:.3g})")
    return out / captured


def evolve(net: StateNetwork, p0, t: float) -> np.ndarray:
    p0 = as_probability_vector(p0, net.n)
    return uniformize(build_generator(net), p0, t)


def solution_operator(net: StateNetwork, t: float, method: str = "uniformization") -> np.ndarray:
    """The full matrix ``expm(G t)``; columns are distributions."""
    t = _check_time(t)
    G = build_generator(net)
    if method == "expm":
        if net.n > EXPM_ORACLE_MAX_N:
            raise TooLarge(f"expm cross-check limited to {EXPM_ORACLE_MAX_N} states")
        return scipy.linalg.expm(G * t)
    if method != "uniformization":
        raise ValueError(f"unknown method {method!r}")
    return uniformize(G, np.eye(net.n), t)


@dataclass(frozen=True)
class PositivityBound:
    """Lower bound ``g t^d / d! * exp(G_min t)`` on ``expm(G t)[i, j]``.

    ``d`` is the shortest-path length from j to i and ``gamma_path`` the
    smallest rate product among those shortest paths.  ``d`` is None when
    no path exists, in which case the bound is 0.
    """

    i: int
    j: int
    t: float
    d: int | None
    gamma_path: float
    gamma_min: float
    bound: float


def positivity_lower_bound(net: StateNetwork, i, j, t: float) -> PositivityBound:
    t = _check_time(t)
    i, j = net.index(i), net.index(j)
    gamma_min = float(np.min(np.diag(build_generator(net))))

    dist = {j: 0}
    best = {j: 1.0}
    queue = deque([j])
    while queue:
        u = queue.popleft()
        for v in net.successors[u]:
            cand = best[u] * net.rates[(u, v)]
            if v not in dist:
                dist[v] = dist[u] + 1
                best[v] = cand
                queue.append(v)
            elif dist[v] == dist[u] + 1:
                best[v] = min(best[v], cand)

    if i not in dist:
        return PositivityBound(i, j, t, None, 0.0, gamma_min, 0.0)
    d, g = dist[i], best[i]
    if t == 0:
        bound = 1.0 if d == 0 else 0.0
    else:
        bound = math.exp(math.log(g) + d * math.log(t) - math.lgamma(d + 1) + gamma_min * t)
    return PositivityBound(i, j, t, d, g, gamma_min, bound)


@dataclass(frozen=True)
class SpectralReport:
    eigenvalues: np.ndarray
    max_real_part: float
    n_zero: int
    kernel_dimension: int


def spectral_sanity(net: StateNetwork) -> SpectralReport:
    """Eigenvalues of G: real parts <= 0 and as many zeros as sinks."""
    if net.n > SPECTRAL_MAX_N:
        raise TooLarge(f"dense eigensolve limited to {SPECTRAL_MAX_N} states")
    G = build_generator(net)
    eig = np.linalg.eigvals(G)
    norm = np.linalg.norm(G, 2)
    n_zero = int(np.sum(np.abs(eig) <= NULLITY_TOL * norm))
    dim = kernel_dimension(net)
    report = SpectralReport(eig, float(eig.real.max()), n_zero, dim)
    if report.max_real_part > 1e-10:
        raise NumericMismatch(f"eigenvalue with positive real part {report.max_real_part:.3g}")
    if n_zero != dim:
        raise NumericMismatch(f"{n_zero} zero eigenvalues but kernel dimension {dim}")
    return report

"""Kernel dimension, steady-state basis and limit distributions.

The number of independent stationary states equals the number of minimal
absorbing sets (sink components of the condensation).  Each sink carries
one stationary vector, supported exactly on that sink.  Starting from p0,
the long-time limit is the mixture of those vectors weighted by the
probability of ending up in each sink.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .arborescence import DEFAULT_CAP, stationary_via_trees
from .connectivity import Condensation, condense
from .dominance import check_condensation, transient_states
from .errors import NumericMismatch, SingularTransientBlock
from .network import StateNetwork, as_probability_vector, build_generator

NULLITY_TOL = 1e-9
KERNEL_RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class BlockPermutation:
    """State order with transient states first, then each sink contiguously."""

    order: tuple[int, ...]
    block_sizes: tuple[int, ...]

    @property
    def n_transient(self) -> int:
        return self.block_sizes[0]

    def blocks(self) -> list[tuple[int, ...]]:
        out, start = [], 0
        for size in self.block_sizes:
            out.append(self.order[start:start + size])
            start += size
        return out

    def apply(self, G: np.ndarray) -> np.ndarray:
        idx = np.asarray(self.order, dtype=int)
        return G[np.ix_(idx, idx)]


@dataclass(frozen=True)
class SteadyStateBasis:
    vectors: np.ndarray                     # shape (n, N), one row per sink
    supports: tuple[tuple[int, ...], ...]
    methods: tuple[str, ...]                # "trees" or "nullspace" per vector

    def __len__(self) -> int:
        return len(self.supports)

    @property
    def method(self) -> str:
        kinds = set(self.methods)
        return kinds.pop() if len(kinds) == 1 else "mixed"


@dataclass(frozen=True)
class LimitResult:
    coefficients: np.ndarray                # weight of each basis vector
    p_infinity: np.ndarray


def block_permutation(net: StateNetwork, cond: Condensation | None = None) -> BlockPermutation:
    if cond is None:
        cond = condense(net)
    else:
        check_condensation(net, cond)
    transient = transient_states(net, cond)
    sinks = cond.sink_sets()
    perm = BlockPermutation(
        order=tuple(transient) + tuple(s for sink in sinks for s in sink),
        block_sizes=(len(transient),) + tuple(len(s) for s in sinks),
    )
    G = perm.apply(build_generator(net))
    start = perm.n_transient
    for size in perm.block_sizes[1:]:
        cols = G[:, start:start + size]
        outside = np.delete(cols, np.s_[start:start + size], axis=0)
        if np.any(outside != 0):
            raise AssertionError("permuted generator lacks the block-triangular zero pattern")
        start += size
    return perm


def numeric_nullity(G: np.ndarray, tol: float = NULLITY_TOL) -> int:
    """Singular values at or below ``tol * ||G||_2`` count toward the nullity."""
    sv = np.linalg.svd(G, compute_uv=False)
    return int(np.sum(sv <= tol * (sv[0] if sv.size else 0.0)))


def kernel_dimension(net: StateNetwork, cond: Condensation | None = None) -> int:
    """Number of minimal absorbing sets, cross-checked against the SVD nullity."""
    cond = condense(net) if cond is None else cond
    structural = len(cond.sinks)
    numeric = numeric_nullity(build_generator(net))
    if structural != numeric:
        raise NumericMismatch(
            f"{structural} minimal absorbing sets but numeric nullity {numeric}"
        )
    return structural


def is_relaxing(net: StateNetwork) -> bool:
    return kernel_dimension(net) == 1


def nullspace_stationary(net: StateNetwork) -> np.ndarray:
    """Stationary vector of a strongly connected network by a direct solve.

    One balance equation is redundant, so it is swapped for the
    normalization constraint.
    """
    G = build_generator(net)
    G[-1, :] = 1.0
    rhs = np.zeros(net.n)
    rhs[-1] = 1.0
    return np.linalg.solve(G, rhs)


def steady_state_basis(net: StateNetwork, cond: Condensation | None = None,
                       cap: int = DEFAULT_CAP) -> SteadyStateBasis:
    cond = condense(net) if cond is None else cond
    sinks = cond.sink_sets()
    vectors = np.zeros((len(sinks), net.n))
    methods = []
    for k, sink in enumerate(sinks):
        sub = net.subnetwork(sink)
        if len(sink) <= cap:
            q = stationary_via_trees(sub, cap=cap)
            methods.append("trees")
        else:
            q = nullspace_stationary(sub)
            methods.append("nullspace")
        vectors[k, list(sink)] = q
    return SteadyStateBasis(vectors, tuple(sinks), tuple(methods))


def absorption_probabilities(net: StateNetwork, cond: Condensation | None = None):
    """Probability of ending in each sink, for every transient start state.

    Returns ``(transient, A)`` with ``A[j, i]`` the probability that a walk
    started in ``transient[j]`` is eventually trapped in sink ``i``.  Solves
    ``T^T A = -R`` where ``T`` is the transient block of the generator and
    ``R[j, i]`` the total rate from ``transient[j]`` into sink ``i``.
    """
    cond = condense(net) if cond is None else cond
    transient = transient_states(net, cond)
    sinks = cond.sink_sets()
    if not transient:
        return transient, np.zeros((0, len(sinks)))
    G = build_generator(net)
    block = G[np.ix_(transient, transient)]
    feed = np.column_stack([G[np.ix_(list(sink), transient)].sum(axis=0) for sink in sinks])
    try:
        A = scipy.linalg.solve(block.T, -feed)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise SingularTransientBlock(f"transient block is singular: {exc}") from None
    if not np.all(np.isfinite(A)):
        raise SingularTransientBlock("absorption solve produced non-finite values")
    return transient, A


def limit_distribution(net: StateNetwork, p0, cond: Condensation | None = None,
                       basis: SteadyStateBasis | None = None) -> LimitResult:
    """Long-time limit of the Master equation started from ``p0``."""
    p0 = as_probability_vector(p0, net.n)
    cond = condense(net) if cond is None else cond
    basis = steady_state_basis(net, cond) if basis is None else basis
    coeffs = np.array([p0[list(sink)].sum() for sink in basis.supports])
    transient, A = absorption_probabilities(net, cond)
    if transient:
        coeffs = coeffs + p0[transient] @ A
    # rounding can leave -1e-17 where a sink is unreachable
    coeffs = np.where(np.abs(coeffs) < 1e-14, 0.0, coeffs)
    if np.any(coeffs < 0) or abs(coeffs.sum() - 1.0) > 1e-9:
        raise NumericMismatch(f"absorption weights {coeffs} are not a distribution")
    return LimitResult(coeffs, coeffs @ basis.vectors)

"""In-trees and the tree formula for stationary states.

For a strongly connected network the stationary vector has component m
proportional to the summed weight of all spanning in-trees rooted at m,
where a tree's weight is the product of its edge rates.  The same sum is
the principal minor of ``-G`` with row and column m removed, which gives an
independent route that scales to larger networks.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.special import logsumexp

from ._threads import thread_count
from .connectivity import condense
from .errors import NotStronglyConnected, TooLarge
from .network import StateNetwork, build_generator

DEFAULT_CAP = 10
OVERFLOW_WEIGHT = 1e300


@dataclass(frozen=True)
class InTree:
    """Spanning tree whose edges all point toward ``root``.

    ``parent[s]`` is the head of the unique tree edge leaving ``s``, and
    None for the root.
    """

    root: int
    parent: tuple[int | None, ...]
    weight: float
    log_weight: float

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(s, p) for s, p in enumerate(self.parent) if p is not None]

    def validate(self, net: StateNetwork) -> None:
        n = len(self.parent)
        if n != net.n or self.parent[self.root] is not None:
            raise AssertionError("root must be the only state without a tree edge")
        if len(self.edges) != n - 1:
            raise AssertionError(f"expected {n - 1} edges, got {len(self.edges)}")
        for s, p in self.edges:
            if (s, p) not in net.rates:
                raise AssertionError(f"tree edge {s}->{p} not in network")
        for s in range(n):
            v, steps = s, 0
            while v != self.root:
                v = self.parent[v]
                steps += 1
                if v is None or steps > n:
                    raise AssertionError(f"state {s} does not lead to the root")

    def to_json(self, net: StateNetwork) -> dict:
        return {
            "root": net.states[self.root],
            "edges": [[net.states[s], net.states[p]] for s, p in self.edges],
            "weight": self.weight,
        }


def _parent_vectors(net: StateNetwork, root: int):
    """Yield every acyclic parent assignment, lexicographically."""
    n = net.n
    nonroot = [s for s in range(n) if s != root]
    choices = [sorted(net.successors[s]) for s in nonroot]
    parent: list[int | None] = [None] * n

    def closes_cycle(s, target):
        v = target
        while True:
            if v == s:
                return True
            if v == root or parent[v] is None:
                return False
            v = parent[v]

    def assign(k):
        if k == len(nonroot):
            yield tuple(parent)
            return
        s = nonroot[k]
        for target in choices[k]:
            if closes_cycle(s, target):
                continue
            parent[s] = target
            yield from assign(k + 1)
            parent[s] = None

    yield from assign(0)


def enumerate_in_trees(net: StateNetwork, root, cap: int = DEFAULT_CAP) -> list[InTree]:
    """All spanning in-trees rooted at ``root``.

    Ordered lexicographically by the parent vector.  An empty list means no
    spanning in-tree exists.  Raises TooLarge when ``net.n > cap``.
    """
    if net.n > cap:
        raise TooLarge(f"in-tree enumeration capped at {cap} states, network has {net.n}")
    root = net.index(root)
    log_rate = {k: math.log(r) for k, r in net.rates.items()}
    trees = []
    for parent in _parent_vectors(net, root):
        pairs = [(s, p) for s, p in enumerate(parent) if p is not None]
        weight = math.prod(net.rates[e] for e in pairs)
        trees.append(InTree(root, parent, weight, math.fsum(log_rate[e] for e in pairs)))
    return trees


def _needs_log_space(trees: list[InTree]) -> bool:
    return any(not (0.0 < t.weight <= OVERFLOW_WEIGHT) for t in trees)


def tree_polynomials(net: StateNetwork, cap: int = DEFAULT_CAP) -> list[list[InTree]]:
    """Enumerated in-trees for every root, in root order."""
    roots = range(net.n)
    workers = min(thread_count(), net.n)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda r: enumerate_in_trees(net, r, cap), roots))
    return [enumerate_in_trees(net, r, cap) for r in roots]


def tree_polynomial_via_cofactor(net: StateNetwork, root) -> float:
    """Determinant of ``-G`` with the root's row and column deleted."""
    root = net.index(root)
    keep = [s for s in range(net.n) if s != root]
    if not keep:
        return 1.0
    minor = -build_generator(net)[np.ix_(keep, keep)]
    # LU with partial pivoting
    return float(scipy.linalg.det(minor))


def _log_cofactors(net: StateNetwork) -> np.ndarray:
    neg_g = -build_generator(net)
    out = np.empty(net.n)
    for root in range(net.n):
        keep = [s for s in range(net.n) if s != root]
        if not keep:
            out[root] = 0.0
            continue
        sign, logdet = np.linalg.slogdet(neg_g[np.ix_(keep, keep)])
        if sign <= 0:
            raise NotStronglyConnected(f"no spanning in-tree rooted at {net.states[root]!r}")
        out[root] = logdet
    return out


def stationary_via_trees(net: StateNetwork, cap: int = DEFAULT_CAP, method: str = "auto") -> np.ndarray:
    """Normalized stationary vector of a strongly connected network.

    ``method`` is ``"enumerate"``, ``"cofactor"`` or ``"auto"`` (enumerate
    up to ``cap`` states, cofactors beyond).
    """
    if condense(net).n_components != 1:
        raise NotStronglyConnected("the tree formula needs a strongly connected network")
    if method == "auto":
        method = "enumerate" if net.n <= cap else "cofactor"
    if method == "cofactor":
        logs = _log_cofactors(net)
        return np.exp(logs - logsumexp(logs))
    if method != "enumerate":
        raise ValueError(f"unknown method {method!r}")

    per_root = tree_polynomials(net, cap)
    if any(_needs_log_space(trees) for trees in per_root):
        logs = np.array([logsumexp([t.log_weight for t in trees]) for trees in per_root])
        return np.exp(logs - logsumexp(logs))
    sums = np.array([math.fsum(t.weight for t in trees) for trees in per_root])
    return sums / math.fsum(sums)

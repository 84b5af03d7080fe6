"""Reachability, connectivity classes and the SCC condensation.

Only topology matters here; rates are ignored.  Paths of length zero are
allowed, so a state always reaches itself.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptySet, IndexOutOfRange
from .network import StateNetwork, adjacency_matrix


class Connectivity(str, Enum):
    STRONG = "strong"
    UNILATERAL = "unilateral"
    WEAK = "weak"
    DISCONNECTED = "disconnected"


@dataclass(frozen=True)
class Condensation:
    """Strongly connected components contracted into a DAG.

    ``components`` are sorted tuples of state indices, ordered by their
    smallest member.  ``sinks`` index the components without outgoing DAG
    edges; they are exactly the minimal absorbing sets.
    """

    components: tuple[tuple[int, ...], ...]
    dag_edges: tuple[tuple[int, int], ...]
    sinks: tuple[int, ...]

    @property
    def n_components(self) -> int:
        return len(self.components)

    def component_of(self) -> list[int]:
        """Map state index -> component index."""
        owner = [0] * sum(len(c) for c in self.components)
        for k, comp in enumerate(self.components):
            for s in comp:
                owner[s] = k
        return owner

    def sink_sets(self) -> list[tuple[int, ...]]:
        return [self.components[k] for k in self.sinks]

    def to_json(self, net: StateNetwork) -> dict:
        return {
            "components": [net.labels(c) for c in self.components],
            "dag_edges": [list(e) for e in self.dag_edges],
            "sinks": list(self.sinks),
        }


def _bfs(adj: Sequence[Sequence[int]], start: int) -> list[int]:
    seen = [False] * len(adj)
    seen[start] = True
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                queue.append(v)
    return [i for i, flag in enumerate(seen) if flag]


def reach_from(net: StateNetwork, a) -> list[int]:
    """States reachable from ``a`` (including ``a`` itself)."""
    return _bfs(net.successors, net.index(a))


def reach_to(net: StateNetwork, a) -> list[int]:
    """States from which ``a`` is reachable (including ``a`` itself)."""
    return _bfs(net.predecessors, net.index(a))


def _check_set(net: StateNetwork, members: Iterable[int]) -> set[int]:
    members = {int(m) for m in members}
    if not members:
        raise EmptySet("state set must be nonempty")
    bad = [m for m in members if not 0 <= m < net.n]
    if bad:
        raise IndexOutOfRange(f"state indices {sorted(bad)} outside 0..{net.n - 1}")
    return members


def is_absorbing(net: StateNetwork, members: Iterable[int]) -> bool:
    """True iff no edge leaves ``members``."""
    inside = _check_set(net, members)
    return all(dst in inside for src, dst, _ in net.edges if src in inside)


def strongly_connected_components(succ: Sequence[Sequence[int]]) -> list[list[int]]:
    """Tarjan's algorithm, iterative so deep chains do not hit the recursion limit.

    Components come out in reverse topological order (sinks first).
    """
    n = len(succ)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    out: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, i = work[-1]
            if i < len(succ[v]):
                work[-1] = (v, i + 1)
                w = succ[v][i]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                out.append(comp)
    return out


def condense(net: StateNetwork) -> Condensation:
    comps = sorted((tuple(sorted(c)) for c in strongly_connected_components(net.successors)),
                   key=lambda c: c[0])
    owner = [0] * net.n
    for k, comp in enumerate(comps):
        for s in comp:
            owner[s] = k
    dag = sorted({(owner[s], owner[d]) for s, d, _ in net.edges if owner[s] != owner[d]})
    has_out = {i for i, _ in dag}
    sinks = tuple(k for k in range(len(comps)) if k not in has_out)
    return Condensation(tuple(comps), tuple(dag), sinks)


def topological_order(n_nodes: int, edges: Iterable[tuple[int, int]]) -> list[int]:
    """Kahn's algorithm; raises ValueError on a cycle."""
    succ = [[] for _ in range(n_nodes)]
    indeg = [0] * n_nodes
    for i, j in edges:
        succ[i].append(j)
        indeg[j] += 1
    ready = deque(k for k in range(n_nodes) if indeg[k] == 0)
    order = []
    while ready:
        u = ready.popleft()
        order.append(u)
        for v in succ[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                ready.append(v)
    if len(order) != n_nodes:
        raise ValueError("graph has a cycle")
    return order


def classify_connectivity(net: StateNetwork) -> Connectivity:
    cond = condense(net)
    if cond.n_components == 1:
        return Connectivity.STRONG
    # unilateral iff the condensation DAG has a Hamiltonian path, i.e. its
    # topological order is unique and consecutive macrostates are linked
    order = topological_order(cond.n_components, cond.dag_edges)
    links = set(cond.dag_edges)
    if all((a, b) in links for a, b in zip(order, order[1:])):
        return Connectivity.UNILATERAL
    undirected = [set() for _ in range(net.n)]
    for s, d, _ in net.edges:
        undirected[s].add(d)
        undirected[d].add(s)
    if len(_bfs([sorted(u) for u in undirected], 0)) == net.n:
        return Connectivity.WEAK
    return Connectivity.DISCONNECTED


def minimal_absorbing_sets(net: StateNetwork, cond: Condensation | None = None) -> list[tuple[int, ...]]:
    """Sink components of the condensation, ordered by smallest member."""
    cond = condense(net) if cond is None else cond
    sets = cond.sink_sets()
    for members in sets:
        if not is_absorbing(net, members):
            raise AssertionError(f"sink component {members} is not absorbing")
    return sets


def is_irreducible_adjacency(net: StateNetwork) -> bool:
    """True iff every entry of (I + A)^(N-1) is positive.

    Powers are taken by repeated squaring over the boolean semiring so
    entries never overflow.
    """
    reach = adjacency_matrix(net).astype(bool) | np.eye(net.n, dtype=bool)
    result = np.eye(net.n, dtype=bool)
    k = net.n - 1
    while k:
        if k & 1:
            result = (result.astype(np.int64) @ reach.astype(np.int64)) > 0
        reach = (reach.astype(np.int64) @ reach.astype(np.int64)) > 0
        k >>= 1
    return bool(result.all())

"""Worked example networks, random generators and brute-force oracles that
share no code paths with the package."""

import itertools

import numpy as np

from mastergraph.network import StateNetwork, from_edges

EIGHT_STATE_EDGES = [
    ("1", "2"), ("2", "1"), ("1", "3"), ("1", "4"), ("2", "6"),
    ("4", "5"), ("5", "4"), ("6", "7"), ("7", "8"), ("8", "6"),
]
EIGHT_STATE_TEXT = "".join(f"{s}\t{d}\t1\n" for s, d in EIGHT_STATE_EDGES)
LABELS_1_TO_8 = [str(k) for k in range(1, 9)]


def eight_state_net(rates=None, states=LABELS_1_TO_8):
    """Branching network with minimal absorbing sets {3}, {4,5}, {6,7,8}.

    ``rates`` maps (src, dst) label pairs to rates; missing pairs get 1.
    """
    rates = rates or {}
    return from_edges(((s, d, rates.get((s, d), 1.0)) for s, d in EIGHT_STATE_EDGES), states=states)


def three_state_net(g12=1.0, g21=1.0, g13=1.0, g32=1.0):
    return from_edges(
        [("1", "2", g12), ("2", "1", g21), ("1", "3", g13), ("3", "2", g32)],
        states=["1", "2", "3"],
    )


def by_label(net, vector):
    return {label: float(v) for label, v in zip(net.states, vector)}


def random_rate(rng):
    """Uniform on (0, 2]."""
    return 2.0 * (1.0 - rng.random())


def random_network(rng, n, p=0.25):
    edges = [
        (i, j, random_rate(rng))
        for i in range(n) for j in range(n)
        if i != j and rng.random() < p
    ]
    return StateNetwork(tuple(f"s{k}" for k in range(n)), tuple(edges))


def random_strong_network(rng, n, p=0.3):
    """Random network made strongly connected by a random Hamiltonian cycle."""
    order = rng.permutation(n)
    pairs = {(int(order[k]), int(order[(k + 1) % n])) for k in range(n)} if n > 1 else set()
    for i in range(n):
        for j in range(n):
            if i != j and rng.random() < p:
                pairs.add((i, j))
    edges = [(i, j, random_rate(rng)) for i, j in sorted(pairs)]
    return StateNetwork(tuple(f"s{k}" for k in range(n)), tuple(edges))


def symmetrize(net, rng):
    """Every edge gets a reverse edge with the same (fresh) rate."""
    pairs = {tuple(sorted((s, d))) for s, d, _ in net.edges}
    edges = []
    for a, b in sorted(pairs):
        r = random_rate(rng)
        edges += [(a, b, r), (b, a, r)]
    return StateNetwork(net.states, tuple(edges))


# --- oracles -----------------------------------------------------------------

def closure(net):
    """Reflexive-transitive reachability matrix R[a, b] = a reaches b (Warshall)."""
    R = np.eye(net.n, dtype=bool)
    for s, d, _ in net.edges:
        R[s, d] = True
    for k in range(net.n):
        R = R | (R[:, [k]] & R[[k], :])
    return R


def brute_absorbing(net, members):
    members = set(members)
    return not any(s in members and d not in members for s, d, _ in net.edges)


def brute_minimal_absorbing_sets(net):
    """Minimal absorbing sets by exhaustive subset search (small N only)."""
    absorbing = [
        set(c)
        for size in range(1, net.n + 1)
        for c in itertools.combinations(range(net.n), size)
        if brute_absorbing(net, c)
    ]
    minimal = [a for a in absorbing if not any(b < a for b in absorbing)]
    return sorted(tuple(sorted(m)) for m in minimal)


def brute_in_trees(net, root):
    """In-trees as frozensets of edges, from all (N-1)-edge subsets."""
    out = []
    pairs = [(s, d) for s, d, _ in net.edges]
    for subset in itertools.combinations(pairs, net.n - 1):
        heads = {}
        ok = True
        for s, d in subset:
            if s == root or s in heads:
                ok = False
                break
            heads[s] = d
        if not ok:
            continue
        for s in range(net.n):
            v, steps = s, 0
            while v != root and steps <= net.n:
                v = heads.get(v, -1)
                steps += 1
                if v == -1:
                    break
            if v != root:
                ok = False
                break
        if ok:
            out.append(frozenset(subset))
    return out


def svd_null_vector(G):
    """Kernel vector of a rank-(N-1) generator from the SVD, normalized to sum 1."""
    _, _, vt = np.linalg.svd(G)
    v = vt[-1]
    return v / v.sum()

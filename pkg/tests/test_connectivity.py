import numpy as np
import pytest

from mastergraph.connectivity import (
    Connectivity,
    classify_connectivity,
    condense,
    is_absorbing,
    is_irreducible_adjacency,
    minimal_absorbing_sets,
    reach_from,
    reach_to,
    topological_order,
)
from mastergraph.errors import EmptySet, IndexOutOfRange
from mastergraph.network import StateNetwork, from_edges

from helpers import (
    brute_minimal_absorbing_sets,
    closure,
    eight_state_net,
    random_network,
)


def labels(net, indices):
    return sorted(net.labels(indices), key=int)


def chain(n=3):
    return from_edges([(str(k), str(k + 1), 1.0) for k in range(1, n)])


def cycle(n=3):
    return from_edges([(str(k), str(k % n + 1), 1.0) for k in range(1, n + 1)])


ISOLATED = StateNetwork(("a",))
EDGELESS3 = StateNetwork(("a", "b", "c"))
MUTUAL = from_edges([("1", "2", 1.0), ("2", "1", 1.0)])


def test_reach_from_examples():
    net = eight_state_net()
    assert labels(net, reach_from(net, "2")) == [str(k) for k in range(1, 9)]
    assert labels(net, reach_from(net, "4")) == ["4", "5"]
    assert reach_from(ISOLATED, "a") == [0]


def test_reach_to_examples():
    net = eight_state_net()
    assert labels(net, reach_to(net, "3")) == ["1", "2", "3"]
    assert reach_to(ISOLATED, 0) == [0]
    assert labels(MUTUAL, reach_to(MUTUAL, "1")) == ["1", "2"]


def test_reach_unknown_state():
    with pytest.raises(IndexOutOfRange):
        reach_from(MUTUAL, "9")
    with pytest.raises(IndexOutOfRange):
        reach_to(MUTUAL, 5)


def test_classify_examples():
    two_sources = from_edges([("a", "c", 1.0), ("b", "c", 1.0)])
    assert classify_connectivity(two_sources) is Connectivity.WEAK
    assert classify_connectivity(chain()) is Connectivity.UNILATERAL
    assert classify_connectivity(cycle()) is Connectivity.STRONG
    assert classify_connectivity(EDGELESS3) is Connectivity.DISCONNECTED
    assert classify_connectivity(ISOLATED) is Connectivity.STRONG


def test_condense_eight_state():
    net = eight_state_net()
    cond = condense(net)
    assert [labels(net, c) for c in cond.components] == [["1", "2"], ["3"], ["4", "5"], ["6", "7", "8"]]
    assert [labels(net, cond.components[k]) for k in cond.sinks] == [["3"], ["4", "5"], ["6", "7", "8"]]
    assert cond.dag_edges == ((0, 1), (0, 2), (0, 3))


def test_condense_trivial_cases():
    cond = condense(cycle(5))
    assert cond.n_components == 1 and cond.dag_edges == () and cond.sinks == (0,)
    cond = condense(EDGELESS3)
    assert cond.components == ((0,), (1,), (2,)) and cond.sinks == (0, 1, 2)


def test_condensation_json():
    net = eight_state_net()
    doc = condense(net).to_json(net)
    assert doc == {
        "components": [["1", "2"], ["3"], ["4", "5"], ["6", "7", "8"]],
        "dag_edges": [[0, 1], [0, 2], [0, 3]],
        "sinks": [1, 2, 3],
    }


def test_minimal_absorbing_examples():
    net = eight_state_net()
    assert [labels(net, s) for s in minimal_absorbing_sets(net)] == [["3"], ["4", "5"], ["6", "7", "8"]]
    assert minimal_absorbing_sets(cycle()) == [(0, 1, 2)]
    assert [labels(chain(), s) for s in minimal_absorbing_sets(chain())] == [["3"]]


def test_is_absorbing_examples():
    net = eight_state_net()
    assert is_absorbing(net, [3, 4])                # {4, 5}
    assert not is_absorbing(net, [0, 1])            # {1, 2}: 1->3, 1->4, 2->6 leave
    assert is_absorbing(net, range(8))
    with pytest.raises(EmptySet):
        is_absorbing(net, [])


def test_irreducible_examples():
    assert is_irreducible_adjacency(MUTUAL)
    assert not is_irreducible_adjacency(chain(2))
    assert not is_irreducible_adjacency(eight_state_net())
    assert is_irreducible_adjacency(ISOLATED)


def test_deep_chain_does_not_recurse():
    net = chain(5000)
    cond = condense(net)
    assert cond.n_components == 5000
    assert cond.sinks == (4999,)


def test_topological_order_rejects_cycle():
    with pytest.raises(ValueError):
        topological_order(2, [(0, 1), (1, 0)])


def _battery(seed, count, max_n):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        yield random_network(rng, int(rng.integers(1, max_n + 1)), p=float(rng.uniform(0.05, 0.5)))


@pytest.mark.parametrize("net", list(_battery(1, 100, 12)))
def test_reach_sets_are_absorbing(net):
    R = closure(net)
    for a in range(net.n):
        forward = reach_from(net, a)
        backward = reach_to(net, a)
        assert forward == list(np.flatnonzero(R[a]))
        assert backward == list(np.flatnonzero(R[:, a]))
        assert is_absorbing(net, forward)
        complement = sorted(set(range(net.n)) - set(backward))
        if complement:
            assert is_absorbing(net, complement)


@pytest.mark.parametrize("net", list(_battery(2, 150, 9)))
def test_condensation_against_mutual_reachability(net):
    R = closure(net)
    mutual = R & R.T
    expected = sorted({tuple(np.flatnonzero(row)) for row in mutual}, key=lambda c: c[0])
    cond = condense(net)
    assert list(cond.components) == expected
    topological_order(cond.n_components, cond.dag_edges)   # acyclic
    outdeg = {i for i, _ in cond.dag_edges}
    assert set(cond.sinks) == set(range(cond.n_components)) - outdeg

    sets = minimal_absorbing_sets(net, cond)
    assert sorted(sets) == brute_minimal_absorbing_sets(net)
    for members in sets:
        assert classify_connectivity(net.subnetwork(members)) is Connectivity.STRONG
    for w in range(net.n):
        assert any(set(reach_from(net, w)) & set(s) for s in sets)


@pytest.mark.parametrize("net", list(_battery(3, 200, 10)))
def test_classification_and_irreducibility(net):
    R = closure(net)
    if R.all():
        expected = Connectivity.STRONG
    elif (R | R.T).all():
        expected = Connectivity.UNILATERAL
    else:
        U = R.copy()
        sym = np.zeros_like(R)
        for s, d, _ in net.edges:
            sym[s, d] = sym[d, s] = True
        U = np.eye(net.n, dtype=bool) | sym
        for k in range(net.n):
            U = U | (U[:, [k]] & U[[k], :])
        expected = Connectivity.WEAK if U.all() else Connectivity.DISCONNECTED
    assert classify_connectivity(net) is expected
    assert is_irreducible_adjacency(net) == (condense(net).n_components == 1)

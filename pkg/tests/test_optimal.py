import numpy as np
import pytest

from ef1reform import INFINITY, Allocation, Instance, Unreformable, WrongUtilityClass
from ef1reform.core import is_ef1, is_ef1_pair, replay, size_vector
from ef1reform.generators import reduce
from ef1reform.oracle import exchange_distance_bfs, min_exchanges_bfs
from ef1reform.optimal import (
    ExchangeGraph,
    circuit_decomposition,
    enumerate_movements,
    exchange_distance_exact,
    exchange_sequence,
    identical_binary_counts,
    max_circuit_partition,
    optimal_binary_const,
    optimal_exchanges,
    optimal_exchanges_with_method,
    optimal_identical_binary,
    optimal_two_identical,
)
from ef1reform.reformability import enumerate_ef1_classes

from corpora import identical_binary_allocations, owned_goods, random_pairs, two_bundle_identical
from sources import X3C

U6 = Instance.identical([5, 4, 3, 2, 1, 0])


def _zero(n, m):
    return Instance([[0] * m] * n)


def test_exchange_graph():
    a = Allocation([[0, 1], [2], [3]])
    b = Allocation([[0, 2], [3], [1]])
    g = ExchangeGraph.between(a, b)
    assert g.weights == ((1, 0, 1), (1, 0, 0), (0, 1, 0))
    assert g.num_edges == 4 and g.is_balanced()
    assert max_circuit_partition(g) == 2
    assert circuit_decomposition(g) == [(0, 2, 1)]
    with pytest.raises(ValueError):
        max_circuit_partition(ExchangeGraph(((0, 1), (0, 0))))


def test_distance_examples():
    a = Allocation([[0], [1], [2]])
    assert exchange_distance_exact(a, a) == 0
    assert exchange_distance_exact(a, Allocation([[1], [0], [2]])) == 1
    assert exchange_distance_exact(a, Allocation([[1], [2], [0]])) == 2
    assert exchange_distance_exact(a, Allocation([[0, 1], [2], []])) == INFINITY
    with pytest.raises(ValueError):
        exchange_distance_exact(a, Allocation([[0], [1], [2, 3]]))


def test_two_cycles_beat_one_long_circuit():
    # 0->1->0 twice versus one 4-edge circuit: the packing must find both 2-cycles
    a = Allocation([[0, 1], [2, 3]])
    b = Allocation([[2, 3], [0, 1]])
    assert exchange_distance_exact(a, b) == 2 == exchange_distance_bfs(_zero(2, 4), a, b)
    # figure-eight through agent 0: two 2-cycles, not one 4-cycle
    a = Allocation([[0, 1], [2], [3]])
    b = Allocation([[2, 3], [0], [1]])
    assert exchange_distance_exact(a, b) == 2 == exchange_distance_bfs(_zero(3, 4), a, b)


def test_distance_matches_bfs_sample():
    for a, b in random_pairs(2, 200, 4, 7):
        inst = _zero(a.num_agents, a.num_goods)
        assert exchange_distance_exact(a, b) == exchange_distance_bfs(inst, a, b)


def test_exchange_sequence_replays():
    for a, b in random_pairs(3, 300, 4, 8):
        steps = exchange_sequence(a, b)
        assert replay(a, steps) == b
        assert len(steps) == exchange_distance_exact(a, b)
    with pytest.raises(ValueError):
        exchange_sequence(Allocation([[0], [1]]), Allocation([[0, 1], []]))


def test_dispatcher_examples():
    assert optimal_exchanges(U6, Allocation([[0, 5, 1], [2, 3, 4]])) == 0
    assert optimal_exchanges(U6, Allocation([[0, 1, 2], [3, 4, 5]])) == 1
    assert optimal_exchanges(Instance.identical([2, 2, 2, 2]), Allocation([[0], [1, 2, 3]])) == INFINITY
    _, trace, method = optimal_exchanges_with_method(Instance.identical([2, 2, 2, 2]), Allocation([[0], [1, 2, 3]]))
    assert trace is None and method == "unreformable"


def test_dispatcher_methods_and_traces():
    cases = [
        (U6, Allocation([[0, 1, 2], [3, 4, 5]]), "two-identical"),
        (Instance.identical([1, 1, 1, 0, 0, 0]), Allocation([[0, 1, 2], [3, 4, 5]]), "identical-binary"),
        (Instance([[1, 1, 0, 0], [1, 1, 0, 1]]), Allocation([[2, 3], [0, 1]]), "binary-classes"),
        (Instance([[3, 3, 0, 1], [2, 1, 0, 4]]), Allocation([[2, 3], [0, 1]]), "oracle"),
    ]
    for inst, start, method in cases:
        count, trace, got = optimal_exchanges_with_method(inst, start)
        assert got == method
        assert count == min_exchanges_bfs(inst, start) == len(trace)
        assert is_ef1(inst, replay(start, trace))
    count, trace, got = optimal_exchanges_with_method(U6, Allocation([[0, 1, 2], [3, 4, 5]]), force_oracle=True)
    assert (count, got) == (1, "oracle")


def test_two_identical_examples():
    count, trace = optimal_two_identical(U6, Allocation([[0, 1, 2], [3, 4, 5]]))
    assert count == 1 and str(trace[0]) == "(0,1) 0<->5"
    assert optimal_two_identical(U6, Allocation([[0, 5, 1], [2, 3, 4]])) == (0, [])
    with pytest.raises(Unreformable):
        optimal_two_identical(Instance.identical([2, 2, 2, 2]), Allocation([[0], [1, 2, 3]]))
    with pytest.raises(WrongUtilityClass):
        optimal_two_identical(Instance([[1, 0], [0, 1]]), Allocation([[0], [1]]))


def test_two_identical_matches_bfs_and_keeps_rich_ef1():
    for inst, start in two_bundle_identical(3, 3):
        try:
            count, trace = optimal_two_identical(inst, start)
        except Unreformable:
            assert min_exchanges_bfs(inst, start) == INFINITY
            continue
        assert count == min_exchanges_bfs(inst, start)
        if not trace:
            continue
        rich = trace[0].agent_a
        alloc = start
        for step in trace:
            alloc = replay(alloc, [step])
            assert is_ef1_pair(inst, alloc, rich, 1 - rich)
        assert is_ef1(inst, alloc)


def test_identical_binary_examples():
    inst = Instance.identical([1, 1, 1, 0, 1, 0])
    start = Allocation([[0, 1, 2], [3, 4, 5]])
    assert identical_binary_counts(inst, start) == (2, 1, 0)
    count, trace = optimal_identical_binary(inst, start)
    assert count == 1 == min_exchanges_bfs(inst, start)
    inst = Instance.identical([1, 1, 1, 0, 0, 0], 3)
    start = Allocation([[0, 1], [2, 3], [4, 5]])
    assert optimal_identical_binary(inst, start)[0] == 1
    inst = Instance.identical([1, 0, 1, 0], 2)
    assert optimal_identical_binary(inst, Allocation([[0, 1], [2, 3]])) == (0, [])
    with pytest.raises(Unreformable):
        optimal_identical_binary(Instance.identical([1, 1, 1, 1]), Allocation([[0], [1, 2, 3]]))


def test_identical_binary_matches_bfs_small():
    for n, max_s in ((2, 3), (3, 2)):
        for inst, start in identical_binary_allocations(n, max_s):
            try:
                count, trace = optimal_identical_binary(inst, start)
            except Unreformable:
                assert min_exchanges_bfs(inst, start) == INFINITY
                continue
            assert count == min_exchanges_bfs(inst, start) == len(trace)
            assert is_ef1(inst, replay(start, trace))


def test_movements_cover_the_class():
    inst = Instance([[1, 1, 0, 0], [0, 1, 1, 1]])
    start = Allocation([[2, 3], [0, 1]])
    for cls in enumerate_ef1_classes(inst, size_vector(start)):
        moves = list(enumerate_movements(inst, start, cls))
        assert moves
        assert len(set(moves)) == len(moves)
        for mv in moves:
            w = mv.weights(2)
            assert [sum(r) for r in w] == list(size_vector(start))
            assert ExchangeGraph(w).is_balanced()


def test_binary_const_by_movement_enumeration():
    # scoring every movement of every class individually gives the same minimum
    rng = np.random.default_rng(6)
    for _ in range(80):
        n = int(rng.integers(2, 4))
        m = int(rng.integers(2, 7))
        inst = Instance(rng.integers(0, 2, size=(n, m)).tolist())
        start = Allocation.from_owners(rng.integers(0, n, size=m).tolist(), n)
        best = INFINITY
        for cls in enumerate_ef1_classes(inst, size_vector(start)):
            for mv in enumerate_movements(inst, start, cls):
                w = mv.weights(n)
                best = min(best, m - max_circuit_partition(ExchangeGraph(w)))
        assert optimal_binary_const(inst, start) == best


def test_binary_const_matches_bfs_small():
    kinds2 = [(0, 0), (1, 0), (0, 1), (1, 1)]
    for m in range(1, 5):
        for inst, start in owned_goods(2, m, kinds2):
            count, trace = optimal_binary_const(inst, start, with_trace=True)
            assert count == min_exchanges_bfs(inst, start)
            if trace is not None:
                assert len(trace) == count and is_ef1(inst, replay(start, trace))


def test_binary_const_examples():
    inst = Instance([[1, 0, 1, 0], [0, 1, 0, 1]])
    assert optimal_binary_const(inst, Allocation([[0, 1], [2, 3]])) == 0
    assert optimal_binary_const(Instance([[1, 1, 0], [1, 1, 0]]), Allocation([[], [0, 1, 2]])) == INFINITY
    assert optimal_binary_const(Instance([[1, 1, 0], [1, 1, 0]]), Allocation([[], [0, 1, 2]]), with_trace=True) == (
        INFINITY, None)


def test_exact_cover_reduction_needs_q_exchanges():
    src, answer = X3C[0]
    assert answer
    red = reduce(src, "binary-general-optimal")
    q = src.payload["elements"] // 3
    assert optimal_binary_const(red.instance, red.initial_allocation) == q
    assert min_exchanges_bfs(red.instance, red.initial_allocation) == q

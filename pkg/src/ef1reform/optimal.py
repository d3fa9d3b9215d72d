"""Minimum number of exchanges to reach an EF1 allocation.

The distance between two allocations with the same size vector is
``m - c*`` where ``c*`` is the largest number of circuits the item exchange
graph (one edge per good, from its current to its target holder) can be
split into.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

from .core import (
    DEFAULT_BUDGET,
    INFINITY,
    Allocation,
    BudgetExceeded,
    ExchangeStep,
    Instance,
    Unreformable,
    WrongUtilityClass,
    apply_exchange,
    check_consistent,
    classify_utilities,
    is_ef1,
    is_ef1_pair,
    size_vector,
)
from .oracle import shortest_ef1_path
from .reformability import (
    TypeCountMatrix,
    compositions,
    enumerate_ef1_classes,
    good_types,
    reformable,
    reformable_identical_binary,
    reformable_two_identical,
)


# --- exchange graph and circuit packing -------------------------------------------


@dataclass(frozen=True)
class ExchangeGraph:
    """Agent multigraph with an edge ``holder -> target holder`` per good.

    ``weights[i][j]`` counts the goods moving from i to j (diagonal: goods
    that stay put).
    """

    weights: tuple[tuple[int, ...], ...]

    @classmethod
    def between(cls, start: Allocation, target: Allocation) -> ExchangeGraph:
        n = start.num_agents
        w = [[0] * n for _ in range(n)]
        dest = target.owners()
        for i, bundle in enumerate(start.bundles):
            for g in bundle:
                w[i][dest[g]] += 1
        return cls(tuple(tuple(r) for r in w))

    @property
    def num_edges(self) -> int:
        return sum(map(sum, self.weights))

    def is_balanced(self) -> bool:
        n = len(self.weights)
        return all(sum(self.weights[i]) == sum(self.weights[j][i] for j in range(n)) for i in range(n))


def _cycles_through(w: tuple[int, ...], n: int, i: int, j: int) -> Iterator[tuple[int, ...]]:
    """Simple cycles ``i -> j -> ... -> i`` as vertex tuples starting at i."""
    path = [i, j]
    if j == i:
        return

    def rec(v: int):
        if w[v * n + i]:
            yield tuple(path)
        for x in range(n):
            if x != i and x not in path and w[v * n + x]:
                path.append(x)
                yield from rec(x)
                path.pop()

    yield from rec(j)


def _remove_cycle(w: tuple[int, ...], n: int, cyc: tuple[int, ...]) -> tuple[int, ...]:
    out = list(w)
    for k, v in enumerate(cyc):
        out[v * n + cyc[(k + 1) % len(cyc)]] -= 1
    return tuple(out)


@lru_cache(maxsize=200_000)
def _max_cycles(w: tuple[int, ...], n: int) -> int:
    """Largest number of simple cycles partitioning a balanced loopless multigraph."""
    first = next((k for k, x in enumerate(w) if x), None)
    if first is None:
        return 0
    i, j = divmod(first, n)
    ceiling = sum(w) // 2
    best = 0
    for cyc in _cycles_through(w, n, i, j):
        best = max(best, 1 + _max_cycles(_remove_cycle(w, n, cyc), n))
        if best == ceiling:
            break
    return best


def _offdiag(weights) -> tuple[tuple[int, ...], int]:
    n = len(weights)
    flat = tuple(0 if a == b else weights[a][b] for a in range(n) for b in range(n))
    return flat, n


def max_circuit_partition(graph: ExchangeGraph) -> int:
    """``c*``: self-loops count one each, the rest by exact branch and bound."""
    if not graph.is_balanced():
        raise ValueError("exchange graph is not balanced")
    loops = sum(graph.weights[i][i] for i in range(len(graph.weights)))
    return loops + _max_cycles(*_offdiag(graph.weights))


def circuit_decomposition(graph: ExchangeGraph) -> list[tuple[int, ...]]:
    """A maximum partition of the non-loop edges into simple cycles."""
    w, n = _offdiag(graph.weights)
    out = []
    while any(w):
        first = next(k for k, x in enumerate(w) if x)
        i, j = divmod(first, n)
        target = _max_cycles(w, n)
        for cyc in _cycles_through(w, n, i, j):
            rest = _remove_cycle(w, n, cyc)
            if 1 + _max_cycles(rest, n) == target:
                out.append(cyc)
                w = rest
                break
    return out


def _same_goods(start: Allocation, target: Allocation) -> None:
    if start.num_agents != target.num_agents or start.num_goods != target.num_goods:
        raise ValueError("allocations are over different agents or goods")


def exchange_distance_exact(start: Allocation, target: Allocation):
    """Exact exchange distance ``m - c*``; infinite when size vectors differ."""
    _same_goods(start, target)
    if size_vector(start) != size_vector(target):
        return INFINITY
    g = ExchangeGraph.between(start, target)
    return start.num_goods - max_circuit_partition(g)


def exchange_sequence(start: Allocation, target: Allocation) -> list[ExchangeStep]:
    """A shortest exchange sequence from ``start`` to ``target``.

    Each cycle ``v0 -> v1 -> ... -> v(L-1)`` is closed with L-1 swaps all
    involving v0.
    """
    _same_goods(start, target)
    if size_vector(start) != size_vector(target):
        raise ValueError("size vectors differ, target is unreachable")
    dest = target.owners()
    pool: dict[tuple[int, int], list[int]] = {}
    for i, bundle in enumerate(start.bundles):
        for g in bundle:
            if dest[g] != i:
                pool.setdefault((i, dest[g]), []).append(g)
    steps = []
    for cyc in circuit_decomposition(ExchangeGraph.between(start, target)):
        L = len(cyc)
        goods = [pool[(cyc[k], cyc[(k + 1) % L])].pop(0) for k in range(L)]
        hub = cyc[0]
        carried = goods[0]
        for k in range(1, L):
            steps.append(ExchangeStep(hub, cyc[k], carried, goods[k]))
            carried = goods[k]
    return steps


# --- two agents, identical utilities ------------------------------------------------


def optimal_two_identical(inst: Instance, start: Allocation):
    """Greedy: the richer agent hands over its best good for the poorer agent's worst.

    Returns ``(count, trace)``; the count is optimal.
    """
    check_consistent(inst, start)
    if inst.num_agents != 2 or not inst.is_identical():
        raise WrongUtilityClass("needs two agents with identical utilities")
    if not reformable_two_identical(inst, size_vector(start)):
        raise Unreformable("no EF1 allocation with this size vector")
    u = inst.utilities[0]
    alloc = start
    trace: list[ExchangeStep] = []
    if is_ef1(inst, alloc):
        return 0, trace
    poor = 0 if inst.value(0, alloc.bundles[0]) < inst.value(0, alloc.bundles[1]) else 1
    rich = 1 - poor
    while not is_ef1_pair(inst, alloc, poor, rich):
        if len(trace) > inst.num_goods:
            raise AssertionError("greedy failed to terminate")
        g = min(alloc.bundles[rich], key=lambda x: (-u[x], x))
        h = min(alloc.bundles[poor], key=lambda x: (u[x], x))
        step = ExchangeStep(rich, poor, g, h)
        alloc = apply_exchange(alloc, step)
        trace.append(step)
    return len(trace), trace


# --- identical binary utilities ------------------------------------------------------


def identical_binary_counts(inst: Instance, start: Allocation) -> tuple[int, int, int]:
    """``(F, c0, c1)``: EF1 target band [F, F+1] and the deficit/surplus sums."""
    u = inst.utilities[0]
    n = inst.num_agents
    v = [sum(u[g] for g in b) for b in start.bundles]
    F = sum(u) // n
    c0 = sum(F - x for x in v if x <= F)
    c1 = sum(x - (F + 1) for x in v if x >= F + 1)
    return F, c0, c1


def optimal_identical_binary(inst: Instance, start: Allocation):
    """``max(c0, c1)`` plus a witness trace of exactly that length."""
    check_consistent(inst, start)
    if classify_utilities(inst).value != "identical-binary":
        raise WrongUtilityClass("needs identical binary utilities")
    if not reformable_identical_binary(inst, size_vector(start)):
        raise Unreformable("too many valuable goods for this size vector")
    u = inst.utilities[0]
    F, c0, c1 = identical_binary_counts(inst, start)
    alloc = start
    trace: list[ExchangeStep] = []

    def val(a):
        return sum(u[g] for g in alloc.bundles[a])

    n = inst.num_agents
    while not all(F <= val(a) <= F + 1 for a in range(n)):
        givers = [a for a in range(n) if any(u[g] for g in alloc.bundles[a])]
        giver = min(givers, key=lambda a: (-val(a), a))
        takers = [a for a in range(n) if a != giver and any(not u[g] for g in alloc.bundles[a])]
        taker = min(takers, key=lambda a: (val(a), a))
        g = min(x for x in alloc.bundles[giver] if u[x])
        h = min(x for x in alloc.bundles[taker] if not u[x])
        step = ExchangeStep(giver, taker, g, h)
        alloc = apply_exchange(alloc, step)
        trace.append(step)
    assert len(trace) == max(c0, c1)
    return max(c0, c1), trace


# --- constant number of agents, binary utilities ---------------------------------


@dataclass(frozen=True)
class Movement:
    """For each (source agent, good type), how many goods go to each agent."""

    shipments: tuple[tuple[tuple[int, int], tuple[int, ...]], ...]

    def weights(self, n: int) -> tuple[tuple[int, ...], ...]:
        w = [[0] * n for _ in range(n)]
        for (i, _), vec in self.shipments:
            for j, k in enumerate(vec):
                w[i][j] += k
        return tuple(tuple(r) for r in w)


def _holdings(inst: Instance, start: Allocation) -> dict[int, list[int]]:
    """Per type, how many goods of that type each agent holds at the start."""
    owners = start.owners()
    out = {}
    for t, goods in good_types(inst).items():
        h = [0] * inst.num_agents
        for g in goods:
            h[owners[g]] += 1
        out[t] = h
    return out


def _transport(rows: Sequence[int], cols: Sequence[int]) -> tuple[tuple[tuple[int, ...], ...], ...]:
    """Non-negative integer matrices with given row and column sums, lexicographic by row."""
    return _transport_cached(tuple(rows), tuple(cols))


@lru_cache(maxsize=100_000)
def _transport_cached(rows: tuple[int, ...], cols: tuple[int, ...]) -> tuple[tuple[tuple[int, ...], ...], ...]:
    if not rows:
        return ((),) if not any(cols) else ()
    if len(rows) == 1:
        # the last row must take exactly what is left
        return (((*cols,),),) if sum(cols) == rows[0] else ()
    out = []
    for comp in compositions(rows[0], len(cols), cols):
        rest = tuple(c - x for c, x in zip(cols, comp))
        for tail in _transport_cached(rows[1:], rest):
            out.append((comp,) + tail)
    return tuple(out)


def enumerate_movements(inst: Instance, start: Allocation, target: TypeCountMatrix) -> Iterator[Movement]:
    """All movements from ``start`` into the class ``target``.

    Order: source agents ascending, then types ascending, destination
    compositions lexicographic.
    """
    hold = _holdings(inst, start)
    tgt = target.as_dict()
    types = list(hold)
    n = inst.num_agents
    keys = [(i, t) for i in range(n) for t in types]
    left = {t: list(tgt[t]) for t in types}
    acc: list[tuple[tuple[int, int], tuple[int, ...]]] = []

    def rec(k: int):
        if k == len(keys):
            if all(not any(v) for v in left.values()):
                yield Movement(tuple(acc))
            return
        i, t = keys[k]
        for comp in compositions(hold[t][i], n, left[t]):
            for j, x in enumerate(comp):
                left[t][j] -= x
            acc.append(((i, t), comp))
            yield from rec(k + 1)
            acc.pop()
            for j, x in enumerate(comp):
                left[t][j] += x

    yield from rec(0)


def _distance_from_weights(weights, m: int) -> int:
    loops = sum(weights[i][i] for i in range(len(weights)))
    return m - loops - _max_cycles(*_offdiag(weights))


def _realize(inst: Instance, start: Allocation, per_type: dict[int, tuple[tuple[int, ...], ...]]) -> Allocation:
    """Concrete target allocation for a movement given as per-type transport matrices."""
    owners = start.owners()
    new = list(owners)
    for t, goods in good_types(inst).items():
        mat = per_type[t]
        for i, row in enumerate(mat):
            mine = [g for g in goods if owners[g] == i]
            k = 0
            # goods that stay come first so the realization keeps loops
            for j in [i] + [x for x in range(len(row)) if x != i]:
                for _ in range(row[j]):
                    new[mine[k]] = j
                    k += 1
    return Allocation.from_owners(new, inst.num_agents)


def optimal_binary_const(inst: Instance, start: Allocation, budget: int = DEFAULT_BUDGET, with_trace: bool = False):
    """Minimum over EF1 classes and feasible movements of ``m - c*``.

    Movements are aggregated per type so only distinct exchange-graph weight
    matrices are scored.
    """
    check_consistent(inst, start)
    if is_ef1(inst, start):
        # the identity movement stays in an EF1 class
        return (0, []) if with_trace else 0
    n, m = inst.num_agents, inst.num_goods
    hold = _holdings(inst, start)
    best, best_plan = INFINITY, None
    for cls in enumerate_ef1_classes(inst, size_vector(start)):
        tgt = cls.as_dict()
        zero = tuple((0,) * n for _ in range(n))
        frontier = {zero: {}}
        for t in hold:
            nxt = {}
            for mat in _transport(hold[t], tgt[t]):
                for w, plan in frontier.items():
                    w2 = tuple(tuple(w[a][b] + mat[a][b] for b in range(n)) for a in range(n))
                    if w2 not in nxt:
                        nxt[w2] = {**plan, t: mat}
            if len(nxt) > budget:
                raise BudgetExceeded(budget, "movement matrices")
            frontier = nxt
        for w, plan in frontier.items():
            d = _distance_from_weights(w, m)
            if d < best:
                best, best_plan = d, plan
    if not with_trace:
        return best
    if best_plan is None:
        return best, None
    target = _realize(inst, start, best_plan)
    return best, exchange_sequence(start, target)


# --- dispatcher -------------------------------------------------------------------


def optimal_exchanges_with_method(inst: Instance, start: Allocation, budget: int = DEFAULT_BUDGET,
                                  force_oracle: bool = False):
    """Returns ``(count, trace or None, method)``."""
    check_consistent(inst, start)
    if force_oracle:
        count, trace = shortest_ef1_path(inst, start, budget)
        return count, trace, "oracle"
    if is_ef1(inst, start):
        return 0, [], "already-ef1"
    if not reformable(inst, size_vector(start), budget):
        return INFINITY, None, "unreformable"
    cls = classify_utilities(inst)
    n = inst.num_agents
    if cls.identical and cls.binary:
        count, trace = optimal_identical_binary(inst, start)
        return count, trace, "identical-binary"
    if cls.identical and n == 2:
        count, trace = optimal_two_identical(inst, start)
        return count, trace, "two-identical"
    if cls.binary and n <= 3:
        count, trace = optimal_binary_const(inst, start, budget, with_trace=True)
        return count, trace, "binary-classes"
    count, trace = shortest_ef1_path(inst, start, budget)
    return count, trace, "oracle"


def optimal_exchanges(inst: Instance, start: Allocation, budget: int = DEFAULT_BUDGET, force_oracle: bool = False):
    """Minimum number of exchanges to an EF1 allocation (``INFINITY`` if none)."""
    return optimal_exchanges_with_method(inst, start, budget, force_oracle)[0]

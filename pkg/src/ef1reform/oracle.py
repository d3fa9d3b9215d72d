"""Brute-force ground truth.

Everything here searches raw allocations (or, on request, allocations up to
swapping goods that every agent values identically) and is meant to be
obviously correct rather than fast.  Other modules are checked against it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Hashable, Iterator, Sequence

from .core import (
    DEFAULT_BUDGET,
    INFINITY,
    Allocation,
    BudgetExceeded,
    ExchangeStep,
    Instance,
    check_consistent,
    ef1_owners,
    size_vector,
)


@dataclass
class OracleBudget:
    """Cap on visited states shared by one search."""

    max_states: int = DEFAULT_BUDGET
    visited: int = 0
    exceeded: bool = False

    def tick(self, k: int = 1) -> None:
        self.visited += k
        if self.visited > self.max_states:
            self.exceeded = True
            raise BudgetExceeded(self.max_states)


def _as_budget(budget) -> OracleBudget:
    if isinstance(budget, OracleBudget):
        return budget
    return OracleBudget(DEFAULT_BUDGET if budget is None else int(budget))


def _check_sv(inst: Instance, sv: Sequence[int]) -> tuple[int, ...]:
    sv = tuple(int(s) for s in sv)
    if len(sv) != inst.num_agents or sum(sv) != inst.num_goods or min(sv) < 0:
        raise ValueError(f"size vector {sv} does not fit {inst.num_agents} agents and {inst.num_goods} goods")
    return sv


def owner_vectors(sv: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """All owner vectors with the given bundle sizes, in lexicographic order."""
    n, m = len(sv), sum(sv)
    left = list(sv)
    owners = [0] * m

    def rec(g: int):
        if g == m:
            yield tuple(owners)
            return
        for a in range(n):
            if left[a]:
                left[a] -= 1
                owners[g] = a
                yield from rec(g + 1)
                left[a] += 1

    yield from rec(0)


def enumerate_allocations(inst: Instance, sv: Sequence[int], budget=None) -> Iterator[Allocation]:
    sv = _check_sv(inst, sv)
    b = _as_budget(budget)
    for owners in owner_vectors(sv):
        b.tick()
        yield Allocation.from_owners(owners, inst.num_agents)


# --- goods that every agent values the same are interchangeable ---------------


@dataclass(frozen=True)
class GoodClasses:
    """Partition of goods by their utility column."""

    columns: tuple[tuple[int, ...], ...]
    members: tuple[tuple[int, ...], ...]

    @classmethod
    def of(cls, inst: Instance) -> GoodClasses:
        groups: dict[tuple[int, ...], list[int]] = {}
        for g in range(inst.num_goods):
            groups.setdefault(inst.column(g), []).append(g)
        cols = sorted(groups)
        return cls(tuple(cols), tuple(tuple(groups[c]) for c in cols))

    def counts(self, alloc: Allocation) -> tuple[tuple[int, ...], ...]:
        owners = alloc.owners()
        n = alloc.num_agents
        out = [[0] * len(self.columns) for _ in range(n)]
        for c, goods in enumerate(self.members):
            for g in goods:
                out[owners[g]][c] += 1
        return tuple(tuple(r) for r in out)


def _ef1_counts(columns, counts) -> bool:
    n = len(counts)
    for i in range(n):
        val = [0] * n
        top = [0] * n
        for j in range(n):
            for c, k in enumerate(counts[j]):
                if k:
                    v = columns[c][i]
                    val[j] += k * v
                    if v > top[j]:
                        top[j] = v
        for j in range(n):
            if j != i and val[i] < val[j] - top[j]:
                return False
    return True


def _count_matrices(sizes: Sequence[int], sv: Sequence[int]) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Agent-by-class count matrices with class totals ``sizes`` and row sums ``sv``."""
    n, k = len(sv), len(sizes)
    left = list(sv)
    cols: list[tuple[int, ...]] = []

    def split(total: int, a: int):
        if a == n - 1:
            if total <= left[a]:
                yield (total,)
            return
        for x in range(min(total, left[a]), -1, -1):
            for rest in split(total - x, a + 1):
                yield (x,) + rest

    def rec(c: int):
        if c == k:
            if not any(left):
                yield tuple(tuple(col[a] for col in cols) for a in range(n))
            return
        for comp in split(sizes[c], 0):
            for a, x in enumerate(comp):
                left[a] -= x
            cols.append(comp)
            yield from rec(c + 1)
            cols.pop()
            for a, x in enumerate(comp):
                left[a] += x

    yield from rec(0)


def exists_ef1_bruteforce(inst: Instance, sv: Sequence[int], budget=None, *, quotient: bool = False) -> bool:
    """Whether some allocation with size vector ``sv`` is EF1, by enumeration.

    With ``quotient=True`` allocations that differ only by swapping goods of
    identical utility columns are enumerated once.
    """
    sv = _check_sv(inst, sv)
    b = _as_budget(budget)
    if quotient:
        gc = GoodClasses.of(inst)
        sizes = [len(x) for x in gc.members]
        for counts in _count_matrices(sizes, sv):
            b.tick()
            if _ef1_counts(gc.columns, counts):
                return True
        return False
    u = inst.utilities
    for owners in owner_vectors(sv):
        b.tick()
        if ef1_owners(u, owners):
            return True
    return False


# --- breadth-first search over the exchange graph of allocations ---------------


class _RawSpace:
    def __init__(self, inst: Instance):
        self.u = inst.utilities
        self.n = inst.num_agents

    def start(self, alloc: Allocation) -> Hashable:
        return alloc.owners()

    def is_ef1(self, state) -> bool:
        return ef1_owners(self.u, state)

    def neighbors(self, state):
        n = self.n
        held: list[list[int]] = [[] for _ in range(n)]
        for g, a in enumerate(state):
            held[a].append(g)
        for a in range(n):
            for b in range(a + 1, n):
                for g in held[a]:
                    for h in held[b]:
                        nxt = list(state)
                        nxt[g] = b
                        nxt[h] = a
                        yield ExchangeStep(a, b, g, h), tuple(nxt)

    def realize(self, alloc: Allocation, moves) -> list[ExchangeStep]:
        return list(moves)


class _QuotientSpace:
    def __init__(self, inst: Instance):
        self.gc = GoodClasses.of(inst)
        self.n = inst.num_agents

    def start(self, alloc: Allocation) -> Hashable:
        return self.gc.counts(alloc)

    def is_ef1(self, state) -> bool:
        return _ef1_counts(self.gc.columns, state)

    def neighbors(self, state):
        n, k = self.n, len(self.gc.columns)
        for a in range(n):
            for b in range(a + 1, n):
                for c in range(k):
                    if not state[a][c]:
                        continue
                    for d in range(k):
                        if d == c or not state[b][d]:
                            continue
                        ra, rb = list(state[a]), list(state[b])
                        ra[c] -= 1
                        ra[d] += 1
                        rb[d] -= 1
                        rb[c] += 1
                        nxt = list(state)
                        nxt[a], nxt[b] = tuple(ra), tuple(rb)
                        yield (a, b, c, d), tuple(nxt)

    def realize(self, alloc: Allocation, moves) -> list[ExchangeStep]:
        """Turn class-level moves into concrete exchanges (lowest-index goods)."""
        owners = list(alloc.owners())
        steps = []
        for a, b, c, d in moves:
            g = min(x for x in self.gc.members[c] if owners[x] == a)
            h = min(x for x in self.gc.members[d] if owners[x] == b)
            owners[g], owners[h] = b, a
            steps.append(ExchangeStep(a, b, g, h))
        return steps


def _bfs(space, start_state, goal: Callable, budget: OracleBudget, max_depth=None):
    """Return (depth, moves) of the first goal state, or None."""
    if goal(start_state):
        return 0, []
    parent = {start_state: None}
    budget.tick()
    frontier = [start_state]
    depth = 0
    while frontier and (max_depth is None or depth < max_depth):
        depth += 1
        nxt_frontier = []
        for state in frontier:
            for move, nxt in space.neighbors(state):
                if nxt in parent:
                    continue
                parent[nxt] = (state, move)
                budget.tick()
                if goal(nxt):
                    moves = []
                    cur = nxt
                    while parent[cur] is not None:
                        prev, mv = parent[cur]
                        moves.append(mv)
                        cur = prev
                    return depth, moves[::-1]
                nxt_frontier.append(nxt)
        frontier = nxt_frontier
    return None


def _space(inst: Instance, quotient: bool):
    return _QuotientSpace(inst) if quotient else _RawSpace(inst)


def shortest_ef1_path(inst: Instance, start: Allocation, budget=None, *, quotient: bool = False,
                      max_depth: int | None = None):
    """Minimum number of exchanges to an EF1 allocation, with a witness trace.

    Returns ``(count, trace)``; ``(INFINITY, None)`` when no EF1 allocation is
    reachable (or none within ``max_depth``).
    """
    check_consistent(inst, start)
    sp = _space(inst, quotient)
    found = _bfs(sp, sp.start(start), sp.is_ef1, _as_budget(budget), max_depth)
    if found is None:
        return INFINITY, None
    depth, moves = found
    return depth, sp.realize(start, moves)


def min_exchanges_bfs(inst: Instance, start: Allocation, budget=None, *, quotient: bool = False):
    return shortest_ef1_path(inst, start, budget, quotient=quotient)[0]


def reaches_ef1_within(inst: Instance, start: Allocation, k: int, budget=None, *, quotient: bool = False) -> bool:
    """Whether an EF1 allocation is at most ``k`` exchanges away (depth-limited BFS)."""
    count, _ = shortest_ef1_path(inst, start, budget, quotient=quotient, max_depth=k)
    return count <= k


def exchange_distance_bfs(inst: Instance, start: Allocation, target: Allocation, budget=None):
    """Minimum number of exchanges turning ``start`` into exactly ``target``."""
    check_consistent(inst, start)
    check_consistent(inst, target)
    if size_vector(start) != size_vector(target):
        return INFINITY
    sp = _RawSpace(inst)
    goal_state = target.owners()
    found = _bfs(sp, sp.start(start), lambda s: s == goal_state, _as_budget(budget))
    # same size vector means reachable
    assert found is not None
    return found[0]


# --- beneficial exchanges ---------------------------------------------------------


def _beneficial_moves(u, n, state):
    held: list[list[int]] = [[] for _ in range(n)]
    for g, a in enumerate(state):
        held[a].append(g)
    for a in range(n):
        ua = u[a]
        for b in range(a + 1, n):
            ub = u[b]
            for g in held[a]:
                for h in held[b]:
                    if ua[h] > ua[g] and ub[g] > ub[h]:
                        nxt = list(state)
                        nxt[g] = b
                        nxt[h] = a
                        yield ExchangeStep(a, b, g, h), tuple(nxt)


def beneficial_reachable_ef1(inst: Instance, start: Allocation, budget=None):
    """Depth-first search restricted to exchanges both participants strictly gain from.

    Returns ``(True, trace)`` with a witness, or ``(False, None)``.
    """
    check_consistent(inst, start)
    b = _as_budget(budget)
    u, n, m = inst.utilities, inst.num_agents, inst.num_goods
    root = start.owners()
    if ef1_owners(u, root):
        return True, []
    seen = {root}
    b.tick()
    path: list[ExchangeStep] = []
    stack = [_beneficial_moves(u, n, root)]
    limit = m * (m - 1) // 2
    while stack:
        try:
            move, nxt = next(stack[-1])
        except StopIteration:
            stack.pop()
            if path:
                path.pop()
            continue
        if nxt in seen:
            continue
        seen.add(nxt)
        b.tick()
        path.append(move)
        if len(path) > limit:
            raise AssertionError("beneficial sequence longer than m(m-1)/2")
        if ef1_owners(u, nxt):
            return True, list(path)
        stack.append(_beneficial_moves(u, n, nxt))
    return False, None

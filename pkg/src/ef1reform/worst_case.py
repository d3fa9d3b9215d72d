"""Worst-case exchange counts from s-balanced starts.

An upper-bound construction (category-constrained round-robin), the
lower-bound instance family, and bounds for identical binary utilities.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import Allocation, Instance, check_consistent, is_s_balanced
from .optimal import exchange_distance_exact, optimal_identical_binary


def _qr(n: int, s: int) -> tuple[int, int]:
    if n < 2 or s < 1:
        raise ValueError("need n >= 2 and s >= 1")
    return divmod(s, n)


def upper_bound_formula(n: int, s: int) -> int:
    """Exchanges that always suffice to reach EF1 from an s-balanced start."""
    q, r = _qr(n, s)
    if n == 2:
        bound = Fraction(s - r, 2)
    elif r == 0:
        bound = Fraction(s * (n - 1), 2)
    else:
        bound = Fraction(s * (n - 1), 2) + Fraction(r * (n - 3), 2) + 1
    assert bound.denominator == 1, bound
    return int(bound)


def lower_bound_formula(n: int, s: int) -> Fraction:
    """Exchanges the lower-bound family needs; may be a half-integer when n does not divide s."""
    q, r = _qr(n, s)
    base = Fraction(s * (n - 1), 2)
    return base if r == 0 else base - Fraction(n - r, 2)


def lower_bound_instance(n: int, s: int) -> tuple[Instance, Allocation]:
    """Good ``i*s + j`` is worthless to agent i, worth 1 to everyone else, and starts with i."""
    _qr(n, s)
    m = n * s
    utils = [[0 if g // s == i else 1 for g in range(m)] for i in range(n)]
    start = Allocation([range(i * s, (i + 1) * s) for i in range(n)])
    return Instance(utils), start


# --- constrained round-robin -------------------------------------------------------


@dataclass(frozen=True)
class CategoryPlan:
    """Disjoint good categories processed in order; each size divisible by n."""

    categories: tuple[tuple[int, ...], ...]

    def check(self, n: int, m: int) -> None:
        flat = sorted(g for c in self.categories for g in c)
        if flat != list(range(m)):
            raise ValueError("categories must partition the goods")
        for c in self.categories:
            if len(c) % n:
                raise ValueError(f"category of size {len(c)} is not divisible by {n}")


def _envies(inst: Instance, bundles, i: int, j: int) -> bool:
    return inst.value(i, bundles[i]) < inst.value(i, bundles[j])


def _find_envy_cycle(inst: Instance, bundles) -> list[int] | None:
    """A directed cycle of the envy graph (depth-first, lowest indices first), or None."""
    n = len(bundles)
    out = [[j for j in range(n) if j != i and _envies(inst, bundles, i, j)] for i in range(n)]
    state = [0] * n  # 0 unseen, 1 on the stack, 2 done
    path: list[int] = []

    def dfs(v: int):
        state[v] = 1
        path.append(v)
        for w in out[v]:
            if state[w] == 1:
                return path[path.index(w):]
            if state[w] == 0:
                cyc = dfs(w)
                if cyc:
                    return cyc
        state[v] = 2
        path.pop()
        return None

    for root in range(n):
        if state[root] == 0:
            cyc = dfs(root)
            if cyc:
                return list(cyc)
    return None


def eliminate_envy_cycles(inst: Instance, bundles: list[list[int]]) -> list[list[int]]:
    """Rotate bundles along envy cycles (each agent takes the bundle it envies) until none remain."""
    bundles = [list(b) for b in bundles]
    while True:
        cyc = _find_envy_cycle(inst, bundles)
        if cyc is None:
            return bundles
        taken = [bundles[cyc[(k + 1) % len(cyc)]] for k in range(len(cyc))]
        for a, b in zip(cyc, taken):
            bundles[a] = b


def picking_order(inst: Instance, bundles) -> list[int]:
    """Topological order of the envy graph: an envier picks before the agents it envies."""
    n = len(bundles)
    indeg = [0] * n
    out = [[] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i != j and _envies(inst, bundles, i, j):
                out[i].append(j)
                indeg[j] += 1
    heap = [a for a in range(n) if indeg[a] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        a = heapq.heappop(heap)
        order.append(a)
        for b in out[a]:
            indeg[b] -= 1
            if indeg[b] == 0:
                heapq.heappush(heap, b)
    if len(order) != n:
        raise AssertionError("envy graph still has a cycle")
    return order


def constrained_round_robin(inst: Instance, plan: CategoryPlan) -> Allocation:
    """Round-robin inside each category, every agent getting |C|/n goods of it."""
    n, m = inst.num_agents, inst.num_goods
    plan.check(n, m)
    bundles: list[list[int]] = [[] for _ in range(n)]
    for cat in plan.categories:
        bundles = eliminate_envy_cycles(inst, bundles)
        order = picking_order(inst, bundles)
        left = set(cat)
        for _ in range(len(cat) // n):
            for a in order:
                row = inst.utilities[a]
                g = min(left, key=lambda x: (-row[x], x))
                bundles[a].append(g)
                left.remove(g)
    return Allocation(bundles)


def category_plan(start: Allocation) -> CategoryPlan:
    """C_i: first qn goods of A_i; D_w: n leftovers each, from the smallest-index agent first."""
    n = start.num_agents
    s = len(start.bundles[0])
    q, r = divmod(s, n)
    cats = [tuple(b[: q * n]) for b in start.bundles]
    leftovers = [g for b in start.bundles for g in b[q * n:]]
    for w in range(r):
        cats.append(tuple(leftovers[w * n:(w + 1) * n]))
    return CategoryPlan(tuple(cats))


def _round_robin_within(inst: Instance, goods: Sequence[int], order: Sequence[int]) -> list[list[int]]:
    out: list[list[int]] = [[] for _ in range(inst.num_agents)]
    left = set(goods)
    while left:
        for a in order:
            if not left:
                break
            row = inst.utilities[a]
            g = min(left, key=lambda x: (-row[x], x))
            out[a].append(g)
            left.remove(g)
    return out


def construct_ef1_within_bound(inst: Instance, start: Allocation) -> tuple[Allocation, int]:
    """An s-balanced EF1 target and the exact number of exchanges to reach it."""
    check_consistent(inst, start)
    if not is_s_balanced(start):
        raise ValueError("start allocation is not s-balanced")
    n = inst.num_agents
    if n == 2:
        first = _round_robin_within(inst, start.bundles[0], (0, 1))
        second = _round_robin_within(inst, start.bundles[1], (1, 0))
        target = Allocation([first[0] + second[0], first[1] + second[1]])
    else:
        target = constrained_round_robin(inst, category_plan(start))
    return target, exchange_distance_exact(start, target)


# --- identical binary utilities ---------------------------------------------------


@dataclass(frozen=True)
class BoundReport:
    n: int
    s: int
    lower: Fraction
    upper: Fraction
    achieved: int | None = None
    formula: str = ""
    instance: Instance | None = None
    start: Allocation | None = None


def idenbin_extremal(n: int, s: int) -> tuple[Instance, Allocation]:
    """The first floor(n/2) agents hold s valuable goods each; everyone else holds worthless ones."""
    _qr(n, s)
    u = [1 if g // s < n // 2 else 0 for g in range(n * s)]
    start = Allocation([range(i * s, (i + 1) * s) for i in range(n)])
    return Instance.identical(u, n), start


def idenbin_bounds(n: int, s: int) -> BoundReport:
    _qr(n, s)
    if n % 2 == 0:
        lower = Fraction(n // 2 * (s // 2))
        upper = Fraction(s * n, 4)
    else:
        lower = Fraction((n + 1) // 2 * (s * (n - 1) // (2 * n)))
        upper = Fraction(s * (n - 1) * (n + 1), 4 * n)
    assert lower <= upper
    inst, start = idenbin_extremal(n, s)
    achieved, _ = optimal_identical_binary(inst, start)
    return BoundReport(n, s, lower, upper, achieved, "identical-binary", inst, start)


def general_bounds(n: int, s: int, achieved: int | None = None) -> BoundReport:
    return BoundReport(n, s, lower_bound_formula(n, s), Fraction(upper_bound_formula(n, s)), achieved, "general")

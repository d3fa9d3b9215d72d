"""Domain types and basic predicates: instances, allocations, EF1, exchanges."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

INFINITY = float("inf")


class ReformError(Exception):
    """Base class for errors raised by this package."""


class GoodNotHeld(ReformError, ValueError):
    pass


class WrongUtilityClass(ReformError, ValueError):
    pass


class Unreformable(ReformError, ValueError):
    """No EF1 allocation exists with the required size vector."""


class BudgetExceeded(ReformError, RuntimeError):
    """A search visited more states than its budget allows.

    This is a third outcome next to yes/no: the question was not answered.
    """

    def __init__(self, budget: int, what: str = "states"):
        super().__init__(f"budget of {budget} {what} exceeded")
        self.budget = budget


DEFAULT_BUDGET = 5_000_000


@dataclass(frozen=True)
class Instance:
    """n agents with additive non-negative integer utilities over m goods.

    ``utilities[i][g]`` is agent i's value for good g.
    """

    utilities: tuple[tuple[int, ...], ...]

    def __init__(self, utilities: Iterable[Iterable[int]]):
        rows = tuple(tuple(int(v) for v in row) for row in utilities)
        if len(rows) < 2:
            raise ValueError("an instance needs at least two agents")
        m = len(rows[0])
        for i, row in enumerate(rows):
            if len(row) != m:
                raise ValueError(f"utility row {i} has {len(row)} entries, expected {m}")
            if any(v < 0 for v in row):
                raise ValueError(f"utility row {i} has a negative entry")
        object.__setattr__(self, "utilities", rows)

    @classmethod
    def identical(cls, values: Sequence[int], n: int = 2) -> Instance:
        return cls([list(values)] * n)

    @property
    def num_agents(self) -> int:
        return len(self.utilities)

    @property
    def num_goods(self) -> int:
        return len(self.utilities[0])

    def value(self, agent: int, bundle: Iterable[int]) -> int:
        row = self.utilities[agent]
        return sum(row[g] for g in bundle)

    def is_identical(self) -> bool:
        return all(row == self.utilities[0] for row in self.utilities)

    def is_binary(self) -> bool:
        return all(v in (0, 1) for row in self.utilities for v in row)

    def column(self, good: int) -> tuple[int, ...]:
        return tuple(row[good] for row in self.utilities)


class UtilityClass(str, enum.Enum):
    GENERAL = "general"
    IDENTICAL = "identical"
    BINARY = "binary"
    IDENTICAL_BINARY = "identical-binary"

    @property
    def identical(self) -> bool:
        return self in (UtilityClass.IDENTICAL, UtilityClass.IDENTICAL_BINARY)

    @property
    def binary(self) -> bool:
        return self in (UtilityClass.BINARY, UtilityClass.IDENTICAL_BINARY)


def classify_utilities(inst: Instance) -> UtilityClass:
    identical, binary = inst.is_identical(), inst.is_binary()
    if identical and binary:
        return UtilityClass.IDENTICAL_BINARY
    if identical:
        return UtilityClass.IDENTICAL
    if binary:
        return UtilityClass.BINARY
    return UtilityClass.GENERAL


@dataclass(frozen=True)
class Allocation:
    """Ordered partition of goods ``0..m-1`` into one sorted bundle per agent."""

    bundles: tuple[tuple[int, ...], ...]

    def __init__(self, bundles: Iterable[Iterable[int]]):
        bs = tuple(tuple(sorted(int(g) for g in b)) for b in bundles)
        seen = [g for b in bs for g in b]
        if sorted(seen) != list(range(len(seen))):
            raise ValueError("bundles must partition the goods 0..m-1")
        object.__setattr__(self, "bundles", bs)

    @classmethod
    def from_owners(cls, owners: Sequence[int], n: int) -> Allocation:
        bundles: list[list[int]] = [[] for _ in range(n)]
        for g, a in enumerate(owners):
            bundles[a].append(g)
        return cls(bundles)

    @property
    def num_agents(self) -> int:
        return len(self.bundles)

    @property
    def num_goods(self) -> int:
        return sum(len(b) for b in self.bundles)

    def owners(self) -> tuple[int, ...]:
        out = [0] * self.num_goods
        for a, b in enumerate(self.bundles):
            for g in b:
                out[g] = a
        return tuple(out)

    def holder(self, good: int) -> int:
        for a, b in enumerate(self.bundles):
            if good in b:
                return a
        raise KeyError(good)

    def __str__(self) -> str:
        return "(" + ", ".join("{" + ",".join(map(str, b)) + "}" for b in self.bundles) + ")"


def check_consistent(inst: Instance, alloc: Allocation) -> None:
    if alloc.num_agents != inst.num_agents or alloc.num_goods != inst.num_goods:
        raise ValueError(
            f"allocation has {alloc.num_agents} bundles over {alloc.num_goods} goods, "
            f"instance has {inst.num_agents} agents and {inst.num_goods} goods"
        )


@dataclass(frozen=True)
class ExchangeStep:
    """``agent_a`` gives ``good_a`` to ``agent_b`` and receives ``good_b``."""

    agent_a: int
    agent_b: int
    good_a: int
    good_b: int

    def inverse(self) -> ExchangeStep:
        return ExchangeStep(self.agent_a, self.agent_b, self.good_b, self.good_a)

    def __str__(self) -> str:
        return f"({self.agent_a},{self.agent_b}) {self.good_a}<->{self.good_b}"


def size_vector(alloc: Allocation) -> tuple[int, ...]:
    return tuple(len(b) for b in alloc.bundles)


def is_balanced(sv: Sequence[int]) -> bool:
    return not sv or max(sv) - min(sv) <= 1


def is_s_balanced(alloc: Allocation) -> bool:
    return len(set(size_vector(alloc))) <= 1


def is_ef1_pair(inst: Instance, alloc: Allocation, i: int, j: int) -> bool:
    """Whether agent i is EF1 towards agent j."""
    if i == j:
        raise ValueError("EF1 is defined between distinct agents")
    n = inst.num_agents
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"agent index out of range for {n} agents")
    other = alloc.bundles[j]
    if not other:
        return True
    row = inst.utilities[i]
    # removing i's favourite good of A_j is the best single removal
    return inst.value(i, alloc.bundles[i]) >= sum(row[g] for g in other) - max(row[g] for g in other)


def is_ef1(inst: Instance, alloc: Allocation) -> bool:
    n = inst.num_agents
    return all(is_ef1_pair(inst, alloc, i, j) for i in range(n) for j in range(n) if i != j)


def is_weak_ef1(inst: Instance, alloc: Allocation) -> bool:
    """EF1 with the removed good ranging over all of M instead of A_j."""
    n = inst.num_agents
    for i in range(n):
        row = inst.utilities[i]
        top = max(row, default=0)
        own = inst.value(i, alloc.bundles[i])
        for j in range(n):
            if j != i and own < inst.value(i, alloc.bundles[j]) - top:
                return False
    return True


def ef1_owners(utilities: Sequence[Sequence[int]], owners: Sequence[int]) -> bool:
    """EF1 test on an owner vector (``owners[g]`` is the agent holding g).

    Hot path for the brute-force searches.
    """
    n = len(utilities)
    for i in range(n):
        row = utilities[i]
        val = [0] * n
        top = [0] * n
        for g, a in enumerate(owners):
            v = row[g]
            val[a] += v
            if v > top[a]:
                top[a] = v
        own = val[i]
        for j in range(n):
            if j != i and own < val[j] - top[j]:
                return False
    return True


def apply_exchange(alloc: Allocation, step: ExchangeStep) -> Allocation:
    a, b = step.agent_a, step.agent_b
    if a == b:
        raise ValueError("an exchange needs two distinct agents")
    if step.good_a not in alloc.bundles[a]:
        raise GoodNotHeld(f"good {step.good_a} is not held by agent {a} (agent_a side)")
    if step.good_b not in alloc.bundles[b]:
        raise GoodNotHeld(f"good {step.good_b} is not held by agent {b} (agent_b side)")
    bundles = [list(x) for x in alloc.bundles]
    bundles[a].remove(step.good_a)
    bundles[a].append(step.good_b)
    bundles[b].remove(step.good_b)
    bundles[b].append(step.good_a)
    return Allocation(bundles)


def replay(alloc: Allocation, trace: Iterable[ExchangeStep]) -> Allocation:
    for step in trace:
        alloc = apply_exchange(alloc, step)
    return alloc


def round_robin(inst: Instance, sv: Sequence[int], order: Sequence[int] | None = None) -> Allocation:
    """Agents pick their favourite remaining good in turn until quotas are met.

    ``order`` must list every agent once, agents with larger quotas first.
    Ties between goods go to the lowest index.
    """
    n, m = inst.num_agents, inst.num_goods
    sv = tuple(sv)
    if len(sv) != n or sum(sv) != m or any(s < 0 for s in sv):
        raise ValueError(f"size vector {sv} does not fit {n} agents and {m} goods")
    if order is None:
        order = sorted(range(n), key=lambda a: (-sv[a], a))
    order = tuple(order)
    if sorted(order) != list(range(n)):
        raise ValueError(f"order {order} is not a permutation of the agents")
    for x, y in zip(order, order[1:]):
        if sv[x] < sv[y]:
            raise ValueError(f"agent {y} (quota {sv[y]}) is ordered after agent {x} (quota {sv[x]})")
    remaining = set(range(m))
    bundles: list[list[int]] = [[] for _ in range(n)]
    while remaining:
        for a in order:
            if len(bundles[a]) >= sv[a] or not remaining:
                continue
            row = inst.utilities[a]
            g = min(remaining, key=lambda x: (-row[x], x))
            bundles[a].append(g)
            remaining.remove(g)
    return Allocation(bundles)

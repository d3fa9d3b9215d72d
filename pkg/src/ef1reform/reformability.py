"""Does an EF1 allocation with a given size vector exist?

One exact solver per tractable utility class, and a dispatcher that picks the
cheapest applicable one.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

from .core import (
    DEFAULT_BUDGET,
    Allocation,
    BudgetExceeded,
    Instance,
    WrongUtilityClass,
    classify_utilities,
    is_balanced,
    is_ef1_pair,
)
from .oracle import _check_sv, exists_ef1_bruteforce


def reformable_two_identical(inst: Instance, sv: Sequence[int]) -> bool:
    """Two agents, identical utilities.

    Give the smaller bundle the most valuable goods and check only that its
    owner is EF1 towards the other agent.
    """
    if inst.num_agents != 2 or not inst.is_identical():
        raise WrongUtilityClass("needs two agents with identical utilities")
    sv = _check_sv(inst, sv)
    small = 0 if sv[0] <= sv[1] else 1
    u = inst.utilities[0]
    ranked = sorted(range(inst.num_goods), key=lambda g: (-u[g], g))
    top, rest = ranked[: sv[small]], ranked[sv[small]:]
    bundles = [rest, rest]
    bundles[small] = top
    return is_ef1_pair(inst, Allocation(bundles), small, 1 - small)


# --- pseudopolynomial dynamic programme ---------------------------------------


@dataclass(frozen=True)
class DpState:
    """Partial allocation summary.

    a[i][j]: agent i's value for j's partial bundle; b[i][j]: agent i's
    largest single-good value in it; c[j]: its size.  a and b are stored
    flattened row-major.
    """

    a: tuple[int, ...]
    b: tuple[int, ...]
    c: tuple[int, ...]

    @classmethod
    def unpack(cls, key: tuple[int, ...], n: int) -> DpState:
        nn = n * n
        return cls(key[:nn], key[nn:2 * nn], key[2 * nn:])


def _dp_accepts(state: DpState, n: int) -> bool:
    a, b, c = state.a, state.b, state.c
    for i in range(n):
        own = a[i * n + i]
        for j in range(n):
            if j != i and c[j] and own < a[i * n + j] - b[i * n + j]:
                return False
    return True


def dp_states(inst: Instance, sv: Sequence[int], budget: int = DEFAULT_BUDGET, order=None) -> set[DpState]:
    """Every final DpState whose bundle sizes match ``sv``."""
    sv = _check_sv(inst, sv)
    n, m = inst.num_agents, inst.num_goods
    nn = n * n
    u = inst.utilities
    # a state is the flat tuple a + b + c; DpState.unpack gives the named view
    states = {(0,) * (2 * nn + n)}
    for q in (range(m) if order is None else order):
        col = [u[i][q] for i in range(n)]
        nxt = set()
        for st in states:
            for j in range(n):
                if st[2 * nn + j] >= sv[j]:
                    continue
                x = list(st)
                for i in range(n):
                    k = i * n + j
                    x[k] += col[i]
                    if col[i] > x[nn + k]:
                        x[nn + k] = col[i]
                x[2 * nn + j] += 1
                nxt.add(tuple(x))
        if len(nxt) > budget:
            raise BudgetExceeded(budget, "DP states")
        states = nxt
    return {DpState.unpack(st, n) for st in states}


def reformable_dp(inst: Instance, sv: Sequence[int], budget: int = DEFAULT_BUDGET, order=None) -> bool:
    """Set-of-reachable-states dynamic programme over the goods.

    ``order`` permutes the good processing order (the answer does not depend on it).
    """
    n = inst.num_agents
    return any(_dp_accepts(st, n) for st in dp_states(inst, sv, budget, order))


# --- binary utilities: equivalence classes -------------------------------------


@dataclass(frozen=True)
class TypeCountMatrix:
    """Per good type (bit i set iff agent i values it), how many each agent holds."""

    counts: tuple[tuple[int, tuple[int, ...]], ...]

    def as_dict(self) -> dict[int, tuple[int, ...]]:
        return dict(self.counts)

    def column_sums(self, n: int) -> tuple[int, ...]:
        return tuple(sum(row[j] for _, row in self.counts) for j in range(n))


def good_types(inst: Instance) -> dict[int, list[int]]:
    """Goods grouped by type bitmask, types in ascending order."""
    if not inst.is_binary():
        raise WrongUtilityClass("needs binary utilities")
    out: dict[int, list[int]] = {}
    for g in range(inst.num_goods):
        t = sum(1 << i for i in range(inst.num_agents) if inst.utilities[i][g])
        out.setdefault(t, []).append(g)
    return dict(sorted(out.items()))


def compositions(total: int, parts: int, caps: Sequence[int] | None = None) -> Iterator[tuple[int, ...]]:
    """Compositions of ``total`` into ``parts`` non-negative parts, lexicographic."""
    yield from _compositions(total, parts, None if caps is None else tuple(caps))


@lru_cache(maxsize=100_000)
def _compositions(total: int, parts: int, caps: tuple[int, ...] | None) -> tuple[tuple[int, ...], ...]:
    if parts == 0:
        return ((),) if total == 0 else ()
    hi = total if caps is None else min(total, caps[0])
    out = []
    for x in range(hi + 1):
        for rest in _compositions(total - x, parts - 1, None if caps is None else caps[1:]):
            out.append((x,) + rest)
    return tuple(out)


def class_is_ef1(types: Sequence[int], rows: Sequence[Sequence[int]], n: int) -> bool:
    for i in range(n):
        mine = [r for t, r in zip(types, rows) if t >> i & 1]
        val = [sum(r[j] for r in mine) for j in range(n)]
        for j in range(n):
            if j == i:
                continue
            removable = 1 if val[j] > 0 else 0
            if val[i] < val[j] - removable:
                return False
    return True


def enumerate_ef1_classes(inst: Instance, sv: Sequence[int]) -> Iterator[TypeCountMatrix]:
    """Every equivalence class of EF1 allocations with size vector ``sv``."""
    sv = _check_sv(inst, sv)
    n = inst.num_agents
    groups = good_types(inst)
    types = list(groups)
    totals = [len(groups[t]) for t in types]
    left = list(sv)
    rows: list[tuple[int, ...]] = []

    def rec(k: int):
        if k == len(types):
            if not any(left) and class_is_ef1(types, rows, n):
                yield TypeCountMatrix(tuple(zip(types, rows)))
            return
        if k == len(types) - 1:
            # the last type must fill exactly what is left
            comps = [tuple(left)] if sum(left) == totals[k] else []
        else:
            comps = compositions(totals[k], n, left)
        for comp in comps:
            for j, x in enumerate(comp):
                left[j] -= x
            rows.append(comp)
            yield from rec(k + 1)
            rows.pop()
            for j, x in enumerate(comp):
                left[j] += x

    yield from rec(0)


def reformable_binary_const(inst: Instance, sv: Sequence[int]) -> bool:
    return next(enumerate_ef1_classes(inst, sv), None) is not None


def reformable_identical_binary(inst: Instance, sv: Sequence[int]) -> bool:
    """Valuable goods must fit under the threshold s0*n + n - n0."""
    if classify_utilities(inst).value != "identical-binary":
        raise WrongUtilityClass("needs identical binary utilities")
    sv = _check_sv(inst, sv)
    n = inst.num_agents
    s0 = min(sv)
    n0 = sv.count(s0)
    m1 = sum(inst.utilities[0])
    return m1 <= s0 * n + n - n0


# --- dispatcher -------------------------------------------------------------------


def reformable_with_method(inst: Instance, sv: Sequence[int], budget: int = DEFAULT_BUDGET,
                           force_oracle: bool = False) -> tuple[bool, str]:
    sv = _check_sv(inst, sv)
    if force_oracle:
        return exists_ef1_bruteforce(inst, sv, budget), "oracle"
    n = inst.num_agents
    cls = classify_utilities(inst)
    if is_balanced(sv):
        return True, "balanced"
    if cls.identical and cls.binary:
        return reformable_identical_binary(inst, sv), "identical-binary-threshold"
    if cls.identical and n == 2:
        return reformable_two_identical(inst, sv), "two-identical"
    if cls.binary and n <= 4:
        return reformable_binary_const(inst, sv), "binary-classes"
    if n <= 3:
        try:
            return reformable_dp(inst, sv, budget), "dp"
        except BudgetExceeded:
            pass
    return exists_ef1_bruteforce(inst, sv, budget), "oracle"


def reformable(inst: Instance, sv: Sequence[int], budget: int = DEFAULT_BUDGET, force_oracle: bool = False) -> bool:
    """Whether an EF1 allocation with size vector ``sv`` exists.

    Raises :class:`BudgetExceeded` when no applicable method finishes in budget.
    """
    return reformable_with_method(inst, sv, budget, force_oracle)[0]

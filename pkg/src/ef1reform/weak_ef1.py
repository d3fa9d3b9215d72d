"""Reaching weak-EF1 under identical utilities by richest-poorest swaps.

Each round the richest agent (strong) gives its best good to the poorest
agent (weak) in return for the poorest agent's worst good.  Every round is
recorded so the structural properties of the run can be checked afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import (
    Allocation,
    ExchangeStep,
    Instance,
    WrongUtilityClass,
    apply_exchange,
    check_consistent,
    is_s_balanced,
    is_weak_ef1,
)


@dataclass(frozen=True)
class TraceStep:
    round: int
    strong: int
    weak: int
    good_strong: int
    good_weak: int
    strong_good_value: int
    weak_good_value: int
    utilities_before: tuple[int, ...]
    utilities_after: tuple[int, ...]

    def exchange(self) -> ExchangeStep:
        return ExchangeStep(self.strong, self.weak, self.good_strong, self.good_weak)


def algorithm_A(inst: Instance, start: Allocation) -> tuple[Allocation, list[TraceStep]]:
    check_consistent(inst, start)
    if not inst.is_identical():
        raise WrongUtilityClass("needs identical utilities")
    if not is_s_balanced(start):
        raise ValueError("start allocation is not s-balanced")
    u = inst.utilities[0]
    n = inst.num_agents
    limit = inst.num_goods // 2
    alloc = start
    trace: list[TraceStep] = []
    while not is_weak_ef1(inst, alloc):
        if len(trace) >= limit:
            raise AssertionError(f"no weak-EF1 allocation after {limit} rounds")
        vals = tuple(inst.value(0, b) for b in alloc.bundles)
        i = min(range(n), key=lambda a: (-vals[a], a))
        j = min(range(n), key=lambda a: (vals[a], a))
        g = min(alloc.bundles[i], key=lambda x: (-u[x], x))
        h = min(alloc.bundles[j], key=lambda x: (u[x], x))
        alloc = apply_exchange(alloc, ExchangeStep(i, j, g, h))
        after = tuple(inst.value(0, b) for b in alloc.bundles)
        trace.append(TraceStep(len(trace) + 1, i, j, g, h, u[g], u[h], vals, after))
    return alloc, trace


def verify_trace(trace) -> list[str]:
    """Names of the run invariants the trace violates (empty when all hold)."""
    trace = list(trace)
    if not trace:
        return []
    n = len(trace[0].utilities_before)
    for k, st in enumerate(trace, 1):
        if st.round != k:
            raise ValueError(f"step {k} is labelled round {st.round}")
        if len(st.utilities_before) != n or len(st.utilities_after) != n:
            raise ValueError(f"round {k} has utility vectors of the wrong length")
        if st.strong == st.weak or not (0 <= st.strong < n and 0 <= st.weak < n):
            raise ValueError(f"round {k} has an invalid agent pair")

    out = []
    goods = [g for st in trace for g in (st.good_strong, st.good_weak)]
    if len(goods) != len(set(goods)):
        out.append("good-exchanged-twice")
    strong = {st.strong for st in trace}
    weak = {st.weak for st in trace}
    if strong & weak:
        out.append("strong-weak-overlap")
    series = [trace[0].utilities_before] + [st.utilities_after for st in trace]
    if any(series[t + 1][a] > series[t][a] for a in strong for t in range(len(trace))):
        out.append("strong-not-monotone")
    if any(series[t + 1][a] < series[t][a] for a in weak for t in range(len(trace))):
        out.append("weak-not-monotone")
    if any(st.strong_good_value <= st.weak_good_value for st in trace):
        out.append("goods-comparison")
    return out

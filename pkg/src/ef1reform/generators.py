"""Instance factories.

Hardness constructions that turn a small combinatorial source problem
(partition, colouring, exact cover, coverage) into a fair-division question
with the same answer, brute-force solvers for the sources, and seeded random
instances.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .core import Allocation, Instance, UtilityClass
from .oracle import beneficial_reachable_ef1, exists_ef1_bruteforce, reaches_ef1_within

SOURCE_TAGS = (
    "partition-eq",
    "balanced-multi-partition",
    "three-partition",
    "graph-coloring",
    "x3c",
    "min-k-coverage",
)


@dataclass(frozen=True)
class SourceProblem:
    """A source instance: ``tag`` names the problem, ``payload`` holds its data.

    Payloads:
      partition-eq:             {"values": [...]}            (2q integers)
      balanced-multi-partition: {"values", "p", "q", "K"}
      three-partition:          {"values", "q", "K"}
      graph-coloring:           {"vertices": p, "edges": [[a, b], ...], "k"}
      x3c:                      {"elements": 3q, "sets": [[a, b, c], ...]}
      min-k-coverage:           {"elements": q, "sets": [[...], ...], "k", "l"}
    """

    tag: str
    payload: dict = field(hash=False)

    def __post_init__(self):
        if self.tag not in SOURCE_TAGS:
            raise ValueError(f"unknown source tag {self.tag!r}")
        _VALIDATORS[self.tag](self.payload)


def _need(payload: dict, *keys: str) -> None:
    missing = [k for k in keys if k not in payload]
    if missing:
        raise ValueError(f"source payload is missing {', '.join(missing)}")


def _check_partition(pl):
    _need(pl, "values")
    v = pl["values"]
    if not v or len(v) % 2 or any(x < 0 for x in v):
        raise ValueError("partition-eq needs an even number of non-negative integers")


def _check_bmp(pl):
    _need(pl, "values", "p", "q", "K")
    v, p, q, K = pl["values"], pl["p"], pl["q"], pl["K"]
    if p < 2 or q < 1 or K < 1 or len(v) != p * q:
        raise ValueError("balanced-multi-partition needs p >= 2, q >= 1, K >= 1 and pq values")
    if any(not K < x <= 2 * K for x in v):
        raise ValueError("balanced-multi-partition values must lie in (K, 2K]")
    if sum(v) != p * (q + 1) * K:
        raise ValueError("balanced-multi-partition values must sum to p(q+1)K")


def _check_three_partition(pl):
    _need(pl, "values", "q", "K")
    v, q, K = pl["values"], pl["q"], pl["K"]
    if q < 1 or len(v) != 3 * q or sum(v) != q * K or any(x <= 0 for x in v):
        raise ValueError("three-partition needs 3q positive values summing to qK")


def _check_coloring(pl):
    _need(pl, "vertices", "edges", "k")
    p = pl["vertices"]
    if p < 1 or pl["k"] < 1:
        raise ValueError("graph-coloring needs at least one vertex and one colour")
    for e in pl["edges"]:
        if len(e) != 2 or e[0] == e[1] or not all(0 <= x < p for x in e):
            raise ValueError(f"bad edge {e}")


def _check_x3c(pl):
    _need(pl, "elements", "sets")
    n = pl["elements"]
    if n < 3 or n % 3:
        raise ValueError("x3c needs a ground set of size 3q")
    for s in pl["sets"]:
        if len(set(s)) != 3 or not all(0 <= x < n for x in s):
            raise ValueError(f"bad triple {s}")


def _check_coverage(pl):
    _need(pl, "elements", "sets", "k", "l")
    q, sets = pl["elements"], pl["sets"]
    if not 1 <= pl["k"] <= q or not 1 <= pl["l"] <= len(sets):
        raise ValueError("min-k-coverage needs 1 <= k <= |X| and 1 <= l <= |C|")
    for s in sets:
        if not all(0 <= x < q for x in s):
            raise ValueError(f"bad subset {s}")


_VALIDATORS = {
    "partition-eq": _check_partition,
    "balanced-multi-partition": _check_bmp,
    "three-partition": _check_three_partition,
    "graph-coloring": _check_coloring,
    "x3c": _check_x3c,
    "min-k-coverage": _check_coverage,
}


# --- brute-force solvers for the sources ----------------------------------------


def _equal_groups(values, groups: int, size: int, total: int) -> bool:
    """Can ``values`` be split into ``groups`` groups of ``size`` items summing to ``total`` each?"""
    vals = sorted(values, reverse=True)
    fill = [0] * groups
    count = [0] * groups

    def rec(k: int) -> bool:
        if k == len(vals):
            return all(f == total for f in fill)
        tried = set()
        for gi in range(groups):
            key = (fill[gi], count[gi])
            if key in tried or count[gi] == size or fill[gi] + vals[k] > total:
                continue
            tried.add(key)
            fill[gi] += vals[k]
            count[gi] += 1
            if rec(k + 1):
                return True
            fill[gi] -= vals[k]
            count[gi] -= 1
        return False

    return rec(0)


def solve_source(src: SourceProblem) -> bool:
    pl = src.payload
    if src.tag == "partition-eq":
        v = pl["values"]
        return sum(v) % 2 == 0 and _equal_groups(v, 2, len(v) // 2, sum(v) // 2)
    if src.tag == "balanced-multi-partition":
        return _equal_groups(pl["values"], pl["p"], pl["q"], (pl["q"] + 1) * pl["K"])
    if src.tag == "three-partition":
        return _equal_groups(pl["values"], pl["q"], 3, pl["K"])
    if src.tag == "graph-coloring":
        p, k, edges = pl["vertices"], pl["k"], pl["edges"]
        return any(all(c[a] != c[b] for a, b in edges) for c in itertools.product(range(k), repeat=p))
    if src.tag == "x3c":
        q = pl["elements"] // 3
        return any(
            len(set().union(*chosen)) == 3 * q
            for chosen in itertools.combinations([frozenset(s) for s in pl["sets"]], q)
        )
    if src.tag == "min-k-coverage":
        return any(
            len(set().union(*chosen)) <= pl["k"]
            for chosen in itertools.combinations([frozenset(s) for s in pl["sets"]], pl["l"])
        )
    raise ValueError(src.tag)


# --- partition padding -------------------------------------------------------------


def gen_balanced_multi_partition(partition: SourceProblem, p: int) -> SourceProblem:
    """Pad an equal-cardinality partition instance to p parts and shift into (K, 2K]."""
    if partition.tag != "partition-eq":
        raise ValueError("expected a partition-eq source")
    if p < 2:
        raise ValueError("p must be at least 2")
    w = list(partition.payload["values"])
    q = len(w) // 2
    if sum(w) % 2:
        raise ValueError("partition values must have an even sum")
    k1 = sum(w) // 2
    if any(x > k1 for x in w):
        raise ValueError(f"value {max(w)} exceeds half the total {k1}")
    padded = w + [k1] * (p - 2) + [0] * (p * q - 2 * q - (p - 2))
    K = k1 + q
    return SourceProblem("balanced-multi-partition", {"values": [x + K + 1 for x in padded], "p": p, "q": q, "K": K})


# --- reductions ------------------------------------------------------------------

REDUCTIONS = {
    "two-agent-reformability": "balanced-multi-partition",
    "identical-const-reformability": "balanced-multi-partition",
    "identical-general-reformability": "three-partition",
    "binary-general-reformability": "graph-coloring",
    "two-agent-optimal": "balanced-multi-partition",
    "identical-const-optimal": "balanced-multi-partition",
    "binary-general-optimal": "x3c",
    "beneficial-exchanges": "min-k-coverage",
}


@dataclass(frozen=True)
class ReducedInstance:
    """A fair-division question built from a source problem.

    ``question`` is "reformable" (does an EF1 allocation with ``size_vector``
    exist), "within-budget" (is EF1 reachable from ``initial_allocation`` in
    at most ``budget_k`` exchanges) or "beneficial" (is EF1 reachable using
    only exchanges both participants gain from).
    """

    instance: Instance
    size_vector: tuple[int, ...]
    initial_allocation: Allocation | None = None
    budget_k: int | None = None
    question: str = "reformable"
    target: str = ""


def _two_agent_base(pl) -> tuple[list[int], list[int]]:
    """Utilities of the two-agent construction over 2q+6 goods (agent 1 row, agent 2 row)."""
    q, K = pl["q"], pl["K"]
    if pl["p"] != 2 or q < 2:
        raise ValueError("the two-agent construction needs p = 2 and q >= 2")
    y = list(pl["values"]) + [2 * K, 0]
    u2 = y + [0, 0, 2 * K, 2 * K]
    u1 = [x + 4 * K for x in u2]
    return u1, u2


def reduce(source: SourceProblem, target: str, *, n: int = 3) -> ReducedInstance:
    """Build the fair-division question for ``target`` from ``source``.

    ``n`` is only used by identical-const-reformability (number of agents, at least 3).
    """
    if target not in REDUCTIONS:
        raise ValueError(f"unknown reduction {target!r}")
    if REDUCTIONS[target] != source.tag:
        raise ValueError(f"{target} reduces from {REDUCTIONS[target]}, not {source.tag}")
    pl = source.payload

    if target == "two-agent-reformability":
        u1, u2 = _two_agent_base(pl)
        q = pl["q"]
        return ReducedInstance(Instance([u1, u2]), (q + 2, q + 4), target=target)

    if target == "two-agent-optimal":
        u1, u2 = _two_agent_base(pl)
        q = pl["q"]
        half = 2 * q + 6
        inst = Instance([u1 + [0] * half, u2 + [0] * half])
        start = Allocation([range(half, 2 * half), range(half)])
        return ReducedInstance(inst, (half, half), start, q + 2, "within-budget", target)

    if target == "identical-const-reformability":
        if pl["p"] != 2:
            raise ValueError("this construction needs p = 2")
        if n < 3:
            raise ValueError("this construction needs at least three agents")
        q, K = pl["q"], pl["K"]
        u = list(pl["values"]) + [(q + 1) * K] * n
        return ReducedInstance(Instance.identical(u, n), (q + 1, q + 1) + (1,) * (n - 2), target=target)

    if target == "identical-const-optimal":
        p, q, K = pl["p"], pl["q"], pl["K"]
        agents = p + 1
        s = p * q + q + 2
        u = list(pl["values"]) + [K] * (q + 2)
        u += [0] * (agents * s - len(u))
        # the last agent holds every valuable good
        start = Allocation([range(s * (i + 1), s * (i + 2)) for i in range(p)] + [range(s)])
        return ReducedInstance(Instance.identical(u, agents), (s,) * agents, start, p * q, "within-budget", target)

    if target == "identical-general-reformability":
        q, K = pl["q"], pl["K"]
        if any(5 * x <= K for x in pl["values"]):
            raise ValueError("every value must exceed K/5")
        # all utilities scaled by 5 so the K/5 goods stay integral
        u = [5 * x for x in pl["values"]] + [K] * 6
        return ReducedInstance(Instance.identical(u, q + 1), (3,) * q + (6,), target=target)

    if target == "binary-general-reformability":
        p, k, edges = pl["vertices"], pl["k"], pl["edges"]
        if k < 3:
            raise ValueError("the colouring construction needs k >= 3")
        m = k * p
        rows = []
        for a, b in edges:
            row = [0] * m
            row[a] = row[b] = 1
            rows.append(row)
        rows += [[0] * m for _ in range(k)]
        return ReducedInstance(Instance(rows), (0,) * len(edges) + (p,) * k, target=target)

    if target == "binary-general-optimal":
        return _reduce_x3c(pl)

    return _reduce_coverage(pl)


def _reduce_x3c(pl) -> ReducedInstance:
    elements, sets = pl["elements"], [sorted(s) for s in pl["sets"]]
    q, p = elements // 3, len(sets)
    n = elements + 1
    counts = [sum(x in s for s in sets) for x in range(elements)]
    if min(counts) < 2:
        raise ValueError("every element must lie in at least two triples")
    m = n * p

    def good(i, j):
        return i * p + j

    rows = []
    for i in range(elements):
        row = [0] * m
        for j in range(counts[i] - 2):
            row[good(i, j)] = 1
        for j, s in enumerate(sets):
            if i in s:
                row[good(elements, j)] = 1
        rows.append(row)
    rows.append([0] * m)
    start = Allocation([range(good(i, 0), good(i, 0) + p) for i in range(n)])
    return ReducedInstance(Instance(rows), (p,) * n, start, q, "within-budget", "binary-general-optimal")


def coverage_agents(q: int, k: int, p: int, l: int) -> list[tuple[int, int]]:
    """Agent labels (group, index) in order: q of group 1, k of 2, p of 3, p-l of 4."""
    return [(1, i) for i in range(q)] + [(2, i) for i in range(k)] + [(3, i) for i in range(p)] + [
        (4, i) for i in range(p - l)
    ]


def _reduce_coverage(pl) -> ReducedInstance:
    q, k, l = pl["elements"], pl["k"], pl["l"]
    sets = [set(s) for s in pl["sets"]]
    p = len(sets)
    labels = coverage_agents(q, k, p, l)
    index = {lab: a for a, lab in enumerate(labels)}
    n = len(labels)
    m = 2 * n

    def g(group, i, bit):
        return 2 * index[(group, i)] + bit

    rows = [[0] * m for _ in range(n)]
    for i in range(q):
        row = rows[index[(1, i)]]
        for j in range(k):
            row[g(2, j, 1)] = 1
        for j, s in enumerate(sets):
            if i in s:
                row[g(3, j, 0)] = row[g(3, j, 1)] = 1
    for i in range(k):
        for j in range(q):
            rows[index[(2, i)]][g(1, j, 1)] = 1
    for i in range(p):
        for j in range(p - l):
            rows[index[(3, i)]][g(4, j, 1)] = 1
    for i in range(p - l):
        for j in range(p):
            rows[index[(4, i)]][g(3, j, 1)] = 1
    start = Allocation([(2 * a, 2 * a + 1) for a in range(n)])
    return ReducedInstance(Instance(rows), (2,) * n, start, None, "beneficial", "beneficial-exchanges")


def decide(red: ReducedInstance, budget=None) -> bool:
    """Answer the reduced question by exhaustive search."""
    if red.question == "reformable":
        return exists_ef1_bruteforce(red.instance, red.size_vector, budget, quotient=True)
    if red.question == "within-budget":
        return reaches_ef1_within(red.instance, red.initial_allocation, red.budget_k, budget, quotient=True)
    if red.question == "beneficial":
        return beneficial_reachable_ef1(red.instance, red.initial_allocation, budget)[0]
    raise ValueError(red.question)


# --- random instances --------------------------------------------------------------


def random_instance(seed: int, n: int, m: int, cls: UtilityClass | str = UtilityClass.GENERAL,
                    max_u: int = 3) -> Instance:
    """Utilities uniform on [0, max_u] (binary classes cap at 1; identical classes copy row 0)."""
    if n < 2 or m < 1 or max_u < 0:
        raise ValueError("need n >= 2, m >= 1 and max_u >= 0")
    cls = UtilityClass(cls)
    rng = np.random.default_rng(seed)
    hi = min(max_u, 1) if cls.binary else max_u
    u = rng.integers(0, hi + 1, size=(n, m))
    if cls.identical:
        u[:] = u[0]
    return Instance(u.tolist())


def random_allocation(seed: int, n: int, m: int, sv=None) -> Allocation:
    """Uniform random allocation, optionally with a fixed size vector."""
    rng = np.random.default_rng(seed)
    if sv is None:
        owners = rng.integers(0, n, size=m).tolist()
    else:
        owners = [a for a, s in enumerate(sv) for _ in range(s)]
        if len(owners) != m:
            raise ValueError("size vector does not sum to m")
        owners = rng.permutation(owners).tolist()
    return Allocation.from_owners(owners, n)

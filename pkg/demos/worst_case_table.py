"""Exchanges needed from s-balanced starts: bounds next to measured values."""

from ef1reform import Allocation, min_exchanges_bfs, random_instance
from ef1reform.worst_case import (
    construct_ef1_within_bound,
    idenbin_bounds,
    lower_bound_formula,
    lower_bound_instance,
    upper_bound_formula,
)

print(" n  s  lower  upper  lower-family BFS")
for n, s in ((2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (3, 3)):
    bfs = min_exchanges_bfs(*lower_bound_instance(n, s))
    print(f"{n:2d} {s:2d}  {str(lower_bound_formula(n, s)):>5}  {upper_bound_formula(n, s):5d}  {bfs:5d}")

print("\nidentical binary, half the agents hold every valuable good")
for n, s in ((2, 2), (2, 4), (3, 3), (3, 5), (4, 2)):
    rep = idenbin_bounds(n, s)
    print(f"n={n} s={s}: {rep.lower} <= {rep.achieved} <= {rep.upper}")

print("\nconstructed targets on random 3-agent instances, s = 3")
worst = 0
for seed in range(200):
    inst = random_instance(seed, 3, 9, max_u=3)
    start = Allocation([range(0, 3), range(3, 6), range(6, 9)])
    _, count = construct_ef1_within_bound(inst, start)
    worst = max(worst, count)
print(f"most exchanges used: {worst}, bound {upper_bound_formula(3, 3)}")

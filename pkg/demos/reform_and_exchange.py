"""Is there an EF1 allocation with these bundle sizes, and how few swaps reach one?"""

from ef1reform import Allocation, Instance, is_ef1, optimal_exchanges_with_method, reformable_with_method, replay

# two agents who agree on values: 5, 4, 3, 2, 1, 0
inst = Instance.identical([5, 4, 3, 2, 1, 0])
start = Allocation([[0, 1, 2], [3, 4, 5]])
print("start", start, "EF1:", is_ef1(inst, start))

ok, method = reformable_with_method(inst, (3, 3))
print("EF1 with sizes (3,3) exists:", ok, "via", method)

count, trace, method = optimal_exchanges_with_method(inst, start)
print(f"fewest exchanges: {count} ({method})")
for step in trace:
    print("  ", step)
print("end  ", replay(start, trace))

# sizes can make EF1 impossible: one good against three equal ones
flat = Instance.identical([2, 2, 2, 2])
ok, method = reformable_with_method(flat, (1, 3))
print("EF1 with sizes (1,3) exists:", ok, "via", method)
count, _, method = optimal_exchanges_with_method(flat, Allocation([[0], [1, 2, 3]]))
print(f"exchanges from ({{0}},{{1,2,3}}): {count} ({method})")

"""Richest-poorest swaps under identical utilities, with the per-round record."""

from ef1reform import Allocation, Instance
from ef1reform.weak_ef1 import algorithm_A, verify_trace

inst = Instance.identical([9, 8, 7, 6, 1, 1, 0, 0, 0], 3)
start = Allocation([[0, 1, 2], [3, 4, 5], [6, 7, 8]])
final, trace = algorithm_A(inst, start)
print("start", start)
for st in trace:
    print(f"round {st.round}: agent {st.strong} gives good {st.good_strong} (value {st.strong_good_value}) "
          f"to agent {st.weak} for good {st.good_weak} (value {st.weak_good_value}); "
          f"bundle values {st.utilities_before} -> {st.utilities_after}")
print("final", final)
print("violated properties:", verify_trace(trace) or "none")

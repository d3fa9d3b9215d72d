"""Turn small combinatorial problems into fair-division questions and compare answers."""

from ef1reform.generators import SourceProblem, decide, reduce, solve_source

triangle = SourceProblem("graph-coloring", {"vertices": 3, "edges": [[0, 1], [1, 2], [0, 2]], "k": 3})
k4 = SourceProblem("graph-coloring", {"vertices": 4, "edges": [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]],
                                      "k": 3})
cover = SourceProblem("x3c", {"elements": 6, "sets": [[0, 1, 2], [3, 4, 5], [0, 1, 3], [2, 4, 5]]})

for name, src, target in (("triangle", triangle, "binary-general-reformability"),
                          ("K4", k4, "binary-general-reformability"),
                          ("exact cover", cover, "binary-general-optimal")):
    red = reduce(src, target)
    inst = red.instance
    print(f"{name}: {inst.num_agents} agents, {inst.num_goods} goods, question {red.question!r}; "
          f"source says {solve_source(src)}, fair division says {decide(red)}")

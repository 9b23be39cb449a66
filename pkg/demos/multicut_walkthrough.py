"""Walk through one small multicut instance end to end.

Three nodes, two attractive edges and one repulsive edge.  We enumerate
every partition, run both greedy heuristics, then lower the instance to an
LP file, solve that exhaustively and map the assignment back.
"""
from structpred import MulticutInstance
from structpred.evaluation import evaluate
from structpred.formats import serialize
from structpred.lowering import decode_solution, lower
from structpred.solve import brute_force, gaec, greedy_edge_fixation

mc = MulticutInstance.from_edges([(0, 1, -1.0), (1, 2, -1.0), (0, 2, 2.0)])
print(serialize(mc))

best = brute_force(mc)
print(f"optimum over {best.work_counter} partitions: {best.objective} with {best.solution}")

for name, solver in (("GAEC", gaec), ("edge fixation", greedy_edge_fixation)):
    res = solver(mc)
    print(f"{name}: objective {res.objective}, trace {[float(t) for t in res.trace]}")

model = lower(mc, cycle_len_limit=3)
print(serialize(model.ilp))

ilp = brute_force(model.ilp)
partition = decode_solution(model, ilp.solution)
print(f"ILP optimum {ilp.objective + model.objective_offset}, decoded back to {partition}")
print("native check:", evaluate(mc, partition).as_dict())

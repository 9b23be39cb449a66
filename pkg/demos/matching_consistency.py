"""Cycle consistency across three point sets A, B and C of two points each.

Matching A0 to B1, B1 to C1 but A1 to C1 cannot come from one common
labeling of the points.  The evaluator names the offending chains; swapping
the A-C match to A0-C1 repairs it.
"""
from structpred import GmInstance, GmSolution, MgmInstance
from structpred.evaluation import evaluate
from structpred.lowering import lower
from structpred.solve import brute_force


def all_pairs():
    # assignment id 2*i + j matches point i to point j, all at cost 0
    return GmInstance.from_lists(2, 2, [(2 * i + j, i, j, 0.0) for i in range(2)
                                        for j in range(2)], [])


inst = MgmInstance((2, 2, 2), {(0, 1): all_pairs(), (0, 2): all_pairs(), (1, 2): all_pairs()})

broken = {(0, 1): GmSolution(frozenset({1})), (1, 2): GmSolution(frozenset({3})),
          (0, 2): GmSolution(frozenset({3}))}
rep = evaluate(inst, broken)
print("feasible:", rep.feasible)
for v in rep.violations:
    print(" ", v.kind, v.location, "-", v.description)

fixed = dict(broken)
fixed[(0, 2)] = GmSolution(frozenset({1}))
print("after swapping the A-C match:", evaluate(inst, fixed).feasible)

model = lower(inst)
print(f"lowered: {len(model.ilp.variables)} binaries, {len(model.ilp.constraints)} rows; "
      f"ILP optimum {brute_force(model.ilp).objective}")

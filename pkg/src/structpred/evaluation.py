"""Feasibility checks and objective values for every problem class.

The objective is always reported, even when the solution is infeasible.
Each violation names a constraint kind and a location tuple.
"""
from __future__ import annotations

import json
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Mapping, NamedTuple

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .model import (
    AmwcInstance,
    AmwcSolution,
    BottleneckMrfInstance,
    CellTrackingInstance,
    CellTrackingSolution,
    EdgeCutVector,
    GmInstance,
    GmSolution,
    IlpInstance,
    MgmInstance,
    MrfInstance,
    MrfLabeling,
    MulticutInstance,
    Partition,
    TomographyInstance,
)

ILP_TOLERANCE = 1e-9


class DimensionMismatch(ValueError):
    pass


class UnknownId(ValueError):
    pass


class Violation(NamedTuple):
    kind: str
    location: tuple
    description: str


@dataclass(frozen=True)
class EvaluationReport:
    feasible: bool
    objective: float
    violations: tuple = ()

    def as_dict(self) -> dict:
        def plain(x):
            return [plain(y) for y in x] if isinstance(x, tuple) else x

        obj = self.objective
        return {
            "feasible": self.feasible,
            "objective": obj if math.isfinite(obj) else ("inf" if obj > 0 else "-inf"),
            "violations": [{"kind": v.kind, "location": plain(v.location),
                            "description": v.description} for v in self.violations],
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict())


def _report(objective, violations):
    return EvaluationReport(not violations, float(objective), tuple(violations))


# ---------------------------------------------------------------------------
# MRF family


def _labels(mrf: MrfInstance, labeling: MrfLabeling):
    x = labeling.labels if isinstance(labeling, MrfLabeling) else tuple(labeling)
    if len(x) != mrf.node_count:
        raise DimensionMismatch(f"labeling has {len(x)} entries for {mrf.node_count} nodes")
    bad = [Violation("label_range", (v,), f"label {l} of node {v} is not below "
                                          f"{mrf.label_counts[v]}")
           for v, l in enumerate(x) if not 0 <= l < mrf.label_counts[v]]
    return x, bad


def _exact_sum(terms) -> float:
    try:
        return math.fsum(terms)
    except ValueError:  # inf and -inf together
        return math.nan


def _mrf_terms(mrf: MrfInstance, x) -> list:
    terms = [float(table[x[v]]) for v, table in enumerate(mrf.unaries)]
    terms += [float(table[x[u], x[v]]) for (u, v), table in zip(mrf.edges.tolist(), mrf.pairwise)]
    return terms


def mrf_energy(mrf: MrfInstance, x) -> float:
    """Correctly rounded sum of the selected unary and pairwise entries."""
    return _exact_sum(_mrf_terms(mrf, x))


def evaluate_mrf(mrf: MrfInstance, labeling: MrfLabeling) -> EvaluationReport:
    x, bad = _labels(mrf, labeling)
    if bad:
        return _report(math.inf, bad)
    return _report(mrf_energy(mrf, x), [])


def bottleneck_term(inst: BottleneckMrfInstance, x) -> float:
    """min(max node ψ, max edge ψ); an empty side is dropped, both empty gives 0."""
    psi = inst.bottleneck
    node_max = max((t[x[v]] for v, t in enumerate(psi.unaries)), default=None)
    edge_max = max((t[x[u], x[v]] for (u, v), t in zip(psi.edges.tolist(), psi.pairwise)),
                   default=None)
    present = [float(m) for m in (node_max, edge_max) if m is not None]
    return min(present) if present else 0.0


def evaluate_bottleneck_mrf(inst: BottleneckMrfInstance, labeling: MrfLabeling) -> EvaluationReport:
    x, bad = _labels(inst.base, labeling)
    if bad:
        return _report(math.inf, bad)
    return _report(mrf_energy(inst.base, x) + bottleneck_term(inst, x), [])


def evaluate_tomography(inst: TomographyInstance, labeling: MrfLabeling) -> EvaluationReport:
    x, bad = _labels(inst.base, labeling)
    if bad:
        return _report(math.inf, bad)
    terms = _mrf_terms(inst.base, x)
    violations = []
    for n, proj in enumerate(inst.projections):
        s = sum(x[v] for v in proj.nodes)
        cost = float(proj.costs[s])
        if math.isinf(cost) and cost > 0:
            violations.append(Violation("projection", (n,),
                                        f"projection {n} sums to {s}, which has infinite cost"))
        else:
            terms.append(cost)
    return _report(_exact_sum(terms), violations)


# ---------------------------------------------------------------------------
# Multicut and AMWC


def _component_labels(n, sources, targets, cut) -> np.ndarray:
    if n == 0:
        return np.empty(0, dtype=np.int64)
    keep = np.asarray(cut, dtype=np.int64) == 0
    g = coo_matrix((np.ones(int(keep.sum())), (sources[keep], targets[keep])), shape=(n, n))
    return connected_components(g, directed=False)[1]


def cut_from_partition(inst: MulticutInstance, partition: Partition) -> EdgeCutVector:
    clusters = partition.clusters if isinstance(partition, Partition) else tuple(partition)
    if len(clusters) != inst.node_count:
        raise DimensionMismatch(f"partition covers {len(clusters)} nodes, instance has "
                                f"{inst.node_count}")
    c = np.asarray(clusters, dtype=np.int64)
    if inst.edge_count == 0:
        return EdgeCutVector(())
    return EdgeCutVector(tuple((c[inst.sources] != c[inst.targets]).astype(int).tolist()))


def partition_from_cut(inst: MulticutInstance, cut: EdgeCutVector) -> Partition:
    """Clusters are the connected components of the uncut edges."""
    return Partition.from_labels(
        _component_labels(inst.node_count, inst.sources, inst.targets, cut.cut).tolist())


def _cut_cycle_violations(n, sources, targets, cut, skip=()):
    comp = _component_labels(n, sources, targets, cut)
    out = []
    for e, (i, j, y) in enumerate(zip(sources.tolist(), targets.tolist(), cut)):
        if y and comp[i] == comp[j] and e not in skip:
            out.append(Violation("cycle", (i, j),
                                 f"edge ({i},{j}) is cut but its endpoints are joined by uncut edges"))
    return out


def evaluate_multicut(inst: MulticutInstance, cut: EdgeCutVector) -> EvaluationReport:
    y = cut.cut if isinstance(cut, EdgeCutVector) else tuple(cut)
    if len(y) != inst.edge_count:
        raise DimensionMismatch(f"cut vector has {len(y)} entries for {inst.edge_count} edges")
    objective = _exact_sum(c for c, v in zip(inst.costs.tolist(), y) if v)
    return _report(objective, _cut_cycle_violations(inst.node_count, inst.sources, inst.targets, y))


def evaluate_amwc(inst: AmwcInstance, solution: AmwcSolution) -> EvaluationReport:
    x, y = solution.labels, solution.cut.cut
    if len(x) != inst.node_count or len(y) != inst.edge_count:
        raise DimensionMismatch("solution does not match the instance dimensions")
    violations = []
    for i, k in enumerate(x):
        if not 0 <= k < inst.class_count:
            violations.append(Violation("label_range", (i,), f"class {k} of node {i} is not below "
                                                             f"{inst.class_count}"))
    if violations:
        return _report(math.inf, violations)
    objective = _exact_sum([float(inst.node_costs[i, k]) for i, k in enumerate(x)]
                           + [c for c, v in zip(inst.costs.tolist(), y) if v])
    flagged = set()
    for e, (i, j) in enumerate(zip(inst.sources.tolist(), inst.targets.tolist())):
        if x[i] != x[j] and not y[e]:
            violations.append(Violation("label_link", (i, j),
                                        f"edge ({i},{j}) joins classes {x[i]} and {x[j]} but is not cut"))
            flagged.add(e)
        elif x[i] == x[j] and x[i] not in inst.partitionable and y[e]:
            violations.append(Violation("nonpartitionable_cut", (i, j),
                                        f"edge ({i},{j}) is cut inside non-partitionable class {x[i]}"))
            flagged.add(e)
    violations += _cut_cycle_violations(inst.node_count, inst.sources, inst.targets, y, flagged)
    return _report(objective, violations)


# ---------------------------------------------------------------------------
# Graph matching


def _gm_parts(gm: GmInstance, solution: GmSolution, where=()):
    active = solution.active
    for a in sorted(active):
        if not gm.has_assignment(a):
            raise UnknownId(f"assignment id {a} is not in the instance")
    terms = []
    rows, cols = defaultdict(list), defaultdict(list)
    for aid, i, j, c in gm.assignments:
        if aid in active:
            terms.append(float(c))
            rows[i].append(aid)
            cols[j].append(aid)
    for a, b, d in gm.quadratic:
        if a in active and b in active:
            terms.append(float(d))
    violations = []
    for i in sorted(rows):
        if len(rows[i]) > 1:
            violations.append(Violation("row", where + (i,),
                                        f"left node {i} has assignments {sorted(rows[i])} active"))
    for j in sorted(cols):
        if len(cols[j]) > 1:
            violations.append(Violation("column", where + (j,),
                                        f"right node {j} has assignments {sorted(cols[j])} active"))
    return terms, violations


def evaluate_gm(gm: GmInstance, solution: GmSolution) -> EvaluationReport:
    terms, violations = _gm_parts(gm, solution)
    return _report(_exact_sum(terms), violations)


def evaluate_mgm(inst: MgmInstance, solutions: Mapping) -> EvaluationReport:
    """Pairwise matchings plus cycle consistency over every graph triple.

    For graphs p<k<l each of the three links may be the one demanded by the
    other two: g0:i0-g1:i1 and g1:i1-g2:i2 active require g0:i0-g2:i2 active.
    Violation locations are the chain ``((g0, i0), (g1, i1), (g2, i2))``.
    """
    for key in solutions:
        if key not in inst.pairs and solutions[key].active:
            raise UnknownId(f"solution has matches for pair {key}, which is not in the instance")
    terms = []
    violations = []
    links = {}
    for key in sorted(inst.pairs):
        if key not in solutions:
            raise DimensionMismatch(f"no solution given for pair {key}")
        gm = inst.pairs[key]
        obj, viol = _gm_parts(gm, solutions[key], key)
        terms += obj
        violations += viol
        active = solutions[key].active
        links[key] = {(i, j) for aid, i, j, _ in gm.assignments if aid in active}

    def neighbours(g, h):
        out = defaultdict(set)
        for i, j in links.get((min(g, h), max(g, h)), ()):
            a, c = (i, j) if g < h else (j, i)
            out[a].add(c)
        return out

    def linked(g, i, h, j):
        if g < h:
            return (i, j) in links.get((g, h), ())
        return (j, i) in links.get((h, g), ())

    k_count = inst.graph_count
    for p in range(k_count):
        for k in range(p + 1, k_count):
            for l in range(k + 1, k_count):
                for g0, g1, g2 in ((p, k, l), (p, l, k), (k, p, l)):
                    n01, n12 = neighbours(g0, g1), neighbours(g1, g2)
                    for i0 in sorted(n01):
                        for i1 in sorted(n01[i0]):
                            for i2 in sorted(n12.get(i1, ())):
                                if not linked(g0, i0, g2, i2):
                                    violations.append(Violation(
                                        "transitivity", ((g0, i0), (g1, i1), (g2, i2)),
                                        f"{g0}:{i0} -> {g1}:{i1} -> {g2}:{i2} is matched but "
                                        f"{g0}:{i0} and {g2}:{i2} are not"))
    return _report(_exact_sum(terms), violations)


# ---------------------------------------------------------------------------
# Cell tracking


def evaluate_cell_tracking(inst: CellTrackingInstance,
                           solution: CellTrackingSolution) -> EvaluationReport:
    det_cost = {d.id: d.cost for d in inst.detections}
    move_by_id = {m.id: m for m in inst.moves}
    div_by_id = {d.id: d for d in inst.divisions}
    for ids, known, what in ((solution.detections, det_cost, "detection"),
                             (solution.appearances, inst.appearances, "appearance"),
                             (solution.disappearances, inst.disappearances, "disappearance"),
                             (solution.moves, move_by_id, "move"),
                             (solution.divisions, div_by_id, "division")):
        for i in sorted(ids):
            if i not in known:
                raise UnknownId(f"{what} {i} is not in the instance")
    objective = _exact_sum([det_cost[i] for i in solution.detections]
                           + [inst.appearances[i] for i in solution.appearances]
                           + [inst.disappearances[i] for i in solution.disappearances]
                           + [move_by_id[i].cost for i in solution.moves]
                           + [div_by_id[i].cost for i in solution.divisions])
    inflow, outflow = defaultdict(int), defaultdict(int)
    for i in solution.moves:
        m = move_by_id[i]
        outflow[m.source] += 1
        inflow[m.target] += 1
    for i in solution.divisions:
        d = div_by_id[i]
        outflow[d.parent] += 1
        inflow[d.child1] += 1
        inflow[d.child2] += 1
    violations = []
    for d in inst.detections:
        active = int(d.id in solution.detections)
        if inst.has_incoming_constraint(d.id):
            total = inflow[d.id] + int(d.id in solution.appearances)
            if total != active:
                violations.append(Violation(
                    "incoming", (d.id,),
                    f"detection {d.id} is {'active' if active else 'inactive'} with {total} "
                    f"incoming appearance/move/division links"))
        if inst.has_outgoing_constraint(d.id):
            total = outflow[d.id] + int(d.id in solution.disappearances)
            if total != active:
                violations.append(Violation(
                    "outgoing", (d.id,),
                    f"detection {d.id} is {'active' if active else 'inactive'} with {total} "
                    f"outgoing disappearance/move/division links"))
    for n, s in enumerate(inst.exclusions):
        on = [i for i in s if i in solution.detections]
        if len(on) > 1:
            violations.append(Violation("exclusion", (n,),
                                        f"exclusion set {n} has detections {on} active"))
    return _report(objective, violations)


# ---------------------------------------------------------------------------
# ILP


def _integral(x: float) -> bool:
    return math.isfinite(x) and float(x).is_integer()


def evaluate_ilp(ilp: IlpInstance, assignment: Mapping) -> EvaluationReport:
    """Check every row; integer rows exactly, others with absolute tolerance 1e-9."""
    values = {}
    for name in ilp.variables:
        if name not in assignment:
            raise DimensionMismatch(f"assignment lacks variable {name!r}")
        v = assignment[name]
        if v not in (0, 1):
            raise ValueError(f"variable {name!r} has non-binary value {v!r}")
        values[name] = int(v)
    objective = math.fsum(c for name, c in ilp.objective.items() if values[name])
    violations = []
    for con in ilp.constraints:
        exact = _integral(con.rhs) and all(_integral(a) for a in con.terms.values())
        if exact:
            lhs = sum(int(a) for name, a in con.terms.items() if values[name])
            rhs = int(con.rhs)
            ok = {"<=": lhs <= rhs, ">=": lhs >= rhs, "=": lhs == rhs}[con.relation]
        else:
            lhs = math.fsum(a for name, a in con.terms.items() if values[name])
            rhs = con.rhs
            ok = {"<=": lhs <= rhs + ILP_TOLERANCE, ">=": lhs >= rhs - ILP_TOLERANCE,
                  "=": abs(lhs - rhs) <= ILP_TOLERANCE}[con.relation]
        if not ok:
            violations.append(Violation("constraint", (con.id,),
                                        f"{con.id}: lhs {lhs} {con.relation} {rhs} fails"))
    return _report(objective, violations)


def evaluate(instance, solution) -> EvaluationReport:
    """Dispatch to the evaluator for the instance's class."""
    if isinstance(instance, MrfInstance):
        return evaluate_mrf(instance, solution)
    if isinstance(instance, BottleneckMrfInstance):
        return evaluate_bottleneck_mrf(instance, solution)
    if isinstance(instance, TomographyInstance):
        return evaluate_tomography(instance, solution)
    if isinstance(instance, MulticutInstance):
        if isinstance(solution, Partition):
            solution = cut_from_partition(instance, solution)
        return evaluate_multicut(instance, solution)
    if isinstance(instance, AmwcInstance):
        return evaluate_amwc(instance, solution)
    if isinstance(instance, GmInstance):
        return evaluate_gm(instance, solution)
    if isinstance(instance, MgmInstance):
        return evaluate_mgm(instance, solution)
    if isinstance(instance, CellTrackingInstance):
        return evaluate_cell_tracking(instance, solution)
    if isinstance(instance, IlpInstance):
        return evaluate_ilp(instance, solution)
    raise TypeError(f"cannot evaluate {type(instance).__name__}")

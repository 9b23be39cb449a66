"""Exhaustive optimality oracles and greedy baseline heuristics.

Multicut sign convention: the objective is the summed cost of cut edges, so
an edge with positive cost is attractive (joining its endpoints saves it).
"""
from __future__ import annotations

import heapq
import itertools
import math
import sys
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .evaluation import (
    _exact_sum,
    bottleneck_term,
    cut_from_partition,
    evaluate,
    evaluate_gm,
    evaluate_mgm,
    evaluate_multicut,
    mrf_energy,
)
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

DEFAULT_BUDGET = 10**7


class BudgetExceeded(RuntimeError):
    def __init__(self, size, budget):
        self.size = size
        self.budget = budget
        super().__init__(f"search space of {size} candidates exceeds the budget of {budget}")


@dataclass(frozen=True)
class SolveResult:
    solution: object
    objective: float
    optimal: bool
    work_counter: int
    trace: tuple = field(default=(), compare=False)

    def as_dict(self, solution_text=None) -> dict:
        obj = self.objective
        return {
            "objective": obj if math.isfinite(obj) else ("inf" if obj > 0 else "-inf"),
            "optimal": self.optimal,
            "work_counter": self.work_counter,
            "solution": solution_text,
        }


def _check_budget(size, budget):
    if size > budget:
        raise BudgetExceeded(size, budget)


def _better(obj, key, best_obj, best_key):
    return best_key is None or obj < best_obj or (obj == best_obj and key < best_key)


# ---------------------------------------------------------------------------
# brute force


def bell_number(n: int) -> int:
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


def restricted_growth_strings(n: int):
    """All set partitions of ``range(n)`` as canonical label tuples, in lexicographic order."""
    if n == 0:
        yield ()
        return
    a = [0] * n

    def rec(i, m):
        if i == n:
            yield tuple(a)
            return
        for c in range(m + 2):
            a[i] = c
            yield from rec(i + 1, max(m, c))

    yield from rec(1, 0)


def _brute_labelings(mrf: MrfInstance, budget, objective_of):
    size = math.prod(int(c) for c in mrf.label_counts)
    _check_budget(size, budget)
    best_obj, best = math.inf, None
    count = 0
    for x in itertools.product(*(range(int(c)) for c in mrf.label_counts)):
        count += 1
        obj = objective_of(x)
        if obj is not None and (best is None or obj < best_obj):
            best_obj, best = obj, x
    return SolveResult(MrfLabeling(best) if best is not None else None, best_obj, True, count)


def _brute_multicut(inst: MulticutInstance, budget):
    _check_budget(bell_number(inst.node_count), budget)
    src, dst, cost = inst.sources.tolist(), inst.targets.tolist(), inst.costs.tolist()
    best_obj, best = math.inf, None
    count = 0
    for labels in restricted_growth_strings(inst.node_count):
        count += 1
        obj = _exact_sum([c for i, j, c in zip(src, dst, cost) if labels[i] != labels[j]])
        if best is None or obj < best_obj:
            best_obj, best = obj, labels
    return SolveResult(Partition(best), float(best_obj), True, count)


def _brute_amwc(inst: AmwcInstance, budget):
    n, k_count = inst.node_count, inst.class_count
    _check_budget(k_count ** n * bell_number(n), budget)
    src, dst, cost = inst.sources.tolist(), inst.targets.tolist(), inst.costs.tolist()
    part = inst.partitionable
    partitions = list(restricted_growth_strings(n))
    best_obj, best = math.inf, None
    count = 0
    for x in itertools.product(range(k_count), repeat=n):
        node_terms = [float(inst.node_costs[i, k]) for i, k in enumerate(x)]
        for labels in partitions:
            count += 1
            y = tuple(int(labels[i] != labels[j]) for i, j in zip(src, dst))
            ok = all((x[i] == x[j] or y[e]) and not (x[i] == x[j] and x[i] not in part and y[e])
                     for e, (i, j) in enumerate(zip(src, dst)))
            if not ok:
                continue
            obj = _exact_sum(node_terms + [c for c, v in zip(cost, y) if v])
            if _better(obj, (x, y), best_obj, None if best is None else best):
                best_obj, best = obj, (x, y)
    if best is None:
        return SolveResult(None, math.inf, True, count)
    return SolveResult(AmwcSolution(best[0], EdgeCutVector(best[1])), float(best_obj), True, count)


def _matchings(gm: GmInstance):
    """All partial matchings as sorted position tuples; count is prod(deg+1) before filtering."""
    by_left = defaultdict(list)
    for pos, (i, j) in enumerate(zip(gm.left.tolist(), gm.right.tolist())):
        by_left[i].append((pos, j))
    options = [[None] + by_left[i] for i in sorted(by_left)]
    for choice in itertools.product(*options):
        picked = [c for c in choice if c is not None]
        cols = [j for _, j in picked]
        if len(set(cols)) == len(cols):
            yield tuple(sorted(pos for pos, _ in picked))


def _matching_space(gm: GmInstance) -> int:
    degree = defaultdict(int)
    for i in gm.left.tolist():
        degree[i] += 1
    return math.prod(d + 1 for d in degree.values())


def _gm_key(gm: GmInstance, positions):
    on = set(positions)
    return tuple(int(p in on) for p in range(gm.assignment_count))


def _brute_gm(gm: GmInstance, budget):
    _check_budget(_matching_space(gm), budget)
    ids = gm.ids.tolist()
    best_obj, best_key, best = math.inf, None, None
    count = 0
    for positions in _matchings(gm):
        count += 1
        sol = GmSolution(frozenset(ids[p] for p in positions))
        obj = evaluate_gm(gm, sol).objective
        key = _gm_key(gm, positions)
        if _better(obj, key, best_obj, best_key):
            best_obj, best_key, best = obj, key, sol
    return SolveResult(best, float(best_obj), True, count)


def _brute_mgm(inst: MgmInstance, budget):
    keys = sorted(inst.pairs)
    _check_budget(math.prod(_matching_space(inst.pairs[k]) for k in keys), budget)
    per_pair = [list(_matchings(inst.pairs[k])) for k in keys]
    best_obj, best_key, best = math.inf, None, None
    count = 0
    for combo in itertools.product(*per_pair):
        count += 1
        sols = {k: GmSolution(frozenset(inst.pairs[k].ids[list(pos)].tolist()))
                for k, pos in zip(keys, combo)}
        report = evaluate_mgm(inst, sols)
        if not report.feasible:
            continue
        key = tuple(b for k, pos in zip(keys, combo) for b in _gm_key(inst.pairs[k], pos))
        if _better(report.objective, key, best_obj, best_key):
            best_obj, best_key, best = report.objective, key, sols
    return SolveResult(best, float(best_obj), True, count)


def _brute_cell_tracking(inst: CellTrackingInstance, budget):
    """Enumerate transitions, then the detection states they leave open.

    The candidate space counted against the budget is every on/off pattern of
    detections, moves and divisions; appearances and disappearances follow
    from the flow equalities.
    """
    dets = [d.id for d in inst.detections]
    transitions = [("move", m) for m in inst.moves] + [("div", d) for d in inst.divisions]
    _check_budget(2 ** (len(dets) + len(transitions)), budget)
    det_cost = {d.id: d.cost for d in inst.detections}
    excl = [set(s) for s in inst.exclusions]
    incoming_c = {d: inst.has_incoming_constraint(d) for d in dets}
    outgoing_c = {d: inst.has_outgoing_constraint(d) for d in dets}
    best_obj, best_key, best = math.inf, None, None
    count = 0
    for pattern in itertools.product((0, 1), repeat=len(transitions)):
        inflow, outflow = defaultdict(int), defaultdict(int)
        base = []
        for on, (kind, t) in zip(pattern, transitions):
            if not on:
                continue
            base.append(t.cost)
            if kind == "move":
                outflow[t.source] += 1
                inflow[t.target] += 1
            else:
                outflow[t.parent] += 1
                inflow[t.child1] += 1
                inflow[t.child2] += 1
        # each detection: which states are compatible with the flows
        choices = []
        for d in dets:
            opts = []
            for on in (0, 1):
                app = on - inflow[d]
                disapp = on - outflow[d]
                if incoming_c[d]:
                    if app not in ((0, 1) if d in inst.appearances else (0,)):
                        continue
                else:
                    app = 0
                    if inflow[d]:
                        continue
                if outgoing_c[d]:
                    if disapp not in ((0, 1) if d in inst.disappearances else (0,)):
                        continue
                else:
                    disapp = 0
                    if outflow[d]:
                        continue
                terms = ([det_cost[d]] if on else []) + ([inst.appearances[d]] if app else []) \
                    + ([inst.disappearances[d]] if disapp else [])
                opts.append((on, app, disapp, terms))
            if not opts:
                break
            choices.append(opts)
        else:
            for states in itertools.product(*choices):
                count += 1
                active = {d for d, s in zip(dets, states) if s[0]}
                if any(len(s & active) > 1 for s in excl):
                    continue
                obj = _exact_sum(base + [c for s in states for c in s[3]])
                key = (tuple(s[0] for s in states),
                       tuple(s[1] for d, s in zip(dets, states) if d in inst.appearances),
                       tuple(s[2] for d, s in zip(dets, states) if d in inst.disappearances),
                       pattern)
                if _better(obj, key, best_obj, best_key):
                    best_obj, best_key = obj, key
                    best = (states, pattern)
            continue
        count += 1
    if best is None:
        return SolveResult(None, math.inf, True, count)
    states, pattern = best
    sol = CellTrackingSolution(
        detections=[d for d, s in zip(dets, states) if s[0]],
        appearances=[d for d, s in zip(dets, states) if s[1]],
        disappearances=[d for d, s in zip(dets, states) if s[2]],
        moves=[t.id for on, (kind, t) in zip(pattern, transitions) if on and kind == "move"],
        divisions=[t.id for on, (kind, t) in zip(pattern, transitions) if on and kind == "div"])
    return SolveResult(sol, float(evaluate(inst, sol).objective), True, count)


def brute_force(instance, budget: int = DEFAULT_BUDGET) -> SolveResult:
    """Exact minimizer by exhaustive enumeration.

    Raises BudgetExceeded before searching when the candidate space is larger
    than ``budget``; for an IlpInstance the budget caps visited search nodes.
    Returns ``solution=None`` and infinite objective when nothing is feasible.
    """
    if isinstance(instance, MrfInstance):
        return _brute_labelings(instance, budget, lambda x: mrf_energy(instance, x))
    if isinstance(instance, BottleneckMrfInstance):
        return _brute_labelings(instance.base, budget,
                                lambda x: mrf_energy(instance.base, x) + bottleneck_term(instance, x))
    if isinstance(instance, TomographyInstance):
        def tomo(x):
            report = evaluate(instance, MrfLabeling(x))
            return report.objective if report.feasible else None
        return _brute_labelings(instance.base, budget, tomo)
    if isinstance(instance, MulticutInstance):
        return _brute_multicut(instance, budget)
    if isinstance(instance, AmwcInstance):
        return _brute_amwc(instance, budget)
    if isinstance(instance, GmInstance):
        return _brute_gm(instance, budget)
    if isinstance(instance, MgmInstance):
        return _brute_mgm(instance, budget)
    if isinstance(instance, CellTrackingInstance):
        return _brute_cell_tracking(instance, budget)
    if isinstance(instance, IlpInstance):
        return solve_ilp_exhaustive(instance, budget)
    raise TypeError(f"no brute-force oracle for {type(instance).__name__}")


# ---------------------------------------------------------------------------
# ILP oracle


def _scaled_integers(values) -> list:
    """Exact integers proportional to the given finite doubles."""
    fracs = []
    for v in values:
        if not math.isfinite(v):
            raise ValueError("objective coefficients must be finite")
        fracs.append(Fraction(v))
    shift = max((f.denominator for f in fracs), default=1)
    return [int(f * shift) for f in fracs]


def solve_ilp_exhaustive(ilp: IlpInstance, budget: int = DEFAULT_BUDGET) -> SolveResult:
    """Depth-first search over 0/1 assignments with bound propagation.

    Variables are branched in declaration order trying 0 before 1, so the
    first optimum found is the lexicographically smallest one.  Propagation
    only fixes a variable when the other value is provably infeasible; rows
    with non-integral data use a slack that absorbs rounding, and every leaf
    is re-checked with :func:`evaluate_ilp` before it is accepted.  Objective
    bounds are kept in exact integer arithmetic (every double is an integer
    multiple of a power of two), so a subtree is pruned exactly when it cannot
    strictly beat the incumbent.
    """
    names = list(ilp.variables)
    n = len(names)
    index = {v: i for i, v in enumerate(names)}
    cost = _scaled_integers([ilp.objective.get(v, 0.0) for v in names])
    rows = []  # sum a_i x_i <= b + slack
    for con in ilp.constraints:
        terms = [(index[v], a) for v, a in con.terms.items() if a != 0]
        integral = float(con.rhs).is_integer() and all(float(a).is_integer() for _, a in terms)
        slack = 0.5 if integral else 1e-9 + 1e-12 * (sum(abs(a) for _, a in terms) + abs(con.rhs))
        if con.relation in ("<=", "="):
            rows.append((terms, con.rhs + slack))
        if con.relation in (">=", "="):
            rows.append(([(i, -a) for i, a in terms], -con.rhs + slack))
    var_rows = [[] for _ in range(n)]
    for r, (terms, _) in enumerate(rows):
        for i, a in terms:
            var_rows[i].append((r, a))
    rhs = [b for _, b in rows]
    # minimum activity with every free variable at its cheaper value
    min_act = [sum(a for _, a in terms if a < 0) for terms, _ in rows]
    value = [-1] * n
    trail = []
    state = {"fixed": 0, "free_neg": sum(c for c in cost if c < 0)}

    def assign(i, val):
        value[i] = val
        trail.append(i)
        c = cost[i]
        if c < 0:
            state["free_neg"] -= c
        if val:
            state["fixed"] += c
        touched = []
        for r, a in var_rows[i]:
            if a > 0 and val == 1:
                min_act[r] += a
            elif a < 0 and val == 0:
                min_act[r] -= a
            touched.append(r)
        return touched

    def undo(mark):
        while len(trail) > mark:
            i = trail.pop()
            val = value[i]
            c = cost[i]
            if c < 0:
                state["free_neg"] += c
            if val:
                state["fixed"] -= c
            for r, a in var_rows[i]:
                if a > 0 and val == 1:
                    min_act[r] -= a
                elif a < 0 and val == 0:
                    min_act[r] += a
            value[i] = -1

    def propagate(queue):
        while queue:
            r = queue.pop()
            room = rhs[r] - min_act[r]
            if room < 0:
                return False
            for i, a in rows[r][0]:
                if value[i] != -1:
                    continue
                if a > 0 and a > room:
                    queue.extend(assign(i, 0))
                elif a < 0 and -a > room:
                    queue.extend(assign(i, 1))
        return True

    best = {"obj": math.inf, "x": None, "exact": None}
    nodes = 0

    def search(start):
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded(nodes, budget)
        if best["x"] is not None and state["fixed"] + state["free_neg"] >= best["exact"]:
            return
        i = start
        while i < n and value[i] != -1:
            i += 1
        if i == n:
            x = dict(zip(names, value))
            report = evaluate(ilp, x)
            if report.feasible:
                best["obj"], best["x"], best["exact"] = report.objective, x, state["fixed"]
            return
        for val in (0, 1):
            mark = len(trail)
            if propagate(assign(i, val)):
                search(i + 1)
            undo(mark)

    if propagate(list(range(len(rows)))):
        limit = sys.getrecursionlimit()
        sys.setrecursionlimit(max(limit, 4 * n + 1000))
        try:
            search(0)
        finally:
            sys.setrecursionlimit(limit)
    else:
        nodes = 1
    if best["x"] is None:
        return SolveResult(None, math.inf, True, nodes)
    return SolveResult(best["x"], float(best["obj"]), True, nodes)


# ---------------------------------------------------------------------------
# multicut heuristics


def _adjacency(inst: MulticutInstance):
    """Neighbour dicts with exact integer weights and their common scale."""
    costs = inst.costs.tolist()
    scaled = _scaled_integers(costs)
    scale = max((Fraction(c).denominator for c in costs), default=1)
    adj = [dict() for _ in range(inst.node_count)]
    for i, j, c in zip(inst.sources.tolist(), inst.targets.tolist(), scaled):
        adj[i][j] = adj[i].get(j, 0) + c
        adj[j][i] = adj[j].get(i, 0) + c
    return adj, scale


def _contract(adj, alive, keep, gone):
    """Merge node ``gone`` into ``keep``; returns the neighbours whose weight changed."""
    changed = []
    for nb, w in adj[gone].items():
        del adj[nb][gone]
        if nb == keep:
            continue
        adj[keep][nb] = adj[keep].get(nb, 0) + w
        adj[nb][keep] = adj[keep][nb]
        changed.append(nb)
    adj[gone] = {}
    alive[gone] = False
    return changed


def _result_from_groups(inst, owner, work, trace):
    partition = Partition.from_labels([owner(v) for v in range(inst.node_count)])
    report = evaluate_multicut(inst, cut_from_partition(inst, partition))
    return SolveResult(partition, report.objective, False, work, tuple(trace))


def gaec(inst: MulticutInstance) -> SolveResult:
    """Greedy additive edge contraction.

    Repeatedly contracts the heaviest positive edge of the contracted graph
    (parallel edges summed), ties broken by the smaller (min, max) node pair.
    Weights are summed exactly; ``trace`` holds the exact objective (as
    Fractions) before the first and after every contraction.
    """
    n = inst.node_count
    adj, scale = _adjacency(inst)
    alive = [True] * n
    rep = list(range(n))
    heap = [(-w, i, j) for i in range(n) for j, w in adj[i].items() if i < j and w > 0]
    heapq.heapify(heap)
    objective = sum(w for i in range(n) for j, w in adj[i].items() if i < j)
    trace = [Fraction(objective, scale)]
    work = 0
    while heap:
        negw, i, j = heapq.heappop(heap)
        work += 1
        if not (alive[i] and alive[j]) or adj[i].get(j) != -negw:
            continue
        objective += negw
        trace.append(Fraction(objective, scale))
        keep, gone = (i, j) if i < j else (j, i)
        rep[gone] = keep
        for nb in _contract(adj, alive, keep, gone):
            w = adj[keep][nb]
            if w > 0:
                heapq.heappush(heap, (-w, min(keep, nb), max(keep, nb)))

    def owner(v):
        while rep[v] != v:
            rep[v] = rep[rep[v]]
            v = rep[v]
        return v

    return _result_from_groups(inst, owner, work, trace)


def greedy_edge_fixation(inst: MulticutInstance) -> SolveResult:
    """GAEC variant that also fixes repulsive edges as cut.

    Edges of the contracted graph are taken by decreasing |weight| (ties by the
    smaller node pair).  A positive edge is contracted unless its endpoints are
    forbidden to merge; a negative one marks its endpoints as forbidden.
    Weights and ``trace`` are exact as in :func:`gaec`.
    """
    n = inst.node_count
    adj, scale = _adjacency(inst)
    alive = [True] * n
    rep = list(range(n))
    forbidden = [set() for _ in range(n)]
    heap = [(-abs(w), i, j) for i in range(n) for j, w in adj[i].items() if i < j and w != 0]
    heapq.heapify(heap)
    objective = sum(w for i in range(n) for j, w in adj[i].items() if i < j)
    trace = [Fraction(objective, scale)]
    work = 0
    while heap:
        negabs, i, j = heapq.heappop(heap)
        work += 1
        if not (alive[i] and alive[j]) or j not in adj[i] or abs(adj[i][j]) != -negabs:
            continue
        w = adj[i][j]
        if j in forbidden[i]:
            continue
        if w < 0:
            forbidden[i].add(j)
            forbidden[j].add(i)
            continue
        objective -= w
        trace.append(Fraction(objective, scale))
        keep, gone = (i, j) if i < j else (j, i)
        rep[gone] = keep
        for nb in forbidden[gone]:
            forbidden[nb].discard(gone)
            forbidden[nb].add(keep)
            forbidden[keep].add(nb)
        forbidden[gone] = set()
        for nb in _contract(adj, alive, keep, gone):
            w2 = adj[keep][nb]
            if w2 != 0:
                heapq.heappush(heap, (-abs(w2), min(keep, nb), max(keep, nb)))

    def owner(v):
        while rep[v] != v:
            v = rep[v]
        return v

    return _result_from_groups(inst, owner, work, trace)


# ---------------------------------------------------------------------------
# ICM


def _exact_tables(mrf: MrfInstance):
    """Potentials as nested lists that add up without rounding.

    Finite tables become integers over a common power-of-two scale; with an
    infinite entry present the plain floats are kept.
    """
    flat = [float(c) for u in mrf.unaries for c in np.asarray(u).ravel()]
    flat += [float(c) for t in mrf.pairwise for c in np.asarray(t).ravel()]
    if not all(math.isfinite(c) for c in flat):
        return ([list(map(float, u)) for u in mrf.unaries],
                [np.asarray(t, dtype=float).tolist() for t in mrf.pairwise])
    scaled = iter(_scaled_integers(flat))
    unaries = [[next(scaled) for _ in range(len(u))] for u in mrf.unaries]
    pairwise = []
    for t in mrf.pairwise:
        t = np.asarray(t)
        pairwise.append([[next(scaled) for _ in range(t.shape[1])] for _ in range(t.shape[0])])
    return unaries, pairwise


def icm(mrf: MrfInstance, initial: MrfLabeling, max_sweeps: int | None = None) -> SolveResult:
    """Iterated conditional modes with sweeps in node order.

    Each node takes the smallest label minimizing its local energy, so a move
    either lowers the energy or keeps it and lowers the label; this bounds the
    number of sweeps.  ``trace`` records the energy before the first update
    and after every single-node update.
    """
    x = list(initial.labels if isinstance(initial, MrfLabeling) else initial)
    if len(x) != mrf.node_count:
        from .evaluation import DimensionMismatch
        raise DimensionMismatch(f"initial labeling has {len(x)} entries for {mrf.node_count} nodes")
    incident = [[] for _ in range(mrf.node_count)]
    for e, (u, v) in enumerate(mrf.edges.tolist()):
        incident[u].append((e, v, True))
        incident[v].append((e, u, False))
    unaries, pairwise = _exact_tables(mrf)
    energy = mrf_energy(mrf, x)
    trace = [energy]
    work = 0
    sweeps = 0
    changed = True
    while changed and (max_sweeps is None or sweeps < max_sweeps):
        changed = False
        sweeps += 1
        for v in range(mrf.node_count):
            local = list(unaries[v])
            for e, other, is_row in incident[v]:
                table = pairwise[e]
                column = [row[x[other]] for row in table] if is_row else table[x[other]]
                local = [a + b for a, b in zip(local, column)]
            work += 1
            best = min(range(len(local)), key=local.__getitem__)
            if best != x[v]:
                x[v] = best
                energy = mrf_energy(mrf, x)
                changed = True
            trace.append(energy)
    return SolveResult(MrfLabeling(tuple(x)), mrf_energy(mrf, x), False, work, tuple(trace))


# ---------------------------------------------------------------------------
# greedy graph matching


def greedy_gm(gm: GmInstance) -> SolveResult:
    """Activate the assignment with the most negative marginal cost until none helps."""
    ids = gm.ids.tolist()
    left, right, cost = gm.left.tolist(), gm.right.tolist(), gm.costs.tolist()
    partners = [[] for _ in ids]
    for a, b, d in gm.quadratic:
        pa, pb = gm.position(a), gm.position(b)
        partners[pa].append((pb, d))
        partners[pb].append((pa, d))
    active = [False] * len(ids)
    used_l, used_r = set(), set()
    work = 0
    trace = [0.0]
    objective = 0.0
    while True:
        best, best_delta = None, 0.0
        for p in range(len(ids)):
            if active[p] or left[p] in used_l or right[p] in used_r:
                continue
            work += 1
            delta = cost[p] + sum(d for q, d in partners[p] if active[q])
            if delta < best_delta:
                best, best_delta = p, delta
        if best is None:
            break
        active[best] = True
        used_l.add(left[best])
        used_r.add(right[best])
        objective += best_delta
        trace.append(objective)
    sol = GmSolution(frozenset(i for i, on in zip(ids, active) if on))
    return SolveResult(sol, evaluate_gm(gm, sol).objective, False, work, tuple(trace))


HEURISTICS = {
    "gaec": gaec,
    "gef": greedy_edge_fixation,
    "icm": icm,
    "greedy-gm": greedy_gm,
}

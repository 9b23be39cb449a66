"""Translate problem instances into binary ILPs and move solutions across.

Each ``lower_*`` function returns a :class:`LoweredModel` whose ``var_map``
links ILP variable names to semantic roles such as ``("node", v, label)`` or
``("cut", edge_index)``.  Variables are emitted in a fixed semantic order so
that lowering the same instance twice gives identical LP text.

Costs of ``+inf`` become ``forbid_<var>: var <= 0`` rows instead of objective
coefficients.
"""
from __future__ import annotations

import json
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .model import (
    AmwcInstance,
    AmwcSolution,
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

DEFAULT_CYCLE_LIMIT = 5


class NotPotts(ValueError):
    pass


class GeneralProjection(ValueError):
    pass


class InfeasibleSolution(ValueError):
    pass


class InconsistentIndicators(ValueError):
    pass


class VarMap:
    """Bidirectional map between semantic role tuples and ILP variable names."""

    def __init__(self, pairs=()):
        self._name = {}
        self._role = {}
        for role, name in pairs:
            self.add(role, name)

    def add(self, role, name):
        if role in self._name or name in self._role:
            raise ValueError(f"role {role!r} or name {name!r} already mapped")
        self._name[role] = name
        self._role[name] = role

    def name(self, role) -> str:
        return self._name[role]

    def role(self, name):
        return self._role[name]

    def get(self, role, default=None):
        return self._name.get(role, default)

    def __contains__(self, role):
        return role in self._name

    def __len__(self):
        return len(self._name)

    def items(self):
        """(role, name) pairs in emission order."""
        return self._name.items()

    def __eq__(self, other):
        return isinstance(other, VarMap) and list(self.items()) == list(other.items())

    __hash__ = None


@dataclass(frozen=True)
class LoweredModel:
    ilp: IlpInstance
    var_map: VarMap
    objective_offset: float
    kind: str
    source: object = field(repr=False, compare=False)
    exact: bool = True
    notes: tuple = ()

    def sidecar(self) -> dict:
        def plain(x):
            return [plain(y) for y in x] if isinstance(x, tuple) else x

        return {
            "kind": self.kind,
            "exact": self.exact,
            "objective_offset": self.objective_offset,
            "variables": {name: plain(role) for role, name in self.var_map.items()},
        }

    def sidecar_json(self) -> str:
        return json.dumps(self.sidecar(), indent=1) + "\n"


class _Builder:
    def __init__(self):
        self.variables = []
        self.objective = {}
        self.constraints = []
        self.var_map = VarMap()

    def var(self, role, name, cost=0.0):
        self.var_map.add(role, name)
        self.variables.append(name)
        cost = float(cost)
        if math.isinf(cost):
            if cost < 0:
                raise ValueError(f"cost of {name} is -inf; the problem is unbounded")
            self.row(f"forbid_{name}", {name: 1.0}, "<=", 0.0)
        elif cost != 0.0:
            self.objective[name] = cost
        return name

    def row(self, cid, terms, relation, rhs):
        self.constraints.append((cid, terms, relation, float(rhs)))

    def build(self, kind, source, exact=True, notes=()):
        ilp = IlpInstance(tuple(self.variables), self.objective, tuple(self.constraints))
        return LoweredModel(ilp, self.var_map, 0.0, kind, source, exact, tuple(notes))


# ---------------------------------------------------------------------------
# MRF


def _node_vars(b: _Builder, mrf: MrfInstance):
    for v in range(mrf.node_count):
        for l, cost in enumerate(mrf.unaries[v].tolist()):
            b.var(("node", v, l), f"mu_{v}_{l}", cost)


def _simplex_rows(b: _Builder, mrf: MrfInstance):
    for v in range(mrf.node_count):
        b.row(f"simplex_{v}", {f"mu_{v}_{l}": 1.0 for l in range(mrf.label_counts[v])}, "=", 1)


def _local_polytope(b: _Builder, mrf: MrfInstance):
    _node_vars(b, mrf)
    for e, (u, v) in enumerate(mrf.edges.tolist()):
        table = mrf.pairwise[e]
        for l in range(table.shape[0]):
            for k in range(table.shape[1]):
                b.var(("edge", e, l, k), f"mu_{u}_{v}_{l}_{k}", table[l, k])
    _simplex_rows(b, mrf)
    for e, (u, v) in enumerate(mrf.edges.tolist()):
        lu, lv = mrf.pairwise[e].shape
        for l in range(lu):
            terms = {f"mu_{u}_{v}_{l}_{k}": 1.0 for k in range(lv)}
            terms[f"mu_{u}_{l}"] = -1.0
            b.row(f"marg_{e}_0_{l}", terms, "=", 0)
        for k in range(lv):
            terms = {f"mu_{u}_{v}_{l}_{k}": 1.0 for l in range(lu)}
            terms[f"mu_{v}_{k}"] = -1.0
            b.row(f"marg_{e}_1_{k}", terms, "=", 0)


def lower_mrf_local_polytope(mrf: MrfInstance) -> LoweredModel:
    """Node indicators, edge marginals, simplex and marginalization equalities."""
    b = _Builder()
    _local_polytope(b, mrf)
    return b.build("mrf", mrf)


def potts_weight(table: np.ndarray) -> float:
    """Return λ if ``table == λ·[l != l']`` with λ >= 0, else raise NotPotts."""
    lu, lv = table.shape
    off = ~np.eye(lu, lv, dtype=bool)
    lam = float(table[off][0]) if off.any() else 0.0
    if not (np.all(np.diag(table) == 0) and np.all(table[off] == lam)) or not lam >= 0 \
            or math.isinf(lam):
        raise NotPotts(f"table {table.tolist()} is not of the form λ·[l != l'] with λ >= 0")
    return lam


def lower_mrf_potts_compact(mrf: MrfInstance) -> LoweredModel:
    """Node indicators plus one disagreement binary per edge and label.

    Edges with λ = 0 contribute nothing and get no variables.
    """
    weights = [potts_weight(t) for t in mrf.pairwise]
    b = _Builder()
    _node_vars(b, mrf)
    for e, (u, v) in enumerate(mrf.edges.tolist()):
        if weights[e] == 0:
            continue
        for l in range(max(mrf.label_counts[u], mrf.label_counts[v])):
            b.var(("disagree", e, l), f"d_{u}_{v}_{l}", weights[e] / 2)
    _simplex_rows(b, mrf)
    for e, (u, v) in enumerate(mrf.edges.tolist()):
        if weights[e] == 0:
            continue
        for l in range(max(mrf.label_counts[u], mrf.label_counts[v])):
            d = f"d_{u}_{v}_{l}"
            mu_u = f"mu_{u}_{l}" if l < mrf.label_counts[u] else None
            mu_v = f"mu_{v}_{l}" if l < mrf.label_counts[v] else None
            for side, (plus, minus) in enumerate(((mu_u, mu_v), (mu_v, mu_u))):
                if plus is None:
                    continue
                terms = {d: 1.0, plus: -1.0}
                if minus is not None:
                    terms[minus] = 1.0
                b.row(f"potts_{e}_{l}_{side}", terms, ">=", 0)
    return b.build("potts", mrf)


# ---------------------------------------------------------------------------
# Multicut and AMWC


def chordless_cycles(node_count: int, edges, limit: int):
    """Chordless cycles with at most ``limit`` vertices, each once.

    Returns ``(cycles, complete)``; ``complete`` is False when some path had
    to be abandoned because of the limit, so longer chordless cycles may exist.
    Each cycle is a vertex tuple starting at its smallest vertex with the
    second vertex smaller than the last.
    """
    adj = [set() for _ in range(node_count)]
    for i, j in edges:
        adj[i].add(j)
        adj[j].add(i)
    cycles = []
    complete = True

    def extend(path, blocked):
        nonlocal complete
        s, last = path[0], path[-1]
        for w in sorted(adj[last]):
            if w <= s or w in path or w in blocked:
                continue
            if s in adj[w]:
                if len(path) >= 2 and path[1] < w:
                    if len(path) + 1 <= limit:
                        cycles.append(tuple(path) + (w,))
                    else:
                        complete = False
                continue
            if len(path) + 1 >= limit:
                if limit < node_count:
                    complete = False
                continue
            # w may not touch any path vertex except the last one (and s when closing)
            extend(path + [w], blocked | adj[last])

    for s in range(node_count):
        for v1 in sorted(adj[s]):
            if v1 > s:
                extend([s, v1], frozenset())
    return cycles, complete


def _cycle_rows(b: _Builder, cycles, edge_name):
    for cyc in cycles:
        names = [edge_name[frozenset((cyc[k], cyc[(k + 1) % len(cyc)]))]
                 for k in range(len(cyc))]
        tag = "_".join(map(str, cyc))
        for pos, name in enumerate(names):
            terms = {name: 1.0}
            terms.update((other, -1.0) for other in names if other != name)
            b.row(f"cycle_{tag}_{pos}", terms, "<=", 0)


def _cut_vars(b, sources, targets, costs):
    edge_name = {}
    for e, (i, j, c) in enumerate(zip(sources.tolist(), targets.tolist(), costs.tolist())):
        edge_name[frozenset((i, j))] = b.var(("cut", e), f"y_{i}_{j}", c)
    return edge_name


def lower_multicut(inst: MulticutInstance, cycle_len_limit: int = DEFAULT_CYCLE_LIMIT) -> LoweredModel:
    """Edge cut binaries with chordless-cycle inequalities up to the given length.

    The model is exact when no chordless cycle was skipped; otherwise it is a
    relaxation whose optimum lower-bounds the multicut optimum.
    """
    if cycle_len_limit < 3:
        raise ValueError("cycle_len_limit must be at least 3")
    b = _Builder()
    edge_name = _cut_vars(b, inst.sources, inst.targets, inst.costs)
    cycles, complete = chordless_cycles(inst.node_count, zip(inst.sources.tolist(),
                                                             inst.targets.tolist()),
                                        cycle_len_limit)
    _cycle_rows(b, cycles, edge_name)
    notes = () if complete else (f"chordless cycles longer than {cycle_len_limit} omitted",)
    return b.build("multicut", inst, complete, notes)


def lower_amwc(inst: AmwcInstance, cycle_len_limit: int = DEFAULT_CYCLE_LIMIT) -> LoweredModel:
    if cycle_len_limit < 3:
        raise ValueError("cycle_len_limit must be at least 3")
    b = _Builder()
    n, k_count = inst.node_count, inst.class_count
    for i in range(n):
        for k in range(k_count):
            b.var(("label", i, k), f"x_{i}_{k}", inst.node_costs[i, k])
    edge_name = _cut_vars(b, inst.sources, inst.targets, inst.costs)
    for i in range(n):
        b.row(f"simplex_{i}", {f"x_{i}_{k}": 1.0 for k in range(k_count)}, "=", 1)
    for e, (i, j) in enumerate(zip(inst.sources.tolist(), inst.targets.tolist())):
        y = f"y_{i}_{j}"
        for k in range(k_count):
            b.row(f"link_{e}_{k}_0", {f"x_{i}_{k}": 1.0, f"x_{j}_{k}": -1.0, y: -1.0}, "<=", 0)
            b.row(f"link_{e}_{k}_1", {f"x_{j}_{k}": 1.0, f"x_{i}_{k}": -1.0, y: -1.0}, "<=", 0)
            if k not in inst.partitionable:
                b.row(f"nonpart_{e}_{k}", {y: 1.0, f"x_{i}_{k}": 1.0, f"x_{j}_{k}": 1.0}, "<=", 2)
    cycles, complete = chordless_cycles(n, zip(inst.sources.tolist(), inst.targets.tolist()),
                                        cycle_len_limit)
    _cycle_rows(b, cycles, edge_name)
    notes = () if complete else (f"chordless cycles longer than {cycle_len_limit} omitted",)
    return b.build("amwc", inst, complete, notes)


# ---------------------------------------------------------------------------
# Graph matching


def _gm_rows(b: _Builder, gm: GmInstance, prefix: str, role_prefix: tuple):
    """Variables and rows of one matching problem; returns id -> variable name."""
    names = {}
    for aid, i, j, c in gm.assignments:
        names[aid] = b.var(role_prefix + ("assign", aid), f"x_{prefix}{aid}", c)
    for q, (a, a2, d) in enumerate(gm.quadratic):
        b.var(role_prefix + ("product", q), f"z_{prefix}{q}", d)
    by_left, by_right = defaultdict(list), defaultdict(list)
    for aid, i, j, _ in gm.assignments:
        by_left[i].append(names[aid])
        by_right[j].append(names[aid])
    for i in sorted(by_left):
        if len(by_left[i]) > 1:
            b.row(f"row_{prefix}{i}", {x: 1.0 for x in by_left[i]}, "<=", 1)
    for j in sorted(by_right):
        if len(by_right[j]) > 1:
            b.row(f"col_{prefix}{j}", {x: 1.0 for x in by_right[j]}, "<=", 1)
    for q, (a, a2, _) in enumerate(gm.quadratic):
        z, xa, xb = f"z_{prefix}{q}", names[a], names[a2]
        b.row(f"prod_{prefix}{q}_a", {z: 1.0, xa: -1.0}, "<=", 0)
        b.row(f"prod_{prefix}{q}_b", {z: 1.0, xb: -1.0}, "<=", 0)
        b.row(f"prod_{prefix}{q}_c", {xa: 1.0, xb: 1.0, z: -1.0}, "<=", 1)
    return names


def lower_gm(gm: GmInstance) -> LoweredModel:
    """Assignment binaries, row/column uniqueness and linearized quadratic products."""
    b = _Builder()
    _gm_rows(b, gm, "", ())
    return b.build("gm", gm)


def _pair_index(gm: GmInstance | None):
    out = {}
    if gm is not None:
        for aid, i, j, _ in gm.assignments:
            out[(i, j)] = aid
    return out


def transitivity_triples(inst: MgmInstance):
    """Yield every chain constrained by cycle consistency.

    A chain is ``((g0, i0), (g1, i1), (g2, i2))``: the links g0:i0-g1:i1 and
    g1:i1-g2:i2 together demand the link g0:i0-g2:i2.  For each graph triple
    p<k<l every choice of the demanded pair is covered, and only chains whose
    two given links are listed assignments are produced.
    """
    pairs = inst.pairs
    k_count = inst.graph_count
    links = {key: _pair_index(gm) for key, gm in pairs.items()}

    def neighbours(g, h):
        """Map point of g -> list of points of h with a listed assignment."""
        out = defaultdict(list)
        key = (min(g, h), max(g, h))
        for (i, j) in links.get(key, {}):
            a, c = (i, j) if g < h else (j, i)
            out[a].append(c)
        return out

    for p in range(k_count):
        for k in range(p + 1, k_count):
            for l in range(k + 1, k_count):
                # the demanded link is first-last; the middle graph is the one shared
                for g0, g1, g2 in ((p, k, l), (p, l, k), (k, p, l)):
                    n01 = neighbours(g0, g1)
                    n12 = neighbours(g1, g2)
                    for i0 in sorted(n01):
                        for i1 in sorted(n01[i0]):
                            for i2 in sorted(n12.get(i1, ())):
                                yield ((g0, i0), (g1, i1), (g2, i2))


def _link_var(names, g, i, h, j):
    """Variable name of the link g:i-h:j, or None if that assignment is not listed."""
    if g < h:
        return names.get((g, h), {}).get((i, j))
    return names.get((h, g), {}).get((j, i))


def lower_mgm(inst: MgmInstance) -> LoweredModel:
    """Union of the pairwise matching models plus cycle-consistency rows."""
    b = _Builder()
    names = {}
    for (p, k) in sorted(inst.pairs):
        gm = inst.pairs[(p, k)]
        by_id = _gm_rows(b, gm, f"{p}_{k}_", ((p, k),))
        names[(p, k)] = {(i, j): by_id[aid] for aid, i, j, _ in gm.assignments}
    for (g0, i0), (g1, i1), (g2, i2) in transitivity_triples(inst):
        a = _link_var(names, g0, i0, g1, i1)
        c = _link_var(names, g1, i1, g2, i2)
        target = _link_var(names, g0, i0, g2, i2)
        terms = {a: 1.0, c: 1.0}
        if target is not None:
            terms[target] = -1.0
        b.row(f"trans_{g0}_{i0}_{g1}_{i1}_{g2}_{i2}", terms, "<=", 1)
    return b.build("mgm", inst)


# ---------------------------------------------------------------------------
# Cell tracking


def lower_cell_tracking(inst: CellTrackingInstance) -> LoweredModel:
    """Detection, appearance, disappearance, move and division binaries.

    Flow rows: ``in_<d>`` says moves in + divisions in + appearance = detection,
    ``out_<d>`` says moves out + divisions out + disappearance = detection.
    A first-frame detection without an appearance record gets no ``in`` row
    and a last-frame detection without a disappearance record no ``out`` row.
    """
    b = _Builder()
    for d in inst.detections:
        b.var(("det", d.id), f"det_{d.id}", d.cost)
    for i, c in inst.appearances.items():
        b.var(("app", i), f"app_{i}", c)
    for i, c in inst.disappearances.items():
        b.var(("disapp", i), f"disapp_{i}", c)
    for m in inst.moves:
        b.var(("move", m.id), f"move_{m.id}", m.cost)
    for dv in inst.divisions:
        b.var(("div", dv.id), f"div_{dv.id}", dv.cost)
    incoming, outgoing = defaultdict(list), defaultdict(list)
    for m in inst.moves:
        outgoing[m.source].append(f"move_{m.id}")
        incoming[m.target].append(f"move_{m.id}")
    for dv in inst.divisions:
        outgoing[dv.parent].append(f"div_{dv.id}")
        incoming[dv.child1].append(f"div_{dv.id}")
        incoming[dv.child2].append(f"div_{dv.id}")
    for d in inst.detections:
        if inst.has_incoming_constraint(d.id):
            terms = {x: 1.0 for x in incoming[d.id]}
            if d.id in inst.appearances:
                terms[f"app_{d.id}"] = 1.0
            terms[f"det_{d.id}"] = -1.0
            b.row(f"in_{d.id}", terms, "=", 0)
        if inst.has_outgoing_constraint(d.id):
            terms = {x: 1.0 for x in outgoing[d.id]}
            if d.id in inst.disappearances:
                terms[f"disapp_{d.id}"] = 1.0
            terms[f"det_{d.id}"] = -1.0
            b.row(f"out_{d.id}", terms, "=", 0)
    for n, s in enumerate(inst.exclusions):
        b.row(f"excl_{n}", {f"det_{i}": 1.0 for i in s}, "<=", 1)
    return b.build("celltracking", inst)


# ---------------------------------------------------------------------------
# Tomography


def lower_tomography(inst: TomographyInstance) -> LoweredModel:
    """Local polytope of the base MRF plus one sum equality per projection."""
    targets = []
    for n, proj in enumerate(inst.projections):
        p = proj.target()
        if p is None:
            raise GeneralProjection(
                f"projection {n} is not a hard equality (needs a single finite entry, equal to 0)")
        targets.append(p)
    b = _Builder()
    _local_polytope(b, inst.base)
    k = inst.label_count
    for n, (proj, p) in enumerate(zip(inst.projections, targets)):
        terms = {f"mu_{v}_{l}": float(l) for v in proj.nodes for l in range(1, k)}
        if not terms:
            continue  # single-label nodes: the sum is always 0 == p
        b.row(f"proj_{n}", terms, "=", p)
    return b.build("tomography", inst)


# ---------------------------------------------------------------------------
# Solution transfer


def _evaluate(model: LoweredModel, solution):
    from .evaluation import evaluate
    return evaluate(model.source, solution)


def encode_solution(model: LoweredModel, solution) -> dict:
    """Binary assignment (variable name -> 0/1) of a feasible native solution."""
    kind, inst = model.kind, model.source
    if kind == "multicut" and isinstance(solution, Partition):
        from .evaluation import cut_from_partition
        solution = cut_from_partition(inst, solution)
    report = _evaluate(model, solution)
    if not report.feasible:
        raise InfeasibleSolution(f"native solution is infeasible: {report.violations[0][2]}")
    on = set()
    if kind in ("mrf", "potts", "tomography"):
        mrf = inst.base if kind == "tomography" else inst
        x = solution.labels
        on.update(("node", v, l) for v, l in enumerate(x))
        if kind == "potts":
            for e, (u, v) in enumerate(mrf.edges.tolist()):
                if x[u] != x[v]:
                    on.update(("disagree", e, l) for l in (x[u], x[v]))
        else:
            on.update(("edge", e, x[u], x[v]) for e, (u, v) in enumerate(mrf.edges.tolist()))
    elif kind == "multicut":
        on.update(("cut", e) for e, y in enumerate(solution.cut) if y)
    elif kind == "amwc":
        on.update(("label", i, k) for i, k in enumerate(solution.labels))
        on.update(("cut", e) for e, y in enumerate(solution.cut.cut) if y)
    elif kind == "gm":
        on.update(_gm_on(inst, solution, ()))
    elif kind == "mgm":
        for key, gm in inst.pairs.items():
            on.update(_gm_on(gm, solution.get(key, GmSolution(frozenset())), (key,)))
    elif kind == "celltracking":
        for tag, ids in (("det", solution.detections), ("app", solution.appearances),
                         ("disapp", solution.disappearances), ("move", solution.moves),
                         ("div", solution.divisions)):
            on.update((tag, i) for i in ids)
    else:
        raise ValueError(f"unknown model kind {kind!r}")
    return {name: int(role in on) for role, name in model.var_map.items()}


def _gm_on(gm: GmInstance, sol: GmSolution, prefix):
    out = [prefix + ("assign", a) for a in sorted(sol.active)]
    for q, (a, a2, _) in enumerate(gm.quadratic):
        if a in sol.active and a2 in sol.active:
            out.append(prefix + ("product", q))
    return out


def _as_assignment(model: LoweredModel, assignment) -> dict:
    if not isinstance(assignment, Mapping):
        assignment = dict(zip(model.ilp.variables, assignment))
    out = {}
    for name in model.ilp.variables:
        if name not in assignment:
            raise InconsistentIndicators(f"assignment lacks variable {name!r}")
        value = assignment[name]
        if value not in (0, 1):
            raise InconsistentIndicators(f"variable {name!r} has non-integral value {value!r}")
        out[name] = int(value)
    return out


def _one_hot(values, what):
    hot = [l for l, x in enumerate(values) if x]
    if len(hot) != 1:
        raise InconsistentIndicators(f"{what} has {len(hot)} active labels, expected 1")
    return hot[0]


def decode_cut(model: LoweredModel, assignment):
    """Partition from components of uncut edges and whether y equals its cut."""
    if model.kind != "multicut":
        raise ValueError("decode_cut applies to multicut models")
    values = _as_assignment(model, assignment)
    inst = model.source
    y = [values[model.var_map.name(("cut", e))] for e in range(inst.edge_count)]
    partition = _components(inst.node_count, inst.sources, inst.targets, y)
    from .evaluation import cut_from_partition
    return partition, tuple(cut_from_partition(inst, partition).cut) == tuple(y)


def _components(n, sources, targets, y):
    keep = np.array([not c for c in y], dtype=bool)
    if n == 0:
        return Partition(())
    g = coo_matrix((np.ones(int(keep.sum())), (sources[keep], targets[keep])), shape=(n, n))
    _, labels = connected_components(g, directed=False)
    return Partition.from_labels(labels.tolist())


def decode_solution(model: LoweredModel, assignment):
    """Native solution from an integral ILP assignment.

    Raises InconsistentIndicators when the pattern does not describe a native
    solution (for example a node with no active label, or a cut vector that is
    not the cut of its own components).
    """
    values = _as_assignment(model, assignment)
    kind, inst = model.kind, model.source
    vm = model.var_map

    def val(role):
        return values[vm.name(role)]

    if kind in ("mrf", "potts", "tomography"):
        mrf = inst.base if kind == "tomography" else inst
        labels = tuple(_one_hot([val(("node", v, l)) for l in range(mrf.label_counts[v])],
                                f"node {v}") for v in range(mrf.node_count))
        if kind != "potts":
            for e, (u, v) in enumerate(mrf.edges.tolist()):
                lu, lv = mrf.pairwise[e].shape
                for l in range(lu):
                    for k in range(lv):
                        if val(("edge", e, l, k)) != int(labels[u] == l and labels[v] == k):
                            raise InconsistentIndicators(
                                f"edge {e} marginal ({l},{k}) disagrees with the node labels")
        return MrfLabeling(labels)
    if kind == "multicut":
        partition, consistent = decode_cut(model, values)
        if not consistent:
            raise InconsistentIndicators("cut vector is not the cut of its uncut components")
        return partition
    if kind == "amwc":
        labels = tuple(_one_hot([val(("label", i, k)) for k in range(inst.class_count)],
                                f"node {i}") for i in range(inst.node_count))
        cut = tuple(val(("cut", e)) for e in range(inst.edge_count))
        return AmwcSolution(labels, EdgeCutVector(cut))
    if kind == "gm":
        return _decode_gm(inst, val, ())
    if kind == "mgm":
        return {key: _decode_gm(gm, val, (key,)) for key, gm in sorted(inst.pairs.items())}
    if kind == "celltracking":
        groups = {}
        for role, name in vm.items():
            if values[name]:
                groups.setdefault(role[0], set()).add(role[1])
        return CellTrackingSolution(groups.get("det", ()), groups.get("app", ()),
                                    groups.get("disapp", ()), groups.get("move", ()),
                                    groups.get("div", ()))
    raise ValueError(f"unknown model kind {kind!r}")


def _decode_gm(gm, val, prefix):
    active = frozenset(aid for aid in gm.ids.tolist() if val(prefix + ("assign", aid)))
    for q, (a, a2, _) in enumerate(gm.quadratic):
        if val(prefix + ("product", q)) != int(a in active and a2 in active):
            raise InconsistentIndicators(f"product variable {q} is not the product of its factors")
    return GmSolution(active)


def lower(instance, cycle_len_limit: int = DEFAULT_CYCLE_LIMIT, potts: bool = False) -> LoweredModel:
    """Lower any supported instance with its default encoding."""
    if isinstance(instance, MrfInstance):
        return lower_mrf_potts_compact(instance) if potts else lower_mrf_local_polytope(instance)
    if isinstance(instance, TomographyInstance):
        return lower_tomography(instance)
    if isinstance(instance, MulticutInstance):
        return lower_multicut(instance, cycle_len_limit)
    if isinstance(instance, AmwcInstance):
        return lower_amwc(instance, cycle_len_limit)
    if isinstance(instance, GmInstance):
        return lower_gm(instance)
    if isinstance(instance, MgmInstance):
        return lower_mgm(instance)
    if isinstance(instance, CellTrackingInstance):
        return lower_cell_tracking(instance)
    if isinstance(instance, IlpInstance):
        vm = VarMap((("var", v), v) for v in instance.variables)
        return LoweredModel(instance, vm, 0.0, "lp", instance)
    raise TypeError(f"no ILP lowering for {type(instance).__name__}")

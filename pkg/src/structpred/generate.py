"""Random instances of every problem class, for tests and demos.

All generators take a ``numpy.random.Generator``.  With ``values="mixed"``
costs mix small integers, short decimals and arbitrary doubles so that
writers are exercised on every float shape; ``values="int"`` keeps them
integral, which is convenient when comparing optima exactly.
"""
from __future__ import annotations

import itertools

import numpy as np

from .model import (
    AmwcInstance,
    BottleneckMrfInstance,
    CellTrackingInstance,
    GmInstance,
    IlpInstance,
    MgmInstance,
    MrfInstance,
    MulticutInstance,
    Projection,
    TomographyInstance,
)


def random_costs(rng: np.random.Generator, size, values: str = "mixed") -> np.ndarray:
    if values == "int":
        return rng.integers(-5, 6, size=size).astype(float)
    kind = rng.integers(0, 4, size=size)
    ints = rng.integers(-9, 10, size=size).astype(float)
    decimals = np.round(rng.uniform(-10, 10, size=size), 2)
    doubles = rng.normal(0, 3, size=size)
    wide = rng.normal(0, 1, size=size) * 10.0 ** rng.integers(-20, 20, size=size)
    return np.choose(kind, [ints, decimals, doubles, wide])


def _random_edges(rng, n, p):
    return [(u, v) for u, v in itertools.combinations(range(n), 2) if rng.random() < p]


def random_mrf(rng, n_nodes=4, max_labels=3, edge_prob=0.5, values="mixed",
               potts=False) -> MrfInstance:
    counts = rng.integers(1, max_labels + 1, size=n_nodes)
    unaries = [random_costs(rng, int(c), values) for c in counts]
    edges = _random_edges(rng, n_nodes, edge_prob)
    pairwise = []
    for u, v in edges:
        shape = (int(counts[u]), int(counts[v]))
        if potts:
            lam = abs(float(random_costs(rng, 1, values)[0]))
            pairwise.append(lam * (1 - np.eye(*shape)))
        else:
            pairwise.append(random_costs(rng, shape, values))
    return MrfInstance(counts, unaries, np.array(edges, dtype=np.int64).reshape(-1, 2), pairwise)


def random_bottleneck(rng, n_nodes=3, max_labels=3, edge_prob=0.5, values="mixed"):
    base = random_mrf(rng, n_nodes, max_labels, edge_prob, values)
    psi = MrfInstance(base.label_counts,
                      [random_costs(rng, t.shape, values) for t in base.unaries],
                      base.edges,
                      [random_costs(rng, t.shape, values) for t in base.pairwise])
    return BottleneckMrfInstance(base, psi)


def random_tomography(rng, n_nodes=4, labels=3, n_projections=2, edge_prob=0.4,
                      values="mixed", hard=True) -> TomographyInstance:
    """Projections are consistent with a hidden labeling, so hard instances are feasible."""
    base = random_mrf(rng, n_nodes, labels, edge_prob, values)
    counts = np.full(n_nodes, labels)
    base = MrfInstance(counts, [random_costs(rng, labels, values) for _ in range(n_nodes)],
                       base.edges, [random_costs(rng, (labels, labels), values)
                                    for _ in range(base.edge_count)])
    hidden = rng.integers(0, labels, size=n_nodes)
    projections = []
    for _ in range(n_projections):
        size = int(rng.integers(1, n_nodes + 1))
        nodes = tuple(int(v) for v in rng.choice(n_nodes, size=size, replace=False))
        length = (labels - 1) * size + 1
        if hard:
            costs = np.full(length, np.inf)
            costs[int(hidden[list(nodes)].sum())] = 0.0
        else:
            costs = random_costs(rng, length, values)
            costs[rng.random(length) < 0.3] = np.inf
            costs[int(hidden[list(nodes)].sum())] = 0.0
        projections.append(Projection(nodes, costs))
    return TomographyInstance(base, tuple(projections))


def random_multicut(rng, n_nodes=5, edge_prob=0.5, values="mixed") -> MulticutInstance:
    """The last node always has an edge so the node count survives a file round trip."""
    edges = _random_edges(rng, n_nodes, edge_prob)
    if n_nodes >= 2 and not any(n_nodes - 1 in e for e in edges):
        edges.append((int(rng.integers(0, n_nodes - 1)), n_nodes - 1))
    costs = random_costs(rng, len(edges), values)
    flipped = [(v, u) if rng.random() < 0.3 else (u, v) for u, v in edges]
    return MulticutInstance.from_edges([(u, v, c) for (u, v), c in zip(flipped, costs)],
                                       node_count=n_nodes if edges else 0)


def random_amwc(rng, n_nodes=4, classes=3, edge_prob=0.5, values="mixed") -> AmwcInstance:
    mc = random_multicut(rng, n_nodes, edge_prob, values)
    n = mc.node_count
    part = frozenset(int(k) for k in range(classes) if rng.random() < 0.5)
    return AmwcInstance(random_costs(rng, (n, classes), values).reshape(n, classes), part,
                        mc.sources, mc.targets, mc.costs)


def random_gm(rng, left=3, right=3, density=0.7, quad_prob=0.3, values="mixed",
              first_id=None) -> GmInstance:
    pairs = [(i, j) for i in range(left) for j in range(right) if rng.random() < density]
    start = int(rng.integers(0, 3)) if first_id is None else first_id
    ids = list(np.cumsum([start] + [int(rng.integers(1, 3)) for _ in pairs[1:]])) if pairs else []
    costs = random_costs(rng, len(pairs), values)
    assignments = [(int(a), i, j, c) for a, (i, j), c in zip(ids, pairs, costs)]
    quadratic = []
    for x, y in itertools.combinations(range(len(pairs)), 2):
        if rng.random() < quad_prob:
            a, b = (ids[x], ids[y]) if rng.random() < 0.5 else (ids[y], ids[x])
            quadratic.append((int(a), int(b), float(random_costs(rng, 1, values)[0])))
    return GmInstance.from_lists(left, right, assignments, quadratic)


def random_mgm(rng, graphs=3, max_size=2, density=0.8, quad_prob=0.2, values="mixed"):
    sizes = tuple(int(s) for s in rng.integers(1, max_size + 1, size=graphs))
    pairs = {}
    for p, k in itertools.combinations(range(graphs), 2):
        pairs[(p, k)] = random_gm(rng, sizes[p], sizes[k], density, quad_prob, values)
    return MgmInstance(sizes, pairs)


def random_cell_tracking(rng, frames=3, per_frame=2, move_prob=0.6, div_prob=0.3,
                         values="mixed", app_prob=0.8, excl_prob=0.3) -> CellTrackingInstance:
    detections, apps, disapps, moves, divisions, exclusions = [], {}, {}, [], [], []
    by_frame = []
    next_id = int(rng.integers(0, 5))
    for t in range(frames):
        ids = []
        for _ in range(int(rng.integers(1, per_frame + 1))):
            ids.append(next_id)
            detections.append((t, next_id, float(random_costs(rng, 1, values)[0])))
            if rng.random() < app_prob:
                apps[next_id] = float(random_costs(rng, 1, values)[0])
            if rng.random() < app_prob:
                disapps[next_id] = float(random_costs(rng, 1, values)[0])
            next_id += int(rng.integers(1, 3))
        by_frame.append(ids)
        if len(ids) >= 2 and rng.random() < excl_prob:
            exclusions.append(tuple(ids[:2]))
    move_id, div_id = 100, 200
    for t in range(frames - 1):
        for i in by_frame[t]:
            for j in by_frame[t + 1]:
                if rng.random() < move_prob:
                    moves.append((move_id, i, j, float(random_costs(rng, 1, values)[0])))
                    move_id += 1
            for j, k in itertools.combinations(by_frame[t + 1], 2):
                if rng.random() < div_prob:
                    divisions.append((div_id, i, j, k, float(random_costs(rng, 1, values)[0])))
                    div_id += 1
    return CellTrackingInstance(tuple(detections), apps, disapps, tuple(moves), tuple(divisions),
                                tuple(exclusions))


_NAME_PARTS = ("x", "y", "mu", "flow", "Var", "b.c", "s#1", "q_")


def random_ilp(rng, n_vars=6, n_constraints=4, density=0.5, values="mixed") -> IlpInstance:
    names = []
    while len(names) < n_vars:
        name = f"{_NAME_PARTS[int(rng.integers(len(_NAME_PARTS)))]}{int(rng.integers(0, 50))}"
        if name not in names:
            names.append(name)
    objective = {v: float(c) for v, c in zip(names, random_costs(rng, n_vars, values))
                 if rng.random() < 0.8}
    constraints = []
    for r in range(n_constraints):
        chosen = [v for v in names if rng.random() < density] or [names[int(rng.integers(n_vars))]]
        coefs = random_costs(rng, len(chosen), values)
        rel = ("<=", ">=", "=")[int(rng.integers(3))]
        rhs = float(random_costs(rng, 1, values)[0])
        cid = f"c{r}" if rng.random() < 0.7 else f"row_{r}_{int(rng.integers(9))}"
        constraints.append((cid, dict(zip(chosen, coefs.tolist())), rel, rhs))
    return IlpInstance(tuple(names), objective, tuple(constraints))

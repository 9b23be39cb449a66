"""Immutable problem instances and solutions for every supported problem class.

All indices (nodes, labels, classes, point-set members) are 0-based.  Costs are
float64 and may be infinite where a format allows it.  Bulk tables are stored as
read-only numpy arrays so that instances can be shared between workers.
"""
from __future__ import annotations

import math
import types
from dataclasses import dataclass, field, fields
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np


class InvalidInstance(ValueError):
    """Raised when an instance or solution violates a structural invariant.

    ``element`` optionally names the offending item, e.g. ``("edge", 3)``.
    """

    def __init__(self, message, element=None):
        super().__init__(message)
        self.element = element


def _frozen_array(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.flags.writeable = False
    return arr


def _same(a, b) -> bool:
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        a, b = np.asarray(a), np.asarray(b)
        return a.shape == b.shape and a.dtype == b.dtype and a.tobytes() == b.tobytes()
    if isinstance(a, (tuple, list)) and isinstance(b, (tuple, list)):
        return len(a) == len(b) and all(_same(x, y) for x, y in zip(a, b))
    if isinstance(a, float) and isinstance(b, float):
        return a == b and math.copysign(1.0, a) == math.copysign(1.0, b) or (a != a and b != b)
    return a == b


class _ArrayEq:
    """Field-wise equality that treats numpy arrays bit-exactly."""

    def __eq__(self, other):
        if type(self) is not type(other):
            return NotImplemented
        return all(_same(getattr(self, f.name), getattr(other, f.name)) for f in fields(self))

    __hash__ = None


def _set(obj, name, value):
    object.__setattr__(obj, name, value)


# ---------------------------------------------------------------------------
# Markov random fields


@dataclass(frozen=True, eq=False)
class MrfInstance(_ArrayEq):
    """Pairwise MRF in energy form.

    ``pairwise[e]`` has shape ``(label_counts[u], label_counts[v])`` for
    ``edges[e] == (u, v)`` with ``u < v``; rows belong to the lower endpoint.
    """

    label_counts: np.ndarray
    unaries: tuple
    edges: np.ndarray
    pairwise: tuple

    def __post_init__(self):
        counts = _frozen_array(self.label_counts, np.int64).reshape(-1)
        if np.any(counts < 1):
            v = int(np.argmax(counts < 1))
            raise InvalidInstance(f"node {v} has label count {counts[v]} < 1")
        n = len(counts)
        if len(self.unaries) != n:
            raise InvalidInstance(f"expected {n} unary tables, got {len(self.unaries)}")
        unaries = []
        for v, table in enumerate(self.unaries):
            t = _frozen_array(table, np.float64).reshape(-1)
            if t.shape[0] != counts[v]:
                raise InvalidInstance(
                    f"unary table of node {v} has {t.shape[0]} entries, expected {counts[v]}")
            unaries.append(t)
        edges = _frozen_array(self.edges, np.int64).reshape(-1, 2)
        if len(self.pairwise) != len(edges):
            raise InvalidInstance(
                f"expected {len(edges)} pairwise tables, got {len(self.pairwise)}")
        seen = set()
        pairwise = []
        for e, ((u, v), table) in enumerate(zip(edges.tolist(), self.pairwise)):
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidInstance(f"edge {e} ({u},{v}) has an endpoint out of range")
            if u == v:
                raise InvalidInstance(f"edge {e} is a self-loop on node {u}")
            if u > v:
                raise InvalidInstance(f"edge {e} ({u},{v}) must list the lower endpoint first")
            if (u, v) in seen:
                raise InvalidInstance(f"edge {e} ({u},{v}) is a duplicate")
            seen.add((u, v))
            t = _frozen_array(table, np.float64)
            if t.size != counts[u] * counts[v]:
                raise InvalidInstance(
                    f"pairwise table of edge {e} ({u},{v}) has {t.size} entries, "
                    f"expected {counts[u] * counts[v]}")
            t = t.reshape(int(counts[u]), int(counts[v]))
            t.flags.writeable = False
            pairwise.append(t)
        _set(self, "label_counts", counts)
        _set(self, "unaries", tuple(unaries))
        _set(self, "edges", edges)
        _set(self, "pairwise", tuple(pairwise))

    @property
    def node_count(self) -> int:
        return len(self.label_counts)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def same_structure(self, other: "MrfInstance") -> bool:
        return (np.array_equal(self.label_counts, other.label_counts)
                and np.array_equal(self.edges, other.edges))


@dataclass(frozen=True)
class MrfLabeling:
    labels: tuple

    def __post_init__(self):
        labels = tuple(int(x) for x in self.labels)
        if any(x < 0 for x in labels):
            raise InvalidInstance("labels must be nonnegative")
        _set(self, "labels", labels)

    def __len__(self):
        return len(self.labels)


@dataclass(frozen=True, eq=False)
class BottleneckMrfInstance(_ArrayEq):
    base: MrfInstance
    bottleneck: MrfInstance

    def __post_init__(self):
        if not self.base.same_structure(self.bottleneck):
            raise InvalidInstance("bottleneck potentials must have the same nodes, labels and edges")

    @property
    def bottleneck_unaries(self):
        return self.bottleneck.unaries

    @property
    def bottleneck_pairwise(self):
        return self.bottleneck.pairwise


@dataclass(frozen=True, eq=False)
class Projection(_ArrayEq):
    """Soft or hard constraint on the sum of labels over ``nodes``.

    ``costs[s]`` is the cost of the labels summing to ``s``; ``inf`` forbids it.
    """

    nodes: tuple
    costs: np.ndarray

    def __post_init__(self):
        _set(self, "nodes", tuple(int(v) for v in self.nodes))
        _set(self, "costs", _frozen_array(self.costs, np.float64).reshape(-1))

    def target(self) -> int | None:
        """The unique sum with cost 0 if every other sum is forbidden, else None."""
        finite = np.flatnonzero(np.isfinite(self.costs))
        if len(finite) == 1 and self.costs[finite[0]] == 0.0:
            return int(finite[0])
        return None


@dataclass(frozen=True, eq=False)
class TomographyInstance(_ArrayEq):
    base: MrfInstance
    projections: tuple

    def __post_init__(self):
        counts = self.base.label_counts
        if len(counts) and np.any(counts != counts[0]):
            raise InvalidInstance("tomography requires the same label count on every node")
        k = self.label_count
        projections = tuple(p if isinstance(p, Projection) else Projection(*p)
                            for p in self.projections)
        for i, p in enumerate(projections):
            if not p.nodes:
                raise InvalidInstance(f"projection {i} is empty")
            if len(set(p.nodes)) != len(p.nodes):
                raise InvalidInstance(f"projection {i} repeats a node")
            for v in p.nodes:
                if not 0 <= v < self.base.node_count:
                    raise InvalidInstance(f"projection {i} references node {v} out of range")
            expected = (k - 1) * len(p.nodes) + 1
            if len(p.costs) != expected:
                raise InvalidInstance(
                    f"projection {i} has {len(p.costs)} costs, expected {expected}")
        _set(self, "projections", projections)

    @property
    def label_count(self) -> int:
        return int(self.base.label_counts[0]) if self.base.node_count else 1


# ---------------------------------------------------------------------------
# Multicut and asymmetric multiway cut


def _edge_arrays(edges, node_count, what="edge"):
    arr = np.asarray(edges, dtype=np.float64).reshape(-1, 3) if len(edges) else np.empty((0, 3))
    ij = arr[:, :2]
    if not np.all(ij == np.floor(ij)):
        raise InvalidInstance(f"{what} endpoints must be integers")
    src = _frozen_array(arr[:, 0], np.int64)
    dst = _frozen_array(arr[:, 1], np.int64)
    costs = _frozen_array(arr[:, 2], np.float64)
    _check_edges(src, dst, node_count, what)
    return src, dst, costs


def _check_edges(src, dst, node_count, what="edge"):
    bad = np.flatnonzero((src < 0) | (dst < 0) | (src >= node_count) | (dst >= node_count))
    if len(bad):
        e = int(bad[0])
        raise InvalidInstance(f"{what} {e} ({src[e]},{dst[e]}) has an endpoint out of range",
                              ("edge", e))
    loops = np.flatnonzero(src == dst)
    if len(loops):
        e = int(loops[0])
        raise InvalidInstance(f"{what} {e} is a self-loop on node {src[e]}", ("edge", e))
    if len(src) > 1:
        lo = np.minimum(src, dst)
        hi = np.maximum(src, dst)
        key = lo * max(node_count, 1) + hi
        order = np.argsort(key, kind="stable")
        dup = np.flatnonzero(key[order][1:] == key[order][:-1])
        if len(dup):
            e = int(order[dup[0] + 1])
            raise InvalidInstance(f"{what} {e} ({src[e]},{dst[e]}) is a duplicate", ("edge", e))


@dataclass(frozen=True, eq=False)
class MulticutInstance(_ArrayEq):
    """Weighted graph; the objective is the total cost of cut edges."""

    node_count: int
    sources: np.ndarray
    targets: np.ndarray
    costs: np.ndarray

    def __post_init__(self):
        n = int(self.node_count)
        if n < 0:
            raise InvalidInstance("node count must be nonnegative")
        src = _frozen_array(self.sources, np.int64).reshape(-1)
        dst = _frozen_array(self.targets, np.int64).reshape(-1)
        costs = _frozen_array(self.costs, np.float64).reshape(-1)
        if not len(src) == len(dst) == len(costs):
            raise InvalidInstance("sources, targets and costs must have equal length")
        _check_edges(src, dst, n)
        _set(self, "node_count", n)
        _set(self, "sources", src)
        _set(self, "targets", dst)
        _set(self, "costs", costs)

    @classmethod
    def from_edges(cls, edges: Iterable[Sequence[float]], node_count: int | None = None):
        edges = list(edges)
        if node_count is None:
            node_count = 1 + max((max(int(i), int(j)) for i, j, _ in edges), default=-1)
        src, dst, costs = _edge_arrays(edges, node_count)
        return cls(node_count, src, dst, costs)

    @property
    def edge_count(self) -> int:
        return len(self.costs)

    @property
    def edges(self) -> list[tuple[int, int, float]]:
        return list(zip(self.sources.tolist(), self.targets.tolist(), self.costs.tolist()))


@dataclass(frozen=True)
class Partition:
    """Cluster id per node; ids form the contiguous range ``0..k-1``."""

    clusters: tuple

    def __post_init__(self):
        clusters = tuple(int(c) for c in self.clusters)
        if clusters and set(clusters) != set(range(max(clusters) + 1)):
            raise InvalidInstance("cluster ids must form a contiguous 0-based range")
        _set(self, "clusters", clusters)

    def __len__(self):
        return len(self.clusters)

    @property
    def cluster_count(self) -> int:
        return max(self.clusters) + 1 if self.clusters else 0

    def canonical(self) -> "Partition":
        """Relabel clusters in order of first appearance (restricted growth string)."""
        relabel: dict[int, int] = {}
        return Partition(tuple(relabel.setdefault(c, len(relabel)) for c in self.clusters))

    def blocks(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.cluster_count)]
        for v, c in enumerate(self.clusters):
            out[c].append(v)
        return out

    @classmethod
    def from_labels(cls, labels: Iterable) -> "Partition":
        relabel: dict = {}
        return cls(tuple(relabel.setdefault(c, len(relabel)) for c in labels))


@dataclass(frozen=True)
class EdgeCutVector:
    cut: tuple

    def __post_init__(self):
        cut = tuple(int(y) for y in self.cut)
        if any(y not in (0, 1) for y in cut):
            raise InvalidInstance("cut vector entries must be 0 or 1")
        _set(self, "cut", cut)

    def __len__(self):
        return len(self.cut)


@dataclass(frozen=True, eq=False)
class AmwcInstance(_ArrayEq):
    node_costs: np.ndarray
    partitionable: frozenset
    sources: np.ndarray
    targets: np.ndarray
    costs: np.ndarray

    def __post_init__(self):
        nc = np.asarray(self.node_costs, dtype=np.float64)
        if nc.ndim != 2:
            raise InvalidInstance("node costs must be a |V| x K table")
        nc = _frozen_array(nc, np.float64)
        k = nc.shape[1]
        if nc.shape[0] and k < 1:
            raise InvalidInstance("at least one class is required")
        part = frozenset(int(p) for p in self.partitionable)
        for p in sorted(part):
            if not 0 <= p < k:
                raise InvalidInstance(f"partitionable class {p} is not in 0..{k - 1}")
        src = _frozen_array(self.sources, np.int64).reshape(-1)
        dst = _frozen_array(self.targets, np.int64).reshape(-1)
        costs = _frozen_array(self.costs, np.float64).reshape(-1)
        if not len(src) == len(dst) == len(costs):
            raise InvalidInstance("sources, targets and costs must have equal length")
        _check_edges(src, dst, nc.shape[0])
        _set(self, "node_costs", nc)
        _set(self, "partitionable", part)
        _set(self, "sources", src)
        _set(self, "targets", dst)
        _set(self, "costs", costs)

    @classmethod
    def from_edges(cls, node_costs, partitionable, edges):
        nc = np.asarray(node_costs, dtype=np.float64)
        src, dst, costs = _edge_arrays(list(edges), nc.shape[0])
        return cls(nc, frozenset(partitionable), src, dst, costs)

    @property
    def node_count(self) -> int:
        return self.node_costs.shape[0]

    @property
    def class_count(self) -> int:
        return self.node_costs.shape[1]

    @property
    def edge_count(self) -> int:
        return len(self.costs)

    @property
    def edges(self):
        return list(zip(self.sources.tolist(), self.targets.tolist(), self.costs.tolist()))

    def as_multicut(self) -> MulticutInstance:
        return MulticutInstance(self.node_count, self.sources, self.targets, self.costs)


@dataclass(frozen=True)
class AmwcSolution:
    labels: tuple
    cut: EdgeCutVector

    def __post_init__(self):
        _set(self, "labels", tuple(int(x) for x in self.labels))
        if not isinstance(self.cut, EdgeCutVector):
            _set(self, "cut", EdgeCutVector(tuple(self.cut)))


# ---------------------------------------------------------------------------
# Graph matching


@dataclass(frozen=True, eq=False)
class GmInstance(_ArrayEq):
    """Quadratic assignment in Lawler form with sparse linear and quadratic terms.

    Pairs ``(i, j)`` without a listed assignment are forbidden; quadratic terms
    that are not listed cost nothing.  Assignment ids are kept as written.
    """

    left_size: int
    right_size: int
    ids: np.ndarray
    left: np.ndarray
    right: np.ndarray
    costs: np.ndarray
    quad_a: np.ndarray = field(default_factory=lambda: np.empty(0, np.int64))
    quad_b: np.ndarray = field(default_factory=lambda: np.empty(0, np.int64))
    quad_costs: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __post_init__(self):
        n1, n2 = int(self.left_size), int(self.right_size)
        if n1 < 0 or n2 < 0:
            raise InvalidInstance("point set sizes must be nonnegative")
        ids = _frozen_array(self.ids, np.int64).reshape(-1)
        left = _frozen_array(self.left, np.int64).reshape(-1)
        right = _frozen_array(self.right, np.int64).reshape(-1)
        costs = _frozen_array(self.costs, np.float64).reshape(-1)
        if not len(ids) == len(left) == len(right) == len(costs):
            raise InvalidInstance("assignment arrays must have equal length")
        index: dict[int, int] = {}
        pairs: dict[tuple[int, int], int] = {}
        for a, (aid, i, j) in enumerate(zip(ids.tolist(), left.tolist(), right.tolist())):
            if aid in index:
                raise InvalidInstance(f"assignment id {aid} is a duplicate")
            index[aid] = a
            if not 0 <= i < n1:
                raise InvalidInstance(f"assignment {aid} left node {i} out of range 0..{n1 - 1}")
            if not 0 <= j < n2:
                raise InvalidInstance(f"assignment {aid} right node {j} out of range 0..{n2 - 1}")
            if (i, j) in pairs:
                raise InvalidInstance(f"assignment {aid} repeats the pair ({i},{j})")
            pairs[(i, j)] = aid
        qa = _frozen_array(self.quad_a, np.int64).reshape(-1)
        qb = _frozen_array(self.quad_b, np.int64).reshape(-1)
        qc = _frozen_array(self.quad_costs, np.float64).reshape(-1)
        if not len(qa) == len(qb) == len(qc):
            raise InvalidInstance("quadratic arrays must have equal length")
        for q, (a, b) in enumerate(zip(qa.tolist(), qb.tolist())):
            for ref in (a, b):
                if ref not in index:
                    raise InvalidInstance(f"quadratic term {q} references unknown assignment {ref}")
            if a == b:
                raise InvalidInstance(f"quadratic term {q} pairs assignment {a} with itself")
        for name, value in (("left_size", n1), ("right_size", n2), ("ids", ids), ("left", left),
                            ("right", right), ("costs", costs), ("quad_a", qa),
                            ("quad_b", qb), ("quad_costs", qc)):
            _set(self, name, value)
        _set(self, "_index", index)

    @classmethod
    def from_lists(cls, left_size, right_size, assignments, quadratic=()):
        """Build from ``(id, i, j, c)`` and ``(id_a, id_b, d)`` tuples."""
        assignments = list(assignments)
        quadratic = list(quadratic)
        cols = list(zip(*assignments)) if assignments else [(), (), (), ()]
        qcols = list(zip(*quadratic)) if quadratic else [(), (), ()]
        return cls(left_size, right_size, *cols, *qcols)

    @property
    def assignment_count(self) -> int:
        return len(self.ids)

    def position(self, assignment_id: int) -> int:
        """Dense position of an assignment id; KeyError if unknown."""
        return self._index[int(assignment_id)]

    def has_assignment(self, assignment_id) -> bool:
        return int(assignment_id) in self._index

    @property
    def assignments(self):
        return list(zip(self.ids.tolist(), self.left.tolist(), self.right.tolist(),
                        self.costs.tolist()))

    @property
    def quadratic(self):
        return list(zip(self.quad_a.tolist(), self.quad_b.tolist(), self.quad_costs.tolist()))


@dataclass(frozen=True)
class GmSolution:
    """Set of active assignment ids.

    Uniqueness per node is not enforced here; the evaluator reports it.
    """

    active: frozenset

    def __post_init__(self):
        _set(self, "active", frozenset(int(a) for a in self.active))


@dataclass(frozen=True, eq=False)
class MgmInstance(_ArrayEq):
    sizes: tuple
    pairs: Mapping

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        pairs = {}
        for (p, k), gm in sorted(self.pairs.items()):
            p, k = int(p), int(k)
            if not 0 <= p < k < len(sizes):
                raise InvalidInstance(f"pair ({p},{k}) must satisfy 0 <= p < k < {len(sizes)}")
            if gm.left_size != sizes[p] or gm.right_size != sizes[k]:
                raise InvalidInstance(
                    f"pair ({p},{k}) has sizes ({gm.left_size},{gm.right_size}), "
                    f"expected ({sizes[p]},{sizes[k]})")
            pairs[(p, k)] = gm
        _set(self, "sizes", sizes)
        _set(self, "pairs", types.MappingProxyType(pairs))

    def __eq__(self, other):
        if not isinstance(other, MgmInstance):
            return NotImplemented
        return self.sizes == other.sizes and dict(self.pairs) == dict(other.pairs)

    @property
    def graph_count(self) -> int:
        return len(self.sizes)


# ---------------------------------------------------------------------------
# Cell tracking


class Detection(NamedTuple):
    frame: int
    id: int
    cost: float


class Move(NamedTuple):
    id: int
    source: int
    target: int
    cost: float


class Division(NamedTuple):
    id: int
    parent: int
    child1: int
    child2: int
    cost: float


@dataclass(frozen=True)
class CellTrackingInstance:
    """Detection hypotheses linked across frames by moves and divisions.

    ``appearances`` and ``disappearances`` map a detection id to its cost; a
    detection without such an entry has no appearance/disappearance variable.
    Frame numbers are kept as written.
    """

    detections: tuple
    appearances: Mapping = field(default_factory=dict)
    disappearances: Mapping = field(default_factory=dict)
    moves: tuple = ()
    divisions: tuple = ()
    exclusions: tuple = ()

    def __post_init__(self):
        dets = tuple(Detection(int(t), int(i), float(c)) for t, i, c in self.detections)
        frame_of: dict[int, int] = {}
        for d in dets:
            if d.id in frame_of:
                raise InvalidInstance(f"detection id {d.id} is a duplicate")
            frame_of[d.id] = d.frame
        apps = self._cost_map(self.appearances, frame_of, "appearance")
        disapps = self._cost_map(self.disappearances, frame_of, "disappearance")
        moves = tuple(Move(int(a), int(s), int(t), float(c)) for a, s, t, c in self.moves)
        seen = set()
        for m in moves:
            if m.id in seen:
                raise InvalidInstance(f"move id {m.id} is a duplicate")
            seen.add(m.id)
            for ref in (m.source, m.target):
                if ref not in frame_of:
                    raise InvalidInstance(f"move {m.id} references unknown detection {ref}")
            if frame_of[m.target] != frame_of[m.source] + 1:
                raise InvalidInstance(
                    f"move {m.id} must link frame t to t+1, got "
                    f"{frame_of[m.source]} -> {frame_of[m.target]}")
        divs = tuple(Division(int(a), int(p), int(c1), int(c2), float(c))
                     for a, p, c1, c2, c in self.divisions)
        seen = set()
        for d in divs:
            if d.id in seen:
                raise InvalidInstance(f"division id {d.id} is a duplicate")
            seen.add(d.id)
            for ref in (d.parent, d.child1, d.child2):
                if ref not in frame_of:
                    raise InvalidInstance(f"division {d.id} references unknown detection {ref}")
            if d.child1 == d.child2:
                raise InvalidInstance(f"division {d.id} repeats child {d.child1}")
            for child in (d.child1, d.child2):
                if frame_of[child] != frame_of[d.parent] + 1:
                    raise InvalidInstance(
                        f"division {d.id} child {child} is not in the frame after its parent")
        excl = tuple(tuple(int(i) for i in s) for s in self.exclusions)
        for n, s in enumerate(excl):
            if not s:
                raise InvalidInstance(f"exclusion set {n} is empty")
            for i in s:
                if i not in frame_of:
                    raise InvalidInstance(f"exclusion set {n} references unknown detection {i}")
            if len({frame_of[i] for i in s}) != 1:
                raise InvalidInstance(f"exclusion set {n} spans several frames")
            if len(set(s)) != len(s):
                raise InvalidInstance(f"exclusion set {n} repeats a detection")
        _set(self, "detections", dets)
        _set(self, "appearances", types.MappingProxyType(apps))
        _set(self, "disappearances", types.MappingProxyType(disapps))
        _set(self, "moves", moves)
        _set(self, "divisions", divs)
        _set(self, "exclusions", excl)
        _set(self, "_frame_of", frame_of)

    @staticmethod
    def _cost_map(source, frame_of, kind):
        out = {}
        items = source.items() if isinstance(source, Mapping) else ((i, c) for _, i, c in source)
        for i, c in items:
            i = int(i)
            if i not in frame_of:
                raise InvalidInstance(f"{kind} references unknown detection {i}")
            if i in out:
                raise InvalidInstance(f"{kind} for detection {i} is a duplicate")
            out[i] = float(c)
        return out

    def __eq__(self, other):
        if not isinstance(other, CellTrackingInstance):
            return NotImplemented
        return (self.detections == other.detections
                and dict(self.appearances) == dict(other.appearances)
                and dict(self.disappearances) == dict(other.disappearances)
                and self.moves == other.moves and self.divisions == other.divisions
                and self.exclusions == other.exclusions)

    __hash__ = None

    def frame_of(self, detection_id: int) -> int:
        return self._frame_of[detection_id]

    @property
    def frames(self) -> list[int]:
        return sorted(set(self._frame_of.values()))

    def has_incoming_constraint(self, detection_id: int) -> bool:
        """Whether a detection must be fed by an appearance, move or division.

        Detections in the first frame without an appearance record are free
        sources; every other detection is constrained.
        """
        frame = self._frame_of[detection_id]
        return detection_id in self.appearances or frame != min(self._frame_of.values())

    def has_outgoing_constraint(self, detection_id: int) -> bool:
        frame = self._frame_of[detection_id]
        return detection_id in self.disappearances or frame != max(self._frame_of.values())


@dataclass(frozen=True)
class CellTrackingSolution:
    detections: frozenset = frozenset()
    appearances: frozenset = frozenset()
    disappearances: frozenset = frozenset()
    moves: frozenset = frozenset()
    divisions: frozenset = frozenset()

    def __post_init__(self):
        for f in fields(self):
            _set(self, f.name, frozenset(int(i) for i in getattr(self, f.name)))


# ---------------------------------------------------------------------------
# Integer linear programs


RELATIONS = ("<=", ">=", "=")


class Constraint(NamedTuple):
    id: str
    terms: Mapping
    relation: str
    rhs: float


@dataclass(frozen=True)
class IlpInstance:
    """Binary ILP ``min c.x`` subject to named linear constraints.

    Variables keep their declaration order; ``objective`` and constraint
    ``terms`` map variable names to coefficients.
    """

    variables: tuple
    objective: Mapping
    constraints: tuple = ()

    def __post_init__(self):
        variables = tuple(self.variables)
        declared = set(variables)
        if len(declared) != len(variables):
            seen = set()
            dup = next(v for v in variables if v in seen or seen.add(v))
            raise InvalidInstance(f"variable {dup!r} is declared twice")
        objective = {str(k): float(v) for k, v in self.objective.items()}
        for name in objective:
            if name not in declared:
                raise InvalidInstance(f"objective references undeclared variable {name!r}")
        constraints = []
        ids = set()
        for c in self.constraints:
            cid, terms, rel, rhs = c
            if cid in ids:
                raise InvalidInstance(f"constraint id {cid!r} is a duplicate")
            ids.add(cid)
            if rel not in RELATIONS:
                raise InvalidInstance(f"constraint {cid!r} has unknown relation {rel!r}")
            terms = {str(k): float(v) for k, v in terms.items()}
            for name in terms:
                if name not in declared:
                    raise InvalidInstance(
                        f"constraint {cid!r} references undeclared variable {name!r}")
            constraints.append(Constraint(cid, types.MappingProxyType(terms), rel, float(rhs)))
        _set(self, "variables", variables)
        _set(self, "objective", types.MappingProxyType(objective))
        _set(self, "constraints", tuple(constraints))

    def __eq__(self, other):
        if not isinstance(other, IlpInstance):
            return NotImplemented
        if self.variables != other.variables or dict(self.objective) != dict(other.objective):
            return False
        if len(self.constraints) != len(other.constraints):
            return False
        return all(a.id == b.id and dict(a.terms) == dict(b.terms) and a.relation == b.relation
                   and a.rhs == b.rhs for a, b in zip(self.constraints, other.constraints))

    __hash__ = None


# ---------------------------------------------------------------------------
# Shape matching variable names


class TriangleProduct(NamedTuple):
    """A triangle of shape X paired with a (possibly degenerate) triangle of shape Y."""

    a1: int
    a2: int
    a3: int
    b1: int
    b2: int
    b3: int

    @property
    def x_triangle(self):
        return (self.a1, self.a2, self.a3)

    @property
    def y_triangle(self):
        return (self.b1, self.b2, self.b3)


# ---------------------------------------------------------------------------
# Statistics


@dataclass(frozen=True)
class InstanceStats:
    kind: str
    counts: Mapping
    size: int

    def as_dict(self) -> dict:
        return {"class": self.kind, **self.counts, "size": self.size}


def _mrf_counts(m: MrfInstance) -> dict:
    lc = m.label_counts
    return {
        "nodes": m.node_count,
        "edges": m.edge_count,
        "labels_min": int(lc.min()) if len(lc) else 0,
        "labels_max": int(lc.max()) if len(lc) else 0,
    }


def _mrf_size(m: MrfInstance) -> int:
    lc = m.label_counts
    return int(lc.sum() + sum(lc[u] * lc[v] for u, v in m.edges.tolist()))


def instance_stats(instance) -> InstanceStats:
    """Summary counts for any problem instance (or an :class:`IlpInstance`)."""
    if isinstance(instance, MrfInstance):
        return InstanceStats("mrf", _mrf_counts(instance), _mrf_size(instance))
    if isinstance(instance, BottleneckMrfInstance):
        return InstanceStats("bottleneck", _mrf_counts(instance.base),
                             2 * _mrf_size(instance.base))
    if isinstance(instance, TomographyInstance):
        counts = _mrf_counts(instance.base)
        counts["projections"] = len(instance.projections)
        size = _mrf_size(instance.base) + sum(len(p.costs) for p in instance.projections)
        return InstanceStats("tomography", counts, size)
    if isinstance(instance, MulticutInstance):
        return InstanceStats("multicut", {"nodes": instance.node_count,
                                          "edges": instance.edge_count},
                             instance.node_count + instance.edge_count)
    if isinstance(instance, AmwcInstance):
        return InstanceStats("amwc", {"nodes": instance.node_count,
                                      "edges": instance.edge_count,
                                      "classes": instance.class_count,
                                      "partitionable": len(instance.partitionable)},
                             instance.node_costs.size + instance.edge_count)
    if isinstance(instance, GmInstance):
        return InstanceStats("gm", {"left": instance.left_size, "right": instance.right_size,
                                    "assignments": instance.assignment_count,
                                    "quadratic": len(instance.quad_costs)},
                             instance.assignment_count + len(instance.quad_costs))
    if isinstance(instance, MgmInstance):
        a = sum(g.assignment_count for g in instance.pairs.values())
        q = sum(len(g.quad_costs) for g in instance.pairs.values())
        return InstanceStats("mgm", {"graphs": instance.graph_count,
                                     "points_max": max(instance.sizes, default=0),
                                     "pairs": len(instance.pairs),
                                     "assignments": a, "quadratic": q}, a + q)
    if isinstance(instance, CellTrackingInstance):
        counts = {"frames": len(instance.frames), "detections": len(instance.detections),
                  "appearances": len(instance.appearances),
                  "disappearances": len(instance.disappearances),
                  "moves": len(instance.moves), "divisions": len(instance.divisions),
                  "exclusions": len(instance.exclusions)}
        size = sum(v for k, v in counts.items() if k not in ("frames", "exclusions"))
        return InstanceStats("celltracking", counts, size)
    if isinstance(instance, IlpInstance):
        nnz = sum(len(c.terms) for c in instance.constraints)
        return InstanceStats("lp", {"variables": len(instance.variables),
                                    "constraints": len(instance.constraints),
                                    "nonzeros": nnz}, len(instance.variables) + nnz)
    raise TypeError(f"unsupported instance type {type(instance).__name__}")

import itertools
import json
import math

import numpy as np
import pytest

from structpred import (AmwcInstance, AmwcSolution, BottleneckMrfInstance, CellTrackingInstance,
                        CellTrackingSolution, EdgeCutVector, GmInstance, GmSolution, IlpInstance,
                        MgmInstance, MrfInstance, MrfLabeling, Partition, Projection,
                        TomographyInstance)
from structpred import generate as gen
from structpred.evaluation import (DimensionMismatch, UnknownId, bottleneck_term,
                                   cut_from_partition, evaluate, evaluate_bottleneck_mrf,
                                   evaluate_ilp, evaluate_mgm, evaluate_multicut, mrf_energy,
                                   partition_from_cut)

from conftest import chain, triangle


def kinds(report):
    return [(v.kind, v.location) for v in report.violations]


# --- MRF family


def test_zero_tables_give_zero_energy():
    mrf = MrfInstance([2, 3], [[0, 0], [0, 0, 0]], [(0, 1)], [np.zeros((2, 3))])
    assert all(mrf_energy(mrf, x) == 0 for x in itertools.product(range(2), range(3)))


def test_chain_energies():
    assert evaluate(chain(), MrfLabeling((1, 1))).objective == 10
    assert evaluate(chain(), MrfLabeling((0, 0))).objective == 0
    assert evaluate(chain(), MrfLabeling((0, 1))).objective == 6


def test_label_out_of_range():
    rep = evaluate(chain(), MrfLabeling((0, 2)))
    assert not rep.feasible and kinds(rep) == [("label_range", (1,))]


def test_wrong_labeling_length():
    with pytest.raises(DimensionMismatch):
        evaluate(chain(), MrfLabeling((0,)))


def test_zero_bottleneck_is_plain_energy(rng):
    for _ in range(5):
        mrf = gen.random_mrf(rng, 3, 3, 0.6)
        zero = MrfInstance(mrf.label_counts, [np.zeros_like(t) for t in mrf.unaries], mrf.edges,
                           [np.zeros_like(t) for t in mrf.pairwise])
        inst = BottleneckMrfInstance(mrf, zero)
        for x in itertools.product(*(range(c) for c in mrf.label_counts)):
            assert evaluate(inst, MrfLabeling(x)).objective == mrf_energy(mrf, x)


def test_bottleneck_without_edges_drops_edge_term():
    base = MrfInstance([2], [[0, 0]], np.zeros((0, 2)), [])
    psi = MrfInstance([2], [[3, 7]], np.zeros((0, 2)), [])
    assert evaluate_bottleneck_mrf(BottleneckMrfInstance(base, psi), MrfLabeling((0,))).objective == 3


def test_bottleneck_min_of_maxima():
    base = MrfInstance([2, 2], [[0, 0], [0, 0]], [(0, 1)], [np.zeros((2, 2))])
    psi = MrfInstance([2, 2], [[5, 0], [1, 0]], [(0, 1)], [[[2, 9], [9, 9]]])
    inst = BottleneckMrfInstance(base, psi)
    assert bottleneck_term(inst, (0, 0)) == 2


def tomo(costs, unaries=((0, 0), (0, 0))):
    base = MrfInstance([2, 2], unaries, np.zeros((0, 2)), [])
    return TomographyInstance(base, (Projection((0, 1), costs),))


def test_tomography_satisfied_and_violated():
    inst = tomo([math.inf, 0, math.inf])
    assert evaluate(inst, MrfLabeling((1, 0))).objective == 0
    rep = evaluate(inst, MrfLabeling((0, 0)))
    assert not rep.feasible and kinds(rep) == [("projection", (0,))]


def test_soft_projection_adds_its_cost():
    rep = evaluate(tomo([2, 0, 2]), MrfLabeling((1, 1)))
    assert rep.feasible and rep.objective == 2


# --- multicut


def test_cut_from_partition_extremes():
    mc = triangle()
    assert cut_from_partition(mc, Partition((0, 0, 0))).cut == (0, 0, 0)
    assert cut_from_partition(mc, Partition((0, 1, 2))).cut == (1, 1, 1)
    assert cut_from_partition(mc, Partition((0, 1, 0))).cut == (1, 1, 0)


def test_partition_cost():
    rep = evaluate(triangle(), Partition((0, 1, 0)))
    assert rep.feasible and rep.objective == -2


def test_isolating_node_zero_is_a_valid_cut():
    rep = evaluate_multicut(triangle(), EdgeCutVector((1, 0, 1)))
    assert rep.feasible and rep.objective == -1 + 2


def test_single_cut_edge_inside_component():
    rep = evaluate_multicut(triangle(), EdgeCutVector((1, 0, 0)))
    assert not rep.feasible and kinds(rep) == [("cycle", (0, 1))]


def test_cut_vector_length_checked():
    with pytest.raises(DimensionMismatch):
        evaluate_multicut(triangle(), EdgeCutVector((1, 0)))


def test_delta_soundness(rng):
    for _ in range(30):
        mc = gen.random_multicut(rng, 5, 0.6)
        for cut in itertools.product((0, 1), repeat=mc.edge_count):
            y = EdgeCutVector(cut)
            feasible = evaluate_multicut(mc, y).feasible
            assert feasible == (cut_from_partition(mc, partition_from_cut(mc, y)) == y)


# --- AMWC


def test_amwc_single_class_uncut():
    inst = AmwcInstance([[1.5], [2.0], [-1.0]], set(), [0, 1], [1, 2], [4.0, 4.0])
    rep = evaluate(inst, AmwcSolution((0, 0, 0), EdgeCutVector((0, 0))))
    assert rep.feasible and rep.objective == 2.5


def test_amwc_differing_labels_need_cut():
    inst = AmwcInstance([[0, 0], [0, 0]], set(), [0], [1], [1.0])
    rep = evaluate(inst, AmwcSolution((0, 1), EdgeCutVector((0,))))
    assert kinds(rep) == [("label_link", (0, 1))]


def test_amwc_partitionable_split():
    inst = AmwcInstance([[0, 0], [0, 0]], {1}, [0], [1], [-1.0])
    rep = evaluate(inst, AmwcSolution((1, 1), EdgeCutVector((1,))))
    assert rep.feasible and rep.objective == -1
    rep = evaluate(inst, AmwcSolution((0, 0), EdgeCutVector((1,))))
    assert kinds(rep) == [("nonpartitionable_cut", (0, 1))]


# --- graph matching


def gm_small():
    return GmInstance.from_lists(2, 2, [(1, 0, 0, -1.0), (2, 1, 1, -1.0), (3, 0, 1, 0.0)],
                                 [(1, 2, 0.5)])


def test_gm_empty_solution():
    rep = evaluate(gm_small(), GmSolution(frozenset()))
    assert rep.feasible and rep.objective == 0


def test_gm_row_conflict():
    rep = evaluate(gm_small(), GmSolution(frozenset({1, 3})))
    assert kinds(rep) == [("row", (0,))]


def test_gm_quadratic_cost():
    assert evaluate(gm_small(), GmSolution(frozenset({1, 2}))).objective == -1.5


def test_gm_unknown_id():
    with pytest.raises(UnknownId):
        evaluate(gm_small(), GmSolution(frozenset({7})))


def two_point_triple():
    """Three point sets A, B, C of two points each, all pairs matchable at cost 0."""
    def dense():
        return GmInstance.from_lists(2, 2, [(2 * i + j, i, j, 0.0)
                                            for i in range(2) for j in range(2)], [])
    return MgmInstance((2, 2, 2), {(0, 1): dense(), (0, 2): dense(), (1, 2): dense()})


def test_identity_matchings_are_consistent():
    inst = two_point_triple()
    ident = GmSolution(frozenset({0, 3}))
    rep = evaluate_mgm(inst, {(0, 1): ident, (0, 2): ident, (1, 2): ident})
    assert rep.feasible


def test_broken_three_way_matching_is_inconsistent():
    # A1-B2, B2-C2, A2-C2 with points numbered from 0: A0-B1, B1-C1, A1-C1
    inst = two_point_triple()
    sol = {(0, 1): GmSolution(frozenset({1})), (1, 2): GmSolution(frozenset({3})),
           (0, 2): GmSolution(frozenset({3}))}
    rep = evaluate_mgm(inst, sol)
    assert not rep.feasible
    assert ((0, 0), (1, 1), (2, 1)) in [v.location for v in rep.violations]
    assert all(v.kind == "transitivity" for v in rep.violations)


def test_empty_matchings_are_consistent():
    inst = two_point_triple()
    empty = GmSolution(frozenset())
    rep = evaluate_mgm(inst, {key: empty for key in inst.pairs})
    assert rep.feasible and rep.objective == 0


def test_permutation_closure(rng):
    for _ in range(10):
        n, graphs = 3, 4
        perms = [rng.permutation(n) for _ in range(graphs)]
        pairs, sol = {}, {}
        for p, k in itertools.combinations(range(graphs), 2):
            gm = GmInstance.from_lists(n, n, [(i * n + j, i, j, 1.0)
                                              for i in range(n) for j in range(n)], [])
            pairs[(p, k)] = gm
            # point i of graph p corresponds to point perm_k[perm_p^-1[i]] of graph k
            inv = np.argsort(perms[p])
            sol[(p, k)] = GmSolution(frozenset(int(i * n + perms[k][inv[i]]) for i in range(n)))
        assert evaluate_mgm(MgmInstance((n,) * graphs, pairs), sol).feasible


def test_missing_pair_solution():
    inst = two_point_triple()
    with pytest.raises(DimensionMismatch):
        evaluate_mgm(inst, {(0, 1): GmSolution(frozenset())})


# --- cell tracking


def two_frames():
    return CellTrackingInstance([(0, 1, -1.0), (1, 2, -2.0)], {1: 0.5, 2: 0.25},
                                {1: 0.125, 2: 1.0}, [(10, 1, 2, -4.0)])


def test_cell_tracking_empty_solution():
    rep = evaluate(two_frames(), CellTrackingSolution())
    assert rep.feasible and rep.objective == 0


def test_cell_tracking_missing_incoming_link():
    rep = evaluate(two_frames(), CellTrackingSolution({2}, (), {2}))
    assert kinds(rep) == [("incoming", (2,))]


def test_cell_tracking_chain_is_feasible():
    rep = evaluate(two_frames(), CellTrackingSolution({1, 2}, {1}, {2}, {10}))
    assert rep.feasible and rep.objective == -1 - 2 + 0.5 + 1.0 - 4.0


def test_exclusion_violation():
    inst = CellTrackingInstance([(0, 1, 0.0), (0, 2, 0.0)], exclusions=[(1, 2)])
    rep = evaluate(inst, CellTrackingSolution({1, 2}))
    assert kinds(rep) == [("exclusion", (0,))]


# --- ILP


def test_ilp_violated_row():
    ilp = IlpInstance(("x", "y"), {"x": 1.0}, (("c1", {"x": 1, "y": 1}, "<=", 1),))
    rep = evaluate_ilp(ilp, {"x": 1, "y": 1})
    assert kinds(rep) == [("constraint", ("c1",))]


def test_ilp_zero_assignment(rng):
    for _ in range(10):
        ilp = gen.random_ilp(rng, 5, 4)
        rows = tuple((c.id, c.terms, "<=", abs(c.rhs)) for c in ilp.constraints)
        ilp = IlpInstance(ilp.variables, ilp.objective, rows)
        rep = evaluate_ilp(ilp, {v: 0 for v in ilp.variables})
        assert rep.feasible and rep.objective == 0


def test_float_rows_use_tolerance():
    ilp = IlpInstance(("x", "y", "z"), {}, (("c", {"x": 0.1, "y": 0.2, "z": -0.3}, "=", 0),))
    assert evaluate_ilp(ilp, {"x": 1, "y": 1, "z": 1}).feasible


def test_shape_matching_style_lp():
    from structpred.formats import encode_shape_variable
    from structpred.model import TriangleProduct
    from structpred.solve import brute_force

    # two X triangles, each must be covered by exactly one product
    products = [TriangleProduct(0, 1, 2, a, b, c) for a, b, c in ((0, 1, 2), (0, 1, 3), (1, 1, 1))]
    products += [TriangleProduct(1, 2, 3, a, b, c) for a, b, c in ((1, 2, 3), (0, 1, 3), (2, 2, 2))]
    names = tuple(encode_shape_variable(p) for p in products)
    rng = np.random.default_rng(5)
    costs = {n: float(c) for n, c in zip(names, rng.integers(-5, 6, len(names)))}
    rows = (("cover_x_0", {n: 1 for n in names[:3]}, "=", 1),
            ("cover_x_1", {n: 1 for n in names[3:]}, "=", 1),
            ("onto_y", {names[1]: 1, names[4]: 1}, "<=", 1))
    ilp = IlpInstance(names, costs, rows)
    result = brute_force(ilp)
    rep = evaluate_ilp(ilp, result.solution)
    assert rep.feasible and rep.objective == result.objective


def test_report_json_schema():
    rep = evaluate(chain(), MrfLabeling((0, 2)))
    data = json.loads(rep.to_json())
    assert list(data) == ["feasible", "objective", "violations"]
    assert data["objective"] == "inf"
    assert data["violations"][0] == {"kind": "label_range", "location": [1],
                                     "description": data["violations"][0]["description"]}

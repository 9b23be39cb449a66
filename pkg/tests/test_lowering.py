import itertools
import math

import numpy as np
import pytest

from structpred import (AmwcInstance, AmwcSolution, CellTrackingInstance, EdgeCutVector,
                        GmInstance, GmSolution, MgmInstance, MrfInstance, MrfLabeling,
                        MulticutInstance, Partition, Projection, TomographyInstance, serialize)
from structpred import generate as gen
from structpred.evaluation import evaluate
from structpred.lowering import (GeneralProjection, InconsistentIndicators, InfeasibleSolution,
                                 NotPotts, chordless_cycles, decode_cut, decode_solution,
                                 encode_solution, lower, lower_amwc, lower_cell_tracking,
                                 lower_gm, lower_mgm, lower_mrf_local_polytope,
                                 lower_mrf_potts_compact, lower_multicut, lower_tomography,
                                 transitivity_triples)
from structpred.evaluation import evaluate_ilp
from structpred.solve import solve_ilp_exhaustive

from conftest import chain, enumerate_ilp, triangle


def optimum(model):
    return enumerate_ilp(model.ilp)[0] + model.objective_offset


def pruned_optimum(model):
    # branch-and-bound oracle, itself checked against enumerate_ilp in test_solve
    return solve_ilp_exhaustive(model.ilp).objective + model.objective_offset


# --- MRF


def test_local_polytope_counts():
    model = lower_mrf_local_polytope(chain())
    assert len(model.ilp.variables) == 8
    assert len(model.ilp.constraints) == 6
    assert all(c.relation == "=" for c in model.ilp.constraints)


def test_local_polytope_single_node():
    mrf = MrfInstance([3], [[4.0, -2.0, 1.0]], np.zeros((0, 2)), [])
    model = lower_mrf_local_polytope(mrf)
    assert len(model.ilp.variables) == 3 and len(model.ilp.constraints) == 1
    assert optimum(model) == -2.0


def test_local_polytope_matches_labeling_enumeration(rng):
    for _ in range(10):
        mrf = gen.random_mrf(rng, 3, 2, 0.7, values="int")
        native = min(evaluate(mrf, MrfLabeling(x)).objective
                     for x in itertools.product(*(range(c) for c in mrf.label_counts)))
        assert pruned_optimum(lower_mrf_local_polytope(mrf)) == native


def potts(weight, unaries=((0, 0), (0, 0))):
    return MrfInstance([2, 2], unaries, [(0, 1)], [weight * (1 - np.eye(2))])


def test_potts_disagreement_costs_lambda():
    model = lower_mrf_potts_compact(potts(1.0))
    x = encode_solution(model, MrfLabeling((0, 1)))
    assert sum(v for n, v in x.items() if n.startswith("d_")) == 2
    assert evaluate_ilp(model.ilp, x).objective == 1.0


def test_potts_zero_weights_decouple():
    model = lower_mrf_potts_compact(potts(0.0, ((3, 1), (-2, 5))))
    assert optimum(model) == 1 - 2


def test_non_potts_table_rejected():
    mrf = MrfInstance([2, 2], [[0, 0], [0, 0]], [(0, 1)], [[[0, 1], [2, 0]]])
    with pytest.raises(NotPotts):
        lower_mrf_potts_compact(mrf)


def test_potts_matches_local_polytope(rng):
    for _ in range(10):
        mrf = gen.random_mrf(rng, 3, 3, 0.7, values="int", potts=True)
        assert (pruned_optimum(lower_mrf_potts_compact(mrf))
                == pruned_optimum(lower_mrf_local_polytope(mrf)))


# --- multicut and AMWC


def test_triangle_cycle_rows():
    model = lower_multicut(triangle(), 3)
    assert len(model.ilp.variables) == 3
    assert sum(c.id.startswith("cycle_") for c in model.ilp.constraints) == 3
    assert model.exact


def test_triangle_optimum_matches_partitions():
    model = lower_multicut(triangle(), 3)
    assert optimum(model) == -2.0


def test_tree_has_no_cycle_rows():
    tree = MulticutInstance.from_edges([(0, 1, -1.0), (1, 2, 3.0), (1, 3, -0.5)])
    model = lower_multicut(tree, 5)
    assert model.ilp.constraints == ()
    assert optimum(model) == -1.5


def test_chordless_cycles_of_square_with_diagonal():
    edges = [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)]
    cycles, complete = chordless_cycles(4, edges, 4)
    assert sorted(sorted(c) for c in cycles) == [[0, 1, 2], [0, 2, 3]]
    assert complete


def test_short_limit_marks_model_inexact():
    square = MulticutInstance.from_edges([(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, -1.0)])
    model = lower_multicut(square, 3)
    assert not model.exact and model.ilp.constraints == ()
    assert lower_multicut(square, 4).exact


def test_amwc_differing_labels_force_cut():
    inst = AmwcInstance([[0, 5], [5, 0]], set(), [0], [1], [3.0])
    model = lower_amwc(inst, 3)
    best, arg = enumerate_ilp(model.ilp)
    assert best == 3.0 and arg["y_0_1"] == 1


def test_amwc_split_inside_partitionable_class():
    inst = AmwcInstance([[0], [0]], {0}, [0], [1], [-2.0])
    assert optimum(lower_amwc(inst, 3)) == -2.0
    closed = AmwcInstance([[0], [0]], set(), [0], [1], [-2.0])
    assert optimum(lower_amwc(closed, 3)) == 0.0


def test_amwc_matches_native_enumeration(rng):
    for _ in range(5):
        inst = gen.random_amwc(rng, 3, 2, 0.7, values="int")
        native = math.inf
        for labels in itertools.product(range(inst.class_count), repeat=inst.node_count):
            for cut in itertools.product((0, 1), repeat=inst.edge_count):
                rep = evaluate(inst, AmwcSolution(labels, EdgeCutVector(cut)))
                if rep.feasible:
                    native = min(native, rep.objective)
        assert pruned_optimum(lower_amwc(inst, inst.node_count)) == native


# --- matching


def diagonal(quad=None):
    quadratic = [(0, 3, quad)] if quad is not None else []
    return GmInstance.from_lists(2, 2, [(0, 0, 0, -1.0), (1, 0, 1, 0.0), (2, 1, 0, 0.0),
                                        (3, 1, 1, -1.0)], quadratic)


def test_gm_diagonal_optimum():
    assert optimum(lower_gm(diagonal())) == -2.0


def test_gm_quadratic_penalty():
    assert optimum(lower_gm(diagonal(5.0))) == -1.0


def test_gm_empty():
    model = lower_gm(GmInstance.from_lists(2, 2, [], []))
    assert model.ilp.variables == () and optimum(model) == 0.0


def unit_mgm(c02=-1.0):
    one = lambda c: GmInstance.from_lists(1, 1, [(0, 0, 0, c)], [])
    return MgmInstance((1, 1, 1), {(0, 1): one(-1.0), (0, 2): one(c02), (1, 2): one(-1.0)})


def test_mgm_all_free_matches():
    assert optimum(lower_mgm(unit_mgm())) == -3.0


def test_mgm_expensive_closing_match():
    assert optimum(lower_mgm(unit_mgm(10.0))) == -1.0


def test_mgm_two_graphs_equals_gm():
    gm = diagonal(0.5)
    a, b = lower_mgm(MgmInstance((2, 2), {(0, 1): gm})), lower_gm(gm)
    assert not any(c.id.startswith("trans_") for c in a.ilp.constraints)
    assert optimum(a) == optimum(b)
    assert len(a.ilp.constraints) == len(b.ilp.constraints)


def test_transitivity_covers_every_orientation():
    triples = list(transitivity_triples(unit_mgm()))
    # one row per composed pair for each of the three orientations of (0,1,2)
    assert len(triples) == 3


# --- cell tracking and tomography


def test_cell_tracking_chain_optimum():
    inst = CellTrackingInstance([(0, 1, -1.0), (1, 2, -1.0)], {1: 0.0}, {2: 0.0},
                                [(10, 1, 2, -1.0)])
    best, arg = enumerate_ilp(lower_cell_tracking(inst).ilp)
    assert best == -3.0
    assert arg["det_1"] == arg["det_2"] == arg["move_10"] == arg["app_1"] == arg["disapp_2"] == 1


def test_division_into_conflicting_children_is_never_active():
    inst = CellTrackingInstance([(0, 1, 0.0), (1, 2, -5.0), (1, 3, -5.0)],
                                {1: 0.0, 2: 0.0, 3: 0.0}, {1: 0.0, 2: 0.0, 3: 0.0},
                                divisions=[(20, 1, 2, 3, -10.0)], exclusions=[(2, 3)])
    model = lower_cell_tracking(inst)
    names = model.ilp.variables
    for bits in itertools.product((0, 1), repeat=len(names)):
        x = dict(zip(names, bits))
        if x["div_20"] and evaluate_ilp(model.ilp, x).feasible:
            pytest.fail("division active in a feasible assignment")


def test_empty_cell_tracking():
    model = lower_cell_tracking(CellTrackingInstance(()))
    assert model.ilp.variables == () and optimum(model) == 0.0


def hard(nodes, target, length):
    costs = np.full(length, np.inf)
    costs[target] = 0.0
    return Projection(nodes, costs)


def test_tomography_single_node_forced():
    base = MrfInstance([3], [[0, 0, 0]], np.zeros((0, 2)), [])
    model = lower_tomography(TomographyInstance(base, (hard((0,), 2, 3),)))
    best, arg = enumerate_ilp(model.ilp)
    assert arg["mu_0_2"] == 1


def test_tomography_two_optimal_labelings():
    base = MrfInstance([2, 2], [[0, 0], [0, 0]], np.zeros((0, 2)), [])
    model = lower_tomography(TomographyInstance(base, (hard((0, 1), 1, 3),)))
    names = model.ilp.variables
    feasible = [decode_solution(model, dict(zip(names, bits))).labels
                for bits in itertools.product((0, 1), repeat=len(names))
                if evaluate_ilp(model.ilp, dict(zip(names, bits))).feasible]
    assert sorted(feasible) == [(0, 1), (1, 0)]


def test_soft_projection_rejected():
    base = MrfInstance([3], [[0, 0, 0]], np.zeros((0, 2)), [])
    with pytest.raises(GeneralProjection):
        lower_tomography(TomographyInstance(base, (Projection((0,), [0, 1, 0]),)))


# --- encode / decode


def test_encode_mrf_labeling():
    model = lower_mrf_local_polytope(chain())
    x = encode_solution(model, MrfLabeling((0, 1)))
    assert {n for n, v in x.items() if v} == {"mu_0_0", "mu_1_1", "mu_0_1_0_1"}
    assert decode_solution(model, x) == MrfLabeling((0, 1))


def test_encode_triangle_partition():
    model = lower_multicut(triangle(), 3)
    x = encode_solution(model, Partition((0, 1, 0)))
    assert [x["y_0_1"], x["y_1_2"], x["y_0_2"]] == [1, 1, 0]
    assert decode_solution(model, x) == Partition((0, 1, 0))


def test_encode_gm_products():
    model = lower_gm(diagonal(5.0))
    x = encode_solution(model, GmSolution(frozenset({0, 3})))
    assert x["z_0"] == 1
    x = encode_solution(model, GmSolution(frozenset({0})))
    assert x["z_0"] == 0
    assert decode_solution(model, x) == GmSolution(frozenset({0}))


def test_decode_cut_reports_mismatch():
    model = lower_multicut(triangle(), 3)
    # y = (1,0,1) cuts off node 0 and is a valid cut
    _, consistent = decode_cut(model, {"y_0_1": 1, "y_1_2": 0, "y_0_2": 1})
    assert consistent
    # y = (1,0,0) leaves one component with a cut edge inside
    part, consistent = decode_cut(model, {"y_0_1": 1, "y_1_2": 0, "y_0_2": 0})
    assert not consistent and part == Partition((0, 0, 0))
    with pytest.raises(InconsistentIndicators):
        decode_solution(model, {"y_0_1": 1, "y_1_2": 0, "y_0_2": 0})


def test_decode_rejects_empty_simplex():
    model = lower_mrf_local_polytope(chain())
    with pytest.raises(InconsistentIndicators):
        decode_solution(model, [0] * len(model.ilp.variables))


def test_encode_rejects_infeasible():
    model = lower_gm(diagonal())
    with pytest.raises(InfeasibleSolution):
        encode_solution(model, GmSolution(frozenset({0, 1})))


def test_infinite_cost_becomes_forbidding_row():
    mrf = MrfInstance([2], [[math.inf, 1.0]], np.zeros((0, 2)), [])
    model = lower_mrf_local_polytope(mrf)
    assert any(c.id == "forbid_mu_0_0" for c in model.ilp.constraints)
    assert optimum(model) == 1.0


def test_objective_consistency_and_determinism(rng):
    for maker in (lambda: gen.random_mrf(rng, 3, 3),
                  lambda: gen.random_gm(rng, 3, 3),
                  lambda: gen.random_cell_tracking(rng, 3, 2)):
        inst = maker()
        model = lower(inst, 5)
        assert serialize(lower(inst, 5).ilp) == serialize(model.ilp)
        names = model.ilp.variables
        for bits in itertools.islice(itertools.product((0, 1), repeat=len(names)), 4096):
            x = dict(zip(names, bits))
            rep = evaluate_ilp(model.ilp, x)
            if not rep.feasible:
                continue
            native = evaluate(inst, decode_solution(model, x))
            assert native.feasible
            assert math.isclose(native.objective, rep.objective + model.objective_offset,
                                rel_tol=1e-9, abs_tol=1e-9)

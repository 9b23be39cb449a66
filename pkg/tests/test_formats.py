import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from structpred import generate as gen
from structpred.formats import (ParseError, decode_shape_variable, detect_format,
                                encode_shape_variable, format_float, parse, parse_amwc,
                                parse_bottleneck_mrf, parse_cell_tracking, parse_gm, parse_lp,
                                parse_mgm, parse_multicut, parse_shape_filename, parse_solution,
                                parse_tomography, parse_uai_mrf, serialize, serialize_solution)
from structpred.model import (AmwcSolution, CellTrackingSolution, EdgeCutVector, GmSolution,
                              MrfLabeling, MulticutInstance, Partition, TriangleProduct)

TWO_NODES = "MARKOV\n2\n2 2\n2\n1 0\n1 1\n\n2\n0 0\n2\n0 0\n"
CHAIN = "MARKOV\n2\n2 2\n3\n1 0\n1 1\n2 0 1\n\n2\n0 0\n2\n0 0\n4\n0 0 0 0\n"
GM_SMALL = "p 2 2 2 1\na 1 0 0 -1\na 2 1 1 -1\ne 1 2 0.5\n"
AMWC_SMALL = ("ASYMMETRIC MULTIWAY CUT\nPARTITIONABLE CLASSES\n0\nNODE COSTS\n"
              "1 2\n3 4\nEDGE COSTS\n0 1 -1\n")
LP_SMALL = "Minimize\n 2 x + y\nSubject to\nc1: x + y <= 1\nBounds\nBinaries\nx\ny\nEnd\n"


def location(exc_info):
    e = exc_info.value
    return e.line, e.column


# --- MRF family


def test_uai_single_node():
    mrf = parse_uai_mrf("MARKOV\n1\n2\n1\n1 0\n\n2\n0.5 1.5")
    assert mrf.node_count == 1 and list(mrf.label_counts) == [2]
    assert list(mrf.unaries[0]) == [0.5, 1.5]


def test_uai_zero_tables():
    mrf = parse_uai_mrf(CHAIN)
    assert mrf.edge_count == 1
    assert not mrf.pairwise[0].any() and not any(t.any() for t in mrf.unaries)


def test_uai_short_table_points_at_its_size():
    text = "MARKOV\n2\n2 2\n3\n1 0\n1 1\n2 0 1\n\n2\n0 0\n2\n0 0\n4\n0 0 0\n"
    with pytest.raises(ParseError, match="4 entries but only 3") as info:
        parse_uai_mrf(text)
    assert location(info) == (13, 1)


def test_uai_reversed_edge_is_transposed():
    text = "MARKOV\n2\n2 3\n3\n1 0\n1 1\n2 1 0\n\n2\n0 0\n3\n0 0 0\n6\n1 2 3 4 5 6\n"
    mrf = parse_uai_mrf(text)
    assert mrf.edges.tolist() == [[0, 1]]
    assert mrf.pairwise[0].tolist() == [[1, 3, 5], [2, 4, 6]]


@pytest.mark.parametrize("text, where, msg", [
    ("MRF\n1\n2\n1\n1 0\n2\n0 0\n", (1, 1), "MARKOV"),
    ("MARKOV\n1\n2\n1\n3 0 0 0\n2\n0 0\n", (5, 1), "arity"),
    ("MARKOV\n1\n2\n1\n1 4\n2\n0 0\n", (5, 3), "out of range"),
    ("MARKOV\n1\n2\n1\n1 0\n3\n0 0 0\n", (6, 1), "expected 2"),
    ("MARKOV\n1\n2\n1\n1 0\n2\n0 x\n", (7, 3), None),
])
def test_uai_errors(text, where, msg):
    with pytest.raises(ParseError, match=msg) as info:
        parse_uai_mrf(text)
    assert location(info) == where


def test_bottleneck_with_same_shape():
    inst = parse_bottleneck_mrf(CHAIN + "MAX-POTENTIALS\n" + CHAIN[len("MARKOV\n"):])
    assert inst.base.same_structure(inst.bottleneck)


def test_bottleneck_shape_mismatch():
    with pytest.raises(ParseError, match="different structure"):
        parse_bottleneck_mrf(CHAIN + "MAX-POTENTIALS\n" + TWO_NODES[len("MARKOV\n"):])


def test_tomography_projection():
    inst = parse_tomography(TWO_NODES + "PROJECTIONS\n0 + 1 = (Inf,0,Inf)\n")
    (proj,) = inst.projections
    assert proj.nodes == (0, 1)
    assert proj.costs[0] == math.inf and proj.costs[1] == 0 and proj.target() == 1


def test_tomography_unconstraining_projection():
    inst = parse_tomography("MARKOV\n1\n3\n1\n1 0\n3\n0 0 0\nPROJECTIONS\n0 = (0,0,0)\n")
    assert inst.projections[0].costs.tolist() == [0, 0, 0]


def test_tomography_wrong_vector_length():
    with pytest.raises(ParseError, match="expected 3") as info:
        parse_tomography(TWO_NODES + "PROJECTIONS\n0 + 1 = (Inf,0)\n")
    assert info.value.line == 13


def test_tomography_node_out_of_range():
    with pytest.raises(ParseError, match="out of range"):
        parse_tomography(TWO_NODES + "PROJECTIONS\n0 + 2 = (Inf,0,Inf)\n")


# --- multicut and AMWC


def test_multicut_single_edge():
    mc = parse_multicut("MULTICUT\n0 1 -1.5")
    assert mc.node_count == 2 and mc.edges == [(0, 1, -1.5)]


def test_multicut_empty():
    assert parse_multicut("MULTICUT\n").node_count == 0


def test_multicut_missing_cost():
    with pytest.raises(ParseError) as info:
        parse_multicut("MULTICUT\n0 1")
    assert location(info) == (2, 1)


def test_multicut_duplicate_edge_and_merge():
    text = "MULTICUT\n0 1 1\n1 0 2.5\n"
    with pytest.raises(ParseError, match="duplicate") as info:
        parse_multicut(text)
    assert info.value.line == 3
    merged = parse_multicut(text, merge_duplicates=True)
    assert merged.edges == [(0, 1, 3.5)]


def test_multicut_writer_layout():
    mc = MulticutInstance.from_edges([(0, 1, -1.5)])
    assert serialize(mc) == "MULTICUT\n0 1 -1.5\n"


def test_amwc_sections():
    inst = parse_amwc(AMWC_SMALL)
    assert inst.class_count == 2 and inst.partitionable == frozenset({0})
    assert inst.node_costs.tolist() == [[1, 2], [3, 4]]


def test_amwc_empty_partitionable_line():
    inst = parse_amwc(AMWC_SMALL.replace("CLASSES\n0\n", "CLASSES\n\n"))
    assert inst.partitionable == frozenset()


def test_amwc_ragged_rows():
    with pytest.raises(ParseError, match="expected 2") as info:
        parse_amwc(AMWC_SMALL.replace("3 4", "3 4 5"))
    assert info.value.line == 6


# --- graph matching


def test_gm_small():
    gm = parse_gm(GM_SMALL)
    assert gm.assignment_count == 2 and len(gm.quad_costs) == 1


def test_gm_linear_only():
    gm = parse_gm("p 2 2 2 0\na 1 0 0 -1\na 2 1 1 -1\n")
    assert len(gm.quad_costs) == 0


def test_gm_dangling_reference():
    with pytest.raises(ParseError, match="unknown assignment id 3") as info:
        parse_gm(GM_SMALL.replace("e 1 2", "e 1 3"))
    assert info.value.line == 4


def test_gm_count_mismatch():
    with pytest.raises(ParseError):
        parse_gm("p 2 2 3 0\na 1 0 0 -1\na 2 1 1 -1\n")


def block(p, k, n1, n2):
    return f"gm {p} {k}\np {n1} {n2} 1 0\na 0 0 0 -1\n"


def test_mgm_three_graphs():
    inst = parse_mgm(block(0, 1, 1, 1) + block(0, 2, 1, 1) + block(1, 2, 1, 1))
    assert inst.graph_count == 3 and sorted(inst.pairs) == [(0, 1), (0, 2), (1, 2)]


def test_mgm_single_block():
    inst = parse_mgm(block(0, 1, 1, 1))
    assert inst.graph_count == 2 and list(inst.pairs) == [(0, 1)]


def test_mgm_size_conflict():
    with pytest.raises(ParseError, match="size 4") as info:
        parse_mgm(block(0, 1, 3, 1) + block(0, 2, 4, 1))
    assert info.value.line == 5


# --- cell tracking


def test_cell_tracking_records():
    inst = parse_cell_tracking("H 0 1 -2\nH 1 2 -2\nMOVE 10 1 2 0.5\n")
    assert len(inst.detections) == 2 and inst.moves[0].id == 10


def test_cell_tracking_confset():
    inst = parse_cell_tracking("# two hypotheses\nH 0 1 0\nH 0 2 0\nCONFSET 1 + 2 <= 1\n")
    assert inst.exclusions == ((1, 2),)


def test_cell_tracking_repeated_child():
    with pytest.raises(ParseError, match="repeats child") as info:
        parse_cell_tracking("H 0 1 0\nH 1 2 0\nDIV 20 1 2 2 0\n")
    assert info.value.line == 3


# --- LP


def test_lp_small():
    ilp = parse_lp(LP_SMALL)
    assert ilp.variables == ("x", "y") and len(ilp.constraints) == 1
    assert dict(ilp.objective) == {"x": 2.0, "y": 1.0}


def test_lp_repeated_variable_summed():
    ilp = parse_lp("Minimize\n x + x\nSubject to\nBinaries\nx\nEnd\n")
    assert dict(ilp.objective) == {"x": 2.0}


def test_lp_undeclared_variable():
    with pytest.raises(ParseError, match="'z'") as info:
        parse_lp(LP_SMALL.replace("c1: x + y", "c1: x + z"))
    assert location(info) == (4, 9)


def test_lp_round_trip_of_example():
    ilp = parse_lp(LP_SMALL)
    assert parse_lp(serialize(ilp)) == ilp


def test_lp_long_rows_wrap_and_reparse():
    names = [f"v{i}" for i in range(300)]
    from structpred.model import IlpInstance
    ilp = IlpInstance(tuple(names), {n: 1.5 for n in names},
                      (("big", {n: -2.25 for n in names}, ">=", -3),))
    text = serialize(ilp)
    assert max(len(line) for line in text.splitlines()) <= 260
    assert parse_lp(text) == ilp


# --- shape matching names


def test_shape_variable_names():
    assert decode_shape_variable("x_1_2_3__4_5_6") == TriangleProduct(1, 2, 3, 4, 5, 6)
    assert decode_shape_variable("x_0_0_0__0_0_0") == TriangleProduct(0, 0, 0, 0, 0, 0)
    assert encode_shape_variable(TriangleProduct(1, 2, 3, 4, 5, 6)) == "x_1_2_3__4_5_6"
    with pytest.raises(ValueError):
        decode_shape_variable("y_1_2")


def test_shape_filenames():
    meta = parse_shape_filename("200000_9000_cat_100_cat_100.lp")
    assert (meta.binvar_count, meta.constraint_count) == (200000, 9000)
    assert not meta.partial and not meta.noniso
    assert parse_shape_filename("200000_9000_cat_100_dog_90_noniso.lp").noniso
    with pytest.raises(ValueError):
        parse_shape_filename("readme.txt")


# --- detection, floats, solutions


@pytest.mark.parametrize("text, tag", [
    ("MULTICUT\n0 1 1\n", "multicut"),
    (TWO_NODES + "PROJECTIONS\n0 + 1 = (Inf,0,Inf)\n", "tomography"),
    (CHAIN + "MAX-POTENTIALS\n" + CHAIN[7:], "bottleneck"),
    (CHAIN, "mrf"),
    (LP_SMALL, "lp"),
    (AMWC_SMALL, "amwc"),
    (GM_SMALL, "gm"),
    (block(0, 1, 1, 1), "mgm"),
    ("H 0 1 0\n", "celltracking"),
    ("# comment\nH 0 1 0\n", "celltracking"),
    ("hello\n", "ambiguous"),
])
def test_detect_format(text, tag):
    assert detect_format(text) == tag


@pytest.mark.parametrize("value, text", [
    (2.0, "2"), (-1.5, "-1.5"), (0.1, "0.1"), (math.inf, "Inf"), (-math.inf, "-Inf"),
    (1e20, "1e+20"), (-0.0, "-0.0"),
])
def test_format_float(value, text):
    assert format_float(value) == text


@given(st.floats(allow_nan=False))
def test_format_float_round_trips(x):
    assert float(format_float(x).replace("Inf", "inf")) == x


@pytest.mark.parametrize("kind, solution", [
    ("mrf", MrfLabeling((0, 2, 1))),
    ("multicut", Partition((0, 1, 0))),
    ("amwc", AmwcSolution((0, 1), EdgeCutVector((1,)))),
    ("gm", GmSolution(frozenset({1, 4}))),
    ("mgm", {(0, 1): GmSolution(frozenset({0})), (1, 2): GmSolution(frozenset({3, 5}))}),
    ("celltracking", CellTrackingSolution({1, 2}, {1}, {2}, {10}, set())),
    ("lp", {"x": 1, "b.c": 0}),
])
def test_solution_round_trip(kind, solution):
    assert parse_solution(kind, serialize_solution(solution)) == solution


def test_solution_bad_token_located():
    with pytest.raises(ParseError) as info:
        parse_solution("gm", "1\nx\n")
    assert info.value.line == 2


def test_parse_accepts_file_objects_and_crlf():
    text = "MULTICUT\r\n0 1 -1\r\n1 2 2\r\n"
    assert parse(io.StringIO(text, newline=""), "multicut") == parse_multicut(text.replace("\r", ""))


# --- randomized round trips

GENERATORS = {
    "mrf": lambda r: gen.random_mrf(r, int(r.integers(1, 6)), 4, 0.5),
    "bottleneck": lambda r: gen.random_bottleneck(r, int(r.integers(1, 5)), 3, 0.5),
    "tomography": lambda r: gen.random_tomography(r, int(r.integers(1, 5)), 3, 2, hard=bool(r.random() < 0.5)),
    "multicut": lambda r: gen.random_multicut(r, int(r.integers(2, 8)), 0.5),
    "amwc": lambda r: gen.random_amwc(r, int(r.integers(2, 6)), int(r.integers(1, 4))),
    "gm": lambda r: gen.random_gm(r, int(r.integers(1, 4)), int(r.integers(1, 4))),
    "mgm": lambda r: gen.random_mgm(r, int(r.integers(2, 5)), 3),
    "celltracking": lambda r: gen.random_cell_tracking(r, int(r.integers(1, 4)), 3),
    "lp": lambda r: gen.random_ilp(r, int(r.integers(1, 8)), int(r.integers(0, 5))),
}


@pytest.mark.parametrize("fmt", sorted(GENERATORS))
@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_round_trip(fmt, seed):
    inst = GENERATORS[fmt](np.random.default_rng(seed))
    text = serialize(inst)
    once = parse(text, fmt)
    assert once == inst
    assert serialize(once) == text
    assert detect_format(text) == fmt

"""Readers and writers for the archive's text formats.

Every parser accepts either a string or an iterable of lines (an open file)
and reads it in a single pass.  Writers produce LF-terminated text that
parses back to an equal instance.
"""
from __future__ import annotations

import io
import math
import re
from array import array
from dataclasses import dataclass
from typing import IO, Iterable, Iterator

import numpy as np

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
    InvalidInstance,
    MgmInstance,
    MrfInstance,
    MrfLabeling,
    MulticutInstance,
    Partition,
    Projection,
    TomographyInstance,
    TriangleProduct,
)

FORMATS = ("mrf", "bottleneck", "tomography", "multicut", "amwc", "gm", "mgm",
           "celltracking", "lp")


class ParseError(ValueError):
    def __init__(self, message, line=None, column=None, offset=None, fmt=None):
        self.message = message
        self.line = line
        self.column = column
        self.offset = offset
        self.fmt = fmt
        where = f"line {line}" if line is not None else "end of input"
        if column is not None:
            where += f", column {column}"
        super().__init__(f"{fmt or 'input'}: {where}: {message}")


# ---------------------------------------------------------------------------
# low-level reading


def _raw_lines(source) -> Iterator[str]:
    if isinstance(source, str):
        source = io.StringIO(source)
    for line in source:
        if isinstance(line, bytes):
            line = line.decode("utf-8")
        yield line


def _lines(source) -> Iterator[tuple[int, int, str]]:
    """Yield ``(line number, byte offset, text)`` with line endings stripped."""
    offset = 0
    for lineno, raw in enumerate(_raw_lines(source), start=1):
        yield lineno, offset, raw.rstrip("\r\n")
        offset += len(raw.encode("utf-8")) if not raw.isascii() else len(raw)


class _Token(str):
    line: int
    column: int
    offset: int


_WORD = re.compile(r"\S+")


def _tokens(source) -> Iterator[_Token]:
    for lineno, offset, text in _lines(source):
        for m in _WORD.finditer(text):
            tok = _Token(m.group())
            tok.line = lineno
            tok.column = m.start() + 1
            tok.offset = offset + m.start()
            yield tok


class _TokenReader:
    def __init__(self, source, fmt):
        self._it = _tokens(source)
        self._peeked = None
        self.fmt = fmt
        self.last_line = 0

    def peek(self):
        if self._peeked is None:
            self._peeked = next(self._it, None)
        return self._peeked

    def next(self, what="token"):
        tok = self.peek()
        if tok is None:
            raise ParseError(f"unexpected end of input, expected {what}", fmt=self.fmt)
        self._peeked = None
        self.last_line = tok.line
        return tok

    def error(self, message, tok=None):
        if tok is None:
            return ParseError(message, line=self.last_line or None, fmt=self.fmt)
        return ParseError(message, tok.line, tok.column, tok.offset, self.fmt)

    def int(self, what="integer", minimum=None):
        tok = self.next(what)
        try:
            value = int(tok)
        except ValueError:
            raise self.error(f"expected {what}, got {tok!r}", tok) from None
        if minimum is not None and value < minimum:
            raise self.error(f"{what} must be >= {minimum}, got {value}", tok)
        return value

    def float(self, what="number"):
        tok = self.next(what)
        try:
            return _parse_float(tok)
        except ValueError:
            raise self.error(f"expected {what}, got {tok!r}", tok) from None


def _parse_float(text: str) -> float:
    value = float(text)
    if math.isnan(value):
        raise ValueError(text)
    return value


def _error_at(fmt, lineno, offset, message, column=1):
    return ParseError(message, lineno, column, offset + column - 1, fmt)


def format_float(value: float) -> str:
    """Shortest text that parses back to exactly ``value``."""
    value = float(value)
    if math.isinf(value):
        return "Inf" if value > 0 else "-Inf"
    if value.is_integer() and abs(value) < 1e16 and not (value == 0 and math.copysign(1, value) < 0):
        return str(int(value))
    return repr(value)


# ---------------------------------------------------------------------------
# UAI Markov random fields


def _read_uai_block(reader: _TokenReader, lenient: bool) -> MrfInstance:
    n = reader.int("number of variables", minimum=0)
    label_counts = [reader.int(f"label count of variable {v}", minimum=1) for v in range(n)]
    count_tok = reader.peek()
    count = reader.int("number of potentials", minimum=0)
    unary_slots: dict[int, int] = {}
    edges: list[tuple[int, int]] = []
    order: list[tuple[str, int]] = []
    seen_pair = False
    for _ in range(count):
        arity_tok = reader.peek()
        arity = reader.int("potential arity")
        if arity == 1:
            vtok = reader.peek()
            v = reader.int("variable index")
            if not 0 <= v < n:
                raise reader.error(f"variable index {v} out of range 0..{n - 1}", vtok)
            if seen_pair and not lenient:
                raise reader.error("unary index lines must precede pairwise ones", arity_tok)
            if v in unary_slots:
                raise reader.error(f"variable {v} has two unary potentials", vtok)
            unary_slots[v] = len(order)
            order.append(("unary", v))
        elif arity == 2:
            seen_pair = True
            utok = reader.peek()
            u = reader.int("variable index")
            v = reader.int("variable index")
            for w in (u, v):
                if not 0 <= w < n:
                    raise reader.error(f"variable index {w} out of range 0..{n - 1}", utok)
            if u == v:
                raise reader.error(f"pairwise potential on a single variable {u}", utok)
            order.append(("pair", len(edges)))
            edges.append((u, v))
        else:
            raise reader.error(f"arity must be 1 or 2, got {arity}", arity_tok)
    if len(unary_slots) != n:
        raise reader.error(
            f"declared {count} potentials but only {len(unary_slots)} unary potentials "
            f"for {n} variables", count_tok)
    unaries: list = [None] * n
    pairwise: list = [None] * len(edges)
    for kind, idx in order:
        size_tok = reader.peek()
        size = reader.int("table size", minimum=0)
        if kind == "unary":
            expected = label_counts[idx]
        else:
            u, v = edges[idx]
            expected = label_counts[u] * label_counts[v]
        if size != expected:
            raise reader.error(f"table declares {size} entries, expected {expected}", size_tok)
        values = np.empty(size)
        for k in range(size):
            if reader.peek() is None:
                raise reader.error(f"table declares {size} entries but only {k} are present",
                                   size_tok)
            values[k] = reader.float("table entry")
        if kind == "unary":
            unaries[idx] = values
        else:
            u, v = edges[idx]
            table = values.reshape(label_counts[u], label_counts[v])
            if u > v:
                table = table.T
            pairwise[idx] = table
    norm_edges = [(min(u, v), max(u, v)) for u, v in edges]
    if len(set(norm_edges)) != len(norm_edges):
        raise reader.error("duplicate pairwise potential")
    try:
        return MrfInstance(label_counts, unaries, np.array(norm_edges, dtype=np.int64).reshape(-1, 2),
                           pairwise)
    except InvalidInstance as exc:
        raise reader.error(str(exc)) from None


def _expect_keyword(reader: _TokenReader, keyword: str):
    tok = reader.peek()
    if tok is None or tok != keyword:
        if tok is None:
            raise reader.error(f"missing {keyword} section")
        raise reader.error(f"expected {keyword!r}, got {tok!r}", tok)
    reader.next()


def _expect_end(reader: _TokenReader):
    tok = reader.peek()
    if tok is not None:
        raise reader.error(f"unexpected trailing content {tok!r}", tok)


def parse_uai_mrf(source, lenient: bool = False) -> MrfInstance:
    """Parse a MARKOV (UAI) pairwise model.

    With ``lenient`` the unary and pairwise index lines may be interleaved.
    """
    reader = _TokenReader(source, "mrf")
    _expect_keyword(reader, "MARKOV")
    mrf = _read_uai_block(reader, lenient)
    _expect_end(reader)
    return mrf


def parse_bottleneck_mrf(source, lenient: bool = False) -> BottleneckMrfInstance:
    reader = _TokenReader(source, "bottleneck")
    _expect_keyword(reader, "MARKOV")
    base = _read_uai_block(reader, lenient)
    _expect_keyword(reader, "MAX-POTENTIALS")
    if reader.peek() == "MARKOV":
        reader.next()
    start = reader.peek()
    psi = _read_uai_block(reader, lenient)
    _expect_end(reader)
    if not base.same_structure(psi):
        raise reader.error("MAX-POTENTIALS block has a different structure than the MARKOV block",
                           start)
    return BottleneckMrfInstance(base, psi)


def parse_tomography(source, lenient: bool = False) -> TomographyInstance:
    reader = _TokenReader(source, "tomography")
    _expect_keyword(reader, "MARKOV")
    base = _read_uai_block(reader, lenient)
    counts = base.label_counts
    if len(counts) and np.any(counts != counts[0]):
        raise reader.error("tomography requires the same label count on every variable")
    k = int(counts[0]) if len(counts) else 1
    _expect_keyword(reader, "PROJECTIONS")
    projections = []
    while reader.peek() is not None:
        first = reader.peek()
        nodes: list[int] = []
        while True:
            tok = reader.next("'='")
            if tok == "=":
                break
            for part in tok.split("+"):
                if not part:
                    continue
                try:
                    v = int(part)
                except ValueError:
                    raise reader.error(f"expected variable index, got {part!r}", tok) from None
                if not 0 <= v < base.node_count:
                    raise reader.error(f"variable index {v} out of range", tok)
                nodes.append(v)
        if not nodes:
            raise reader.error("projection without variables", first)
        if len(set(nodes)) != len(nodes):
            raise reader.error("projection repeats a variable", first)
        vec_tok = reader.peek()
        pieces = []
        while True:
            tok = reader.next("')'")
            pieces.append(str(tok))
            if tok.endswith(")"):
                break
        text = "".join(pieces)
        if not text.startswith("("):
            raise reader.error(f"expected '(' to start the cost vector, got {text!r}", vec_tok)
        try:
            costs = [_parse_float(x) for x in text[1:-1].split(",") if x]
        except ValueError:
            raise reader.error(f"malformed cost vector {text!r}", vec_tok) from None
        expected = (k - 1) * len(nodes) + 1
        if len(costs) != expected:
            raise reader.error(f"cost vector has {len(costs)} entries, expected {expected}", vec_tok)
        projections.append(Projection(tuple(nodes), np.array(costs)))
    return TomographyInstance(base, tuple(projections))


def _iter_uai_block(mrf: MrfInstance) -> Iterator[str]:
    yield f"{mrf.node_count}\n"
    yield " ".join(str(int(c)) for c in mrf.label_counts) + "\n"
    yield f"{mrf.node_count + mrf.edge_count}\n"
    for v in range(mrf.node_count):
        yield f"1 {v}\n"
    for u, v in mrf.edges.tolist():
        yield f"2 {u} {v}\n"
    yield "\n"
    for table in mrf.unaries:
        yield f"{table.size}\n" + " ".join(format_float(x) for x in table.tolist()) + "\n"
    if mrf.edge_count:
        yield "\n"
    for table in mrf.pairwise:
        yield (f"{table.size}\n"
               + " ".join(format_float(x) for x in table.reshape(-1).tolist()) + "\n")


def _iter_mrf(mrf: MrfInstance):
    yield "MARKOV\n"
    yield from _iter_uai_block(mrf)


def _iter_bottleneck(inst: BottleneckMrfInstance):
    yield "MARKOV\n"
    yield from _iter_uai_block(inst.base)
    yield "\nMAX-POTENTIALS\n"
    yield from _iter_uai_block(inst.bottleneck)


def _iter_tomography(inst: TomographyInstance):
    yield "MARKOV\n"
    yield from _iter_uai_block(inst.base)
    yield "\nPROJECTIONS\n"
    for p in inst.projections:
        lhs = " + ".join(str(v) for v in p.nodes)
        rhs = ",".join(format_float(x) for x in p.costs.tolist())
        yield f"{lhs} = ({rhs})\n"


# ---------------------------------------------------------------------------
# Multicut


def _content_lines(source, comment=None):
    for lineno, offset, text in _lines(source):
        stripped = text.strip()
        if not stripped:
            continue
        if comment is not None and stripped.startswith(comment):
            continue
        yield lineno, offset, text


def _read_edge_line(fmt, lineno, offset, text, out_src, out_dst, out_cost):
    parts = text.split()
    if len(parts) != 3:
        raise _error_at(fmt, lineno, offset,
                        f"expected 'i j cost', got {len(parts)} token(s)")
    try:
        i, j = int(parts[0]), int(parts[1])
    except ValueError:
        raise _error_at(fmt, lineno, offset, f"malformed node index in {text.strip()!r}") from None
    try:
        c = _parse_float(parts[2])
    except ValueError:
        raise _error_at(fmt, lineno, offset, f"malformed cost {parts[2]!r}") from None
    if i < 0 or j < 0:
        raise _error_at(fmt, lineno, offset, "node indices must be nonnegative")
    if i == j:
        raise _error_at(fmt, lineno, offset, f"self-loop on node {i}")
    out_src.append(i)
    out_dst.append(j)
    out_cost.append(c)


def _merge_duplicate_edges(src, dst, cost):
    merged: dict[tuple[int, int], int] = {}
    s2, d2, c2 = array("q"), array("q"), array("d")
    for i, j, c in zip(src, dst, cost):
        key = (min(i, j), max(i, j))
        if key in merged:
            c2[merged[key]] += c
        else:
            merged[key] = len(c2)
            s2.append(i)
            d2.append(j)
            c2.append(c)
    return s2, d2, c2


def parse_multicut(source, merge_duplicates: bool = False) -> MulticutInstance:
    """Parse a MULTICUT file.

    The node count is one more than the largest endpoint.  Duplicate edges are
    an error unless ``merge_duplicates`` is set, in which case costs are summed.
    """
    fmt = "multicut"
    lines = _content_lines(source)
    first = next(lines, None)
    if first is None or first[2].strip() != "MULTICUT":
        raise _error_at(fmt, first[0] if first else None, first[1] if first else None,
                        "missing MULTICUT header")
    src, dst, cost, where = array("q"), array("q"), array("d"), array("q")
    for lineno, offset, text in lines:
        _read_edge_line(fmt, lineno, offset, text, src, dst, cost)
        where.append(lineno)
    if merge_duplicates:
        src, dst, cost = _merge_duplicate_edges(src, dst, cost)
    s = np.frombuffer(src, dtype=np.int64) if len(src) else np.empty(0, np.int64)
    d = np.frombuffer(dst, dtype=np.int64) if len(dst) else np.empty(0, np.int64)
    c = np.frombuffer(cost, dtype=np.float64) if len(cost) else np.empty(0)
    n = int(max(s.max(), d.max()) + 1) if len(s) else 0
    try:
        return MulticutInstance(n, s, d, c)
    except InvalidInstance as exc:
        line = where[exc.element[1]] if exc.element and not merge_duplicates else None
        raise ParseError(str(exc), line, 1 if line else None, None, fmt) from None


def _iter_edges(sources, targets, costs):
    for i, j, c in zip(sources.tolist(), targets.tolist(), costs.tolist()):
        yield f"{i} {j} {format_float(c)}\n"


def _iter_multicut(inst: MulticutInstance):
    yield "MULTICUT\n"
    yield from _iter_edges(inst.sources, inst.targets, inst.costs)


# ---------------------------------------------------------------------------
# Asymmetric multiway cut


def parse_amwc(source) -> AmwcInstance:
    fmt = "amwc"
    lines = _lines(source)
    section = None
    header_seen = False
    partitionable: list[int] = []
    part_line = None
    rows: list[list[float]] = []
    src, dst, cost, where = array("q"), array("q"), array("d"), array("q")
    width = None
    last = (None, None)
    for lineno, offset, text in lines:
        last = (lineno, offset)
        stripped = text.strip()
        if not header_seen:
            if not stripped:
                continue
            if stripped != "ASYMMETRIC MULTIWAY CUT":
                raise _error_at(fmt, lineno, offset, "missing ASYMMETRIC MULTIWAY CUT header")
            header_seen = True
            continue
        if stripped in ("PARTITIONABLE CLASSES", "NODE COSTS", "EDGE COSTS"):
            expected = {None: "PARTITIONABLE CLASSES", "partitionable": "NODE COSTS",
                        "nodes": "EDGE COSTS"}.get(section)
            if stripped != expected:
                raise _error_at(fmt, lineno, offset,
                                f"section {stripped!r} out of order, expected {expected!r}")
            section = {"PARTITIONABLE CLASSES": "partitionable", "NODE COSTS": "nodes",
                       "EDGE COSTS": "edges"}[stripped]
            continue
        if not stripped:
            continue
        if section is None:
            raise _error_at(fmt, lineno, offset, "content before PARTITIONABLE CLASSES")
        if section == "partitionable":
            part_line = (lineno, offset)
            try:
                partitionable.extend(int(x) for x in stripped.split())
            except ValueError:
                raise _error_at(fmt, lineno, offset, "malformed partitionable class id") from None
        elif section == "nodes":
            try:
                row = [_parse_float(x) for x in stripped.split()]
            except ValueError:
                raise _error_at(fmt, lineno, offset, "malformed node cost") from None
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise _error_at(fmt, lineno, offset,
                                f"node cost row has {len(row)} entries, expected {width}")
            rows.append(row)
        else:
            _read_edge_line(fmt, lineno, offset, text, src, dst, cost)
            where.append(lineno)
    if not header_seen:
        raise ParseError("missing ASYMMETRIC MULTIWAY CUT header", fmt=fmt)
    if section != "edges":
        missing = {None: "PARTITIONABLE CLASSES", "partitionable": "NODE COSTS",
                   "nodes": "EDGE COSTS"}[section]
        raise _error_at(fmt, *last, f"missing {missing} section") if last[0] else \
            ParseError(f"missing {missing} section", fmt=fmt)
    k = width or 0
    for p in partitionable:
        if not 0 <= p < k:
            raise _error_at(fmt, *part_line, f"partitionable class {p} is not in 0..{k - 1}")
    if len(set(partitionable)) != len(partitionable):
        raise _error_at(fmt, *part_line, "partitionable class listed twice")
    node_costs = np.array(rows, dtype=np.float64).reshape(len(rows), k)
    try:
        return AmwcInstance(node_costs, frozenset(partitionable),
                            np.frombuffer(src, np.int64) if len(src) else np.empty(0, np.int64),
                            np.frombuffer(dst, np.int64) if len(dst) else np.empty(0, np.int64),
                            np.frombuffer(cost, np.float64) if len(cost) else np.empty(0))
    except InvalidInstance as exc:
        line = where[exc.element[1]] if exc.element else None
        raise ParseError(str(exc), line, 1 if line else None, None, fmt) from None


def _iter_amwc(inst: AmwcInstance):
    yield "ASYMMETRIC MULTIWAY CUT\n"
    yield "PARTITIONABLE CLASSES\n"
    yield " ".join(str(p) for p in sorted(inst.partitionable)) + "\n"
    yield "\nNODE COSTS\n"
    for row in inst.node_costs.tolist():
        yield " ".join(format_float(x) for x in row) + "\n"
    yield "\nEDGE COSTS\n"
    yield from _iter_edges(inst.sources, inst.targets, inst.costs)


# ---------------------------------------------------------------------------
# Graph matching (dd format) and multi-graph matching


class _GmBodyReader:
    """Incremental reader for one ``p ... / a ... / e ...`` body."""

    def __init__(self, fmt, context=""):
        self.fmt = fmt
        self.context = context
        self.header = None
        self.ids, self.left, self.right, self.costs = array("q"), array("q"), array("q"), array("d")
        self.qa, self.qb, self.qc = array("q"), array("q"), array("d")
        self.known: set[int] = set()
        self.pairs: set[tuple[int, int]] = set()

    def _err(self, lineno, offset, message):
        return _error_at(self.fmt, lineno, offset, self.context + message)

    def feed(self, lineno, offset, parts):
        kind = parts[0]
        if self.header is None:
            if kind != "p":
                raise self._err(lineno, offset, "expected 'p N0 N1 A E' line")
            if len(parts) != 5:
                raise self._err(lineno, offset, "expected 'p N0 N1 A E'")
            try:
                n0, n1, a, e = (int(x) for x in parts[1:])
            except ValueError:
                raise self._err(lineno, offset, "malformed 'p' line") from None
            if min(n0, n1, a, e) < 0:
                raise self._err(lineno, offset, "counts must be nonnegative")
            self.header = (n0, n1, a, e, lineno)
            return
        n0, n1 = self.header[0], self.header[1]
        if kind == "a":
            if len(parts) != 5:
                raise self._err(lineno, offset, "expected 'a id i j cost'")
            try:
                aid, i, j = int(parts[1]), int(parts[2]), int(parts[3])
                c = _parse_float(parts[4])
            except ValueError:
                raise self._err(lineno, offset, "malformed assignment line") from None
            if aid in self.known:
                raise self._err(lineno, offset, f"duplicate assignment id {aid}")
            if not 0 <= i < n0:
                raise self._err(lineno, offset, f"left node {i} out of range 0..{n0 - 1}")
            if not 0 <= j < n1:
                raise self._err(lineno, offset, f"right node {j} out of range 0..{n1 - 1}")
            if (i, j) in self.pairs:
                raise self._err(lineno, offset, f"pair ({i},{j}) listed twice")
            self.known.add(aid)
            self.pairs.add((i, j))
            self.ids.append(aid)
            self.left.append(i)
            self.right.append(j)
            self.costs.append(c)
        elif kind == "e":
            if len(parts) != 4:
                raise self._err(lineno, offset, "expected 'e a1 a2 cost'")
            try:
                a1, a2 = int(parts[1]), int(parts[2])
                d = _parse_float(parts[3])
            except ValueError:
                raise self._err(lineno, offset, "malformed quadratic line") from None
            for ref in (a1, a2):
                if ref not in self.known:
                    raise self._err(lineno, offset, f"unknown assignment id {ref}")
            if a1 == a2:
                raise self._err(lineno, offset, f"quadratic term pairs assignment {a1} with itself")
            self.qa.append(a1)
            self.qb.append(a2)
            self.qc.append(d)
        else:
            raise self._err(lineno, offset, f"unknown record type {kind!r}")

    def finish(self, lineno=None) -> GmInstance:
        if self.header is None:
            raise ParseError(self.context + "missing 'p' line", lineno, fmt=self.fmt)
        n0, n1, a, e, pline = self.header
        if len(self.ids) != a:
            raise ParseError(self.context + f"declared {a} assignments, found {len(self.ids)}",
                             pline, 1, None, self.fmt)
        if len(self.qc) != e:
            raise ParseError(self.context + f"declared {e} quadratic terms, found {len(self.qc)}",
                             pline, 1, None, self.fmt)

        def arr(buf, dtype):
            return np.frombuffer(buf, dtype) if len(buf) else np.empty(0, dtype)

        return GmInstance(n0, n1, arr(self.ids, np.int64), arr(self.left, np.int64),
                          arr(self.right, np.int64), arr(self.costs, np.float64),
                          arr(self.qa, np.int64), arr(self.qb, np.int64),
                          arr(self.qc, np.float64))


def _is_dd_comment(parts):
    return parts[0] == "c" or parts[0].startswith("#")


def parse_gm(source) -> GmInstance:
    body = _GmBodyReader("gm")
    last = None
    for lineno, offset, text in _content_lines(source):
        parts = text.split()
        if _is_dd_comment(parts):
            continue
        last = lineno
        body.feed(lineno, offset, parts)
    return body.finish(last)


def parse_mgm(source) -> MgmInstance:
    fmt = "mgm"
    blocks: dict[tuple[int, int], GmInstance] = {}
    sizes: dict[int, tuple[int, int]] = {}
    current = None
    key = None
    key_line = None

    def close(lineno):
        gm = current.finish(lineno)
        p, k = key
        for idx, n in ((p, gm.left_size), (k, gm.right_size)):
            if idx in sizes and sizes[idx][0] != n:
                raise ParseError(f"point set {idx} has size {n} in block gm {p} {k} but "
                                 f"{sizes[idx][0]} earlier", current.header[4], 1, None, fmt)
            sizes.setdefault(idx, (n, key_line))
        blocks[key] = gm

    last = None
    for lineno, offset, text in _content_lines(source):
        parts = text.split()
        if _is_dd_comment(parts):
            continue
        if parts[0] == "gm":
            if current is not None:
                close(lineno)
            if len(parts) != 3:
                raise _error_at(fmt, lineno, offset, "expected 'gm p k'")
            try:
                p, k = int(parts[1]), int(parts[2])
            except ValueError:
                raise _error_at(fmt, lineno, offset, "malformed 'gm' line") from None
            if not 0 <= p < k:
                raise _error_at(fmt, lineno, offset, f"block indices must satisfy 0 <= p < k")
            if (p, k) in blocks or key == (p, k):
                raise _error_at(fmt, lineno, offset, f"duplicate block gm {p} {k}")
            key, key_line = (p, k), lineno
            current = _GmBodyReader(fmt, f"block gm {p} {k}: ")
            continue
        if current is None:
            raise _error_at(fmt, lineno, offset, "expected 'gm p k' block header")
        current.feed(lineno, offset, parts)
        last = lineno
    if current is not None:
        close(last)
    graph_count = 1 + max((k for _, k in blocks), default=-1)
    missing = [i for i in range(graph_count) if i not in sizes]
    if missing:
        raise ParseError(f"size of point set {missing[0]} is never declared", fmt=fmt)
    return MgmInstance(tuple(sizes[i][0] for i in range(graph_count)), blocks)


def _iter_gm_body(gm: GmInstance):
    yield (f"p {gm.left_size} {gm.right_size} {gm.assignment_count} "
           f"{len(gm.quad_costs)}\n")
    for aid, i, j, c in gm.assignments:
        yield f"a {aid} {i} {j} {format_float(c)}\n"
    for a, b, d in gm.quadratic:
        yield f"e {a} {b} {format_float(d)}\n"


def _iter_mgm(inst: MgmInstance):
    for (p, k), gm in sorted(inst.pairs.items()):
        yield f"gm {p} {k}\n"
        yield from _iter_gm_body(gm)


# ---------------------------------------------------------------------------
# Cell tracking


def parse_cell_tracking(source) -> CellTrackingInstance:
    fmt = "celltracking"
    frame_of: dict[int, int] = {}
    dets, moves, divs, excl = [], [], [], []
    apps: dict[int, float] = {}
    disapps: dict[int, float] = {}
    move_ids, div_ids = set(), set()

    for lineno, offset, text in _content_lines(source, comment="#"):
        parts = text.split()
        kind = parts[0]

        def err(message):
            return _error_at(fmt, lineno, offset, message)

        def ints(tokens):
            try:
                return [int(x) for x in tokens]
            except ValueError:
                raise err(f"malformed {kind} record") from None

        def cost(token):
            try:
                return _parse_float(token)
            except ValueError:
                raise err(f"malformed cost {token!r}") from None

        def known(i):
            if i not in frame_of:
                raise err(f"unknown detection id {i}")
            return frame_of[i]

        if kind == "H":
            if len(parts) != 4:
                raise err("expected 'H t id cost'")
            t, i = ints(parts[1:3])
            if i in frame_of:
                raise err(f"duplicate detection id {i}")
            frame_of[i] = t
            dets.append((t, i, cost(parts[3])))
        elif kind in ("APP", "DISAPP"):
            if len(parts) != 4:
                raise err(f"expected '{kind} t id cost'")
            t, i = ints(parts[1:3])
            if known(i) != t:
                raise err(f"detection {i} is in frame {frame_of[i]}, not {t}")
            target = apps if kind == "APP" else disapps
            if i in target:
                raise err(f"duplicate {kind} for detection {i}")
            target[i] = cost(parts[3])
        elif kind == "MOVE":
            if len(parts) != 5:
                raise err("expected 'MOVE id i j cost'")
            mid, i, j = ints(parts[1:4])
            if mid in move_ids:
                raise err(f"duplicate move id {mid}")
            if known(j) != known(i) + 1:
                raise err(f"move {mid} must link consecutive frames")
            move_ids.add(mid)
            moves.append((mid, i, j, cost(parts[4])))
        elif kind == "DIV":
            if len(parts) != 6:
                raise err("expected 'DIV id i j k cost'")
            did, i, j, k = ints(parts[1:5])
            if did in div_ids:
                raise err(f"duplicate division id {did}")
            if j == k:
                raise err(f"division {did} repeats child {j}")
            parent_frame = known(i)
            if known(j) != parent_frame + 1 or known(k) != parent_frame + 1:
                raise err(f"division {did} children must be in the frame after the parent")
            div_ids.add(did)
            divs.append((did, i, j, k, cost(parts[5])))
        elif kind == "CONFSET":
            body = " ".join(parts[1:])
            m = re.fullmatch(r"(.*?)\s*<=\s*(\S+)", body)
            if m is None or m.group(2) not in ("1", "1.0"):
                raise err("expected 'CONFSET i1 + ... + il <= 1'")
            members = [x for x in re.split(r"[\s+]+", m.group(1)) if x]
            ids = ints(members)
            if not ids:
                raise err("empty exclusion set")
            if len(set(ids)) != len(ids):
                raise err("exclusion set repeats a detection")
            frames = {known(i) for i in ids}
            if len(frames) != 1:
                raise err("exclusion set spans several frames")
            excl.append(tuple(ids))
        else:
            raise err(f"unknown record type {kind!r}")
    return CellTrackingInstance(tuple(dets), apps, disapps, tuple(moves), tuple(divs), tuple(excl))


def _iter_cell_tracking(inst: CellTrackingInstance):
    for t, i, c in inst.detections:
        yield f"H {t} {i} {format_float(c)}\n"
    for i, c in inst.appearances.items():
        yield f"APP {inst.frame_of(i)} {i} {format_float(c)}\n"
    for i, c in inst.disappearances.items():
        yield f"DISAPP {inst.frame_of(i)} {i} {format_float(c)}\n"
    for m in inst.moves:
        yield f"MOVE {m.id} {m.source} {m.target} {format_float(m.cost)}\n"
    for d in inst.divisions:
        yield f"DIV {d.id} {d.parent} {d.child1} {d.child2} {format_float(d.cost)}\n"
    for s in inst.exclusions:
        yield "CONFSET " + " + ".join(str(i) for i in s) + " <= 1\n"


# ---------------------------------------------------------------------------
# LP files

_LP_TOKEN = re.compile(r"""
    \s*(?:
      (?P<rel><=|>=|=<|=>|<|>|=)
     |(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?|(?i:inf(?:inity)?)(?![\w.]))
     |(?P<sign>[+-])
     |(?P<name>[A-Za-z_!"\#$%&()/,.;?@`'{}|~][^\s+\-*<>=:^\[\]]*)
     |(?P<colon>:)
     |(?P<bad>\S)
    )""", re.X)

_RELATION = {"<=": "<=", "=<": "<=", "<": "<=", ">=": ">=", "=>": ">=", ">": ">=", "=": "="}

_SECTIONS = {
    "minimize": "min", "minimise": "min", "minimum": "min", "min": "min",
    "maximize": "max", "maximise": "max", "maximum": "max", "max": "max",
    "subject to": "st", "such that": "st", "st": "st", "s.t.": "st", "st.": "st",
    "bounds": "bounds", "bound": "bounds",
    "binaries": "bin", "binary": "bin", "bin": "bin",
    "generals": "gen", "general": "gen", "gen": "gen",
    "end": "end",
}
_SECTION_ORDER = ["min", "st", "bounds", "bin", "end"]


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    column: int
    offset: int


def _lp_tokens(fmt, lineno, offset, text):
    out = []
    pos = 0
    end = len(text.rstrip())
    while pos < end:
        m = _LP_TOKEN.match(text, pos)
        kind = m.lastgroup
        start = m.start(kind)
        if kind == "bad":
            raise _error_at(fmt, lineno, offset, f"unexpected character {m.group(kind)!r}",
                            column=start + 1)
        out.append(_Tok(kind, m.group(kind), lineno, start + 1, offset + start))
        pos = m.end()
    return out


def _lp_error(tok: _Tok, message):
    return ParseError(message, tok.line, tok.column, tok.offset, "lp")


def _parse_linear(tokens, allow_constant=False):
    """Parse ``[sign] [coef] name ...``; returns (terms, constant, first-use tokens)."""
    terms: dict[str, float] = {}
    uses: dict[str, _Tok] = {}
    constant = 0.0
    i = 0
    n = len(tokens)
    while i < n:
        sign = 1.0
        start = tokens[i]
        saw_sign = False
        while i < n and tokens[i].kind == "sign":
            if tokens[i].text == "-":
                sign = -sign
            saw_sign = True
            i += 1
        if not saw_sign and i != 0:
            raise _lp_error(start, f"expected '+' or '-' before {start.text!r}")
        coef = 1.0
        has_coef = False
        if i < n and tokens[i].kind == "num":
            coef = float(tokens[i].text)
            has_coef = True
            i += 1
        if i < n and tokens[i].kind == "name":
            name = tokens[i].text
            terms[name] = terms.get(name, 0.0) + sign * coef
            uses.setdefault(name, tokens[i])
            i += 1
        elif has_coef:
            if not allow_constant:
                raise _lp_error(start, "constant terms are not allowed here")
            constant += sign * coef
        else:
            raise _lp_error(tokens[i] if i < n else start, "malformed linear expression")
    return terms, constant, uses


def _split_label(tokens):
    if len(tokens) >= 2 and tokens[0].kind == "name" and tokens[1].kind == "colon":
        return tokens[0].text, tokens[2:]
    return None, tokens


def _parse_constraint(tokens, auto_id):
    cid, body = _split_label(tokens)
    rel_at = [k for k, t in enumerate(body) if t.kind == "rel"]
    if len(rel_at) != 1:
        raise _lp_error(tokens[0], "constraint needs exactly one relation")
    k = rel_at[0]
    terms, _, uses = _parse_linear(body[:k])
    rhs_toks = body[k + 1:]
    sign = 1.0
    j = 0
    while j < len(rhs_toks) and rhs_toks[j].kind == "sign":
        sign = -sign if rhs_toks[j].text == "-" else sign
        j += 1
    if j != len(rhs_toks) - 1 or rhs_toks[j].kind != "num":
        raise _lp_error(body[k], "right-hand side must be a single number")
    rhs = sign * float(rhs_toks[j].text)
    return (cid or auto_id, terms, _RELATION[body[k].text], rhs), uses


def _constraint_complete(tokens):
    for k, t in enumerate(tokens):
        if t.kind == "rel":
            return any(x.kind == "num" for x in tokens[k + 1:])
    return False


def parse_lp(source) -> IlpInstance:
    """Parse a binary LP file (Minimize / Subject to / Bounds / Binaries / End)."""
    fmt = "lp"
    section = None
    obj_tokens: list[_Tok] = []
    pending: list[_Tok] = []
    constraints = []
    uses: dict[str, _Tok] = {}
    binaries: list[str] = []
    binary_set: set[str] = set()
    bound_rows = []
    ended = False

    def flush_constraint():
        nonlocal pending
        if not pending:
            return
        if not _constraint_complete(pending):
            raise _lp_error(pending[0], "incomplete constraint")
        row, u = _parse_constraint(pending, f"R{len(constraints) + 1}")
        for name, tok in u.items():
            uses.setdefault(name, tok)
        constraints.append(row)
        pending = []

    for lineno, offset, text in _lines(source):
        stripped = text.strip()
        if "\\" in stripped:
            stripped = stripped.split("\\", 1)[0].strip()
        if not stripped:
            continue
        if ended:
            raise _error_at(fmt, lineno, offset, "content after End")
        key = _SECTIONS.get(" ".join(stripped.lower().split()))
        if key is not None:
            if key == "max":
                raise _error_at(fmt, lineno, offset, "only minimization problems are supported")
            if key == "gen":
                raise _error_at(fmt, lineno, offset, "general integer variables are not supported")
            if section is None and key != "min":
                raise _error_at(fmt, lineno, offset, "file must start with Minimize")
            if section is not None and _SECTION_ORDER.index(key) <= _SECTION_ORDER.index(section):
                raise _error_at(fmt, lineno, offset, f"section {stripped!r} out of order")
            if section == "st":
                flush_constraint()
            section = key
            if key == "end":
                ended = True
            continue
        if section is None:
            raise _error_at(fmt, lineno, offset, "file must start with Minimize")
        toks = _lp_tokens(fmt, lineno, offset, text)
        if section == "min":
            obj_tokens.extend(toks)
        elif section == "st":
            label, _ = _split_label(toks)
            if label is not None and pending:
                flush_constraint()
            pending.extend(toks)
            if _constraint_complete(pending):
                flush_constraint()
        elif section == "bounds":
            bound_rows.append(toks)
        elif section == "bin":
            for t in toks:
                if t.kind != "name":
                    raise _lp_error(t, f"expected variable name, got {t.text!r}")
                if t.text in binary_set:
                    raise _lp_error(t, f"variable {t.text!r} listed twice")
                binary_set.add(t.text)
                binaries.append(t.text)
    if section == "st":
        flush_constraint()
    if section is None:
        raise ParseError("file must start with Minimize", fmt=fmt)

    _, obj_body = _split_label(obj_tokens)
    objective, constant, obj_uses = _parse_linear(obj_body, allow_constant=True)
    if constant != 0.0:
        raise _lp_error(obj_body[0], "objective constants are not supported")
    for name, tok in obj_uses.items():
        uses.setdefault(name, tok)
    for toks in bound_rows:
        constraints.extend(_bound_constraints(toks, uses, {c[0] for c in constraints}))
    for name, tok in uses.items():
        if name not in binary_set:
            raise _lp_error(tok, f"variable {name!r} is not declared in Binaries")
    try:
        return IlpInstance(tuple(binaries), objective, tuple(constraints))
    except InvalidInstance as exc:
        raise ParseError(str(exc), fmt=fmt) from None


def _bound_constraints(toks, uses, taken):
    """Turn a Bounds line into constraints; bounds implied by binarity vanish."""
    names = [t for t in toks if t.kind == "name"]
    if len(names) == 2 and names[1].text.lower() == "free" and len(toks) == 2:
        uses.setdefault(names[0].text, names[0])
        return []
    if len(names) != 1:
        raise _lp_error(toks[0], "malformed bound")
    var = names[0]
    uses.setdefault(var.text, var)
    lo, hi = -math.inf, math.inf
    k = toks.index(var)

    def number(seq):
        sign = 1.0
        for t in seq[:-1]:
            if t.kind != "sign":
                raise _lp_error(t, "malformed bound")
            sign = -sign if t.text == "-" else sign
        if not seq or seq[-1].kind != "num":
            raise _lp_error(var, "malformed bound")
        return sign * float(seq[-1].text)

    left, right = toks[:k], toks[k + 1:]
    if left:
        if left[-1].kind != "rel":
            raise _lp_error(left[-1], "malformed bound")
        value = number(left[:-1])
        rel = _RELATION[left[-1].text]
        if rel == "<=":
            lo = value
        elif rel == ">=":
            hi = value
        else:
            lo = hi = value
    if right:
        if right[0].kind != "rel":
            raise _lp_error(right[0], "malformed bound")
        value = number(right[1:])
        rel = _RELATION[right[0].text]
        if rel == "<=":
            hi = min(hi, value)
        elif rel == ">=":
            lo = max(lo, value)
        else:
            lo, hi = max(lo, value), min(hi, value)
    rows = []
    if lo > 0:
        cid = f"bound_{var.text}_lo"
        if cid not in taken:
            rows.append((cid, {var.text: 1.0}, ">=", 1.0 if lo <= 1 else lo))
    if hi < 1:
        cid = f"bound_{var.text}_hi"
        if cid not in taken:
            rows.append((cid, {var.text: 1.0}, "<=", 0.0 if hi >= 0 else hi))
    return rows


def _format_terms(terms, label, width=240) -> Iterator[str]:
    """Render ``+ a x - b y ...`` over as many lines as needed (last one unterminated)."""
    line = label
    first = True
    for name, coef in terms:
        neg = math.copysign(1.0, coef) < 0
        mag = abs(coef)
        body = name if mag == 1.0 else f"{format_float(mag)} {name}"
        piece = ("- " if neg else ("" if first else "+ ")) + body
        if not first and len(line) + len(piece) + 1 > width:
            yield line + "\n"
            line = "   " + piece
        else:
            line += " " + piece
        first = False
    yield line


def _iter_lp(ilp: IlpInstance):
    yield "Minimize\n"
    chunks = list(_format_terms(ilp.objective.items(), " obj:"))
    yield from chunks[:-1]
    yield chunks[-1] + "\n"
    yield "Subject to\n"
    for c in ilp.constraints:
        if not c.terms:
            raise ValueError(f"constraint {c.id!r} has no terms and cannot be written")
        chunks = list(_format_terms(c.terms.items(), f" {c.id}:"))
        yield from chunks[:-1]
        yield chunks[-1] + f" {c.relation} {format_float(c.rhs)}\n"
    yield "Bounds\n"
    yield "Binaries\n"
    for v in ilp.variables:
        yield f" {v}\n"
    yield "End\n"


# ---------------------------------------------------------------------------
# Shape matching names

_SHAPE_VAR = re.compile(r"x_(\d+)_(\d+)_(\d+)__(\d+)_(\d+)_(\d+)")
_SHAPE_FILE = re.compile(
    r"(?P<binvars>\d+)_(?P<constraints>\d+)_(?P<x>.+?)_(?P<tx>\d+)_(?P<y>.+?)_(?P<ty>\d+)"
    r"(?P<flags>(?:_partial|_noniso)*)\.lp")


@dataclass(frozen=True)
class ShapeFileMeta:
    binvar_count: int
    constraint_count: int
    shape_x_name: str
    triangles_x: int
    shape_y_name: str
    triangles_y: int
    partial: bool = False
    noniso: bool = False


def decode_shape_variable(name: str) -> TriangleProduct:
    """Split ``x_a1_a2_a3__b1_b2_b3`` into its six vertex indices."""
    m = _SHAPE_VAR.fullmatch(name)
    if m is None:
        raise ValueError(f"{name!r} is not a triangle product variable name")
    return TriangleProduct(*(int(g) for g in m.groups()))


def encode_shape_variable(product: TriangleProduct) -> str:
    a1, a2, a3, b1, b2, b3 = product
    return f"x_{a1}_{a2}_{a3}__{b1}_{b2}_{b3}"


def parse_shape_filename(name: str) -> ShapeFileMeta:
    base = name.replace("\\", "/").rsplit("/", 1)[-1]
    m = _SHAPE_FILE.fullmatch(base)
    if m is None:
        raise ValueError(f"{base!r} does not follow the shape matching file name pattern")
    flags = m.group("flags")
    meta = ShapeFileMeta(int(m.group("binvars")), int(m.group("constraints")), m.group("x"),
                         int(m.group("tx")), m.group("y"), int(m.group("ty")),
                         "_partial" in flags, "_noniso" in flags)
    for field_name in ("binvar_count", "constraint_count", "triangles_x", "triangles_y"):
        if getattr(meta, field_name) <= 0:
            raise ValueError(f"{base!r}: {field_name} must be positive")
    return meta


# ---------------------------------------------------------------------------
# dispatch

_WRITERS = {
    MrfInstance: _iter_mrf,
    BottleneckMrfInstance: _iter_bottleneck,
    TomographyInstance: _iter_tomography,
    MulticutInstance: _iter_multicut,
    AmwcInstance: _iter_amwc,
    GmInstance: _iter_gm_body,
    MgmInstance: _iter_mgm,
    CellTrackingInstance: _iter_cell_tracking,
    IlpInstance: _iter_lp,
}

PARSERS = {
    "mrf": parse_uai_mrf,
    "bottleneck": parse_bottleneck_mrf,
    "tomography": parse_tomography,
    "multicut": parse_multicut,
    "amwc": parse_amwc,
    "gm": parse_gm,
    "mgm": parse_mgm,
    "celltracking": parse_cell_tracking,
    "lp": parse_lp,
}

FORMAT_OF = {
    MrfInstance: "mrf",
    BottleneckMrfInstance: "bottleneck",
    TomographyInstance: "tomography",
    MulticutInstance: "multicut",
    AmwcInstance: "amwc",
    GmInstance: "gm",
    MgmInstance: "mgm",
    CellTrackingInstance: "celltracking",
    IlpInstance: "lp",
}


def iter_serialize(instance) -> Iterator[str]:
    try:
        writer = _WRITERS[type(instance)]
    except KeyError:
        raise TypeError(f"cannot serialize {type(instance).__name__}") from None
    return writer(instance)


def serialize(instance) -> str:
    """Text of ``instance`` in its class's file format (LP for an IlpInstance)."""
    return "".join(iter_serialize(instance))


def dump(instance, fp: IO[str]) -> None:
    for chunk in iter_serialize(instance):
        fp.write(chunk)


def parse(source, fmt: str):
    try:
        parser = PARSERS[fmt]
    except KeyError:
        raise ValueError(f"unknown format {fmt!r}; known: {', '.join(FORMATS)}") from None
    return parser(source)


def detect_format(head: str) -> str:
    """Guess the format tag from the start of a file (or the whole text).

    MARKOV files are told apart by a MAX-POTENTIALS or PROJECTIONS section, so
    pass enough text to include them; returns ``"ambiguous"`` when unsure.
    """
    first = None
    for line in head.splitlines():
        s = line.strip()
        if not s or s.startswith("\\"):
            continue
        if s.startswith("c ") or s == "c":
            continue
        if s.startswith("#") and first is None:
            # only cell-tracking files carry '#' comments
            first = first or "#"
            continue
        first = s
        break
    if first is None:
        return "ambiguous"
    if first == "#":
        return "celltracking"
    words = first.split()
    if first == "MARKOV":
        has_max = re.search(r"^\s*MAX-POTENTIALS\s*$", head, re.M) is not None
        has_proj = re.search(r"^\s*PROJECTIONS\s*$", head, re.M) is not None
        if has_max and has_proj:
            return "ambiguous"
        return "bottleneck" if has_max else "tomography" if has_proj else "mrf"
    if first == "MULTICUT":
        return "multicut"
    if first == "ASYMMETRIC MULTIWAY CUT":
        return "amwc"
    if words[0] == "p" and len(words) == 5:
        return "gm"
    if words[0] == "gm":
        return "mgm"
    if words[0].lower() in ("minimize", "minimise", "min"):
        return "lp"
    if words[0] in ("H", "APP", "DISAPP", "MOVE", "DIV", "CONFSET"):
        return "celltracking"
    return "ambiguous"


# ---------------------------------------------------------------------------
# Solution files


def parse_solution(kind: str, source):
    """Read a solution file for problem class ``kind``.

    Layouts: labels on one line (mrf, bottleneck, tomography); a cluster id per
    node (multicut); labels then a cut vector on two lines (amwc); one active
    assignment id per line (gm) or ``p k id`` (mgm); ``KIND id`` records with
    KIND in DET/APP/DISAPP/MOVE/DIV (celltracking); ``name value`` (lp).
    """
    fmt = f"{kind}-solution"
    rows = [(lineno, offset, text.split()) for lineno, offset, text in _content_lines(source, "#")]

    def ints(lineno, offset, parts):
        try:
            return [int(x) for x in parts]
        except ValueError:
            raise _error_at(fmt, lineno, offset, "expected integers") from None

    if kind in ("mrf", "bottleneck", "tomography"):
        return MrfLabeling(tuple(x for r in rows for x in ints(*r)))
    if kind == "multicut":
        try:
            return Partition.from_labels(x for r in rows for x in ints(*r))
        except InvalidInstance as exc:
            raise ParseError(str(exc), fmt=fmt) from None
    if kind == "amwc":
        if len(rows) != 2:
            raise ParseError("expected a label line and a cut line", fmt=fmt)
        return AmwcSolution(tuple(ints(*rows[0])), EdgeCutVector(tuple(ints(*rows[1]))))
    if kind == "gm":
        return GmSolution(frozenset(x for r in rows for x in ints(*r)))
    if kind == "mgm":
        out: dict[tuple[int, int], set[int]] = {}
        for lineno, offset, parts in rows:
            if len(parts) != 3:
                raise _error_at(fmt, lineno, offset, "expected 'p k id'")
            p, k, a = ints(lineno, offset, parts)
            out.setdefault((p, k), set()).add(a)
        return {key: GmSolution(frozenset(v)) for key, v in out.items()}
    if kind == "celltracking":
        groups = {"DET": set(), "APP": set(), "DISAPP": set(), "MOVE": set(), "DIV": set()}
        for lineno, offset, parts in rows:
            if len(parts) != 2 or parts[0] not in groups:
                raise _error_at(fmt, lineno, offset, "expected 'DET|APP|DISAPP|MOVE|DIV id'")
            groups[parts[0]].add(ints(lineno, offset, parts[1:])[0])
        return CellTrackingSolution(groups["DET"], groups["APP"], groups["DISAPP"],
                                    groups["MOVE"], groups["DIV"])
    if kind == "lp":
        values = {}
        for lineno, offset, parts in rows:
            if len(parts) != 2:
                raise _error_at(fmt, lineno, offset, "expected 'name value'")
            try:
                values[parts[0]] = int(round(float(parts[1])))
            except ValueError:
                raise _error_at(fmt, lineno, offset, "malformed value") from None
        return values
    raise ValueError(f"unknown solution kind {kind!r}")


def serialize_solution(solution) -> str:
    if isinstance(solution, MrfLabeling):
        return " ".join(map(str, solution.labels)) + "\n"
    if isinstance(solution, Partition):
        return " ".join(map(str, solution.clusters)) + "\n"
    if isinstance(solution, AmwcSolution):
        return (" ".join(map(str, solution.labels)) + "\n"
                + " ".join(map(str, solution.cut.cut)) + "\n")
    if isinstance(solution, GmSolution):
        return "".join(f"{a}\n" for a in sorted(solution.active))
    if isinstance(solution, CellTrackingSolution):
        out = []
        for tag, ids in (("DET", solution.detections), ("APP", solution.appearances),
                         ("DISAPP", solution.disappearances), ("MOVE", solution.moves),
                         ("DIV", solution.divisions)):
            out.extend(f"{tag} {i}\n" for i in sorted(ids))
        return "".join(out)
    if isinstance(solution, dict):
        if all(isinstance(k, tuple) for k in solution):
            return "".join(f"{p} {k} {a}\n" for (p, k), sol in sorted(solution.items())
                           for a in sorted(sol.active))
        return "".join(f"{name} {int(v)}\n" for name, v in solution.items())
    raise TypeError(f"cannot serialize solution of type {type(solution).__name__}")

"""Command-line front end: ``structpred <command> [flags] FILE...``.

Every command prints one JSON report (or plain text with ``--text``) and
exits 0 on success, 1 when a result is infeasible or has violations, and 2
on parse or usage errors.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import datasets
from .datasets import fetch_dataset, load_manifest
from .evaluation import DimensionMismatch, UnknownId, evaluate
from .formats import (FORMAT_OF, FORMATS, ParseError, detect_format, parse, parse_multicut,
                      parse_solution, serialize, serialize_solution)
from .lowering import (DEFAULT_CYCLE_LIMIT, GeneralProjection, InfeasibleSolution, NotPotts,
                       encode_solution, lower)
from .model import GmSolution, InvalidInstance, MrfLabeling, instance_stats
from .solve import DEFAULT_BUDGET, HEURISTICS, BudgetExceeded, brute_force

__all__ = ["main", "run_command", "detect_file_format", "fetch_dataset", "detect_format"]

OK, INFEASIBLE, ERROR = 0, 1, 2
_HEAD_BYTES = 1 << 16
_METHOD_CLASSES = {"gaec": ("multicut",), "gef": ("multicut",), "icm": ("mrf",),
                   "greedy-gm": ("gm",)}


class UsageError(Exception):
    pass


def _open(path):
    return open(path, encoding="utf-8", newline="")


def detect_file_format(path) -> str:
    """Format tag of a file; MARKOV files are scanned to the end for suffix sections."""
    with _open(path) as fh:
        head = fh.read(_HEAD_BYTES)
        tag = detect_format(head)
        if tag != "mrf" or len(head) < _HEAD_BYTES:
            return tag
        # a plain-looking MARKOV head may still be followed by a suffix section
        tail = head[head.rfind("\n") + 1:]
        for line in fh:
            line = tail + line if tail else line
            tail = ""
            word = line.strip()
            if word in ("MAX-POTENTIALS", "PROJECTIONS"):
                return detect_format(f"MARKOV\n{word}\n")
        return tag


def _load(path, fmt, merge_duplicates=False):
    fmt = fmt or detect_file_format(path)
    if fmt == "ambiguous":
        raise UsageError(f"{path}: cannot detect the format, pass --format")
    with _open(path) as fh:
        if fmt == "multicut" and merge_duplicates:
            return fmt, parse_multicut(fh, merge_duplicates=True)
        return fmt, parse(fh, fmt)


def _number(x):
    x = float(x)
    if math.isfinite(x):
        return x
    return "inf" if x > 0 else ("-inf" if x < 0 else "nan")


# ---------------------------------------------------------------------------
# per-file work, run in worker processes when --jobs > 1


def _stats(path, opts):
    fmt, inst = _load(path, opts["format"], opts["merge_duplicates"])
    return OK, instance_stats(inst).as_dict()


def _validate(path, opts):
    fmt, inst = _load(path, opts["format"], opts["merge_duplicates"])
    return OK, {"valid": True, "class": FORMAT_OF.get(type(inst), fmt)}


def _read_solution(path, fmt, inst=None):
    with _open(path) as fh:
        sol = parse_solution(fmt, fh)
    if fmt == "mgm" and inst is not None:
        # pairs without active matches have no lines in the file
        sol = {**{key: GmSolution(frozenset()) for key in inst.pairs}, **sol}
    return sol


def _eval(path, opts):
    if not opts["solution"]:
        raise UsageError("eval needs --solution")
    fmt, inst = _load(path, opts["format"], opts["merge_duplicates"])
    report = evaluate(inst, _read_solution(opts["solution"], fmt, inst))
    return (OK if report.feasible else INFEASIBLE), report.as_dict()


def _convert(path, opts):
    fmt, inst = _load(path, opts["format"], opts["merge_duplicates"])
    model = lower(inst, opts["cycle_limit"], potts=opts["potts"])
    out = opts["output"]
    record = {"class": model.kind, "exact": model.exact,
              "variables": len(model.ilp.variables),
              "constraints": len(model.ilp.constraints),
              "objective_offset": _number(model.objective_offset)}
    lp_text = serialize(model.ilp)
    if out is None:
        record["lp"] = lp_text
        record["var_map"] = model.sidecar()
    else:
        Path(out).write_text(lp_text, "utf-8")
        Path(f"{out}.varmap.json").write_text(model.sidecar_json(), "utf-8")
        record["lp_path"] = str(out)
        record["var_map_path"] = f"{out}.varmap.json"
    if opts["solution"]:
        encoded = encode_solution(model, _read_solution(opts["solution"], fmt, inst))
        text = serialize_solution(encoded)
        if out is None:
            record["encoded_solution"] = text
        else:
            Path(f"{out}.sol").write_text(text, "utf-8")
            record["encoded_solution_path"] = f"{out}.sol"
    return OK, record


def _solve(path, opts):
    fmt, inst = _load(path, opts["format"], opts["merge_duplicates"])
    method = opts["method"]
    if method == "brute":
        result = brute_force(inst, opts["budget"])
    else:
        if fmt not in _METHOD_CLASSES[method]:
            raise UsageError(f"--method {method} does not apply to {fmt} instances")
        if method == "icm":
            init = (_read_solution(opts["solution"], fmt, inst) if opts["solution"]
                    else MrfLabeling((0,) * inst.node_count))
            result = HEURISTICS[method](inst, init)
        else:
            result = HEURISTICS[method](inst)
    if result.solution is None:
        return INFEASIBLE, result.as_dict(None)
    report = evaluate(inst, result.solution)
    record = result.as_dict(serialize_solution(result.solution))
    record["feasible"] = report.feasible
    if opts["output"]:
        Path(opts["output"]).write_text(record["solution"], "utf-8")
    return (OK if report.feasible else INFEASIBLE), record


_COMMANDS = {"stats": _stats, "validate": _validate, "eval": _eval, "convert": _convert,
             "solve": _solve}


def _error_record(exc):
    if isinstance(exc, ParseError):
        rec = {"type": "parse", "message": str(exc)}
        for key in ("line", "column", "offset"):
            if getattr(exc, key, None) is not None:
                rec[key] = getattr(exc, key)
        return rec
    kind = {UsageError: "usage", BudgetExceeded: "budget"}.get(type(exc), "invalid")
    return {"type": kind, "message": str(exc)}


_CAUGHT = (ParseError, InvalidInstance, UsageError, BudgetExceeded, DimensionMismatch,
           UnknownId, NotPotts, GeneralProjection, InfeasibleSolution, OSError, ValueError,
           TypeError)


def _run_one(task):
    command, path, opts, timing = task
    start = time.perf_counter()
    try:
        code, result = _COMMANDS[command](path, opts)
        record = {"path": path, "status": "ok" if code == OK else "infeasible", "result": result}
    except _CAUGHT as exc:
        code, record = ERROR, {"path": path, "status": "error", "error": _error_record(exc)}
    if timing:
        record["seconds"] = round(time.perf_counter() - start, 6)
    return code, record


# ---------------------------------------------------------------------------
# argument handling and output


def _common_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    out = p.add_mutually_exclusive_group()
    out.add_argument("--json", dest="text", action="store_false", default=False,
                     help="JSON report (default)")
    out.add_argument("--text", dest="text", action="store_true", help="plain text report")
    p.add_argument("--format", choices=FORMATS, help="override format detection")
    p.add_argument("--jobs", type=int, default=1, metavar="N", help="files processed in parallel")
    p.add_argument("--timing", action="store_true", help="add wall time per file to the report")
    p.add_argument("--merge-duplicates", action="store_true",
                   help="sum parallel multicut edges instead of rejecting them")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(prog="structpred",
                                     description="Inspect, check, convert and solve benchmark instances.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    sub.add_parser("stats", parents=[common], help="instance sizes").add_argument("files", nargs="+")
    sub.add_parser("validate", parents=[common], help="parse and check invariants").add_argument(
        "files", nargs="+")

    p = sub.add_parser("eval", parents=[common], help="evaluate a solution file")
    p.add_argument("files", nargs="+")
    p.add_argument("--solution", required=True, metavar="PATH")

    p = sub.add_parser("convert", parents=[common], help="lower an instance to an LP file")
    p.add_argument("files", nargs="+")
    p.add_argument("--cycle-limit", type=int, default=DEFAULT_CYCLE_LIMIT, metavar="N")
    p.add_argument("--potts", action="store_true", help="compact encoding for Potts MRFs")
    p.add_argument("--solution", metavar="PATH", help="also encode this native solution")
    p.add_argument("-o", "--output", metavar="PATH",
                   help="write the LP here, with PATH.varmap.json (and PATH.sol)")

    p = sub.add_parser("solve", parents=[common], help="run a heuristic or the exact oracle")
    p.add_argument("files", nargs="+")
    p.add_argument("--method", choices=["brute", *HEURISTICS], default="brute")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, metavar="N")
    p.add_argument("--solution", metavar="PATH", help="starting labeling for icm")
    p.add_argument("-o", "--output", metavar="PATH", help="write the solution file here")

    p = sub.add_parser("fetch", parents=[common], help="download benchmark datasets")
    p.add_argument("names", nargs="*", help="dataset names; none lists the manifest")
    p.add_argument("--cache-dir", metavar="PATH")
    p.add_argument("--manifest", metavar="PATH", help="manifest file instead of the bundled one")

    sub.add_parser("formats", parents=[common], help="list supported format tags")
    return parser


def _options(args) -> dict:
    return {
        "format": args.format,
        "merge_duplicates": args.merge_duplicates,
        "solution": getattr(args, "solution", None),
        "cycle_limit": getattr(args, "cycle_limit", DEFAULT_CYCLE_LIMIT),
        "potts": getattr(args, "potts", False),
        "method": getattr(args, "method", "brute"),
        "budget": getattr(args, "budget", DEFAULT_BUDGET),
        "output": getattr(args, "output", None),
    }


def _fetch(args):
    manifest = load_manifest(args.manifest, args.cache_dir)
    if not args.names:
        return OK, [{"name": e.name, "url": e.url, "sha256": e.sha256, "format": e.format,
                     "notes": e.notes} for e in manifest.entries]
    records, code = [], OK
    for name in args.names:
        try:
            files = fetch_dataset(manifest, name)
            records.append({"name": name, "status": "ok", "files": [str(f) for f in files]})
        except (datasets.DatasetError, OSError) as exc:
            code = ERROR
            records.append({"name": name, "status": "error",
                            "error": {"type": "fetch", "message": str(exc)}})
    return code, records


def _text_lines(report) -> list:
    lines = []
    for rec in report["records"]:
        head = rec.get("path") or rec.get("name") or ""
        if rec.get("status") == "error":
            lines.append(f"{head}: error: {rec['error']['message']}")
            continue
        body = rec.get("result", rec)
        if isinstance(body, dict):
            parts = []
            for key, value in body.items():
                if key in ("lp", "var_map", "solution", "encoded_solution", "violations",
                           "files", "path", "name"):
                    continue
                parts.append(f"{key}={value}")
            lines.append(f"{head}: " + " ".join(parts) if head else " ".join(parts))
            for v in body.get("violations", []):
                lines.append(f"  {v['kind']} at {v['location']}: {v['description']}")
            if "files" in body:
                lines.append(f"  {len(body['files'])} files")
            if body.get("solution"):
                lines.extend("  " + s for s in body["solution"].splitlines())
        else:
            lines.append(str(body))
    return lines


def run_command(argv=None, stdout=None, stderr=None) -> int:
    """Run one command line and return its exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return ERROR if exc.code else OK

    if args.command == "formats":
        report = {"command": "formats", "formats": list(FORMATS)}
        stdout.write(("\n".join(FORMATS) if args.text else json.dumps(report)) + "\n")
        return OK
    if args.command == "fetch":
        code, records = _fetch(args)
        report = {"command": "fetch", "records": records}
        for rec in records:
            if rec.get("status") == "error":
                print(f"{rec['name']}: {rec['error']['message']}", file=stderr)
    else:
        if args.jobs < 1:
            print("structpred: --jobs must be at least 1", file=stderr)
            return ERROR
        opts = _options(args)
        if args.command == "convert" and opts["output"] and len(args.files) > 1:
            print("structpred: --output takes a single input file", file=stderr)
            return ERROR
        tasks = [(args.command, path, opts, args.timing) for path in args.files]
        if args.jobs > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=min(args.jobs, len(tasks))) as pool:
                results = list(pool.map(_run_one, tasks))
        else:
            results = [_run_one(t) for t in tasks]
        code = max((c for c, _ in results), default=OK)
        records = [r for _, r in results]
        for rec in records:
            if rec["status"] == "error":
                print(f"{rec['path']}: {rec['error']['message']}", file=stderr)
        report = {"command": args.command, "inputs": list(args.files), "records": records}
        if (args.command == "convert" and not opts["output"] and not opts["solution"]
                and not args.text and len(records) == 1 and records[0]["status"] == "ok"):
            # a lone conversion without --output prints the LP itself
            stdout.write(records[0]["result"]["lp"])
            return code

    if args.text:
        stdout.write("".join(line + "\n" for line in _text_lines(report)))
    else:
        stdout.write(json.dumps(report) + "\n")
    return code


def main(argv=None) -> None:
    sys.exit(run_command(argv))


if __name__ == "__main__":
    main()

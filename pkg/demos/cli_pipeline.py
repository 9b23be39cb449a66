"""The command line round trip: solve natively, convert to LP, evaluate both.

Everything runs in a temporary directory through the same entry point the
``structpred`` script uses.
"""
import io
import json
import tempfile
from pathlib import Path

import numpy as np

from structpred import generate as gen
from structpred.cli import run_command
from structpred.formats import serialize


def call(*argv):
    out = io.StringIO()
    code = run_command([str(a) for a in argv], out, io.StringIO())
    return code, out.getvalue()


with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    inst = tmp / "small.uai"
    inst.write_text(serialize(gen.random_mrf(np.random.default_rng(3), 4, 3, 0.6, values="int")))

    print(call("stats", "--text", inst)[1])
    code, out = call("solve", "--method", "brute", "-o", tmp / "best.sol", inst)
    native = json.loads(out)["records"][0]["result"]["objective"]
    print("brute force:", native, "exit", code)
    print("icm from all zeros:", json.loads(call("solve", "--method", "icm", inst)[1])
          ["records"][0]["result"]["objective"])

    call("convert", "--solution", tmp / "best.sol", "-o", tmp / "small.lp", inst)
    print((tmp / "small.lp").read_text()[:300], "...")
    code, out = call("eval", "--format", "lp", "--solution", tmp / "small.lp.sol", tmp / "small.lp")
    offset = json.loads((tmp / "small.lp.varmap.json").read_text())["objective_offset"]
    lowered = json.loads(out)["records"][0]["result"]["objective"] + offset
    print(f"LP objective plus offset {lowered} vs native {native}")

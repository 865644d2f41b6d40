import json
import subprocess
import sys

import pytest

from ptk import __version__
from ptk.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def ok(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    doc = json.loads(out)
    assert doc.pop("ptk_version") == __version__
    return doc


def test_plegma_check(capsys):
    assert ok(capsys, "plegma", "check", "--sets", "1,3;2,4") == {"plegma": True}
    assert ok(capsys, "plegma", "check", "--sets", "2,4;1,3") == {"plegma": False}


def test_norm_eval_file(capsys, tmp_path):
    v = tmp_path / "v.json"
    v.write_text(json.dumps({
        "space": {"kind": "xi_plegma_l1", "family": {"kind": "k_subsets", "k": 2}},
        "entries": [{"set": [2, 4], "coeff": "1"}, {"set": [3, 5], "coeff": "1"}],
    }))
    doc = ok(capsys, "norm", "eval", "--vector", str(v), "--method", "exact")
    assert doc["lower"] == doc["upper"] == "2" and doc["exact"] is True
    assert ok(capsys, "norm", "brute", "--vector", str(v))["lower"] == "2"


def test_cesaro(capsys):
    doc = ok(capsys, "cesaro", "--k", "1", "--n", "2")
    assert doc["lower_bound"] == "4/15" and doc["norm"]["lower"] == "sqrt(7/45)"
    assert ok(capsys, "sm", "cesaro", "--k", "1", "--n", "2") == doc


def test_family_commands(capsys):
    assert ok(capsys, "family", "order", "--family", "fomega") == {"order": "w"}
    assert ok(capsys, "family", "members", "--family", "fomega", "--max-n", "4") == {"members": [[1], [2, 3], [2, 4]]}
    doc = ok(capsys, "family", "closure", "--family", '{"kind":"explicit","sets":[[2,4]]}', "--max-n", "4")
    assert doc == {"closure": [[], [2], [2, 4]]}
    doc = ok(capsys, "family", "check", "--family", "k:2", "--max-n", "6")
    assert doc["predicates"]["thin"] == {"verdict": "yes"}


def test_transform_round_trip(capsys, tmp_path):
    doc = ok(capsys, "family", "transform", "--family", "k:2", "--op", "preimage", "--window", "evens:10")
    path = tmp_path / "f.json"
    path.write_text(json.dumps(dict(doc, ptk_version=__version__)))
    assert ok(capsys, "family", "members", "--family", str(path), "--max-n", "3") == {"members": [[1, 2], [1, 3], [2, 3]]}


def test_plegma_commands(capsys):
    assert ok(capsys, "plegma", "enum", "--family", "k:2", "--l", "2", "--max-n", "4")["tuples"] == [[[1, 3], [2, 4]]]
    doc = ok(capsys, "plegma", "path", "--family", "k:2", "--s0", "1,3", "--s", "5,7", "--max-n", "12")
    assert doc["length"] == 2
    assert ok(capsys, "plegma", "distance", "--family", "k:2", "--s0", "1,3", "--s", "5,7", "--max-n", "8") == {"distance": 2}
    assert ok(capsys, "plegma", "skipped", "--family", "fomega", "--max-n", "4") == {"members": [[1], [2, 4]]}


def test_ramsey_commands(capsys):
    doc = ok(capsys, "ramsey", "mono", "--family", "k:1", "--l", "2", "--coloring", "parity-max",
             "--target", "8", "--max-n", "30", "--threads", "2")
    assert doc["status"] == "found" and doc["valid"] is True
    doc = ok(capsys, "ramsey", "partition", "--family", "fomega", "--coloring", "parity-min", "--target", "5", "--max-n", "20")
    assert doc["valid"] is True
    assert ok(capsys, "ramsey", "dense", "--sets", "1,2;3,4", "--l", "2") == {"tuple": None}
    doc = ok(capsys, "ramsey", "embed", "--family", '{"kind":"closure","base":{"kind":"k_subsets","k":3}}',
             "--into", '{"kind":"closure","base":{"kind":"k_subsets","k":2}}', "--max-n", "12")
    assert doc["status"] == "exhausted"


def test_property_p_round_trip(capsys, tmp_path):
    doc = ok(capsys, "norm", "property-p", "--space", '{"kind":"schreier_hash"}', "--k", "3")
    assert doc["status"] == "found"
    path = tmp_path / "pp.json"
    path.write_text(json.dumps(dict(doc, ptk_version=__version__)))
    assert ok(capsys, "norm", "eval", "--vector", str(path))["lower"] == "1"


def test_sm_commands(capsys, tmp_path):
    seq = '{"kind":"basis","space":{"kind":"xi_plegma_l1","family":{"kind":"schreier","xi":"1"}},"family":{"kind":"schreier","xi":"1"}}'
    doc = ok(capsys, "sm", "profile", "--seq", seq, "--coeffs", "1,1,1", "--steps", "4", "--window", "identity:30")
    assert [s["value"] for s in doc["steps"]] == ["3", "3"]
    doc = ok(capsys, "sm", "constants", "--seq", seq, "--n", "3", "--window", "identity:30", "--samples", "8")
    assert doc["c_lower"] == doc["C_upper"] == "1"
    doc = ok(capsys, "sm", "f-cesaro", "--seq", seq, "--n", "4", "--window", "identity:30")
    assert doc["norm"]["lower"] == "1/3"
    doc = ok(capsys, "sm", "boost", "--seq", seq, "--c", "1", "--eps", "0.1", "--window", "identity:40")
    assert doc["b"] == ["1"] and doc["eps_prime"] == "1/56"
    path = tmp_path / "boost.json"
    path.write_text(json.dumps(dict(doc, ptk_version=__version__)))
    doc = ok(capsys, "sm", "profile", "--seq", str(path), "--coeffs", "1,1", "--steps", "2", "--window", "identity:9")
    assert doc["steps"][0]["value"] == "56/29"


def test_usage_errors(capsys):
    code, out, err = run(capsys, "bogus")
    assert code == 2 and out == "" and "invalid choice" in err
    code, out, err = run(capsys, "plegma", "check")
    assert code == 2 and "--sets" in err
    code, out, err = run(capsys, "norm", "eval", "--vector", "no-such-file.json")
    assert code == 2 and out == ""


def test_domain_errors(capsys):
    code, out, _ = run(capsys, "norm", "eval", "--vector", '{"space":{"kind":"tsirelson"},"entries":[{"set":[1,2],"coeff":"1"}]}')
    assert code == 1 and json.loads(out)["error"]["type"] == "BadIndex"
    code, out, _ = run(capsys, "sm", "boost", "--seq", '{"kind":"basis","space":{"kind":"frak_x","k":1},"family":{"kind":"k_subsets","k":2}}',
                       "--c", "1", "--eps", "1")
    assert code == 1 and json.loads(out)["error"]["type"] == "BadParameters"


def test_strict_tolerance(capsys):
    sets = [[a, b] for a in range(1, 10) for b in range(a + 1, 10)]
    vec = json.dumps({"space": {"kind": "frak_x", "k": 1}, "entries": [{"set": s, "coeff": "1/3"} for s in sets]})
    code, out, _ = run(capsys, "norm", "eval", "--vector", vec, "--budget", "50", "--strict")
    doc = json.loads(out)
    assert code == 1 and doc["error"]["type"] == "ToleranceUnreachable" and doc["result"]["exact"] is False
    code, out, _ = run(capsys, "norm", "eval", "--vector", vec, "--budget", "50")
    assert code == 0 and json.loads(out)["exact"] is False


def test_deterministic_bytes():
    argv = [sys.executable, "-m", "ptk.cli", "ramsey", "mono", "--family", "fomega", "--l", "2",
            "--coloring", "hash-mod:3", "--target", "5", "--max-n", "20"]
    outs = {subprocess.run(argv + ["--threads", t], capture_output=True, check=True).stdout for t in ("1", "3")}
    assert len(outs) == 1

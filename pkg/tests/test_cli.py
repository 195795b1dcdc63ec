import json
import subprocess
import sys

import pytest

from ricalc.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


CHI = '{"breakpoints": [1.0], "values": [1.0]}'


def test_norm_L1(capsys):
    code, out, _ = run(capsys, "norm", CHI, "--space", '{"p": 1, "q": 1}')
    value, kind = out.strip().split("\t")
    assert code == 0 and float(value) == pytest.approx(1.0) and kind == "exact"


def test_norm_json(capsys):
    code, out, _ = run(capsys, "norm", CHI, "--space", '{"p": 2, "q": 1}', "--json")
    obj = json.loads(out)
    assert code == 0 and obj["value"] == pytest.approx(2.0) and obj["functional"] == "lz"


def test_norm_functional(capsys):
    code, out, _ = run(capsys, "norm", CHI, "--functional", "fractional-range", "--X", '{"p": 1, "q": 1}', "--gamma", "0.5")
    assert code == 0 and float(out.split("\t")[0]) == pytest.approx(2.0)


def test_norm_infinite(capsys):
    code, out, _ = run(capsys, "norm", CHI, "--functional", "maximal-range", "--X", '{"p": 1, "q": 1}')
    assert code == 0 and out.startswith("inf\t")


def test_norm_from_file(capsys, tmp_path):
    p = tmp_path / "f.json"
    p.write_text('{"breakpoints": [1.0, 2.0], "values": [2.0, 1.0]}')
    code, out, _ = run(capsys, "norm", str(p), "--space", '{"p": 1, "q": 1}')
    assert code == 0 and float(out.split("\t")[0]) == pytest.approx(3.0)


def test_optimal_lookup(capsys):
    code, out, _ = run(capsys, "optimal", "M", "--p", "1", "--q", "1", "--A", "1,-2")
    obj = json.loads(out)
    assert code == 0 and obj["kind"] == "lz" and obj["params"]["A"] == [0.0, -3.0]


def test_optimal_riesz(capsys):
    code, out, _ = run(capsys, "optimal", "I", "--p", "1.5", "--q", "2", "--gamma", "1", "--dim", "2")
    assert json.loads(out)["params"]["p"] == pytest.approx(6.0)


def test_optimal_none(capsys):
    code, out, _ = run(capsys, "optimal", "M", "--p", "1", "--q", "1")
    assert code == 0 and json.loads(out)["kind"] == "none"


def test_apply_half_line(capsys):
    code, out, _ = run(capsys, "apply", "P", CHI)
    assert code == 0 and json.loads(out)


def test_apply_maximal(capsys):
    code, out, _ = run(capsys, "apply", "maximal", '{"breakpoints": [1.0], "values": [1.0], "offset": 0.0}', "--x=-1,0.5,2")
    assert json.loads(out)["values"] == pytest.approx([0.5, 1.0, 0.5])


def test_apply_hilbert_knot(capsys):
    code, out, _ = run(capsys, "apply", "hilbert", '{"breakpoints": [2.0], "values": [1.0], "offset": -1.0}', "--x", "1,2")
    vals = json.loads(out)["values"]
    assert vals[0] == "inf"


@pytest.mark.parametrize(
    "argv",
    [
        ("norm", "{not json", "--space", '{"p": 1, "q": 1}'),
        ("norm", '{"breakpoints": [2.0, 1.0], "values": [1.0, 1.0]}', "--space", '{"p": 1, "q": 1}'),
        ("norm", CHI, "--space", '{"p": 0.5, "q": 1}'),
        ("norm", CHI),
        ("optimal", "Z", "--p", "2", "--q", "2"),
        ("apply", "S_alpha", CHI),
        ("apply", "maximal", CHI),
    ],
)
def test_malformed_input_exits_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("ricalc:")


def test_verify_deterministic(tmp_path):
    outs = []
    for k in range(2):
        d = tmp_path / f"r{k}"
        res = subprocess.run([sys.executable, "-m", "ricalc", "verify", "lemmas", "--n", "20", "--seed", "3", "--out", str(d), "--jobs", str(1 + k)], capture_output=True, text=True)
        assert res.returncode == 0, res.stdout + res.stderr
        outs.append(((d / "lemmas.csv").read_bytes(), (d / "lemmas.summary.json").read_bytes()))
    assert outs[0] == outs[1]
    header = outs[0][0].decode().splitlines()[0]
    assert header == "check,inputs_digest,lhs,rhs,constant,tolerance,pass"


def test_verify_zero_tolerance_fails(tmp_path):
    res = subprocess.run([sys.executable, "-m", "ricalc", "verify", "preliminaries", "--n", "20", "--tol", "0", "--out", str(tmp_path)], capture_output=True, text=True)
    assert res.returncode == 1 and res.stdout.startswith("FAIL")


def test_verify_unwritable(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    res = subprocess.run([sys.executable, "-m", "ricalc", "verify", "hilbert", "--n", "10", "--out", str(blocker / "sub")], capture_output=True, text=True)
    assert res.returncode == 2

import csv
import io
import json
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import pytest

from weightdim.cli import run
from weightdim.config import ProblemInstance, dump_config, load_config, parse_config
from weightdim.exceptions import ValidationError

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
PARABOLA = str(CONFIGS / "parabola.json")
IMPROVEMENT = str(CONFIGS / "improvement.json")
F = Fraction


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def results(out):
    return json.loads(out)["results"]


def exact(entry):
    return F(entry["exact"])


def test_bound_improvement(capsys):
    code, out, _ = call(capsys, "bound", "--config", IMPROVEMENT)
    assert code == 0
    r = results(out)
    assert exact(r["theorem_min"]) == F(19, 11) == exact(r["mtp_min"])
    assert r["theorem_min"]["approximate"] == "1.72727272727"
    assert r["blw_condition_holds"] is False and r["improvement_flag"] is True
    assert r["case"] == "case2"


def test_bound_from_flags(capsys):
    code, out, _ = call(capsys, "bound", "--tau", "3/5,1/2,2/5", "--d", "2", "--m", "1")
    assert code == 0 and exact(results(out)["effective_bound"]) == F(27, 16)


def test_report_envelope(capsys):
    _, out, _ = call(capsys, "bound", "--config", PARABOLA)
    rep = json.loads(out)
    assert set(rep) == {"tool", "version", "command", "config", "results", "provenance"}
    assert rep["config"]["tau"] == ["1", "1/2"]
    assert exact(rep["results"]["effective_bound"]) == F(3, 4)


def test_exponents(capsys):
    _, out, _ = call(capsys, "exponents", "--config", IMPROVEMENT)
    r = results(out)
    assert [exact(v) for v in r["a"]] == [F(8, 5), F(6, 5)]
    assert [exact(v) for v in r["t"]] == [F(3, 5), 0]
    assert r["K"] == 1


def test_mtp(capsys):
    code, out, _ = call(capsys, "mtp", "--a", "8/5,6/5", "--t", "3/5,0")
    assert code == 0
    r = results(out)
    assert exact(r["lower_bound"]) == F(19, 11) and exact(r["level"]) == F(11, 5)


def test_unknown_subcommand_is_usage_error(capsys):
    code, _, err = call(capsys, "frobnicate")
    assert code == 1
    diag = json.loads(err.splitlines()[0])
    assert diag["error"] == "usage" and "usage:" in diag["message"]


@pytest.mark.parametrize(
    "argv",
    [
        ["bound", "--tau", "2/5,1/2,2/5", "--d", "2", "--m", "1"],
        ["bound", "--tau", "1,1/2"],
        ["mtp", "--a", "1,2", "--t", "0"],
        ["bound", "--config", "/nonexistent.json"],
        ["dirichlet", "q0", "--config", IMPROVEMENT],
    ],
)
def test_validation_errors_exit_one(capsys, argv):
    code, out, err = call(capsys, *argv)
    assert code == 1 and out == ""
    assert json.loads(err.splitlines()[-1])["error"] == "validation"


def test_float_in_config_is_rejected(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"d": 1, "m": 1, "tau": [1, 0.5]}))
    code, _, err = call(capsys, "bound", "--config", str(path))
    assert code == 1 and "not exact" in err


def test_dirichlet_q0(capsys):
    code, out, _ = call(capsys, "dirichlet", "q0", "--config", PARABOLA, "--x", "1/2")
    assert code == 0 and results(out)["Q0"] == 65


def test_dirichlet_find_csv(capsys):
    code, out, _ = call(capsys, "dirichlet", "find", "--config", PARABOLA, "--Q", "10000")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 1 and (rows[0]["q"], rows[0]["p1"], rows[0]["p2"]) == ("12", "5", "2")
    assert F(rows[0]["x1_ratio_pow"]) < 1 and F(rows[0]["f1_ratio_pow"]) < 1


def test_dirichlet_find_none_below_q0(tmp_path, capsys):
    cfg = json.loads(Path(PARABOLA).read_text())
    cfg["domain"] = [["1/10", "9/10"]]
    path = tmp_path / "narrow.json"
    path.write_text(json.dumps(cfg))
    code, out, _ = call(capsys, "dirichlet", "find", "--config", str(path), "--Q", "1")
    assert code == 0 and out.strip().count("\n") == 0  # header only


def test_dirichlet_not_found_past_q0_exits_two(monkeypatch, capsys):
    import weightdim.cli as cli
    from weightdim.exceptions import WitnessNotFound

    def never(*args, **kwargs):
        raise WitnessNotFound("forced")

    monkeypatch.setattr(cli, "find_witness", never)
    code, _, err = call(capsys, "dirichlet", "find", "--config", PARABOLA, "--Q", "1000")
    assert code == 2 and json.loads(err.splitlines()[-1])["error"] == "invariant"


def test_dirichlet_certify(capsys):
    code, out, _ = call(capsys, "dirichlet", "certify", "--config", PARABOLA, "--samples", "20")
    assert code == 0
    r = results(out)
    assert r["minkowski_product_is_one"] is True and r["det"] == -1 and r["taylor_ok"] is True
    assert r["Q"] == r["Q0"] == 94 and r["witness"] is not None


def test_dirichlet_enumerate(capsys):
    code, out, _ = call(capsys, "dirichlet", "find", "--config", PARABOLA, "--q-max", "100")
    assert code == 0 and len(list(csv.DictReader(io.StringIO(out)))) == 35


def test_witnesses_csv(capsys):
    code, out, _ = call(capsys, "witnesses", "--config", PARABOLA, "--Q", "150")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 1861
    assert rows[0] == {"q": "1", "p1": "0", "dist1": "0"}


def test_coverage_csv(capsys):
    code, out, _ = call(capsys, "coverage", "--config", PARABOLA, "--Q", "100,1000", "--delta", "1/100")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and [r["fraction"] for r in rows] == ["1", "1"]


def test_boxdim(tmp_path, capsys):
    report = tmp_path / "fit.json"
    code, out, _ = call(capsys, "boxdim", "--config", PARABOLA, "--q-lo", "64", "--report", str(report))
    assert code == 0
    assert [int(r["N"]) for r in csv.DictReader(io.StringIO(out))] == [16, 30, 58, 112, 214, 372, 526]
    fit = json.loads(report.read_text())["results"]
    assert 0.25 <= float(fit["slope"]) <= 1 and "heuristic" in fit["note"]


def test_boxdim_budget(capsys):
    code, _, err = call(capsys, "boxdim", "--config", PARABOLA, "--q-lo", "64", "--budget", "100")
    assert code == 1 and "GridTooLarge" in err


def _independent_min(taus, d, m):
    n = d + m
    return min((n + 1 + sum(taus[i] - taus[k] for k in range(i, n))) / (taus[i] + 1) - m for i in range(d))


def test_sweep_rows(capsys):
    code, out, _ = call(capsys, "sweep", "--config", str(CONFIGS / "sweep.json"))
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 6
    for r in rows:
        taus = [F(v) for v in r["tau"].split()]
        assert F(r["theorem_min"]) == _independent_min(taus, 2, 1)
        assert r["blw_condition_holds"] == "false" and r["status"] == "valid"


def test_sweep_flags_invalid_rows(tmp_path, capsys):
    path = tmp_path / "s.json"
    path.write_text(json.dumps({"d": 2, "m": 1, "base": ["1", "1/2", "1/5"], "vary": [{"index": 1, "start": "1/5", "stop": "3/5", "step": "1/5"}]}))
    code, out, _ = call(capsys, "sweep", "--config", str(path))
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert [r["status"] for r in rows] == ["invalid: OrderingViolated", "invalid: OrderingViolated", "valid"]


def test_sweep_empty_grid(tmp_path, capsys):
    path = tmp_path / "s.json"
    path.write_text(json.dumps({"d": 2, "m": 1, "base": ["1", "1/2", "1/5"]}))
    code, out, _ = call(capsys, "sweep", "--config", str(path))
    assert code == 0 and out.strip() == "tau,theorem_min,effective_bound,blw_condition_holds,improvement_flag,status"


def test_out_file_and_determinism(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for target in (a, b):
        assert run(["dirichlet", "certify", "--config", PARABOLA, "--samples", "10", "--seed", "3", "--out", str(target)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_console_script_runs():
    proc = subprocess.run([sys.executable, "-m", "weightdim.cli", "mtp", "--a", "3/2", "--t", "1/2"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["results"]["lower_bound"]["exact"] == "3/4"


# -- config round trip -----------------------------------------------------


def test_config_roundtrip():
    inst = load_config(PARABOLA)
    again = parse_config(json.loads(json.dumps(dump_config(inst))))
    assert isinstance(again, ProblemInstance) and again == inst
    assert dump_config(again) == json.loads(Path(PARABOLA).read_text())


@pytest.mark.parametrize(
    "raw",
    [
        {"d": 1, "m": 1},
        {"d": "1", "m": 1, "tau": ["1", "1/2"]},
        {"d": 1, "m": 1, "tau": ["1", "x"]},
        {"d": 1, "m": 1, "tau": ["1", "1/2"], "domain": [["0", "1"]]},
        [],
    ],
)
def test_parse_config_rejects(raw):
    with pytest.raises(ValidationError):
        parse_config(raw)

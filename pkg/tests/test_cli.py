import json
import math
from pathlib import Path

import pytest

from sfttrace.cli import (
    ParseError,
    ValidationError,
    load_config,
    main,
    parse_config,
    write_config,
)

GOLDEN_DOC = {
    "sft": {"symbols": ["0", "1"], "matrix": [[1, 1], [1, 0]]},
    "P": [["0"]],
    "Q": [["0"]],
    "a": {"side": "stable", "terms": [
        {"coeff": [1.0, 0.0],
         "target_ray": {"orbit": ["0"], "phase": 0, "body": []},
         "source_ray": {"orbit": ["0"], "phase": 0, "body": []},
         "window": 0}]},
    "b": {"side": "unstable", "terms": [
        {"coeff": [1.0, 0.0],
         "target_ray": {"orbit": ["0"], "phase": 0, "body": []},
         "source_ray": {"orbit": ["0"], "phase": 0, "body": []},
         "window": 0}]},
    "k_range": [0, 12],
    "tolerances": {"final_abs_err": 1e-08},
    "output": None,
}


def write_doc(tmp_path, doc, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def test_load_config_golden(tmp_path):
    config = load_config(write_doc(tmp_path, GOLDEN_DOC))
    assert config.sft.n == 2
    assert config.a.side == "stable"
    assert config.k_range == (0, 12)


def test_load_config_missing_file():
    with pytest.raises(ParseError):
        load_config("/nonexistent/config.json")


def test_load_config_bad_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{\n  broken\n}")
    with pytest.raises(ParseError) as exc:
        load_config(str(path))
    assert exc.value.line == 2


def test_config_forbidden_orbit(tmp_path):
    doc = json.loads(json.dumps(GOLDEN_DOC))
    doc["P"] = [["1"]]  # 1 -> 1 is forbidden on the golden mean
    with pytest.raises(ValidationError):
        load_config(write_doc(tmp_path, doc))


def test_config_orbit_not_in_set(tmp_path):
    doc = json.loads(json.dumps(GOLDEN_DOC))
    doc["a"]["terms"][0]["target_ray"]["orbit"] = ["0", "1"]
    with pytest.raises(ValidationError):
        load_config(write_doc(tmp_path, doc))


def test_config_empty_rejected():
    with pytest.raises(ValidationError):
        parse_config({})


def test_config_bad_k_range(tmp_path):
    doc = json.loads(json.dumps(GOLDEN_DOC))
    doc["k_range"] = [5, 2]
    with pytest.raises(ValidationError):
        load_config(write_doc(tmp_path, doc))


def test_config_round_trip(tmp_path):
    config = load_config(write_doc(tmp_path, GOLDEN_DOC))
    out1 = tmp_path / "round1.json"
    write_config(config, str(out1))
    config2 = load_config(str(out1))
    assert config2 == config
    out2 = tmp_path / "round2.json"
    write_config(config2, str(out2))
    assert out1.read_bytes() == out2.read_bytes()


def test_cli_inspect(tmp_path, capsys):
    code = main(["inspect", "--config", write_doc(tmp_path, GOLDEN_DOC)])
    out = capsys.readouterr().out
    assert code == 0
    assert "entropy" in out
    phi = (1 + math.sqrt(5)) / 2
    assert f"{math.log(phi):.4f}"[:6] in out
    assert "0.7236" in out


def test_cli_inspect_not_primitive(tmp_path, capsys):
    doc = {
        "sft": {"symbols": ["0", "1"], "matrix": [[0, 1], [1, 0]]},
        "P": [["0", "1"]],
        "Q": [["0", "1"]],
        "a": {"side": "stable", "terms": []},
        "b": {"side": "unstable", "terms": []},
        "k_range": [0, 2],
    }
    code = main(["inspect", "--config", write_doc(tmp_path, doc)])
    out = capsys.readouterr().out
    assert code == 2
    assert "not mixing" in out


def test_cli_enumerate(tmp_path, capsys):
    code = main(["enumerate", "--config", write_doc(tmp_path, GOLDEN_DOC),
                 "--window", "1"])
    out = capsys.readouterr().out
    assert code == 0
    assert out.startswith("3 heteroclinic points")


def test_cli_measures(tmp_path, capsys):
    code = main(["measures", "--config", write_doc(tmp_path, GOLDEN_DOC)])
    out = capsys.readouterr().out
    assert code == 0
    assert "tau_s(a) * tau_u(b)" in out


def test_cli_trace_run_csv_deterministic(tmp_path, capsys):
    config_path = write_doc(tmp_path, GOLDEN_DOC)
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    assert main(["trace-run", "--config", config_path, "--out", str(out1),
                 "--no-timestamp"]) == 0
    assert main(["trace-run", "--config", config_path, "--out", str(out2),
                 "--no-timestamp"]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    lines = out1.read_text().splitlines()
    assert lines[0] == "k,trace,scaled,target,abs_err"
    assert len(lines) == 14
    # k = 1 row: trace Fib(4) = 3
    assert lines[2].startswith("1,3,")


def test_cli_trace_run_timestamp_header(tmp_path):
    config_path = write_doc(tmp_path, GOLDEN_DOC)
    out = tmp_path / "t.csv"
    assert main(["trace-run", "--config", config_path, "--out", str(out)]) == 0
    assert out.read_text().startswith("# generated ")


def test_cli_trace_run_tolerance_failure(tmp_path, capsys):
    doc = json.loads(json.dumps(GOLDEN_DOC))
    doc["k_range"] = [0, 2]
    doc["tolerances"] = {"final_abs_err": 1e-12}
    code = main(["trace-run", "--config", write_doc(tmp_path, doc),
                 "--out", str(tmp_path / "x.csv"), "--no-timestamp"])
    assert code == 3


def test_cli_trace_run_offdiagonal_regime(tmp_path, capsys):
    doc = json.loads(json.dumps(GOLDEN_DOC))
    # source past deviates from the zero pattern at index -2
    doc["a"]["terms"][0]["source_ray"]["body"] = ["1", "0"]
    doc["tolerances"] = {}
    code = main(["trace-run", "--config", write_doc(tmp_path, doc),
                 "--out", str(tmp_path / "z.csv"), "--no-timestamp"])
    out = capsys.readouterr().out
    assert code == 0
    assert "exact-zero regime" in out


CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"


def test_cli_trace_run_complex_coefficients(tmp_path, capsys):
    doc = json.loads(json.dumps(GOLDEN_DOC))
    doc["a"]["terms"][0]["coeff"] = [0.25, 0.5]
    doc["tolerances"] = {}
    doc["k_range"] = [0, 4]
    out = tmp_path / "c.csv"
    code = main(["trace-run", "--config", write_doc(tmp_path, doc),
                 "--out", str(out), "--no-timestamp"])
    assert code == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 6
    # k = 1: trace = (0.25 + 0.5j) * 3
    assert lines[2].split(",")[1] == "0.75+1.5j"


def test_cli_theorem13_disjoint(tmp_path, capsys):
    full_doc = json.loads((CONFIG_DIR / "full_shift.json").read_text())
    code = main(["theorem13", "--config", write_doc(tmp_path, full_doc),
                 "--nmax", "6"])
    out = capsys.readouterr().out
    assert code == 0
    assert "rank(a.b) = 1, rank(b.a) = 1" in out
    assert "n=6" in out


def test_cli_theorem13_shared_orbits_skips_vanishing(tmp_path, capsys):
    code = main(["theorem13", "--config", write_doc(tmp_path, GOLDEN_DOC),
                 "--nmax", "3"])
    out = capsys.readouterr().out
    assert code == 0
    assert "not disjoint" in out
    assert "commutator decay" in out


def test_cli_verify(capsys):
    code = main(["verify"])
    out = capsys.readouterr().out
    assert code == 0
    assert "all criteria passed" in out
    assert out.count("pass") >= 8


def test_shipped_configs_load():
    for name in ("golden_mean.json", "full_shift.json"):
        config = load_config(str(CONFIG_DIR / name))
        assert not config.a.is_zero and not config.b.is_zero

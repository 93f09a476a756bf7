"""Command-line behavior: exit codes, wire formats, determinism."""

import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from qledger.cli import main
from qledger.measures import CSV_HEADER, read_csv
from qledger.qcore import matrix_to_json
from qledger.thermo import gibbs_state


def run(args):
    return main(list(args))


def test_example1_writes_parseable_csv(tmp_path, capsys):
    out = tmp_path / "e1.csv"
    code = run(["example1", "--override", "steps=500", "--out", str(out)])
    assert code == 0
    text = out.read_text()
    lines = text.splitlines()
    assert lines[0].startswith("# config: ")
    assert lines[1] == CSV_HEADER
    series = read_csv(out)
    assert len(series) == 501
    assert series.times[-1] == pytest.approx(20.0)


def test_repeat_runs_are_byte_identical(tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "sub" / "b.csv"
    b.parent.mkdir()
    assert run(["example1", "--override", "steps=400", "--out", str(a)]) == 0
    assert run(["example1", "--override", "steps=400", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_override_beats_config_beats_default(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"R": 1.0, "steps": 300}))
    out = tmp_path / "o.csv"
    code = run(["example1", "--config", str(cfg), "--override", "R=2.5", "--out", str(out)])
    assert code == 0
    echo = json.loads(out.read_text().splitlines()[0].removeprefix("# config: "))
    assert echo["R"] == 2.5  # override wins
    assert echo["steps"] == 300  # config wins over default
    assert echo["lambda"] == 1.0  # default survives


def test_unknown_config_key_rejected(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"gamma": 0.2}))  # example2-only key
    code = run(["example1", "--config", str(cfg)])
    assert code == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "validation"
    assert "gamma" in err["detail"]


def test_unknown_override_key_rejected(capsys):
    assert run(["example2", "--override", "R=1"]) == 2  # example1-only key
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "validation"


def test_type_errors_rejected(capsys):
    assert run(["example1", "--override", "steps=12.5"]) == 2
    assert run(["example1", "--override", "steps"]) == 2
    assert run(["example1", "--override", "t_max=fast"]) == 2
    capsys.readouterr()


def test_example_key_must_match_subcommand(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"example": 2}))
    assert run(["example1", "--config", str(cfg)]) == 2
    capsys.readouterr()


def test_missing_config_file(capsys):
    assert run(["example1", "--config", "/no/such/file.json"]) == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "validation"


def test_svg_output_is_valid_xml(tmp_path, capsys):
    out = tmp_path / "o.csv"
    svg = tmp_path / "o.svg"
    assert run(["example2", "--override", "steps=2000", "--override", "case=2",
                "--out", str(out), "--svg", str(svg)]) == 0
    root = ET.parse(svg).getroot()
    assert root.tag.endswith("svg")
    polylines = root.findall(".//{http://www.w3.org/2000/svg}polyline")
    assert len(polylines) == 3  # coherence, coherent power, total power


def test_numeric_failure_exit_code(capsys):
    code = run(["example2", "--override", "case=2", "--override", "steps=30",
                "--override", "gamma=0.5"])
    assert code == 3
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "numeric"
    assert "steps" in err["detail"]


# ---------------------------------------------------------------------------
# ledger subcommand

def ledger_config(tmp_path, **extra):
    h = np.diag([0.0, 1.0]).astype(complex)
    cfg = {"beta": 1.0, "h0": matrix_to_json(h),
           "rho0": matrix_to_json(np.diag([0.0, 1.0]).astype(complex))}
    cfg.update(extra)
    path = tmp_path / "ledger.json"
    path.write_text(json.dumps(cfg))
    return path


def test_ledger_identity_process(tmp_path, capsys):
    rho = matrix_to_json(np.diag([0.3, 0.7]).astype(complex))
    path = ledger_config(tmp_path, rho0=rho, rho_tau=rho)
    assert run(["ledger", "--config", str(path)]) == 0
    led = json.loads(capsys.readouterr().out)
    for key, val in led.items():
        assert abs(val) <= 1e-12, key


def test_ledger_thermalization_fixture(tmp_path, capsys):
    pi = gibbs_state(np.diag([0.0, 1.0]), 1.0).state
    path = ledger_config(tmp_path, rho_tau=matrix_to_json(pi.matrix))
    assert run(["ledger", "--config", str(path)]) == 0
    led = json.loads(capsys.readouterr().out)
    assert led["deltaWf"] == pytest.approx(-1.3132616875182228, abs=1e-6)
    assert abs(led["residual_eq2"]) <= 1e-9
    assert abs(led["residual_eq7"]) <= 1e-9


def test_ledger_channel_route(tmp_path, capsys):
    gamma = 0.4
    k0 = np.array([[1.0, 0.0], [0.0, np.sqrt(1 - gamma)]], dtype=complex)
    k1 = np.array([[0.0, np.sqrt(gamma)], [0.0, 0.0]], dtype=complex)
    path = ledger_config(tmp_path, channel=[matrix_to_json(k0), matrix_to_json(k1)])
    assert run(["ledger", "--config", str(path)]) == 0
    led = json.loads(capsys.readouterr().out)
    # the excited state sheds energy gamma through the damping channel
    assert led["deltaE"] == pytest.approx(-gamma, abs=1e-12)


def test_ledger_output_file(tmp_path, capsys):
    pi = gibbs_state(np.diag([0.0, 1.0]), 1.0).state
    path = ledger_config(tmp_path, rho_tau=matrix_to_json(pi.matrix))
    out = tmp_path / "led.json"
    assert run(["ledger", "--config", str(path), "--out", str(out)]) == 0
    led = json.loads(out.read_text())
    assert "deltaWf" in led
    capsys.readouterr()


def test_ledger_config_validation(tmp_path, capsys):
    rho = matrix_to_json(np.diag([0.3, 0.7]).astype(complex))
    both = ledger_config(tmp_path, rho_tau=rho, channel=[matrix_to_json(np.eye(2, dtype=complex))])
    assert run(["ledger", "--config", str(both)]) == 2
    neither = ledger_config(tmp_path)
    assert run(["ledger", "--config", str(neither)]) == 2
    assert run(["ledger"]) == 2
    bad_key = ledger_config(tmp_path, rho_tau=rho, extras=1)
    assert run(["ledger", "--config", str(bad_key)]) == 2
    capsys.readouterr()


# ---------------------------------------------------------------------------
# audit subcommand

def test_audit_passes_on_small_sweep(capsys):
    assert run(["audit", "--count", "40", "--seed", "7"]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out
    assert "contractivity" in out


def test_audit_counterexample_mode(capsys):
    assert run(["audit", "--expect-violation"]) == 0
    out = capsys.readouterr().out
    assert "negative irreversible entropy" in out


def test_audit_zero_count(capsys):
    assert run(["audit", "--count", "0"]) == 0
    capsys.readouterr()


def test_missing_subcommand_is_usage_error(capsys):
    with pytest.raises(SystemExit):
        run([])
    capsys.readouterr()

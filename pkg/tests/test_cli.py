import json
import math
import os

import numpy as np
import pytest

from clocksim import reference_limit, signal_ghz, signal_uncorrelated, uncertainty_uncorrelated
from clocksim import ExperimentBudget
from clocksim.cli import main


def _read_csv(path):
    with open(path, "r", encoding="utf-8", newline="") as fh:
        raw = fh.read()
    assert raw.endswith("\n") and "\r" not in raw
    lines = raw.splitlines()
    assert lines[0].startswith("# convention:")
    header = lines[1].split(",")
    rows = [line.split(",") for line in lines[2:]]
    return header, rows


def test_signal_ghz_row(tmp_path):
    out = tmp_path / "sig.csv"
    t = 0.7853981634
    code = main([
        "signal", "--scheme", "ghz", "--n", "2", "--gamma", "0",
        "--detuning", "1", "--t", str(t), "--out", str(out),
    ])
    assert code == 0
    header, rows = _read_csv(out)
    assert header == ["t", "delta", "gamma", "scheme", "P"]
    assert len(rows) == 1
    assert rows[0][3] == "ghz"
    assert float(rows[0][4]) == pytest.approx(signal_ghz(2, 1.0, t, 0.0), rel=1e-15)


def test_signal_zero_time_gives_unity(tmp_path):
    out = tmp_path / "sig.csv"
    assert main(["signal", "--n", "1", "--t", "0", "--out", str(out)]) == 0
    _, rows = _read_csv(out)
    assert float(rows[0][4]) == 1.0


def test_signal_missing_n_exits_2_without_file(tmp_path, capsys):
    out = tmp_path / "never.csv"
    code = main(["signal", "--t", "1.0", "--out", str(out)])
    assert code == 2
    assert not out.exists()
    err = capsys.readouterr().err
    assert err.count("\n") == 1
    assert "invalid-argument" in err and "--n" in err


def test_signal_csv_roundtrip(tmp_path):
    out = tmp_path / "sig.csv"
    main(["signal", "--scheme", "uncorrelated", "--n", "3", "--gamma", "0.8",
          "--detuning", "1.1", "--t", "0.9", "--out", str(out)])
    _, rows = _read_csv(out)
    t, delta, gamma, scheme, p = rows[0]
    assert scheme == "uncorrelated"
    recomputed = signal_uncorrelated(float(delta), float(t), float(gamma))
    assert recomputed == pytest.approx(float(p), abs=1e-9)


def test_scan_default_grid_minima_agree(tmp_path):
    out = tmp_path / "scan.csv"
    code = main(["scan", "--n", "3", "--gamma", "1", "--total-time", "100", "--out", str(out)])
    assert code == 0
    header, rows = _read_csv(out)
    assert header == ["t", "delta_omega_uncorrelated", "delta_omega_ghz"]
    unc = np.array([float(r[1]) for r in rows])
    ent = np.array([float(r[2]) for r in rows])
    assert np.nanmin(unc) == pytest.approx(np.nanmin(ent), rel=5e-4)
    ts = np.array([float(r[0]) for r in rows])
    assert ts.tolist() == sorted(ts.tolist())


def test_scan_single_row_value(tmp_path):
    out = tmp_path / "scan.csv"
    code = main(["scan", "--n", "3", "--gamma", "1", "--total-time", "100",
                 "--t-min", "0.5", "--t-max", "0.5", "--t-steps", "1", "--out", str(out)])
    assert code == 0
    _, rows = _read_csv(out)
    assert float(rows[0][1]) == pytest.approx(math.sqrt(2 * math.e / 300), rel=1e-12)


def test_scan_rejects_nonpositive_tmin(tmp_path):
    out = tmp_path / "scan.csv"
    code = main(["scan", "--n", "2", "--gamma", "1", "--total-time", "10",
                 "--t-min", "0", "--out", str(out)])
    assert code == 2
    assert not out.exists()


def test_scan_flags_infeasible_rows_with_warning(tmp_path, capsys):
    out = tmp_path / "scan.csv"
    code = main(["scan", "--n", "2", "--gamma", "1", "--total-time", "1.0",
                 "--t-min", "0.5", "--t-max", "2.0", "--t-steps", "4", "--out", str(out)])
    assert code == 0
    assert "warning" in capsys.readouterr().err
    _, rows = _read_csv(out)
    assert rows[-1][1] == "nan"


def test_scan_csv_roundtrip(tmp_path):
    out = tmp_path / "scan.csv"
    main(["scan", "--n", "4", "--gamma", "0.7", "--total-time", "50",
          "--t-min", "0.1", "--t-max", "1.5", "--t-steps", "12", "--out", str(out)])
    _, rows = _read_csv(out)
    for t_s, unc_s, _ in rows:
        t = float(t_s)
        budget = ExperimentBudget(4, 50.0, t)
        expected = uncertainty_uncorrelated(budget, 0.5 * math.pi / t, 0.7)
        assert expected == pytest.approx(float(unc_s), abs=1e-9)


def test_optimize_csv_and_ordering(tmp_path):
    out = tmp_path / "opt.csv"
    code = main(["optimize", "--n-min", "2", "--n-max", "3", "--method", "both",
                 "--seed", "42", "--restarts", "3", "--out", str(out)])
    assert code == 0
    header, rows = _read_csv(out)
    assert header == ["n", "method", "improvement_pct", "t_opt", "coeffs", "status"]
    assert len(rows) == 4  # 2 n-values x 2 methods
    by_key = {(r[0], r[1]): r for r in rows}
    for n in ("2", "3"):
        gen = float(by_key[(n, "gen-ramsey")][2])
        opt = float(by_key[(n, "qfi")][2])
        assert opt >= gen - 1e-6
        assert float(by_key[(n, "gen-ramsey")][2]) > 0.0
        coeffs = [float(c) for c in by_key[(n, "qfi")][4].split(";")]
        assert np.linalg.norm(coeffs) == pytest.approx(1.0, abs=1e-9)


def test_optimize_determinism_bytewise(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["optimize", "--n-min", "2", "--n-max", "2", "--method", "gen-ramsey",
            "--restarts", "1", "--seed", "7"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_optimize_rejects_n_below_2(tmp_path):
    out = tmp_path / "opt.csv"
    code = main(["optimize", "--n-min", "1", "--n-max", "3", "--out", str(out)])
    assert code == 2
    assert not out.exists()


def test_optimize_json_report(tmp_path):
    out = tmp_path / "opt.json"
    code = main(["optimize", "--n-min", "2", "--n-max", "2", "--method", "gen-ramsey",
                 "--seed", "1", "--restarts", "2", "--format", "json", "--out", str(out)])
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["schema_version"] == 1
    assert "convention" in payload
    point = payload["points"][0]
    assert point["method"] == "gen-ramsey"
    assert point["status"] == "ok"
    assert len(point["restart_values"]) == 2
    assert len(point["coeffs"]) == 2


def test_qfi_report_ghz_optimized(tmp_path):
    out = tmp_path / "qfi.json"
    code = main(["qfi", "--scheme", "ghz", "--n", "4", "--gamma", "1",
                 "--optimize-t", "--total-time", "100", "--out", str(out)])
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["schema_version"] == 1
    expected = math.sqrt(2 * math.e / 400)
    assert payload["delta_omega"] == pytest.approx(expected, rel=1e-6)
    assert payload["t_opt"] == pytest.approx(1 / 8, abs=1e-4)
    assert payload["classical_fi_sld"] == pytest.approx(payload["qfi"], rel=1e-6)


def test_qfi_report_uncorrelated_same_limit(tmp_path):
    out = tmp_path / "qfi.json"
    code = main(["qfi", "--scheme", "uncorrelated", "--n", "4", "--gamma", "1",
                 "--optimize-t", "--total-time", "100", "--out", str(out)])
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["delta_omega"] == pytest.approx(math.sqrt(2 * math.e / 400), rel=1e-6)


def test_qfi_fixed_time_value(tmp_path):
    out = tmp_path / "qfi.json"
    code = main(["qfi", "--scheme", "ghz", "--n", "3", "--gamma", "0",
                 "--t", "0.7", "--out", str(out)])
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["qfi"] == pytest.approx(9 * 0.49, rel=1e-9)
    assert payload["delta_omega"] is None


def test_qfi_zero_information_exits_3(tmp_path, capsys):
    out = tmp_path / "qfi.json"
    code = main(["qfi", "--coeffs", "0;0;1", "--n", "4", "--gamma", "1",
                 "--optimize-t", "--total-time", "100", "--out", str(out)])
    assert code == 3
    err = capsys.readouterr().err
    assert "no-information" in err or "optimization-failure" in err


def test_qfi_rejects_csv(tmp_path):
    code = main(["qfi", "--scheme", "ghz", "--n", "2", "--gamma", "1",
                 "--t", "0.5", "--format", "csv"])
    assert code == 2


def test_config_file_with_flag_override(tmp_path):
    cfgfile = tmp_path / "run.cfg"
    cfgfile.write_text("scheme=ghz\nn=2\ngamma=0\ndetuning=1\nt=0.5\n")
    out = tmp_path / "sig.csv"
    code = main(["signal", "--config", str(cfgfile), "--t", "1.0", "--out", str(out)])
    assert code == 0
    _, rows = _read_csv(out)
    assert float(rows[0][0]) == 1.0  # flag wins over config value
    assert rows[0][3] == "ghz"


def test_stdout_output_when_no_path(capsys):
    code = main(["signal", "--n", "1", "--t", "0.5", "--detuning", "1.0"])
    assert code == 0
    got = capsys.readouterr().out
    assert got.startswith("# convention:")
    assert "t,delta,gamma,scheme,P" in got


def test_threads_env_var_validation(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("CLOCKSIM_THREADS", "abc")
    out = tmp_path / "opt.csv"
    code = main(["optimize", "--n-min", "2", "--n-max", "2", "--restarts", "1",
                 "--method", "gen-ramsey", "--out", str(out)])
    assert code == 2
    assert not out.exists()
    monkeypatch.setenv("CLOCKSIM_THREADS", "2")
    code = main(["optimize", "--n-min", "2", "--n-max", "2", "--restarts", "2",
                 "--method", "gen-ramsey", "--out", str(out)])
    assert code == 0

import numpy as np
import pytest

from vacuumflow.cli import (ConfigError, RecordError, dispatch, emit_config,
                            parse_config, read_run_record, write_run_record)

BASE = """gamma = 1.5
mu = 1
delta = 1
alpha0 = 1
alpha1 = 4
tau_end = 2
"""


def test_parse_minimal_config_defaults():
    cfg = parse_config(BASE)
    assert cfg.gamma == 1.5 and cfg.alpha1 == 4.0
    assert cfg.N == 256 and cfg.dtau == 1e-3
    assert cfg.c_nu == 1.0 and cfg.s_bar == 0.0


def test_parse_comments_and_layout():
    text = "# header\ngamma = 1.5  # inline\n\nmu=1\ndelta = 1\nalpha0=1\nalpha1=4\ntau_end=2\n"
    cfg = parse_config(text)
    assert cfg.mu == 1.0


@pytest.mark.parametrize("text,needle", [
    ("gamma = 0.9", "gamma must exceed 1 (line 1)"),
    (BASE + "dtau = -1e-3", "dtau"),
    (BASE + "frobnicate = 1", "unknown key 'frobnicate'"),
    (BASE + "gamma = 2", "duplicate key 'gamma'"),
    (BASE + "N = big", "N expects an integer"),
    (BASE + "eps_det = soft", "eps_det expects a number"),
    ("gamma = 1.5\nmu = 1", "missing required key"),
    (BASE + "justtext", "expected 'key = value'"),
    (BASE + "r1 = 1.8", "together"),
])
def test_parse_errors_name_key_and_line(text, needle):
    with pytest.raises(ConfigError, match=None) as err:
        parse_config(text)
    assert needle in str(err.value)


def test_error_lines_count_comments():
    text = "# one\n# two\ngamma = 0.9\n"
    with pytest.raises(ConfigError) as err:
        parse_config(text)
    assert "(line 3)" in str(err.value)


def test_canonicalization_idempotent():
    text = BASE + "a_q = 0.001\nN = 64\nr1 = 1.8\nsigma1 = 0.875\n"
    once = parse_config(emit_config(parse_config(text)))
    twice = parse_config(emit_config(once))
    assert once == twice == parse_config(text)


def _write_cfg(tmp_path, extra=""):
    p = tmp_path / "run.cfg"
    p.write_text(BASE.replace("tau_end = 2", "tau_end = 0.05")
                 + "N = 32\n" + extra)
    return p


def test_round_trip_bit_identical(tmp_path, small_run):
    out = tmp_path / "rec"
    write_run_record(small_run, out)
    rec = read_run_record(out)
    out2 = tmp_path / "rec2"
    write_run_record(rec, out2)
    rec2 = read_run_record(out2)
    assert rec.status == small_run.status
    for a, b in zip(rec.snapshots, rec2.snapshots):
        assert a.tau == b.tau and a.alpha == b.alpha and a.alpha_tau == b.alpha_tau
        for field in ("eta", "v", "zeta", "B", "accel"):
            assert np.array_equal(getattr(a, field), getattr(b, field),
                                  equal_nan=True)
    for col in rec.series:
        assert np.array_equal(rec.series[col], rec2.series[col])
    assert rec.e_in == rec2.e_in


def test_read_errors(tmp_path, small_run):
    out = tmp_path / "rec"
    write_run_record(small_run, out)

    bad_version = tmp_path / "badv"
    write_run_record(small_run, bad_version)
    status = (bad_version / "status.txt").read_text().splitlines()
    status[0] = "vacuumflow-record-0"
    (bad_version / "status.txt").write_text("\n".join(status) + "\n")
    with pytest.raises(RecordError, match="version"):
        read_run_record(bad_version)

    no_snaps = tmp_path / "nosnaps"
    write_run_record(small_run, no_snaps)
    import shutil
    shutil.rmtree(no_snaps / "snapshots")
    with pytest.raises(RecordError, match="snapshots"):
        read_run_record(no_snaps)

    truncated = tmp_path / "trunc"
    write_run_record(small_run, truncated)
    lines = (truncated / "series.csv").read_text().splitlines()
    lines[17] = ",".join(lines[17].split(",")[:4])
    (truncated / "series.csv").write_text("\n".join(lines) + "\n")
    with pytest.raises(RecordError, match="row 18"):  # file line number
        read_run_record(truncated)

    with pytest.raises(RecordError, match="status.txt"):
        read_run_record(tmp_path / "void")


def test_dispatch_usage_and_unknown(capsys):
    assert dispatch([]) == 1
    assert dispatch(["make-it-so"]) == 1
    assert "usage" in capsys.readouterr().err
    assert dispatch(["--help"]) == 0


def test_dispatch_indices(capsys):
    assert dispatch(["indices", "--gamma", "1.5"]) == 0
    out = capsys.readouterr().out
    row = [line for line in out.splitlines() if line.startswith("1.5")][0]
    assert row.split()[1:4] == ["true", "true", "true"]


def test_dispatch_selfsim(tmp_path):
    out = tmp_path / "ss"
    code = dispatch(["selfsim", "--delta", "1", "--gamma", "1.6666666666666667",
                     "--alpha0", "1", "--alpha1", "0", "--t-end", "4",
                     "--tau-end", "2", "--out", str(out)])
    assert code == 0
    assert (out / "alpha_t.csv").is_file()
    assert (out / "alpha_tau.csv").is_file()
    assert (out / "profile.csv").is_file()
    assert dispatch(["selfsim", "--delta", "-1", "--gamma", "1.5", "--alpha0",
                     "1", "--alpha1", "0", "--out", str(out)]) == 2


def test_dispatch_simulate_and_diagnose_zero_run(tmp_path, capsys):
    cfg = _write_cfg(tmp_path)
    rundir = tmp_path / "zero"
    assert dispatch(["simulate", "--config", str(cfg), "--out", str(rundir)]) == 0
    rec = read_run_record(rundir)
    assert rec.status == "completed"
    assert np.max(rec.series["sup_eta"]) == 0.0
    assert np.max(rec.series["sup_B"]) == 0.0
    assert dispatch(["diagnose", "--run", str(rundir)]) == 0
    out = capsys.readouterr().out
    assert "E0 = 0" in out
    assert (rundir / "energy.csv").is_file()
    assert (rundir / "qsup.csv").is_file()


def test_dispatch_config_error_exit_code(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("gamma = 0.9\n")
    assert dispatch(["simulate", "--config", str(bad), "--out",
                     str(tmp_path / "x")]) == 2
    assert dispatch(["simulate", "--config", str(tmp_path / "absent.cfg"),
                     "--out", str(tmp_path / "y")]) == 2


def _sweep(tmp_path, tag, threads, monkeypatch):
    monkeypatch.setenv("VACUUMFLOW_THREADS", str(threads))
    cfg = _write_cfg(tmp_path)
    out = tmp_path / f"sweep_{tag}"
    code = dispatch(["sweep", "--config", str(cfg),
                     "--vary", "a_q=0.001,0.002", "--vary", "a_eta=0,0.001",
                     "--out", str(out)])
    assert code == 0
    return out


def test_sweep_deterministic_across_parallelism(tmp_path, monkeypatch):
    out1 = _sweep(tmp_path, "serial", 1, monkeypatch)
    out2 = _sweep(tmp_path, "parallel", 4, monkeypatch)
    assert (out1 / "sweep.csv").read_text() == (out2 / "sweep.csv").read_text()
    runs = sorted(p.name for p in out1.iterdir() if p.is_dir())
    assert len(runs) == 4
    for name in runs:
        s1 = (out1 / name / "series.csv").read_text()
        s2 = (out2 / name / "series.csv").read_text()
        assert s1 == s2


def test_sweep_rejects_conflicting_key(tmp_path, monkeypatch):
    monkeypatch.setenv("VACUUMFLOW_THREADS", "1")
    cfg = _write_cfg(tmp_path, extra="a_q = 0.001\n")
    assert dispatch(["sweep", "--config", str(cfg), "--vary", "a_q=0.1,0.2",
                     "--out", str(tmp_path / "s")]) == 2

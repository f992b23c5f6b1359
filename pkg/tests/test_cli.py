"""Command-line behavior: exit codes, output files, stamp lines.

Runs go through cli.main in-process with small workloads so the whole
file stays cheap; the heavy defaults are exercised by the acceptance
suite instead.
"""

import json
from pathlib import Path

from fluxlab import cli
from fluxlab.reporting import SCHEMA


def run_cli(args):
    return cli.main([str(a) for a in args])


def read_summary(out):
    return json.loads((Path(out) / "summary.json").read_text(encoding="utf-8"))


def first_line(path):
    return Path(path).read_text(encoding="utf-8").splitlines()[0]


def test_string_pass_exit_zero(tmp_path, capsys):
    out = tmp_path / "run"
    rc = run_cli(["string", "--out", out, "--seed", 3])
    assert rc == 0
    assert "string: pass" in capsys.readouterr().out
    summary = read_summary(out)
    assert summary["schema"] == SCHEMA
    assert summary["verdict"] is True
    # every CSV opens with the schema name and the same config hash as
    # the summary
    stamp = f"# {SCHEMA} config={summary['config_hash']}"
    assert first_line(out / "string_values.csv") == stamp
    assert summary["results"]["n_paths"] == 3


def test_string_explicit_paths(tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text(
        "[experiment]\n"
        "x = 0,0\n"
        "y = 1,1\n"
        "paths = 0,0 -> 1,0 -> 1,1 ; 0,0 -> 0,1 -> 1,1\n",
        encoding="utf-8",
    )
    out = tmp_path / "run"
    assert run_cli(["string", "--config", cfg, "--out", out]) == 0
    summary = read_summary(out)
    assert summary["results"]["n_paths"] == 2
    assert summary["results"]["values_match_zero_field"] is True


def test_correlations_summary_fields(tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text(
        "[run]\nseed = 1\n[experiment]\nn_covariance_fields = 3\n",
        encoding="utf-8",
    )
    out = tmp_path / "run"
    rc = run_cli(["correlations", "--config", cfg, "--out", out, "--seed", 11])
    assert rc == 0
    s = read_summary(out)
    assert len(s["config_hash"]) == 64
    assert int(s["config_hash"], 16) >= 0
    # the --seed flag beats the config file's run.seed
    assert s["provenance"]["seed"] == 11
    assert s["config"]["run"]["seed"] == 11
    assert s["config"]["experiment"]["n_covariance_fields"] == 3
    assert s["below_paper_dimension"] is True
    assert s["verdict"] is True
    assert s["results"]["max_error"] <= 1e-10
    assert s["tolerances"]["covariance"] == 1e-10


def test_check_theorem_small(tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[experiment]\nn_samples = 2\n", encoding="utf-8")
    out = tmp_path / "run"
    assert run_cli(["check-theorem", "--config", cfg, "--out", out]) == 0
    s = read_summary(out)
    assert s["results"]["margins_ok"] is True
    assert s["results"]["controls_ok"] is True
    lines = (out / "margins.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0].startswith(f"# {SCHEMA} config=")
    assert lines[1].split(",")[:2] == ["sample_index", "kind"]
    # 2 samples + zero + 1 control rows, one per beta
    assert len(lines) == 2 + (2 + 2) * 3


def test_orbit_onsite(tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text(
        "[experiment]\nn_phi_samples = 8\nx = 0,0\ny = 0,0\n", encoding="utf-8"
    )
    out = tmp_path / "run"
    assert run_cli(["orbit-average", "--config", cfg, "--out", out]) == 0
    s = read_summary(out)
    assert s["results"]["on_site"] is True
    stamp = f"# {SCHEMA} config={s['config_hash']}"
    for name in ("orbit_samples.csv", "orbit_convergence.csv", "orbit_direct_checks.csv"):
        assert first_line(out / name) == stamp


def test_anneal_free_case(tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text(
        "[model]\nkappa = 0.0\ng = 0.0\n"
        "[experiment]\nt_initial = 0.5\nt_final = 0.1\ncooling = 0.6\n"
        "steps_per_temp = 10\nrestarts = 2\n",
        encoding="utf-8",
    )
    out = tmp_path / "run"
    assert run_cli(["anneal", "--config", cfg, "--out", out, "--seed", 8]) == 0
    s = read_summary(out)
    assert s["results"]["theorem_consistent"] is True
    assert (out / "anneal_trace.csv").exists()
    assert (out / "anneal_restarts.csv").exists()


def test_spectrum_pi_flux(tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[experiment]\nfield_kind = pi-flux\n", encoding="utf-8")
    out = tmp_path / "run"
    assert run_cli(["spectrum", "--config", cfg, "--out", out]) == 0
    s = read_summary(out)
    assert s["results"]["degeneracy"] >= 1
    assert set(s["results"]["log_z"]) == {"0.5", "2.0", "8.0"}
    lines = (out / "spectrum.csv").read_text(encoding="utf-8").splitlines()
    assert len(lines) == 2 + 4 ** 4  # stamp + header + one row per state


def test_reruns_byte_identical(tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[experiment]\nn_identity_seeds = 1\n", encoding="utf-8")
    assert run_cli(["identities", "--config", cfg, "--out", tmp_path / "a", "--seed", 5]) == 0
    assert run_cli(["identities", "--config", cfg, "--out", tmp_path / "b", "--seed", 5]) == 0
    a = (tmp_path / "a" / "identities.csv").read_bytes()
    b = (tmp_path / "b" / "identities.csv").read_bytes()
    assert a == b
    sa = read_summary(tmp_path / "a")
    sb = read_summary(tmp_path / "b")
    assert sa["config_hash"] == sb["config_hash"]
    # summaries agree except for the timestamp header and the echoed
    # output directory (which the hash deliberately ignores)
    assert sa["config"]["run"]["out"] != sb["config"]["run"]["out"]
    sa.pop("header")
    sb.pop("header")
    sa["config"]["run"].pop("out")
    sb["config"]["run"].pop("out")
    assert sa == sb


def test_malformed_config_exit_one(tmp_path, capsys):
    bad = tmp_path / "bad.ini"
    bad.write_text("[model\nd = 2\n", encoding="utf-8")
    out = tmp_path / "never"
    rc = run_cli(["identities", "--config", bad, "--out", out])
    assert rc == 1
    assert not out.exists()
    assert "error:" in capsys.readouterr().err


def test_unknown_key_exit_one(tmp_path, capsys):
    bad = tmp_path / "bad.ini"
    bad.write_text("[experiment]\nn_wobbles = 3\n", encoding="utf-8")
    out = tmp_path / "never"
    rc = run_cli(["identities", "--config", bad, "--out", out])
    assert rc == 1
    assert not out.exists()
    assert "n_wobbles" in capsys.readouterr().err


def test_missing_config_file_exit_one(tmp_path, capsys):
    out = tmp_path / "never"
    rc = run_cli(["identities", "--config", tmp_path / "nope.ini", "--out", out])
    assert rc == 1
    assert not out.exists()
    capsys.readouterr()


def test_verdict_failure_exit_two(tmp_path, monkeypatch, capsys):
    def forced_fail(cfg, lat, out, stamp):
        return {"note": "forced"}, False, {"t": 1.0}

    monkeypatch.setitem(cli._RUNNERS, "string", forced_fail)
    out = tmp_path / "run"
    rc = run_cli(["string", "--out", out])
    assert rc == 2
    assert "string: FAIL" in capsys.readouterr().out
    assert read_summary(out)["verdict"] is False


def test_threads_env(monkeypatch):
    from fluxlab.spectral import default_threads

    monkeypatch.setenv("FLUXLAB_THREADS", "3")
    assert default_threads() == 3
    monkeypatch.delenv("FLUXLAB_THREADS")
    assert default_threads() >= 1

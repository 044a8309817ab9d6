"""Command-line behaviors: layering, output files, exit codes."""

import json

import numpy as np
import pytest

from qnsc.adversary import NumericInstabilityError
from qnsc.cli import SEED_ENV_VAR, main

KEY = "11" * 32


@pytest.fixture(autouse=True)
def _no_ambient_seed(monkeypatch):
    monkeypatch.delenv(SEED_ENV_VAR, raising=False)


@pytest.fixture()
def small_config(tmp_path):
    path = tmp_path / "small.ini"
    path.write_text(
        "# compact operating point for fast runs\n"
        "m_modes = 4\n"
        "j_phases = 16\n"
        "alpha_sq = 1.0\n"
        "trials = 400\n"
    )
    return str(path)


def run_cli(argv, capsys):
    rc = main(argv)
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


# --- simulate ----------------------------------------------------------------------


def test_simulate_emits_versioned_json(small_config, capsys):
    rc, out, err = run_cli(["simulate", "--config", small_config], capsys)
    assert rc == 0
    doc = json.loads(out)
    assert doc["schema"] == "qnsc-simulate-v1"
    assert doc["params"]["m_modes"] == 4
    assert doc["params"]["j_phases"] == 16
    assert doc["trials"] == 400
    assert doc["master_seed"] == 0
    assert "wall time" in err


def test_simulate_csv_format(small_config, capsys):
    rc, out, _ = run_cli(["simulate", "--config", small_config, "--format", "csv"], capsys)
    assert rc == 0
    assert out.startswith("# schema=qnsc-results-v1\n")


def test_simulate_out_files_are_reproducible(small_config, tmp_path, capsys):
    a = tmp_path / "a"
    b = tmp_path / "b"
    for stem in (a, b):
        rc, _, _ = run_cli(
            ["simulate", "--config", small_config, "--seed", "3", "--out", str(stem)],
            capsys,
        )
        assert rc == 0
    assert a.with_suffix(".json").read_bytes() == b.with_suffix(".json").read_bytes()
    assert a.with_suffix(".csv").read_bytes() == b.with_suffix(".csv").read_bytes()


# --- configuration layering ---------------------------------------------------------


def test_unknown_config_key_exits_1_with_location(tmp_path, capsys):
    path = tmp_path / "bad.ini"
    path.write_text("m_modes = 4\nbogus_knob = 3\n")
    rc, _, err = run_cli(["simulate", "--config", str(path)], capsys)
    assert rc == 1
    assert f"{path}:2" in err
    assert "bogus_knob" in err


def test_unparseable_config_value_exits_1(tmp_path, capsys):
    path = tmp_path / "bad.ini"
    path.write_text("m_modes = four\n")
    rc, _, err = run_cli(["simulate", "--config", str(path)], capsys)
    assert rc == 1
    assert f"{path}:1" in err


def test_missing_config_file_exits_1(capsys):
    rc, _, err = run_cli(["simulate", "--config", "/nonexistent/qnsc.ini"], capsys)
    assert rc == 1
    assert "config" in err


def test_unknown_scenario_exits_1(small_config, capsys):
    rc, _, err = run_cli(
        ["simulate", "--config", small_config, "--scenario", "nope"], capsys
    )
    assert rc == 1
    assert "unknown scenario" in err


def test_seed_precedence_flag_config_env_default(tmp_path, monkeypatch, capsys):
    cfg = tmp_path / "seeded.ini"
    cfg.write_text("m_modes = 2\nj_phases = 4\nalpha_sq = 1.0\ntrials = 50\nseed = 5\n")

    def seed_of(argv):
        rc, out, _ = run_cli(argv, capsys)
        assert rc == 0
        return json.loads(out)["master_seed"]

    assert seed_of(["simulate", "--config", str(cfg), "--seed", "9"]) == 9
    monkeypatch.setenv(SEED_ENV_VAR, "7")
    assert seed_of(["simulate", "--config", str(cfg)]) == 5
    cfg_noseed = tmp_path / "unseeded.ini"
    cfg_noseed.write_text("m_modes = 2\nj_phases = 4\nalpha_sq = 1.0\ntrials = 50\n")
    assert seed_of(["simulate", "--config", str(cfg_noseed)]) == 7
    monkeypatch.delenv(SEED_ENV_VAR)
    assert seed_of(["simulate", "--config", str(cfg_noseed)]) == 0


def test_bad_env_seed_exits_1(small_config, monkeypatch, capsys):
    monkeypatch.setenv(SEED_ENV_VAR, "not-a-number")
    rc, _, err = run_cli(["simulate", "--config", small_config], capsys)
    assert rc == 1
    assert SEED_ENV_VAR in err


# --- sweep --------------------------------------------------------------------------


def test_sweep_orders_rows_lexicographically(tmp_path, capsys):
    cfg = tmp_path / "sweep.ini"
    cfg.write_text(
        "m_modes = 2\nalpha_sq = 1.0\ntrials = 50\n"
        "sweep_j = 16, 4\nsweep_alpha_sq = 4.0, 1.0\n"
    )
    rc, out, _ = run_cli(["sweep", "--config", str(cfg)], capsys)
    assert rc == 0
    lines = out.splitlines()
    assert lines[0] == "# schema=qnsc-results-v1"
    body = [ln.split(",") for ln in lines[2:]]
    assert [(r[2], r[3]) for r in body] == [("4", "1"), ("4", "4"), ("16", "1"), ("16", "4")]


def test_sweep_empty_axis_exits_1(tmp_path, capsys):
    cfg = tmp_path / "sweep.ini"
    cfg.write_text("m_modes = 2\nj_phases = 4\nalpha_sq = 1.0\ntrials = 50\nsweep_j =\n")
    rc, _, err = run_cli(["sweep", "--config", str(cfg)], capsys)
    assert rc == 1
    assert "empty" in err


# --- srm ----------------------------------------------------------------------------


def test_srm_brute_cross_check_on_small_grid(tmp_path, capsys):
    cfg = tmp_path / "srm.ini"
    cfg.write_text("m_modes = 2\nj_phases = 8\nalpha_sq = 0.5\n")
    rc, out, _ = run_cli(["srm", "--config", str(cfg)], capsys)
    assert rc == 0
    doc = json.loads(out)
    assert doc["schema"] == "qnsc-srm-v1"
    assert doc["gram_brute_error"] is not None
    assert doc["agreement"] <= 1e-10


def test_srm_skips_brute_on_large_grid(tmp_path, capsys):
    cfg = tmp_path / "srm.ini"
    cfg.write_text("m_modes = 2\nj_phases = 64\nalpha_sq = 0.5\n")
    rc, out, _ = run_cli(["srm", "--config", str(cfg)], capsys)
    assert rc == 0
    doc = json.loads(out)
    assert doc["gram_brute_error"] is None
    assert 0.0 <= doc["srm_error"] <= 1.0


# --- encrypt / decrypt / attack -----------------------------------------------------


@pytest.fixture()
def cipher_files(tmp_path, capsys):
    pt = tmp_path / "pt.bin"
    ct = tmp_path / "ct.bin"
    pt.write_bytes(np.random.default_rng(99).bytes(64))
    rc, _, err = run_cli(
        [
            "encrypt",
            "--scenario",
            "paper-sec5-stream",
            "--in",
            str(pt),
            "--key",
            KEY,
            "--out",
            str(ct),
        ],
        capsys,
    )
    assert rc == 0
    assert "512 bits -> 128 codewords" in err
    return pt, ct


def test_encrypt_decrypt_noiseless_identity(cipher_files, tmp_path, capsys):
    pt, ct = cipher_files
    rec = tmp_path / "rec.bin"
    rc, _, _ = run_cli(
        [
            "decrypt",
            "--scenario",
            "paper-sec5-stream",
            "--in",
            str(ct),
            "--key",
            KEY,
            "--sigma-ho",
            "0",
            "--out",
            str(rec),
        ],
        capsys,
    )
    assert rc == 0
    assert rec.read_bytes() == pt.read_bytes()


def test_decrypt_requires_a_key(cipher_files, tmp_path, capsys):
    _, ct = cipher_files
    rc, _, err = run_cli(
        ["decrypt", "--in", str(ct), "--out", str(tmp_path / "x.bin")], capsys
    )
    assert rc == 1
    assert "secret key is required" in err


def test_attack_recovers_nothing_beyond_chance(cipher_files, capsys):
    pt, ct = cipher_files
    rc, out, _ = run_cli(
        ["attack", "--in", str(ct), "--truth", str(pt), "--seed", "0"], capsys
    )
    assert rc == 0
    doc = json.loads(out)
    assert doc["schema"] == "qnsc-attack-v1"
    assert doc["n_bits"] == 512
    assert doc["bit_matches"] == round(doc["bit_recovery_rate"] * 512)
    # Chance is 0.5; 3 sigma on 512 bits is 0.0663.
    assert abs(doc["bit_recovery_rate"] - 0.5) <= 0.0663


def test_attack_truth_length_mismatch_exits_1(cipher_files, tmp_path, capsys):
    _, ct = cipher_files
    short = tmp_path / "short.bin"
    short.write_bytes(b"\x00" * 8)
    rc, _, err = run_cli(["attack", "--in", str(ct), "--truth", str(short)], capsys)
    assert rc == 1
    assert "truth" in err


def test_decrypt_rejects_corrupt_frame(tmp_path, capsys):
    bad = tmp_path / "bad.bin"
    bad.write_bytes(b"not a frame at all")
    rc, _, err = run_cli(
        ["decrypt", "--in", str(bad), "--key", KEY, "--out", str(tmp_path / "x")],
        capsys,
    )
    assert rc == 1
    assert "frame" in err


# --- report -------------------------------------------------------------------------


def test_report_writes_csv_and_figures(tmp_path, capsys):
    cfg = tmp_path / "report.ini"
    cfg.write_text(
        "m_modes = 2\nalpha_sq = 1.0\nsweep_j = 16, 64\nsweep_alpha_sq = 1.0, 10.0\n"
    )
    out_dir = tmp_path / "rep"
    rc, out, _ = run_cli(
        ["report", "--config", str(cfg), "--out", str(out_dir)], capsys
    )
    assert rc == 0
    listed = out.splitlines()
    assert len(listed) == 4
    assert (out_dir / "report.csv").read_text().startswith("# schema=qnsc-report-v1")
    for name in ("error_vs_j.png", "masking_ratio.png", "srm_vs_power.png"):
        assert (out_dir / name).stat().st_size > 1000


# --- exit codes ---------------------------------------------------------------------


def test_numeric_failure_exits_2(small_config, monkeypatch, capsys):
    def boom(*args, **kwargs):
        raise NumericInstabilityError("synthetic instability")

    monkeypatch.setattr("qnsc.cli.srm_error_psk", boom)
    rc, _, err = run_cli(["srm", "--config", small_config], capsys)
    assert rc == 2
    assert "numeric failure" in err


def test_bad_flag_exits_1(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--bogus"])
    assert exc.value.code == 1


def test_bad_subcommand_exits_1(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 1


def test_missing_required_input_flag_exits_1(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["encrypt", "--key", KEY, "--out", "x"])
    assert exc.value.code == 1

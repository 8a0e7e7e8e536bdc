"""End-to-end checks for the command line entry points.

Everything goes through ``main(argv)`` directly; no subprocesses.
"""

import hashlib
import json

import numpy as np
import pytest
import yaml

from kickchain.bath import read_schedule_csv
from kickchain.cli import main
from kickchain.observables import read_chain_csv, read_husimi_csv, read_spins_csv


def run_cli(*argv):
    return main([str(a) for a in argv])


def simulate_args(outdir, *, spins=3, periods=6, extra=()):
    return ["simulate", "--spins", spins, "--periods", periods,
            "--outdir", outdir, *extra]


# ---------------------------------------------------------------- simulate

def test_simulate_writes_expected_files(tmp_path, capsys):
    rc = run_cli(*simulate_args(tmp_path / "run"))
    assert rc == 0
    out = tmp_path / "run"
    for name in ("schedule.csv", "spins.csv", "chain.csv", "manifest.json"):
        assert (out / name).is_file()
    assert "simulate" in capsys.readouterr().out


def test_simulate_row_counts(tmp_path):
    run_cli(*simulate_args(tmp_path / "run", spins=3, periods=6))
    spins = read_spins_csv(tmp_path / "run" / "spins.csv")
    chain = read_chain_csv(tmp_path / "run" / "chain.csv")
    # stroboscopic records cover periods 0..K inclusive
    assert len(chain["period"]) == 7
    assert len(spins["period"]) == 7 * 3
    assert set(spins["spin"].astype(int)) == {1, 2, 3}
    assert chain["period"][0] == 0 and chain["period"][-1] == 6
    sched = read_schedule_csv(tmp_path / "run" / "schedule.csv")
    assert sched.n_spins == 3 and sched.n_periods == 6


def test_simulate_seed_determinism(tmp_path):
    extra = ["--bath", "markovian", "--d0", "2.0", "--seed", "7"]
    run_cli(*simulate_args(tmp_path / "a", extra=extra))
    run_cli(*simulate_args(tmp_path / "b", extra=extra))
    for name in ("schedule.csv", "spins.csv", "chain.csv"):
        assert (tmp_path / "a" / name).read_bytes() == \
               (tmp_path / "b" / name).read_bytes()
    run_cli(*simulate_args(
        tmp_path / "c", extra=["--bath", "markovian", "--d0", "2.0",
                               "--seed", "8"]))
    assert (tmp_path / "a" / "schedule.csv").read_bytes() != \
           (tmp_path / "c" / "schedule.csv").read_bytes()


def test_simulate_replays_schedule_file(tmp_path):
    rc = run_cli("schedule", "--spins", "2", "--periods", "4",
                 "--bath", "markovian", "--d0", "2.5", "--seed", "7",
                 "--outdir", tmp_path / "sched")
    assert rc == 0
    source = tmp_path / "sched" / "schedule.csv"
    rc = run_cli("simulate", "--spins", "2", "--outdir", tmp_path / "replay",
                 "--schedule-file", source)
    assert rc == 0
    # the run re-exports exactly the schedule it consumed
    assert (tmp_path / "replay" / "schedule.csv").read_bytes() == \
           source.read_bytes()
    chain = read_chain_csv(tmp_path / "replay" / "chain.csv")
    assert len(chain["period"]) == 5


def test_simulate_schedule_spin_mismatch(tmp_path, capsys):
    run_cli("schedule", "--spins", "2", "--periods", "3",
            "--outdir", tmp_path / "sched")
    rc = run_cli("simulate", "--spins", "4", "--outdir", tmp_path / "run",
                 "--schedule-file", tmp_path / "sched" / "schedule.csv")
    assert rc == 2
    assert "error:" in capsys.readouterr().err


def test_simulate_collision_needs_force(tmp_path, capsys):
    run_cli(*simulate_args(tmp_path / "run", periods=3))
    rc = run_cli(*simulate_args(tmp_path / "run", periods=3))
    assert rc == 2
    assert "--force" in capsys.readouterr().err
    rc = run_cli(*simulate_args(tmp_path / "run", periods=3,
                                extra=["--force"]))
    assert rc == 0


# ---------------------------------------------------------------- manifest

def test_manifest_contents_and_checksums(tmp_path):
    run_cli(*simulate_args(tmp_path / "run", spins=2, periods=4,
                           extra=["--seed", "13"]))
    manifest = json.loads((tmp_path / "run" / "manifest.json").read_text())
    assert manifest["command"] == "simulate"
    assert manifest["seeds"] == [13]
    assert manifest["config"]["chain"]["n_spins"] == 2
    assert manifest["config"]["run"]["periods"] == 4
    assert manifest["duration_seconds"] > 0
    assert set(manifest["artifacts"]) == {"schedule.csv", "spins.csv",
                                          "chain.csv"}
    for rel, digest in manifest["artifacts"].items():
        blob = (tmp_path / "run" / rel).read_bytes()
        assert hashlib.sha256(blob).hexdigest() == digest


# ------------------------------------------------------------- config merge

def test_set_overrides_reach_manifest(tmp_path):
    run_cli(*simulate_args(tmp_path / "run", periods=3,
                           extra=["--set", "chain.j_over_w0=0.25",
                                  "--set", "sigma=0.4"]))
    config = json.loads(
        (tmp_path / "run" / "manifest.json").read_text())["config"]
    assert config["chain"]["j_over_w0"] == 0.25
    # bare keys resolve when unique across sections
    assert config["bath"]["sigma"] == 0.4


def test_set_rejects_unknown_field(tmp_path, capsys):
    rc = run_cli(*simulate_args(tmp_path / "run",
                                extra=["--set", "chain.nope=1"]))
    assert rc == 2
    assert "unknown config field" in capsys.readouterr().err


def test_set_requires_assignment(tmp_path, capsys):
    rc = run_cli(*simulate_args(tmp_path / "run", extra=["--set", "sigma"]))
    assert rc == 2
    assert "KEY=VALUE" in capsys.readouterr().err


def test_config_file_precedence(tmp_path):
    cfg = tmp_path / "cfg.yaml"
    cfg.write_text(yaml.safe_dump({
        "chain": {"n_spins": 3},
        "bath": {"kind": "stationary"},
        "run": {"periods": 9},
    }))
    # flags beat the file, --set beats the flags
    rc = run_cli("simulate", "--config", cfg, "--outdir", tmp_path / "run",
                 "--periods", "4", "--set", "run.periods=3")
    assert rc == 0
    config = json.loads(
        (tmp_path / "run" / "manifest.json").read_text())["config"]
    assert config["chain"]["n_spins"] == 3
    assert config["bath"]["kind"] == "stationary"
    assert config["run"]["periods"] == 3
    chain = read_chain_csv(tmp_path / "run" / "chain.csv")
    assert len(chain["period"]) == 4


def test_config_file_rejects_unknown_section(tmp_path, capsys):
    cfg = tmp_path / "cfg.yaml"
    cfg.write_text("extras:\n  periods: 3\n")
    rc = run_cli("simulate", "--config", cfg, "--outdir", tmp_path / "run")
    assert rc == 2
    assert "unknown config section" in capsys.readouterr().err


def test_outdir_env_fallback(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("KICKCHAIN_OUTDIR", str(tmp_path / "envruns"))
    rc = run_cli("simulate", "--spins", "2", "--periods", "3")
    assert rc == 0
    assert (tmp_path / "envruns" / "chain.csv").is_file()


# --------------------------------------------------------------- experiment

def test_experiment_list(capsys):
    rc = run_cli("experiment", "--list")
    assert rc == 0
    out = capsys.readouterr().out
    assert "entropy_vs_J" in out
    assert "plateau_isingz" in out


def test_experiment_requires_preset(capsys):
    rc = run_cli("experiment")
    assert rc == 2
    assert "preset" in capsys.readouterr().err


def test_experiment_unknown_preset(tmp_path, capsys):
    rc = run_cli("experiment", "no_such_thing", "--outdir", tmp_path)
    assert rc == 2
    assert "no_such_thing" in capsys.readouterr().err


def test_experiment_tiny_run(tmp_path):
    rc = run_cli("experiment", "entropy_vs_J", "--outdir", tmp_path,
                 "--periods", "5", "--spins", "2",
                 "--set", "sweep_values=[0.5]", "--set", "seeds=[0]")
    assert rc == 0
    preset_dir = tmp_path / "entropy_vs_J"
    point = preset_dir / "j_over_w0=0.5" / "rep0"
    for name in ("schedule.csv", "spins.csv", "chain.csv"):
        assert (point / name).is_file()
    assert (preset_dir / "summary.csv").is_file()
    manifest = json.loads((preset_dir / "manifest.json").read_text())
    assert manifest["command"] == "experiment entropy_vs_J"
    assert "summary.csv" in manifest["artifacts"]
    chain = read_chain_csv(point / "chain.csv")
    assert len(chain["period"]) == 6


def test_experiment_force_overwrite(tmp_path, capsys):
    args = ("experiment", "entropy_vs_J", "--outdir", tmp_path,
            "--periods", "2", "--spins", "2",
            "--set", "sweep_values=[0.5]", "--set", "seeds=[0]")
    assert run_cli(*args) == 0
    assert run_cli(*args) == 2
    assert "--force" in capsys.readouterr().err
    assert run_cli(*args, "--force") == 0


def test_experiment_set_rejects_unknown_field(tmp_path, capsys):
    rc = run_cli("experiment", "entropy_vs_J", "--outdir", tmp_path,
                 "--set", "bogus_knob=1")
    assert rc == 2
    assert "unknown config field" in capsys.readouterr().err


# -------------------------------------------------------------------- husimi

def test_husimi_grid_outputs(tmp_path):
    rc = run_cli("husimi", "--spins", "2", "--periods", "3",
                 "--outdir", tmp_path / "h",
                 "--grid-spins", "1,2", "--grid-periods", "0,3",
                 "--theta-res", "5", "--phi-res", "8")
    assert rc == 0
    names = [f"husimi_spin{s}_period{k}.csv" for s in (1, 2) for k in (0, 3)]
    for name in names:
        assert (tmp_path / "h" / name).is_file()
    grid = read_husimi_csv(tmp_path / "h" / "husimi_spin1_period0.csv")
    assert grid.theta_res == 5 and grid.phi_res == 8
    assert np.all(grid.values >= 0) and np.all(grid.values <= 1)
    # period 0 is the untouched cat state: poles at 1/2, peak on the
    # equator at phi=0 (theta row 2 of 5 is pi/2, phi column 0 is 0)
    assert np.allclose(grid.values[0], 0.5)
    assert grid.values[2, 0] == pytest.approx(1.0, abs=1e-12)


def test_husimi_default_period_is_final(tmp_path):
    rc = run_cli("husimi", "--spins", "2", "--periods", "4",
                 "--outdir", tmp_path / "h",
                 "--theta-res", "4", "--phi-res", "4")
    assert rc == 0
    assert (tmp_path / "h" / "husimi_spin1_period4.csv").is_file()


@pytest.mark.parametrize("flags", [
    ("--grid-spins", "3"),
    ("--grid-periods", "7"),
    ("--grid-spins", "1,x"),
])
def test_husimi_rejects_bad_indices(tmp_path, capsys, flags):
    rc = run_cli("husimi", "--spins", "2", "--periods", "3",
                 "--outdir", tmp_path / "h",
                 "--theta-res", "4", "--phi-res", "4", *flags)
    assert rc == 2
    assert "error:" in capsys.readouterr().err


# ---------------------------------------------------------------- arg parsing

def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        run_cli("--version")
    assert exc.value.code == 0
    assert "kickchain" in capsys.readouterr().out


def test_bad_choice_is_a_usage_error(tmp_path):
    with pytest.raises(SystemExit) as exc:
        run_cli(*simulate_args(tmp_path / "run",
                               extra=["--coupling", "bogus"]))
    assert exc.value.code == 2

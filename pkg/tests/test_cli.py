import json
import subprocess
import sys

import numpy as np
import pytest

from vcmasim import cli, crossbar
from vcmasim.analysis import ExitHistogram, FieldMap
from vcmasim.config import ConfigError, resolve
from vcmasim.montecarlo import read_curve_csv

FAST = ["--set", "solver.t_init=2e-10", "--set", "solver.t_relax=2e-10"]


def run(tmp_path, *args):
    return cli.main(list(args) + ["--out", str(tmp_path)])


def test_validate_exits_zero(capsys):
    assert cli.main(["validate"]) == 0
    assert "FAIL" not in capsys.readouterr().out


def test_sweep_width_outputs_round_trip(tmp_path):
    rc = run(tmp_path, "sweep-width", "--trials", "20", "--seed", "3",
             "--set", "experiment.widths=[1e-9, 1.8e-9]", *FAST)
    assert rc == 0
    curve = read_curve_csv(tmp_path / "sweep-width.csv")
    assert list(curve.x) == [1e-9, 1.8e-9] and all(e.seed == 3 and e.n_trials == 20 for e in curve.estimates)
    head = (tmp_path / "sweep-width.csv").read_text().splitlines()[:2]
    embedded = json.loads(head[0].split(": ", 1)[1])
    assert embedded["seed"] == 3 and embedded["experiment"]["widths"] == [1e-9, 1.8e-9]
    assert embedded["solver"]["t_init"] == 2e-10 and head[1] == "# seed: 3"


def test_replay_and_threads_are_byte_identical(tmp_path):
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    args = ["sweep-amplitude", "--trials", "30", "--seed", "9", "--set", "experiment.amplitudes=[0.7, 0.9]", *FAST]
    assert run(a, *args, "--threads", "1") == 0
    assert run(b, *args, "--threads", "8") == 0
    assert run(c, "sweep-amplitude", "--config", str(a / "sweep-amplitude.config.json")) == 0
    ref = (a / "sweep-amplitude.csv").read_bytes()
    assert (b / "sweep-amplitude.csv").read_bytes() == ref
    assert (c / "sweep-amplitude.csv").read_bytes() == ref


def test_combined_and_half_select(tmp_path):
    common = ["--trials", "10", "--set", "experiment.follow_widths=[1e-9]", *FAST]
    assert run(tmp_path, "combined", *common) == 0
    assert run(tmp_path, "half-select", *common) == 0
    for name in ("combined-combined", "combined-pure-stt", "half-select-full", "half-select-half"):
        assert len(read_curve_csv(tmp_path / f"{name}.csv").x) == 1


def test_field_map_and_exit_hist(tmp_path):
    assert run(tmp_path, "field-map", "--set", "experiment.grid_n=8", "--set", "experiment.precession=true") == 0
    fm = FieldMap.from_csv(tmp_path / "field-map.csv")
    assert fm.m.shape == (3, 64)
    doc = json.loads((tmp_path / "field-map.json").read_text())
    assert set(doc["ordering"]) == {"stiffness", "magnitude"} and "precession_fields" in doc
    assert run(tmp_path, "exit-hist", "--trials", "100", "--set", "experiment.width=1e-9", *FAST) == 0
    _, counts = ExitHistogram.read_csv(tmp_path / "exit-hist.csv")
    summary = json.loads((tmp_path / "exit-hist.json").read_text())
    assert counts.sum() + summary["n_no_exit"] == 100


def test_crossbar_commands(tmp_path):
    assert run(tmp_path, "xbar-write", "--set", "experiment.rows=3", "--set", "experiment.cols=3",
               "--set", "experiment.p_sel=0.97", "--set", "experiment.p_half=0.001") == 0
    doc = json.loads((tmp_path / "xbar-write.json").read_text())
    assert doc["counts"] == {"selected": 1, "half": 4, "unselected": 4}
    assert doc["disturb"]["per_cell_disturb"] == pytest.approx(1 - 0.999 ** 4)
    assert doc["energy"]["unselected"] == 0.0 and doc["config"]["seed"] == 0
    grid = tmp_path / "grid.csv"
    crossbar.write_state_grid(grid, np.array([["P", "AP"], ["AP", "AP"]]))
    assert run(tmp_path, "sneak", "--set", "experiment.rows=2", "--set", "experiment.cols=2",
               "--set", f"experiment.states={grid}") == 0
    doc = json.loads((tmp_path / "sneak.json").read_text())
    assert doc["selected_current"] == pytest.approx(0.7 / 7e3)


def test_bad_input_exit_one(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "seed": 1,\n  "device": {"alpah": 0.1}\n}\n')
    assert run(tmp_path / "o", "sneak", "--config", str(bad)) == 1
    assert f"{bad}:3" in capsys.readouterr().err
    bad.write_text('{\n  "seed": 1,\n  "device": {\n}')
    assert run(tmp_path / "o", "sneak", "--config", str(bad)) == 1
    assert f"{bad}:4" in capsys.readouterr().err
    assert run(tmp_path / "o", "sneak", "--set", "device.alpha=1.5") == 1
    assert run(tmp_path / "o", "sneak", "--bogus") == 1
    assert run(tmp_path / "o", "sneak", "--set", "experiment.rows=\"three\"") == 1
    assert not (tmp_path / "o").exists()


def test_solver_failure_exit_two_leaves_nothing(tmp_path, monkeypatch):
    def boom(*a, **k):
        raise crossbar.SolverError("singular", ["row 1"])
    monkeypatch.setattr(crossbar, "sneak_solve", boom)
    out = tmp_path / "o"
    assert run(out, "sneak") == 2
    assert not out.exists() or not any(out.iterdir())


def test_config_precedence(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"seed": 4, "n_trials": 10, "experiment": {"amplitude": 0.8}}))
    cfg = resolve("exit-hist", str(path), ["experiment.bins=12"], seed=6)
    assert cfg["seed"] == 6 and cfg["n_trials"] == 10
    assert cfg["experiment"]["amplitude"] == 0.8 and cfg["experiment"]["bins"] == 12
    path.write_text(json.dumps({"experiment": {"bins": 12}}))
    with pytest.raises(ConfigError):
        resolve("sneak", str(path))  # experiment keys are per command
    path.write_text(json.dumps({"command": "sneak"}))
    with pytest.raises(ConfigError):
        resolve("exit-hist", str(path))


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "vcmasim", "validate"], capture_output=True, text=True)
    assert out.returncode == 0 and "PASS" in out.stdout

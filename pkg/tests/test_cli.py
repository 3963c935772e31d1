"""Command-line interface: subcommands, config handling, exit codes."""

import json

import pytest

import atomcavity.sweep as sweep
from atomcavity import export
from atomcavity.cli import EXIT_CONFIG, EXIT_OK, EXIT_PARTIAL, EXIT_TOTAL, main


def _write_config(tmp_path, **entries):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(entries))
    return str(path)


def _tiny_grid_config(tmp_path, **extra):
    entries = dict(
        params={"gamma": 1.0, "n_max": 8},
        axes=[
            {"name": "g", "start": 0.6, "stop": 1.2, "steps": 2},
            {"name": "eta", "start": 0.5, "stop": 1.0, "steps": 2},
        ],
    )
    entries.update(extra)
    return _write_config(tmp_path, **entries)


def test_grid_writes_outputs_and_exits_zero(tmp_path, capsys):
    config = _tiny_grid_config(tmp_path)
    out = tmp_path / "out"
    code = main(["grid", "--config", config, "--out", str(out),
                 "--format", "csv,json,svg"])
    assert code == EXIT_OK
    for ext in ("csv", "json", "svg"):
        assert (out / f"grid.{ext}").exists()
    captured = capsys.readouterr()
    assert "4 points, 0 failed" in captured.out


def test_flag_overrides_config(tmp_path):
    config = _tiny_grid_config(tmp_path, params={"gamma": 1.0, "n_max": 8,
                                                 "eta": 0.7})
    out = tmp_path / "out"
    code = main(["grid", "--config", config, "--out", str(out),
                 "--gamma", "0.5", "--format", "json"])
    assert code == EXIT_OK
    document = json.loads((out / "grid.json").read_text())
    assert document["config"]["base"]["gamma"] == 0.5
    assert document["config"]["base"]["eta"] == 0.7  # non-overridden kept


def test_absolute_units_rescale(tmp_path):
    config = _write_config(
        tmp_path,
        units="absolute",
        params={"kappa": 2.0, "g": 1.0, "gamma": 2.0, "n_max": 8},
        axes=[{"name": "eta", "start": 0.5, "stop": 1.0, "steps": 2}],
    )
    out = tmp_path / "out"
    code = main(["grid", "--config", config, "--out", str(out),
                 "--format", "json"])
    assert code == EXIT_OK
    base = json.loads((out / "grid.json").read_text())["config"]["base"]
    assert base["kappa"] == 1.0
    assert base["g"] == 0.5
    assert base["gamma"] == 1.0


def test_config_errors_exit_one(tmp_path, capsys):
    assert main(["grid", "--config", str(tmp_path / "missing.json")]) == EXIT_CONFIG
    bad_json = tmp_path / "bad.json"
    bad_json.write_text("{not json")
    assert main(["grid", "--config", str(bad_json)]) == EXIT_CONFIG
    unknown_key = _write_config(tmp_path, bogus=1)
    assert main(["grid", "--config", unknown_key]) == EXIT_CONFIG
    unknown_param = _write_config(tmp_path, params={"bogus": 1.0})
    assert main(["grid", "--config", unknown_param]) == EXIT_CONFIG
    bad_axis = _write_config(
        tmp_path, axes=[{"name": "nope", "start": 0.1, "stop": 1.0, "steps": 3}]
    )
    assert main(["grid", "--config", bad_axis]) == EXIT_CONFIG
    bad_steps = _write_config(
        tmp_path, axes=[{"name": "g", "start": 0.1, "stop": 1.0, "steps": 1}]
    )
    assert main(["grid", "--config", bad_steps]) == EXIT_CONFIG
    capsys.readouterr()


def test_bad_cli_values_exit_one(tmp_path):
    config = _tiny_grid_config(tmp_path)
    assert main(["grid", "--config", config, "--format", "pdf"]) == EXIT_CONFIG
    assert main(["grid", "--config", config, "--workers", "0"]) == EXIT_CONFIG
    assert main(["grid", "--config", config, "--g", "not-a-number"]) == EXIT_CONFIG
    assert main(["bogus-command"]) == EXIT_CONFIG
    assert main([]) == EXIT_CONFIG


def test_partial_and_total_failures(tmp_path, monkeypatch):
    real = sweep.solve_converged

    def flaky(params, rel_tol):
        if params.eta > 0.7:
            raise RuntimeError("synthetic failure")
        return real(params, rel_tol=rel_tol)

    monkeypatch.setattr(sweep, "solve_converged", flaky)
    config = _tiny_grid_config(tmp_path)
    out = tmp_path / "out"
    code = main(["grid", "--config", config, "--out", str(out)])
    assert code == EXIT_PARTIAL
    # failed rows are present in the CSV with an empty statistics block
    rows = export.read_csv(out / "grid.csv")
    assert len(rows) == 4
    assert sum(1 for r in rows if r["g2"] is None) == 2

    def broken(params, rel_tol):
        raise RuntimeError("synthetic failure")

    monkeypatch.setattr(sweep, "solve_converged", broken)
    assert main(["grid", "--config", config, "--out", str(out)]) == EXIT_TOTAL


def test_phase_command(tmp_path, capsys):
    config = _write_config(tmp_path, params={"g": 0.3, "eta": 0.3, "n_max": 8})
    out = tmp_path / "out"
    code = main(["phase", "--config", config, "--steps", "8",
                 "--out", str(out), "--format", "csv"])
    assert code == EXIT_OK
    rows = export.read_csv(out / "phase.csv")
    assert len(rows) == 8
    assert rows[0]["axis1"] == 0.0
    assert main(["phase", "--config", config, "--steps", "4"]) == EXIT_CONFIG
    capsys.readouterr()


def test_dist_command(tmp_path, capsys):
    out = tmp_path / "out"
    code = main(["dist", "--g", "0.6", "--eta", "0.6", "--n-max", "12",
                 "--out", str(out), "--format", "csv,json"])
    assert code == EXIT_OK
    assert (out / "dist.csv").exists() and (out / "dist.json").exists()
    captured = capsys.readouterr()
    assert "qnbd fit" in captured.out
    assert "fidelity" in captured.out
    # a vacuum point has no distribution to report
    assert main(["dist", "--eta", "0", "--n-max", "8",
                 "--out", str(out)]) == EXIT_TOTAL


def test_validity_command(tmp_path, capsys):
    out = tmp_path / "out"
    code = main(["validity", "--steps", "9", "--out", str(out),
                 "--format", "csv,json"])
    assert code == EXIT_OK
    rows = export.read_csv(out / "validity.csv")
    assert len(rows) == 81
    document = json.loads((out / "validity.json").read_text())
    assert document["kind"] == "validity"
    captured = capsys.readouterr()
    assert "valid" in captured.out
    # range overrides must stay inside the nonclassical quadrant
    assert main(["validity", "--g2-max", "1.5", "--out", str(out)]) == EXIT_CONFIG

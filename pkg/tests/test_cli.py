import json

import pytest

from gdnls.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_version_runs():
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0


def test_trees_count(capsys):
    code, out, _ = run(capsys, "trees", "--count", "1", "1")
    assert code == 0
    assert json.loads(out)["count"] == 8


def test_trees_enumerate(capsys):
    code, out, _ = run(capsys, "trees", "--enumerate", "0", "1")
    payload = json.loads(out)
    assert code == 0
    assert payload["count"] == 1
    assert payload["trees"][0]["kind"] == "node5"


def test_trees_requires_an_action(capsys):
    code, _, err = run(capsys, "trees")
    assert code == 2
    assert "ConfigurationError" in err


def test_trees_depth_cap_resource_error(capsys):
    code, _, err = run(capsys, "trees", "--enumerate", "3", "2")
    assert code == 3
    assert "ResourceError" in err


def test_verify_lemma28_central_value(capsys):
    code, out, _ = run(capsys, "verify", "--lemma", "2.8")
    payload = json.loads(out)
    assert code == 0
    assert abs(payload["central_value_5fold_unit"] - 115.0 / 192.0) < 1e-9


def test_verify_bad_preconditions_exit_2(capsys):
    code, _, err = run(
        capsys, "verify", "--lemma", "2.9", "--N", "4", "--A", "1", "--R", "0.1", "--s", "-1"
    )
    assert code == 2
    assert "ConfigurationError" in err


def test_norms_json(capsys):
    code, out, _ = run(capsys, "norms", "--N", "256", "--A", "16", "--R", "4", "--s", "-1")
    payload = json.loads(out)
    assert code == 0
    assert payload["fl_inf"] == 4.0
    assert payload["fl1"] == pytest.approx(128.0, rel=1e-2)


def test_norms_csv_format(capsys):
    code, out, _ = run(
        capsys, "norms", "--N", "256", "--A", "16", "--R", "4", "--s", "-1", "--format", "csv"
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0].split(",") == ["h_s", "l2", "fl1", "fl_inf"]
    assert len(lines) == 2


def test_output_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert main(["norms", "--N", "256", "--A", "16", "--R", "4", "--output", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_config_file_defaults_with_flag_override(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"N": 256.0, "A": 16.0, "R": 4.0}))
    code, out, _ = run(capsys, "norms", "--config", str(cfg))
    assert code == 0
    base = json.loads(out)["fl_inf"]
    assert base == 4.0
    # explicit flag wins over the config value
    code, out, _ = run(capsys, "norms", "--config", str(cfg), "--R", "8")
    assert json.loads(out)["fl_inf"] == 8.0


def test_config_unknown_keys_rejected(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"N": 256.0, "bogus_knob": 1}))
    code, _, err = run(capsys, "norms", "--config", str(cfg))
    assert code == 2
    assert "bogus_knob" in err


def test_iterate_and_frames_output(capsys, tmp_path):
    frames_path = tmp_path / "out.niqk1"
    code, out, _ = run(
        capsys,
        "iterate",
        "--N", "16", "--A", "4", "--R", "1", "--s", "-1", "--T", "1e-3",
        "--k", "0", "--p", "1",
        "--points-per-block", "8", "--time-steps", "16",
        "--frames-out", str(frames_path),
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["h_s"] > 0
    from gdnls.frames import read_frames

    stored = read_frames(frames_path)
    assert stored.time_grid.steps == 16


def test_solve_mass_report(capsys):
    code, out, _ = run(
        capsys,
        "solve", "--L", "40", "--modes", "256", "--dt", "1e-4", "--T", "0.01",
        "--amplitude", "0.5",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["mass_drift_relative"] < 1e-10
    assert payload["t_final"] == pytest.approx(0.01)


def test_solve_blowup_exit_4(capsys):
    code, _, err = run(
        capsys,
        "solve", "--L", "40", "--modes", "256", "--dt", "1e-4", "--T", "0.05",
        "--amplitude", "200",
    )
    assert code == 4
    assert "AccuracyError" in err


def test_inflate_csv_monotone_ratio(capsys):
    code, out, _ = run(
        capsys,
        "inflate", "--s", "-1", "--delta", "1.0", "--N", "512", "1024",
        "--margin", "4", "--points-per-block", "8", "--time-steps", "16",
        "--j-max", "1", "--format", "csv",
    )
    assert code == 0
    lines = out.splitlines()
    header = lines[0].split(",")
    ratio_col = header.index("ratio")
    ratios = [float(line.split(",")[ratio_col]) for line in lines[1:]]
    assert len(ratios) == 2
    assert ratios[1] > ratios[0]

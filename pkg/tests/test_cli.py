import csv
import json

import numpy as np
import pytest

from biplotmotion import cli
from biplotmotion.cli import RunConfig, execute, main
from biplotmotion.errors import ConfigError, OutputError, UnknownLevelError

CLIMATE = ["--time-var", "Year", "--group-var", "Region"]
GAP = ["--time-var", "year", "--group-var", "continent"]


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_moveplot_facets_with_scaled_vectors(data_dir, tmp_path, capsys):
    out = tmp_path / "gap.svg"
    code, stdout, _ = run(capsys, "moveplot", "--input", data_dir / "gapminder.csv", *GAP,
                          "--scale-var", "3", "--out", out)
    assert code == 0
    svg = out.read_text()
    assert svg.count('class="panel"') == 12
    assert "GPA" not in stdout and "alignment" not in stdout
    assert "explained variance (global)" in stdout


def test_scale_var_multiplies_vectors(data_dir, tmp_path, capsys):
    docs = []
    for k in ("1", "3"):
        out = tmp_path / f"v{k}.json"
        assert run(capsys, "moveplot", "--input", data_dir / "gapminder.csv", *GAP, "--move",
                   "--format", "json", "--scale-var", k, "--out", out)[0] == 0
        docs.append(json.loads(out.read_text()))
    v1 = np.array([[v["x"], v["y"]] for v in docs[0]["frames"][0]["vectors"]])
    v3 = np.array([[v["x"], v["y"]] for v in docs[1]["frames"][0]["vectors"]])
    np.testing.assert_allclose(v3, 3 * v1, rtol=1e-12)


def test_moveplot3_consensus_with_eval(data_dir, tmp_path, capsys):
    out = tmp_path / "c3.svg"
    code, stdout, _ = run(capsys, "moveplot3", "--input", data_dir / "climate.csv", *CLIMATE,
                          "--emit-eval", "--out", out)
    assert code == 0
    assert out.exists()
    for suffix in (".csv", ".json", ".txt", "_fit.svg", "_bias.svg"):
        assert (tmp_path / f"c3_eval{suffix}").exists()
    assert "alignment: GPA iterations=" in stdout
    slices = next(line for line in stdout.splitlines() if line.startswith("slices:"))
    assert len(slices.split()) == 1 + 8
    with open(tmp_path / "c3_eval.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert [r["level"] for r in rows] == [str(y) for y in range(1950, 2030, 10)]


def test_moveplot3_without_emit_eval_writes_plot_only(data_dir, tmp_path, capsys):
    out = tmp_path / "c3.svg"
    assert run(capsys, "moveplot3", "--input", data_dir / "climate.csv", *CLIMATE, "--out", out)[0] == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == ["c3.svg"]


def test_evaluate_with_target_prints_table(data_dir, tmp_path, capsys):
    stem = tmp_path / "ev"
    code, stdout, _ = run(capsys, "evaluate", "--input", data_dir / "climate.csv", *CLIMATE,
                          "--target", data_dir / "climate_target.csv", "--out", stem)
    assert code == 0
    assert "supplied target" in stdout
    lines = stdout.rstrip().splitlines()
    assert lines[-1].split()[0] == "RMSB"
    assert lines[-6].split()[0] == "Target"
    doc = json.loads((tmp_path / "ev.json").read_text())
    assert len(doc) == 8


def test_shadow_with_hulls_is_config_error(data_dir, tmp_path, capsys):
    code, _, err = run(capsys, "moveplot2", "--input", data_dir / "climate.csv", *CLIMATE,
                       "--move", "--shadow", "--hulls", "--out", tmp_path / "x.gif")
    assert code == 2
    assert "--shadow" in err
    assert not list(tmp_path.iterdir())


def test_reflect_changes_only_named_state(data_dir, tmp_path):
    base = RunConfig("moveplot2", data_dir / "climate.csv", "Year", "Region", out=tmp_path / "a.svg")
    refl = RunConfig("moveplot2", data_dir / "climate.csv", "Year", "Region", out=tmp_path / "b.svg",
                     align_time=["1950"], reflect="x")
    a, b = execute(base).states, execute(refl).states
    for sa, sb in zip(a, b):
        if sa.level == "1950":
            np.testing.assert_array_equal(sb.Z[:, 0], sa.Z[:, 0])
            np.testing.assert_array_equal(sb.Z[:, 1], -sa.Z[:, 1])
            np.testing.assert_array_equal(sb.V[:, 1], -sa.V[:, 1])
        else:
            np.testing.assert_array_equal(sb.Z, sa.Z)
            np.testing.assert_array_equal(sb.V, sa.V)


def test_unknown_align_time_names_flag_and_levels(data_dir, tmp_path, capsys):
    code, _, err = run(capsys, "moveplot2", "--input", data_dir / "climate.csv", *CLIMATE,
                       "--align-time", "1945", "--reflect", "x", "--out", tmp_path / "x.svg")
    assert code == 3
    assert "--align-time" in err and "1945" in err and "1950" in err
    with pytest.raises(UnknownLevelError):
        execute(RunConfig("moveplot2", data_dir / "climate.csv", "Year", "Region",
                          out=tmp_path / "y.svg", align_time=["1945"], reflect="x"))


def test_align_time_outside_moveplot2_rejected(data_dir, tmp_path):
    with pytest.raises(ConfigError):
        execute(RunConfig("moveplot3", data_dir / "climate.csv", "Year", "Region",
                          out=tmp_path / "y.svg", align_time=["1950"], reflect="x"))


def test_exit_codes(data_dir, tmp_path, capsys):
    clim = data_dir / "climate.csv"
    # data error: missing column
    code, _, err = run(capsys, "moveplot", "--input", clim, "--time-var", "Decade",
                       "--group-var", "Region", "--out", tmp_path / "a.svg")
    assert code == 3 and "Decade" in err
    # config error: gif without --move
    assert run(capsys, "moveplot", "--input", clim, *CLIMATE, "--format", "gif",
               "--out", tmp_path / "b.gif")[0] == 2
    # config error: missing input file
    assert run(capsys, "moveplot", "--input", tmp_path / "nope.csv", *CLIMATE)[0] == 2
    # numeric error: a variable constant within one level
    rows = list(csv.DictReader(open(clim, newline="")))
    for r in rows:
        if r["Year"] == "1970":
            r["Wind"] = "1.5"
    bad = tmp_path / "const.csv"
    with open(bad, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)
    code, _, err = run(capsys, "moveplot2", "--input", bad, *CLIMATE, "--out", tmp_path / "c.svg")
    assert code == 4 and "Wind" in err
    # output error: parent of --out is a file
    blocker = tmp_path / "file"
    blocker.write_text("x")
    code, _, err = run(capsys, "moveplot", "--input", clim, *CLIMATE, "--out", blocker / "d.svg")
    assert code == 5 and "--out" in err
    # argparse usage errors
    assert run(capsys, "moveplot", "--input", clim)[0] == 2


def test_partial_outputs_removed_on_failure(data_dir, tmp_path, monkeypatch):
    def boom(*a, **k):
        raise OutputError("disk full", flag="--out")

    monkeypatch.setattr(cli, "render_measure_charts", boom)
    cfg = RunConfig("moveplot3", data_dir / "climate.csv", "Year", "Region",
                    out=tmp_path / "c3.svg", emit_eval=True)
    with pytest.raises(OutputError):
        execute(cfg)
    assert not list(tmp_path.iterdir())


def test_svg_frames_directory(data_dir, tmp_path, capsys):
    out = tmp_path / "frames"
    code, stdout, _ = run(capsys, "moveplot", "--input", data_dir / "gapminder.csv", *GAP, "--move",
                          "--format", "svg", "--pause-frames", "2", "--transition-frames", "3",
                          "--out", out)
    assert code == 0
    files = sorted(out.iterdir())
    assert len(files) == 12 * 2 + 11 * 3
    assert "frames: 57" in stdout


def test_runs_are_deterministic(data_dir, tmp_path, capsys):
    blobs = []
    for i in range(2):
        out = tmp_path / f"r{i}.json"
        assert run(capsys, "moveplot3", "--input", data_dir / "climate.csv", *CLIMATE, "--move",
                   "--hulls", "--format", "json", "--out", out)[0] == 0
        blobs.append(out.read_bytes())
    assert blobs[0] == blobs[1]


def test_bool_flag_forms(data_dir, tmp_path, capsys):
    out = tmp_path / "h.json"
    assert run(capsys, "moveplot2", "--input", data_dir / "climate.csv", *CLIMATE, "--move=true",
               "--hulls=false", "--shadow", "--format", "json", "--out", out)[0] == 0
    doc = json.loads(out.read_text())
    assert doc["hulls_enabled"] is False
    assert any(f["shadows"] for f in doc["frames"])
    assert run(capsys, "moveplot2", "--input", data_dir / "climate.csv", *CLIMATE,
               "--hulls=maybe")[0] == 2

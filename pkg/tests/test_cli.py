import json

import pytest

from vidsum.cli import main


@pytest.fixture
def video(tmp_path):
    assert main(["gen-synthetic", "--out", str(tmp_path / "vid"), "--gt-users", "2"]) == 0
    return tmp_path / "vid" / "manifest.json"


class TestGenSynthetic:
    def test_custom_scenes(self, tmp_path, capsys):
        rc = main(
            [
                "gen-synthetic", "--out", str(tmp_path / "v"),
                "--scenes", "30:8,200:8", "--size", "32x24", "--fps", "2.0",
            ]
        )
        assert rc == 0
        manifest = json.loads((tmp_path / "v" / "manifest.json").read_text())
        assert manifest["fps"] == 2.0
        assert manifest["width"] == 32
        assert len(list((tmp_path / "v" / "frames").glob("*.png"))) == 16


class TestSummarizeCli:
    def test_writes_artifacts_and_prints_keyframes(self, video, tmp_path, capsys):
        out = tmp_path / "out"
        rc = main(
            ["summarize", "--manifest", str(video), "--k", "3", "--output", str(out)]
        )
        assert rc == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 3
        assert all(line.startswith("keyframe frame_") for line in lines)
        assert (out / "summary.json").exists()

    def test_flags_override_config_file(self, video, tmp_path, capsys):
        cfg_file = tmp_path / "cfg.json"
        cfg_file.write_text(json.dumps({"hue_bins": 16, "k": 2}))
        out = tmp_path / "out"
        rc = main(
            [
                "summarize", "--manifest", str(video), "--config", str(cfg_file),
                "--hue-bins", "8", "--output", str(out),
            ]
        )
        assert rc == 0
        doc = json.loads((out / "summary.json").read_text())
        assert doc["config"]["hue_bins"] == 8  # flag wins
        assert doc["config"]["k"] == 2  # file survives where no flag given

    def test_kebab_enum_flags(self, video, tmp_path):
        out = tmp_path / "out"
        rc = main(
            [
                "summarize", "--manifest", str(video), "--output", str(out),
                "--temporal-norm", "iou-divide", "--provider", "spectral-residual",
                "--fusion", "harmonic",
            ]
        )
        assert rc == 0
        doc = json.loads((out / "summary.json").read_text())
        assert doc["config"]["temporal_norm"] == "iou_divide"
        assert doc["config"]["provider"]["kind"] == "spectral_residual"
        assert doc["config"]["fusion"]["operator"] == "harmonic"

    def test_missing_map_diagnostic_and_exit_code(self, video, capsys):
        rc = main(
            ["summarize", "--manifest", str(video), "--provider", "precomputed"]
        )
        assert rc == 1
        err = capsys.readouterr().err
        assert "MissingMap" in err
        assert "ingestion" in err  # module named in the diagnostic

    def test_bad_manifest_path(self, capsys):
        rc = main(["summarize", "--manifest", "/nonexistent/m.json"])
        assert rc == 1
        assert "ingestion" in capsys.readouterr().err


class TestEvalCli:
    def test_eval_prints_mean_f(self, video, tmp_path, capsys):
        rc = main(["eval", "--manifest", str(video), "--output", str(tmp_path / "e")])
        assert rc == 0
        out = capsys.readouterr().out
        assert "mean_f=1.0000" in out

    def test_eval_without_gt_fails(self, tmp_path, capsys):
        assert main(["gen-synthetic", "--out", str(tmp_path / "nogt")]) == 0
        rc = main(["eval", "--manifest", str(tmp_path / "nogt" / "manifest.json")])
        assert rc == 1


class TestGridCli:
    def test_grid_runs_and_writes_csv(self, tmp_path, capsys):
        from vidsum.synthetic import generate_dataset

        dataset = generate_dataset(tmp_path / "ds", n_videos=2, gt_users=1)
        out = tmp_path / "gridout"
        rc = main(
            [
                "grid", "--grid", "fusion-table",
                "--manifest", str(dataset), "--output", str(out),
            ]
        )
        assert rc == 0
        assert (out / "grid_fusion-table.csv").exists()
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 8

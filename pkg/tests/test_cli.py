import json
import shutil

import beescreen
from beescreen.cli import main
from conftest import FIXTURES
from test_manifest_pipeline import write_workspace

TABLE = str(beescreen.mode_table_fixture_path())


class TestScreenCommand:
    def test_csv_to_stdout(self, capsys):
        assert main(["screen", "--fixture", TABLE]) == 0
        out = capsys.readouterr().out
        assert out.splitlines()[0].startswith("ligand,")
        assert "VD3,-6.8500" in out

    def test_json_selected_set(self, capsys):
        assert main(["screen", "--fixture", TABLE, "--format", "json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["selected"] == ["VD3", "D2V"]

    def test_threshold_flags_forwarded(self, capsys):
        assert main(
            ["screen", "--fixture", TABLE, "--format", "json", "--margin", "10"]
        ) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["selected"] == []

    def test_out_dir_writes_artifacts(self, tmp_path, capsys):
        out = tmp_path / "artifacts"
        assert main(["screen", "--fixture", TABLE, "--out-dir", str(out)]) == 0
        for name in ("report.csv", "report.json", "chart.svg", "chart.png"):
            assert (out / name).exists()

    def test_missing_fixture_is_usage_error(self, capsys):
        assert main(["screen", "--fixture", "nope.csv"]) == 2

    def test_idempotent_bytes(self, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        main(["screen", "--fixture", TABLE, "--out-dir", str(out1)])
        main(["screen", "--fixture", TABLE, "--out-dir", str(out2)])
        assert (out1 / "report.csv").read_bytes() == (out2 / "report.csv").read_bytes()
        assert (out1 / "chart.svg").read_bytes() == (out2 / "chart.svg").read_bytes()


class TestIsolateCommand:
    def test_isolate_chain_a(self, tmp_path, capsys):
        src = FIXTURES / "oligomer.pdb"
        dst = tmp_path / "isolated.pdb"
        assert main(
            ["isolate", "--keep", "A", "--drop-hetero", str(src), str(dst)]
        ) == 0
        chains = {
            line[21]
            for line in dst.read_text().splitlines()
            if line.startswith(("ATOM", "HETATM"))
        }
        assert chains == {"A"}

    def test_unknown_chain_is_usage_error(self, tmp_path, capsys):
        src = FIXTURES / "oligomer.pdb"
        assert main(
            ["isolate", "--keep", "Z", str(src), str(tmp_path / "out.pdb")]
        ) == 2


class TestGridgenCommand:
    def test_emits_six_keys(self, capsys):
        assert main(["gridgen", "--margin", "4", str(FIXTURES / "mrjp1_receptor.pdbqt")]) == 0
        out = capsys.readouterr().out
        keys = [line.split(" = ")[0] for line in out.splitlines()]
        assert keys == ["center_x", "center_y", "center_z", "size_x", "size_y", "size_z"]


class TestClasevalCommand:
    def test_csv_output(self, capsys):
        assert main(["claseval", "--pairs", str(FIXTURES / "pairs.csv")]) == 0
        out = capsys.readouterr().out
        assert out.splitlines()[0] == "class,precision,recall"

    def test_two_class_mapping(self, capsys):
        assert main(
            [
                "claseval",
                "--pairs",
                str(FIXTURES / "pairs.csv"),
                "--mapping",
                "two_class",
                "--format",
                "json",
            ]
        ) == 0
        payload = json.loads(capsys.readouterr().out)
        assert set(payload["labels"]) == {"native", "honeybee_invasive"}

    def test_unknown_label_is_usage_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("martian_bee,bumblebee\n")
        assert main(["claseval", "--pairs", str(bad)]) == 2


class TestRunCommand:
    def test_mock_pipeline_exit_zero(self, tmp_path, capsys):
        manifest = write_workspace(tmp_path)
        out_dir = tmp_path / "out"
        assert main(["run", "--manifest", str(manifest), "--out-dir", str(out_dir)]) == 0
        assert "selected:" in capsys.readouterr().out
        assert (out_dir / "report.json").exists()

    def test_missing_input_exit_two(self, tmp_path, capsys):
        manifest = write_workspace(tmp_path)
        shutil.rmtree(tmp_path / "ligands")
        out_dir = tmp_path / "out"
        assert main(["run", "--manifest", str(manifest), "--out-dir", str(out_dir)]) == 2
        assert not out_dir.exists()

    def test_failing_engine_exit_one(self, tmp_path, capsys):
        manifest = write_workspace(tmp_path)
        out_dir = tmp_path / "out"
        status = main(
            [
                "run",
                "--manifest",
                str(manifest),
                "--out-dir",
                str(out_dir),
                "--engine",
                "false {config}",
            ]
        )
        assert status == 1
        assert (out_dir / "summary.txt").exists()


class TestReportCommand:
    def test_reemit_csv_from_json(self, tmp_path, capsys):
        out = tmp_path / "artifacts"
        main(["screen", "--fixture", TABLE, "--out-dir", str(out)])
        capsys.readouterr()
        assert main(["report", "--report", str(out / "report.json")]) == 0
        assert capsys.readouterr().out == (out / "report.csv").read_text()

    def test_chart_svg_from_json(self, tmp_path, capsys):
        out = tmp_path / "artifacts"
        main(["screen", "--fixture", TABLE, "--out-dir", str(out)])
        svg_path = tmp_path / "again.svg"
        assert main(
            ["report", "--report", str(out / "report.json"), "--chart", str(svg_path)]
        ) == 0
        assert svg_path.read_bytes() == (out / "chart.svg").read_bytes()

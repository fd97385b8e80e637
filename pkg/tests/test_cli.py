import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from eirlab import load_predictions
from eirlab.cli import main
from eirlab.lab.ensemble import read_sweep_csv

E1_CSV = "# K=2 m=4 M=3\nlabels,0,0,1,1\nh1,0,0,1,0\nh2,0,1,1,1\nh3,1,0,1,1\n"


@pytest.fixture
def e1_file(tmp_path):
    p = tmp_path / "e1.csv"
    p.write_text(E1_CSV)
    return p


def sweep_config(tmp_path, **over):
    conf = {
        "family": "cart",
        "grid": [2, 8, 64],
        "M": 3,
        "seed": 0,
        "dataset": {"generator": "blobs", "n": 80, "d": 4, "class_sep": 3.0, "label_noise": 0.1, "seed": 0},
    }
    conf.update(over)
    p = tmp_path / "sweep.json"
    p.write_text(json.dumps(conf))
    return p


class TestAnalyze:
    def test_e1_report(self, e1_file, tmp_path):
        out = tmp_path / "out"
        assert main(["analyze", str(e1_file), "--out", str(out)]) == 0
        report = json.loads((out / "report.json").read_text())
        assert report["schema_version"] == 1
        assert report["eir"] == pytest.approx(1.0, abs=1e-15)
        assert report["der"] == pytest.approx(4 / 3, abs=1e-15)
        assert report["competent"] is True
        for name in ("bounds.csv", "bounds.json", "competence.csv"):
            assert (out / name).exists()

    def test_global_flags_before_subcommand(self, e1_file, tmp_path):
        out = tmp_path / "o"
        assert main(["--out", str(out), "--tie-rule", "pessimistic", "analyze", str(e1_file)]) == 0
        assert json.loads((out / "report.json").read_text())["tie_rule"] == "pessimistic"

    def test_format_json_only(self, e1_file, tmp_path):
        assert main(["analyze", str(e1_file), "--out", str(tmp_path), "--format", "json"]) == 0
        assert (tmp_path / "report.json").exists() and not (tmp_path / "bounds.csv").exists()

    def test_pathology_strict_skips_conditional(self, tmp_path, capsys):
        assert main(["pathological", "example1", "--epsilon", "0.1", "--m", "10", "--out", str(tmp_path)]) == 0
        capsys.readouterr()
        f = tmp_path / "pathological_example1.csv"
        assert main(["analyze", str(f), "--out", str(tmp_path), "--strict"]) == 0
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["avg_error"] == pytest.approx(0.6, abs=1e-12)
        assert report["competent"] is False
        rows = (tmp_path / "competence.csv").read_text().splitlines()[1:]
        assert any(float(r.split(",")[2]) > float(r.split(",")[1]) for r in rows)

    def test_missing_file(self, tmp_path, capsys):
        assert main(["analyze", str(tmp_path / "nope.csv")]) == 1
        assert "nope.csv" in capsys.readouterr().err

    def test_malformed_file(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("# K=2 m=1 M=1\nlabels,0\nh1,5\n")
        assert main(["analyze", str(p), "--out", str(tmp_path)]) == 1

    def test_svg(self, e1_file, tmp_path):
        assert main(["analyze", str(e1_file), "--out", str(tmp_path), "--svg"]) == 0
        ET.fromstring((tmp_path / "competence.svg").read_text())

    def test_bad_flag_values(self, e1_file):
        assert main(["analyze", str(e1_file), "--tie-rule", "coin"]) == 2
        assert main(["analyze", str(e1_file), "--slack", "-1"]) == 2
        assert main([]) == 2


class TestOtherCommands:
    def test_competence_strict(self, tmp_path, capsys):
        main(["pathological", "example1", "--epsilon", "0.1", "--out", str(tmp_path)])
        f = tmp_path / "pathological_example1.csv"
        assert main(["competence", str(f), "--out", str(tmp_path)]) == 0
        assert main(["competence", str(f), "--out", str(tmp_path), "--strict"]) == 3
        assert main(["competence", str(f), "--out", str(tmp_path), "--strict", "--slack", "1"]) == 0
        lines = (tmp_path / "competence_curve.csv").read_text().splitlines()
        assert len(lines) == 52

    def test_bounds(self, e1_file, tmp_path, capsys):
        assert main(["bounds", str(e1_file), "--out", str(tmp_path), "--strict"]) == 0
        table = json.loads((tmp_path / "bounds.json").read_text())
        assert table["second_order_ub"] == pytest.approx(1 / 6)

    def test_pathological_example2(self, tmp_path, capsys):
        code = main(["pathological", "example2", "--delta", "0.1", "--epsilon", "0.05", "--m", "10", "--out", str(tmp_path)])
        assert code == 0
        audit = json.loads(capsys.readouterr().out)
        assert audit["ok"] is True
        assert audit["measured"]["margin_mean"] == pytest.approx(0.78, abs=1e-12)
        main(["analyze", str(tmp_path / "pathological_example2.csv"), "--out", str(tmp_path)])
        assert json.loads((tmp_path / "report.json").read_text())["margin_mean"] == pytest.approx(0.78, abs=1e-12)

    def test_pathological_bad_count(self, tmp_path):
        args = ["pathological", "example2", "--delta", "0.1", "--epsilon", "0.05", "--m", "7", "--out", str(tmp_path)]
        assert main(args) == 2


class TestSweep:
    def test_cart_sweep(self, tmp_path, capsys):
        out = tmp_path / "out"
        assert main(["train-sweep", str(sweep_config(tmp_path)), "--out", str(out), "--svg"]) == 0
        rows = read_sweep_csv((out / "sweep.csv").read_text())
        assert [r["capacity"] for r in rows] == [2, 8, 64]
        data = json.loads((out / "sweep.json").read_text())
        assert data["schema_version"] == 1
        assert data["interpolation_threshold"] == 64
        root = ET.fromstring((out / "sweep.svg").read_text())
        ns = {"s": "http://www.w3.org/2000/svg"}
        names = {p.get("data-name") for p in root.iterfind(".//s:path[@class='series']", ns)}
        assert names == {"EIR", "DER"}
        line = root.find(".//s:line[@class='threshold']", ns)
        assert line is not None and line.get("stroke-dasharray")

    def test_empty_grid(self, tmp_path):
        assert main(["train-sweep", str(sweep_config(tmp_path, grid=[]))]) == 2

    @pytest.mark.parametrize("over", [{"grid": [0, 2]}, {"family": "svm"}, {"M": 0}, {"family_params": {"depth": 3}},
                                      {"dataset": {"generator": "moons"}}, {"dataset": {"K": 20}}])
    def test_bad_config(self, tmp_path, over):
        assert main(["train-sweep", str(sweep_config(tmp_path, **over)), "--out", str(tmp_path)]) == 2

    def test_csv_dataset_path(self, tmp_path):
        rng = np.random.default_rng(0)
        rows = [f"{int(a > 0)},{a!r},{b!r}" for a, b in rng.standard_normal((60, 2)).tolist()]
        (tmp_path / "d.csv").write_text("\n".join(rows) + "\n")
        conf = sweep_config(tmp_path, dataset={"path": "d.csv"}, grid=[2, 4])
        assert main(["train-sweep", str(conf), "--out", str(tmp_path / "o")]) == 0

    def test_missing_config(self, tmp_path):
        assert main(["train-sweep", str(tmp_path / "none.json")]) == 1


def test_outputs_reingestible(e1_file, tmp_path):
    main(["pathological", "example1", "--epsilon", "0.1", "--out", str(tmp_path)])
    pm = load_predictions(tmp_path / "pathological_example1.csv")
    assert pm.weights.tolist() == [0.4, 0.6]
    main(["analyze", str(e1_file), "--out", str(tmp_path)])
    json.loads((tmp_path / "report.json").read_text())
    json.loads((tmp_path / "bounds.json").read_text())


@pytest.mark.parametrize("cmd", ["analyze", "train-sweep"])
def test_byte_identical_reruns(cmd, e1_file, tmp_path):
    arg = str(e1_file) if cmd == "analyze" else str(sweep_config(tmp_path))
    outs = []
    for k in range(2):
        out = tmp_path / f"run{k}"
        assert main([cmd, arg, "--out", str(out), "--seed", "5"]) == 0
        outs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
    assert outs[0] == outs[1] and outs[0]

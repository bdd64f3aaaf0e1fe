import json

import numpy as np
import pytest

from padeconv.cli import EXIT_CONFIG, EXIT_IO, EXIT_NUMERICAL, EXIT_OK, main


def _config(configs_dir, tmp_path, name="two_pole.json", **changes):
    """Copy of a shipped config with a coarse grid and the given section updates"""
    data = json.loads((configs_dir / name).read_text())
    data.setdefault("region", {}).update({"nx": 61, "ny": 61})
    for section, values in changes.items():
        data.setdefault(section, {}).update(values)

    path = tmp_path / f"config_{len(list(tmp_path.glob('config_*')))}.json"
    path.write_text(json.dumps(data))
    return path


def _read_csv(path):
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# config_sha256=")
    assert len(lines[0]) == len("# config_sha256=") + 64
    return lines[1].split(","), [line.split(",") for line in lines[2:]]


def test_coeffs_two_pole(configs_dir, tmp_path, capsys):
    out = tmp_path / "out"
    code = main(["coeffs", "-c", str(configs_dir / "two_pole.json"), "-o", str(out), "-N", "5"])
    assert code == EXIT_OK
    assert str(out / "coeffs.csv") in capsys.readouterr().out

    header, rows = _read_csv(out / "coeffs.csv")
    assert header == ["k", "re", "im"]
    assert [int(r[0]) for r in rows] == list(range(6))
    values = [complex(float(r[1]), float(r[2])) for r in rows]
    assert np.allclose(values, [2, 0, 2, 0, 2, 0], atol=1e-14)


def test_coeffs_single_pole(configs_dir, tmp_path):
    out = tmp_path / "out"
    assert main(["coeffs", "-c", str(configs_dir / "single_pole.json"), "-o", str(out)]) == 0

    _, rows = _read_csv(out / "coeffs.csv")
    assert len(rows) == 41
    assert np.allclose([float(r[1]) for r in rows], -1)


def test_cvals(configs_dir, tmp_path):
    out = tmp_path / "out"
    assert main(["cvals", "-c", str(configs_dir / "two_pole.json"), "-o", str(out)]) == 0

    data = json.loads((out / "cvals.json").read_text())
    assert len(data["config_hash"]) == 64
    assert (data["nu"], data["lambda"]) == (2, 2)
    assert data["pole"] == [1, 2]
    assert [c["re"] for c in data["C"]] == pytest.approx([-0.25, 0.25])
    assert data["row_kinds"] == {
        "0": "montessus_inner",
        "1": "last_intermediate",
        "2": "montessus_full",
    }


def test_cvals_example_numbering(configs_dir, tmp_path):
    out = tmp_path / "out"
    assert main(["cvals", "-c", str(configs_dir / "torus_example.json"), "-o", str(out)]) == 0

    data = json.loads((out / "cvals.json").read_text())
    assert (data["nu"], data["lambda"]) == (3, 4)
    # Dominant poles sorted by argument: sqrt(5), sqrt(2), sqrt(3) in turns
    assert data["pole"] == [3, 1, 2]

    by_pole = {
        pole: complex(c["re"], c["im"]) for pole, c in zip(data["pole"], data["C"])
    }
    assert by_pole[1] == pytest.approx(0.70400 + 0.17095j, abs=1e-4)
    assert by_pole[2] == pytest.approx(0.07853 + 0.17437j, abs=1e-4)
    assert by_pole[3] == pytest.approx(0.29275 + 0.04487j, abs=1e-4)


@pytest.mark.slow
def test_region_example_curve_of_first_pole(configs_dir, tmp_path):
    out = tmp_path / "out"
    assert main(["region", "-c", str(configs_dir / "torus_example.json"), "-o", str(out)]) == 0

    header, rows = _read_csv(out / "curves.csv")
    assert header[:3] == ["j", "pole", "component"]
    components = {}
    for j, pole, component, *_ in rows:
        components.setdefault(pole, set()).add(component)
        assert int(j) in (1, 2, 3)

    assert sorted(components) == ["1", "2", "3"]
    assert len(components["1"]) == 2


def test_region(configs_dir, tmp_path):
    out = tmp_path / "out"
    config = _config(configs_dir, tmp_path)
    assert main(["region", "-c", str(config), "-o", str(out)]) == 0

    header, rows = _read_csv(out / "region.csv")
    assert header == ["x", "y", "gmax", "in_n", "in_u", "in_uf"]
    assert len(rows) == 61 * 61
    assert {r[3] for r in rows} == {"0", "1"}

    header, rows = _read_csv(out / "curves.csv")
    assert header == ["j", "pole", "component", "vertex", "x", "y"]
    assert {(r[0], r[1]) for r in rows} == {("1", "1"), ("2", "2")}
    assert max(abs(float(r[4])) for r in rows) <= 0.05

    _, rows = _read_csv(out / "nf_samples.csv")
    assert len(rows) == 25

    svg = (out / "figure.svg").read_text()
    assert "config_sha256=" in svg
    for layer in ("region_mask", "disk", "curves_j1", "curves_j2", "poles", "nf_points"):
        assert f'<g id="{layer}">' in svg


def test_verify(configs_dir, tmp_path):
    out = tmp_path / "out"
    config = _config(configs_dir, tmp_path)
    assert main(["verify", "-c", str(config), "-o", str(out)]) == 0

    report = json.loads((out / "verify_report.json").read_text())
    assert report["convergence"]["summary"]["verdict"] == "consistent"
    assert report["compact"]["certified_margin"] >= 0.2
    assert report["subsequence"]["indices"] == [1, 3, 5, 7, 9]
    assert report["subsequence"]["max_zero_mismatch"] < 1e-8

    header, rows = _read_csv(out / "errors.csv")
    assert header == ["n", "sup_error", "residual"]
    assert len(rows) == 36

    _, rows = _read_csv(out / "poles.csv")
    assert {int(r[0]) % 2 for r in rows} == {1}
    assert max(float(r[3]) for r in rows) < 1e-8


def test_runs_are_reproducible(configs_dir, tmp_path):
    config = _config(configs_dir, tmp_path)
    first, second = tmp_path / "first", tmp_path / "second"
    assert main(["all", "-c", str(config), "-o", str(first), "-N", "10"]) == 0
    assert main(["all", "-c", str(config), "-o", str(second), "-N", "10"]) == 0

    names = sorted(p.name for p in first.iterdir())
    assert names == sorted(p.name for p in second.iterdir())
    assert len(names) == 9
    for name in names:
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_precision_override_changes_the_hash(configs_dir, tmp_path):
    double, extended = tmp_path / "double", tmp_path / "extended"
    config = str(configs_dir / "single_pole.json")
    assert main(["cvals", "-c", config, "-o", str(double)]) == 0
    assert main(["cvals", "-c", config, "-o", str(extended), "-p", "extended:30"]) == 0

    first = json.loads((double / "cvals.json").read_text())
    second = json.loads((extended / "cvals.json").read_text())
    assert first["config_hash"] != second["config_hash"]
    assert first["C"] == second["C"]


def test_invalid_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{")
    assert main(["cvals", "-c", str(path), "-o", str(tmp_path / "out")]) == EXIT_CONFIG


def test_invalid_config(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"model": {"radius": 2, "poles": [{"re": 0, "im": 0}]}}))
    assert main(["cvals", "-c", str(path), "-o", str(tmp_path / "out")]) == EXIT_CONFIG


def test_missing_config(tmp_path):
    path = tmp_path / "missing.json"
    assert main(["cvals", "-c", str(path), "-o", str(tmp_path / "out")]) == EXIT_IO


def test_unreachable_tau0(configs_dir, tmp_path):
    config = _config(configs_dir, tmp_path, verify={"tau0": [0, "1/4"]})
    code = main(["verify", "-c", str(config), "-o", str(tmp_path / "out")])
    assert code == EXIT_NUMERICAL


def test_bad_precision_argument(configs_dir):
    with pytest.raises(SystemExit):
        main(["cvals", "-c", str(configs_dir / "two_pole.json"), "-p", "quad"])

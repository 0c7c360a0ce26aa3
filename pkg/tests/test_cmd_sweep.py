import pandas as pd
from simoe.cli import main


def test_cmd_sweep(tmp_path) -> None:
    code = main([
        "sweep", "--matrix", "./tests/test_data/short_matrix.yaml", "--output", str(tmp_path)
    ])
    assert code == 0
    report = pd.read_csv(tmp_path / "short_matrix.csv")
    assert len(report) == 8
    assert (tmp_path / "short_matrix_manifest.json").is_file()


def test_cmd_sweep_missing_matrix(tmp_path) -> None:
    assert main(["sweep", "--matrix", str(tmp_path / "none.yaml")]) == 3


def test_cmd_sweep_modes_rates_rerun(tmp_path) -> None:
    matrix = "./tests/test_data/modes_rates_matrix.yaml"
    assert main(["sweep", "--matrix", matrix, "--output", str(tmp_path / "first")]) == 0
    assert main(["sweep", "--matrix", matrix, "--output", str(tmp_path / "second")]) == 0
    first = (tmp_path / "first" / "modes_rates_matrix.csv").read_bytes()
    second = (tmp_path / "second" / "modes_rates_matrix.csv").read_bytes()
    assert first == second
    report = pd.read_csv(tmp_path / "first" / "modes_rates_matrix.csv")
    assert len(report) == 15
    assert sorted(set(report["mode"])) == ["cloud_only", "collaborative", "edge_only"]


def test_cmd_sweep_from_manifest(tmp_path) -> None:
    matrix = "./tests/test_data/short_matrix.yaml"
    assert main(["sweep", "--matrix", matrix, "--output", str(tmp_path / "first")]) == 0
    manifest = tmp_path / "first" / "short_matrix_manifest.json"
    assert main(["sweep", "--matrix", str(manifest), "--output", str(tmp_path / "again")]) == 0
    for name in ("short_matrix.csv", "short_matrix_manifest.json"):
        assert (tmp_path / "first" / name).read_bytes() == (tmp_path / "again" / name).read_bytes()


def test_cmd_sweep_bad_axes(tmp_path) -> None:
    matrix = tmp_path / "bad_axes.yaml"
    matrix.write_text("base: {seed: 1}\naxes: [mode, request_rate]\n")
    assert main(["sweep", "--matrix", str(matrix), "--output", str(tmp_path)]) == 1

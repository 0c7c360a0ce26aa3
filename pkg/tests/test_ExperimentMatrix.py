import json
import pytest
import xarray as xr
from simoe.config import read_config_dict
from simoe.errors import ConfigError
from simoe.simoe import ExperimentMatrix


def test_ExperimentMatrix_from_file() -> None:
    matrix = ExperimentMatrix.from_file("./tests/test_data/short_matrix.yaml")
    assert matrix.name == "short_matrix"
    assert len(matrix.points()) == 8
    assert matrix.points()[0] == {"mode": "cloud_only", "request_rate": 2.0, "seed": 1}
    assert [cfg.seed for cfg in matrix.configs()[:2]] == [1, 2]
    assert "Runs: 8" in str(matrix)


def test_ExperimentMatrix_report() -> None:
    matrix = ExperimentMatrix.from_file("./tests/test_data/short_matrix.yaml")
    report = matrix.report()
    assert list(report.columns[:3]) == ["mode", "request_rate", "seed"]
    assert len(report) == 8
    assert report.mode.tolist() == ["cloud_only"] * 4 + ["collaborative"] * 4
    assert report.seed.tolist() == [1, 2] * 4
    dataset = matrix.run()
    assert isinstance(dataset, xr.Dataset)
    assert dict(dataset.sizes) == {"mode": 2, "request_rate": 2, "seed": 2}


def test_ExperimentMatrix_to_csv(tmp_path) -> None:
    matrix = ExperimentMatrix.from_file("./tests/test_data/short_matrix.yaml")
    csv_path, manifest_path = matrix.to_csv(str(tmp_path))
    assert csv_path.endswith("short_matrix.csv")
    with open(manifest_path) as manifest_file:
        manifest = json.load(manifest_file)
    assert manifest["config_hash"] == matrix.matrix_hash()
    assert manifest["seed"] == [1, 2]
    assert manifest["outputs"] == ["short_matrix.csv"]


def test_ExperimentMatrix_limits() -> None:
    base = read_config_dict("./tests/test_data/short.yaml")
    with pytest.raises(ConfigError) as error:
        ExperimentMatrix(base, {"request_rate": [2.0, 4.0, 6.0]}, [1, 2], max_runs=4)
    assert error.value.field == "max_runs"
    with pytest.raises(ConfigError):
        ExperimentMatrix(base, {"seed": [1, 2]}, [1])
    with pytest.raises(ConfigError):
        ExperimentMatrix(base, {"request_rate": [2.0, 2.0]}, [1])
    with pytest.raises(ConfigError):
        ExperimentMatrix(base, {"request_rate": []}, [1])
    with pytest.raises(ConfigError):
        ExperimentMatrix(base, {"request_rate": [2.0]}, [])


def test_ExperimentMatrix_invalid_point() -> None:
    base = read_config_dict("./tests/test_data/short.yaml")
    matrix = ExperimentMatrix(base, {"num_experts": [8, 12]}, [1])
    with pytest.raises(ConfigError):
        matrix.configs()


def test_ExperimentMatrix_from_manifest(tmp_path) -> None:
    matrix = ExperimentMatrix.from_file("./tests/test_data/short_matrix.yaml")
    _, manifest_path = matrix.to_csv(str(tmp_path))
    replayed = ExperimentMatrix.from_file(manifest_path)
    assert replayed.name == "short_matrix"
    assert replayed.seeds == [1, 2]
    assert replayed.axes == matrix.axes
    assert replayed.matrix_hash() == matrix.matrix_hash()


def test_ExperimentMatrix_axes_type() -> None:
    base = read_config_dict("./tests/test_data/short.yaml")
    with pytest.raises(ConfigError) as error:
        ExperimentMatrix(base, ["request_rate"], [1])
    assert error.value.field == "axes"
    with pytest.raises(ConfigError) as error:
        ExperimentMatrix(base, {"request_rate": 2.0}, [1])
    assert error.value.field == "axes.request_rate"

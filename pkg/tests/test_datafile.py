import json

import numpy as np
import pytest

import datafile
import gaussian
import manifold
import mixture
from errors import ArtifactError, ValidationError
from gaussian import GaussianParams
from manifold import Dataset, ManifoldId
from mixture import MixtureModel


@pytest.mark.parametrize("spec", ["hpd:2", "toeplitz:4", "block:3x2", "block:1x2"])
def test_dataset_round_trip_is_byte_identical(tmp_path, rng, random_dataset, spec):
    data = random_dataset(ManifoldId.parse(spec), 5, rng).with_labels([0, 1, 1, 0, 2])
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    datafile.save_dataset(str(first), data)
    loaded = datafile.load_dataset(str(first))
    datafile.save_dataset(str(second), loaded)
    assert first.read_bytes() == second.read_bytes()
    assert list(loaded.labels) == [0, 1, 1, 0, 2]
    for x, y in zip(data, loaded):
        assert manifold.distance(x, y) < 1e-12


def test_point_encodings(rng, random_point):
    hpd_doc = datafile.encode_point(ManifoldId.hpd(2), random_point(ManifoldId.hpd(2), rng).payload)
    assert set(hpd_doc) == {"matrix"}
    assert np.asarray(hpd_doc["matrix"]).shape == (2, 2, 2)
    block = ManifoldId.block(3, 2)
    block_doc = datafile.encode_point(block, random_point(block, rng).payload)
    assert set(block_doc) == {"r", "alphas", "omegas"}
    assert np.asarray(block_doc["omegas"]).shape == (2, 2, 2, 2)


def test_empty_dataset_round_trip(tmp_path):
    path = tmp_path / "empty.json"
    datafile.save_dataset(str(path), Dataset.empty(ManifoldId.toeplitz(3)))
    document = json.loads(path.read_text())
    assert document["points"] == []
    assert document["labels"] is None
    assert len(datafile.load_dataset(str(path))) == 0


def test_header_checks(tmp_path):
    path = tmp_path / "d.json"
    datafile.save_dataset(str(path), Dataset.empty(ManifoldId.hpd(2)))
    document = json.loads(path.read_text())
    with pytest.raises(ValidationError):
        datafile.check_header(dict(document, schema_version="2.0"), "dataset")
    with pytest.raises(ValidationError):
        datafile.check_header(document, "model")
    with pytest.raises(ArtifactError):
        datafile.check_header(dict(document, schema_version="one"), "dataset")
    datafile.check_header(dict(document, schema_version="1.7"), "dataset")


def test_unknown_major_version_is_rejected(tmp_path):
    path = tmp_path / "d.json"
    datafile.save_dataset(str(path), Dataset.empty(ManifoldId.hpd(2)))
    document = json.loads(path.read_text())
    document["schema_version"] = "2.0"
    path.write_text(json.dumps(document))
    with pytest.raises(ValidationError):
        datafile.load_dataset(str(path))


def test_unreadable_documents(tmp_path):
    with pytest.raises(ArtifactError):
        datafile.load_dataset(str(tmp_path / "missing.json"))
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ArtifactError):
        datafile.load_dataset(str(bad))


def test_malformed_points(tmp_path):
    path = tmp_path / "d.json"
    document = datafile.header("dataset")
    document.update({"manifold": "toeplitz:3", "points": [{"r": 1.0, "alphas": [[0.1, 0.0]]}], "labels": None})
    path.write_text(json.dumps(document))
    with pytest.raises(ArtifactError):
        datafile.load_dataset(str(path))
    document["points"] = [{"r": 1.0, "alphas": [[1.5, 0.0], [0.0, 0.0]]}]
    path.write_text(json.dumps(document))
    with pytest.raises(ValidationError):
        datafile.load_dataset(str(path))


def test_params_round_trip(tmp_path, rng, random_point):
    p = GaussianParams(random_point(ManifoldId.block(2, 2), rng), 0.37)
    path = tmp_path / "p.json"
    datafile.save_params(str(path), p)
    loaded = datafile.load_params(str(path))
    assert loaded.sigma == 0.37
    assert manifold.distance(loaded.center, p.center) < 1e-12


def test_ztable_round_trip(tmp_path):
    z = gaussian.build_ztable(ManifoldId.hpd(2)).shifted(0.25)
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    datafile.save_ztable(str(first), z)
    loaded = datafile.load_ztable(str(first))
    datafile.save_ztable(str(second), loaded)
    assert first.read_bytes() == second.read_bytes()
    assert float(loaded.logz(0.5)) == float(z.logz(0.5))
    assert loaded.offset == 0.25


def test_model_round_trip(tmp_path, rng, random_point):
    m = ManifoldId.toeplitz(3)
    z = gaussian.build_ztable(m)
    components = (GaussianParams(random_point(m, rng), 0.2), GaussianParams(random_point(m, rng), 0.4))
    model = MixtureModel(m, np.array([0.25, 0.75]), components)
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    datafile.save_model(str(first), model, z, "table.json", -12.5)
    document = json.loads(first.read_text())
    assert document["ztable"]["path"] == "table.json"
    assert document["bic"] == -12.5
    datafile.save_model(str(second), datafile.load_model(str(first)), z, "table.json", -12.5)
    assert first.read_bytes() == second.read_bytes()


def test_fit_report_round_trip(tmp_path, rng, random_point):
    p = GaussianParams(random_point(ManifoldId.hpd(2), rng), 0.5)
    report = gaussian.FitReport(p, 0.8, 12, 3e-10, 1e-14)
    path = tmp_path / "r.json"
    datafile.save_fit_report(str(path), report)
    loaded = datafile.load_fit_report(str(path))
    assert loaded.iterations == 12
    assert loaded.dispersion == 0.8
    assert loaded.params.sigma == 0.5


def test_read_matrices(tmp_path):
    real = tmp_path / "real.json"
    real.write_text(json.dumps([[[2.0, 0.5], [0.5, 2.0]]]))
    assert datafile.read_matrices(str(real)).shape == (1, 2, 2)
    pairs = tmp_path / "pairs.json"
    pairs.write_text(json.dumps([[[[2.0, 0.0], [0.5, 0.1]], [[0.5, -0.1], [2.0, 0.0]]]]))
    assert datafile.read_matrices(str(pairs))[0, 0, 1] == 0.5 + 0.1j
    empty = tmp_path / "empty.json"
    empty.write_text("[]")
    assert datafile.read_matrices(str(empty), 3).shape == (0, 3, 3)
    with pytest.raises(ValidationError):
        datafile.read_matrices(str(real), 3)
    ragged = tmp_path / "ragged.json"
    ragged.write_text(json.dumps([[1.0, 2.0]]))
    with pytest.raises(ArtifactError):
        datafile.read_matrices(str(ragged))


def test_csv_writers(tmp_path):
    labels = tmp_path / "labels.csv"
    datafile.write_labels(str(labels), np.array([1, 0, 1]))
    assert labels.read_text() == "index,label\n0,1\n1,0\n2,1\n"
    assert datafile.read_label_column(str(labels)) == [1, 0, 1]
    confusion = tmp_path / "confusion.csv"
    datafile.write_confusion(str(confusion), mixture.confusion_matrix(np.array([0, 1]), np.array([0, 0]), 2))
    assert confusion.read_text() == "truth,predicted_0,predicted_1\n0,1,0\n1,1,0\n"


def test_curve_rows():
    z = gaussian.build_ztable(ManifoldId.toeplitz(2))
    rows = datafile.curve_rows(z)
    assert len(rows) == z.sigma_grid.size
    sigma, eta, logz, rho = rows[10]
    assert eta == pytest.approx(-0.5 / sigma**2)
    assert gaussian.phi(rho, z) == pytest.approx(sigma, rel=1e-8)

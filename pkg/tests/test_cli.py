import json

import numpy as np
import pytest

import cli
import constants
import datafile
import gaussian
import manifold
import rsgauss
import toeplitz
from cli import RunConfig
from errors import ValidationError
from gaussian import GaussianParams
from manifold import Dataset, ManifoldId
from mixture import EmConfig
from preferences import Preferences


@pytest.fixture
def cfg():
    return RunConfig(seed=5, em=EmConfig(restarts=2, seed=5))


@pytest.fixture
def workdir(tmp_path, cfg):
    table = tmp_path / "t3.json"
    cli.cmd_ztable("toeplitz:3", str(table), cfg)
    return tmp_path


def _labelled_two_clusters(path, seed=0):
    m = ManifoldId.toeplitz(3)
    shifted = manifold.ManifoldPoint.create(m, toeplitz.ToeplitzCoords.create(1.0, [0.7, 0]))
    centres = [manifold.identity_point(m), shifted]
    parts = [gaussian.sample(GaussianParams(c, 0.2), 60, seed=seed + k).payload for k, c in enumerate(centres)]
    coords = toeplitz.ToeplitzCoords(np.concatenate([p.r for p in parts]), np.concatenate([p.alphas for p in parts]))
    data = Dataset.create(m, coords, np.repeat([0, 1], 60))
    datafile.save_dataset(str(path), data)
    return data


def test_ztable_writes_table_and_curve(workdir):
    curve = (workdir / "t3.csv").read_text().splitlines()
    assert curve[0] == "sigma,eta,logz,rho"
    assert len(curve) == constants.SIGMA_GRID_COUNT + 1
    z = datafile.load_ztable(str(workdir / "t3.json"))
    assert z.method == "analytic"
    logz = [float(line.split(",")[2]) for line in curve[1:]]
    assert np.all(np.diff(logz) > 0)


def test_ztable_is_deterministic(tmp_path, cfg):
    cli.cmd_ztable("hpd:2", str(tmp_path / "a.json"), cfg)
    cli.cmd_ztable("hpd:2", str(tmp_path / "b.json"), cfg)
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_sample_then_fit(workdir, cfg):
    params = workdir / "params.json"
    centre = manifold.ManifoldPoint.create(ManifoldId.toeplitz(3), toeplitz.ToeplitzCoords.create(2.0, [0.3j, -0.2]))
    datafile.save_params(str(params), GaussianParams(centre, 0.4))
    cli.cmd_sample(str(workdir / "a.json"), 500, cfg, params_path=str(params))
    cli.cmd_sample(str(workdir / "b.json"), 500, cfg, params_path=str(params))
    assert (workdir / "a.json").read_bytes() == (workdir / "b.json").read_bytes()

    cli.cmd_fit(str(workdir / "a.json"), str(workdir / "t3.json"), str(workdir / "fit.json"), cfg)
    report = datafile.load_fit_report(str(workdir / "fit.json"))
    assert report.params.sigma == pytest.approx(0.4, abs=0.05)
    assert manifold.distance(report.params.center, centre) < 0.15


def test_sample_inline_manifold(tmp_path, cfg):
    data = cli.cmd_sample(str(tmp_path / "s.json"), 3, cfg, manifold_spec="block:2x2", sigma=0.3)
    assert len(data) == 3
    assert datafile.load_dataset(str(tmp_path / "s.json")).manifold == ManifoldId.block(2, 2)


def test_sample_zero_count(tmp_path, cfg):
    cli.cmd_sample(str(tmp_path / "s.json"), 0, cfg, manifold_spec="hpd:3", sigma=1.0)
    document = json.loads((tmp_path / "s.json").read_text())
    assert document["points"] == []
    assert document["kind"] == "dataset"


def test_sample_needs_a_source(tmp_path, cfg):
    with pytest.raises(ValidationError):
        cli.cmd_sample(str(tmp_path / "s.json"), 3, cfg, manifold_spec="hpd:3")
    with pytest.raises(ValidationError):
        cli.cmd_sample(str(tmp_path / "s.json"), -1, cfg, manifold_spec="hpd:3", sigma=1.0)


def test_fit_on_identical_points_exits_numerical(workdir, cfg):
    x = manifold.identity_point(ManifoldId.toeplitz(3))
    datafile.save_dataset(str(workdir / "same.json"), Dataset.from_points([x, x, x, x]))
    code = cli.execute(cli.cmd_fit, str(workdir / "same.json"), str(workdir / "t3.json"), str(workdir / "f.json"), cfg)
    assert code == constants.EXIT_NUMERICAL
    assert not (workdir / "f.json").exists()


def test_fit_with_table_for_other_manifold(tmp_path, workdir, cfg):
    cli.cmd_sample(str(tmp_path / "h.json"), 10, cfg, manifold_spec="hpd:2", sigma=0.5)
    code = cli.execute(cli.cmd_fit, str(tmp_path / "h.json"), str(workdir / "t3.json"), str(tmp_path / "f.json"), cfg)
    assert code == constants.EXIT_VALIDATION


def test_mixture_and_classify(workdir, cfg):
    data = _labelled_two_clusters(workdir / "two.json")
    model_path = workdir / "model.json"
    selection = cli.cmd_mixture(str(workdir / "two.json"), 3, str(workdir / "t3.json"), str(model_path), cfg)
    assert selection.best_k == 2
    bic_rows = (workdir / "model_bic.csv").read_text().splitlines()
    assert bic_rows[0] == "k,bic,loglik,df,n"
    assert len(bic_rows) == 4
    assert bic_rows[2].split(",")[3] == "13"

    labels = cli.cmd_classify(str(workdir / "two.json"), str(model_path), str(workdir / "labels.csv"), cfg=cfg)
    assert len(labels) == len(data)
    confusion = (workdir / "labels_confusion.csv").read_text().splitlines()
    table = np.array([[int(v) for v in row.split(",")[1:]] for row in confusion[1:]])
    assert max(np.trace(table), np.trace(table[:, ::-1])) >= 0.95 * len(data)


def test_mixture_is_deterministic(workdir, cfg):
    _labelled_two_clusters(workdir / "two.json", seed=3)
    for name in ("m1.json", "m2.json"):
        cli.cmd_mixture(str(workdir / "two.json"), 2, str(workdir / "t3.json"), str(workdir / name), cfg)
    assert (workdir / "m1.json").read_bytes() == (workdir / "m2.json").read_bytes()
    assert (workdir / "m1_bic.csv").read_bytes() == (workdir / "m2_bic.csv").read_bytes()


def test_classify_without_labels_writes_no_confusion(workdir, cfg):
    _labelled_two_clusters(workdir / "two.json")
    cli.cmd_mixture(str(workdir / "two.json"), 1, str(workdir / "t3.json"), str(workdir / "model.json"), cfg)
    cli.cmd_sample(str(workdir / "new.json"), 20, cfg, manifold_spec="toeplitz:3", sigma=0.3)
    labels = cli.cmd_classify(
        str(workdir / "new.json"), str(workdir / "model.json"), str(workdir / "out.csv"), str(workdir / "t3.json"), cfg
    )
    assert list(labels) == [0] * 20
    assert (workdir / "out.csv").exists()
    assert not (workdir / "out_confusion.csv").exists()


def test_import_toeplitz_matrices(tmp_path, rng, random_toeplitz):
    coords = random_toeplitz(4, rng, size=6)
    matrices = toeplitz.coords_to_matrix(coords)
    source = tmp_path / "m.json"
    source.write_text(json.dumps(np.stack([matrices.real, matrices.imag], axis=-1).tolist()))
    labels = tmp_path / "labels.csv"
    datafile.write_labels(str(labels), np.arange(6) % 2)
    data = cli.cmd_import(str(source), "toeplitz:4", str(tmp_path / "d.json"), str(labels))
    np.testing.assert_allclose(data.payload.alphas, coords.alphas, atol=1e-9)
    assert list(datafile.load_dataset(str(tmp_path / "d.json")).labels) == [0, 1, 0, 1, 0, 1]


def test_import_empty_and_invalid(tmp_path):
    source = tmp_path / "m.json"
    source.write_text("[]")
    assert len(cli.cmd_import(str(source), "block:2x2", str(tmp_path / "d.json"))) == 0
    source.write_text(json.dumps([[[1.0, 2.0], [2.0, 1.0]]]))
    code = cli.execute(cli.cmd_import, str(source), "toeplitz:2", str(tmp_path / "d.json"))
    assert code == constants.EXIT_VALIDATION


def test_run_config_from_preferences(tmp_path):
    prefs = Preferences(str(tmp_path / "prefs.xml"))
    prefs.set_value("seed", "99")
    prefs.set_value("em_restarts", "2")
    cfg = RunConfig.from_preferences(prefs)
    assert cfg.seed == 99
    assert cfg.em.restarts == 2
    assert cfg.em.seed == 99
    override = RunConfig.from_preferences(prefs, seed=1, grid="0.1:1:5")
    assert override.seed == 1
    assert override.grid.size == 5
    with pytest.raises(ValidationError):
        RunConfig.from_preferences(prefs, threads=0)


def test_main_exit_codes(tmp_path, capsys):
    prefs = str(tmp_path / "prefs.xml")
    assert rsgauss.main(["-h"]) == constants.EXIT_OK
    assert "Usage" in capsys.readouterr().out
    assert rsgauss.main(["-p", prefs]) == constants.EXIT_VALIDATION
    assert rsgauss.main(["-p", prefs, "bogus"]) == constants.EXIT_VALIDATION
    assert rsgauss.main(["-p", prefs, "--frobnicate", "ztable"]) == constants.EXIT_VALIDATION
    assert rsgauss.main(["-p", prefs, "-s", "x", "ztable"]) == constants.EXIT_VALIDATION
    assert rsgauss.main(["-p", prefs, "ztable", "-m", "toeplitz:3"]) == constants.EXIT_VALIDATION
    out = tmp_path / "t.json"
    assert rsgauss.main(["-p", prefs, "-s", "3", "ztable", "-m", "toeplitz:3", "-o", str(out)]) == constants.EXIT_OK
    assert out.exists() and (tmp_path / "t.csv").exists()
    missing = str(tmp_path / "missing.json")
    assert rsgauss.main(["-p", prefs, "fit", "-d", missing, "-z", str(out), "-o", str(tmp_path / "f.json")]) == (
        constants.EXIT_IO
    )


def test_main_sample_and_fit(tmp_path):
    prefs = str(tmp_path / "prefs.xml")
    table, data, report = (str(tmp_path / name) for name in ("t.json", "d.json", "r.json"))
    assert rsgauss.main(["-p", prefs, "ztable", "-m", "toeplitz:2", "-o", table]) == 0
    assert rsgauss.main(["-p", prefs, "sample", "-m", "toeplitz:2", "--sigma", "0.5", "-n", "200", "-o", data]) == 0
    assert rsgauss.main(["-p", prefs, "fit", "-d", data, "-z", table, "-o", report]) == 0
    assert datafile.load_fit_report(report).params.sigma == pytest.approx(0.5, abs=0.08)

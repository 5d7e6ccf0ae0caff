import csv

import numpy as np
import pytest
import scipy.io
import scipy.sparse as sparse

from dskernel import cli, counts


def run(argv):
    return cli.main(argv)


@pytest.fixture(scope="module")
def simulated(tmp_path_factory):
    root = tmp_path_factory.mktemp("sim")
    points = root / "points.csv"
    sidecar = root / "sidecar.csv"
    code = run(["simulate", "--n", "250", "--m", "120", "--noise", "varying_ball",
                "--seed", "3", "--out", str(points), "--sidecar", str(sidecar)])
    assert code == 0
    return points, sidecar


def test_simulate_outputs(simulated):
    points, sidecar = simulated
    data = np.loadtxt(points, delimiter=",")
    assert data.shape == (250, 120)
    with open(sidecar) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 250
    assert float(rows[0]["true_density"]) > 0


def test_scale_writes_log_d_and_residuals(simulated, tmp_path):
    points, _ = simulated
    out = tmp_path / "logd.csv"
    res = tmp_path / "residuals.csv"
    code = run(["scale", "--input", str(points), "--epsilon", "0.1",
                "--out", str(out), "--residuals-out", str(res)])
    assert code == 0
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 250
    assert float(rows[0]["residual"]) <= 1e-9
    with open(res) as fh:
        hist = list(csv.DictReader(fh))
    assert float(hist[-1]["residual"]) <= 1e-9


def test_density_with_sidecar_errors(simulated, tmp_path):
    points, sidecar = simulated
    out = tmp_path / "density.csv"
    code = run(["density", "--input", str(points), "--epsilon", "0.1",
                "--s", "2", "--dim", "1", "--sidecar", str(sidecar),
                "--out", str(out)])
    assert code == 0
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    errs = np.array([float(r["abs_error"]) for r in rows])
    assert errs.max() < 0.5  # small sample, loose sanity bound


def test_density_accepts_limit_exponent(simulated, tmp_path):
    points, _ = simulated
    out = tmp_path / "density_limit.csv"
    code = run(["density", "--input", str(points), "--epsilon", "0.1",
                "--s", "limit", "--dim", "1", "--out", str(out)])
    assert code == 0


def test_denoise_outputs_and_distances(simulated, tmp_path):
    points, sidecar = simulated
    out = tmp_path / "denoise.csv"
    dists = tmp_path / "dists.csv"
    code = run(["denoise", "--input", str(points), "--epsilon", "0.1",
                "--dim", "1", "--sidecar", str(sidecar), "--out", str(out),
                "--dists-out", str(dists)])
    assert code == 0
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    est = np.array([float(r["noise_sq_hat"]) for r in rows])
    true = np.array([float(r["true_noise_sq_if_known"]) for r in rows])
    assert np.corrcoef(est, true)[0, 1] > 0.9
    d = np.loadtxt(dists, delimiter=",")
    assert d.shape == (250, 250)


def test_laplacian_sweep(tmp_path):
    out = tmp_path / "lap.csv"
    code = run(["laplacian", "--n", "300", "--epsilon", "0.1", "--epsilon", "0.2",
                "--alpha", "1.0", "--out", str(out)])
    assert code == 0
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 4  # two epsilons x both families
    assert {r["family"] for r in rows} == {"robust", "traditional"}


def test_scrna_pipeline(tmp_path):
    cm = counts.synth_poisson_counts(
        80, 300, seed=5, cluster_depth_ranges=((400.0, 800.0), (2000.0, 4000.0)))
    mtx = tmp_path / "counts.mtx"
    scipy.io.mmwrite(str(mtx), sparse.coo_matrix(cm.entries))
    labels_path = tmp_path / "labels.csv"
    labels_path.write_text("\n".join(str(c) for c in cm.labels) + "\n")
    out = tmp_path / "scrna.csv"
    trans = tmp_path / "transitions.csv"
    code = run(["scrna", "--input", str(mtx), "--labels", str(labels_path),
                "--epsilon", "0.0002", "--out", str(out),
                "--transitions-out", str(trans)])
    assert code == 0
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 80
    est = np.array([float(r["noise_sq_hat"]) for r in rows])
    inv = np.array([float(r["inv_count"]) for r in rows])
    assert np.corrcoef(est, inv)[0, 1] > 0.9
    with open(trans) as fh:
        trows = list(csv.DictReader(fh))
    assert len(trows) == 6  # three alphas x both families


def test_bench_subcommand(tmp_path):
    out = tmp_path / "fig3.csv"
    code = run(["bench", "fig3", "--sweep", "60", "90", "--repeats", "1",
                "--noise", "none", "--seed", "1", "--out", str(out)])
    assert code == 0
    assert out.read_text().startswith("# experiment=fig3")


def test_missing_input_is_a_one_line_error(tmp_path, capsys):
    code = run(["scale", "--input", str(tmp_path / "nope.csv"),
                "--epsilon", "0.1", "--out", str(tmp_path / "o.csv")])
    assert code == 1
    err = capsys.readouterr().err
    assert err.startswith("error:")
    assert len(err.strip().splitlines()) == 1


def test_bad_epsilon_is_reported(simulated, tmp_path, capsys):
    points, _ = simulated
    code = run(["scale", "--input", str(points), "--epsilon", "-1",
                "--out", str(tmp_path / "o.csv")])
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_usage_error_exits_with_two():
    with pytest.raises(SystemExit) as exc:
        run(["scale"])  # missing required arguments
    assert exc.value.code == 2

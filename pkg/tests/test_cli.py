import csv
import io
import json
import shutil

import numpy as np
import pytest

from spectral_ggm import cli, estimator, evaluation, imageio, spectral, synthesis, sweep
from spectral_ggm.model import Hyperparams, TrueModel


def run(*argv):
    buf = io.StringIO()
    code = cli.main([str(a) for a in argv], buf)
    return code, buf.getvalue()


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


# sample ---------------------------------------------------------------------

def test_sample_writes_pgm_and_sidecar(tmp_path):
    out = tmp_path / "s.pgm"
    code, _ = run("sample", "--N", 64, "--seed", 1, "--output", out)
    assert code == 0
    img = imageio.read_image(out)
    assert img.size == 64 and img.maxval == 65535
    meta = json.loads((tmp_path / "s.pgm.json").read_text())
    assert meta["config"]["N"] == 64 and meta["config"]["seed"] == 1
    assert meta["rng"] == {"algorithm": "numpy.PCG64", "seed": 1}
    assert meta["version"]


def test_sample_twice_byte_identical(tmp_path):
    a, b = tmp_path / "a.pgm", tmp_path / "b.pgm"
    run("sample", "--N", 64, "--seed", 1, "--output", a)
    run("sample", "--N", 64, "--seed", 1, "--output", b)
    assert a.read_bytes() == b.read_bytes()


def test_sample_matches_library(tmp_path):
    out = tmp_path / "s.npy"
    run("sample", "--N", 8, "--seed", 3, "--alpha", 2.0, "--gamma", 0.1, "--output", out)
    f = synthesis.sample_prior(Hyperparams(2.0, 1.0, 0.1), 8, synthesis.SeededRng(3))
    np.testing.assert_array_equal(np.load(out), f + 32768.0)


def test_sample_n_zero_is_config_error(tmp_path, capsys):
    code, _ = run("sample", "--N", 0, "--output", tmp_path / "z.pgm")
    assert code == 2
    assert "N must be" in capsys.readouterr().err


def test_missing_output_dir_is_io_error(tmp_path, capsys):
    missing = tmp_path / "no" / "such"
    code, _ = run("sample", "--output", missing / "x.pgm")
    assert code == 3
    assert str(missing) in capsys.readouterr().err


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["sample", "--N", "many"])
    assert exc.value.code == 2


def test_config_precedence(tmp_path):
    conf = tmp_path / "c.json"
    conf.write_text(json.dumps({"N": 8, "seed": 4, "alpha": 3.0}))
    out = tmp_path / "p.npy"
    run("sample", "--config", conf, "--seed", 9, "--output", out)
    cfg = json.loads((tmp_path / "p.npy.json").read_text())["config"]
    assert cfg["N"] == 8 and cfg["seed"] == 9 and cfg["alpha"] == 3.0
    assert cfg["gamma"] == cli.DEFAULTS["sample"]["gamma"]


def test_unknown_config_key(tmp_path):
    conf = tmp_path / "c.json"
    conf.write_text(json.dumps({"N": 8, "bogus": 1}))
    code, _ = run("sample", "--config", conf, "--output", tmp_path / "x.pgm")
    assert code == 2


def test_help_lists_defaults(capsys):
    with pytest.raises(SystemExit):
        cli.main(["sweep", "--help"])
    text = capsys.readouterr().out
    assert "default 40.0" in text


# degrade --------------------------------------------------------------------

def _constant_pgm(path, value=128, N=128):
    imageio.write_pgm(path, np.full((N, N), float(value)), 255)


def test_degrade_noise_variance(tmp_path):
    src, out = tmp_path / "c.pgm", tmp_path / "g.npy"
    _constant_pgm(src)
    assert run("degrade", "--input", src, "--output", out, "--sigma", 40, "--seed", 2)[0] == 0
    g = np.load(out)
    assert abs(np.var(g) / 1600 - 1) < 0.05
    meta = json.loads((tmp_path / "g.npy.json").read_text())
    assert meta["noise"]["beta_star"] == pytest.approx(1 / 1600)
    assert meta["inputs"][str(src)].startswith("sha256:")


def test_degrade_tiny_sigma(tmp_path):
    src, out = tmp_path / "c.pgm", tmp_path / "g.npy"
    _constant_pgm(src, 77, 16)
    run("degrade", "--input", src, "--output", out, "--sigma", 1e-12)
    np.testing.assert_allclose(np.load(out), 77.0, atol=1e-9, rtol=0)


def test_degrade_keeps_bit_depth(tmp_path):
    src, out = tmp_path / "c.pgm", tmp_path / "g.pgm"
    _constant_pgm(src, 128, 16)
    run("degrade", "--input", src, "--output", out, "--sigma", 5)
    assert imageio.read_image(out).maxval == 255


def test_degrade_non_square(tmp_path, capsys):
    src = tmp_path / "r.pgm"
    imageio.write_pgm(src, np.zeros((64, 32)), 255)
    code, _ = run("degrade", "--input", src, "--output", tmp_path / "o.pgm")
    assert code == 2
    assert "N x N" in capsys.readouterr().err


def test_degrade_missing_input(tmp_path, capsys):
    src = tmp_path / "absent.pgm"
    code, _ = run("degrade", "--input", src, "--output", tmp_path / "o.pgm")
    assert code == 3
    assert "absent.pgm" in capsys.readouterr().err


# estimate -------------------------------------------------------------------

def test_estimate_report_schema(tmp_path, camera_path):
    out = tmp_path / "r.json"
    code, text = run("estimate", "--input", camera_path, "--n", 64, "--output", out)
    assert code == 0
    report = json.loads(out.read_text())
    assert json.loads(text) == report
    (ch,) = report["channels"]
    for key in ("alpha", "beta", "gamma", "objective", "iterations", "converged", "n", "N"):
        assert key in ch
    assert ch["n"] == 64 and ch["N"] == 128 and ch["channel"] == "gray"
    assert "not comparable" in report["objective_note"]


def test_estimate_half_and_full_window(tmp_path, camera_path):
    _, half = run("estimate", "--input", camera_path, "--shrink", 0.5)
    _, full = run("estimate", "--input", camera_path)
    h, f = json.loads(half)["channels"][0], json.loads(full)["channels"][0]
    assert (h["n"], f["n"]) == (64, 128)
    assert json.loads(half)["objective_note"] == json.loads(full)["objective_note"]


def test_estimate_rgb_per_channel(astronaut_path):
    _, text = run("estimate", "--input", astronaut_path, "--n", 32)
    assert [c["channel"] for c in json.loads(text)["channels"]] == ["R", "G", "B"]


def test_estimate_model_data(tmp_path):
    h = Hyperparams(1.0, 1.0, 0.01)
    f = synthesis.sample_prior(h, 128, synthesis.SeededRng(11))
    g = synthesis.degrade(f, synthesis.NoiseSpec(1.0), synthesis.SeededRng(12))
    src = tmp_path / "g.npy"
    np.save(src, g)
    _, text = run("estimate", "--input", src)
    ch = json.loads(text)["channels"][0]
    assert ch["converged"]
    assert ch["alpha"] == pytest.approx(1.0, rel=0.1)
    assert ch["beta"] == pytest.approx(1.0, rel=0.1)


def test_estimate_corrupted_header(tmp_path, capsys):
    src = tmp_path / "bad.pgm"
    src.write_bytes(b"P5\n128 12x\n255\n" + bytes(128 * 128))
    code, _ = run("estimate", "--input", src)
    assert code == 3
    assert "byte offset 7" in capsys.readouterr().err


def test_estimate_bad_window(camera_path):
    assert run("estimate", "--input", camera_path, "--n", 500)[0] == 2
    assert run("estimate", "--input", camera_path, "--shrink", 1.0)[0] == 2


def test_estimate_flat_image_reports_warning(tmp_path):
    src = tmp_path / "flat.pgm"
    _constant_pgm(src, 0, 8)
    code, text = run("estimate", "--input", src)
    assert code == 0
    assert json.loads(text)["channels"][0]["warnings"]


# denoise --------------------------------------------------------------------

def test_denoise_huge_beta_is_identity(tmp_path, camera_path):
    out = tmp_path / "d.pgm"
    run("denoise", "--input", camera_path, "--output", out,
        "--alpha", 1, "--beta", 1e12, "--gamma", 1)
    assert np.max(np.abs(imageio.read_image(out).data - imageio.read_image(camera_path).data)) <= 1
    report = json.loads((tmp_path / "d.pgm.json").read_text())["report"]
    assert report["channels"][0]["hyperparams"]["beta"] == 1e12
    assert report["channels"][0]["gain"]["min"] > 0.999


def test_denoise_requires_hyperparameters(tmp_path, camera_path):
    code, _ = run("denoise", "--input", camera_path, "--output", tmp_path / "d.pgm",
                  "--alpha", 1, "--beta", 1)
    assert code == 2


def test_estimate_then_denoise_improves_snr(tmp_path, camera):
    noisy = tmp_path / "noisy.npy"
    np.save(tmp_path / "cam.npy", camera)
    run("degrade", "--input", tmp_path / "cam.npy", "--output", noisy, "--sigma", 40, "--seed", 5)
    out = tmp_path / "restored.npy"
    assert run("denoise", "--input", noisy, "--output", out, "--estimate-n", 128)[0] == 0
    var = evaluation.variance_of(camera)
    before = evaluation.snr_db(var, float(np.mean((np.load(noisy) - camera) ** 2)))
    after = evaluation.snr_db(var, float(np.mean((np.load(out) - camera) ** 2)))
    assert after > before


# sweep ----------------------------------------------------------------------

def test_sweep_csv_layout(tmp_path, camera_path):
    out = tmp_path / "s.csv"
    code, _ = run("sweep", "--input", camera_path, "--output", out, "--shrink", "0,0.25,0.5")
    assert code == 0
    raw = out.read_bytes()
    assert raw.startswith(b"channel,n,shrink,alpha,beta,gamma,d_n,snr_db,wall_time_ms\r\n")
    rows = read_csv(out)
    assert [r[1] for r in rows[1:]] == ["64", "96", "128"]
    assert all(r[-1] == "nan" for r in rows[1:])


def test_sweep_shrink_zero_matches_library(tmp_path, camera):
    src = tmp_path / "cam.npy"
    np.save(src, camera)
    out = tmp_path / "s.csv"
    run("sweep", "--input", src, "--output", out, "--shrink", "0", "--sigma", 40)
    row = read_csv(out)[1]
    res = estimator.estimate_expected(TrueModel.from_field(camera, 1 / 1600), 128, 128)
    h = res.estimate
    assert [float(x) for x in row[3:6]] == [h.alpha, h.beta, h.gamma]
    rec = sweep.run_sweep(camera, 40.0, [0.0])[0]
    assert float(row[6]) == rec.d_n and float(row[7]) == rec.snr_db


def test_sweep_rgb_row_count(tmp_path, astronaut_path):
    out = tmp_path / "rgb.csv"
    fr = "0,0.3,0.6"
    run("sweep", "--input", astronaut_path, "--output", out, "--shrink", fr)
    rows = read_csv(out)[1:]
    assert len(rows) == 3 * 3
    assert [r[0] for r in rows] == ["R"] * 3 + ["G"] * 3 + ["B"] * 3


def test_sweep_svg_and_timing(tmp_path, camera_path):
    out, svg = tmp_path / "s.csv", tmp_path / "s.svg"
    run("sweep", "--input", camera_path, "--output", out, "--shrink", "0,0.5",
        "--svg", svg, "--timing")
    assert svg.read_text().startswith("<svg")
    assert all(float(r[-1]) > 0 for r in read_csv(out)[1:])


def test_sweep_bad_fraction(tmp_path, camera_path):
    code, _ = run("sweep", "--input", camera_path, "--output", tmp_path / "s.csv",
                  "--shrink", "0,1.2")
    assert code == 2


# validate -------------------------------------------------------------------

def test_validate_passes():
    code, text = run("validate")
    assert code == 0
    assert "FAIL" not in text
    for suite in ("parseval", "dense_oracle", "gradient", "expectation", "monte_carlo"):
        assert suite in text


def test_validate_catches_lambda_sign_bug(monkeypatch):
    real = spectral.lattice_eigenvalue

    def flipped(k, l, N):
        return 8.0 - real(k, l, N)

    monkeypatch.setattr(spectral, "lattice_eigenvalue", flipped)
    code, text = run("validate", "--suite", "dense_oracle")
    assert code == 1
    assert "FAIL  dense_oracle" in text


# determinism from sidecars --------------------------------------------------

def test_rerun_from_sidecar_is_byte_identical(tmp_path, camera_path):
    shutil.copy(camera_path, tmp_path / "cam.pgm")
    cam = tmp_path / "cam.pgm"
    jobs = [
        ("sample", ["--N", 32, "--seed", 7, "--output", tmp_path / "s.pgm"], tmp_path / "s.pgm"),
        ("degrade", ["--input", cam, "--output", tmp_path / "g.pgm", "--seed", 3],
         tmp_path / "g.pgm"),
        ("denoise", ["--input", tmp_path / "g.pgm", "--output", tmp_path / "d.pgm",
                     "--estimate-n", 64], tmp_path / "d.pgm"),
        ("sweep", ["--input", cam, "--output", tmp_path / "w.csv", "--shrink", "0,0.4",
                   "--svg", tmp_path / "w.svg"], tmp_path / "w.csv"),
    ]
    for command, args, product in jobs:
        assert run(command, *args)[0] == 0
        sidecar = tmp_path / (product.name + ".json")
        files = [product, sidecar]
        if command == "sweep":
            files.append(tmp_path / "w.svg")
        before = {p: p.read_bytes() for p in files}
        shutil.copy(sidecar, tmp_path / "cfg.json")
        for p in files:
            p.unlink()
        assert run(command, "--config", tmp_path / "cfg.json")[0] == 0
        for p, data in before.items():
            assert p.read_bytes() == data, f"{command}: {p.name} differs"

    report = tmp_path / "e.json"
    run("estimate", "--input", cam, "--n", 80, "--output", report)
    first = report.read_bytes()
    shutil.copy(report, tmp_path / "cfg.json")
    report.unlink()
    run("estimate", "--config", tmp_path / "cfg.json")
    assert report.read_bytes() == first

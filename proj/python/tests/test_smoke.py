import json
import math

import numpy as np
import pytest

import mglfa


def test_version():
    assert mglfa.__version__ == "0.1.0"


def test_matern():
    p = mglfa.reference_matern(2)
    assert (p.nu, p.lam, p.sigma2) == (0.5, 0.3, 1.0)
    assert mglfa.matern_cov(0.1, p) == pytest.approx(math.exp(-math.sqrt(2.0) / 3.0))
    with pytest.raises(ValueError):
        mglfa.MaternParams(0.0, 1.0, 1.0)


def test_benchmark_window_and_lfa():
    w = mglfa.lfa_window("vertical-jump", 8)
    assert w.shape == (8, 8)
    assert np.all(w[:, :4] == 1.0) and np.all(w[:, 4:] == 1e3)
    rho = mglfa.two_grid_rho(w, 1.0 / 128, nu1=1, nu2=1, smoother="jacobi:0.8", frequencies=8)
    assert 0.35 < rho < 0.5


def test_constant_flux():
    out = mglfa.solve_darcy(np.full((16, 16), 2.0), eps=1e-13)
    assert out["converged"]
    assert out["Q"] == pytest.approx(2.0, rel=1e-10)


def test_rate_and_field():
    z = mglfa.sample_log_permeability(mglfa.reference_matern(2), 32, seed=3)
    assert z.shape == (32, 32)
    z2 = mglfa.sample_log_permeability(mglfa.reference_matern(2), 32, seed=3)
    assert np.array_equal(z, z2)
    r = mglfa.measure_rate(np.exp(z), iterations=10)
    assert 0.0 < r["rho"] < 0.5
    assert len(r["residuals"]) == 11


def test_run_experiment(tmp_path):
    cfg = {"L": 1, "samples": [4, 3], "lfa_samples": 0}
    files = mglfa.run_experiment("mlmc", json.dumps(cfg), seed=5, out_dir=str(tmp_path))
    assert len(files) == 3
    result = json.loads((tmp_path / "mlmc.json").read_text())
    assert len(result["levels"]) == 2
    with pytest.raises(ValueError):
        mglfa.run_experiment("mlmc", json.dumps({"bogus": 1}), out_dir=str(tmp_path))

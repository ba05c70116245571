import numpy as np
import pytest

import scalereg.sampling as sampling
from scalereg import (
    Dataset,
    build_power_problem,
    design_matrix,
    design_matrix_a,
    empirical_cov,
    errors,
    estimate,
    make_filter,
    sample_dataset,
)
from scalereg.sampling import _clamped_eigh, crossprod, gram


def _problem(d=16, sigma=0.05, **kw):
    kw.setdefault("s", 1.0)
    kw.setdefault("a_link", 0.5)
    kw.setdefault("r", 0.5)
    kw.setdefault("q", 1.0)
    return build_power_problem(R_dagger=1.0, d=d, sigma=sigma, **kw)


def test_sample_dataset_deterministic_in_seed():
    prob = _problem()
    d1 = sample_dataset(prob, 64, seed=5)
    d2 = sample_dataset(prob, 64, seed=5)
    d3 = sample_dataset(prob, 64, seed=6)
    np.testing.assert_array_equal(d1.x, d2.x)
    np.testing.assert_array_equal(d1.y, d2.y)
    assert not np.array_equal(d1.y, d3.y)


def test_noise_and_design_streams_are_independent():
    prob = _problem()
    noisy = sample_dataset(prob, 32, seed=1)
    silent = sample_dataset(_problem(sigma=0.0), 32, seed=1)
    # same seed, same design points, different y
    np.testing.assert_array_equal(noisy.x, silent.x)
    assert np.abs(noisy.y - silent.y).max() > 0


def test_midpoint_design_and_validation():
    prob = _problem()
    ds = sample_dataset(prob, 8, seed=0, design="midpoint_grid")
    np.testing.assert_allclose(ds.x, (np.arange(1, 9) - 0.5) / 8)
    with pytest.raises(ValueError):
        sample_dataset(prob, 8, seed=0, design="sobol")
    with pytest.raises(ValueError):
        sample_dataset(prob, 0, seed=0)
    with pytest.raises(ValueError):
        Dataset(x=np.array([0.5]), y=np.array([1.0, 2.0]), seed=0,
                design="random_uniform")


def test_design_matrix_row_oracle():
    prob = build_power_problem(s=1.0, a_link=0.5, r=0.5, q=1.0,
                               R_dagger=1.0, d=2, sigma=0.0)
    # a = (1, 1), l = (1, 2); at x = 0 the basis is (1, sqrt(2))
    row = design_matrix(prob, np.array([0.0]))[0]
    np.testing.assert_allclose(row, [1.0, np.sqrt(2.0) / 2.0])
    row_a = design_matrix_a(prob, np.array([0.0]))[0]
    np.testing.assert_allclose(row_a, [1.0, np.sqrt(2.0)])


def test_crossprod_and_gram_match_dense_products():
    rng = np.random.default_rng(2)
    phi = rng.standard_normal((13, 7))
    np.testing.assert_allclose(crossprod(phi), phi.T @ phi, atol=1e-12)
    np.testing.assert_allclose(gram(phi), phi @ phi.T, atol=1e-12)


def test_midpoint_quadrature_diagonalizes_covariance():
    prob = _problem(d=12, sigma=0.0)
    x = (np.arange(1, 65) - 0.5) / 64.0
    T = empirical_cov(prob, x)
    np.testing.assert_allclose(T, np.diag(prob.t), atol=1e-13)


def test_scalar_estimator_oracle():
    from scalereg import SpectralProblem, gaussian_noise
    prob = SpectralProblem(d=1, basis="cosine", a=np.array([1.0]),
                           l=np.array([1.0]), f_true=np.array([1.0]),
                           noise=gaussian_noise(0.0))
    # single constant mode: y = 1, T_x = 1, tikhonov at lambda = 1
    ds = sample_dataset(prob, 4, seed=0)
    est = estimate(prob, ds, make_filter("tikhonov"), lam=1.0)
    assert est.u_hat[0] == pytest.approx(0.5, abs=1e-14)
    assert est.f_hat[0] == pytest.approx(0.5, abs=1e-14)


def test_tikhonov_spectral_equals_direct_solve():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(20):
        d = int(rng.integers(2, 33))
        m = int(rng.integers(d, 257))
        prob = _problem(d=d, sigma=0.1)
        ds = sample_dataset(prob, m, seed=int(rng.integers(10 ** 6)))
        lam = float(10 ** rng.uniform(-6, 0))
        filt = make_filter("tikhonov")
        spectral = estimate(prob, ds, filt, lam)
        direct = estimate(prob, ds, filt, lam, tikhonov_direct=True)
        phi = design_matrix(prob, ds.x)
        ref = np.linalg.solve(phi.T @ phi / m + lam * np.eye(d),
                              phi.T @ ds.y / m)
        worst = max(worst,
                    np.abs(spectral.u_hat - ref).max(),
                    np.abs(direct.u_hat - ref).max())
    assert worst <= 1e-10, f"estimator routes deviate by {worst}"


def test_svd_and_gram_routes_agree_when_m_below_d(monkeypatch):
    prob = _problem(d=40, sigma=0.05)
    ds = sample_dataset(prob, 17, seed=3)
    filt = make_filter("landweber")
    via_svd = estimate(prob, ds, filt, 0.05)
    monkeypatch.setattr(sampling, "_SVD_DIRECT_LIMIT", 1)
    via_gram = estimate(prob, ds, filt, 0.05)
    np.testing.assert_allclose(via_gram.u_hat, via_svd.u_hat, atol=1e-11)


def test_all_filters_run_on_wide_and_tall_data():
    prob = _problem(d=10)
    for m in (5, 40):
        ds = sample_dataset(prob, m, seed=1)
        for name in ("tikhonov", "cutoff", "landweber"):
            est = estimate(prob, ds, make_filter(name), 0.1)
            assert np.all(np.isfinite(est.u_hat)) and est.m == m


def test_estimate_rejects_bad_lambda():
    prob = _problem(d=4)
    ds = sample_dataset(prob, 8, seed=0)
    with pytest.raises(ValueError):
        estimate(prob, ds, make_filter("tikhonov"), 0.0)


def test_clamped_eigh_tolerates_roundoff_but_not_indefiniteness():
    w, _ = _clamped_eigh(np.diag([1.0, -1e-15]), kappa_sq=1.0)
    assert np.all(w >= 0.0)
    with pytest.raises(np.linalg.LinAlgError):
        _clamped_eigh(np.diag([1.0, -0.5]), kappa_sq=1.0)


def test_noiseless_cutoff_recovers_truth():
    prob = _problem(d=8, sigma=0.0)
    ds = sample_dataset(prob, 64, seed=0, design="midpoint_grid")
    lam = 0.5 * prob.t.min()
    est = estimate(prob, ds, make_filter("cutoff"), lam)
    assert errors(prob, est)["h_norm"] <= 1e-10


def test_error_norms():
    prob = build_power_problem(s=1.0, a_link=0.25, r=1.0, q=2.0,
                               R_dagger=1.0, d=3, sigma=0.0)
    est = sampling.Estimate(f_hat=prob.f_true + np.array([0.1, 0.0, -0.2]),
                            u_hat=np.zeros(3), lam=0.1, filter_id="cutoff",
                            m=10)
    out = errors(prob, est, zeta=None)
    assert out["h_norm"] == pytest.approx(np.sqrt(0.01 + 0.04))
    want_pred = np.linalg.norm(prob.a * np.array([0.1, 0.0, -0.2]))
    assert out["prediction_norm"] == pytest.approx(want_pred)
    from scalereg import power_fn
    out2 = errors(prob, est, zeta=power_fn(0.5))
    wts = np.sqrt(prob.t) * prob.l
    want_zeta = np.linalg.norm(wts * np.array([0.1, 0.0, -0.2]))
    assert out2["zeta_norm"] == pytest.approx(want_zeta)
    with pytest.raises(ValueError):
        errors(_problem(d=5), est)

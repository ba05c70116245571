import numpy as np
import pytest

from scalereg import (
    IDENTITY,
    QUANTITIES,
    BoundCheckReport,
    bound_appendix,
    bound_constants,
    build_power_problem,
    check_heinz_bound,
    check_interpolation,
    check_lemma_envelope,
    compute_lambda_q,
    compute_psi,
    compute_tx_deviation,
    compute_upsilon,
    compute_xi,
    effdim,
    lambda_balance_effdim,
    make_filter,
    montecarlo_coverage,
    montecarlo_coverage_batch,
    power_fn,
    sample_dataset,
    xi_from_operator,
)
from scalereg.model import SpectralProblem, gaussian_noise


def _problem(d=16, sigma=0.05):
    return build_power_problem(s=1.0, a_link=0.5, r=0.5, q=1.0,
                               R_dagger=1.0, d=d, sigma=sigma)


def _scalar_problem(t_val=1.0):
    return SpectralProblem(d=1, basis="cosine", a=np.array([np.sqrt(t_val)]),
                           l=np.array([1.0]), f_true=np.array([1.0]),
                           noise=gaussian_noise(0.0))


def test_quantity_names():
    assert QUANTITIES == ("PSI", "UPSILON", "LAMBDA_Q", "XI_S", "XI_ZETA",
                          "TX_DEV")


def test_midpoint_design_zeroes_the_deviations():
    prob = _problem(d=12, sigma=0.0)
    x = (np.arange(1, 65) - 0.5) / 64.0
    lam = 0.01
    assert compute_upsilon(prob, x, lam) <= 1e-12
    assert compute_lambda_q(prob, x, lam) <= 1e-12
    assert compute_tx_deviation(prob, x) <= 1e-12
    assert compute_xi(prob, x, lam, IDENTITY) == pytest.approx(1.0, abs=1e-12)
    ds = sample_dataset(prob, 64, seed=0, design="midpoint_grid")
    assert compute_psi(prob, ds, lam) == 0.0


def test_psi_single_mode_value():
    prob = _scalar_problem()
    m, lam, seed = 32, 0.5, 11
    noisy = SpectralProblem(d=1, basis="cosine", a=prob.a, l=prob.l,
                            f_true=prob.f_true, noise=gaussian_noise(0.3))
    ds = sample_dataset(noisy, m, seed=seed)
    eps = ds.y - 1.0  # g(x) = 1 for the constant mode
    want = abs(eps.mean()) / np.sqrt(1.0 + lam)
    assert compute_psi(noisy, ds, lam) == pytest.approx(want, rel=1e-12)


def test_xi_scalar_oracle():
    prob = _scalar_problem()
    # T_nu = 1, T_x = 1/3, identity zeta, lam = 1: (1+1)/(1/3+1) = 3/2
    xi = xi_from_operator(prob, np.array([[1.0 / 3.0]]), 1.0, IDENTITY)
    assert xi == pytest.approx(1.5, abs=1e-14)


def test_xi_rejects_superlinear_zeta():
    prob = _problem(d=8)
    x = np.linspace(0.05, 0.95, 32)
    with pytest.raises(ValueError):
        compute_xi(prob, x, 0.1, power_fn(2.0))


def test_psi_second_moment_matches_effective_dimension():
    prob = build_power_problem(s=1.0, a_link=0.5, r=0.5, q=1.0,
                               R_dagger=1.0, d=8, sigma=0.2)
    m, lam = 2048, 0.01
    sq = [compute_psi(prob, sample_dataset(prob, m, seed=ts), lam) ** 2
          for ts in range(300)]
    want = prob.noise.sigma ** 2 / m * effdim(prob.t, lam)
    assert np.mean(sq) == pytest.approx(want, rel=0.1)


def test_bound_constants_contents():
    prob = _problem(d=16)
    c = bound_constants(prob, 0.1)
    assert c["kappa"] == pytest.approx(np.sqrt(prob.kappa_sq))
    assert c["kappa_tilde"] == pytest.approx(np.sqrt(prob.kappa_tilde_sq))
    assert c["M"] == c["Sigma"] == prob.noise.sigma or prob.noise.sigma == 0
    assert c["effdim_T"] == pytest.approx(effdim(prob.t, 0.1))
    assert c["effdim_L"] == pytest.approx(effdim(prob.lnu_eigs, 0.1))


def test_bound_appendix_plugin_values():
    consts = {"kappa": 1.0, "kappa_tilde": 1.0, "M": 1.0, "Sigma": 1.0,
              "effdim_T": 1.0, "effdim_L": 1.0}
    eta = 2.0 / np.e  # log(2/eta) = 1
    assert bound_appendix("PSI", 1.0, 1, eta, consts) == pytest.approx(4.0)
    assert bound_appendix("XI_S", 1.0, 1, eta, consts,
                          s=0.5) == pytest.approx(9.0)
    ups = bound_appendix("UPSILON", 1.0, 1, eta, consts)
    assert ups == pytest.approx(4.0)
    assert bound_appendix("XI_ZETA", 1.0, 1, eta, consts) == pytest.approx(
        (ups + 1.0) ** 2)
    assert bound_appendix("TX_DEV", 1.0, 1, eta, consts) == pytest.approx(4.0)
    lam_q = bound_appendix("LAMBDA_Q", 1.0, 1, eta, consts)
    assert lam_q == pytest.approx(4.0)
    with pytest.raises(ValueError):
        bound_appendix("GAMMA", 1.0, 1, eta, consts)


def test_bounds_shrink_with_sample_size():
    prob = _problem(d=32)
    consts = bound_constants(prob, 0.01)
    small = bound_appendix("PSI", 0.01, 256, 0.1, consts)
    large = bound_appendix("PSI", 0.01, 4096, 0.1, consts)
    assert large < small


def test_coverage_smoke_all_quantities_covered():
    prob = _problem(d=64)
    m = 1024
    lam = lambda_balance_effdim(prob.t, m)
    reports = montecarlo_coverage_batch(
        prob, ["PSI", "UPSILON", "LAMBDA_Q", "TX_DEV", "XI_S", "XI_ZETA"],
        lam, m, etas=[0.05, 0.1], trials=100, seed=42)
    assert len(reports) == 12
    for rep in reports:
        assert rep.in_hypothesis
        assert rep.coverage == 1.0 and rep.passed, rep.quantity
        assert rep.empirical_quantile < rep.bound_value
        doc = rep.to_dict()
        assert doc["lambda"] == lam and doc["passed"] is True


def test_coverage_single_quantity_wrapper():
    prob = _problem(d=32, sigma=0.0)
    rep = montecarlo_coverage(prob, "PSI", 0.05, 256, eta=0.1, trials=100,
                              seed=0)
    # noiseless data: psi is exactly zero in every trial
    assert rep.empirical_quantile == 0.0 and rep.coverage == 1.0


def test_coverage_requires_enough_trials():
    prob = _problem(d=16)
    with pytest.raises(ValueError):
        montecarlo_coverage_batch(prob, ["PSI"], 0.1, 64, etas=[0.1],
                                  trials=50, seed=0)


def test_report_flags_out_of_hypothesis_points():
    prob = _problem(d=64)
    # lambda far below the balance point: N(lam) > m lam
    reports = montecarlo_coverage_batch(prob, ["PSI"], 1e-6, 128,
                                        etas=[0.1], trials=100, seed=1)
    assert len(reports) == 1 and not reports[0].in_hypothesis


def test_bound_check_report_pass_logic():
    rep = BoundCheckReport(quantity="PSI", lam=0.1, m=100, eta=0.1,
                           trials=100, empirical_quantile=1.0,
                           bound_value=2.0, coverage=0.93)
    assert rep.passed
    worse = BoundCheckReport(quantity="PSI", lam=0.1, m=100, eta=0.1,
                             trials=100, empirical_quantile=1.0,
                             bound_value=2.0, coverage=0.85)
    assert not worse.passed


def test_interpolation_hand_example():
    prob = SpectralProblem(d=2, basis="cosine", a=np.ones(2),
                           l=np.array([1.0, 2.0]), f_true=np.zeros(2),
                           noise=gaussian_noise(0.0))
    rec = check_interpolation(prob, np.array([1.0, 1.0]), 0.0, 1.0, 2.0)
    assert rec["pass"]
    assert rec["lhs"] == pytest.approx(np.sqrt(5.0))
    assert rec["rhs"] == pytest.approx(34.0 ** 0.25)


def test_interpolation_exact_on_single_mode():
    prob = SpectralProblem(d=1, basis="cosine", a=np.ones(1),
                           l=np.array([3.0]), f_true=np.zeros(1),
                           noise=gaussian_noise(0.0))
    rec = check_interpolation(prob, np.array([2.0]), -1.0, 0.5, 2.0)
    assert rec["pass"]
    assert rec["lhs"] == pytest.approx(rec["rhs"], rel=1e-12)


def test_interpolation_requires_ordered_exponents():
    prob = _problem(d=4)
    with pytest.raises(ValueError):
        check_interpolation(prob, np.ones(4), 1.0, 0.5, 2.0)


def test_interpolation_random_sweep():
    rng = np.random.default_rng(123)
    for _ in range(200):
        d = int(rng.integers(1, 16))
        prob = SpectralProblem(d=d, basis="cosine", a=np.ones(d),
                               l=np.sort(rng.random(d) * 4.0 + 0.25),
                               f_true=np.zeros(d),
                               noise=gaussian_noise(0.0))
        exps = np.sort(rng.uniform(-2.0, 2.0, size=3))
        if exps[0] == exps[1] or exps[1] == exps[2]:
            continue
        f = rng.standard_normal(d)
        rec = check_interpolation(prob, f, *exps)
        assert rec["pass"], (exps, rec)


def test_heinz_bound_values():
    assert check_heinz_bound(np.array([1.0]), 0.5,
                             np.array([1.0])) == pytest.approx(
        1.0 / np.sqrt(2.0))
    dense = np.linspace(0.0, 1.0, 2001)
    for a in (0.1, 0.25, 0.5):
        ratio = check_heinz_bound(dense, a, np.geomspace(1e-6, 1.0, 200))
        assert ratio <= 1.0 + 1e-12, (a, ratio)
    with pytest.raises(ValueError):
        check_heinz_bound(dense, 0.7, np.array([0.1]))


def test_lemma_envelope_frozen_case():
    prob = build_power_problem(s=0.5, a_link=0.25, r=2.0, q=4.0,
                               R_dagger=1.0, d=32, sigma=0.05)
    lam = lambda_balance_effdim(prob.t, 500)
    assert lam == pytest.approx(0.01872557314550068, rel=1e-10)
    ds = sample_dataset(prob, 500, seed=7)
    rep = check_lemma_envelope(prob, ds, make_filter("tikhonov"), lam)
    assert rep["pass"]
    assert rep["lhs"] == pytest.approx(0.954917904442, rel=1e-9)
    assert rep["rhs"] == pytest.approx(7.168995786336, rel=1e-9)
    assert rep["xi_rho"] == pytest.approx(1.031475206188, rel=1e-9)
    assert rep["xi_ups"] == pytest.approx(1.140625650293, rel=1e-9)
    assert rep["xi"] == pytest.approx(1.336503047964, rel=1e-9)
    assert rep["lambda_q"] == pytest.approx(0.385491748439, rel=1e-9)


def test_lemma_envelope_trivial_on_midpoint_design():
    prob = build_power_problem(s=0.5, a_link=0.25, r=2.0, q=4.0,
                               R_dagger=1.0, d=16, sigma=0.0)
    ds = sample_dataset(prob, 128, seed=0, design="midpoint_grid")
    rep = check_lemma_envelope(prob, ds, make_filter("tikhonov"), 0.05)
    assert rep["pass"]
    # exact design: the empirical operator commutes with the scale
    assert rep["lhs"] <= 1.0 + 1e-10
    assert rep["lambda_q"] <= 1e-12

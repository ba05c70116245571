"""Empirical concentration quantities and their high-probability bounds.

The error analysis rests on a handful of sample-dependent quantities
(population covariance T = diag(t_j), empirical covariance T_x):

    PSI        || (T + lam I)^{-1/2} Bx^*(g(x) - y) ||       noise term
    UPSILON    || (T + lam I)^{-1/2} (T - T_x) ||_HS
    LAMBDA_Q   the same with the a-weighted covariances L_cov, L_x
    TX_DEV     || T - T_x ||_HS
    XI_S       || zeta(T_x + lam I)^{-1} zeta(T + lam I) ||,  zeta = t^s
    XI_ZETA    the same for a general nondecreasing sub-linear zeta

Each quantity has a closed-form bound holding with confidence 1 - eta
(``bound_appendix``); ``montecarlo_coverage`` draws seeded trials and
reports the fraction of trials below the bound.  The deterministic
operator inequalities (interpolation, the Heinz-type consequence, and
the residual-envelope lemma) get direct spectral checks.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .effdim import effdim
from .filters import FilterFamily, for_spectrum, residual_values
from .indexfn import IndexFunction, check_sublinear, from_config, power_fn
from .model import SpectralProblem, forward_eval, hilbert_scale_norm
from .sampling import (Dataset, _clamped_eigh, _stream, crossprod,
                       design_matrix, empirical_cov)

QUANTITIES = ("PSI", "UPSILON", "LAMBDA_Q", "XI_S", "XI_ZETA", "TX_DEV")

_ENVELOPE_SLACK = 1e-9
_INTERP_SLACK = 1e-12


@dataclass(frozen=True)
class BoundCheckReport:
    """Monte Carlo comparison of one quantity against its bound.

    ``coverage`` is the fraction of trials with quantity <= bound; the
    report passes iff coverage >= 1 - eta.  ``in_hypothesis`` records
    whether the run satisfied N(lambda) <= m * lambda and lambda <= 1,
    the standing sample-size condition of the analysis; runs outside it
    are still reported.
    """

    quantity: str
    lam: float
    m: int
    eta: float
    trials: int
    empirical_quantile: float
    bound_value: float
    coverage: float
    in_hypothesis: bool = True

    @property
    def passed(self) -> bool:
        return self.coverage >= 1.0 - self.eta

    def to_dict(self) -> dict:
        return {"quantity": self.quantity, "lambda": self.lam, "m": self.m,
                "eta": self.eta, "trials": self.trials,
                "empirical_quantile": self.empirical_quantile,
                "bound_value": self.bound_value, "coverage": self.coverage,
                "in_hypothesis": self.in_hypothesis,
                "passed": self.passed}


def compute_psi(problem: SpectralProblem, dataset: Dataset,
                lam: float) -> float:
    """|| (T + lam I)^{-1/2} Bx^*(g(x) - y) ||."""
    if not lam > 0:
        raise ValueError("lambda must be positive")
    phi = design_matrix(problem, dataset.x)
    resid = forward_eval(problem, problem.f_true, dataset.x) - dataset.y
    b = phi.T @ resid / dataset.m
    return float(np.linalg.norm(b / np.sqrt(problem.t + lam)))


def compute_upsilon(problem: SpectralProblem, x, lam: float) -> float:
    """|| (T + lam I)^{-1/2} (T - T_x) ||_HS (Frobenius on d x d)."""
    if not lam > 0:
        raise ValueError("lambda must be positive")
    dev = np.diag(problem.t) - empirical_cov(problem, x)
    dev /= np.sqrt(problem.t + lam)[:, None]
    return float(np.linalg.norm(dev))


def compute_tx_deviation(problem: SpectralProblem, x) -> float:
    """|| T - T_x ||_HS."""
    return float(np.linalg.norm(np.diag(problem.t) - empirical_cov(problem, x)))


def compute_lambda_q(problem: SpectralProblem, x, lam: float) -> float:
    """|| (L_cov + lam I)^{-1/2} (L_cov - L_x) ||_HS.

    L_cov = diag(a_j^2) is the population covariance of the a-weighted
    design (the forward map without the inverse scale), and L_x its
    empirical counterpart; algebraically L_x = diag(l) T_x diag(l).
    """
    if not lam > 0:
        raise ValueError("lambda must be positive")
    l = problem.l
    lx = (l[:, None] * empirical_cov(problem, x)) * l[None, :]
    dev = np.diag(problem.lnu_eigs) - lx
    dev /= np.sqrt(problem.lnu_eigs + lam)[:, None]
    return float(np.linalg.norm(dev))


def _check_zeta(zeta: IndexFunction, t_max: float) -> IndexFunction:
    zeta = from_config(zeta)
    grid = np.geomspace(t_max * 1e-12, t_max, 512)
    vals = np.asarray(zeta(grid))
    if np.any(np.diff(vals) < 0):
        raise ValueError("zeta must be nondecreasing")
    if not check_sublinear(zeta, t_max=t_max):
        raise ValueError("zeta fails the sub-linearity check")
    return zeta


def _xi_given_eig(w, V, t, lam: float, zeta: IndexFunction) -> float:
    """Largest singular value of zeta(T_x+lam)^{-1} zeta(T+lam).

    (w, V) is the eigensystem of T_x; T = diag(t).  The two matrix
    functions do not commute, so the product is formed explicitly.
    """
    inv = 1.0 / np.asarray(zeta(w + lam), dtype=np.float64)
    right = np.asarray(zeta(t + lam), dtype=np.float64)
    prod = ((V * inv) @ V.T) * right[None, :]
    return float(np.linalg.norm(prod, 2))


def xi_from_operator(problem: SpectralProblem, tx, lam: float,
                     zeta: IndexFunction) -> float:
    """compute_xi for an explicitly given empirical covariance matrix."""
    if not lam > 0:
        raise ValueError("lambda must be positive")
    zeta = _check_zeta(zeta, float(np.max(problem.t)) + lam)
    w, V = _clamped_eigh(np.asarray(tx, dtype=np.float64), problem.kappa_sq)
    return _xi_given_eig(w, V, problem.t, lam, zeta)


def compute_xi(problem: SpectralProblem, x, lam: float,
               zeta: IndexFunction) -> float:
    """|| zeta(T_x + lam I)^{-1} zeta(T + lam I) || for sub-linear zeta.

    Equals 1 when T_x = T (the product is the identity); raises
    ValueError when zeta fails the nondecreasing / sub-linearity grid
    checks.
    """
    return xi_from_operator(problem, empirical_cov(problem, x), lam, zeta)


def bound_constants(problem: SpectralProblem, lam: float) -> dict:
    """Plug-in constants for bound_appendix, from exact diagonal forms."""
    return {"kappa": math.sqrt(problem.kappa_sq),
            "kappa_tilde": math.sqrt(problem.kappa_tilde_sq),
            "M": problem.noise.M,
            "Sigma": problem.noise.Sigma_const,
            "effdim_T": effdim(problem.t, lam),
            "effdim_L": effdim(problem.lnu_eigs, lam)}


def bound_appendix(quantity: str, lam: float, m: int, eta: float,
                   constants: dict, *, s: float = 0.5) -> float:
    """Closed-form (1 - eta)-confidence bound for the named quantity.

    constants carries kappa, kappa_tilde, M, Sigma, effdim_T, effdim_L;
    XI_S additionally uses the exponent ``s``.  XI_ZETA composes the
    UPSILON bound with the envelope (Upsilon/sqrt(lam) + 1)^2.
    """
    if not 0 < eta < 1:
        raise ValueError("eta must lie in (0, 1)")
    if not lam > 0:
        raise ValueError("lambda must be positive")
    log_term = math.log(2.0 / eta)
    kappa = float(constants["kappa"])

    def _upsilon() -> float:
        n_t = float(constants["effdim_T"])
        return 2.0 * (kappa ** 2 / (m * math.sqrt(lam))
                      + math.sqrt(kappa ** 2 * n_t / m)) * log_term

    if quantity == "PSI":
        n_t = float(constants["effdim_T"])
        big_m, big_s = float(constants["M"]), float(constants["Sigma"])
        return 2.0 * (kappa * big_m / (m * math.sqrt(lam))
                      + math.sqrt(big_s ** 2 * n_t / m)) * log_term
    if quantity == "UPSILON":
        return _upsilon()
    if quantity == "TX_DEV":
        return 2.0 * (kappa ** 2 / m + kappa ** 2 / math.sqrt(m)) * log_term
    if quantity == "LAMBDA_Q":
        kt = float(constants["kappa_tilde"])
        n_l = float(constants["effdim_L"])
        return 2.0 * (kt ** 2 / (m * math.sqrt(lam))
                      + math.sqrt(kt ** 2 * n_l / m)) * log_term
    if quantity == "XI_S":
        return ((2.0 * kappa + 1.0) ** 2 * log_term) ** (2.0 * s)
    if quantity == "XI_ZETA":
        return (_upsilon() / math.sqrt(lam) + 1.0) ** 2
    raise ValueError(f"unknown quantity {quantity!r}; expected one of "
                     f"{QUANTITIES}")


def _trial_values(problem: SpectralProblem, m: int, lam: float,
                  trial_seed: int, tags, zeta_fns: dict) -> dict:
    t = problem.t
    x = _stream(trial_seed, 0).random(m)
    phi = design_matrix(problem, x)
    tx = crossprod(phi) / m
    out = {}
    dev = np.diag(t) - tx
    if "TX_DEV" in tags:
        out["TX_DEV"] = float(np.linalg.norm(dev))
    if "UPSILON" in tags:
        out["UPSILON"] = float(np.linalg.norm(
            dev / np.sqrt(t + lam)[:, None]))
    if "LAMBDA_Q" in tags:
        l = problem.l
        ldev = np.diag(problem.lnu_eigs) - (l[:, None] * tx) * l[None, :]
        out["LAMBDA_Q"] = float(np.linalg.norm(
            ldev / np.sqrt(problem.lnu_eigs + lam)[:, None]))
    if "PSI" in tags:
        eps = problem.noise.sigma * _stream(trial_seed, 1).standard_normal(m)
        b = phi.T @ eps / m
        out["PSI"] = float(np.linalg.norm(b / np.sqrt(t + lam)))
    if zeta_fns:
        w, V = _clamped_eigh(tx, problem.kappa_sq)
        for tag, fn in zeta_fns.items():
            out[tag] = _xi_given_eig(w, V, t, lam, fn)
    return out


def montecarlo_coverage_batch(problem: SpectralProblem, quantities, lam: float,
                              m: int, etas, trials: int, seed: int, *,
                              s: float = 0.5,
                              zeta: Optional[IndexFunction] = None,
                              threads: Optional[int] = None):
    """Coverage reports for several quantities/confidence levels at once.

    All reports share the same `trials` seeded datasets (seeds derive
    from SeedSequence([seed, m])), so a batch costs one sweep of design
    matrices regardless of how many quantities are requested.
    """
    quantities = tuple(quantities)
    for q in quantities:
        if q not in QUANTITIES:
            raise ValueError(f"unknown quantity {q!r}")
    if trials < 100:
        raise ValueError("need at least 100 trials for a coverage estimate")
    tm = float(np.max(problem.t)) + lam
    zeta_fns = {}
    if "XI_S" in quantities:
        zeta_fns["XI_S"] = _check_zeta(power_fn(s), tm)
    if "XI_ZETA" in quantities:
        zeta_fns["XI_ZETA"] = _check_zeta(
            zeta if zeta is not None else power_fn(0.5), tm)

    tseeds = np.random.SeedSequence([seed, m]).generate_state(
        trials, dtype=np.uint64)
    tags = frozenset(quantities)

    def one(k: int) -> dict:
        return _trial_values(problem, m, lam, int(tseeds[k]), tags, zeta_fns)

    if threads is not None and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(one, range(trials)))
    else:
        rows = [one(k) for k in range(trials)]

    # the balance rule lands exactly on N(lam) = m lam; the boundary is
    # inside the hypothesis, so allow root-finder slack
    n_eff = effdim(problem.t, lam)
    in_hyp = bool(n_eff <= m * lam * (1.0 + 1e-6) and lam <= 1.0)
    consts = bound_constants(problem, lam)
    reports = []
    for q in quantities:
        vals = np.array([row[q] for row in rows])
        for eta in np.atleast_1d(etas):
            eta = float(eta)
            bound = bound_appendix(q, lam, m, eta, consts, s=s)
            reports.append(BoundCheckReport(
                quantity=q, lam=float(lam), m=int(m), eta=eta,
                trials=trials,
                empirical_quantile=float(np.quantile(vals, 1.0 - eta)),
                bound_value=bound,
                coverage=float(np.mean(vals <= bound)),
                in_hypothesis=in_hyp))
    return reports


def montecarlo_coverage(problem: SpectralProblem, quantity: str, lam: float,
                        m: int, eta: float, trials: int, seed: int, *,
                        s: float = 0.5,
                        zeta: Optional[IndexFunction] = None,
                        threads: Optional[int] = None) -> BoundCheckReport:
    """Draw `trials` independent datasets and compare against the bound."""
    return montecarlo_coverage_batch(
        problem, [quantity], lam, m, [eta], trials, seed,
        s=s, zeta=zeta, threads=threads)[0]


def check_interpolation(problem: SpectralProblem, f, t_exp: float,
                        r_exp: float, s_exp: float) -> dict:
    """Scale-norm interpolation: the middle norm is bounded by the
    geometric mix of the outer two,

        ||f||_{r} <= ||f||_{t}^{(s-r)/(s-t)} * ||f||_{s}^{(r-t)/(s-t)}.
    """
    if not t_exp < r_exp < s_exp:
        raise ValueError("exponents must satisfy t_exp < r_exp < s_exp")
    f = np.asarray(f, dtype=np.float64)
    lhs = hilbert_scale_norm(problem, f, r_exp)
    span = s_exp - t_exp
    rhs = (hilbert_scale_norm(problem, f, t_exp) ** ((s_exp - r_exp) / span)
           * hilbert_scale_norm(problem, f, s_exp) ** ((r_exp - t_exp) / span))
    return {"lhs": lhs, "rhs": rhs, "pass": lhs <= rhs * (1.0 + _INTERP_SLACK)}


def check_heinz_bound(spectrum, a_link: float, lambda_grid) -> float:
    """max over the grid of ||t^a / sqrt(t + lam)||_sup * sqrt(lam)/lam^a.

    The operator bound says this ratio never exceeds 1.
    """
    if not 0 < a_link <= 0.5:
        raise ValueError("a_link must be in (0, 1/2]")
    t = np.asarray(spectrum, dtype=np.float64)
    lams = np.atleast_1d(np.asarray(lambda_grid, dtype=np.float64))
    if np.any(lams <= 0):
        raise ValueError("lambda grid must be positive")
    num = np.max(t[:, None] ** a_link / np.sqrt(t[:, None] + lams[None, :]),
                 axis=0)
    return float(np.max(num * np.sqrt(lams) / lams ** a_link))


def check_lemma_envelope(problem: SpectralProblem, dataset: Dataset,
                         filt: FilterFamily, lam: float) -> dict:
    """Residual envelope: ||L^{-1} r_lam(T_x) L|| against its bound.

    rhs = 1 + (B + D) (Xi^rho Xi^ups + Xi rho(lam)(rho(lam)+1) Lam/sqrt(lam))
    with rho(t) = t^a, ups(t) = t / rho(t) = t^(1-a), Xi the identity-zeta
    case, and Lam = compute_lambda_q.  Needs an exact-link power problem
    so that rho is known.
    """
    if not lam > 0:
        raise ValueError("lambda must be positive")
    sm = problem.smoothness
    if sm is None:
        raise ValueError("check_lemma_envelope needs a problem with a "
                         "smoothness spec (known link function)")
    a = sm.a_link
    tx = empirical_cov(problem, dataset.x)
    w, V = _clamped_eigh(tx, problem.kappa_sq)

    work, c = for_spectrum(filt, problem.kappa_sq)
    rv = residual_values(work, lam, w, prescale=c)
    l = problem.l
    mat = ((V * rv) @ V.T) * (l[None, :] / l[:, None])
    lhs = float(np.linalg.norm(mat, 2))

    t = problem.t
    xi_rho = _xi_given_eig(w, V, t, lam, power_fn(a))
    xi_ups = _xi_given_eig(w, V, t, lam, power_fn(1.0 - a))
    xi_id = _xi_given_eig(w, V, t, lam, power_fn(1.0))
    lam_q = compute_lambda_q(problem, dataset.x, lam)
    rho_lam = lam ** a
    rhs = 1.0 + (filt.B + filt.D) * (
        xi_rho * xi_ups
        + xi_id * rho_lam * (rho_lam + 1.0) * lam_q / math.sqrt(lam))
    return {"lhs": lhs, "rhs": rhs, "pass": lhs <= rhs * (1.0 + _ENVELOPE_SLACK),
            "xi_rho": xi_rho, "xi_ups": xi_ups, "xi": xi_id,
            "lambda_q": lam_q}

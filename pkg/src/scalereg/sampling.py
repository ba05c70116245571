"""Sampling, empirical operators, and the regularized estimator.

Data model: m design points x_i (i.i.d. uniform on [0,1], or the exact
midpoint grid) with observations y_i = g(x_i) + sigma * z_i where g is
the forward image of the true solution.  The estimator applies a
spectral filter to the empirical covariance

    T_x = (1/m) Phi^T Phi,      Phi[i, j] = (a_j / l_j) e_j(x_i),

and maps back through the scale operator:

    u_hat = g_lambda(T_x) (1/m) Phi^T y,      f_hat_j = u_hat_j / l_j.

Randomness is counter-based (numpy Philox): a dataset's design points
come from the stream keyed by (seed, 0) and its noise from (seed, 1),
so identical (problem, m, seed, design) always reproduce the same data.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import blas as _blas
from scipy.linalg import cho_factor, cho_solve

from . import _accel
from .filters import FilterFamily, filter_values, for_spectrum
from .indexfn import IndexFunction
from .model import SQRT2, SpectralProblem, forward_eval

DESIGNS = ("random_uniform", "midpoint_grid")

# below this m*d footprint the m < d branch uses a LAPACK SVD of the
# design matrix directly; above it, the same singular system is read
# off the m x m Gram matrix, which is much cheaper at harness scale
_SVD_DIRECT_LIMIT = 1 << 18

_NEG_EIG_TOL = 1e-12


@dataclass(frozen=True)
class Dataset:
    x: np.ndarray
    y: np.ndarray
    seed: int
    design: str

    def __post_init__(self):
        x = np.ascontiguousarray(self.x, dtype=np.float64)
        y = np.ascontiguousarray(self.y, dtype=np.float64)
        if x.ndim != 1 or y.shape != x.shape or x.size < 1:
            raise ValueError("x and y must be equal-length nonempty vectors")
        if self.design not in DESIGNS:
            raise ValueError(f"design must be one of {DESIGNS}")
        x.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def m(self) -> int:
        return self.x.size


@dataclass(frozen=True)
class Estimate:
    f_hat: np.ndarray
    u_hat: np.ndarray
    lam: float
    filter_id: str
    m: int


def _stream(seed: int, which: int) -> np.random.Generator:
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence([int(seed), which])))


def sample_dataset(problem: SpectralProblem, m: int, seed: int,
                   design: str = "random_uniform") -> Dataset:
    """Draw a dataset of size m from the problem's observation model."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if design == "midpoint_grid":
        x = (np.arange(1, m + 1, dtype=np.float64) - 0.5) / m
    elif design == "random_uniform":
        x = _stream(seed, 0).random(m)
    else:
        raise ValueError(f"design must be one of {DESIGNS}")
    y = forward_eval(problem, problem.f_true, x)
    sigma = problem.noise.sigma
    if sigma > 0:
        y = y + sigma * _stream(seed, 1).standard_normal(m)
    return Dataset(x=x, y=y, seed=int(seed), design=design)


def _column_weights(w: np.ndarray) -> np.ndarray:
    # fold the sqrt(2) of the non-constant cosine modes into the weights
    out = SQRT2 * w
    out[0] = w[0]
    return out


def design_matrix(problem: SpectralProblem, x: np.ndarray) -> np.ndarray:
    """m-by-d matrix of B_x in the basis: entries (a_j/l_j) e_j(x_i)."""
    x = np.asarray(x, dtype=np.float64)
    return _accel.weighted_cosine_table(
        x, _column_weights(problem.a / problem.l))


def design_matrix_a(problem: SpectralProblem, x: np.ndarray) -> np.ndarray:
    """Design matrix of the un-rescaled forward map: entries a_j e_j(x_i)."""
    x = np.asarray(x, dtype=np.float64)
    return _accel.weighted_cosine_table(x, _column_weights(problem.a))


def crossprod(phi: np.ndarray) -> np.ndarray:
    """phi^T phi through the symmetric rank-k BLAS update."""
    upper = _blas.dsyrk(1.0, phi.T, trans=0, lower=0)
    return upper + np.triu(upper, 1).T


def gram(phi: np.ndarray) -> np.ndarray:
    """phi phi^T through the symmetric rank-k BLAS update."""
    upper = _blas.dsyrk(1.0, phi.T, trans=1, lower=0)
    return upper + np.triu(upper, 1).T


def empirical_cov(problem: SpectralProblem, x: np.ndarray) -> np.ndarray:
    """T_x = (1/m) Phi^T Phi (symmetric positive semidefinite)."""
    x = np.asarray(x, dtype=np.float64)
    return crossprod(design_matrix(problem, x)) / x.size


def _clamped_eigh(S: np.ndarray, kappa_sq: float):
    """Eigendecomposition with the PSD clamp.

    Eigenvalues in [-1e-12 * kappa_sq, 0) are floating-point debris of a
    PSD-by-construction matrix and are set to 0; anything more negative
    signals a real defect and raises.
    """
    S = 0.5 * (S + S.T)
    w, V = np.linalg.eigh(S)
    floor = -_NEG_EIG_TOL * kappa_sq
    if w[0] < floor:
        raise np.linalg.LinAlgError(
            f"eigenvalue {w[0]:.3e} below the PSD tolerance {floor:.3e}")
    np.clip(w, 0.0, None, out=w)
    return w, V


def estimate(problem: SpectralProblem, dataset: Dataset,
             filt: FilterFamily, lam: float, *,
             tikhonov_direct: bool = False) -> Estimate:
    """Regularized solution u_hat = g_lambda(T_x) B_x^* y, f_hat = L^-1 u_hat.

    The filter acts through the spectral decomposition: eigenvectors of
    the d-by-d matrix T_x when m >= d, otherwise the singular system of
    Phi/sqrt(m) (from a direct SVD at small sizes, or equivalently from
    the m-by-m Gram matrix at scale).  Filters that need spectra in
    [0, 1] are fed T_x / kappa^2 and their output is rescaled.

    ``tikhonov_direct`` routes the Tikhonov filter through a Cholesky
    solve of (T_x + lambda I) u = B_x^* y instead.  Both routes agree to
    ~1e-12; the spectral route is the default and the agreement is
    pinned by tests.
    """
    if not lam > 0:
        raise ValueError("lambda must be positive")
    if dataset.x.size < 1:
        raise ValueError("empty dataset")
    m, d = dataset.m, problem.d
    phi = design_matrix(problem, dataset.x)
    bvec = phi.T @ dataset.y / m
    work, c = for_spectrum(filt, problem.kappa_sq)

    if tikhonov_direct and filt.id == "tikhonov" and m >= d:
        T = crossprod(phi) / m
        T[np.diag_indices_from(T)] += lam
        u = cho_solve(cho_factor(T, lower=False, check_finite=False),
                      bvec, check_finite=False)
    elif m >= d:
        w, V = _clamped_eigh(crossprod(phi) / m, problem.kappa_sq)
        g = filter_values(work, lam, w, prescale=c)
        u = V @ (g * (V.T @ bvec))
    elif m * d <= _SVD_DIRECT_LIMIT:
        _, s, Wt = np.linalg.svd(phi / np.sqrt(m), full_matrices=False)
        g = filter_values(work, lam, s * s, prescale=c)
        u = Wt.T @ (g * (Wt @ bvec))
    else:
        w, U = _clamped_eigh(gram(phi) / m, problem.kappa_sq)
        g = filter_values(work, lam, w, prescale=c)
        u = phi.T @ (U @ (g * (U.T @ dataset.y))) / m
    return Estimate(f_hat=u / problem.l, u_hat=u, lam=float(lam),
                    filter_id=filt.id, m=m)


def errors(problem: SpectralProblem, est: Estimate,
           zeta: Optional[IndexFunction] = None) -> dict:
    """Error norms of an estimate against the problem's truth.

    h_norm is the plain coefficient-space norm, prediction_norm weights
    the gap by a_j (the population prediction error), and zeta_norm --
    present when ``zeta`` is given -- weights by zeta(t_j) l_j.
    """
    if est.f_hat.shape != (problem.d,):
        raise ValueError("estimate dimension does not match problem")
    gap = est.f_hat - problem.f_true
    out = {
        "h_norm": float(np.linalg.norm(gap)),
        "prediction_norm": float(np.linalg.norm(problem.a * gap)),
    }
    if zeta is not None:
        wts = np.asarray(zeta(problem.t)) * problem.l
        out["zeta_norm"] = float(np.linalg.norm(wts * gap))
    return out

"""Effective dimension of a spectrum and its structural checks."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .indexfn import IndexFunction
from .model import SpectralProblem


def effdim(spectrum, lam: float) -> float:
    """N(lambda) = sum_j t_j / (t_j + lambda)."""
    if not lam > 0:
        raise ValueError("lambda must be positive")
    t = np.asarray(spectrum, dtype=np.float64)
    return float(np.sum(t / (t + lam)))


@dataclass(frozen=True)
class EffDimCurve:
    lambdas: np.ndarray
    values: np.ndarray
    spectrum_id: str = ""


def effdim_curve(spectrum, lambda_lo: float, lambda_hi: float,
                 points_per_decade: int = 40,
                 spectrum_id: str = "") -> EffDimCurve:
    """Log-spaced effective-dimension curve on [lambda_lo, lambda_hi]."""
    if not 0 < lambda_lo < lambda_hi:
        raise ValueError("need 0 < lambda_lo < lambda_hi")
    decades = np.log10(lambda_hi / lambda_lo)
    n = max(2, int(round(points_per_decade * decades)) + 1)
    lams = np.geomspace(lambda_lo, lambda_hi, n)
    t = np.asarray(spectrum, dtype=np.float64)
    vals = (t[None, :] / (t[None, :] + lams[:, None])).sum(axis=1)
    return EffDimCurve(lambdas=lams, values=vals, spectrum_id=spectrum_id)


def fit_effdim_exponent(spectrum, lambda_lo: float, lambda_hi: float,
                        n_points: int | None = None) -> dict:
    """Least-squares decay exponent of N(lambda) ~ lambda^(-b).

    Refuses ranges where N(lambda_lo) >= d/2: there the finite
    truncation of the spectrum, not its decay, controls the curve.
    """
    if not 0 < lambda_lo < lambda_hi <= 1.0:
        raise ValueError("need 0 < lambda_lo < lambda_hi <= 1")
    t = np.asarray(spectrum, dtype=np.float64)
    if n_points is None:
        curve = effdim_curve(t, lambda_lo, lambda_hi)
    else:
        lams = np.geomspace(lambda_lo, lambda_hi, n_points)
        vals = (t[None, :] / (t[None, :] + lams[:, None])).sum(axis=1)
        curve = EffDimCurve(lams, vals)
    if curve.values[0] >= t.size / 2:
        raise ValueError(
            f"N(lambda_lo) = {curve.values[0]:.1f} >= d/2 = {t.size / 2}: "
            "truncation binds; increase the spectrum length d")
    lx = np.log(curve.lambdas)
    ly = np.log(curve.values)
    n = lx.size
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    sxx = np.sum((lx - lx.mean()) ** 2)
    stderr = float(np.sqrt(resid @ resid / max(n - 2, 1) / sxx))
    return {"b_hat": float(-slope), "stderr": stderr}


def check_tail_condition(spectrum, t_grid) -> float:
    """Smallest C with (1/t) sum_{s_j < t} s_j <= C * #{j : s_j >= t}.

    Evaluated over the grid; grid points above the top of the spectrum
    (where the right-hand count is zero) are excluded.
    """
    s = np.sort(np.asarray(spectrum, dtype=np.float64))[::-1]
    ts = np.asarray(t_grid, dtype=np.float64)
    if np.any(ts <= 0):
        raise ValueError("t_grid entries must be positive")
    tail = np.concatenate((np.cumsum(s[::-1])[::-1], [0.0]))  # sum_{j>=k}
    c_min = 0.0
    seen = False
    for t in ts:
        count = int(np.searchsorted(-s, -t, side="right"))  # s_j >= t
        if count == 0:
            continue
        seen = True
        c_min = max(c_min, tail[count] / t / count)
    if not seen:
        raise ValueError("no grid point lies within the spectrum range")
    return c_min


def check_effdim_relation(problem: SpectralProblem, rho: IndexFunction,
                          lambda_grid, ceiling: float = 8.0) -> dict:
    """Compare N_L(lambda / rho(lambda)^2) against N_T(lambda).

    The ratio of the two effective dimensions stays below a modest
    constant when the link between the scales holds; ``ceiling`` is a
    report threshold, not a derived constant.  Grid points where the
    rescaled argument exceeds the top of the L-spectrum are skipped with
    a warning.
    """
    lams = np.asarray(lambda_grid, dtype=np.float64)
    t = problem.t
    lnu = problem.lnu_eigs
    top = float(lnu.max())
    max_ratio = 0.0
    skipped = 0
    for lam in lams:
        lam = float(lam)
        arg = lam / float(np.asarray(rho(np.array(lam)))) ** 2
        if arg > top:
            skipped += 1
            continue
        max_ratio = max(max_ratio, effdim(lnu, arg) / effdim(t, lam))
    if skipped:
        warnings.warn(f"skipped {skipped} grid points whose rescaled "
                      f"argument exceeded the L-spectrum top {top:.3g}")
    return {"max_ratio": max_ratio, "pass": max_ratio <= ceiling,
            "n_skipped": skipped}

"""Spectral regularization filters and their defining conditions.

A filter family g_lambda approximates t -> 1/t on a spectrum [0, t_max]
subject to the usual four conditions with constants (D, B, gamma,
gamma_p):

    sup |t g_lambda(t)| <= D          sup |g_lambda(t)| <= B / lambda
    sup |r_lambda(t)|   <= gamma      sup |r_lambda(t)| t^p <= gamma_p lambda^p

where r_lambda(t) = 1 - t g_lambda(t) is the residual and p is the
qualification.  Three families are provided:

- "tikhonov":  g = 1/(t + lambda), qualification 1 (saturates above);
- "cutoff":    g = 1/t for t >= lambda else 0, arbitrary qualification;
- "landweber": g = sum_{i<nu} (1-t)^i with nu = ceil(1/lambda), valid
  on spectra in [0, 1]; callers rescale larger spectra (see
  ``filter_values``).  Its per-p constant (p/e)^p is a known envelope,
  approached from below, and is grid-verified in the checks rather than
  assumed.

The check_* functions verify the conditions by grid maximization; the
default grids (400 log-spaced lambdas in [1e-6, 1], 1000 linear t in
[0, t_max]) resolve the suprema of these smooth functions well below
the 1e-9 comparison tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np

from .indexfn import IndexFunction

FILTER_NAMES = ("tikhonov", "cutoff", "landweber")

DEFAULT_NU_MAX = 10 ** 6
_TOL = 1e-9


@dataclass(frozen=True)
class FilterFamily:
    id: str
    D: float
    B: float
    gamma: float
    qualification_p: float
    gamma_p: float
    t_max: float = 1.0
    nu_max: int = DEFAULT_NU_MAX

    def gamma_p_at(self, p: float) -> float:
        """Declared qualification constant at order p.

        Tikhonov only qualifies up to p = 1 (saturation): requesting a
        larger p returns infinity.
        """
        if p <= 0:
            raise ValueError("p must be positive")
        if self.id == "tikhonov":
            if p > 1.0:
                return math.inf
            return 1.0 if p == 1.0 else p ** p * (1.0 - p) ** (1.0 - p)
        if self.id == "cutoff":
            return 1.0
        return (p / math.e) ** p


def make_filter(name: str, t_max: float = 1.0,
                nu_max: int = DEFAULT_NU_MAX) -> FilterFamily:
    if not t_max > 0:
        raise ValueError("t_max must be positive")
    if name == "tikhonov":
        return FilterFamily("tikhonov", D=1.0, B=1.0, gamma=1.0,
                            qualification_p=1.0, gamma_p=1.0, t_max=t_max)
    if name == "cutoff":
        return FilterFamily("cutoff", D=1.0, B=1.0, gamma=1.0,
                            qualification_p=math.inf, gamma_p=1.0,
                            t_max=t_max)
    if name == "landweber":
        if t_max > 1.0 + 1e-12:
            raise ValueError("landweber needs t_max <= 1; rescale the "
                             "spectrum (see filter_values)")
        if nu_max < 1:
            raise ValueError("nu_max must be >= 1")
        return FilterFamily("landweber", D=1.0, B=2.0, gamma=1.0,
                            qualification_p=math.inf, gamma_p=1.0 / math.e,
                            t_max=t_max, nu_max=int(nu_max))
    raise ValueError(f"unknown filter {name!r}; expected one of "
                     f"{FILTER_NAMES}")


def _validate(filt: FilterFamily, lam: float, t: np.ndarray) -> np.ndarray:
    if not lam > 0:
        raise ValueError("lambda must be positive")
    t = np.asarray(t, dtype=np.float64)
    if np.any(t < 0):
        raise ValueError("spectrum entries must be nonnegative")
    if np.any(t > filt.t_max * (1.0 + 1e-12)):
        raise ValueError(f"spectrum entry exceeds t_max={filt.t_max}; "
                         "rescale before filtering")
    return t


def landweber_iterations(lam: float, nu_max: int = DEFAULT_NU_MAX) -> int:
    return min(math.ceil(1.0 / lam), int(nu_max))


def apply_filter(filt: FilterFamily, lam: float, spectrum) -> np.ndarray:
    """Elementwise g_lambda over the spectrum."""
    t = _validate(filt, lam, spectrum)
    if filt.id == "tikhonov":
        return 1.0 / (t + lam)
    if filt.id == "cutoff":
        out = np.zeros_like(t)
        hit = t >= lam
        out[hit] = 1.0 / t[hit]
        return out
    nu = landweber_iterations(lam, filt.nu_max)
    # geometric partial sum (1 - (1-t)^nu) / t, written via expm1/log1p
    # so huge nu and tiny t lose no precision; limit nu at t = 0
    out = np.full_like(t, float(nu))
    pos = t > 0
    tp = np.minimum(t[pos], 1.0)  # tolerate eigensolver overshoot above 1
    with np.errstate(divide="ignore"):
        out[pos] = -np.expm1(nu * np.log1p(-tp)) / tp
    return out


def residual(filt: FilterFamily, lam: float, spectrum) -> np.ndarray:
    """Elementwise residual r_lambda(t) = 1 - t g_lambda(t)."""
    t = _validate(filt, lam, spectrum)
    if filt.id == "tikhonov":
        return lam / (t + lam)
    if filt.id == "cutoff":
        return np.where(t >= lam, 0.0, 1.0)
    nu = landweber_iterations(lam, filt.nu_max)
    with np.errstate(divide="ignore"):
        return np.exp(nu * np.log1p(-np.minimum(t, 1.0)))


def filter_values(filt: FilterFamily, lam: float, spectrum,
                  prescale: float = 1.0) -> np.ndarray:
    """g_lambda with optional spectrum pre-scaling.

    For filters restricted to [0, 1] (landweber) the estimator rescales
    the spectrum by c and unscales the output: g(t) = (1/c) g~(t/c).
    """
    t = np.asarray(spectrum, dtype=np.float64)
    if prescale != 1.0:
        return apply_filter(filt, lam, t / prescale) / prescale
    return apply_filter(filt, lam, t)


def residual_values(filt: FilterFamily, lam: float, spectrum,
                    prescale: float = 1.0) -> np.ndarray:
    t = np.asarray(spectrum, dtype=np.float64)
    if prescale != 1.0:
        return residual(filt, lam, t / prescale)
    return residual(filt, lam, t)


def spectrum_prescale(filt: FilterFamily, kappa_sq: float) -> float:
    """Scaling constant applied to empirical spectra before filtering."""
    return float(kappa_sq) if filt.id == "landweber" else 1.0


def for_spectrum(filt: FilterFamily,
                 kappa_sq: float) -> Tuple[FilterFamily, float]:
    """A (filter, prescale) pair able to act on spectra bounded by kappa_sq.

    Landweber keeps t_max = 1 and divides the spectrum by kappa^2; the
    other filters simply widen their declared t_max when the spectrum
    bound exceeds it (their formulas are valid on any bounded spectrum).
    """
    if filt.id == "landweber":
        return filt, float(kappa_sq)
    if kappa_sq > filt.t_max:
        return replace(filt, t_max=float(kappa_sq) * (1.0 + 1e-9)), 1.0
    return filt, 1.0


# ---------------------------------------------------------------------------
# grid checks of the definition
# ---------------------------------------------------------------------------

def default_lambda_grid() -> np.ndarray:
    return np.geomspace(1e-6, 1.0, 400)


def default_t_grid(t_max: float = 1.0) -> np.ndarray:
    return np.linspace(0.0, t_max, 1000)


@dataclass(frozen=True)
class ConstantsReport:
    filter_id: str
    D_obs: float
    B_obs: float
    gamma_obs: float
    passed: bool


def check_regularization_constants(filt: FilterFamily,
                                   lambda_grid=None,
                                   t_grid=None) -> ConstantsReport:
    """Observed suprema of the three basic conditions over the grids."""
    lams = default_lambda_grid() if lambda_grid is None else \
        np.asarray(lambda_grid, dtype=np.float64)
    ts = default_t_grid(filt.t_max) if t_grid is None else \
        np.asarray(t_grid, dtype=np.float64)
    if lams.size == 0 or ts.size == 0:
        raise ValueError("grids must be nonempty")
    D_obs = B_obs = gamma_obs = 0.0
    for lam in lams:
        g = apply_filter(filt, float(lam), ts)
        r = residual(filt, float(lam), ts)
        D_obs = max(D_obs, float(np.abs(ts * g).max()))
        B_obs = max(B_obs, float(np.abs(g).max() * lam))
        gamma_obs = max(gamma_obs, float(np.abs(r).max()))
    passed = (D_obs <= filt.D + _TOL and B_obs <= filt.B + _TOL
              and gamma_obs <= filt.gamma + _TOL)
    return ConstantsReport(filt.id, D_obs, B_obs, gamma_obs, passed)


def check_qualification(filt: FilterFamily, p: float,
                        lambda_grid=None, t_grid=None) -> float:
    """Largest observed |r_lambda(t)| t^p / lambda^p over the grids."""
    if not p > 0:
        raise ValueError("p must be positive")
    lams = default_lambda_grid() if lambda_grid is None else \
        np.asarray(lambda_grid, dtype=np.float64)
    ts = default_t_grid(filt.t_max) if t_grid is None else \
        np.asarray(t_grid, dtype=np.float64)
    worst = 0.0
    for lam in lams:
        r = residual(filt, float(lam), ts)
        worst = max(worst, float((np.abs(r) * ts ** p).max() / lam ** p))
    return worst


def check_covering(p: float, phi: IndexFunction, t_grid=None) -> bool:
    """True iff t^p / phi(t) is nondecreasing on the grid."""
    if not p > 0:
        raise ValueError("p must be positive")
    if t_grid is None:
        t_grid = np.geomspace(1e-12, 1.0, 1000)
    ts = np.asarray(t_grid, dtype=np.float64)
    vals = np.asarray(phi(ts))
    keep = (ts > 0) & (vals > 0)
    ratio = ts[keep] ** p / vals[keep]
    return bool(np.all(ratio[1:] >= ratio[:-1] * (1.0 - 1e-12)))


@dataclass(frozen=True)
class PropReport:
    filter_id: str
    p: float
    c_p: float
    max_ratio_1: float
    max_ratio_2: float
    passed: bool


def check_prop_regularization(filt: FilterFamily, phi: IndexFunction,
                              lambda_grid=None, t_grid=None,
                              p: Optional[float] = None) -> PropReport:
    """Residual-versus-index-function bounds, grid-maximized.

    Checks sup_t |r_lambda(t)| phi(t) <= c_p phi(lambda) and
    sup_t |r_lambda(t)| phi(lambda + t) <= 2^p c_p phi(lambda) with
    c_p = max(gamma, gamma_p), for a qualification order p covering phi.
    """
    if p is None:
        if math.isfinite(filt.qualification_p):
            p = filt.qualification_p
        else:
            p = next((c for c in (1.0, 2.0, 4.0, 8.0)
                      if check_covering(c, phi, t_grid)), None)
            if p is None:
                raise ValueError("no tested qualification order covers phi")
    if not check_covering(p, phi, t_grid):
        raise ValueError(f"qualification p={p} does not cover phi")
    lams = default_lambda_grid() if lambda_grid is None else \
        np.asarray(lambda_grid, dtype=np.float64)
    ts = default_t_grid(filt.t_max) if t_grid is None else \
        np.asarray(t_grid, dtype=np.float64)
    c_p = max(filt.gamma, filt.gamma_p_at(p))
    ratio_1 = ratio_2 = 0.0
    for lam in lams:
        lam = float(lam)
        r = np.abs(residual(filt, lam, ts))
        denom = float(np.asarray(phi(np.array(lam))))
        ratio_1 = max(ratio_1, float((r * np.asarray(phi(ts))).max()) / denom)
        ratio_2 = max(ratio_2,
                      float((r * np.asarray(phi(ts + lam))).max()) / denom)
    passed = (ratio_1 <= c_p + _TOL and ratio_2 <= 2.0 ** p * c_p + _TOL)
    return PropReport(filt.id, float(p), c_p, ratio_1, ratio_2, passed)

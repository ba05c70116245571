"""Monte Carlo convergence-rate experiments on power-type problems.

For a grid of sample sizes the harness picks lambda from the configured
rule, draws seeded trials, computes the chosen error norm of each
regularized solution, and fits the decay exponent of the per-m median
error in log-log coordinates.  The fitted exponent is compared against
the closed-form theoretical one.
"""

from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .filters import check_covering, make_filter
from .indexfn import IndexFunction, from_config, power_fn, to_config
from .lambda_rules import LambdaRule
from .model import SpectralProblem, build_power_problem
from .sampling import errors, estimate, sample_dataset

ERROR_NORMS = ("h", "prediction", "zeta")
CASES = ("oversmoothing", "regular")

DEFAULT_TOLERANCE = 0.08
_DEGENERATE_FLOOR = 1e-13
_D_CAP = 2000
_D_MIN = 64


def truncation_dim(m: int, s: float) -> int:
    """Series truncation d(m) = min(2000, max(64, 4 ceil(m^(1/2s)))).

    Chosen so the truncation tail stays below the sampling error of the
    shipped configurations.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if s <= 0:
        raise ValueError("s must be positive")
    return int(min(_D_CAP, max(_D_MIN, 4 * math.ceil(m ** (1.0 / (2.0 * s))))))


def theoretical_exponent(a: float, b: float, r: float, q: float,
                         case: str) -> float:
    """Rate exponent of m (negative) for the power-type benchmark.

    oversmoothing (r <= 1):        -a r / (b + 1)
    regular, a q >= a r + (b+1)/2: -r / (2 (q - 1))
    regular, otherwise:            -a r / (2 a r + b + 1 - 2 a)
    """
    if not 0 < a <= 0.5:
        raise ValueError("a must be in (0, 1/2]")
    if b < 0:
        raise ValueError("b must be >= 0")
    if r <= 0:
        raise ValueError("r must be positive")
    if case == "oversmoothing":
        if r > 1.0:
            raise ValueError("oversmoothing exponent requires r <= 1")
        return -a * r / (b + 1.0)
    if case == "regular":
        if not 1.0 <= r <= q:
            raise ValueError("regular exponent requires 1 <= r <= q")
        if q <= 1.0:
            raise ValueError("regular exponent requires q > 1")
        if a * q >= a * r + (b + 1.0) / 2.0:
            return -r / (2.0 * (q - 1.0))
        return -a * r / (2.0 * a * r + b + 1.0 - 2.0 * a)
    raise ValueError("case must be 'oversmoothing' or 'regular'")


@dataclass(frozen=True)
class PowerProblemSpec:
    """Parameters of the synthetic power-type problem family."""

    s: float
    a_link: float
    r: float
    q: float
    R_dagger: float = 1.0
    sigma: float = 0.05
    v_pattern: str = "constant"
    d_override: Optional[int] = None

    def build(self, m: int, seed: int) -> SpectralProblem:
        d = self.d_override or truncation_dim(m, self.s)
        return build_power_problem(self.s, self.a_link, self.r, self.q,
                                   self.R_dagger, d, self.sigma,
                                   v_pattern=self.v_pattern, seed=seed)

    def to_dict(self) -> dict:
        out = {"s": self.s, "a_link": self.a_link, "r": self.r, "q": self.q,
               "R_dagger": self.R_dagger, "sigma": self.sigma,
               "v_pattern": self.v_pattern}
        if self.d_override is not None:
            out["d_override"] = self.d_override
        return out


@dataclass(frozen=True)
class ExperimentConfig:
    problem: PowerProblemSpec
    filter_id: str = "tikhonov"
    lambda_rule: LambdaRule = field(
        default_factory=lambda: LambdaRule("power_table", {"case": "regular"}))
    m_grid: tuple = (256, 512, 1024, 2048, 4096, 8192, 16384)
    trials_per_m: int = 50
    seed: int = 0
    error_norm: str = "h"
    case: str = "regular"
    tolerance: float = DEFAULT_TOLERANCE
    zeta: Optional[dict] = None
    threads: Optional[int] = None

    def __post_init__(self):
        ms = tuple(int(m) for m in self.m_grid)
        object.__setattr__(self, "m_grid", ms)
        if len(ms) < 2 or any(b <= a for a, b in zip(ms, ms[1:])):
            raise ValueError("m_grid must be strictly increasing")
        if math.log10(ms[-1] / ms[0]) < 1.5:
            raise ValueError("m_grid must span at least 1.5 decades")
        if self.trials_per_m < 10:
            raise ValueError("trials_per_m must be >= 10")
        if self.error_norm not in ERROR_NORMS:
            raise ValueError(f"error_norm must be one of {ERROR_NORMS}")
        if self.case not in CASES:
            raise ValueError(f"case must be one of {CASES}")
        if self.error_norm == "zeta" and self.zeta is None:
            raise ValueError("error_norm 'zeta' needs a zeta spec")

    def to_dict(self) -> dict:
        out = {"problem": self.problem.to_dict(),
               "filter": self.filter_id,
               "lambda_rule": {"kind": self.lambda_rule.kind,
                               "params": dict(self.lambda_rule.params)},
               "m_grid": list(self.m_grid),
               "trials_per_m": self.trials_per_m,
               "seed": self.seed,
               "error_norm": self.error_norm,
               "case": self.case,
               "tolerance": self.tolerance}
        if self.zeta is not None:
            out["zeta"] = to_config(from_config(self.zeta))
        return out


def config_hash(config: ExperimentConfig) -> str:
    doc = json.dumps(config.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(doc.encode()).hexdigest()


@dataclass(frozen=True)
class RateReport:
    per_m: tuple
    fitted_exponent: float
    fit_stderr: float
    theoretical_exponent: float
    passed: bool
    config_hash: str
    degenerate: bool = False

    def to_dict(self) -> dict:
        return {"per_m": [dict(row) for row in self.per_m],
                "fitted_exponent": self.fitted_exponent,
                "fit_stderr": self.fit_stderr,
                "theoretical_exponent": self.theoretical_exponent,
                "pass": self.passed,
                "config_hash": self.config_hash,
                "degenerate": self.degenerate}


def _wls_line(xs, ys, weights):
    """Weighted least squares for y = b0 + b1 x; returns (b1, stderr)."""
    xs, ys = np.asarray(xs, float), np.asarray(ys, float)
    w = np.asarray(weights, float)
    X = np.column_stack([np.ones_like(xs), xs])
    xtwx = X.T @ (w[:, None] * X)
    beta = np.linalg.solve(xtwx, X.T @ (w * ys))
    resid = ys - X @ beta
    dof = len(xs) - 2
    if dof <= 0:
        return float(beta[1]), float("nan")
    s2 = float(w @ resid ** 2) / dof
    cov = np.linalg.inv(xtwx) * s2
    return float(beta[1]), float(math.sqrt(max(cov[1, 1], 0.0)))


def fit_rate(points) -> dict:
    """OLS slope of log(error) vs log(m); needs >= 4 positive points."""
    points = list(points)
    if len(points) < 4:
        raise ValueError("need at least 4 points to fit a rate")
    ms = np.array([p[0] for p in points], dtype=np.float64)
    es = np.array([p[1] for p in points], dtype=np.float64)
    if np.any(es <= 0):
        raise ValueError("all error values must be positive")
    slope, stderr = _wls_line(np.log(ms), np.log(es), np.ones(len(ms)))
    return {"slope": slope, "stderr": stderr}


def _covering_target(config: ExperimentConfig) -> IndexFunction:
    sm = config.problem
    if config.case == "oversmoothing":
        return power_fn(sm.a_link)
    return power_fn(sm.a_link * sm.q)


def run_rate_experiment(config: ExperimentConfig) -> RateReport:
    """Execute the configured rate experiment; deterministic under seed.

    Per m-cell: lambda from the rule, trials_per_m seeded datasets,
    chosen error norm per trial.  Medians are fitted by weighted least
    squares in log-log (weights = trials / variance of the log errors).
    Refuses configs whose filter qualification does not cover the
    case's index function, and aborts on any NaN error with the cell
    named.
    """
    filt = make_filter(config.filter_id)
    p = filt.qualification_p
    if not check_covering(min(p, 64.0), _covering_target(config)):
        raise ValueError(
            f"filter {config.filter_id!r} (qualification {p:g}) does not "
            f"cover the {config.case} index function; config refused")
    zeta = from_config(config.zeta) if config.zeta is not None else None
    sm = config.problem
    theo = theoretical_exponent(sm.a_link, sm.a_link / sm.s, sm.r, sm.q,
                                config.case)

    key = {"h": "h_norm", "prediction": "prediction_norm",
           "zeta": "zeta_norm"}[config.error_norm]
    direct = config.filter_id == "tikhonov"

    cells = []
    for m in config.m_grid:
        problem = sm.build(m, config.seed)
        lam = config.lambda_rule.resolve(problem, m)
        tseeds = np.random.SeedSequence([config.seed, m]).generate_state(
            config.trials_per_m, dtype=np.uint64)
        cells.append((m, problem, lam, tseeds))

    def one(cell_idx: int, k: int) -> float:
        m, problem, lam, tseeds = cells[cell_idx]
        ds = sample_dataset(problem, m, int(tseeds[k]))
        est = estimate(problem, ds, filt, lam, tikhonov_direct=direct)
        val = errors(problem, est, zeta=zeta)[key]
        if not math.isfinite(val):
            raise RuntimeError(f"non-finite error in cell m={m}, trial={k}")
        return val

    jobs = [(ci, k) for ci in range(len(cells))
            for k in range(config.trials_per_m)]
    if config.threads is not None and config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            flat = list(pool.map(lambda jk: one(*jk), jobs))
    else:
        flat = [one(*jk) for jk in jobs]

    per_m, log_meds, weights = [], [], []
    degenerate = False
    for ci, (m, _, lam, _) in enumerate(cells):
        vals = np.array(flat[ci * config.trials_per_m:
                             (ci + 1) * config.trials_per_m])
        med = float(np.median(vals))
        per_m.append({"m": int(m), "lambda_used": float(lam),
                      "mean_error": float(np.mean(vals)),
                      "median_error": med,
                      "std_error": float(np.std(vals, ddof=1))})
        if med < _DEGENERATE_FLOOR:
            degenerate = True
            continue
        log_meds.append(math.log(med))
        var = float(np.var(np.log(np.maximum(vals, _DEGENERATE_FLOOR)),
                           ddof=1))
        weights.append(config.trials_per_m / max(var, 1e-12))

    if degenerate or len(log_meds) < 2:
        return RateReport(per_m=tuple(per_m), fitted_exponent=float("nan"),
                          fit_stderr=float("nan"),
                          theoretical_exponent=theo, passed=False,
                          config_hash=config_hash(config), degenerate=True)

    kept_ms = [row["m"] for row in per_m
               if row["median_error"] >= _DEGENERATE_FLOOR]
    slope, stderr = _wls_line(np.log(kept_ms), log_meds, weights)
    passed = abs(slope - theo) <= config.tolerance
    return RateReport(per_m=tuple(per_m), fitted_exponent=slope,
                      fit_stderr=stderr, theoretical_exponent=theo,
                      passed=passed, config_hash=config_hash(config))

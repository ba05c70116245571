"""Synthetic diagonal inverse problems on L2([0,1], uniform).

The forward operator A and the scale operator L act diagonally in the
orthonormal cosine basis

    e_1(x) = 1,   e_j(x) = sqrt(2) * cos((j-1) * pi * x)  for j >= 2,

with A e_j = a_j e_j and L e_j = l_j e_j.  Everything downstream -- the
covariance spectrum t_j = (a_j / l_j)**2, its effective dimension, the
design matrices of the sampled operators -- derives from the triple
(a, l, f_true) stored here.  Truncation to d modes makes every operator
a finite matrix; experiment code picks d large enough that truncation
bias is negligible against sampling error.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

from . import _accel

SQRT2 = float(np.sqrt(2.0))

V_PATTERNS = ("constant", "alternating", "seeded")


@dataclass(frozen=True)
class NoiseModel:
    """Observation noise: Gaussian with std ``sigma``.

    ``M`` and ``Sigma_const`` are the moment constants reported to the
    concentration bounds.  For Gaussian noise the documented sufficient
    choice is M = Sigma_const = sigma; they are stored, not derived.
    When sigma = 0 a positive placeholder of 1.0 keeps the bound
    formulas well-defined (the bounds are vacuous at sigma = 0).
    """

    sigma: float
    M: float
    Sigma_const: float

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        if not (self.M > 0 and self.Sigma_const > 0):
            raise ValueError("M and Sigma_const must be positive")
        if self.M < self.sigma or self.Sigma_const < self.sigma:
            raise ValueError("need M >= sigma and Sigma_const >= sigma")


def gaussian_noise(sigma: float) -> NoiseModel:
    c = sigma if sigma > 0 else 1.0
    return NoiseModel(sigma=float(sigma), M=c, Sigma_const=c)


@dataclass(frozen=True)
class SmoothnessSpec:
    """Source-condition bookkeeping for problems built from power laws.

    r is the source exponent (theta(t) = t**r), a_link the link exponent
    (rho(t) = t**a_link), q the benchmark exponent, R_dagger the source
    norm bound and s the scale growth exponent (l_j = j**s).
    """

    r: float
    a_link: float
    q: float
    R_dagger: float
    s: float

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError("r must be positive")
        if not 0 < self.a_link <= 0.5:
            raise ValueError("a_link must be in (0, 1/2]")
        if self.q < 1:
            raise ValueError("q must be >= 1")
        if not self.R_dagger > 0:
            raise ValueError("R_dagger must be positive")
        if not self.s > 0:
            raise ValueError("s must be positive")

    @property
    def b(self) -> float:
        """Effective-dimension decay exponent of the induced spectrum."""
        return self.a_link / self.s


@dataclass(frozen=True)
class SpectralProblem:
    d: int
    basis: str
    a: np.ndarray
    l: np.ndarray
    f_true: np.ndarray
    noise: NoiseModel
    smoothness: Optional[SmoothnessSpec] = None

    def __post_init__(self):
        if self.basis != "cosine":
            raise ValueError(f"unsupported basis: {self.basis!r}")
        if self.d < 1:
            raise ValueError("d must be >= 1")
        for name in ("a", "l", "f_true"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.float64)
            if arr.shape != (self.d,):
                raise ValueError(f"{name} must have length d={self.d}")
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        if not np.all(self.a > 0):
            raise ValueError("all a_j must be positive")
        if not np.all(self.l > 0):
            raise ValueError("all l_j must be positive")
        if np.any(np.diff(self.l) < 0):
            raise ValueError("l must be nondecreasing")

    @cached_property
    def t(self) -> np.ndarray:
        """Population covariance eigenvalues t_j = (a_j / l_j)**2."""
        t = (self.a / self.l) ** 2
        t.flags.writeable = False
        return t

    @cached_property
    def lnu_eigs(self) -> np.ndarray:
        """Eigenvalues a_j**2 of the population operator built from A."""
        e = self.a ** 2
        e.flags.writeable = False
        return e

    @cached_property
    def kappa_sq(self) -> float:
        # sup_x sum_j t_j e_j(x)^2 is attained at x = 0 where every
        # squared cosine mode reaches its maximum 2 simultaneously
        t = self.t
        return float(t[0] + 2.0 * t[1:].sum())

    @cached_property
    def kappa_tilde_sq(self) -> float:
        e = self.lnu_eigs
        return float(e[0] + 2.0 * e[1:].sum())

    def eval_basis(self, j: int, x):
        return eval_basis(self.basis, j, x, d=self.d)


def build_power_problem(s: float, a_link: float, r: float, q: float,
                        R_dagger: float, d: int, sigma: float,
                        v_pattern: str = "constant",
                        seed: int = 0) -> SpectralProblem:
    """Construct a problem whose link condition holds with equality.

    With l_j = j**s and a_j = j**(s * (1 - 1/(2*a_link))) the covariance
    spectrum is t_j = l_j**(-1/a_link) exactly, so rho(t) = t**a_link
    links the two scales with constant 1.  The truth is f_j = l_j**(-r)
    * v_j where the source element v has norm R_dagger and its shape is
    chosen by ``v_pattern``:

    - "constant":    v_j = R_dagger / sqrt(d)
    - "alternating": same magnitude, alternating sign
    - "seeded":      standard normal draws rescaled to norm R_dagger
                     (counter-based generator keyed by ``seed``)
    """
    if not 0 < a_link <= 0.5:
        raise ValueError("a_link must be in (0, 1/2]")
    if not s > 0:
        raise ValueError("s must be positive")
    if d < 2:
        raise ValueError("d must be >= 2")
    spec = SmoothnessSpec(r=float(r), a_link=float(a_link), q=float(q),
                          R_dagger=float(R_dagger), s=float(s))
    j = np.arange(1, d + 1, dtype=np.float64)
    l = j ** s
    a = j ** (s * (1.0 - 1.0 / (2.0 * a_link)))
    if v_pattern == "constant":
        v = np.full(d, R_dagger / np.sqrt(d))
    elif v_pattern == "alternating":
        v = np.full(d, R_dagger / np.sqrt(d))
        v[1::2] *= -1.0
    elif v_pattern == "seeded":
        gen = np.random.Generator(np.random.Philox(
            np.random.SeedSequence([int(seed)])))
        v = gen.standard_normal(d)
        v *= R_dagger / np.linalg.norm(v)
    else:
        raise ValueError(f"v_pattern must be one of {V_PATTERNS}")
    f_true = l ** (-r) * v
    return SpectralProblem(d=d, basis="cosine", a=a, l=l, f_true=f_true,
                           noise=gaussian_noise(sigma), smoothness=spec)


def eval_basis(basis: str, j: int, x, d: Optional[int] = None):
    """Value of the j-th (1-based) basis function at x."""
    if basis != "cosine":
        raise ValueError(f"unsupported basis: {basis!r}")
    if j < 1 or (d is not None and j > d):
        raise IndexError(f"basis index {j} out of range")
    x = np.asarray(x, dtype=np.float64)
    out = np.ones_like(x) if j == 1 else SQRT2 * np.cos((j - 1) * np.pi * x)
    return float(out) if out.ndim == 0 else out


def forward_eval(problem: SpectralProblem, f: np.ndarray, x):
    """Evaluate g(x) = sum_j a_j f_j e_j(x) (the regression function)."""
    f = np.asarray(f, dtype=np.float64)
    if f.shape != (problem.d,):
        raise ValueError(f"f must have length d={problem.d}")
    coef = problem.a * f
    coef = np.concatenate(([coef[0]], SQRT2 * coef[1:]))
    return _accel.clenshaw_cosine(np.asarray(x, dtype=np.float64), coef)


def hilbert_scale_norm(problem: SpectralProblem, f: np.ndarray,
                       s_exp: float) -> float:
    """Norm of f in the scale space of order s_exp: sqrt(sum l^(2s) f^2)."""
    f = np.asarray(f, dtype=np.float64)
    if f.shape != (problem.d,):
        raise ValueError(f"f must have length d={problem.d}")
    if s_exp == 0.0:
        return float(np.linalg.norm(f))
    return float(np.linalg.norm(problem.l ** s_exp * f))


# ---------------------------------------------------------------------------
# JSON round-tripping
# ---------------------------------------------------------------------------

def problem_to_dict(problem: SpectralProblem) -> dict:
    sm = problem.smoothness
    return {
        "d": problem.d,
        "basis": problem.basis,
        "a": problem.a.tolist(),
        "l": problem.l.tolist(),
        "f_true": problem.f_true.tolist(),
        "noise": {
            "sigma": problem.noise.sigma,
            "M": problem.noise.M,
            "Sigma": problem.noise.Sigma_const,
        },
        "smoothness": None if sm is None else {
            "r": sm.r, "a_link": sm.a_link, "q": sm.q,
            "R_dagger": sm.R_dagger, "s": sm.s,
        },
    }


def problem_from_dict(doc: dict) -> SpectralProblem:
    noise = doc["noise"]
    sm = doc.get("smoothness")
    return SpectralProblem(
        d=int(doc["d"]),
        basis=doc["basis"],
        a=np.asarray(doc["a"], dtype=np.float64),
        l=np.asarray(doc["l"], dtype=np.float64),
        f_true=np.asarray(doc["f_true"], dtype=np.float64),
        noise=NoiseModel(sigma=float(noise["sigma"]), M=float(noise["M"]),
                         Sigma_const=float(noise["Sigma"])),
        smoothness=None if sm is None else SmoothnessSpec(
            r=float(sm["r"]), a_link=float(sm["a_link"]), q=float(sm["q"]),
            R_dagger=float(sm["R_dagger"]), s=float(sm["s"])),
    )

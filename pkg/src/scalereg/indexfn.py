"""Index functions: continuous, strictly increasing, vanishing at zero.

Power laws cover everything the diagonal experiments need, but a
log-damped family and products are provided so curvature away from a
pure power can be represented (severely ill-posed spectra).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np


@dataclass(frozen=True)
class IndexFunction:
    """An index function t -> phi(t) on (0, t_max].

    kind
        "power":   phi(t) = t**exponent, exponent > 0.
        "log":     phi(t) = t**p * log(e + 1/t)**(-nu), nu >= 0.
        "product": phi = left * right, both index functions.
    """

    kind: str
    exponent: float = 1.0
    p: float = 1.0
    nu: float = 0.0
    left: Optional["IndexFunction"] = None
    right: Optional["IndexFunction"] = None

    def __post_init__(self):
        if self.kind == "power":
            if not self.exponent > 0:
                raise ValueError("power index function needs exponent > 0")
        elif self.kind == "log":
            if not self.p > 0 or self.nu < 0:
                raise ValueError("log index function needs p > 0, nu >= 0")
        elif self.kind == "product":
            if self.left is None or self.right is None:
                raise ValueError("product index function needs two factors")
        else:
            raise ValueError(f"unknown index function kind: {self.kind!r}")

    def __call__(self, t):
        t = np.asarray(t, dtype=np.float64)
        if self.kind == "power":
            out = np.power(t, self.exponent, where=t > 0,
                           out=np.zeros_like(t))
        elif self.kind == "log":
            with np.errstate(divide="ignore"):
                damp = np.log(np.e + np.divide(1.0, t, where=t > 0,
                                               out=np.full_like(t, np.inf)))
            out = np.power(t, self.p, where=t > 0, out=np.zeros_like(t))
            out = np.divide(out, damp ** self.nu, where=np.isfinite(damp),
                            out=np.zeros_like(out))
        else:
            out = np.asarray(self.left(t)) * np.asarray(self.right(t))
        return float(out) if out.ndim == 0 else out


def power_fn(exponent: float) -> IndexFunction:
    return IndexFunction(kind="power", exponent=exponent)


IDENTITY = power_fn(1.0)


def check_index_function(phi: Callable[[np.ndarray], np.ndarray],
                         t_max: float = 1.0,
                         n_grid: int = 512) -> bool:
    """Grid check: strictly increasing on (0, t_max] and phi(0) = 0."""
    grid = np.geomspace(t_max * 1e-12, t_max, n_grid)
    vals = np.asarray(phi(grid))
    v0 = float(np.asarray(phi(np.array(0.0))))
    return bool(np.all(np.diff(vals) > 0) and vals[0] > 0 and v0 == 0.0)


def check_sublinear(phi, t_max: float = 1.0, n_grid: int = 512,
                    rtol: float = 1e-9) -> bool:
    """Grid check that phi(t)/t is nonincreasing (sub-linearity)."""
    grid = np.geomspace(t_max * 1e-12, t_max, n_grid)
    ratio = np.asarray(phi(grid)) / grid
    return bool(np.all(ratio[1:] <= ratio[:-1] * (1.0 + rtol)))


def from_config(obj) -> IndexFunction:
    """Build an IndexFunction from a config mapping.

    Accepted shapes: {"kind": "power", "exponent": e},
    {"kind": "log", "p": p, "nu": nu}, and
    {"kind": "product", "left": {...}, "right": {...}}.
    """
    if isinstance(obj, IndexFunction):
        return obj
    if not isinstance(obj, dict):
        raise ValueError("index function config must be a mapping")
    kind = obj.get("kind")
    if kind == "power":
        return IndexFunction(kind="power", exponent=float(obj["exponent"]))
    if kind == "log":
        return IndexFunction(kind="log", p=float(obj["p"]),
                             nu=float(obj.get("nu", 0.0)))
    if kind == "product":
        return IndexFunction(kind="product",
                             left=from_config(obj["left"]),
                             right=from_config(obj["right"]))
    raise ValueError(f"unknown index function kind: {kind!r}")


def to_config(phi: IndexFunction) -> dict:
    if phi.kind == "power":
        return {"kind": "power", "exponent": phi.exponent}
    if phi.kind == "log":
        return {"kind": "log", "p": phi.p, "nu": phi.nu}
    return {"kind": "product", "left": to_config(phi.left),
            "right": to_config(phi.right)}

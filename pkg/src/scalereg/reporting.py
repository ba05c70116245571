"""Report serialization: canonical JSON, CSV emitters/parsers, manifest.

All report files are deterministic functions of their inputs (no
timestamps), and re-emitting a parsed report reproduces the file byte
for byte.  Floats in CSV are written with repr(), which round-trips
exactly; JSON replaces non-finite values by null.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import platform
from importlib import metadata

import numpy as np

from ._accel import backend_name

BOUNDS_HEADER = ("quantity", "lambda", "m", "eta", "trials",
                 "quantile", "bound", "coverage")
RATE_HEADER = ("m", "lambda", "mean", "median", "std")

_RATE_FOOTER_KEYS = ("fitted_exponent", "fit_stderr", "theoretical_exponent",
                     "pass", "degenerate", "config_hash")


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite to null."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    return obj


def canonical_json(doc) -> str:
    return json.dumps(_clean(doc), sort_keys=True, separators=(",", ":"),
                      allow_nan=False) + "\n"


def sha256_of(doc) -> str:
    return hashlib.sha256(canonical_json(doc).encode()).hexdigest()


def write_json(path, doc) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canonical_json(doc))


def read_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _f(v) -> str:
    return repr(float(v))


def _parse(tok: str):
    return float(tok)


# ---------------------------------------------------------------- CSV

def write_effdim_csv(path, lambdas, values) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("lambda", "n_effective"))
        for lam, val in zip(lambdas, values):
            w.writerow((_f(lam), _f(val)))


def read_effdim_csv(path):
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if rows[0] != ["lambda", "n_effective"]:
        raise ValueError(f"unexpected header {rows[0]!r}")
    lams = [_parse(r[0]) for r in rows[1:]]
    vals = [_parse(r[1]) for r in rows[1:]]
    return lams, vals


def write_distance_csv(path, Rs, values) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("R", "d_value"))
        for R, val in zip(Rs, values):
            w.writerow((_f(R), _f(val)))


def read_distance_csv(path):
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if rows[0] != ["R", "d_value"]:
        raise ValueError(f"unexpected header {rows[0]!r}")
    return ([_parse(r[0]) for r in rows[1:]],
            [_parse(r[1]) for r in rows[1:]])


def write_bounds_csv(path, reports) -> None:
    """One row per BoundCheckReport (or equivalent dict)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(BOUNDS_HEADER)
        for rep in reports:
            doc = rep.to_dict() if hasattr(rep, "to_dict") else dict(rep)
            w.writerow((doc["quantity"], _f(doc["lambda"]), str(doc["m"]),
                        _f(doc["eta"]), str(doc["trials"]),
                        _f(doc["empirical_quantile"]),
                        _f(doc["bound_value"]), _f(doc["coverage"])))


def read_bounds_csv(path):
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if tuple(rows[0]) != BOUNDS_HEADER:
        raise ValueError(f"unexpected header {rows[0]!r}")
    out = []
    for r in rows[1:]:
        out.append({"quantity": r[0], "lambda": _parse(r[1]), "m": int(r[2]),
                    "eta": _parse(r[3]), "trials": int(r[4]),
                    "empirical_quantile": _parse(r[5]),
                    "bound_value": _parse(r[6]), "coverage": _parse(r[7])})
    return out


def write_rate_csv(path, report) -> None:
    """Per-m rows plus a '#'-prefixed footer with the fit summary."""
    doc = report.to_dict() if hasattr(report, "to_dict") else dict(report)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RATE_HEADER)
        for row in doc["per_m"]:
            w.writerow((str(row["m"]), _f(row["lambda_used"]),
                        _f(row["mean_error"]), _f(row["median_error"]),
                        _f(row["std_error"])))
        for key in _RATE_FOOTER_KEYS:
            val = doc[key]
            if isinstance(val, bool):
                tok = "true" if val else "false"
            elif isinstance(val, str):
                tok = val
            else:
                tok = _f(val) if val is not None else "nan"
            fh.write(f"# {key},{tok}\n")


def read_rate_csv(path) -> dict:
    per_m, footer = [], {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        lines = fh.read().splitlines()
    header = lines[0].split(",")
    if tuple(header) != RATE_HEADER:
        raise ValueError(f"unexpected header {header!r}")
    for line in lines[1:]:
        if line.startswith("# "):
            key, tok = line[2:].split(",", 1)
            if key in ("pass", "degenerate"):
                footer[key] = tok == "true"
            elif key == "config_hash":
                footer[key] = tok
            else:
                footer[key] = _parse(tok)
            continue
        r = line.split(",")
        per_m.append({"m": int(r[0]), "lambda_used": _parse(r[1]),
                      "mean_error": _parse(r[2]), "median_error": _parse(r[3]),
                      "std_error": _parse(r[4])})
    return {"per_m": per_m, **footer}


def write_dataset_csv(path, dataset) -> None:
    """Raw sample export, x,y with 15 significant digits."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("x,y\n")
        for xi, yi in zip(dataset.x, dataset.y):
            fh.write(f"{xi:.15g},{yi:.15g}\n")


def estimate_to_dict(est) -> dict:
    return {"lambda": est.lam, "filter": est.filter_id,
            "f_hat": [float(v) for v in est.f_hat]}


# ------------------------------------------------------------ manifest

def _pkg_version(name: str):
    try:
        return metadata.version(name)
    except metadata.PackageNotFoundError:
        return None


def manifest(config_doc, seed) -> dict:
    """Reproducibility record: config hash, seed, versions, backend."""
    import scipy

    return {"config_sha256": sha256_of(config_doc),
            "seed": int(seed),
            "backend": backend_name(),
            "versions": {"python": platform.python_version(),
                         "numpy": np.__version__,
                         "scipy": scipy.__version__,
                         "numba": _pkg_version("numba"),
                         "scalereg": _pkg_version("scalereg") or "0.1.0"}}


def write_manifest(path, config_doc, seed) -> None:
    write_json(path, manifest(config_doc, seed))

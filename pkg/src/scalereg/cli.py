"""Command-line front end.

    scalereg COMMAND [--config PATH] [--out DIR] [--seed N]
                     [--threads N] [--set key=value]...

Commands: rate, effdim, bounds, distance, filters-check, decompose.
Configs are JSON; --set overrides a (dotted) config key.  Exit codes:
0 pass, 2 acceptance failure, 1 runtime error, 64 usage error, 65
malformed config (the message carries a JSON pointer to the field).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .diagnostics import QUANTITIES, montecarlo_coverage_batch
from .distance import distance_curve
from .effdim import effdim_curve, fit_effdim_exponent
from .filters import (FILTER_NAMES, check_prop_regularization,
                      check_qualification, check_regularization_constants,
                      make_filter)
from .harness import ExperimentConfig, PowerProblemSpec, run_rate_experiment
from .indexfn import from_config as indexfn_from_config
from .indexfn import power_fn
from .lambda_rules import RULE_NAMES, LambdaRule
from .mercer import K2_NOTE, mercer_decompose
from .model import problem_from_dict
from .reporting import (write_bounds_csv, write_distance_csv,
                        write_effdim_csv, write_json, write_manifest,
                        write_rate_csv)
from .svgplot import write_loglog_svg

EX_OK, EX_ERROR, EX_FAIL, EX_USAGE, EX_CONFIG = 0, 1, 2, 64, 65

COMMANDS = ("rate", "effdim", "bounds", "distance", "filters-check",
            "decompose")

_USAGE = """\
usage: scalereg COMMAND [--config PATH] [--out DIR] [--seed N]
                        [--threads N] [--set key=value]...

commands:
  rate           convergence-rate experiment (rate_report.json/.csv, rate.svg)
  effdim         effective-dimension curve (effdim.csv)
  bounds         Monte Carlo coverage of the concentration bounds (bounds.csv)
  distance       distance-function curve (distance.csv)
  filters-check  verify filter constants, qualification, covering bounds
  decompose      quadrature eigendecomposition of a reference kernel
                 (kernel k2 reads the source formula 'xt' as x*x')
"""

_MISSING = object()


class ConfigError(Exception):
    """Malformed config; ``pointer`` locates the offending field."""

    def __init__(self, pointer: str, message: str):
        super().__init__(message)
        self.pointer = pointer or "/"


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _get(doc, key, ptr, cast=None, default=_MISSING, choices=None):
    if not isinstance(doc, dict):
        raise ConfigError(ptr, "expected an object")
    if key not in doc:
        if default is _MISSING:
            raise ConfigError(f"{ptr}/{key}", "missing required field")
        return default
    val = doc[key]
    if cast is not None:
        try:
            val = cast(val)
        except (TypeError, ValueError):
            raise ConfigError(f"{ptr}/{key}",
                              f"cannot interpret {val!r} as {cast.__name__}")
    if choices is not None and val not in choices:
        raise ConfigError(f"{ptr}/{key}",
                          f"must be one of {tuple(choices)}, got {val!r}")
    return val


def _float_list(doc, key, ptr, default=_MISSING):
    raw = _get(doc, key, ptr, default=default)
    if raw is default and default is not _MISSING:
        return default
    try:
        vals = [float(v) for v in raw]
    except (TypeError, ValueError):
        raise ConfigError(f"{ptr}/{key}", "must be a list of numbers")
    if not vals:
        raise ConfigError(f"{ptr}/{key}", "must be nonempty")
    return vals


def _lambda_rule_from(doc, ptr) -> LambdaRule:
    kind = _get(doc, "kind", ptr, cast=str, choices=RULE_NAMES)
    params = _get(doc, "params", ptr, default={})
    if not isinstance(params, dict):
        raise ConfigError(f"{ptr}/params", "must be an object")
    return LambdaRule(kind, params)


def _power_spec_from(doc, ptr) -> PowerProblemSpec:
    spec = dict(
        s=_get(doc, "s", ptr, cast=float),
        a_link=_get(doc, "a_link", ptr, cast=float),
        r=_get(doc, "r", ptr, cast=float),
        q=_get(doc, "q", ptr, cast=float),
        R_dagger=_get(doc, "R_dagger", ptr, cast=float, default=1.0),
        sigma=_get(doc, "sigma", ptr, cast=float, default=0.05),
        v_pattern=_get(doc, "v_pattern", ptr, cast=str, default="constant"),
    )
    d = _get(doc, "d", ptr, cast=int, default=None)
    try:
        return PowerProblemSpec(d_override=d, **spec)
    except ValueError as exc:
        raise ConfigError(ptr, str(exc))


def _concrete_problem(doc, ptr, seed: int):
    """An explicit SpectralProblem (inline arrays or a power spec + d)."""
    if not isinstance(doc, dict):
        raise ConfigError(ptr, "expected an object")
    if "a" in doc:
        try:
            return problem_from_dict(doc)
        except (KeyError, ValueError, TypeError) as exc:
            raise ConfigError(ptr, f"bad inline problem: {exc}")
    spec = _power_spec_from(doc, ptr)
    if spec.d_override is None:
        raise ConfigError(f"{ptr}/d", "missing required field (this command "
                          "needs a concrete dimension)")
    try:
        return spec.build(1, seed)
    except ValueError as exc:
        raise ConfigError(ptr, str(exc))


def _experiment_from_doc(doc, seed, threads) -> ExperimentConfig:
    prob = _power_spec_from(_get(doc, "problem", ""), "/problem")
    rule = _lambda_rule_from(
        _get(doc, "lambda_rule", "", default={"kind": "power_table"}),
        "/lambda_rule")
    m_grid = _get(doc, "m_grid", "")
    try:
        m_grid = tuple(int(m) for m in m_grid)
    except (TypeError, ValueError):
        raise ConfigError("/m_grid", "must be a list of integers")
    kwargs = dict(
        problem=prob,
        filter_id=_get(doc, "filter", "", cast=str, default="tikhonov",
                       choices=FILTER_NAMES),
        lambda_rule=rule,
        m_grid=m_grid,
        trials_per_m=_get(doc, "trials_per_m", "", cast=int, default=50),
        seed=seed if seed is not None else _get(doc, "seed", "", cast=int,
                                                default=0),
        error_norm=_get(doc, "error_norm", "", cast=str, default="h"),
        case=_get(doc, "case", "", cast=str, default="regular"),
        tolerance=_get(doc, "tolerance", "", cast=float, default=0.08),
        zeta=_get(doc, "zeta", "", default=None),
        threads=threads,
    )
    try:
        return ExperimentConfig(**kwargs)
    except ValueError as exc:
        msg = str(exc)
        for key in ("m_grid", "trials_per_m", "error_norm", "case", "zeta"):
            if key in msg:
                raise ConfigError(f"/{key}", msg)
        raise ConfigError("", msg)


# ------------------------------------------------------------- commands

def _cmd_rate(doc, out: Path, seed, threads) -> int:
    cfg = _experiment_from_doc(doc, seed, threads)
    report = run_rate_experiment(cfg)
    write_json(out / "rate_report.json", report.to_dict())
    write_rate_csv(out / "rate_report.csv", report)
    pts = [(row["m"], row["median_error"]) for row in report.per_m
           if row["median_error"] > 0]
    if len(pts) >= 2:
        write_loglog_svg(
            out / "rate.svg", pts,
            fitted_slope=None if report.degenerate else report.fitted_exponent,
            theoretical_slope=report.theoretical_exponent,
            title=f"median error vs m ({cfg.filter_id}, {cfg.case})")
    write_manifest(out / "manifest.json", cfg.to_dict(), cfg.seed)
    if report.degenerate:
        print("rate: degenerate fit (errors at machine zero); "
              f"theoretical exponent {report.theoretical_exponent:.4f}")
        return EX_FAIL
    verdict = "PASS" if report.passed else "FAIL"
    print(f"rate: fitted exponent {report.fitted_exponent:.4f} vs "
          f"theoretical {report.theoretical_exponent:.4f} "
          f"(tolerance {cfg.tolerance:g}) -> {verdict}")
    return EX_OK if report.passed else EX_FAIL


def _cmd_effdim(doc, out: Path, seed, threads) -> int:
    if "spectrum" in doc:
        spectrum = np.asarray(_float_list(doc, "spectrum", ""),
                              dtype=np.float64)
        if np.any(spectrum <= 0):
            raise ConfigError("/spectrum", "entries must be positive")
    else:
        problem = _concrete_problem(_get(doc, "problem", ""), "/problem",
                                    seed if seed is not None else 0)
        spectrum = problem.t
    lo = _get(doc, "lambda_lo", "", cast=float, default=1e-6)
    hi = _get(doc, "lambda_hi", "", cast=float, default=1.0)
    ppd = _get(doc, "points_per_decade", "", cast=int, default=40)
    if not 0 < lo < hi:
        raise ConfigError("/lambda_lo", "need 0 < lambda_lo < lambda_hi")
    curve = effdim_curve(spectrum, lo, hi, ppd)
    write_effdim_csv(out / "effdim.csv", curve.lambdas, curve.values)
    write_manifest(out / "manifest.json", doc, seed if seed is not None else 0)
    rc = EX_OK
    msg = (f"effdim: N({lo:g}) = {curve.values[0]:.6g}, "
           f"N({hi:g}) = {curve.values[-1]:.6g}")
    expected_b = _get(doc, "expected_b", "", cast=float, default=None)
    if expected_b is not None or doc.get("fit"):
        fit = fit_effdim_exponent(spectrum,
                                  _get(doc, "fit_lo", "", cast=float,
                                       default=lo),
                                  _get(doc, "fit_hi", "", cast=float,
                                       default=hi))
        msg += f", fitted decay exponent b = {fit['b_hat']:.4f}"
        if expected_b is not None:
            tol = _get(doc, "b_tolerance", "", cast=float, default=0.05)
            if abs(fit["b_hat"] - expected_b) > tol:
                msg += f" (expected {expected_b:g} +- {tol:g}) -> FAIL"
                rc = EX_FAIL
            else:
                msg += f" (expected {expected_b:g} +- {tol:g}) -> PASS"
    print(msg)
    return rc


def _cmd_bounds(doc, out: Path, seed, threads) -> int:
    seed = seed if seed is not None else _get(doc, "seed", "", cast=int,
                                              default=0)
    problem = _concrete_problem(_get(doc, "problem", ""), "/problem", seed)
    quantities = _get(doc, "quantities", "",
                      default=["PSI", "UPSILON", "LAMBDA_Q", "TX_DEV"])
    for q in quantities:
        if q not in QUANTITIES:
            raise ConfigError("/quantities",
                              f"unknown quantity {q!r}; expected subset of "
                              f"{QUANTITIES}")
    etas = _float_list(doc, "etas", "", default=[0.05, 0.1])
    for eta in etas:
        if not 0 < eta < 1:
            raise ConfigError("/etas", "entries must lie in (0, 1)")
    m_values = _get(doc, "m_values", "")
    try:
        m_values = [int(m) for m in m_values]
    except (TypeError, ValueError):
        raise ConfigError("/m_values", "must be a list of integers")
    trials = _get(doc, "trials", "", cast=int, default=500)
    if trials < 100:
        raise ConfigError("/trials", "need at least 100 trials")
    rule = _lambda_rule_from(
        _get(doc, "lambda_rule", "", default={"kind": "balance_effdim"}),
        "/lambda_rule")
    s_exp = _get(doc, "s_exponent", "", cast=float, default=0.5)
    zeta_doc = _get(doc, "zeta", "", default=None)
    zeta = indexfn_from_config(zeta_doc) if zeta_doc is not None else None

    reports = []
    for m in m_values:
        lam = rule.resolve(problem, m)
        reports.extend(montecarlo_coverage_batch(
            problem, quantities, lam, m, etas, trials, seed,
            s=s_exp, zeta=zeta, threads=threads))
    write_bounds_csv(out / "bounds.csv", reports)
    write_json(out / "bounds.json", [r.to_dict() for r in reports])
    write_manifest(out / "manifest.json", doc, seed)
    n_pass = sum(r.passed for r in reports)
    worst = min(r.coverage - (1.0 - r.eta) for r in reports)
    print(f"bounds: {n_pass}/{len(reports)} coverage reports passed "
          f"(worst margin {worst:+.4f})")
    return EX_OK if n_pass == len(reports) else EX_FAIL


def _cmd_distance(doc, out: Path, seed, threads) -> int:
    seed = seed if seed is not None else _get(doc, "seed", "", cast=int,
                                              default=0)
    problem = _concrete_problem(_get(doc, "problem", ""), "/problem", seed)
    Rs = _float_list(doc, "R_values", "")
    if any(R <= 0 for R in Rs):
        raise ConfigError("/R_values", "entries must be positive")
    qv = _get(doc, "q", "", cast=float, default=None)
    if qv is not None and qv <= 1:
        raise ConfigError("/q", "needs q > 1")
    curve = distance_curve(problem, Rs, q=qv)
    write_distance_csv(out / "distance.csv", curve.Rs, curve.values)
    write_manifest(out / "manifest.json", doc, seed)
    print(f"distance: {len(Rs)} points, d({min(Rs):g}) = "
          f"{curve.values[int(np.argmin(Rs))]:.6g}, d({max(Rs):g}) = "
          f"{curve.values[int(np.argmax(Rs))]:.6g}")
    return EX_OK


def _cmd_filters_check(doc, out: Path, seed, threads) -> int:
    rows, ok = [], True
    for name in FILTER_NAMES:
        filt = make_filter(name)
        rep = check_regularization_constants(filt)
        gp_obs = check_qualification(filt, 1.0)
        gp_decl = filt.gamma_p_at(1.0)
        row_ok = rep.passed and gp_obs <= gp_decl + 1e-9
        ok &= row_ok
        rows.append({"filter": name, "D_obs": rep.D_obs, "B_obs": rep.B_obs,
                     "gamma_obs": rep.gamma_obs, "gamma_p_obs": gp_obs,
                     "gamma_p_declared": gp_decl, "pass": row_ok})
        print(f"filters-check: {name:10s} D={rep.D_obs:.6f} "
              f"B={rep.B_obs:.6f} gamma={rep.gamma_obs:.6f} "
              f"gamma_1={gp_obs:.6f} (declared {gp_decl:.6f}) "
              f"{'ok' if row_ok else 'FAIL'}")

    props = []
    for name, phi in (("tikhonov", power_fn(0.5)), ("cutoff", power_fn(1.0))):
        rep = check_prop_regularization(make_filter(name), phi)
        ok &= rep.passed
        props.append({"filter": name, "p": rep.p, "c_p": rep.c_p,
                      "max_ratio_1": rep.max_ratio_1,
                      "max_ratio_2": rep.max_ratio_2, "pass": rep.passed})
        print(f"filters-check: {name} residual bounds p={rep.p:g}: "
              f"{rep.max_ratio_1:.6f} <= {rep.c_p:.6f} and "
              f"{rep.max_ratio_2:.6f} <= {2 ** rep.p * rep.c_p:.6f} "
              f"{'ok' if rep.passed else 'FAIL'}")

    tik2 = check_qualification(make_filter("tikhonov"), 2.0)
    saturated = tik2 > 10.0
    ok &= saturated
    print(f"filters-check: tikhonov order-2 envelope {tik2:.3g} > 10 "
          f"(saturation at order 1) {'ok' if saturated else 'FAIL'}")

    write_json(out / "filters_check.json",
               {"constants": rows, "residual_bounds": props,
                "tikhonov_order2_envelope": tik2, "pass": bool(ok)})
    return EX_OK if ok else EX_FAIL


def _cmd_decompose(doc, out: Path, seed, threads) -> int:
    kernel = _get(doc, "kernel", "", cast=str, default="k2",
                  choices=("k1", "k2"))
    grid_n = _get(doc, "grid_n", "", cast=int, default=512)
    if grid_n < 16:
        raise ConfigError("/grid_n", "must be >= 16")
    w, _ = mercer_decompose(kernel, grid_n)
    top = _get(doc, "top", "", cast=int, default=12)
    n_pos = int(np.count_nonzero(w > 0))
    payload = {"kernel": kernel, "grid_n": grid_n,
               "eigenvalues": [float(v) for v in w[:top]],
               "n_positive": n_pos}
    if kernel == "k2":
        payload["note"] = K2_NOTE
        ref = 1.0 / (np.arange(1, 6) * np.pi) ** 2
        payload["max_rel_err_top5_vs_exact"] = float(
            np.max(np.abs(w[:5] - ref) / ref))
    write_json(out / "decompose.json", payload)
    write_manifest(out / "manifest.json", doc, seed if seed is not None else 0)
    print(f"decompose: kernel {kernel} on {grid_n} nodes, {n_pos} positive "
          f"modes, top eigenvalue {w[0]:.8g}")
    if kernel == "k2":
        print(f"decompose: {K2_NOTE}")
    return EX_OK


_DISPATCH = {"rate": _cmd_rate, "effdim": _cmd_effdim, "bounds": _cmd_bounds,
             "distance": _cmd_distance, "filters-check": _cmd_filters_check,
             "decompose": _cmd_decompose}

_NEEDS_CONFIG = {"rate", "effdim", "bounds", "distance", "decompose"}


def _apply_override(doc: dict, spec: str) -> None:
    if "=" not in spec:
        raise ConfigError("/", f"--set needs key=value, got {spec!r}")
    key, raw = spec.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    node = doc
    parts = key.split(".")
    for part in parts[:-1]:
        node = node.setdefault(part, {})
        if not isinstance(node, dict):
            raise ConfigError("/" + "/".join(parts),
                              f"cannot override inside non-object {part!r}")
    node[parts[-1]] = value


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] in ("-h", "--help"):
        print(_USAGE, end="")
        return EX_OK if argv else EX_USAGE
    command = argv[0]
    if command not in COMMANDS:
        sys.stderr.write(f"unknown command {command!r}\n{_USAGE}")
        return EX_USAGE

    parser = _Parser(prog=f"scalereg {command}", add_help=True)
    parser.add_argument("--config", default=None)
    parser.add_argument("--out", default=".")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--threads", type=int, default=None)
    parser.add_argument("--set", action="append", default=[],
                        dest="overrides", metavar="KEY=VALUE")
    try:
        args = parser.parse_args(argv[1:])
    except _UsageError as exc:
        sys.stderr.write(f"{exc}\n{_USAGE}")
        return EX_USAGE

    try:
        if command in _NEEDS_CONFIG:
            if args.config is None:
                raise _UsageError(f"{command} requires --config")
            path = Path(args.config)
            if not path.is_file():
                raise ConfigError("/", f"config file not found: {path}")
            try:
                doc = json.loads(path.read_text(encoding="utf-8"))
            except json.JSONDecodeError as exc:
                raise ConfigError("/", f"invalid JSON: {exc}")
            if not isinstance(doc, dict):
                raise ConfigError("/", "top-level config must be an object")
        else:
            doc = {}
        for spec in args.overrides:
            _apply_override(doc, spec)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        return _DISPATCH[command](doc, out, args.seed, args.threads)
    except _UsageError as exc:
        sys.stderr.write(f"{exc}\n{_USAGE}")
        return EX_USAGE
    except ConfigError as exc:
        sys.stderr.write(f"config error at {exc.pointer}: {exc}\n")
        return EX_CONFIG
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return EX_ERROR


if __name__ == "__main__":
    raise SystemExit(main())

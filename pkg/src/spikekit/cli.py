"""Scenario-driven command line front end.

Subcommands:

* ``constants``        -- dimension constants, closed form next to quadrature
* ``critical-points``  -- multistart enumeration of spike critical points
* ``predict``          -- mass-to-parameter predictions with verification data
* ``verify``           -- the full acceptance suite (exit 0 iff all pass)

Scenarios come from a TOML key/value file (``--config``) with flags taking
precedence; the environment variable SPIKEKIT_SEED overrides any seed.
Reports land in ``<out>/records.json`` and ``<out>/summary.csv`` with all
floats printed to 17 significant digits, so identical seeds reproduce
byte-identical files.

Exit codes: 0 success, 1 failed verification, 2 configuration errors,
3 kernel-table file errors.
"""

import argparse
import os
import sys

try:
    import tomllib
except ModuleNotFoundError:  # 3.10
    import tomli as tomllib

import numpy as np

from . import report
from .bubble import context_quadrature_values, make_context
from .greens import TabulatedKernelError, ball_kernel, tabulated_kernel
from .normalized import (assemble_approximation, energy_of_approximation,
                         mass_of_approximation, predict_parameters)
from .pohozaev import local_pohozaev_residual
from .quadrature import QuadratureSpec
from .reduced import enumerate_critical_points
from .verify import GROUPS, VerifyConfig, run_checks

DEFAULTS = {
    "n": 6,
    "domain": "ball",
    "k": 1,
    "rho": [1e-4],
    "starts": 64,
    "seed": 0,
    "samples": 1_000_000,
    "out": "out",
    "only": None,
    "tolerance_override": None,
}


class ConfigError(ValueError):
    pass


def load_scenario(args) -> dict:
    cfg = dict(DEFAULTS)
    path = getattr(args, "config", None)
    if path:
        try:
            with open(path, "rb") as fh:
                data = tomllib.load(fh)
        except (OSError, tomllib.TOMLDecodeError) as exc:
            raise ConfigError(f"cannot read scenario file {path}: {exc}") from exc
        unknown = set(data) - set(DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown scenario keys: {sorted(unknown)}")
        cfg.update(data)
    for key in DEFAULTS:
        val = getattr(args, key.replace("-", "_"), None)
        if val is not None:
            cfg[key] = val
    if "SPIKEKIT_SEED" in os.environ:
        try:
            cfg["seed"] = int(os.environ["SPIKEKIT_SEED"])
        except ValueError as exc:
            raise ConfigError(f"bad SPIKEKIT_SEED: {exc}") from exc
    _validate(cfg)
    return cfg


def _validate(cfg):
    if int(cfg["n"]) < 5:
        raise ConfigError(
            f"dimension {cfg['n']} unsupported: the squared-bubble mass "
            "integral diverges for n <= 4")
    if int(cfg["k"]) < 1:
        raise ConfigError("k must be at least 1")
    rhos = cfg["rho"] if isinstance(cfg["rho"], (list, tuple)) else [cfg["rho"]]
    if any(float(r) <= 0 for r in rhos):
        raise ConfigError("every rho must be positive")
    cfg["rho"] = [float(r) for r in rhos]
    cfg["n"] = int(cfg["n"])
    cfg["k"] = int(cfg["k"])
    cfg["starts"] = int(cfg["starts"])
    cfg["seed"] = int(cfg["seed"])
    cfg["samples"] = int(cfg["samples"])


def build_kernel(cfg, ctx):
    spec = str(cfg["domain"])
    if spec == "ball" or spec.startswith("ball:"):
        radius = float(spec.split(":", 1)[1]) if ":" in spec else 1.0
        if radius <= 0:
            raise ConfigError("ball radius must be positive")
        return ball_kernel(ctx, np.zeros(ctx.n), radius)
    try:
        kernel = tabulated_kernel(spec)
    except (OSError, TabulatedKernelError) as exc:
        raise TabulatedKernelError(f"kernel table {spec}: {exc}") from exc
    if kernel.n != ctx.n:
        raise TabulatedKernelError(
            f"kernel table dimension {kernel.n} does not match scenario n={ctx.n}")
    return kernel


def _write_reports(out_dir, payload, csv_header, csv_rows):
    os.makedirs(out_dir, exist_ok=True)
    report.write_json(os.path.join(out_dir, "records.json"), payload)
    report.write_csv(os.path.join(out_dir, "summary.csv"), csv_header, csv_rows)


# ----------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------

def cmd_constants(args) -> int:
    try:
        ctx = make_context(int(args.n))
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    quad = context_quadrature_values(ctx)
    payload = {
        "schema": report.SCHEMA,
        "n": ctx.n,
        "c_n": ctx.c_n,
        "omega_n": ctx.omega_n,
        "a_const": ctx.a_const,
        "b_const": ctx.b_const,
        "sobolev_level": ctx.sobolev_level,
        "quadrature": quad,
    }
    sys.stdout.write(report.dumps(payload))
    return 0


def _record_payload(idx, rec):
    return {
        "index": idx,
        "points": rec.configuration.points,
        "heights": rec.configuration.heights,
        "psi": rec.psi_value,
        "grad_norm": rec.grad_norm,
        "iterations": rec.iterations,
        "hessian_spectrum": rec.hessian_spectrum,
        "interaction_eigenvalues": rec.interaction_eigenvalues,
        "nondegenerate": rec.nondegenerate,
        "m_positive": rec.m_positive,
        "flags": rec.flags,
    }


def cmd_critical_points(args) -> int:
    try:
        cfg = load_scenario(args)
        ctx = make_context(cfg["n"])
        kernel = build_kernel(cfg, ctx)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except TabulatedKernelError as exc:
        print(f"kernel error: {exc}", file=sys.stderr)
        return 3
    records = enumerate_critical_points(ctx, kernel, cfg["k"],
                                        starts=cfg["starts"], seed=cfg["seed"])
    payload = {
        "schema": report.SCHEMA,
        "command": "critical-points",
        "config": cfg,
        "records": [_record_payload(i, r) for i, r in enumerate(records)],
    }
    rows = []
    for i, rec in enumerate(records):
        spec = np.abs(rec.hessian_spectrum)
        rows.append([i, rec.configuration.k, rec.psi_value, rec.grad_norm,
                     rec.nondegenerate, rec.m_positive,
                     float(spec.min()), float(spec.max()),
                     " ".join(format(v, ".17g") for v in rec.configuration.points.reshape(-1)),
                     " ".join(format(v, ".17g") for v in rec.configuration.heights)])
    _write_reports(cfg["out"], payload,
                   ["index", "k", "psi", "grad_norm", "nondegenerate", "m_positive",
                    "min_abs_hessian_eig", "max_abs_hessian_eig", "points", "heights"],
                   rows)
    print(f"{len(records)} critical point(s) -> {cfg['out']}/records.json")
    return 0


def cmd_predict(args) -> int:
    try:
        cfg = load_scenario(args)
        ctx = make_context(cfg["n"])
        kernel = build_kernel(cfg, ctx)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except TabulatedKernelError as exc:
        print(f"kernel error: {exc}", file=sys.stderr)
        return 3
    records = enumerate_critical_points(ctx, kernel, cfg["k"],
                                        starts=cfg["starts"], seed=cfg["seed"])
    entries = []
    rows = []
    for idx, rec in enumerate(records):
        if not (rec.nondegenerate and rec.m_positive):
            continue
        for rho in cfg["rho"]:
            pred = predict_parameters(ctx, rec, rho, kernel=kernel)
            spec = QuadratureSpec(seed=cfg["seed"], samples=cfg["samples"])
            mass = mass_of_approximation(ctx, kernel, pred, spec)
            energy, fractions = energy_of_approximation(ctx, kernel, pred, spec)
            sphere_spec = QuadratureSpec(
                seed=cfg["seed"], samples=max(cfg["samples"] // 5, 10_000),
                method="spike-importance",
                importance_centers=pred.spike_points,
                importance_scales=pred.spike_heights)
            profile = assemble_approximation(ctx, kernel, pred)
            residuals = []
            for j, point in enumerate(pred.spike_points):
                theta = 0.15 * kernel.boundary_distance(point)
                res = local_pohozaev_residual(profile, pred.lambda_rho,
                                              point, theta, "dilation", sphere_spec)
                residuals.append({"spike": j, "theta": theta,
                                  "residual": res.value, "stderr": res.stderr})
            entries.append({
                "record": idx,
                "rho": rho,
                "lambda_rho": pred.lambda_rho,
                "spike_points": pred.spike_points,
                "spike_heights": pred.spike_heights,
                "limit_heights": pred.limit_heights,
                "energy_prediction": pred.energy_prediction,
                "matching_residuals": list(pred.matching_residuals),
                "conventions": pred.conventions,
                "warnings": pred.warnings,
                "mass_check": {"value": mass.value, "stderr": mass.stderr},
                "energy_check": {"value": energy.value, "stderr": energy.stderr,
                                 "localization": fractions},
                "pohozaev_residuals": residuals,
            })
            rows.append([idx, rho, pred.lambda_rho,
                         pred.conventions["rate_law"]["scaled_lambda"],
                         mass.value, mass.stderr, energy.value, energy.stderr])
    payload = {
        "schema": report.SCHEMA,
        "command": "predict",
        "config": cfg,
        "predictions": entries,
    }
    _write_reports(cfg["out"], payload,
                   ["record", "rho", "lambda_rho", "scaled_lambda",
                    "mass_value", "mass_stderr", "energy_value", "energy_stderr"],
                   rows)
    print(f"{len(entries)} prediction(s) -> {cfg['out']}/records.json")
    return 0


def cmd_verify(args) -> int:
    try:
        cfg = load_scenario(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    only = cfg["only"]
    if only is not None:
        only = tuple(only) if isinstance(only, (list, tuple)) else (only,)
        bad = set(only) - set(GROUPS)
        if bad:
            print(f"config error: unknown check groups {sorted(bad)}; "
                  f"available: {', '.join(GROUPS)}", file=sys.stderr)
            return 2
    vcfg = VerifyConfig(
        n=cfg["n"], seed=cfg["seed"],
        starts=cfg["starts"],
        ball_samples=cfg["samples"],
        sphere_samples=max(cfg["samples"] // 5, 10_000),
        groups=only,
        tolerance_override=cfg["tolerance_override"],
    )
    results = run_checks(vcfg, progress=lambda r: print(r.line()))
    payload = {
        "schema": report.SCHEMA,
        "command": "verify",
        "config": cfg,
        "checks": [{"id": r.check_id, "group": r.group, "passed": r.passed,
                    "detail": r.detail} for r in results],
    }
    rows = [[r.check_id, r.group, r.passed] for r in results]
    _write_reports(cfg["out"], payload, ["check_id", "group", "passed"], rows)
    failed = [r.check_id for r in results if not r.passed]
    if failed:
        print(f"FAILED: {', '.join(failed)}")
        return 1
    print(f"all {len(results)} checks passed -> {cfg['out']}/records.json")
    return 0


# ----------------------------------------------------------------------

def _add_scenario_flags(p, with_rho=False):
    p.add_argument("--config", help="TOML scenario file")
    p.add_argument("--n", type=int, help="space dimension (>= 5)")
    p.add_argument("--domain", help='"ball", "ball:<radius>", or a kernel-table path')
    p.add_argument("--k", type=int, help="number of spikes")
    p.add_argument("--starts", type=int, help="multistart count")
    p.add_argument("--seed", type=int, help="master seed (SPIKEKIT_SEED overrides)")
    p.add_argument("--samples", type=int, help="Monte Carlo samples per volume integral")
    p.add_argument("--out", help="output directory")
    if with_rho:
        p.add_argument("--rho", type=float, action="append",
                       help="prescribed mass (repeatable)")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="spikekit",
        description="multi-spike concentration analysis: critical points, "
                    "normalized-solution parameters, identity verification")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("constants", help="dimension constants as JSON")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(fn=cmd_constants)

    p = sub.add_parser("critical-points", help="enumerate spike critical points")
    _add_scenario_flags(p)
    p.set_defaults(fn=cmd_critical_points)

    p = sub.add_parser("predict", help="mass-to-parameter predictions")
    _add_scenario_flags(p, with_rho=True)
    p.set_defaults(fn=cmd_predict)

    p = sub.add_parser("verify", help="run the acceptance suite")
    _add_scenario_flags(p)
    p.add_argument("--only", action="append", help=f"restrict to check groups "
                   f"({', '.join(GROUPS)})")
    p.add_argument("--tolerance-override", dest="tolerance_override", type=float,
                   help="replace every tolerance with this value (diagnostics)")
    p.set_defaults(fn=cmd_verify)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())

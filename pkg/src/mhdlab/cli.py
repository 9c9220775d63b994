"""Command-line entry points.

Exit codes: 0 success, 2 configuration error, 3 numerical abort.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import acoustic, compressible, sweep as sweep_mod
from .config import RunConfig
from .errors import (
    CFLViolationError,
    ConfigError,
    InsufficientDataError,
    RegularityError,
    UsageError,
    VacuumError,
)
from .initial_data import make_initial_data

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _add_common(parser: argparse.ArgumentParser, with_eps: bool) -> None:
    parser.add_argument("--config", required=True, help="JSON run configuration")
    if with_eps:
        parser.add_argument("--eps", type=float, default=None, help="single Mach parameter")
    parser.add_argument("--threads", type=int, default=None, help="parallel case workers")
    parser.add_argument("--out-dir", default=None, help="output directory override")
    parser.add_argument("--format", default="csv", help="diagnostics format (csv only)")
    parser.add_argument(
        "--reference-refine",
        type=int,
        default=1,
        help="resolution multiplier for the incompressible reference",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mhdlab",
        description="Low-Mach compressible MHD sweeps with modulated-energy diagnostics",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a single eps case")
    _add_common(run_p, with_eps=True)

    sweep_p = sub.add_parser("sweep", help="run the full eps sweep and fit the rate")
    _add_common(sweep_p, with_eps=False)

    rate_p = sub.add_parser("rate", help="rebuild the rate table from case CSVs")
    rate_p.add_argument("--in", dest="in_dir", required=True)
    rate_p.add_argument("--out", dest="out_file", required=True)

    probe_p = sub.add_parser(
        "probe-dispersion", help="corrector L^r norm history over the run window"
    )
    probe_p.add_argument("--config", required=True)
    probe_p.add_argument("--eps", type=float, default=None)
    probe_p.add_argument("--out-dir", default=None)
    probe_p.add_argument("--r", type=float, default=4.0, help="spatial norm exponent (> 2)")
    probe_p.add_argument("--samples", type=int, default=17)

    sub.add_parser("selftest", help="run the quick invariant battery")
    return parser


def _load_config(args) -> RunConfig:
    cfg = RunConfig.from_json(args.config)
    threads = args.threads
    if threads is None:
        env = os.environ.get("MHDLAB_THREADS")
        if env is not None:
            try:
                threads = int(env)
            except ValueError as exc:
                raise ConfigError(f"MHDLAB_THREADS must be an integer, got {env!r}") from exc
    updates = {}
    if threads is not None:
        updates["threads"] = threads
    if args.out_dir is not None:
        updates["out_dir"] = args.out_dir
    if getattr(args, "format", "csv") != "csv":
        raise ConfigError(f"unsupported format {args.format!r} (only csv)")
    return dataclasses.replace(cfg, **updates) if updates else cfg


def cmd_run(args) -> int:
    cfg = _load_config(args)
    eps = args.eps if args.eps is not None else cfg.eps_list[0]
    if not 0 < eps < 1:
        raise ConfigError(f"eps must lie in (0,1), got {eps}")
    idx = cfg.eps_list.index(eps) if eps in cfg.eps_list else 0
    case_id = sweep_mod.case_label(idx, eps)
    result = sweep_mod.run_case(
        cfg, eps, reference_refine=args.reference_refine, case_id=case_id
    )
    path = sweep_mod.write_case(cfg.out_dir, result)
    print(f"{result.case_id}: {result.status}  ({len(result.records)} records) -> {path}")
    if result.status != "completed":
        print(f"abort reason: {result.abort_reason}", file=sys.stderr)
        return EXIT_NUMERICAL
    print(f"sup_t mod_total = {result.sup_mod_total:.6e}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _load_config(args)
    result = sweep_mod.run_sweep(cfg, reference_refine=args.reference_refine)
    for s in result.summaries:
        line = f"{s['case_id']}: {s['status']}"
        if s["status"] == "completed":
            line += f"  sup_t mod_total = {s['sup_mod_total']:.6e}"
        else:
            line += f"  ({s['abort_reason']})"
        print(line)
    if result.report is not None:
        print(
            f"fitted slope {result.report.fitted_slope:.4f} "
            f"(sigma_theory {result.report.sigma_theory:.4f}) -> {result.rate_csv}"
        )
        return EXIT_OK
    print(f"rate fit unavailable: {result.fit_error}", file=sys.stderr)
    return EXIT_NUMERICAL


def cmd_rate(args) -> int:
    report = sweep_mod.rate_report_from_dir(args.in_dir)
    out = Path(args.out_file)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(sweep_mod.rate_table_text(report))
    print(
        f"{len(report.eps_values)} cases, fitted slope {report.fitted_slope:.4f}, "
        f"sigma_theory {report.sigma_theory:.4f} -> {out}"
    )
    return EXIT_OK


def cmd_probe(args) -> int:
    cfg = RunConfig.from_json(args.config)
    if args.out_dir is not None:
        cfg = dataclasses.replace(cfg, out_dir=args.out_dir)
    eps = args.eps if args.eps is not None else cfg.eps_list[0]
    p = cfg.phys_params(eps)
    comp, _ = make_initial_data(cfg, eps)
    u0 = compressible.velocity(comp)
    corr = acoustic.init_corrector(comp.rho, u0, p, cfg.mollifier())
    times = np.linspace(0.0, cfg.T_final, max(2, args.samples))
    states = [acoustic.propagate(corr, float(t), p) for t in times]
    report = acoustic.dispersion_probe(states, args.r, p)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    payload = {
        "eps": eps,
        "r": report.r,
        "regime": report.regime,
        "decay_factor": report.decay_factor,
        "times": report.times,
        "phi_norms": report.phi_norms,
        "g_norms": report.g_norms,
    }
    path = out / "probe_dispersion.json"
    path.write_text(json.dumps(payload, indent=2) + "\n")
    decay = "n/a" if report.decay_factor is None else f"{report.decay_factor:.4f}"
    print(f"regime: {report.regime}; L^{args.r:g} decay factor {decay} -> {path}")
    return EXIT_OK


def cmd_selftest(_args) -> int:
    from .selftest import run_selftest

    return EXIT_OK if run_selftest() else EXIT_NUMERICAL


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "run": cmd_run,
        "sweep": cmd_sweep,
        "rate": cmd_rate,
        "probe-dispersion": cmd_probe,
        "selftest": cmd_selftest,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (VacuumError, CFLViolationError, RegularityError, InsufficientDataError, UsageError) as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())

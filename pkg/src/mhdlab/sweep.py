"""Coupled three-solver runs, eps sweeps, CSV diagnostics, rate tables.

Each case marches the compressible solver, the incompressible reference and
the acoustic corrector to a shared uniform grid of sample times. The sample
interval is computed once per sweep (from the largest eps) and each solver's
dt is rounded down to divide it, so sup-over-time diagnostics are taken at
identical times across the sweep. Cases are independent and may run in
parallel processes; all output is byte-deterministic for a fixed
(config, seed, threads).
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import acoustic, compressible, ideal as ideal_mod
from .compressible import CompressibleState, PhysParams
from .config import RunConfig
from .errors import (
    CFLViolationError,
    InsufficientDataError,
    RegularityError,
    UsageError,
    VacuumError,
)
from .fields import Grid, divergence, l2_norm, max_norm, restrict_to
from .ideal import IdealState
from .initial_data import make_initial_data
from .modulated import RateReport, fit_rate, modulated_components, theorem_norms
from .snapshots import write_snapshot

CSV_COLUMNS = [
    "case_id",
    "eps",
    "t",
    "E_total",
    "D_cum",
    "slack",
    "w2",
    "Z2",
    "pi2",
    "mod_total",
    "uncorrected_w2",
    "uncorrected_pi2",
    "lq2_rho",
    "l2_Zh",
    "l2_Pu",
    "divH_rel",
    "grad_u_inf",
]

ABORT_PREFIX = "# aborted"


@dataclass
class SweepRecord:
    case_id: str
    eps: float
    t: float
    E_total: float
    D_cum: float
    slack: float
    w2: float
    Z2: float
    pi2: float
    mod_total: float
    uncorrected_w2: float
    uncorrected_pi2: float
    lq2_rho: float
    l2_Zh: float
    l2_Pu: float
    divH_rel: float
    grad_u_inf: float

    def to_row(self) -> str:
        vals = [self.case_id] + [
            _fmt(getattr(self, c)) for c in CSV_COLUMNS[1:]
        ]
        return ",".join(vals)


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


@dataclass
class CaseResult:
    case_id: str
    eps: float
    status: str  # "completed" | "aborted"
    abort_reason: str
    records: list[SweepRecord]
    meta: dict
    final_comp: CompressibleState | None = None
    final_ideal: IdealState | None = None

    @property
    def sup_mod_total(self) -> float:
        return max((r.mod_total for r in self.records), default=float("nan"))

    @property
    def initial_misfit(self) -> float:
        return self.records[0].mod_total if self.records else float("nan")


def case_label(index: int, eps: float) -> str:
    return f"case{index:02d}_eps{eps:g}"


def diag_interval_for(cfg: RunConfig, eps: float) -> float:
    """Common sample interval: diag_every CFL steps of this case, snapped to
    divide T_final evenly."""
    comp, _ = make_initial_data(cfg, eps)
    p = cfg.phys_params(eps)
    dt_raw = cfg.cfl * compressible.cfl_max_dt(comp, p, cfg.scheme)
    n_int = max(1, round(cfg.T_final / (cfg.diag_every * dt_raw)))
    return cfg.T_final / n_int


def run_case(
    cfg: RunConfig,
    eps: float,
    diag_interval: float | None = None,
    reference_refine: int = 1,
    case_id: str | None = None,
) -> CaseResult:
    """March one (eps) case to T_final, sampling diagnostics on a uniform grid.

    Vacuum, CFL, and regularity failures abort the case: the records collected
    so far are kept and the result is flagged, never silently truncated.
    """
    if case_id is None:
        case_id = case_label(0, eps)
    grid = cfg.grid()
    p = cfg.phys_params(eps)
    if reference_refine < 1:
        raise UsageError("reference_refine must be >= 1")
    ref_grid = (
        grid
        if reference_refine == 1
        else Grid(cfg.dim, cfg.n * reference_refine, cfg.box_len)
    )

    records: list[SweepRecord] = []
    meta: dict = {
        "case_id": case_id,
        "eps": eps,
        "alpha": cfg.alpha,
        "beta": cfg.beta,
        "scheme": cfg.scheme,
        "seed": cfg.seed,
        "threads": cfg.threads,
        "grid": {"dim": cfg.dim, "n": cfg.n, "box_len": cfg.box_len},
        "reference_refine": reference_refine,
        "mollifier": {"delta": cfg.delta, "kind": "bump"},
    }
    if cfg.init_kind == "general":
        meta["wrap_status"] = (
            "dispersive" if cfg.T_final < cfg.box_len * eps / 2.0 else "wrapped"
        )
    else:
        meta["wrap_status"] = "n/a"

    comp: CompressibleState | None = None
    ideal: IdealState | None = None
    vel_ratio_max = 0.0
    try:
        comp, ideal = make_initial_data(
            cfg, eps, ref_grid if reference_refine > 1 else None
        )
        u0 = compressible.velocity(comp)
        corr = acoustic.init_corrector(comp.rho, u0, p, cfg.mollifier())
        meta["momentum_projection_gap"] = acoustic.momentum_projection_gap(
            comp.rho, u0
        )

        T = cfg.T_final
        dt_raw = cfg.cfl * compressible.cfl_max_dt(comp, p, cfg.scheme)
        if diag_interval is None:
            n_int = max(1, round(T / (cfg.diag_every * dt_raw)))
            delta = T / n_int
        else:
            delta = diag_interval
            n_int = max(1, round(T / delta))
            if abs(n_int * delta - T) > 1e-9 * max(T, 1.0):
                raise UsageError("diag_interval must divide T_final")
        n_sub = max(1, math.ceil(delta / dt_raw))
        dt = delta / n_sub
        dt_i_raw = cfg.cfl * ideal_mod.cfl_max_dt(ideal)
        n_sub_i = max(1, math.ceil(delta / min(dt_i_raw, 4.0 * delta)))
        dt_i = delta / n_sub_i
        meta.update(
            {
                "dt": dt,
                "substeps_per_sample": n_sub,
                "dt_ideal": dt_i,
                "ideal_substeps_per_sample": n_sub_i,
                "sample_interval": delta,
                "samples": n_int + 1,
            }
        )

        grad0 = ideal_mod.grad_max(ideal)
        subdomain = cfg.local_subdomain()
        prev_d = None
        d_cum = 0.0
        e0 = None

        def sample(t_j: float):
            nonlocal prev_d, d_cum, e0, vel_ratio_max
            E = compressible.energy_total(comp, p)
            D = compressible.energy_dissipation(comp, p)
            if e0 is None:
                e0 = E
            if prev_d is not None:
                d_cum += 0.5 * (D + prev_d) * delta
            prev_d = D
            slack = e0 - E - d_cum

            ideal_c = (
                ideal
                if reference_refine == 1
                else IdealState(
                    t=ideal.t,
                    u=restrict_to(ideal.u, grid),
                    H=restrict_to(ideal.H, grid),
                )
            )
            mc = modulated_components(comp, ideal_c, corr, p)
            tn = theorem_norms(comp, ideal_c, p, subdomain)
            h_norm = l2_norm(comp.H)
            div_rel = max_norm(divergence(comp.H)) / h_norm if h_norm > 0 else 0.0
            gu = ideal_mod.grad_max(ideal)

            u = compressible.velocity(comp)
            u_sq = l2_norm(u) ** 2
            mask = grid.dealias_mask
            grad_sq = sum(
                grid.spectral_norm_sq(1j * kj * (mask * grid.fft(c)))
                for c in u.arrays
                for kj in grid.k_deriv
            )
            vel_ratio_max = max(
                vel_ratio_max, u_sq / (1.0 + eps ** (4.0 / grid.dim) * grad_sq)
            )

            records.append(
                SweepRecord(
                    case_id=case_id,
                    eps=eps,
                    t=t_j,
                    E_total=E,
                    D_cum=d_cum,
                    slack=slack,
                    w2=mc.w2,
                    Z2=mc.Z2,
                    pi2=mc.pi2,
                    mod_total=mc.total,
                    uncorrected_w2=mc.uncorrected_w2,
                    uncorrected_pi2=mc.uncorrected_pi2,
                    lq2_rho=tn.lq2_rho,
                    l2_Zh=tn.l2_Zh,
                    l2_Pu=tn.l2_Pu,
                    divH_rel=div_rel,
                    grad_u_inf=gu,
                )
            )
            ideal_mod.check_regularity(grad0, gu)

        sample(0.0)
        for j in range(1, n_int + 1):
            t_j = j * delta
            for _ in range(n_sub):
                comp = compressible.step(comp, p, dt, cfg.scheme)
            comp.t = t_j  # re-anchor; repeated fp addition drifts ~n*ulp
            for _ in range(n_sub_i):
                ideal = ideal_mod.step_ideal(ideal, dt_i)
            ideal.t = t_j
            corr = acoustic.propagate(corr, t_j, p)
            sample(t_j)
        status, reason = "completed", ""
    except (VacuumError, CFLViolationError, RegularityError) as exc:
        status, reason = "aborted", f"{type(exc).__name__}: {exc}"

    meta["status"] = status
    meta["abort_reason"] = reason
    meta["velocity_bound_ratio_max"] = vel_ratio_max
    return CaseResult(
        case_id=case_id,
        eps=eps,
        status=status,
        abort_reason=reason,
        records=records,
        meta=meta,
        final_comp=comp,
        final_ideal=ideal,
    )


# -- file I/O --------------------------------------------------------------------


def case_csv_text(result: CaseResult) -> str:
    lines = [",".join(CSV_COLUMNS)]
    lines += [r.to_row() for r in result.records]
    if result.status == "aborted":
        lines.append(f'{ABORT_PREFIX} reason="{result.abort_reason}"')
    return "\n".join(lines) + "\n"


def write_case(out_dir, result: CaseResult) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{result.case_id}.csv"
    csv_path.write_text(case_csv_text(result))
    meta_path = out / f"{result.case_id}.meta.json"
    meta_path.write_text(json.dumps(result.meta, indent=2, sort_keys=True) + "\n")
    if result.final_comp is not None:
        st = result.final_comp
        write_snapshot(
            out / f"{result.case_id}.mhdf",
            st.grid,
            [st.rho.values] + st.mom.arrays + st.H.arrays,
        )
    if result.final_ideal is not None:
        st = result.final_ideal
        write_snapshot(
            out / f"{result.case_id}.ideal.mhdf",
            st.grid,
            st.u.arrays + st.H.arrays,
        )
    return csv_path


def read_case_csv(path) -> tuple[list[SweepRecord], str | None]:
    """Parse a case CSV; returns (records, abort reason or None)."""
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != ",".join(CSV_COLUMNS):
        raise UsageError(f"{path}: unexpected CSV header")
    records = []
    abort_reason = None
    for ln in lines[1:]:
        if not ln.strip():
            continue
        if ln.startswith("#"):
            if ln.startswith(ABORT_PREFIX):
                abort_reason = ln[len(ABORT_PREFIX):].strip()
            continue
        parts = ln.split(",")
        if len(parts) != len(CSV_COLUMNS):
            raise UsageError(f"{path}: row has {len(parts)} fields")
        records.append(
            SweepRecord(parts[0], *[float(v) for v in parts[1:]])
        )
    return records, abort_reason


# -- sweeps ------------------------------------------------------------------------


@dataclass
class SweepResult:
    out_dir: Path
    summaries: list[dict]
    report: RateReport | None
    fit_error: str | None
    rate_csv: Path | None


def _run_and_write(cfg, eps, case_id, out_dir, delta, refine) -> dict:
    result = run_case(
        cfg, eps, diag_interval=delta, reference_refine=refine, case_id=case_id
    )
    write_case(out_dir, result)
    return {
        "case_id": case_id,
        "eps": eps,
        "status": result.status,
        "abort_reason": result.abort_reason,
        "sup_mod_total": result.sup_mod_total,
        "initial_misfit": result.initial_misfit,
    }


def _summary_from_files(out_dir: Path, case_id: str, eps: float) -> dict | None:
    meta_path = out_dir / f"{case_id}.meta.json"
    csv_path = out_dir / f"{case_id}.csv"
    if not (meta_path.exists() and csv_path.exists()):
        return None
    meta = json.loads(meta_path.read_text())
    if meta.get("status") != "completed":
        return None
    records, _ = read_case_csv(csv_path)
    if not records:
        return None
    return {
        "case_id": case_id,
        "eps": eps,
        "status": "completed",
        "abort_reason": "",
        "sup_mod_total": max(r.mod_total for r in records),
        "initial_misfit": records[0].mod_total,
        "resumed": True,
    }


def run_sweep(
    cfg: RunConfig,
    out_dir=None,
    threads: int | None = None,
    reference_refine: int = 1,
) -> SweepResult:
    """Run every eps case (skipping completed ones), then fit the rate."""
    out = Path(out_dir if out_dir is not None else cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    workers = threads if threads is not None else cfg.threads
    delta = diag_interval_for(cfg, cfg.eps_list[0])

    cases = [(case_label(i, e), e) for i, e in enumerate(cfg.eps_list)]
    summaries: dict[str, dict] = {}
    pending = []
    for case_id, eps in cases:
        existing = _summary_from_files(out, case_id, eps)
        if existing is not None:
            summaries[case_id] = existing
        else:
            pending.append((case_id, eps))

    if workers > 1 and len(pending) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_run_and_write, cfg, eps, cid, out, delta, reference_refine)
                for cid, eps in pending
            ]
            for fut in futures:
                s = fut.result()
                summaries[s["case_id"]] = s
    else:
        for cid, eps in pending:
            s = _run_and_write(cfg, eps, cid, out, delta, reference_refine)
            summaries[s["case_id"]] = s

    ordered = [summaries[cid] for cid, _ in cases]  # descending eps by construction
    completed = [s for s in ordered if s["status"] == "completed"]

    report = None
    fit_error = None
    rate_csv = None
    try:
        report = fit_rate(
            [s["eps"] for s in completed],
            [s["sup_mod_total"] for s in completed],
            cfg.alpha,
            cfg.beta,
            initial_misfit=[s["initial_misfit"] for s in completed],
        )
        rate_csv = out / "rate.csv"
        rate_csv.write_text(rate_table_text(report))
    except InsufficientDataError as exc:
        fit_error = str(exc)

    (out / "sweep_report.json").write_text(
        json.dumps(
            {
                "cases": ordered,
                "fit_error": fit_error,
                "fitted_slope": report.fitted_slope if report else None,
                "sigma_theory": report.sigma_theory if report else None,
                "sample_interval": delta,
            },
            indent=2,
            sort_keys=True,
        )
        + "\n"
    )
    return SweepResult(
        out_dir=out,
        summaries=ordered,
        report=report,
        fit_error=fit_error,
        rate_csv=rate_csv,
    )


RATE_COLUMNS = ["eps", "sup_mod_total", "pair_slope", "fitted_slope", "sigma_theory"]


def rate_table_text(report: RateReport) -> str:
    """Rate table CSV, rows sorted by descending eps; pair_slope on row j is
    the slope between rows j-1 and j (blank on the first row)."""
    order = np.argsort(report.eps_values)[::-1]
    eps = [report.eps_values[i] for i in order]
    sup = [report.sup_mod_total[i] for i in order]
    lines = [",".join(RATE_COLUMNS)]
    for j in range(len(eps)):
        if j == 0:
            pair = ""
        else:
            pair = _fmt(
                (math.log(sup[j - 1]) - math.log(sup[j]))
                / (math.log(eps[j - 1]) - math.log(eps[j]))
            )
        lines.append(
            ",".join(
                [
                    _fmt(eps[j]),
                    _fmt(sup[j]),
                    pair,
                    _fmt(report.fitted_slope),
                    _fmt(report.sigma_theory),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def rate_report_from_dir(
    in_dir, alpha: float | None = None, beta: float | None = None
) -> RateReport:
    """Rebuild a rate report from the case CSVs in a sweep output directory.

    alpha/beta default to the values recorded in the case metadata.
    """
    in_path = Path(in_dir)
    eps_vals: list[float] = []
    sups: list[float] = []
    misfits: list[float] = []
    for meta_path in sorted(in_path.glob("*.meta.json")):
        meta = json.loads(meta_path.read_text())
        if meta.get("status") != "completed":
            continue
        csv_path = in_path / f"{meta['case_id']}.csv"
        if not csv_path.exists():
            continue
        records, aborted = read_case_csv(csv_path)
        if aborted or not records:
            continue
        if alpha is None:
            alpha = float(meta.get("alpha", 0.5))
            beta = float(meta.get("beta", 0.5))
        eps_vals.append(float(meta["eps"]))
        sups.append(max(r.mod_total for r in records))
        misfits.append(records[0].mod_total)
    if alpha is None or beta is None:
        raise InsufficientDataError(f"no completed cases found in {in_path}")
    return fit_rate(eps_vals, sups, alpha, beta, initial_misfit=misfits)

"""Modulated-energy functional, convergence norms, and the rate fit.

The modulated energy at time t is

    1/2 ||sqrt(rho) u - u_ref - g||^2  +  1/2 ||H - H_ref||^2
        + 1/2 ||Pi - phi||^2

where (u_ref, H_ref) is the incompressible reference solution, (phi, g) the
acoustic corrector, and Pi the energy-weighted density deviation

    Pi = (1/eps) * sqrt( (2a/(gamma-1)) * (rho^gamma - 1 - gamma(rho-1)) ).

Pi's radicand collapses to O((rho-1)^2), so it is evaluated through a series
kernel near rho = 1 to keep full relative accuracy in the low-Mach regime.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .errors import InsufficientDataError, UsageError, VacuumError
from .fields import (
    Grid,
    ScalarField,
    VectorField,
    l2_norm,
    lq2_norm,
    solenoidal_part,
)

if TYPE_CHECKING:  # pragma: no cover
    from .acoustic import AcousticState
    from .compressible import CompressibleState, PhysParams
    from .ideal import IdealState

RHO_FLOOR = 1e-8

# below this |rho-1| the direct power-law evaluation loses relative accuracy
# to cancellation (~1e-16/(rho-1)^2), so the series kernel takes over
_SERIES_CUTOFF = 0.05


def pressure_excess(rho: np.ndarray, gamma: float) -> np.ndarray:
    """rho^gamma - 1 - gamma*(rho-1), accurate relative to its own size.

    Near rho = 1 uses gamma(gamma-1)/2 (rho-1)^2 * B(rho-1) with the bracket
    B summed by term recurrence until it converges. For integer gamma the
    recurrence terminates (B is a polynomial, B = 1 for gamma = 2), so the
    series branch is exact and used for every rho.
    """
    rho = np.asarray(rho, dtype=np.float64)
    if np.min(rho) < RHO_FLOOR:
        raise VacuumError(f"density below floor {RHO_FLOOR}")
    s = rho - 1.0
    out = np.empty_like(s)
    big = np.zeros(s.shape, dtype=bool) if float(gamma).is_integer() else np.abs(s) >= _SERIES_CUTOFF
    if big.any():
        out[big] = rho[big] ** gamma - 1.0 - gamma * s[big]
    small = ~big
    if small.any():
        ss = s[small]
        bracket = np.ones_like(ss)
        term = np.ones_like(ss)
        for m in range(1, 64):
            term = term * ((gamma - m - 1.0) / (m + 2.0)) * ss
            bracket += term
            if float(np.max(np.abs(term))) < 1e-17 * float(np.max(bracket)):
                break
        out[small] = 0.5 * gamma * (gamma - 1.0) * ss * ss * bracket
    return np.maximum(out, 0.0)


def density_deviation(rho: ScalarField, p: "PhysParams") -> ScalarField:
    """(rho - 1)/eps."""
    return ScalarField(rho.grid, (rho.values - 1.0) / p.eps)


def energy_density_deviation(
    rho: ScalarField, p: "PhysParams", signed: bool = True
) -> ScalarField:
    """The Pi field; ``signed`` (default) multiplies by sign(rho - 1).

    The nonnegative literal value double-counts the mismatch against the
    signed corrector wherever rho < 1; the signed variant equals the literal
    one in absolute value everywhere.
    """
    vals = _pi_values(rho.values, p, signed)
    return ScalarField(rho.grid, vals)


def _pi_values(rho: np.ndarray, p: "PhysParams", signed: bool) -> np.ndarray:
    g = pressure_excess(rho, p.gamma)
    pi = np.sqrt((2.0 * p.a / (p.gamma - 1.0)) * g) / p.eps
    if signed:
        pi = np.where(rho >= 1.0, pi, -pi)
    return pi


# -- the functional ------------------------------------------------------------


@dataclass
class ModulatedComponents:
    """Half-squared-L2 components of the modulated energy at one time."""

    t: float
    w2: float
    Z2: float
    pi2: float
    total: float
    uncorrected_w2: float
    uncorrected_pi2: float


def modulated_components(
    c: "CompressibleState",
    i: "IdealState",
    a: "AcousticState",
    p: "PhysParams",
) -> ModulatedComponents:
    """Evaluate all components; the three states must share grid and time."""
    grid = c.rho.grid
    if i.u.grid != grid or a.grid != grid:
        raise UsageError("modulated_components: states live on different grids")
    if abs(c.t - i.t) > 1e-12 or abs(c.t - a.t) > 1e-12:
        raise UsageError(
            f"modulated_components: times differ (c={c.t}, i={i.t}, a={a.t})"
        )
    rho = c.rho.values
    if np.min(rho) < RHO_FLOOR:
        raise VacuumError("modulated_components: density below floor")
    sqrho = np.sqrt(rho)
    vol = grid.cell_volume

    su = [m / sqrho for m in c.mom.arrays]  # sqrt(rho) * u = m / sqrt(rho)
    g = a.g_arrays()
    w2 = 0.0
    unc_w2 = 0.0
    for su_j, u_j, g_j in zip(su, i.u.arrays, g):
        w2 += float(np.sum((su_j - u_j - g_j) ** 2))
        unc_w2 += float(np.sum((su_j - u_j) ** 2))
    w2 *= 0.5 * vol
    unc_w2 *= 0.5 * vol

    Z2 = 0.0
    for He_j, H_j in zip(c.H.arrays, i.H.arrays):
        Z2 += float(np.sum((He_j - H_j) ** 2))
    Z2 *= 0.5 * vol

    pi = _pi_values(rho, p, signed=True)
    phi = a.phi_values()
    pi2 = 0.5 * float(np.sum((pi - phi) ** 2)) * vol
    unc_pi2 = 0.5 * float(np.sum(pi**2)) * vol

    return ModulatedComponents(
        t=c.t,
        w2=w2,
        Z2=Z2,
        pi2=pi2,
        total=w2 + Z2 + pi2,
        uncorrected_w2=unc_w2,
        uncorrected_pi2=unc_pi2,
    )


# -- theorem-style convergence norms -------------------------------------------


@dataclass(frozen=True)
class Subdomain:
    """Axis-aligned box used for the local L2 norm."""

    lo: tuple[float, ...]
    hi: tuple[float, ...]

    def mask(self, grid: Grid) -> np.ndarray:
        if len(self.lo) != grid.dim or len(self.hi) != grid.dim:
            raise UsageError("subdomain dimensionality does not match grid")
        m = np.ones(grid.shape, dtype=bool)
        for axis, x in enumerate(grid.coords()):
            m &= (x >= self.lo[axis]) & (x < self.hi[axis])
        return m


def centered_subdomain(grid: Grid) -> Subdomain:
    quarter = grid.box_len / 4.0
    return Subdomain(
        lo=(quarter,) * grid.dim,
        hi=(3.0 * quarter,) * grid.dim,
    )


@dataclass
class TheoremNorms:
    """Distances to the limit solution in the theorem's topologies."""

    t: float
    lq2_rho: float          # rho - 1 in the mixed L^gamma_2 norm
    l2_Zh: float            # magnetic field mismatch in L2
    l2_Pu: float            # solenoidal part of sqrt(rho) u minus u_ref in L2
    l2_loc: float           # sqrt(rho) u minus u_ref on the configured subdomain


def theorem_norms(
    c: "CompressibleState",
    i: "IdealState",
    p: "PhysParams",
    subdomain: Subdomain | None = None,
) -> TheoremNorms:
    grid = c.rho.grid
    if abs(c.t - i.t) > 1e-12:
        raise UsageError("theorem_norms: states at different times")
    rho = c.rho.values
    if np.min(rho) < RHO_FLOOR:
        raise VacuumError("theorem_norms: density below floor")
    sqrho = np.sqrt(rho)
    su = VectorField.from_arrays(grid, [m / sqrho for m in c.mom.arrays])

    rho_dev = ScalarField(grid, rho - 1.0)
    lq2 = lq2_norm(rho_dev, p.gamma)

    zh = l2_norm(c.H - i.H)

    pu = solenoidal_part(su)
    l2_pu = l2_norm(pu - i.u)

    if subdomain is None:
        subdomain = centered_subdomain(grid)
    mask = subdomain.mask(grid)
    acc = 0.0
    for su_j, u_j in zip(su.arrays, i.u.arrays):
        d = su_j - u_j
        acc += float(np.sum(d[mask] ** 2))
    l2_loc = float(np.sqrt(acc * grid.cell_volume))

    return TheoremNorms(t=c.t, lq2_rho=lq2, l2_Zh=zh, l2_Pu=l2_pu, l2_loc=l2_loc)


# -- rate fitting ---------------------------------------------------------------


@dataclass
class RateReport:
    """Log-log fit of the sup-in-time modulated energy against eps."""

    eps_values: list[float]
    sup_mod_total: list[float]
    fitted_slope: float
    sigma_theory: float
    initial_misfit: list[float]
    pair_slopes: list[float]


def fit_rate(
    eps_values: Sequence[float],
    sup_mod_total: Sequence[float],
    alpha: float,
    beta: float,
    initial_misfit: Sequence[float] | None = None,
) -> RateReport:
    """Ordinary least squares of log(sup total) on log(eps).

    Requires at least three distinct clean points with positive totals.
    """
    eps = [float(e) for e in eps_values]
    sup = [float(s) for s in sup_mod_total]
    if len(eps) != len(sup):
        raise UsageError("fit_rate: eps and sup lists differ in length")
    if len(set(eps)) < 3:
        raise InsufficientDataError(
            f"rate fit needs >= 3 distinct eps values, got {len(set(eps))}"
        )
    if any(s <= 0 for s in sup):
        raise InsufficientDataError("rate fit needs positive sup modulated energies")
    log_e = np.log(eps)
    log_s = np.log(sup)
    slope = float(np.polyfit(log_e, log_s, 1)[0])
    pair = [
        float((log_s[j] - log_s[j + 1]) / (log_e[j] - log_e[j + 1]))
        for j in range(len(eps) - 1)
    ]
    return RateReport(
        eps_values=eps,
        sup_mod_total=sup,
        fitted_slope=slope,
        sigma_theory=1.0 - (alpha + beta) / 2.0,
        initial_misfit=list(initial_misfit) if initial_misfit is not None else [],
        pair_slopes=pair,
    )

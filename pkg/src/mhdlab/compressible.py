"""Scaled compressible MHD in conservative variables (rho, m, H).

The system integrated here is the Mach-scaled isentropic MHD system with
pressure a*rho^gamma/eps^2, shear viscosity mu = eps^alpha and magnetic
diffusivity nu = eps^beta:

    d rho/dt = -div m
    d m/dt   = -div(m ⊗ u) - (a/eps^2) grad(rho^gamma)
               + (H·grad)H - 1/2 grad(|H|^2)
               + mu Lap(u) + (mu+lambda) grad(div u),      u = m/rho
    d H/dt   = -(div u) H - (u·grad)H + (H·grad)u + nu Lap(H)

Two steppers: classic RK4 (explicit, pays the eps*h acoustic CFL) and an
IMEX scheme that treats the stiff linearized acoustic pair
(-div m, -(a*gamma/eps^2) grad(rho-1)) with Crank-Nicolson per Fourier mode
and everything else with explicit Heun RK2. Both re-project H onto its
divergence-free part after the step.

All quadratic/cubic products are 2/3-dealiased; the velocity quotient is
dealiased before entering any derivative or product.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import CFLViolationError, ConfigError, UsageError, VacuumError
from .fields import (
    Grid,
    ScalarField,
    VectorField,
    curl,
    dealias,
    divergence,
    gradient,
    laplacian,
)
from .modulated import RHO_FLOOR, pressure_excess

SCHEMES = ("rk4_explicit", "imex_acoustic")


@dataclass(frozen=True)
class LambdaPolicy:
    """Bulk-viscosity rule: lambda = 0 or a fixed ratio of mu."""

    kind: str = "zero"
    c: float = 0.0

    def __post_init__(self):
        if self.kind not in ("zero", "ratio"):
            raise ConfigError(f"unknown lambda policy {self.kind!r}")

    def value(self, mu: float) -> float:
        return 0.0 if self.kind == "zero" else self.c * mu


@dataclass
class PhysParams:
    """Mach parameter, viscosity exponents, and the pressure law.

    mu/nu default to eps^alpha / eps^beta; explicit overrides (including 0
    for inviscid diagnostics runs) are accepted. a defaults to 1/gamma so
    that a*gamma = 1, matching the corrector's unit acoustic speed scaling.
    """

    eps: float
    alpha: float
    beta: float
    gamma: float
    a: float | None = None
    lambda_policy: LambdaPolicy = field(default_factory=LambdaPolicy)
    mu: float | None = None
    nu: float | None = None

    def __post_init__(self):
        if not 0.0 < self.eps < 1.0:
            raise ConfigError(f"eps must lie in (0,1), got {self.eps}")
        if self.alpha <= 0 or self.beta <= 0:
            raise ConfigError("alpha and beta must be positive")
        if not 0.0 < self.alpha + self.beta < 2.0:
            raise ConfigError(
                f"alpha+beta must lie in (0,2), got {self.alpha + self.beta}"
            )
        if self.gamma <= 1.0:
            raise ConfigError(f"gamma must exceed 1, got {self.gamma}")
        if self.a is None:
            self.a = 1.0 / self.gamma
        if self.a <= 0:
            raise ConfigError("pressure constant a must be positive")
        if self.mu is None:
            self.mu = self.eps**self.alpha
        if self.nu is None:
            self.nu = self.eps**self.beta
        if self.mu < 0 or self.nu < 0:
            raise ConfigError("viscosities must be nonnegative")

    @property
    def lam(self) -> float:
        return self.lambda_policy.value(self.mu)

    def validate_for_dim(self, dim: int) -> None:
        if 2.0 * self.mu + dim * self.lam < 0:
            raise ConfigError("lambda policy violates 2*mu + dim*lambda >= 0")

    @property
    def sigma_theory(self) -> float:
        return 1.0 - (self.alpha + self.beta) / 2.0


@dataclass(eq=False)
class CompressibleState:
    """(rho, m = rho*u, H) at one time level."""

    t: float
    rho: ScalarField
    mom: VectorField
    H: VectorField

    @property
    def grid(self) -> Grid:
        return self.rho.grid


def _require_positive(rho: np.ndarray) -> None:
    if float(np.min(rho)) <= RHO_FLOOR:
        raise VacuumError(
            f"density reached {float(np.min(rho)):.3e} <= floor {RHO_FLOOR}"
        )


def velocity(state: CompressibleState) -> VectorField:
    """Pointwise quotient u = m/rho (raw, not dealiased)."""
    _require_positive(state.rho.values)
    rho = state.rho.values
    return VectorField.from_arrays(state.grid, [m / rho for m in state.mom.arrays])


# -- right-hand side -----------------------------------------------------------


class _Spectra:
    """Per-evaluation cache of the spectral work arrays."""

    __slots__ = ("mom_hat", "dmom_hat", "dH_hat", "u_hat", "u")

    def __init__(self):
        self.mom_hat = None
        self.dmom_hat = None
        self.dH_hat = None
        self.u_hat = None
        self.u = None


def _nonstiff_spectral(
    grid: Grid, rho: np.ndarray, mom: list[np.ndarray], H: list[np.ndarray], p: PhysParams
) -> _Spectra:
    """Spectra of the non-stiff rhs: momentum (without the linear acoustic
    pressure) and the full induction equation. The non-stiff density rhs is 0.
    """
    _require_positive(rho)
    d = grid.dim
    k = grid.k_deriv
    mask = grid.dealias_mask
    fft, ifft = grid.fft, grid.ifft

    out = _Spectra()
    out.mom_hat = [fft(mj) for mj in mom]
    u_hat = [mask * fft(mj / rho) for mj in mom]
    u = [ifft(uh) for uh in u_hat]
    out.u_hat, out.u = u_hat, u
    H_hat = [mask * fft(Hj) for Hj in H]

    dmom_hat = [np.zeros(grid.spectral_shape, dtype=np.complex128) for _ in range(d)]

    # advection: -div(m ⊗ u), component i gets -i k_j (m_i u_j)^
    for i in range(d):
        for j in range(d):
            prod_hat = mask * fft(mom[i] * u[j])
            dmom_hat[i] -= 1j * k[j] * prod_hat

    # nonlinear pressure remainder: -(a/eps^2) grad G(rho),
    # G = rho^gamma - 1 - gamma(rho-1) (the linear part lives in the stiff term)
    g_hat = mask * fft(pressure_excess(rho, p.gamma))
    coef = p.a / p.eps**2
    for i in range(d):
        dmom_hat[i] -= coef * 1j * k[i] * g_hat

    # Lorentz force: (H·grad)H - 1/2 grad |H|^2
    dH_jac = [[ifft(1j * k[j] * H_hat[i]) for j in range(d)] for i in range(d)]
    for i in range(d):
        tension = sum(H[j] * dH_jac[i][j] for j in range(d))
        dmom_hat[i] += mask * fft(tension)
    h2_hat = mask * fft(sum(Hj * Hj for Hj in H))
    for i in range(d):
        dmom_hat[i] -= 0.5 * 1j * k[i] * h2_hat

    # viscosity on u = m/rho
    divu_hat = sum(1j * k[j] * u_hat[j] for j in range(d))
    mu, lam = p.mu, p.lam
    if mu != 0.0 or lam != 0.0:
        for i in range(d):
            dmom_hat[i] += -mu * grid.k2 * u_hat[i] + (mu + lam) * 1j * k[i] * divu_hat

    # induction: -(div u)H - (u·grad)H + (H·grad)u + nu Lap H
    divu = ifft(divu_hat)
    du_jac = [[ifft(1j * k[j] * u_hat[i]) for j in range(d)] for i in range(d)]
    dH_hat = []
    for i in range(d):
        advect = sum(u[j] * dH_jac[i][j] for j in range(d))
        stretch = sum(H[j] * du_jac[i][j] for j in range(d))
        rhs_i = mask * fft(-divu * H[i] - advect + stretch)
        if p.nu != 0.0:
            rhs_i = rhs_i - p.nu * grid.k2 * H_hat[i]
        dH_hat.append(rhs_i)

    out.dmom_hat = dmom_hat
    out.dH_hat = dH_hat
    return out


def _stiff_spectral(grid: Grid, rho_hat, mom_hat, p: PhysParams):
    """Linearized acoustic pair: (-div m, -(a*gamma/eps^2) grad rho)."""
    k = grid.k_deriv
    drho_hat = -sum(1j * kj * mh for kj, mh in zip(k, mom_hat))
    c2 = p.a * p.gamma / p.eps**2
    dmom_hat = [-c2 * 1j * kj * rho_hat for kj in k]
    return drho_hat, dmom_hat


def rhs(state: CompressibleState, p: PhysParams):
    """Full time derivative (d rho, d m, d H) as fields."""
    grid = state.grid
    rho = state.rho.values
    spec = _nonstiff_spectral(grid, rho, state.mom.arrays, state.H.arrays, p)
    rho_hat = grid.fft(rho)
    drho_hat, stiff_mom = _stiff_spectral(grid, rho_hat, spec.mom_hat, p)
    drho = ScalarField.from_spectrum(grid, drho_hat)
    dmom = VectorField(
        grid,
        tuple(
            ScalarField.from_spectrum(grid, nh + sh)
            for nh, sh in zip(spec.dmom_hat, stiff_mom)
        ),
    )
    dH = VectorField(
        grid, tuple(ScalarField.from_spectrum(grid, h) for h in spec.dH_hat)
    )
    return drho, dmom, dH


def rhs_terms(state: CompressibleState, p: PhysParams) -> dict:
    """Each rhs contribution as a separate field (diagnostics and oracles).

    The momentum pressure term is the full -(a/eps^2) grad(rho^gamma),
    evaluated through the cancellation-safe split grad G + gamma grad rho.
    """
    grid = state.grid
    _require_positive(state.rho.values)
    u = dealias(velocity(state))
    m, H = state.mom, state.H

    def advect(w: VectorField, f: VectorField) -> VectorField:
        comps = []
        for i in range(grid.dim):
            gi = gradient(f[i])
            comps.append(dealias(sum((w[j] * gi[j] for j in range(grid.dim)), start=ScalarField(grid, np.zeros(grid.shape)))))
        return VectorField(grid, tuple(comps))

    terms: dict[str, object] = {}
    terms["continuity"] = -divergence(m)

    div_mu = []
    for i in range(grid.dim):
        acc = np.zeros(grid.spectral_shape, dtype=np.complex128)
        for j in range(grid.dim):
            acc += 1j * grid.k_deriv[j] * (grid.dealias_mask * grid.fft(m[i].values * u[j].values))
        div_mu.append(ScalarField.from_spectrum(grid, -acc))
    terms["mom_advection"] = VectorField(grid, tuple(div_mu))

    g_field = ScalarField(grid, pressure_excess(state.rho.values, p.gamma))
    rho_dev = ScalarField(grid, state.rho.values - 1.0)
    grad_g = gradient(dealias(g_field))
    grad_rho = gradient(rho_dev)
    coef = p.a / p.eps**2
    terms["mom_pressure"] = VectorField(
        grid,
        tuple(
            ScalarField(grid, -coef * (gg.values + p.gamma * gr.values))
            for gg, gr in zip(grad_g.components, grad_rho.components)
        ),
    )

    terms["mom_lorentz_tension"] = advect(H, H)
    terms["mom_lorentz_pressure"] = -0.5 * gradient(dealias(H.dot(H)))
    terms["mom_shear"] = p.mu * laplacian(u)
    terms["mom_dilation"] = (p.mu + p.lam) * gradient(divergence(u))
    terms["induction_stretch"] = advect(H, u)
    terms["induction_advect"] = -1.0 * advect(u, H)
    div_u = divergence(u)
    terms["induction_compress"] = VectorField(
        grid, tuple(dealias(-1.0 * (div_u * H[i])) for i in range(grid.dim))
    )
    terms["induction_diffuse"] = p.nu * laplacian(H)

    mom_total = terms["mom_advection"]
    for key in ("mom_pressure", "mom_lorentz_tension", "mom_lorentz_pressure", "mom_shear", "mom_dilation"):
        mom_total = mom_total + terms[key]
    terms["mom_total"] = mom_total
    return terms


def lorentz_curl_form(H: VectorField) -> VectorField:
    """(curl H) x H, the rotational form of the magnetic force (diagnostic)."""
    grid = H.grid
    w = curl(H)
    if grid.dim == 2:
        comps = (
            dealias(ScalarField(grid, -w.values * H[1].values)),
            dealias(ScalarField(grid, w.values * H[0].values)),
        )
    else:
        wx, wy, wz = w.arrays
        hx, hy, hz = H.arrays
        comps = (
            dealias(ScalarField(grid, wy * hz - wz * hy)),
            dealias(ScalarField(grid, wz * hx - wx * hz)),
            dealias(ScalarField(grid, wx * hy - wy * hx)),
        )
    return VectorField(grid, comps)


# -- time stepping --------------------------------------------------------------


def cfl_max_dt(state: CompressibleState, p: PhysParams, scheme: str) -> float:
    """Stability ceiling for dt; callers apply their own cfl safety factor.

    rk4 pays the acoustic constraint eps*h/sqrt(a*gamma*max rho^(gamma-1));
    the IMEX scheme drops it (acoustics are implicit) but keeps the advective
    and explicit-diffusion limits.
    """
    if scheme not in SCHEMES:
        raise ConfigError(f"unknown scheme {scheme!r}")
    grid = state.grid
    h = grid.spacing
    rho = state.rho.values
    _require_positive(rho)
    u_mag = np.sqrt(sum((m / rho) ** 2 for m in state.mom.arrays))
    h_mag = np.sqrt(sum(Hj**2 for Hj in state.H.arrays))
    bounds = []
    if scheme == "rk4_explicit":
        cs = np.sqrt(p.a * p.gamma * float(np.max(rho ** (p.gamma - 1.0))))
        bounds.append(p.eps * h / cs)
    max_u = float(np.max(u_mag))
    max_h = float(np.max(h_mag))
    if max_u > 0:
        bounds.append(h / max_u)
    if max_h > 0:
        bounds.append(h / max_h)
    diff = max(p.mu, p.nu)
    if diff > 0:
        bounds.append(h * h / (2.0 * grid.dim * diff))
    return min(bounds) if bounds else np.inf


def _project_solenoidal_arrays(grid: Grid, H_hat: list[np.ndarray]) -> list[np.ndarray]:
    k = grid.k_deriv
    div = sum(1j * kj * hh for kj, hh in zip(k, H_hat))
    phi = -grid.inv_k2 * div
    return [hh - 1j * kj * phi for kj, hh in zip(k, H_hat)]


def _clean_H(grid: Grid, H: list[np.ndarray]) -> list[np.ndarray]:
    H_hat = [grid.fft(Hj) for Hj in H]
    return [grid.ifft(hh) for hh in _project_solenoidal_arrays(grid, H_hat)]


def _solve_acoustic(grid: Grid, theta: float, c2: float, b_rho_hat, b_mom_hat):
    """(I - theta*L) x = b for the linearized acoustic pair, mode by mode."""
    k = grid.k_deriv
    k_dot_b = sum(kj * bj for kj, bj in zip(k, b_mom_hat))
    denom = 1.0 + theta * theta * c2 * grid.k2
    rho_hat = (b_rho_hat - 1j * theta * k_dot_b) / denom
    mom_hat = [bj - 1j * theta * c2 * kj * rho_hat for kj, bj in zip(k, b_mom_hat)]
    return rho_hat, mom_hat


def step(
    state: CompressibleState, p: PhysParams, dt: float, scheme: str = "imex_acoustic"
) -> CompressibleState:
    """Advance one step, then replace H by its divergence-free part."""
    if scheme not in SCHEMES:
        raise ConfigError(f"unknown scheme {scheme!r}")
    limit = cfl_max_dt(state, p, scheme)
    if dt > limit:
        raise CFLViolationError(
            f"dt={dt:.3e} exceeds the {scheme} stability limit {limit:.3e}"
        )
    grid = state.grid
    rho0 = state.rho.values
    mom0 = state.mom.arrays
    H0 = state.H.arrays

    if scheme == "rk4_explicit":
        rho1, mom1, H1 = _rk4_arrays(grid, rho0, mom0, H0, p, dt)
    else:
        rho1, mom1, H1 = _imex_arrays(grid, rho0, mom0, H0, p, dt)

    H1 = _clean_H(grid, H1)
    return CompressibleState(
        t=state.t + dt,
        rho=ScalarField(grid, rho1),
        mom=VectorField.from_arrays(grid, mom1),
        H=VectorField.from_arrays(grid, H1),
    )


def _full_rhs_arrays(grid, rho, mom, H, p):
    spec = _nonstiff_spectral(grid, rho, mom, H, p)
    rho_hat = grid.fft(rho)
    drho_hat, stiff_mom = _stiff_spectral(grid, rho_hat, spec.mom_hat, p)
    drho = grid.ifft(drho_hat)
    dmom = [grid.ifft(nh + sh) for nh, sh in zip(spec.dmom_hat, stiff_mom)]
    dH = [grid.ifft(h) for h in spec.dH_hat]
    return drho, dmom, dH


def _rk4_arrays(grid, rho, mom, H, p, dt):
    def axpy(y0, k_, c):
        return y0 + c * k_

    k1 = _full_rhs_arrays(grid, rho, mom, H, p)
    s2 = (
        axpy(rho, k1[0], dt / 2),
        [axpy(m, km, dt / 2) for m, km in zip(mom, k1[1])],
        [axpy(h, kh, dt / 2) for h, kh in zip(H, k1[2])],
    )
    k2 = _full_rhs_arrays(grid, *s2, p)
    s3 = (
        axpy(rho, k2[0], dt / 2),
        [axpy(m, km, dt / 2) for m, km in zip(mom, k2[1])],
        [axpy(h, kh, dt / 2) for h, kh in zip(H, k2[2])],
    )
    k3 = _full_rhs_arrays(grid, *s3, p)
    s4 = (
        axpy(rho, k3[0], dt),
        [axpy(m, km, dt) for m, km in zip(mom, k3[1])],
        [axpy(h, kh, dt) for h, kh in zip(H, k3[2])],
    )
    k4 = _full_rhs_arrays(grid, *s4, p)
    w = dt / 6.0
    rho1 = rho + w * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
    mom1 = [
        m + w * (a + 2 * b + 2 * c + d)
        for m, a, b, c, d in zip(mom, k1[1], k2[1], k3[1], k4[1])
    ]
    H1 = [
        h + w * (a + 2 * b + 2 * c + d)
        for h, a, b, c, d in zip(H, k1[2], k2[2], k3[2], k4[2])
    ]
    return rho1, mom1, H1


def _imex_arrays(grid, rho, mom, H, p, dt):
    """Crank-Nicolson on the acoustic pair + Heun RK2 on the rest:

        U* : (I - dt/2 L) U* = U + dt N(U) + dt/2 L U
        U1 : (I - dt/2 L) U1 = U + dt/2 (N(U) + N(U*)) + dt/2 L U
    """
    theta = dt / 2.0
    c2 = p.a * p.gamma / p.eps**2

    n1 = _nonstiff_spectral(grid, rho, mom, H, p)
    rho_hat = grid.fft(rho)
    l_rho, l_mom = _stiff_spectral(grid, rho_hat, n1.mom_hat, p)

    b_rho = rho_hat + theta * l_rho
    b_mom = [
        mh + dt * nh + theta * lh for mh, nh, lh in zip(n1.mom_hat, n1.dmom_hat, l_mom)
    ]
    rho_s_hat, mom_s_hat = _solve_acoustic(grid, theta, c2, b_rho, b_mom)
    rho_s = grid.ifft(rho_s_hat)
    mom_s = [grid.ifft(mh) for mh in mom_s_hat]
    H_s = [h + dt * grid.ifft(dh) for h, dh in zip(H, n1.dH_hat)]

    n2 = _nonstiff_spectral(grid, rho_s, mom_s, H_s, p)
    b_mom2 = [
        mh + theta * (n1h + n2h) + theta * lh
        for mh, n1h, n2h, lh in zip(n1.mom_hat, n1.dmom_hat, n2.dmom_hat, l_mom)
    ]
    rho1_hat, mom1_hat = _solve_acoustic(grid, theta, c2, b_rho, b_mom2)
    rho1 = grid.ifft(rho1_hat)
    mom1 = [grid.ifft(mh) for mh in mom1_hat]
    H1 = [
        h + theta * (grid.ifft(d1) + grid.ifft(d2))
        for h, d1, d2 in zip(H, n1.dH_hat, n2.dH_hat)
    ]
    return rho1, mom1, H1


# -- energy bookkeeping ----------------------------------------------------------


def energy_total(state: CompressibleState, p: PhysParams) -> float:
    """Kinetic + magnetic + scaled internal energy (pressure-excess kernel)."""
    grid = state.grid
    rho = state.rho.values
    _require_positive(rho)
    kinetic = 0.5 * sum(float(np.sum(m * m / rho)) for m in state.mom.arrays)
    magnetic = 0.5 * sum(float(np.sum(h * h)) for h in state.H.arrays)
    internal = (p.a / (p.eps**2 * (p.gamma - 1.0))) * float(
        np.sum(pressure_excess(rho, p.gamma))
    )
    return (kinetic + magnetic + internal) * grid.cell_volume


def energy_dissipation(state: CompressibleState, p: PhysParams) -> float:
    """mu |grad u|^2 + (mu+lambda) |div u|^2 + nu |grad H|^2, integrated."""
    grid = state.grid
    rho = state.rho.values
    _require_positive(rho)
    mask = grid.dealias_mask
    u_hat = [mask * grid.fft(m / rho) for m in state.mom.arrays]
    H_hat = [grid.fft(h) for h in state.H.arrays]
    k = grid.k_deriv

    def grad_sq(spectra) -> float:
        return sum(grid.spectral_norm_sq(1j * kj * sh) for sh in spectra for kj in k)

    div_u = sum(1j * kj * uh for kj, uh in zip(k, u_hat))
    total = p.mu * grad_sq(u_hat)
    total += (p.mu + p.lam) * grid.spectral_norm_sq(div_u)
    total += p.nu * grad_sq(H_hat)
    return float(total)


@dataclass
class EnergyRecord:
    t: float
    E: float
    D: float
    D_cum: float
    slack: float


def build_energy_records(
    times: Sequence[float], energies: Sequence[float], dissipations: Sequence[float]
) -> list[EnergyRecord]:
    """Assemble records with trapezoidal cumulative dissipation."""
    t = np.asarray(times, dtype=float)
    e = np.asarray(energies, dtype=float)
    d = np.asarray(dissipations, dtype=float)
    if not (t.size == e.size == d.size) or t.size == 0:
        raise UsageError("energy records need equal, nonzero-length series")
    d_cum = np.zeros_like(d)
    for j in range(1, t.size):
        d_cum[j] = d_cum[j - 1] + 0.5 * (d[j] + d[j - 1]) * (t[j] - t[j - 1])
    slack = e[0] - e - d_cum
    return [
        EnergyRecord(float(t[j]), float(e[j]), float(d[j]), float(d_cum[j]), float(slack[j]))
        for j in range(t.size)
    ]


@dataclass
class EnergyReport:
    min_slack: float
    tol: float
    ok: bool
    violations: list[float]


def check_energy_inequality(records: Sequence[EnergyRecord]) -> EnergyReport:
    """Flag records whose slack E(0) - E(t) - D_cum(t) dips below -tol_E."""
    if len(records) == 0:
        raise UsageError("no energy records")
    if len(records) > 2:
        gaps = np.diff([r.t for r in records])
        if gaps.size and not np.allclose(gaps, gaps[0], rtol=1e-6, atol=1e-12):
            raise UsageError("energy records are not uniformly spaced in time")
    e0 = records[0].E
    tol = 1e-3 * e0 + 1e-12
    violations = [r.t for r in records if r.slack < -tol]
    min_slack = min(r.slack for r in records)
    return EnergyReport(min_slack=min_slack, tol=tol, ok=not violations, violations=violations)

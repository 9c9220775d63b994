"""Ideal incompressible MHD reference solver (spectral projection method).

    du/dt = P[ (H·grad)H - (u·grad)u ]        P = Leray projection
    dH/dt = (H·grad)u - (u·grad)H

The pressure (plus magnetic pressure) never appears: both gradient terms are
absorbed by the projection. RK4 in time; u and H are re-projected after each
full step. The system is inviscid, so trajectories are time-reversible up to
integrator error and conserve 1/2 ∫(|u|^2 + |H|^2) and ∫ u·H.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CFLViolationError, RegularityError
from .fields import Grid, ScalarField, VectorField

__all__ = [
    "IdealState",
    "rhs_ideal",
    "step_ideal",
    "energy_ideal",
    "cross_helicity",
    "pressure_gradient",
    "grad_max",
]


@dataclass(eq=False)
class IdealState:
    """Divergence-free (u, H) at one time level."""

    t: float
    u: VectorField
    H: VectorField

    @property
    def grid(self) -> Grid:
        return self.u.grid


def _nonlinear_hats(grid: Grid, u: list[np.ndarray], H: list[np.ndarray]):
    """Spectra of P[(H·grad)H - (u·grad)u] and (H·grad)u - (u·grad)H."""
    d = grid.dim
    k = grid.k_deriv
    mask = grid.dealias_mask
    fft, ifft = grid.fft, grid.ifft

    u_hat = [mask * fft(uj) for uj in u]
    H_hat = [mask * fft(Hj) for Hj in H]
    du_jac = [[ifft(1j * k[j] * u_hat[i]) for j in range(d)] for i in range(d)]
    dH_jac = [[ifft(1j * k[j] * H_hat[i]) for j in range(d)] for i in range(d)]

    du_hat = []
    dH_hat = []
    for i in range(d):
        force = sum(H[j] * dH_jac[i][j] - u[j] * du_jac[i][j] for j in range(d))
        du_hat.append(mask * fft(force))
        transport = sum(H[j] * du_jac[i][j] - u[j] * dH_jac[i][j] for j in range(d))
        dH_hat.append(mask * fft(transport))

    # project du onto divergence-free fields
    div = sum(1j * k[j] * du_hat[j] for j in range(d))
    phi = -grid.inv_k2 * div
    du_hat = [dh - 1j * kj * phi for kj, dh in zip(k, du_hat)]
    return du_hat, dH_hat


def _rhs_arrays(grid: Grid, u, H):
    du_hat, dH_hat = _nonlinear_hats(grid, u, H)
    return [grid.ifft(s) for s in du_hat], [grid.ifft(s) for s in dH_hat]


def rhs_ideal(state: IdealState) -> tuple[VectorField, VectorField]:
    du, dH = _rhs_arrays(state.grid, state.u.arrays, state.H.arrays)
    return (
        VectorField.from_arrays(state.grid, du),
        VectorField.from_arrays(state.grid, dH),
    )


def cfl_max_dt(state: IdealState) -> float:
    grid = state.grid
    speed = np.sqrt(sum(a**2 for a in state.u.arrays)) + np.sqrt(
        sum(a**2 for a in state.H.arrays)
    )
    top = float(np.max(speed))
    return np.inf if top == 0.0 else grid.spacing / top


def _project(grid: Grid, comps: list[np.ndarray]) -> list[np.ndarray]:
    hats = [grid.fft(c) for c in comps]
    k = grid.k_deriv
    div = sum(1j * kj * hh for kj, hh in zip(k, hats))
    phi = -grid.inv_k2 * div
    return [grid.ifft(hh - 1j * kj * phi) for kj, hh in zip(k, hats)]


def step_ideal(state: IdealState, dt: float) -> IdealState:
    """One RK4 step (dt may be negative: the system is reversible);
    u and H are re-projected afterwards."""
    grid = state.grid
    limit = cfl_max_dt(state)
    if abs(dt) > limit:
        raise CFLViolationError(
            f"|dt|={abs(dt):.3e} exceeds the advective limit {limit:.3e}"
        )
    u0 = state.u.arrays
    H0 = state.H.arrays

    k1u, k1h = _rhs_arrays(grid, u0, H0)
    s2u = [a + 0.5 * dt * b for a, b in zip(u0, k1u)]
    s2h = [a + 0.5 * dt * b for a, b in zip(H0, k1h)]
    k2u, k2h = _rhs_arrays(grid, s2u, s2h)
    s3u = [a + 0.5 * dt * b for a, b in zip(u0, k2u)]
    s3h = [a + 0.5 * dt * b for a, b in zip(H0, k2h)]
    k3u, k3h = _rhs_arrays(grid, s3u, s3h)
    s4u = [a + dt * b for a, b in zip(u0, k3u)]
    s4h = [a + dt * b for a, b in zip(H0, k3h)]
    k4u, k4h = _rhs_arrays(grid, s4u, s4h)

    w = dt / 6.0
    u1 = [a + w * (p + 2 * q + 2 * r + s) for a, p, q, r, s in zip(u0, k1u, k2u, k3u, k4u)]
    H1 = [a + w * (p + 2 * q + 2 * r + s) for a, p, q, r, s in zip(H0, k1h, k2h, k3h, k4h)]
    u1 = _project(grid, u1)
    H1 = _project(grid, H1)
    return IdealState(
        t=state.t + dt,
        u=VectorField.from_arrays(grid, u1),
        H=VectorField.from_arrays(grid, H1),
    )


def energy_ideal(state: IdealState) -> float:
    """1/2 ∫ (|u|^2 + |H|^2)."""
    grid = state.grid
    total = sum(float(np.sum(a * a)) for a in state.u.arrays)
    total += sum(float(np.sum(a * a)) for a in state.H.arrays)
    return 0.5 * total * grid.cell_volume


def cross_helicity(state: IdealState) -> float:
    """∫ u·H, a classical invariant used as an extra scheme diagnostic."""
    grid = state.grid
    total = sum(
        float(np.sum(a * b)) for a, b in zip(state.u.arrays, state.H.arrays)
    )
    return total * grid.cell_volume


def pressure_gradient(state: IdealState) -> VectorField:
    """grad(p + |H|^2/2) = Q[(H·grad)H - (u·grad)u], recovered on demand."""
    grid = state.grid
    d = grid.dim
    k = grid.k_deriv
    mask = grid.dealias_mask
    fft, ifft = grid.fft, grid.ifft
    u, H = state.u.arrays, state.H.arrays
    u_hat = [mask * fft(uj) for uj in u]
    H_hat = [mask * fft(Hj) for Hj in H]
    force_hat = []
    for i in range(d):
        du_i = [ifft(1j * k[j] * u_hat[i]) for j in range(d)]
        dh_i = [ifft(1j * k[j] * H_hat[i]) for j in range(d)]
        force = sum(H[j] * dh_i[j] - u[j] * du_i[j] for j in range(d))
        force_hat.append(mask * fft(force))
    div = sum(1j * k[j] * force_hat[j] for j in range(d))
    phi = -grid.inv_k2 * div
    return VectorField.from_arrays(grid, [grid.ifft(1j * kj * phi) for kj in k])


def grad_max(state: IdealState) -> float:
    """max_{i,j,x} |d u_i / d x_j|, the regularity monitor."""
    grid = state.grid
    k = grid.k_deriv
    top = 0.0
    for c in state.u.components:
        spec = c.spectrum()
        for kj in k:
            top = max(top, float(np.max(np.abs(grid.ifft(1j * kj * spec)))))
    return top


def check_regularity(initial_grad_max: float, current: float, budget: float = 100.0):
    if current > budget * max(initial_grad_max, 1e-300):
        raise RegularityError(
            f"|grad u|_inf grew {current / max(initial_grad_max, 1e-300):.1f}x, "
            f"past the {budget:.0f}x budget: reference left the smooth regime"
        )

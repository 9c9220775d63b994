"""Initial data: base vortex pair plus seeded acoustic perturbations.

The base flow is the 2D Orszag-Tang-type divergence-free pair

    u0 = (-sin y', sin x'),   H0 = (-sin y', sin 2x'),   x' = 2*pi*x/box_len

rescaled to unit total energy (3D: same fields with a zero third component).
Well-prepared runs start the compressible solver exactly on the limit data
(rho = 1, no gradient-part velocity), so the corrector is identically zero.
General runs add an O(1) acoustic component: a density ripple eps*amp*psi and
a gradient velocity amp*grad(chi), with psi and chi fixed band-limited
mean-zero profiles drawn deterministically from the seed (the same profiles
for every eps in a sweep).
"""

from __future__ import annotations

import numpy as np

from .compressible import CompressibleState
from .config import RunConfig
from .errors import VacuumError
from .fields import (
    Grid,
    ScalarField,
    VectorField,
    dealias,
    gradient,
    solenoidal_part,
)
from .ideal import IdealState
from .modulated import RHO_FLOOR

__all__ = ["orszag_tang_pair", "acoustic_profiles", "make_initial_data"]


def orszag_tang_pair(grid: Grid) -> tuple[VectorField, VectorField]:
    """Unit-energy divergence-free (u0, H0) vortex pair."""
    x = grid.coords()
    theta = 2.0 * np.pi / grid.box_len
    u = [-np.sin(theta * x[1]), np.sin(theta * x[0])]
    h = [-np.sin(theta * x[1]), np.sin(theta * 2.0 * x[0])]
    if grid.dim == 3:
        u.append(np.zeros(grid.shape))
        h.append(np.zeros(grid.shape))
    energy = 0.5 * (sum(np.sum(a * a) for a in u) + sum(np.sum(a * a) for a in h))
    energy *= grid.cell_volume
    scale = 1.0 / np.sqrt(energy)
    return (
        VectorField.from_arrays(grid, [scale * a for a in u]),
        VectorField.from_arrays(grid, [scale * a for a in h]),
    )


_BAND_MAX = 2  # largest |k_int| component in the perturbation profiles


def _band_modes(dim: int) -> list[tuple[int, ...]]:
    """Canonical half-space of integer wavevectors with 1 <= |k|_inf <= _BAND_MAX."""
    rng = range(-_BAND_MAX, _BAND_MAX + 1)
    modes = []
    grids = np.meshgrid(*[list(rng)] * dim, indexing="ij")
    for idx in sorted(zip(*[g.ravel() for g in grids])):
        k = tuple(int(v) for v in idx)
        if all(v == 0 for v in k):
            continue
        first = next(v for v in k if v != 0)
        if first < 0:
            continue  # the conjugate partner supplies this mode
        modes.append(k)
    return modes


def _synthesize(grid: Grid, coeffs: dict[tuple[int, ...], complex]) -> np.ndarray:
    x = grid.coords()
    theta = 2.0 * np.pi / grid.box_len
    out = np.zeros(grid.shape)
    for k, c in coeffs.items():
        phase = sum(theta * kj * xj for kj, xj in zip(k, x))
        out += 2.0 * (c.real * np.cos(phase) - c.imag * np.sin(phase))
    return out


def acoustic_profiles(grid: Grid, seed: int) -> tuple[ScalarField, ScalarField]:
    """(psi, chi): mean-zero band-limited profiles, max|psi| = max|grad chi| = 1."""
    modes = _band_modes(grid.dim)
    psi_rng = np.random.default_rng(np.random.SeedSequence([seed, 1]))
    chi_rng = np.random.default_rng(np.random.SeedSequence([seed, 2]))

    def draw(rng) -> dict:
        return {
            k: complex(rng.standard_normal(), rng.standard_normal()) for k in modes
        }

    psi = _synthesize(grid, draw(psi_rng))
    psi /= np.max(np.abs(psi))
    chi = _synthesize(grid, draw(chi_rng))
    grad_mag = np.sqrt(
        sum(c.values**2 for c in gradient(ScalarField(grid, chi)).components)
    )
    chi /= np.max(grad_mag)
    return ScalarField(grid, psi), ScalarField(grid, chi)


def make_initial_data(
    cfg: RunConfig, eps: float, ideal_grid: Grid | None = None
) -> tuple[CompressibleState, IdealState]:
    """Compressible and incompressible-reference initial states.

    The reference starts from the projected eps-independent limit of
    sqrt(rho0) u0 (for this family: the base vortex velocity), on
    ``ideal_grid`` when a refined reference is requested.
    """
    grid = cfg.grid()
    u0, h0 = orszag_tang_pair(grid)

    if cfg.init_kind == "well_prepared":
        rho0 = np.ones(grid.shape)
        u_eps = u0
    else:
        psi, chi = acoustic_profiles(grid, cfg.seed)
        rho0 = 1.0 + eps * cfg.amp_acoustic * psi.values
        if float(np.min(rho0)) <= RHO_FLOOR:
            raise VacuumError(
                "general initial data reaches vacuum: lower amp_acoustic or eps"
            )
        grad_chi = gradient(chi)
        u_eps = VectorField.from_arrays(
            grid,
            [
                u + cfg.amp_acoustic * g
                for u, g in zip(u0.arrays, grad_chi.arrays)
            ],
        )

    mom = dealias(
        VectorField.from_arrays(grid, [rho0 * uj for uj in u_eps.arrays])
    )
    comp = CompressibleState(
        t=0.0,
        rho=ScalarField(grid, rho0),
        mom=mom,
        H=VectorField(grid, h0.components),
    )

    # reference data: project the eps-independent L2 limit of sqrt(rho0) u0,
    # which for this family is u0 + amp*grad(chi); P removes the gradient part
    ref_grid = ideal_grid if ideal_grid is not None else grid
    u_base, h_ref = (u0, h0) if ref_grid == grid else orszag_tang_pair(ref_grid)
    u_tilde = u_base
    if cfg.init_kind == "general":
        _, chi_ref = acoustic_profiles(ref_grid, cfg.seed)
        grad_chi_ref = gradient(chi_ref)
        u_tilde = VectorField.from_arrays(
            ref_grid,
            [u + cfg.amp_acoustic * g for u, g in zip(u_base.arrays, grad_chi_ref.arrays)],
        )
    ideal = IdealState(t=0.0, u=solenoidal_part(u_tilde), H=h_ref)
    return comp, ideal

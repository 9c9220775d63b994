"""Acoustic oscillation corrector, evolved exactly in Fourier space.

The corrector pair (phi, g = grad q) solves

    d phi/dt = -(1/eps) div g,      d g/dt = -(1/eps) grad phi,

a constant-coefficient wave system whose solution operator is a mode-wise
rotation: with tau = (t - t0)/eps and omega = |k|,

    phi_hat <- cos(omega tau) phi_hat + omega sin(omega tau) q_hat
    q_hat  <- -(sin(omega tau)/omega) phi_hat + cos(omega tau) q_hat

and the k=0 mode is constant. Evolving spectrally removes all time-stepping
error and makes the half-sum of ||phi||^2 + ||g||^2 exactly conserved.

Initial data: phi(0) is the mollified energy-weighted density deviation,
g(0) the mollified gradient part of sqrt(rho0) u0. On a periodic box the
whole-space dispersive decay is only emulated until waves wrap around, so
the probe below reports which regime a run is in and claims no decay rate.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .errors import UsageError
from .fields import (
    Grid,
    MollifierSpec,
    ScalarField,
    VectorField,
    gradient_part,
    l2_norm,
    lr_norm,
    mollify,
)
from .modulated import energy_density_deviation

if TYPE_CHECKING:  # pragma: no cover
    from .compressible import PhysParams

__all__ = [
    "AcousticState",
    "init_corrector",
    "propagate",
    "isometry_check",
    "dispersion_probe",
    "DispersionReport",
    "momentum_projection_gap",
]


@dataclass(eq=False)
class AcousticState:
    """Corrector pair held spectrally; fields are materialized on demand."""

    grid: Grid
    t: float
    phi_hat: np.ndarray
    q_hat: np.ndarray
    energy0: float = field(default=0.0)

    @classmethod
    def from_fields(cls, phi: ScalarField, q: ScalarField, t: float = 0.0) -> "AcousticState":
        if phi.grid != q.grid:
            raise UsageError("phi and q live on different grids")
        state = cls(
            grid=phi.grid,
            t=t,
            phi_hat=phi.spectrum().copy(),
            q_hat=q.spectrum().copy(),
        )
        state.q_hat[(0,) * phi.grid.dim] = 0.0  # q only defined up to a constant
        state.energy0 = state.energy()
        return state

    @property
    def phi(self) -> ScalarField:
        return ScalarField.from_spectrum(self.grid, self.phi_hat)

    @property
    def q(self) -> ScalarField:
        return ScalarField.from_spectrum(self.grid, self.q_hat)

    @property
    def g(self) -> VectorField:
        comps = [
            ScalarField.from_spectrum(self.grid, 1j * kj * self.q_hat)
            for kj in self.grid.k_deriv
        ]
        return VectorField(self.grid, tuple(comps))

    def phi_values(self) -> np.ndarray:
        return self.grid.ifft(self.phi_hat)

    def g_arrays(self) -> list[np.ndarray]:
        return [self.grid.ifft(1j * kj * self.q_hat) for kj in self.grid.k_deriv]

    def energy(self) -> float:
        """1/2 (||phi||^2 + ||g||^2), evaluated spectrally."""
        g = self.grid
        phi_sq = g.spectral_norm_sq(self.phi_hat)
        grad_sq = float(
            np.sum(g.parseval_weights * g.k2 * np.abs(self.q_hat) ** 2)
        ) * g.volume / g.n ** (2 * g.dim)
        return 0.5 * (phi_sq + grad_sq)


def init_corrector(
    rho0: ScalarField,
    u0: VectorField,
    p: "PhysParams",
    m: MollifierSpec,
) -> AcousticState:
    """Corrector initial data from the compressible initial data.

    phi(0) = mollified signed energy-weighted density deviation,
    g(0)   = mollified gradient part of sqrt(rho0) u0,
    q recovered spectrally from g (zero mode pinned to 0).
    """
    grid = rho0.grid
    phi0 = mollify(energy_density_deviation(rho0, p, signed=True), m)
    sq = np.sqrt(rho0.values)
    su = VectorField.from_arrays(grid, [sq * uj for uj in u0.arrays])
    g0 = mollify(gradient_part(su), m)

    g_hats = [c.spectrum() for c in g0.components]
    k = grid.k_deriv
    k_dot_g = sum(kj * gh for kj, gh in zip(k, g_hats))
    q_hat = -1j * grid.inv_k2 * k_dot_g
    state = AcousticState(grid=grid, t=0.0, phi_hat=phi0.spectrum().copy(), q_hat=q_hat)
    state.energy0 = state.energy()
    return state


def propagate(state: AcousticState, t_target: float, p: "PhysParams") -> AcousticState:
    """Exact evolution to t_target; no time-stepping error."""
    grid = state.grid
    tau = (t_target - state.t) / p.eps
    omega = np.sqrt(grid.k2)
    c = np.cos(omega * tau)
    s = np.sin(omega * tau)
    inv_omega = np.zeros_like(omega)
    np.divide(1.0, omega, out=inv_omega, where=omega > 0)
    phi_new = c * state.phi_hat + omega * s * state.q_hat
    q_new = -s * inv_omega * state.phi_hat + c * state.q_hat
    # omega = 0 modes (k=0 and pure-Nyquist) stay constant
    zero = omega == 0
    phi_new[zero] = state.phi_hat[zero]
    q_new[zero] = state.q_hat[zero]
    return replace(state, t=t_target, phi_hat=phi_new, q_hat=q_new)


def isometry_check(state: AcousticState) -> float:
    """Relative drift of the conserved quadratic energy since initialization."""
    e0 = state.energy0
    if e0 == 0.0:
        return abs(state.energy())
    return abs(state.energy() - e0) / e0


@dataclass
class DispersionReport:
    """L^r norm history of the corrector across a run window."""

    r: float
    times: list[float]
    phi_norms: list[float]
    g_norms: list[float]
    decay_factor: float | None
    regime: str  # "dispersive" | "non-dispersive" | "trivial"


def dispersion_probe(
    states: Sequence[AcousticState], r: float, p: "PhysParams"
) -> DispersionReport:
    """Crude spatial L^r decay probe (no quantitative rate is claimed).

    The whole-space decay mechanism only operates before wrap-around, i.e.
    for windows shorter than box_len*eps/2; otherwise the report is marked
    non-dispersive.
    """
    if r <= 2:
        raise UsageError(f"dispersion probe needs r > 2, got {r}")
    if len(states) < 2:
        raise UsageError("dispersion probe needs at least two states")
    grid = states[0].grid
    times = [s.t for s in states]
    span = times[-1] - times[0]
    regime = "dispersive" if span < grid.box_len * p.eps / 2.0 else "non-dispersive"
    phi_norms = [lr_norm(s.phi, r) for s in states]
    g_norms = [lr_norm(s.g, r) for s in states]
    if phi_norms[0] > 0:
        decay = phi_norms[-1] / phi_norms[0]
    else:
        decay = None
        regime = "trivial" if max(phi_norms) == 0 and max(g_norms) == 0 else regime
    return DispersionReport(
        r=r,
        times=times,
        phi_norms=phi_norms,
        g_norms=g_norms,
        decay_factor=decay,
        regime=regime,
    )


def momentum_projection_gap(rho0: ScalarField, u0: VectorField) -> float:
    """||Q(rho0 u0) - Q(sqrt(rho0) u0)||_2: size of the sqrt approximation."""
    grid = rho0.grid
    rho = rho0.values
    mu = VectorField.from_arrays(grid, [rho * uj for uj in u0.arrays])
    su = VectorField.from_arrays(grid, [np.sqrt(rho) * uj for uj in u0.arrays])
    return l2_norm(gradient_part(mu) - gradient_part(su))

"""Quick invariant battery behind the `mhdlab selftest` subcommand.

Each check prints one PASS/FAIL line; the battery is a fast smoke screen,
not a replacement for the pytest suite.
"""

from __future__ import annotations

import numpy as np

from . import acoustic, compressible
from .compressible import CompressibleState, PhysParams
from .fields import (
    Grid,
    MollifierSpec,
    ScalarField,
    VectorField,
    curl,
    divergence,
    gradient,
    gradient_part,
    l2_inner,
    l2_norm,
    laplacian,
    lq2_norm,
    max_norm,
    mollifier_kernel,
    mollify,
    solenoidal_part,
)


def _random_vector(grid: Grid, rng) -> VectorField:
    comps = []
    cut = grid.n // 3
    for _ in range(grid.dim):
        spec = np.zeros(grid.spectral_shape, dtype=np.complex128)
        noise = rng.standard_normal(grid.shape)
        spec = grid.fft(noise) * grid.dealias_mask
        # keep it band-limited well inside the 2/3 cutoff
        for axis, k in enumerate(grid._k_int):
            spec = np.where(np.abs(k) <= max(2, cut // 2), spec, 0.0)
        comps.append(ScalarField.from_spectrum(grid, spec))
    return VectorField(grid, tuple(comps))


def run_selftest(verbose: bool = True) -> bool:
    checks: list[tuple[str, bool, str]] = []
    rng = np.random.default_rng(7)

    def record(name: str, ok: bool, detail: str = ""):
        checks.append((name, bool(ok), detail))

    # spectral calculus
    for dim, n in ((2, 32), (3, 16)):
        grid = Grid(dim, n, 2.0 * np.pi)
        v = _random_vector(grid, rng)
        pv, qv = solenoidal_part(v), gradient_part(v)
        recon = max_norm(pv + qv - v) <= 1e-12 * max(max_norm(v), 1e-30)
        record(f"helmholtz reconstruction {dim}d", recon)
        record(
            f"div-free part {dim}d",
            l2_norm(divergence(pv)) <= 1e-10 * max(l2_norm(v), 1e-30),
        )
        qc = curl(qv)
        record(
            f"curl-free part {dim}d",
            l2_norm(qc) <= 1e-10 * max(l2_norm(v), 1e-30),
        )
        record(
            f"P/Q orthogonality {dim}d",
            abs(l2_inner(pv, qv)) <= 1e-10 * max(l2_norm(v) ** 2, 1e-30),
        )

    grid3 = Grid(3, 16, 2.0 * np.pi)
    v3 = _random_vector(grid3, rng)
    lhs = curl(curl(v3))
    rhs_ = gradient(divergence(v3)) - laplacian(v3)
    record(
        "curl-curl identity 3d",
        l2_norm(lhs - rhs_) <= 1e-10 * max(l2_norm(v3), 1e-30),
    )

    # mollifier
    grid = Grid(2, 32, 2.0 * np.pi)
    spec = MollifierSpec(delta=0.5, kind="bump")
    kernel = mollifier_kernel(grid, spec)
    record(
        "mollifier mass",
        abs(kernel.sum() * grid.cell_volume - 1.0) <= 1e-13,
    )
    w = _random_vector(grid, rng)
    record(
        "mollify commutes with projection",
        max_norm(mollify(solenoidal_part(w), spec) - solenoidal_part(mollify(w, spec)))
        <= 1e-12 * max(max_norm(w), 1e-30),
    )

    # norms
    f = ScalarField(grid, 0.25 * np.ones(grid.shape))
    record(
        "lq2 small-branch closed form",
        abs(lq2_norm(f, 2.0) - np.sqrt(grid.volume / 16.0)) <= 1e-12,
    )

    # acoustic group
    p = PhysParams(eps=0.125, alpha=0.5, beta=0.5, gamma=1.4)
    phi0 = ScalarField(grid, np.sin(grid.coords()[0]))
    q0 = ScalarField(grid, np.cos(grid.coords()[1]))
    st = acoustic.AcousticState.from_fields(phi0, q0)
    st2 = acoustic.propagate(st, 0.37, p)
    record("acoustic isometry", acoustic.isometry_check(st2) <= 1e-12)
    direct = acoustic.propagate(st, 0.9, p)
    via = acoustic.propagate(st2, 0.9, p)
    record(
        "acoustic group law",
        float(np.max(np.abs(direct.phi_hat - via.phi_hat))) <= 1e-12 * (1 + float(np.max(np.abs(st.phi_hat)))),
    )

    # compressible rest state + mass conservation
    rest = CompressibleState(
        t=0.0,
        rho=ScalarField(grid, np.ones(grid.shape)),
        mom=VectorField.from_arrays(grid, [np.zeros(grid.shape)] * 2),
        H=VectorField.from_arrays(grid, [np.zeros(grid.shape)] * 2),
    )
    st_c = rest
    for _ in range(20):
        st_c = compressible.step(st_c, p, 1e-3, "imex_acoustic")
    record(
        "rest state fixed point",
        max_norm(st_c.rho - 1.0) <= 1e-14
        and max_norm(st_c.mom) <= 1e-14
        and max_norm(st_c.H) <= 1e-14,
    )

    x = grid.coords()
    pert = CompressibleState(
        t=0.0,
        rho=ScalarField(grid, 1.0 + 0.01 * np.sin(x[0]) * np.cos(x[1])),
        mom=VectorField.from_arrays(
            grid, [0.05 * np.sin(x[1]), 0.05 * np.cos(x[0])]
        ),
        H=VectorField.from_arrays(grid, [np.zeros(grid.shape)] * 2),
    )
    mass0 = pert.rho.mean()
    st_c = pert
    for _ in range(20):
        st_c = compressible.step(st_c, p, 5e-4, "imex_acoustic")
    record(
        "mass conservation",
        abs(st_c.rho.mean() - mass0) <= 1e-12 * abs(mass0),
    )

    ok_all = True
    for name, ok, detail in checks:
        ok_all &= ok
        if verbose:
            suffix = f"  ({detail})" if detail and not ok else ""
            print(f"{'PASS' if ok else 'FAIL'}  {name}{suffix}")
    return ok_all

import numpy as np
import pytest

from mhdlab.errors import ConfigError, UsageError
from mhdlab.fields import (
    Grid,
    MollifierSpec,
    ScalarField,
    VectorField,
    curl,
    dealias,
    divergence,
    gradient,
    gradient_part,
    l2_inner,
    l2_norm,
    laplacian,
    lq2_norm,
    lr_norm,
    max_norm,
    mollifier_kernel,
    mollifier_multiplier,
    mollify,
    restrict_to,
    solenoidal_part,
)

from conftest import random_scalar, random_vector
from oracles import fd_curl, fd_divergence, fd_gradient, fd_laplacian


def analytic_scalar(grid):
    """Fixed low-mode function, identical on any grid over the same box."""
    x = grid.coords()
    f = np.sin(x[0]) * np.cos(2 * x[1]) + 0.5 * np.cos(3 * x[0] + x[1])
    if grid.dim == 3:
        f = f + 0.3 * np.sin(x[2]) * np.cos(x[0])
    return ScalarField(grid, f)


class TestGrid:
    def test_rejects_bad_parameters(self):
        with pytest.raises(ConfigError):
            Grid(4, 32, 1.0)
        with pytest.raises(ConfigError):
            Grid(2, 24, 1.0)  # not a power of two
        with pytest.raises(ConfigError):
            Grid(2, 4, 1.0)  # too small
        with pytest.raises(ConfigError):
            Grid(2, 32, -1.0)

    def test_spacing_uniform(self):
        g = Grid(2, 32, 4.0)
        assert g.spacing == 0.125
        assert g.cell_volume == 0.125**2

    def test_round_trip(self, grid2d, rng):
        f = rng.standard_normal(grid2d.shape)
        back = grid2d.ifft(grid2d.fft(f))
        assert np.max(np.abs(back - f)) <= 1e-12 * np.max(np.abs(f))

    def test_field_rejects_nonfinite(self, grid2d):
        bad = np.ones(grid2d.shape)
        bad[0, 0] = np.nan
        with pytest.raises(UsageError):
            ScalarField(grid2d, bad)


class TestGradient:
    def test_constant_has_zero_gradient(self, grid2d):
        g = gradient(ScalarField(grid2d, 3.7 * np.ones(grid2d.shape)))
        assert max_norm(g) <= 1e-14

    def test_single_mode_closed_form(self):
        grid = Grid(2, 64, 4.0)
        x = grid.coords()
        k = 2 * np.pi / grid.box_len
        f = ScalarField(grid, np.sin(k * x[0]))
        g = gradient(f)
        expected = k * np.cos(k * x[0])
        assert np.max(np.abs(g[0].values - expected)) <= 1e-12 * k
        assert max_norm(g[1]) <= 1e-13
        # cross-check the closed form against the finite-difference oracle
        fd = fd_gradient(f.values, grid.spacing)
        assert np.max(np.abs(fd[0] - expected)) <= 1e-6

    def test_matches_fd_oracle_at_order_8(self):
        errs = {}
        for n in (64, 128):
            grid = Grid(2, n, 2 * np.pi)
            f = analytic_scalar(grid)
            spec = gradient(f)
            fd = fd_gradient(f.values, grid.spacing)
            errs[n] = max(
                np.max(np.abs(spec[j].values - fd[j])) for j in range(2)
            )
        assert errs[64] <= 1e-3
        order = np.log2(errs[64] / errs[128])
        assert order >= 7.5

    def test_random_band_limited_vs_fd(self, rng):
        grid = Grid(2, 128, 2 * np.pi)
        f = random_scalar(grid, rng, kmax=3)
        spec = gradient(f)
        fd = fd_gradient(f.values, grid.spacing)
        for j in range(2):
            assert np.max(np.abs(spec[j].values - fd[j])) <= 2e-5


class TestDivergence:
    def test_div_grad_equals_laplacian(self, grid2d, rng):
        f = random_scalar(grid2d, rng)
        lhs = divergence(gradient(f))
        rhs = laplacian(f)
        assert max_norm(lhs - rhs) <= 1e-12 * max(max_norm(rhs), 1.0)

    def test_solenoidal_analytic_field(self, grid2d):
        x = grid2d.coords()
        v = VectorField.from_arrays(grid2d, [-np.sin(x[1]), np.sin(x[0])])
        assert max_norm(divergence(v)) <= 1e-13

    def test_random_vs_fd(self, rng):
        grid = Grid(2, 128, 2 * np.pi)
        v = random_vector(grid, rng, kmax=3)
        fd = fd_divergence(v.arrays, grid.spacing)
        assert np.max(np.abs(divergence(v).values - fd)) <= 4e-5


class TestCurl:
    def test_curl_of_gradient_vanishes(self, grid2d, grid3d, rng):
        for grid in (grid2d, grid3d):
            f = random_scalar(grid, rng)
            c = curl(gradient(f))
            assert max_norm(c) <= 1e-12

    def test_curl_curl_identity_3d(self, grid3d, rng):
        v = random_vector(grid3d, rng)
        lhs = curl(curl(v))
        rhs = gradient(divergence(v)) - laplacian(v)
        assert l2_norm(lhs - rhs) <= 1e-12 * max(l2_norm(v), 1.0)

    def test_single_mode_closed_form_2d(self):
        grid = Grid(2, 32, 2 * np.pi)
        x = grid.coords()
        v = VectorField.from_arrays(grid, [np.zeros(grid.shape), np.sin(x[0])])
        c = curl(v)
        assert np.max(np.abs(c.values - np.cos(x[0]))) <= 1e-13

    def test_curl_vs_fd_3d(self, rng):
        grid = Grid(3, 32, 2 * np.pi)
        v = random_vector(grid, rng, kmax=2)
        fd = fd_curl(v.arrays, grid.spacing)
        c = curl(v)
        for j in range(3):
            assert np.max(np.abs(c[j].values - fd[j])) <= 5e-3


class TestLaplacian:
    def test_constant(self, grid2d):
        f = ScalarField(grid2d, np.full(grid2d.shape, 2.5))
        assert max_norm(laplacian(f)) <= 1e-14

    def test_single_mode_closed_form(self):
        grid = Grid(2, 64, 2 * np.pi)
        x = grid.coords()
        for k in (1, 3):
            f = ScalarField(grid, np.sin(k * x[0]))
            lap = laplacian(f)
            assert np.max(np.abs(lap.values + k**2 * f.values)) <= 1e-11 * k**2

    def test_matches_fd(self, rng):
        grid = Grid(2, 128, 2 * np.pi)
        f = random_scalar(grid, rng, kmax=3)
        fd = fd_laplacian(f.values, grid.spacing)
        assert np.max(np.abs(laplacian(f).values - fd)) <= 2e-4

    def test_vector_laplacian(self, grid2d, rng):
        v = random_vector(grid2d, rng)
        lv = laplacian(v)
        for j in range(2):
            assert max_norm(lv[j] - laplacian(v[j])) == 0.0


class TestHelmholtz:
    def test_pure_gradient_field(self, grid2d, rng):
        f = random_scalar(grid2d, rng)  # mean-zero
        v = gradient(f)
        q = gradient_part(v)
        p = solenoidal_part(v)
        assert max_norm(q - v) <= 1e-12 * max_norm(v)
        assert max_norm(p) <= 1e-12 * max_norm(v)

    def test_divergence_free_field(self, grid2d):
        x = grid2d.coords()
        v = VectorField.from_arrays(grid2d, [-np.sin(x[1]), np.sin(x[0])])
        assert max_norm(gradient_part(v)) <= 1e-13
        assert max_norm(solenoidal_part(v) - v) <= 1e-13

    @pytest.mark.parametrize("dim,n", [(2, 64), (3, 16)])
    def test_random_reconstruction_and_orthogonality(self, dim, n, rng):
        grid = Grid(dim, n, 2 * np.pi)
        v = random_vector(grid, rng)
        p, q = solenoidal_part(v), gradient_part(v)
        assert max_norm(p + q - v) <= 1e-12 * max_norm(v)
        assert l2_norm(divergence(p)) <= 1e-10 * l2_norm(v)
        assert l2_norm(curl(q)) <= 1e-10 * l2_norm(v)
        assert abs(l2_inner(p, q)) <= 1e-10 * l2_norm(v) ** 2
        # idempotence
        assert max_norm(solenoidal_part(p) - p) <= 1e-12 * max(max_norm(p), 1e-30)

    def test_mean_mode_assigned_to_solenoidal_part(self, grid2d):
        v = VectorField.from_arrays(
            grid2d, [np.full(grid2d.shape, 1.5), np.full(grid2d.shape, -0.5)]
        )
        assert max_norm(gradient_part(v)) <= 1e-14
        assert max_norm(solenoidal_part(v) - v) <= 1e-14


class TestMollifier:
    def test_kernel_mass_and_positivity(self, grid2d):
        for kind in ("bump", "gaussian_truncated"):
            spec = MollifierSpec(delta=0.5, kind=kind)
            kernel = mollifier_kernel(grid2d, spec)
            assert abs(kernel.sum() * grid2d.cell_volume - 1.0) <= 1e-15
            assert np.all(kernel >= 0)

    def test_constant_field_unchanged(self, grid2d):
        spec = MollifierSpec(delta=0.5, kind="bump")
        f = ScalarField(grid2d, np.full(grid2d.shape, 1.25))
        out = mollify(f, spec)
        assert np.array_equal(out.values, f.values)

    def test_near_delta_kernel_is_identity(self, grid2d, rng):
        spec = MollifierSpec(delta=grid2d.spacing, kind="bump")
        f = random_scalar(grid2d, rng)
        out = mollify(f, spec)
        assert max_norm(out - f) <= 1e-6 * max_norm(f)

    def test_single_mode_scaled_by_kernel_coefficient(self, grid2d):
        spec = MollifierSpec(delta=0.7, kind="gaussian_truncated")
        mult = mollifier_multiplier(grid2d, spec)
        x = grid2d.coords()
        k_int = 3
        f = ScalarField(grid2d, np.cos(k_int * x[0]))
        out = mollify(f, spec)
        expected = mult[k_int, 0] * f.values
        assert np.max(np.abs(out.values - expected)) <= 1e-13

    def test_commutes_with_projections(self, grid2d, rng):
        spec = MollifierSpec(delta=0.4, kind="bump")
        v = random_vector(grid2d, rng)
        a = mollify(solenoidal_part(v), spec)
        b = solenoidal_part(mollify(v, spec))
        assert max_norm(a - b) <= 1e-12 * max_norm(v)
        c = mollify(gradient_part(v), spec)
        d = gradient_part(mollify(v, spec))
        assert max_norm(c - d) <= 1e-12 * max_norm(v)

    def test_mean_preserved(self, grid2d, rng):
        spec = MollifierSpec(delta=0.5, kind="bump")
        f = random_scalar(grid2d, rng, mean_zero=False)
        assert abs(mollify(f, spec).mean() - f.mean()) <= 1e-14

    def test_high_wavenumber_attenuated(self, grid2d):
        spec = MollifierSpec(delta=1.0, kind="bump")
        x = grid2d.coords()
        f = ScalarField(grid2d, np.cos(10 * x[0]))
        assert l2_norm(mollify(f, spec)) < 0.5 * l2_norm(f)

    def test_delta_out_of_range_rejected(self, grid2d):
        with pytest.raises(ConfigError):
            mollify(
                ScalarField(grid2d, np.ones(grid2d.shape)),
                MollifierSpec(delta=grid2d.box_len / 2, kind="bump"),
            )
        with pytest.raises(ConfigError):
            MollifierSpec(delta=0.5, kind="tophat")


class TestNorms:
    def test_zero_field(self, grid2d):
        z = ScalarField(grid2d, np.zeros(grid2d.shape))
        assert l2_norm(z) == 0.0
        assert max_norm(z) == 0.0
        assert lq2_norm(z, 2.0) == 0.0

    def test_single_mode_closed_form(self):
        grid = Grid(2, 64, 2 * np.pi)
        x = grid.coords()
        f = ScalarField(grid, np.sin(x[0]))
        # integral of sin^2 over the box is 2*pi^2
        assert abs(l2_norm(f) - np.sqrt(2 * np.pi**2)) <= 1e-12

    def test_parseval(self, grid2d, rng):
        f = random_scalar(grid2d, rng)
        phys = l2_norm(f) ** 2
        spec = grid2d.spectral_norm_sq(f.spectrum())
        assert abs(phys - spec) <= 1e-12 * phys

    def test_lq2_quarter_field(self, grid2d):
        V = grid2d.volume
        f = ScalarField(grid2d, np.full(grid2d.shape, 0.25))
        assert abs(lq2_norm(f, 2.0) - np.sqrt(V / 16.0)) <= 1e-12

    def test_lq2_unit_field(self, grid2d):
        V = grid2d.volume
        gamma = 1.4
        f = ScalarField(grid2d, np.ones(grid2d.shape))
        assert abs(lq2_norm(f, gamma) - V ** (1.0 / gamma)) <= 1e-12

    def test_lq2_equals_l2_for_small_fields(self, grid2d, rng):
        f = random_scalar(grid2d, rng)
        f = ScalarField(grid2d, 0.49 * f.values / max(np.max(np.abs(f.values)), 1e-30))
        assert abs(lq2_norm(f, 2.0) - l2_norm(f)) <= 1e-13

    def test_half_boundary_counted_in_lq_part(self, grid2d):
        f = ScalarField(grid2d, np.full(grid2d.shape, 0.5))
        V = grid2d.volume
        # all mass in the q-part: (V * 0.5^q)^(1/q) with q = 4
        assert abs(lq2_norm(f, 4.0) - 0.5 * V**0.25) <= 1e-12

    def test_lr_norm_inf(self, grid2d, rng):
        f = random_scalar(grid2d, rng)
        assert lr_norm(f, np.inf) == max_norm(f)


class TestDealiasRestrict:
    def test_dealias_removes_high_modes(self, grid2d):
        x = grid2d.coords()
        cut = grid2d.n // 3
        f = ScalarField(grid2d, np.cos((cut + 2) * x[0]) + np.cos(x[1]))
        out = dealias(f)
        expected = np.cos(x[1])
        assert np.max(np.abs(out.values - expected)) <= 1e-12

    def test_restrict_to_preserves_low_modes(self, rng):
        fine = Grid(2, 128, 2 * np.pi)
        coarse = Grid(2, 64, 2 * np.pi)
        f = random_scalar(fine, rng, kmax=5)
        down = restrict_to(f, coarse)
        # same analytic content sampled on the coarse grid
        again = restrict_to(ScalarField(fine, f.values), coarse)
        assert np.array_equal(down.values, again.values)
        assert abs(l2_norm(down) - l2_norm(f)) <= 1e-10 * l2_norm(f)

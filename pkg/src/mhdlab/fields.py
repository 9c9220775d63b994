"""Periodic uniform-grid fields and their spectral calculus.

Everything here operates on real fields sampled on a periodic box
[0, box_len)^dim discretized with n points per axis. Differential
operators act through the real FFT, so they are exact on band-limited
fields; quadrature is the plain cell sum, which is spectrally accurate
for periodic integrands.

Conventions:
  * first-derivative multipliers zero the Nyquist mode (the Nyquist
    cosine has no representable odd derivative on the real grid); the
    Laplacian is div∘grad under the same convention, so the operator
    identity holds exactly for any input;
  * the k=0 mode belongs to the solenoidal part of a vector field,
    since the inverse Laplacian is undefined there;
  * nonlinear products formed by callers should be passed through
    ``dealias`` (2/3-rule truncation).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import ConfigError, UsageError

__all__ = [
    "Grid",
    "ScalarField",
    "VectorField",
    "MollifierSpec",
    "gradient",
    "divergence",
    "curl",
    "laplacian",
    "solenoidal_part",
    "gradient_part",
    "dealias",
    "mollify",
    "l2_norm",
    "l2_inner",
    "max_norm",
    "lq2_norm",
    "lr_norm",
    "restrict_to",
]


@dataclass(eq=True)
class Grid:
    """Periodic uniform grid: ``n`` points per axis on a box of side ``box_len``."""

    dim: int
    n: int
    box_len: float

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ConfigError(f"grid dim must be 2 or 3, got {self.dim}")
        if self.n < 8 or (self.n & (self.n - 1)) != 0:
            raise ConfigError(f"grid n must be a power of two >= 8, got {self.n}")
        if not self.box_len > 0:
            raise ConfigError(f"box_len must be positive, got {self.box_len}")
        self.box_len = float(self.box_len)

    # -- geometry -----------------------------------------------------------

    @property
    def spacing(self) -> float:
        return self.box_len / self.n

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.dim

    @property
    def spectral_shape(self) -> tuple[int, ...]:
        return (self.n,) * (self.dim - 1) + (self.n // 2 + 1,)

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dim

    @property
    def volume(self) -> float:
        return self.box_len**self.dim

    @cached_property
    def axis_coords(self) -> list[np.ndarray]:
        x = np.arange(self.n) * self.spacing
        return [x.copy() for _ in range(self.dim)]

    def coords(self) -> list[np.ndarray]:
        """Meshgrid coordinate arrays (ij indexing), one per axis."""
        return list(np.meshgrid(*self.axis_coords, indexing="ij"))

    # -- spectral machinery --------------------------------------------------

    @cached_property
    def _k_int(self) -> list[np.ndarray]:
        """Integer wavenumbers per axis, broadcast to the rfftn layout."""
        out = []
        for axis in range(self.dim):
            if axis == self.dim - 1:
                k = np.arange(self.n // 2 + 1, dtype=np.float64)
            else:
                k = np.fft.fftfreq(self.n, d=1.0 / self.n)
            shape = [1] * self.dim
            shape[axis] = k.size
            out.append(k.reshape(shape))
        return out

    @cached_property
    def k_deriv(self) -> list[np.ndarray]:
        """Physical wavenumbers for first derivatives (Nyquist zeroed)."""
        scale = 2.0 * np.pi / self.box_len
        out = []
        for k in self._k_int:
            kd = k.copy()
            kd[np.abs(kd) == self.n // 2] = 0.0
            out.append(scale * kd)
        return out

    @cached_property
    def k2(self) -> np.ndarray:
        """|k|^2 under the derivative convention (div∘grad multiplier is -k2)."""
        k2 = np.zeros(self.spectral_shape)
        for kd in self.k_deriv:
            k2 = k2 + kd**2
        return k2

    @cached_property
    def inv_k2(self) -> np.ndarray:
        """1/|k|^2 with the k=0 (and Nyquist-only) modes set to zero."""
        k2 = self.k2
        out = np.zeros_like(k2)
        np.divide(1.0, k2, out=out, where=k2 > 0)
        return out

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        """2/3-rule mask: keep |k_int| <= n//3 on every axis."""
        cut = self.n // 3
        mask = np.ones(self.spectral_shape, dtype=bool)
        for k in self._k_int:
            mask &= np.abs(k) <= cut
        return mask

    @cached_property
    def parseval_weights(self) -> np.ndarray:
        """Multiplicities of rfftn modes in the full spectrum (last axis halved)."""
        k_last = np.arange(self.n // 2 + 1)
        w = np.full(k_last.size, 2.0)
        w[0] = 1.0
        w[-1] = 1.0
        shape = [1] * self.dim
        shape[-1] = w.size
        return w.reshape(shape)

    def fft(self, values: np.ndarray) -> np.ndarray:
        return np.fft.rfftn(values)

    def ifft(self, spectrum: np.ndarray) -> np.ndarray:
        return np.fft.irfftn(spectrum, s=self.shape, axes=range(self.dim))

    def spectral_norm_sq(self, spectrum: np.ndarray) -> float:
        """∫|f|^2 evaluated from an rfftn spectrum (Plancherel)."""
        total = float(np.sum(self.parseval_weights * np.abs(spectrum) ** 2))
        return total * self.volume / self.n ** (2 * self.dim)


def _check_values(grid: Grid, values: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=np.float64)
    if values.shape != grid.shape:
        raise UsageError(f"field shape {values.shape} does not match grid {grid.shape}")
    if not np.isfinite(values).all():
        raise UsageError("field contains NaN/Inf")
    return values


@dataclass(eq=False)
class ScalarField:
    """Real scalar samples on a grid, with a lazily cached rfftn spectrum."""

    grid: Grid
    values: np.ndarray
    _spectrum: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        self.values = _check_values(self.grid, self.values)

    @classmethod
    def from_spectrum(cls, grid: Grid, spectrum: np.ndarray) -> "ScalarField":
        f = cls(grid, grid.ifft(spectrum))
        f._spectrum = np.asarray(spectrum, dtype=np.complex128)
        return f

    def spectrum(self) -> np.ndarray:
        if self._spectrum is None:
            self._spectrum = self.grid.fft(self.values)
        return self._spectrum

    def mean(self) -> float:
        return float(self.values.mean())

    # fields behave as immutable values; arithmetic returns new fields
    def __add__(self, other):
        return ScalarField(self.grid, self.values + _scalar_operand(self, other))

    def __radd__(self, other):
        return self.__add__(other)

    def __sub__(self, other):
        return ScalarField(self.grid, self.values - _scalar_operand(self, other))

    def __rsub__(self, other):
        return ScalarField(self.grid, _scalar_operand(self, other) - self.values)

    def __mul__(self, other):
        return ScalarField(self.grid, self.values * _scalar_operand(self, other))

    def __rmul__(self, other):
        return self.__mul__(other)

    def __neg__(self):
        return ScalarField(self.grid, -self.values)


def _scalar_operand(f: ScalarField, other) -> np.ndarray | float:
    if isinstance(other, ScalarField):
        if other.grid != f.grid:
            raise UsageError("fields live on different grids")
        return other.values
    return float(other)


@dataclass(eq=False)
class VectorField:
    """dim-component vector field; all components share one grid."""

    grid: Grid
    components: tuple[ScalarField, ...]

    def __post_init__(self):
        self.components = tuple(self.components)
        if len(self.components) != self.grid.dim:
            raise UsageError(
                f"expected {self.grid.dim} components, got {len(self.components)}"
            )
        for c in self.components:
            if c.grid != self.grid:
                raise UsageError("vector components live on different grids")

    @classmethod
    def from_arrays(cls, grid: Grid, arrays) -> "VectorField":
        return cls(grid, tuple(ScalarField(grid, a) for a in arrays))

    @property
    def arrays(self) -> list[np.ndarray]:
        return [c.values for c in self.components]

    def __getitem__(self, i: int) -> ScalarField:
        return self.components[i]

    def dot(self, other: "VectorField") -> ScalarField:
        vals = sum(a.values * b.values for a, b in zip(self.components, other.components))
        return ScalarField(self.grid, vals)

    def magnitude_sq(self) -> ScalarField:
        return self.dot(self)

    def __add__(self, other: "VectorField"):
        return VectorField(self.grid, tuple(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other: "VectorField"):
        return VectorField(self.grid, tuple(a - b for a, b in zip(self.components, other.components)))

    def __mul__(self, other):
        return VectorField(self.grid, tuple(c * other for c in self.components))

    def __rmul__(self, other):
        return self.__mul__(other)

    def __neg__(self):
        return VectorField(self.grid, tuple(-c for c in self.components))


# -- differential operators ---------------------------------------------------


def gradient(f: ScalarField) -> VectorField:
    """Spectral gradient: component j has spectrum i*k_j*f̂."""
    g = f.grid
    spec = f.spectrum()
    comps = [ScalarField.from_spectrum(g, 1j * kj * spec) for kj in g.k_deriv]
    return VectorField(g, tuple(comps))


def divergence(v: VectorField) -> ScalarField:
    g = v.grid
    out = np.zeros(g.spectral_shape, dtype=np.complex128)
    for kj, c in zip(g.k_deriv, v.components):
        out += 1j * kj * c.spectrum()
    return ScalarField.from_spectrum(g, out)


def curl(v: VectorField):
    """Spectral curl: vector in 3D, the scalar ∂x v1 - ∂y v0 in 2D."""
    g = v.grid
    k = g.k_deriv
    s = [c.spectrum() for c in v.components]
    if g.dim == 2:
        return ScalarField.from_spectrum(g, 1j * k[0] * s[1] - 1j * k[1] * s[0])
    comps = (
        ScalarField.from_spectrum(g, 1j * k[1] * s[2] - 1j * k[2] * s[1]),
        ScalarField.from_spectrum(g, 1j * k[2] * s[0] - 1j * k[0] * s[2]),
        ScalarField.from_spectrum(g, 1j * k[0] * s[1] - 1j * k[1] * s[0]),
    )
    return VectorField(g, comps)


def laplacian(f):
    """Spectrum multiplied by -|k|^2 (scalar or componentwise on vectors)."""
    if isinstance(f, VectorField):
        return VectorField(f.grid, tuple(laplacian(c) for c in f.components))
    g = f.grid
    return ScalarField.from_spectrum(g, -g.k2 * f.spectrum())


def gradient_part(v: VectorField) -> VectorField:
    """Curl-free (gradient) part: ∇Δ⁻¹(div v); the k=0 mode is excluded."""
    g = v.grid
    s = [c.spectrum() for c in v.components]
    div = sum(1j * kj * sj for kj, sj in zip(g.k_deriv, s))
    phi = -g.inv_k2 * div  # Δ⁻¹ (div v)
    comps = [ScalarField.from_spectrum(g, 1j * kj * phi) for kj in g.k_deriv]
    return VectorField(g, tuple(comps))


def solenoidal_part(v: VectorField) -> VectorField:
    """Divergence-free part: v minus its gradient part (k=0 mode included here)."""
    q = gradient_part(v)
    return VectorField(
        v.grid,
        tuple(
            ScalarField(v.grid, a.values - b.values)
            for a, b in zip(v.components, q.components)
        ),
    )


def dealias(f):
    """2/3-rule truncation of the spectrum (apply to nonlinear products)."""
    if isinstance(f, VectorField):
        return VectorField(f.grid, tuple(dealias(c) for c in f.components))
    g = f.grid
    return ScalarField.from_spectrum(g, f.spectrum() * g.dealias_mask)


# -- mollifier ---------------------------------------------------------------


@dataclass(frozen=True)
class MollifierSpec:
    """Smooth nonnegative unit-mass kernel of width delta."""

    delta: float
    kind: str = "bump"

    def __post_init__(self):
        if self.kind not in ("bump", "gaussian_truncated"):
            raise ConfigError(f"unknown mollifier kind {self.kind!r}")
        if not self.delta > 0:
            raise ConfigError("mollifier delta must be positive")


_multiplier_cache: dict[tuple, np.ndarray] = {}


def mollifier_kernel(grid: Grid, spec: MollifierSpec) -> np.ndarray:
    """Discrete kernel sampled with periodic min-image distance, mass 1."""
    if not spec.delta < grid.box_len / 4:
        raise ConfigError(
            f"mollifier delta {spec.delta} must be < box_len/4 = {grid.box_len / 4}"
        )
    n, h = grid.n, grid.spacing
    ax = np.minimum(np.arange(n), n - np.arange(n)) * h
    dist_sq = np.zeros(grid.shape)
    for axis in range(grid.dim):
        shape = [1] * grid.dim
        shape[axis] = n
        dist_sq = dist_sq + ax.reshape(shape) ** 2
    if spec.kind == "bump":
        r2 = dist_sq / spec.delta**2
        w = np.zeros(grid.shape)
        inside = r2 < 1.0
        w[inside] = np.exp(-1.0 / (1.0 - r2[inside]))
    else:
        s = spec.delta / 3.0
        w = np.exp(-dist_sq / (2.0 * s * s))
        w[dist_sq > spec.delta**2] = 0.0
    total = w.sum() * grid.cell_volume
    if total <= 0:
        raise ConfigError("mollifier kernel vanished on this grid (delta too small?)")
    return w / total


def mollifier_multiplier(grid: Grid, spec: MollifierSpec) -> np.ndarray:
    """Fourier multiplier of the kernel; k=0 entry pinned to exactly 1."""
    key = (grid.dim, grid.n, grid.box_len, spec.delta, spec.kind)
    mult = _multiplier_cache.get(key)
    if mult is None:
        kernel = mollifier_kernel(grid, spec)
        mult = np.real(grid.fft(kernel)) * grid.cell_volume
        mult[(0,) * grid.dim] = 1.0
        _multiplier_cache[key] = mult
    return mult


def mollify(f, spec: MollifierSpec):
    """Convolve with the discrete kernel (exact circular convolution)."""
    if isinstance(f, VectorField):
        return VectorField(f.grid, tuple(mollify(c, spec) for c in f.components))
    mult = mollifier_multiplier(f.grid, spec)
    return ScalarField.from_spectrum(f.grid, mult * f.spectrum())


# -- reductions ---------------------------------------------------------------


def _all_values(f) -> list[np.ndarray]:
    if isinstance(f, VectorField):
        return f.arrays
    return [f.values]


def l2_norm(f) -> float:
    """sqrt(∫|f|^2) by cell-sum quadrature (scalar or vector)."""
    g = f.grid
    total = sum(float(np.sum(v * v)) for v in _all_values(f))
    return float(np.sqrt(total * g.cell_volume))


def l2_inner(f, other) -> float:
    g = f.grid
    a, b = _all_values(f), _all_values(other)
    if len(a) != len(b):
        raise UsageError("cannot take inner product of scalar and vector fields")
    total = sum(float(np.sum(x * y)) for x, y in zip(a, b))
    return total * g.cell_volume


def max_norm(f) -> float:
    return max(float(np.max(np.abs(v))) for v in _all_values(f))


def lr_norm(f, r: float) -> float:
    """Spatial L^r norm; r=inf gives the max norm."""
    if np.isinf(r):
        return max_norm(f)
    g = f.grid
    total = sum(float(np.sum(np.abs(v) ** r)) for v in _all_values(f))
    return float((total * g.cell_volume) ** (1.0 / r))


def lq2_norm(f: ScalarField, q: float) -> float:
    """Mixed norm: L2 where |f| < 1/2 plus L^q where |f| >= 1/2.

    Points with |f| exactly 1/2 are counted in the L^q part.
    """
    if q < 1:
        raise UsageError(f"lq2_norm needs q >= 1, got {q}")
    v = np.abs(f.values)
    small = v < 0.5
    vol = f.grid.cell_volume
    small_part = float(np.sqrt(np.sum(v[small] ** 2) * vol))
    large = v[~small]
    large_part = float((np.sum(large**q) * vol) ** (1.0 / q)) if large.size else 0.0
    return small_part + large_part


# -- grid transfer -------------------------------------------------------------


def restrict_to(f, coarse: Grid):
    """Spectral truncation of a fine-grid field onto a coarser grid.

    Used by the refined-reference mode; assumes both grids span the same box.
    The coarse Nyquist planes are zeroed (states are dealiased well inside).
    """
    if isinstance(f, VectorField):
        return VectorField(coarse, tuple(restrict_to(c, coarse) for c in f.components))
    fine = f.grid
    if coarse.dim != fine.dim or coarse.box_len != fine.box_len:
        raise UsageError("restrict_to requires same dim and box_len")
    if coarse.n > fine.n:
        raise UsageError("restrict_to goes fine -> coarse")
    if coarse.n == fine.n:
        return ScalarField(coarse, f.values.copy())
    spec = f.spectrum()
    nc = coarse.n
    sel: list[np.ndarray] = []
    for axis in range(fine.dim - 1):
        idx = np.concatenate([np.arange(0, nc // 2), np.arange(fine.n - nc // 2, fine.n)])
        sel.append(idx)
    sel.append(np.arange(0, nc // 2 + 1))
    sub = spec
    for axis, idx in enumerate(sel):
        sub = np.take(sub, idx, axis=axis)
    sub = sub * (coarse.n**coarse.dim / fine.n**fine.dim)
    # zero coarse Nyquist planes: they fold fine content ambiguously
    for axis in range(coarse.dim):
        nyq = nc // 2
        index = [slice(None)] * coarse.dim
        index[axis] = nyq
        sub[tuple(index)] = 0.0
    return ScalarField.from_spectrum(coarse, sub)

"""Pseudo-spectral lab for the low-Mach, vanishing-viscosity limit of
compressible MHD: coupled compressible/ideal/acoustic solvers and
modulated-energy convergence sweeps."""

from .acoustic import (
    AcousticState,
    dispersion_probe,
    init_corrector,
    isometry_check,
    momentum_projection_gap,
    propagate,
)
from .compressible import (
    CompressibleState,
    EnergyRecord,
    LambdaPolicy,
    PhysParams,
    check_energy_inequality,
    energy_dissipation,
    energy_total,
    rhs,
    rhs_terms,
    step,
    velocity,
)
from .config import RunConfig
from .errors import (
    CFLViolationError,
    ConfigError,
    InsufficientDataError,
    MhdlabError,
    RegularityError,
    UsageError,
    VacuumError,
)
from .fields import (
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
    mollify,
    restrict_to,
    solenoidal_part,
)
from .ideal import (
    IdealState,
    cross_helicity,
    energy_ideal,
    rhs_ideal,
    step_ideal,
)
from .initial_data import acoustic_profiles, make_initial_data, orszag_tang_pair
from .modulated import (
    ModulatedComponents,
    RateReport,
    Subdomain,
    density_deviation,
    energy_density_deviation,
    fit_rate,
    modulated_components,
    pressure_excess,
    theorem_norms,
)
from .snapshots import read_snapshot, write_snapshot
from .sweep import SweepRecord, run_case, run_sweep

__version__ = "0.1.0"

"""Exception types shared across the package."""


class MhdlabError(Exception):
    """Base class for all package-specific failures."""


class ConfigError(MhdlabError):
    """Invalid configuration, grid, or operator parameters (CLI exit code 2)."""


class UsageError(MhdlabError):
    """API misuse: mismatched grids, mismatched times, wrong field kinds."""


class VacuumError(MhdlabError):
    """Density fell below the positivity floor; the run is aborted and flagged."""


class CFLViolationError(MhdlabError):
    """Requested time step exceeds the stability bound for the current state."""


class RegularityError(MhdlabError):
    """Reference-solution gradient grew past the regularity budget."""


class InsufficientDataError(MhdlabError):
    """Not enough clean sweep points to fit a convergence rate."""

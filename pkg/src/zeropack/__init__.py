"""Numerical toolkit for hyperbolic and planar zero-packing densities."""

from .dbar import (
    CorrectionResult,
    CutoffSpec,
    GapReport,
    cutoff,
    dbar_cutoff,
    equality_gap,
    minimal_correction,
    obstacle_function,
    project_polynomial,
)
from .errors import (
    ConditioningError,
    ConfigurationError,
    InvalidLatticeError,
    InvalidRegionError,
    NormalizationError,
    NumericError,
    UndefinedScaleError,
    ZeropackError,
)
from .functionals import (
    DEFAULT_RESOLUTION,
    DensityReport,
    FunctionalSpec,
    boundary_mass,
    default_delta,
    default_grid,
    density,
    density_dilated,
    discrepancy,
    ell,
    gradient,
)
from .lattice_sigma import (
    Lattice,
    QuasiperiodicCandidate,
    abrikosov_candidate,
    cell_average_density,
    lattice_normalize,
    optimal_cell_scale,
    sigma,
    theta_scan,
)
from .optimize import MinimizeResult, OptimizerConfig, degree_schedule, minimize, optimal_scale
from .poly import ComplexPolynomial, WeightedGram, dilate, gram, poly_eval
from .quadrature import (
    Annulus,
    Cell,
    Disk,
    QuadratureGrid,
    TruncatedPlane,
    build_grid,
    default_r_cut,
    integrate,
)

__version__ = "0.1.0"

__all__ = [
    "Annulus",
    "Cell",
    "ComplexPolynomial",
    "ConditioningError",
    "ConfigurationError",
    "CorrectionResult",
    "CutoffSpec",
    "DEFAULT_RESOLUTION",
    "DensityReport",
    "Disk",
    "FunctionalSpec",
    "GapReport",
    "InvalidLatticeError",
    "InvalidRegionError",
    "Lattice",
    "MinimizeResult",
    "NormalizationError",
    "NumericError",
    "OptimizerConfig",
    "QuadratureGrid",
    "QuasiperiodicCandidate",
    "TruncatedPlane",
    "UndefinedScaleError",
    "WeightedGram",
    "ZeropackError",
    "abrikosov_candidate",
    "boundary_mass",
    "build_grid",
    "cell_average_density",
    "cutoff",
    "dbar_cutoff",
    "default_delta",
    "default_grid",
    "default_r_cut",
    "degree_schedule",
    "density",
    "density_dilated",
    "dilate",
    "discrepancy",
    "ell",
    "equality_gap",
    "gradient",
    "gram",
    "integrate",
    "lattice_normalize",
    "minimal_correction",
    "minimize",
    "obstacle_function",
    "optimal_cell_scale",
    "optimal_scale",
    "poly_eval",
    "project_polynomial",
    "sigma",
    "theta_scan",
    "__version__",
]

"""Theta series on tube domains over symmetric cones.

Certified evaluation of theta_Lambda(z, u) for a special representation of a
Euclidean Jordan algebra, exact lattice tools, and numerical checks of the
periodicity and transformation identities.
"""
from . import kernels
from .errors import (
    BudgetExceeded,
    ConfigError,
    DescriptorMismatch,
    DomainError,
    NotInvertibleError,
    TubeThetaError,
    UnsupportedConfiguration,
)
from .jordan import (
    AlgebraDescriptor,
    AlgebraElement,
    Custom,
    DirectSum,
    HermComplex,
    RealLine,
    SpinFactor,
    SymReal,
    cone_contains,
    cone_status,
    determinant,
    inverse,
    jordan_product,
    trace_form,
    unit,
)
from .lattice import (
    Lattice,
    PeriodLattice,
    covolume,
    dual_lattice,
    enumerate_ellipsoid,
    iter_ellipsoid,
    period_lattice,
    transform_lattice,
)
from .representation import (
    RawRepresentation,
    RepresentationConfig,
    custom_representation,
    natural_representation,
    normalize_basepoint,
    reduce_domain,
    s_form,
    siegel_contains,
    tube_contains,
)
from .theta import ThetaEvaluation, fourier_coefficient, tail_radius, theta_eval
from .verify import IdentityCheck, h_factor

__version__ = "0.1.0"

__all__ = [
    "AlgebraDescriptor",
    "AlgebraElement",
    "BudgetExceeded",
    "ConfigError",
    "Custom",
    "DescriptorMismatch",
    "DirectSum",
    "DomainError",
    "HermComplex",
    "IdentityCheck",
    "Lattice",
    "NotInvertibleError",
    "PeriodLattice",
    "RawRepresentation",
    "RealLine",
    "RepresentationConfig",
    "SpinFactor",
    "SymReal",
    "ThetaEvaluation",
    "TubeThetaError",
    "UnsupportedConfiguration",
    "cone_contains",
    "cone_status",
    "covolume",
    "custom_representation",
    "determinant",
    "dual_lattice",
    "enumerate_ellipsoid",
    "fourier_coefficient",
    "h_factor",
    "inverse",
    "iter_ellipsoid",
    "jordan_product",
    "kernels",
    "natural_representation",
    "normalize_basepoint",
    "period_lattice",
    "reduce_domain",
    "s_form",
    "siegel_contains",
    "tail_radius",
    "theta_eval",
    "trace_form",
    "transform_lattice",
    "tube_contains",
    "unit",
]

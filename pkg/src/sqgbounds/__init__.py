"""Critical SQG on a Dirichlet rectangle: spectral solver and inequality certification."""

from sqgbounds.spectral import (
    DomainSpec,
    GridField,
    SpectralField,
    Spectrum,
    VelocityField,
    apply_fractional_laplacian,
    apply_inverse_sqrt_laplacian,
    distance_grid,
    distance_to_boundary,
    eigenmode,
    from_spectral,
    gradient,
    riesz_velocity,
    to_spectral,
)
from sqgbounds.reports import BoundFitReport

__all__ = [
    "DomainSpec",
    "GridField",
    "SpectralField",
    "Spectrum",
    "VelocityField",
    "BoundFitReport",
    "apply_fractional_laplacian",
    "apply_inverse_sqrt_laplacian",
    "distance_grid",
    "distance_to_boundary",
    "eigenmode",
    "from_spectral",
    "gradient",
    "riesz_velocity",
    "to_spectral",
]

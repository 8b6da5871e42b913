"""Synthetic test fields: the standard bump datum and seeded smooth fields."""

from __future__ import annotations

import numpy as np

from sqgbounds.spectral import DomainSpec, GridField, SpectralField, from_spectral

__all__ = ["gaussian_bump", "random_smooth_field", "ones_field"]


def gaussian_bump(domain: DomainSpec, amplitude: float = 1.0,
                  sigma: float | None = None, center=None) -> GridField:
    """Centered Gaussian bump; the default width min(L)/16 keeps boundary
    values below 1e-13 * amplitude, so the datum is compactly supported at
    working precision."""
    if sigma is None:
        sigma = min(domain.L1, domain.L2) / 16.0
    if center is None:
        center = (domain.L1 / 2.0, domain.L2 / 2.0)
    X, Y = domain.meshgrid()
    r2 = (X - center[0]) ** 2 + (Y - center[1]) ** 2
    return GridField(domain, amplitude * np.exp(-r2 / (2.0 * sigma ** 2)))


def random_smooth_field(domain: DomainSpec, seed: int = 0, band: int = 24,
                        decay: float = 6.0, amplitude: float = 1.0) -> GridField:
    """Seeded random field with Gaussian-decaying sine coefficients.

    The coefficient recipe is fixed on modes <= band, so the same seed gives
    the same continuum function at every resolution N >= band (the tool for
    refinement-stability checks).
    """
    if band > min(domain.N1, domain.N2):
        raise ValueError("band exceeds the grid's mode count")
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal((band, band))
    j = np.arange(1, band + 1)
    weight = np.exp(-(j[:, None] ** 2 + j[None, :] ** 2) / (2.0 * decay ** 2))
    coeffs = np.zeros((domain.N1, domain.N2))
    coeffs[:band, :band] = raw * weight
    g = from_spectral(SpectralField(domain, coeffs))
    scale = np.abs(g.values).max()
    return GridField(domain, amplitude * g.values / (scale if scale > 0 else 1.0))


def ones_field(domain: DomainSpec) -> GridField:
    """The constant 1 sampled on the interior grid (boundary value still 0)."""
    return GridField(domain, np.ones((domain.N1, domain.N2)))

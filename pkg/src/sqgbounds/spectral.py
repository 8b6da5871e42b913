"""Exact Dirichlet spectral calculus on a rectangle.

Fields that vanish on the boundary of a rectangle (0,L1)x(0,L2) are
represented by their coefficients in the sine eigenbasis of the Dirichlet
Laplacian,

    w_{jk}(x,y) = sqrt(2/L1) sin(j pi x / L1) * sqrt(2/L2) sin(k pi y / L2),
    -Delta w_{jk} = lam_{jk} w_{jk},   lam_{jk} = (j pi/L1)^2 + (k pi/L2)^2.

Grid values live on the interior collocation points x_i = i L1/(N1+1),
i = 1..N1 (same in y), which makes the type-I discrete sine transform an
exact change of basis: a field with modes <= (N1, N2) is recovered
pointwise from its coefficients and vice versa.

Fractional powers Lambda^s = (-Delta)^{s/2}, the inverse Lambda^{-1},
gradients (cosine series, evaluated on the same grid) and the Riesz
velocity u = grad^perp Lambda^{-1} theta are all diagonal or termwise in
this basis.  All values are real; results are deterministic up to
floating-point reassociation inside the FFTs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft

__all__ = [
    "DomainSpec",
    "Spectrum",
    "SpectralField",
    "GridField",
    "VelocityField",
    "to_spectral",
    "from_spectral",
    "evaluate_closed",
    "apply_fractional_laplacian",
    "apply_inverse_sqrt_laplacian",
    "gradient",
    "gradient_closed",
    "pad_spectrum",
    "second_derivatives",
    "riesz_velocity",
    "distance_to_boundary",
    "distance_grid",
    "eigenmode",
    "grid_norm_l2",
    "spectral_norm_l2",
    "sobolev_norm",
]


@dataclass(frozen=True)
class DomainSpec:
    """Rectangle (0,L1)x(0,L2) with N1 x N2 interior sine modes.

    Collocation points are x_i = i*L1/(N1+1), i = 1..N1 (strictly interior,
    DST-I convention); the implied boundary value of every field is 0.
    """

    L1: float
    L2: float
    N1: int
    N2: int

    def __post_init__(self):
        if not (self.L1 > 0 and self.L2 > 0):
            raise ValueError("side lengths must be positive")
        if self.N1 < 4 or self.N2 < 4:
            raise ValueError("need at least 4 modes per direction")

    @property
    def dx(self) -> float:
        return self.L1 / (self.N1 + 1)

    @property
    def dy(self) -> float:
        return self.L2 / (self.N2 + 1)

    @property
    def x(self) -> np.ndarray:
        """Interior collocation abscissae in the first direction."""
        return np.arange(1, self.N1 + 1) * self.dx

    @property
    def y(self) -> np.ndarray:
        return np.arange(1, self.N2 + 1) * self.dy

    def meshgrid(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.x, self.y, indexing="ij")

    def refined(self, factor: int) -> "DomainSpec":
        """Domain with `factor`-times finer spacing; the coarse collocation
        points are the refined points with indices divisible by `factor`."""
        return DomainSpec(self.L1, self.L2, factor * (self.N1 + 1) - 1, factor * (self.N2 + 1) - 1)


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues and normalization constants of -Delta on the rectangle."""

    domain: DomainSpec
    eigenvalues: np.ndarray = field(init=False)

    def __post_init__(self):
        d = self.domain
        j = np.arange(1, d.N1 + 1) * np.pi / d.L1
        k = np.arange(1, d.N2 + 1) * np.pi / d.L2
        object.__setattr__(self, "eigenvalues", j[:, None] ** 2 + k[None, :] ** 2)

    @property
    def lambda_min(self) -> float:
        return float(self.eigenvalues[0, 0])

    @property
    def sine_norm(self) -> float:
        """Prefactor of the unit-L2 eigenfunctions, 2/sqrt(L1*L2)."""
        return 2.0 / np.sqrt(self.domain.L1 * self.domain.L2)


def _check_domain(a, b):
    if a.domain != b.domain:
        raise ValueError("domain mismatch between fields")


@dataclass(frozen=True)
class SpectralField:
    """Sine coefficients a_{jk} (j,k = 1..N) of a field vanishing on the boundary."""

    domain: DomainSpec
    coeffs: np.ndarray

    def __post_init__(self):
        if self.coeffs.shape != (self.domain.N1, self.domain.N2):
            raise ValueError("coefficient matrix does not match domain mode counts")

    def copy(self) -> "SpectralField":
        return SpectralField(self.domain, self.coeffs.copy())


@dataclass(frozen=True)
class GridField:
    """Point values on the interior collocation grid (boundary value is 0)."""

    domain: DomainSpec
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (self.domain.N1, self.domain.N2):
            raise ValueError("value matrix does not match domain grid")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("grid field contains non-finite values")

    def max_abs(self) -> float:
        return float(np.abs(self.values).max())


@dataclass(frozen=True)
class VelocityField:
    u1: GridField
    u2: GridField

    def __post_init__(self):
        _check_domain(self.u1, self.u2)

    @property
    def domain(self) -> DomainSpec:
        return self.u1.domain

    def max_speed(self) -> float:
        return float(np.sqrt(self.u1.values ** 2 + self.u2.values ** 2).max())


# ---------------------------------------------------------------------------
# transforms

def _sine_synth(arr: np.ndarray, axis: int) -> np.ndarray:
    # sum_j a_j sin(pi j i/(N+1)) for i = 1..N
    return sfft.dst(arr, type=1, axis=axis) / 2.0


def _cosine_synth_closed(arr: np.ndarray, axis: int) -> np.ndarray:
    # sum_j a_j cos(pi j i/(N+1)) for i = 0..N+1 (boundary rows included)
    shape = list(arr.shape)
    shape[axis] += 2
    padded = np.zeros(shape, dtype=arr.dtype)
    sl = [slice(None)] * arr.ndim
    sl[axis] = slice(1, -1)
    padded[tuple(sl)] = arr / 2.0
    return sfft.dct(padded, type=1, axis=axis)


def to_spectral(g: GridField) -> SpectralField:
    """Sine-transform grid values into eigenbasis coefficients."""
    d = g.domain
    s = _sine_synth(_sine_synth(g.values, 0), 1)
    norm = np.sqrt(d.L1 * d.L2) / ((d.N1 + 1) * (d.N2 + 1))
    return SpectralField(d, s * 2.0 * norm)


def from_spectral(a: SpectralField) -> GridField:
    """Evaluate the sine series on the interior collocation grid."""
    d = a.domain
    pref = 2.0 / np.sqrt(d.L1 * d.L2)
    return GridField(d, pref * _sine_synth(_sine_synth(a.coeffs, 0), 1))


def evaluate_closed(a: SpectralField) -> np.ndarray:
    """Values on the closed (N1+2) x (N2+2) grid, boundary rows exactly 0."""
    d = a.domain
    out = np.zeros((d.N1 + 2, d.N2 + 2))
    out[1:-1, 1:-1] = from_spectral(a).values
    return out


# ---------------------------------------------------------------------------
# functional calculus

def apply_fractional_laplacian(a: SpectralField, s: float) -> SpectralField:
    """Multiply coefficient jk by lam_{jk}^{s/2}; s must lie in [0, 2]."""
    if not 0.0 <= s <= 2.0:
        raise ValueError(f"fractional order s={s} outside [0, 2]")
    lam = Spectrum(a.domain).eigenvalues
    return SpectralField(a.domain, a.coeffs * lam ** (s / 2.0))


def apply_inverse_sqrt_laplacian(a: SpectralField) -> SpectralField:
    """Inverse of the half Laplacian: divide coefficient jk by lam_{jk}^{1/2}."""
    lam = Spectrum(a.domain).eigenvalues
    return SpectralField(a.domain, a.coeffs / np.sqrt(lam))


def gradient(a: SpectralField) -> tuple[GridField, GridField]:
    """Termwise derivative of the sine series, on the interior grid.

    The x-derivative turns sin(j pi x/L1) into (j pi/L1) cos(j pi x/L1), so
    the result leaves the sine basis and is returned as grid values.
    """
    gx, gy = gradient_closed(a)
    d = a.domain
    return GridField(d, gx[1:-1, 1:-1]), GridField(d, gy[1:-1, 1:-1])


def gradient_closed(a: SpectralField) -> tuple[np.ndarray, np.ndarray]:
    """Gradient evaluated on the closed grid (boundary rows included)."""
    d = a.domain
    pref = 2.0 / np.sqrt(d.L1 * d.L2)
    jfac = np.arange(1, d.N1 + 1)[:, None] * np.pi / d.L1
    kfac = np.arange(1, d.N2 + 1)[None, :] * np.pi / d.L2

    gx = _cosine_synth_closed(_sine_synth(a.coeffs * jfac, 1), 0) * pref
    gx = np.pad(gx, ((0, 0), (1, 1)))  # sine factor in y vanishes on y-walls

    gy = _cosine_synth_closed(_sine_synth(a.coeffs * kfac, 0).T, 0).T * pref
    gy = np.pad(gy, ((1, 1), (0, 0)))
    return gx, gy


def second_derivatives(a: SpectralField) -> tuple[GridField, GridField, GridField]:
    """(f_xx, f_xy, f_yy) on the interior grid, by termwise differentiation."""
    d = a.domain
    pref = 2.0 / np.sqrt(d.L1 * d.L2)
    jfac = np.arange(1, d.N1 + 1)[:, None] * np.pi / d.L1
    kfac = np.arange(1, d.N2 + 1)[None, :] * np.pi / d.L2
    fxx = from_spectral(SpectralField(d, -a.coeffs * jfac ** 2))
    fyy = from_spectral(SpectralField(d, -a.coeffs * kfac ** 2))
    mixed = _cosine_synth_closed(
        _cosine_synth_closed(a.coeffs * jfac * kfac, 0).T, 0).T * pref
    fxy = GridField(d, mixed[1:-1, 1:-1])
    return fxx, fxy, fyy


def pad_spectrum(a: SpectralField, target: DomainSpec) -> SpectralField:
    """Embed coefficients into a domain with more modes (same rectangle).

    When the target is domain.refined(k), the coarse collocation points are a
    subset of the fine ones, so evaluating the padded spectrum is exact.
    """
    if (target.L1, target.L2) != (a.domain.L1, a.domain.L2):
        raise ValueError("padding requires the same physical rectangle")
    if target.N1 < a.domain.N1 or target.N2 < a.domain.N2:
        raise ValueError("target must have at least as many modes")
    out = np.zeros((target.N1, target.N2))
    out[: a.domain.N1, : a.domain.N2] = a.coeffs
    return SpectralField(target, out)


def riesz_velocity(theta: SpectralField) -> VelocityField:
    """u = grad^perp Lambda^{-1} theta with grad^perp = (-d/dy, d/dx).

    The stream function is a sine series vanishing on the boundary, so u is
    divergence-free and its normal component vanishes there.
    """
    psi = apply_inverse_sqrt_laplacian(theta)
    px, py = gradient(psi)
    return VelocityField(GridField(theta.domain, -py.values), GridField(theta.domain, px.values))


# ---------------------------------------------------------------------------
# geometry and norms

def distance_to_boundary(point, domain: DomainSpec) -> float:
    """Exact distance to the rectangle boundary, min over the four walls."""
    x1, x2 = point
    if not (0.0 <= x1 <= domain.L1 and 0.0 <= x2 <= domain.L2):
        raise ValueError("point outside the closed rectangle")
    return float(min(x1, domain.L1 - x1, x2, domain.L2 - x2))


def distance_grid(domain: DomainSpec) -> np.ndarray:
    """d(x) at every interior collocation point."""
    x, y = domain.x, domain.y
    dx1 = np.minimum(x, domain.L1 - x)
    dx2 = np.minimum(y, domain.L2 - y)
    return np.minimum(dx1[:, None], dx2[None, :])


def eigenmode(domain: DomainSpec, j: int, k: int) -> GridField:
    """The unit-L2 eigenfunction w_{jk} sampled on the collocation grid."""
    if not (1 <= j <= domain.N1 and 1 <= k <= domain.N2):
        raise ValueError("mode indices outside the retained band")
    pref = 2.0 / np.sqrt(domain.L1 * domain.L2)
    sx = np.sin(j * np.pi * domain.x / domain.L1)
    sy = np.sin(k * np.pi * domain.y / domain.L2)
    return GridField(domain, pref * sx[:, None] * sy[None, :])


def grid_norm_l2(g: GridField) -> float:
    """L2 norm by grid quadrature (exact for band-limited fields)."""
    d = g.domain
    return float(np.sqrt(np.sum(g.values ** 2) * d.dx * d.dy))


def spectral_norm_l2(a: SpectralField) -> float:
    return float(np.sqrt(np.sum(a.coeffs ** 2)))


def sobolev_norm(a: SpectralField, s: float) -> float:
    """Norm of the domain of Lambda^s: sqrt(sum lam^s a_{jk}^2)."""
    lam = Spectrum(a.domain).eigenvalues
    return float(np.sqrt(np.sum(lam ** s * a.coeffs ** 2)))

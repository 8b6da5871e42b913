"""Weighted interior norms, commutators and Riesz-transform bound checks.

The interior Holder seminorm weights finite differences by the distance to
the boundary,

    [f]_a = sup_x d(x)^a  sup_{0 < |h| < d(x)} |f(x+h) - f(x)| / |h|^a,

and the weighted gradient sup is sup_x d(x) |grad f(x)|.  Both are computed
as exact discrete suprema over grid-aligned displacements with recorded
argmax witnesses.

The square root of the Dirichlet Laplacian does not commute with shifts or
derivatives; the commutators are second-order objects controlled by
||theta||_inf / d(x)^2 (times |h| for the shift version).  On the periodic
torus both commutators vanish identically, which provides the
translation-invariance control case for the Dirichlet fits.

All functions here are read-only analyses of immutable snapshots.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterable

import numpy as np

from sqgbounds.dissipation import Cutoff, compute_dissipation, odd_shift
from sqgbounds.reports import BoundFitReport
from sqgbounds.spectral import (
    GridField,
    apply_fractional_laplacian,
    apply_inverse_sqrt_laplacian,
    distance_grid,
    from_spectral,
    gradient,
    second_derivatives,
    to_spectral,
)

__all__ = [
    "HolderReport",
    "CommutatorReport",
    "finite_difference",
    "holder_seminorm",
    "holder_norm",
    "weighted_holder_report",
    "holder_seminorm_bruteforce",
    "weighted_gradient_sup",
    "commutator_shift",
    "commutator_gradient",
    "torus_commutator_shift",
    "torus_commutator_gradient",
    "riesz_diff_bound_check",
    "riesz_grad_bound_check",
    "restricted_seminorm",
    "holder_evolution_monitor",
    "gradient_evolution_monitor",
]


@dataclass
class HolderReport:
    """Weighted interior Holder seminorm with its argmax witness."""

    alpha: float
    seminorm: float
    argmax_point: tuple[float, float] | None
    argmax_h: tuple[float, float] | None
    norm: float


@dataclass
class CommutatorReport:
    """Fitted commutator constant over a sweep of evaluation points."""

    kind: str
    fitted_constant: float
    passed: bool
    witness: dict[str, Any] | None = None
    extras: dict[str, Any] = field(default_factory=dict)


# ---------------------------------------------------------------------------
# finite differences

def finite_difference(f: GridField, steps: tuple[int, int]) -> tuple[GridField, np.ndarray]:
    """delta_h f = f(x+h) - f(x) for a grid-aligned h, in-domain semantics.

    Returns the difference (0 where undefined) and the validity mask: a point
    is valid when x + h lies in the closed rectangle, using the implicit
    zero boundary value when x + h falls exactly on the boundary.
    """
    m1, m2 = steps
    if steps == (0, 0):
        raise ValueError("displacement must be nonzero")
    d = f.domain
    closed = np.zeros((d.N1 + 2, d.N2 + 2))
    closed[1:-1, 1:-1] = f.values
    out = np.zeros_like(f.values)
    valid = np.zeros(f.values.shape, dtype=bool)
    i1 = np.arange(1, d.N1 + 1) + m1
    i2 = np.arange(1, d.N2 + 1) + m2
    ok1 = (i1 >= 0) & (i1 <= d.N1 + 1)
    ok2 = (i2 >= 0) & (i2 <= d.N2 + 1)
    sel1 = np.where(ok1)[0]
    sel2 = np.where(ok2)[0]
    if sel1.size and sel2.size:
        shifted = closed[np.ix_(i1[sel1], i2[sel2])]
        out[np.ix_(sel1, sel2)] = shifted - f.values[np.ix_(sel1, sel2)]
        valid[np.ix_(sel1, sel2)] = True
    return GridField(d, out), valid


# ---------------------------------------------------------------------------
# Holder seminorms

def _holder_sup(values: np.ndarray, domain, alpha: float, weighted: bool,
                stride: int = 1, max_h: float | None = None,
                min_dist: float | None = None):
    """Exact sup over sub-lattice pairs; returns (sup, argmax point, argmax h).

    The per-pair quantity is (d(x)^alpha * |f(x+h)-f(x)|) / |h|^alpha in the
    weighted case (admissible when |h| < d(x)), plain difference quotient
    otherwise.  The reduction is a max, so the result is independent of the
    loop order down to the last bit.
    """
    idx1 = np.arange(0, domain.N1, stride)
    idx2 = np.arange(0, domain.N2, stride)
    v = values[np.ix_(idx1, idx2)]
    dist = distance_grid(domain)[np.ix_(idx1, idx2)]
    dxa = dist ** alpha
    n1, n2 = v.shape
    hx, hy = domain.dx * stride, domain.dy * stride

    cap = max_h if max_h is not None else (
        dist.max() if weighted else math.hypot(domain.L1, domain.L2))
    m1max = min(n1 - 1, int(cap / hx))
    m2max = min(n2 - 1, int(cap / hy))

    best = 0.0
    arg_x = arg_h = None
    for m1 in range(-m1max, m1max + 1):
        for m2 in range(0, m2max + 1):
            if m2 == 0 and m1 <= 0:
                continue  # the reversed displacement is handled in-loop
            hlen = math.hypot(m1 * hx, m2 * hy)
            if max_h is not None and hlen > max_h:
                continue
            s1 = slice(max(0, -m1), max(0, -m1) + (n1 - abs(m1)))
            s2 = slice(0, n2 - m2)
            t1 = slice(max(0, m1), max(0, m1) + (n1 - abs(m1)))
            t2 = slice(m2, n2)
            adiff = np.abs(v[t1, t2] - v[s1, s2])
            ha = hlen ** alpha
            # base point at either end: the weight and admissibility use d(x)
            # of the base, so the two orientations differ in the weighted case
            for base, sgn in (((s1, s2), 1.0), ((t1, t2), -1.0)):
                if weighted:
                    terms = (dxa[base] * adiff) / ha
                    admissible = dist[base] > hlen
                    if min_dist is not None:
                        admissible &= dist[base] >= min_dist
                    terms = np.where(admissible, terms, 0.0)
                else:
                    terms = adiff / ha
                    if min_dist is not None:
                        terms = np.where(dist[base] >= min_dist, terms, 0.0)
                local = terms.max() if terms.size else 0.0
                if local > best:
                    best = float(local)
                    flat = int(np.argmax(terms))
                    i, j = np.unravel_index(flat, terms.shape)
                    gi = idx1[i + base[0].start]
                    gj = idx2[j + base[1].start]
                    arg_x = (domain.x[gi], domain.y[gj])
                    arg_h = (sgn * m1 * hx, sgn * m2 * hy)
                if not weighted:
                    break  # difference quotient is symmetric, one pass suffices
    return best, arg_x, arg_h


def holder_seminorm(f: GridField, alpha: float, weighted: bool = True,
                    stride: int = 1, max_h: float | None = None,
                    min_dist: float | None = None) -> float:
    if not 0.0 < alpha < 1.0:
        raise ValueError("holder exponent must lie in (0, 1)")
    sup, _, _ = _holder_sup(f.values, f.domain, alpha, weighted, stride, max_h, min_dist)
    return sup


def holder_norm(f: GridField, alpha: float, weighted: bool = True) -> float:
    """||f||_inf + seminorm (weighted interior or uniform, per flag)."""
    return f.max_abs() + holder_seminorm(f, alpha, weighted=weighted)


def weighted_holder_report(f: GridField, alpha: float, stride: int = 1) -> HolderReport:
    if not 0.0 < alpha < 1.0:
        raise ValueError("holder exponent must lie in (0, 1)")
    sup, arg_x, arg_h = _holder_sup(f.values, f.domain, alpha, weighted=True, stride=stride)
    if stride == 1 and arg_x is None and f.max_abs() > 0:
        raise ValueError("grid too coarse: no admissible pairs with |h| < d(x)")
    return HolderReport(alpha=alpha, seminorm=sup, argmax_point=arg_x,
                        argmax_h=arg_h, norm=f.max_abs() + sup)


def holder_seminorm_bruteforce(f: GridField, alpha: float, stride: int = 1) -> float:
    """Exhaustive enumeration over all ordered sub-lattice pairs.

    Per-pair arithmetic matches the optimized path exactly, so on small
    grids the two agree to the last bit (max is an exact reduction).
    """
    d = f.domain
    idx1 = np.arange(0, d.N1, stride)
    idx2 = np.arange(0, d.N2, stride)
    dist = distance_grid(d)[np.ix_(idx1, idx2)]
    dxa = dist ** alpha
    hx, hy = d.dx * stride, d.dy * stride
    v = f.values[np.ix_(idx1, idx2)]
    n1, n2 = v.shape
    best = 0.0
    for i1 in range(n1):
        for i2 in range(n2):
            for j1 in range(n1):
                for j2 in range(n2):
                    if (j1, j2) == (i1, i2):
                        continue
                    hlen = math.hypot((j1 - i1) * hx, (j2 - i2) * hy)
                    if not dist[i1, i2] > hlen:
                        continue
                    adiff = abs(v[j1, j2] - v[i1, i2])
                    term = (dxa[i1, i2] * adiff) / hlen ** alpha
                    if term > best:
                        best = float(term)
    return best


def weighted_gradient_sup(f: GridField) -> tuple[float, tuple[float, float]]:
    """sup_x d(x) |grad f(x)| over the grid, with the argmax point."""
    gx, gy = gradient(to_spectral(f))
    mag = np.hypot(gx.values, gy.values) * distance_grid(f.domain)
    i, j = np.unravel_index(int(np.argmax(mag)), mag.shape)
    return float(mag[i, j]), (f.domain.x[i], f.domain.y[j])


# ---------------------------------------------------------------------------
# commutators with the half Laplacian

def _sqrt_laplacian_grid(f: GridField) -> np.ndarray:
    return from_spectral(apply_fractional_laplacian(to_spectral(f), 1.0)).values


def commutator_shift(theta: GridField, steps: tuple[int, int],
                     cutoff: Cutoff) -> tuple[GridField, CommutatorReport]:
    """C_h(theta) = delta_h(Lambda theta) - Lambda(chi delta_h theta).

    The fit records the largest |C_h| d(x)^2 / (|h| ||theta||_inf) over
    points with d(x) >= ell.  Shifts use the odd periodic extension, which
    is the sine interpolant's own continuation across the boundary.
    """
    dom = theta.domain
    hlen = math.hypot(steps[0] * dom.dx, steps[1] * dom.dy)
    lam_theta = _sqrt_laplacian_grid(theta)
    term1 = odd_shift(lam_theta, steps) - lam_theta
    f = cutoff.chi.values * (odd_shift(theta.values, steps) - theta.values)
    term2 = _sqrt_laplacian_grid(GridField(dom, f))
    comm = GridField(dom, term1 - term2)

    dist = distance_grid(dom)
    mask = dist >= cutoff.ell
    theta_inf = theta.max_abs()
    if theta_inf == 0.0:
        report = CommutatorReport("commutator-shift", 0.0, True,
                                  extras={"ell": cutoff.ell, "h_steps": steps})
        return comm, report
    ratio = np.abs(comm.values) * dist ** 2 / (hlen * theta_inf)
    ratio = np.where(mask, ratio, 0.0)
    i, j = np.unravel_index(int(np.argmax(ratio)), ratio.shape)
    gamma0 = float(ratio[i, j])
    report = CommutatorReport(
        kind="commutator-shift",
        fitted_constant=gamma0,
        passed=bool(np.isfinite(gamma0)),
        witness={"point": (float(dom.x[i]), float(dom.y[j]))},
        extras={"ell": cutoff.ell, "h_steps": steps, "h_length": hlen},
    )
    return comm, report


def commutator_gradient(theta: GridField, cutoff: Cutoff
                        ) -> tuple[tuple[GridField, GridField], CommutatorReport]:
    """C_chi(theta) = grad(Lambda theta) - Lambda(chi grad theta), componentwise."""
    dom = theta.domain
    a = to_spectral(theta)
    g_lam = gradient(apply_fractional_laplacian(a, 1.0))
    gx, gy = gradient(a)
    lam_cx = _sqrt_laplacian_grid(GridField(dom, cutoff.chi.values * gx.values))
    lam_cy = _sqrt_laplacian_grid(GridField(dom, cutoff.chi.values * gy.values))
    c1 = GridField(dom, g_lam[0].values - lam_cx)
    c2 = GridField(dom, g_lam[1].values - lam_cy)

    dist = distance_grid(dom)
    mask = dist >= cutoff.ell
    theta_inf = theta.max_abs()
    if theta_inf == 0.0:
        return (c1, c2), CommutatorReport("commutator-gradient", 0.0, True,
                                          extras={"ell": cutoff.ell})
    mag = np.hypot(c1.values, c2.values)
    ratio = np.where(mask, mag * dist ** 2 / theta_inf, 0.0)
    i, j = np.unravel_index(int(np.argmax(ratio)), ratio.shape)
    gamma3 = float(ratio[i, j])
    report = CommutatorReport(
        kind="commutator-gradient",
        fitted_constant=gamma3,
        passed=bool(np.isfinite(gamma3)),
        witness={"point": (float(dom.x[i]), float(dom.y[j]))},
        extras={"ell": cutoff.ell},
    )
    return (c1, c2), report


def _torus_multiplier(n: int, length: float) -> np.ndarray:
    return 2.0 * np.pi * np.fft.fftfreq(n, d=length / n)


def torus_commutator_shift(values: np.ndarray, steps: tuple[int, int],
                           lengths: tuple[float, float] = (2 * np.pi, 2 * np.pi)) -> float:
    """Control case: on the torus, shifts commute with |nabla| exactly.

    Returns max |delta_h(Lambda v) - Lambda(delta_h v)|, which is pure
    roundoff (<= 1e-12 scale) because both are Fourier multipliers.
    """
    k1 = _torus_multiplier(values.shape[0], lengths[0])
    k2 = _torus_multiplier(values.shape[1], lengths[1])
    lam = np.sqrt(k1[:, None] ** 2 + k2[None, :] ** 2)
    vhat = np.fft.fft2(values)
    lam_v = np.fft.ifft2(lam * vhat).real
    a = np.roll(lam_v, (-steps[0], -steps[1]), axis=(0, 1)) - lam_v
    dv = np.roll(values, (-steps[0], -steps[1]), axis=(0, 1)) - values
    b = np.fft.ifft2(lam * np.fft.fft2(dv)).real
    return float(np.abs(a - b).max())


def torus_commutator_gradient(values: np.ndarray,
                              lengths: tuple[float, float] = (2 * np.pi, 2 * np.pi)) -> float:
    """Control case: grad and |nabla| commute spectrally on the torus."""
    k1 = _torus_multiplier(values.shape[0], lengths[0])
    k2 = _torus_multiplier(values.shape[1], lengths[1])
    lam = np.sqrt(k1[:, None] ** 2 + k2[None, :] ** 2)
    vhat = np.fft.fft2(values)
    worst = 0.0
    for mult in (1j * k1[:, None] + 0.0 * k2[None, :], 0.0 * k1[:, None] + 1j * k2[None, :]):
        a = np.fft.ifft2(lam * mult * vhat).real
        b = np.fft.ifft2(mult * lam * vhat).real
        worst = max(worst, float(np.abs(a - b).max()))
    return worst


# ---------------------------------------------------------------------------
# Riesz transform bound checks

def _strict_shift(values: np.ndarray, steps: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
    n1, n2 = values.shape
    closed = np.zeros((n1 + 2, n2 + 2))
    closed[1:-1, 1:-1] = values
    i1 = np.arange(1, n1 + 1) + steps[0]
    i2 = np.arange(1, n2 + 1) + steps[1]
    ok1 = (i1 >= 0) & (i1 <= n1 + 1)
    ok2 = (i2 >= 0) & (i2 <= n2 + 1)
    out = np.zeros_like(values)
    valid = np.outer(ok1, ok2)
    out[np.ix_(ok1, ok2)] = closed[np.ix_(i1[ok1], i2[ok2])]
    return out, valid


def riesz_diff_bound_check(theta: GridField, steps: tuple[int, int], cutoff: Cutoff,
                           rho_fraction: float = 0.5) -> BoundFitReport:
    """Fit C in |delta_h u| <= C (sqrt(rho D(f)) + ||th||_inf (|h|/d + |h|/rho) + |delta_h th|).

    rho is chosen pointwise as min(||th||_inf |h| / |delta_h th|, rho_fraction d(x)),
    floored at two grid spacings; f = chi delta_h theta and u is the Riesz velocity.
    """
    from sqgbounds.spectral import riesz_velocity

    dom = theta.domain
    hlen = math.hypot(steps[0] * dom.dx, steps[1] * dom.dy)
    theta_inf = theta.max_abs()
    dist = distance_grid(dom)
    if theta_inf == 0.0:
        return BoundFitReport("riesz-shift", 0.0, "zero field", True)

    u = riesz_velocity(to_spectral(theta))
    du1, valid1 = _strict_shift(u.u1.values, steps)
    du2, valid2 = _strict_shift(u.u2.values, steps)
    lhs = np.hypot(du1 - u.u1.values, du2 - u.u2.values)

    dtheta = odd_shift(theta.values, steps) - theta.values
    f = GridField(dom, cutoff.chi.values * dtheta)
    D = np.maximum(compute_dissipation(f, 1.0).values, 0.0)

    floor = 2.0 * max(dom.dx, dom.dy)
    with np.errstate(divide="ignore"):
        rho_data = np.where(np.abs(dtheta) > 0, theta_inf * hlen / np.abs(dtheta), np.inf)
    rho = np.maximum(np.minimum(rho_data, rho_fraction * dist), floor)

    rhs = np.sqrt(rho * D) + theta_inf * (hlen / dist + hlen / rho) + np.abs(dtheta)
    mask = (dist >= cutoff.ell) & valid1 & valid2
    ratio = np.where(mask, lhs / rhs, 0.0)
    i, j = np.unravel_index(int(np.argmax(ratio)), ratio.shape)
    c_fit = float(ratio[i, j])
    return BoundFitReport(
        inequality_id="riesz-shift",
        fitted_constant=c_fit,
        sweep_description=f"h={steps} steps, ell={cutoff.ell}, {int(mask.sum())} points",
        passed=bool(np.isfinite(c_fit)),
        witness={"point": (float(dom.x[i]), float(dom.y[j]))},
        extras={"h_length": hlen, "rho_fraction": rho_fraction},
    )


def riesz_grad_bound_check(theta: GridField, cutoff: Cutoff,
                           slope_constant: float = 1.0) -> BoundFitReport:
    """Fit C in |grad u| <= C (sqrt(rho D(f)) + ||th||_inf (1/d + 1/rho) + |grad th|).

    rho = min(1/(C5 |grad theta|), d(x)) floored at two grid spacings;
    f = chi grad theta with D summed over the two components.
    """
    dom = theta.domain
    theta_inf = theta.max_abs()
    if theta_inf == 0.0:
        return BoundFitReport("riesz-gradient", 0.0, "zero field", True)
    dist = distance_grid(dom)

    a = to_spectral(theta)
    psi = apply_inverse_sqrt_laplacian(a)
    pxx, pxy, pyy = second_derivatives(psi)
    # u = (-dpsi/dy, dpsi/dx): grad u entries are second derivatives of psi
    grad_u = np.sqrt(pxy.values ** 2 + pyy.values ** 2
                     + pxx.values ** 2 + pxy.values ** 2)

    gx, gy = gradient(a)
    grad_theta = np.hypot(gx.values, gy.values)
    D = (np.maximum(compute_dissipation(GridField(dom, cutoff.chi.values * gx.values), 1.0).values, 0.0)
         + np.maximum(compute_dissipation(GridField(dom, cutoff.chi.values * gy.values), 1.0).values, 0.0))

    floor = 2.0 * max(dom.dx, dom.dy)
    with np.errstate(divide="ignore"):
        rho_data = np.where(grad_theta > 0, 1.0 / (slope_constant * grad_theta), np.inf)
    rho = np.maximum(np.minimum(rho_data, dist), floor)

    rhs = np.sqrt(rho * D) + theta_inf * (1.0 / dist + 1.0 / rho) + grad_theta
    mask = dist >= cutoff.ell
    ratio = np.where(mask, grad_u / rhs, 0.0)
    i, j = np.unravel_index(int(np.argmax(ratio)), ratio.shape)
    c_fit = float(ratio[i, j])
    return BoundFitReport(
        inequality_id="riesz-gradient",
        fitted_constant=c_fit,
        sweep_description=f"ell={cutoff.ell}, {int(mask.sum())} points",
        passed=bool(np.isfinite(c_fit)),
        witness={"point": (float(dom.x[i]), float(dom.y[j]))},
        extras={"slope_constant": slope_constant},
    )


# ---------------------------------------------------------------------------
# trajectory monitors (read-only)

def restricted_seminorm(theta: GridField, alpha: float, ell: float) -> float:
    """sup over d(x) >= ell, 0 < |h| <= ell/16 of |delta_h theta| / |h|^alpha."""
    return holder_seminorm(theta, alpha, weighted=False, max_h=ell / 16.0, min_dist=ell)


def holder_evolution_monitor(checkpoints: Iterable[tuple[float, GridField]],
                             alpha: float, ell: float) -> dict[str, Any]:
    """Track the restricted Holder seminorm along a trajectory.

    Returns the time series, the fitted amplification Gamma with
    max_t s(t) <= Gamma (s(0) + ell^-alpha ||theta_0||_inf), and the
    smallness indicator eps = alpha ||theta_0||_inf (flagged when > 0.1).
    """
    times, series = [], []
    theta0_inf = None
    for t, snap in checkpoints:
        if theta0_inf is None:
            theta0_inf = snap.max_abs()
        times.append(t)
        series.append(restricted_seminorm(snap, alpha, ell))
    series = np.asarray(series)
    eps = alpha * (theta0_inf or 0.0)
    denom = series[0] + ell ** (-alpha) * (theta0_inf or 0.0)
    gamma = float(series.max() / denom) if denom > 0 else 0.0
    return {
        "times": np.asarray(times),
        "seminorm": series,
        "gamma": gamma,
        "epsilon": eps,
        "epsilon_small": bool(eps <= 0.1),
        "passed": bool(np.isfinite(series).all() and np.isfinite(gamma)),
    }


def gradient_evolution_monitor(checkpoints: Iterable[tuple[float, GridField]]
                               ) -> dict[str, Any]:
    """Track sup_x d(x)|grad theta| and fit Gamma1 against g(0) + (1+||th0||_inf)^4."""
    times, series = [], []
    theta0_inf = None
    for t, snap in checkpoints:
        if theta0_inf is None:
            theta0_inf = snap.max_abs()
        g, _ = weighted_gradient_sup(snap)
        times.append(t)
        series.append(g)
    series = np.asarray(series)
    denom = series[0] + (1.0 + (theta0_inf or 0.0)) ** 4
    gamma1 = float(series.max() / denom) if denom > 0 else 0.0
    return {
        "times": np.asarray(times),
        "grad_weighted": series,
        "gamma1": gamma1,
        "passed": bool(np.isfinite(series).all()),
    }

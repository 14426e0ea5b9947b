"""Closed-form limits: normalized-SIR fixed point, spectral-efficiency CDF,
and lower bounds under pilot contamination.

``rho`` below always means the limiting density of *active* mobiles (see
:func:`poissonmimo.mac.active_density`), ``c`` the ratio of potential
interferers to receive antennas, and ``alpha`` the path-loss exponent.
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from .errors import NoSolutionError, NumericError, ParameterError
from .specfun import csc_2pi_over_alpha, gauss_2f1, sin_2pi_over_alpha

_RESIDUAL_TOL = 1e-9
_BRACKET_LO = 1e-12
_BRACKET_HI = 1e12


def fixed_point_sides(beta: float, rho: float, c: float, alpha: float) -> tuple[float, float]:
    """Left and right sides of the limiting normalized-SIR equation.

    LHS = (2 pi^2 rho beta^(2/alpha) / alpha) * csc(2 pi / alpha)
    RHS = 1 + 2 (pi rho)^(2-2/alpha) beta / ((alpha-2) (c + pi rho beta)^(1-2/alpha))
            * 2F1(1-2/alpha, 1-2/alpha; 2-2/alpha; pi rho beta / (pi rho beta + c))
    """
    two_over = 2.0 / alpha
    lhs = 2.0 * math.pi**2 * rho * beta**two_over / alpha * csc_2pi_over_alpha(alpha)
    prb = math.pi * rho * beta
    z = prb / (prb + c)
    hyp = gauss_2f1(1.0 - two_over, 1.0 - two_over, 2.0 - two_over, z)
    rhs = 1.0 + (
        2.0 * (math.pi * rho) ** (2.0 - two_over) * beta
        / ((alpha - 2.0) * (c + prb) ** (1.0 - two_over))
        * hyp
    )
    return lhs, rhs


def solve_normalized_sir(rho: float, c: float, alpha: float) -> float:
    """Positive root of the limiting normalized-SIR equation.

    Brackets by scanning a log grid over [1e-12, 1e12], bisects the first
    sign change, and certifies the answer by re-evaluating both sides
    independently (relative residual below 1e-9).  Raises
    :class:`NoSolutionError` when the gap never changes sign, which happens
    when c falls below the existence threshold (roughly (pi rho)^(1-alpha/2)).
    """
    _check_inputs(rho, alpha)
    if c <= 0:
        raise ParameterError("users-per-antenna ratio c must be positive")

    def gap(beta: float) -> float:
        lhs, rhs = fixed_point_sides(beta, rho, c, alpha)
        return lhs - rhs

    grid = np.logspace(math.log10(_BRACKET_LO), math.log10(_BRACKET_HI), 241)
    values = np.array([gap(b) for b in grid])
    signs = np.sign(values)
    changes = np.flatnonzero(signs[:-1] * signs[1:] < 0)
    exact = np.flatnonzero(values == 0.0)
    if exact.size:
        return float(grid[exact[0]])
    if changes.size == 0:
        raise NoSolutionError(
            "no sign change in the bracket: gap(LHS-RHS) is "
            f"{values[0]:.6g} at beta={grid[0]:.3g} and {values[-1]:.6g} at beta={grid[-1]:.3g}"
        )
    if changes.size > 1:
        warnings.warn(
            f"{changes.size} sign changes found on the scan grid; returning the smallest root",
            stacklevel=2,
        )
    lo, hi = float(grid[changes[0]]), float(grid[changes[0] + 1])
    beta = _bisect(gap, lo, hi)
    lhs, rhs = fixed_point_sides(beta, rho, c, alpha)
    residual = abs(lhs - rhs) / abs(lhs)
    if not residual < _RESIDUAL_TOL:
        raise NumericError(f"fixed-point residual {residual:.3e} exceeds {_RESIDUAL_TOL}")
    return beta


def _bisect(func, lo: float, hi: float, max_iter: int = 200) -> float:
    f_lo = func(lo)
    for _ in range(max_iter):
        mid = math.sqrt(lo * hi)  # geometric midpoint suits the log-scale root
        f_mid = func(mid)
        if f_mid == 0.0:
            return mid
        if (f_lo < 0) == (f_mid < 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
        if hi - lo <= 4.0 * np.finfo(float).eps * hi:
            break
    return math.sqrt(lo * hi)


def normalized_sir_closed_form(rho: float, alpha: float) -> float:
    """Large-c limit of the normalized SIR: [alpha sin(2pi/alpha) / (2 pi^2 rho)]^(alpha/2)."""
    _check_inputs(rho, alpha)
    return (alpha * sin_2pi_over_alpha(alpha) / (2.0 * math.pi**2 * rho)) ** (alpha / 2.0)


def spectral_efficiency_approx(n_antennas: int, alpha: float, rho: float, r0: float) -> float:
    """Spectral efficiency of a length-r0 link in the large-array, large-c limit.

    log2(1 + [N alpha sin(2pi/alpha) / (2 pi^2 rho r0^2)]^(alpha/2)); identical
    to log2(1 + N^(alpha/2) r0^-alpha beta) with beta the closed-form limit.
    """
    _check_inputs(rho, alpha)
    if n_antennas < 1 or r0 <= 0:
        raise ParameterError("need n_antennas >= 1 and r0 > 0")
    arg = n_antennas * alpha * sin_2pi_over_alpha(alpha) / (2.0 * math.pi**2 * rho * r0**2)
    return math.log2(1.0 + arg ** (alpha / 2.0))


def spectral_efficiency_cdf(tau, n_antennas: int, alpha: float, rho: float, rho_c: float):
    """P(spectral efficiency <= tau) for a mobile uniform in the origin cell.

    exp(-(rho_c/rho) N (alpha/2pi) sin(2pi/alpha) (2^tau - 1)^(-2/alpha));
    follows from the nearest-station distance law of a Poisson process.
    """
    _check_inputs(rho, alpha)
    if rho_c <= 0:
        raise ParameterError("rho_c must be positive")
    tau = np.asarray(tau, dtype=float)
    if np.any(tau <= 0):
        raise ParameterError("tau must be positive")
    coeff = (rho_c / rho) * n_antennas * alpha / (2.0 * math.pi) * sin_2pi_over_alpha(alpha)
    out = np.exp(-coeff * np.expm1(tau * math.log(2.0)) ** (-2.0 / alpha))
    return float(out) if out.ndim == 0 else out


def outage_spectral_efficiency(
    prob: float, n_antennas: int, alpha: float, rho: float, rho_c: float
) -> float:
    """Inverse of :func:`spectral_efficiency_cdf` at a target outage probability."""
    if not 0.0 < prob < 1.0:
        raise ParameterError("probability must lie in (0, 1)")
    coeff = (rho_c / rho) * n_antennas * alpha / (2.0 * math.pi) * sin_2pi_over_alpha(alpha)
    return math.log2(1.0 + (coeff / (-math.log(prob))) ** (alpha / 2.0))


def pc_bound_from_bs(
    r0: float,
    bs_distances,
    beta: float,
    alpha: float,
    rho_c: float | None = None,
    truncation_radius: float | None = None,
) -> float:
    """Worst-case normalized-SIR lower bound under pilot contamination.

    Assumes one contaminator per foreign cell, each no closer than half its
    station's distance:  beta * r0^-2a / (r0^-a + sum_j (|B_j|/2)^-a).
    When ``rho_c`` and ``truncation_radius`` are given, the mean contribution
    of stations beyond the truncation is added to the sum:
    2 pi rho_c 2^alpha R_t^(2-alpha) / (alpha - 2).
    """
    if alpha <= 4:
        warnings.warn("contamination bound assumes a path-loss exponent above 4", stacklevel=2)
    dists = np.asarray(bs_distances, dtype=float)
    dists = dists[dists > 0.0]  # drop the origin station if present
    total = float(np.sum((dists / 2.0) ** (-alpha)))
    if rho_c is not None and truncation_radius is not None:
        total += (
            2.0 * math.pi * rho_c * 2.0**alpha * truncation_radius ** (2.0 - alpha) / (alpha - 2.0)
        )
    return beta * r0 ** (-2.0 * alpha) / (r0 ** (-alpha) + total)


def pc_bound_from_contaminators(r0: float, contaminator_distances, beta: float, alpha: float) -> float:
    """Realization-specific normalized-SIR lower bound under pilot contamination.

    Uses the actual contaminator distances (representative excluded):
    beta * r0^-2a / (r0^-a + sum_j r_j^-a).  Never below the station-based
    bound, since contaminators sit farther out than half their station's
    distance and occupy at most one slot per cell.
    """
    dists = np.asarray(contaminator_distances, dtype=float)
    if np.any(dists <= 0.0):
        raise ParameterError("contaminator distances must be positive")
    total = float(np.sum(dists ** (-alpha)))
    return beta * r0 ** (-2.0 * alpha) / (r0 ** (-alpha) + total)


def _check_inputs(rho: float, alpha: float) -> None:
    if rho <= 0:
        raise ParameterError("active density must be positive")
    if alpha <= 2:
        raise ParameterError("path-loss exponent must exceed 2")

"""Linear MMSE combining and the output SIR of the representative link.

The model is interference limited: no thermal-noise term appears anywhere,
so the interference covariance is never regularized.  Instead the builder
requires at least as many active interferers as antennas, which keeps the
matrix invertible with probability one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import NumericError, ParameterError, SingularCovarianceError

_SOLVE_RESIDUAL_TOL = 1e-10


@dataclass
class SirSample:
    """Output of one trial for one channel-knowledge mode."""

    sir: float
    norm_sir: float  # N^(-alpha/2) * r0^alpha * sir
    spectral_efficiency: float  # log2(1 + sir)
    mode: str
    r0: float
    n_antennas: int
    active_count: int
    trial: int | None = None
    seed: int | None = None


def build_covariance(distances: np.ndarray, fadings: np.ndarray, alpha: float) -> np.ndarray:
    """Interference covariance sum_j r_j^-alpha g_j g_j^H over active interferers.

    ``fadings`` holds one interferer per row.  Raises
    :class:`SingularCovarianceError` when there are fewer interferers than
    antennas (the matrix would be rank deficient).
    """
    distances = np.asarray(distances, dtype=float)
    fadings = np.asarray(fadings)
    if fadings.ndim != 2:
        raise ParameterError("fadings must be a (n_interferers, n_antennas) array")
    n_interferers, n_antennas = fadings.shape
    if len(distances) != n_interferers:
        raise ParameterError("distances and fadings disagree on the interferer count")
    if n_interferers < n_antennas:
        raise SingularCovarianceError(n_interferers, n_antennas)
    scaled = fadings.T * distances ** (-alpha / 2.0)  # columns r_j^(-a/2) g_j
    cov = scaled @ scaled.conj().T
    return 0.5 * (cov + cov.conj().T)


def mmse_weight(hhat: np.ndarray, cov: np.ndarray) -> np.ndarray:
    """Solve cov @ w = hhat via Cholesky; never forms an explicit inverse.

    Path-loss weights make the covariance poorly conditioned, so the raw
    factorized solve is polished by iterative refinement until the relative
    residual drops below 1e-10.
    """
    hhat = np.asarray(hhat)
    try:
        factor = linalg.cho_factor(cov, lower=True)
    except linalg.LinAlgError as exc:
        raise NumericError(
            f"covariance factorization failed (condition ~{np.linalg.cond(cov):.3e})"
        ) from exc
    # The path-loss weights leave cov with a huge eigenvalue spread, so both
    # the iterate and the residual are kept in extended precision: in double
    # they bottom out near eps * cond(cov), which can sit above the contract.
    cov_hi = cov.astype(np.clongdouble)
    hhat_hi = hhat.astype(np.clongdouble)
    scale = float(np.linalg.norm(hhat))
    w = linalg.cho_solve(factor, hhat).astype(np.clongdouble)
    for _ in range(12):
        defect = hhat_hi - cov_hi @ w
        residual = float(np.linalg.norm(defect.astype(complex))) / scale
        if residual < _SOLVE_RESIDUAL_TOL:
            return w
        w = w + linalg.cho_solve(factor, defect.astype(complex))
    raise NumericError(
        f"solve residual {residual:.3e} exceeds {_SOLVE_RESIDUAL_TOL} "
        f"(condition ~{np.linalg.cond(cov):.3e})"
    )


def output_sir(
    weights: np.ndarray,
    g0: np.ndarray,
    r0: float,
    distances: np.ndarray,
    fadings: np.ndarray,
    alpha: float,
    mode: str = "perfect",
    trial: int | None = None,
    seed: int | None = None,
) -> SirSample:
    """Evaluate the combiner on one realization.

    SIR = r0^-alpha |w^H g0|^2 / sum_i r_i^-alpha |w^H g_i|^2, with the sum
    running over the active interferers passed in (their powers are 1).
    """
    weights = np.asarray(weights).astype(complex)  # double is ample for the SIR ratio
    if not np.any(weights):
        raise ParameterError("weight vector is zero")
    distances = np.asarray(distances, dtype=float)
    fadings = np.asarray(fadings)
    signal = r0 ** (-alpha) * abs(np.vdot(weights, g0)) ** 2
    cross = fadings @ weights.conj()  # entries w^H g_i (conjugated)
    interference = float(np.sum(distances ** (-alpha) * np.abs(cross) ** 2))
    if interference == 0.0:
        raise NumericError("interference denominator vanished")
    sir = float(signal / interference)
    n_antennas = len(g0)
    return SirSample(
        sir=sir,
        norm_sir=n_antennas ** (-alpha / 2.0) * r0**alpha * sir,
        spectral_efficiency=math.log2(1.0 + sir),
        mode=mode,
        r0=float(r0),
        n_antennas=n_antennas,
        active_count=len(distances),
        trial=trial,
        seed=seed,
    )


def perfect_csi_normalized_sir(g0: np.ndarray, cov: np.ndarray, alpha: float) -> float:
    """Large-array normalized SIR under perfect CSI: N^(-alpha/2) g0^H R^-1 g0.

    Must agree with the norm_sir reported by :func:`output_sir` when the
    weight is the perfect-CSI MMSE solution.
    """
    w = mmse_weight(g0, cov)
    quad_form = np.vdot(g0, w)
    if abs(quad_form.imag) > 1e-8 * abs(quad_form.real):
        raise NumericError(f"quadratic form not real: {quad_form}")
    return len(g0) ** (-alpha / 2.0) * float(quad_form.real)

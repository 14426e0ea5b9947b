"""Fast fading, per-cell pilot assignment, and channel estimates.

Pilots are orthogonal within a cell and the same set of ``k`` pilots is
reused in every cell, so the representative's channel estimate is
contaminated by the other-cell mobiles holding its pilot.  Estimation noise
is neglected throughout: the training power is assumed high.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .geometry import NetworkRealization
from .mac import ActivationState

REPRESENTATIVE_PILOT = 1  # labelling convention; pilot identities are exchangeable


@dataclass
class PilotAssignment:
    """Pilot index per mobile (0 = inactive/none, 1..k otherwise).

    ``contaminators`` lists the mobiles sharing the representative's pilot,
    representative included, in increasing index order.
    """

    pilot_of: np.ndarray  # (n,) int
    contaminators: np.ndarray  # sorted mobile indices


@dataclass
class ChannelEstimate:
    vector: np.ndarray  # (n_antennas,) complex
    mode: str  # "perfect" | "pc"


def sample_fading(n_antennas: int, rng: np.random.Generator, count: int | None = None) -> np.ndarray:
    """i.i.d. CN(0,1) fading vector(s): real/imag parts are N(0, 1/2).

    Returns shape (n_antennas,) or (count, n_antennas).
    """
    if n_antennas < 1:
        raise ParameterError("n_antennas must be >= 1")
    shape = (n_antennas,) if count is None else (count, n_antennas)
    return np.sqrt(0.5) * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def assign_pilots(
    activation: ActivationState,
    realization: NetworkRealization,
    k: int,
    rng: np.random.Generator,
) -> PilotAssignment:
    """Give every active mobile a pilot, distinct within its cell.

    Each cell's active members receive a uniform random injection into
    {1, .., k}; the representative always holds pilot 1 and its cellmates
    draw from the remaining indices.
    """
    if k < 1:
        raise ParameterError("need at least one pilot")
    if int(activation.cell_active.max(initial=0)) > k:
        raise ParameterError("a cell has more active mobiles than pilots")
    cell_of = realization.cell_of
    n = len(cell_of)
    m = len(realization.base_stations)
    pilot_of = np.zeros(n, dtype=np.int64)
    rep_cell = int(cell_of[0])

    active_idx = np.flatnonzero(activation.active)
    order = active_idx[np.argsort(cell_of[active_idx], kind="stable")]
    bounds = np.searchsorted(cell_of[order], np.arange(m + 1))
    for cell in range(m):
        members = order[bounds[cell] : bounds[cell + 1]]
        if members.size == 0:
            continue
        if cell == rep_cell:
            pilot_of[0] = REPRESENTATIVE_PILOT
            others = members[members != 0]
            if others.size:
                pilot_of[others] = rng.permutation(k - 1)[: others.size] + 2
        else:
            pilot_of[members] = rng.permutation(k)[: members.size] + 1
    contaminators = np.flatnonzero(pilot_of == REPRESENTATIVE_PILOT)
    return PilotAssignment(pilot_of=pilot_of, contaminators=contaminators)


def estimate_channel(
    mode: str,
    contaminators: np.ndarray,
    realization: NetworkRealization,
    fadings: np.ndarray,
) -> ChannelEstimate:
    """Channel estimate for the representative link.

    ``perfect`` copies the representative's true fading vector.  ``pc`` forms
    the pilot-contaminated estimate sum_i r_i^(-alpha/2) g_i over the
    contamination set (all transmitters there are active, so unit power).
    ``fadings`` is indexed by mobile: shape (n_mobiles, n_antennas).
    """
    if mode == "perfect":
        return ChannelEstimate(vector=fadings[0].copy(), mode="perfect")
    if mode != "pc":
        raise ParameterError(f"unknown estimate mode {mode!r}")
    contaminators = np.asarray(contaminators, dtype=np.int64)
    if contaminators.size == 0 or 0 not in contaminators:
        raise ParameterError("contamination set must contain the representative")
    alpha = realization.params.alpha
    if alpha <= 4:
        warnings.warn(
            "pilot-contamination analysis assumes a path-loss exponent above 4",
            stacklevel=2,
        )
    dists = realization.mobile_distances()[contaminators]
    weights = dists ** (-alpha / 2.0)
    vector = (weights[:, None] * fadings[contaminators]).sum(axis=0)
    return ChannelEstimate(vector=vector, mode="pc")

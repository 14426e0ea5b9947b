"""Network geometry: Poisson base stations, mobile placement, Voronoi cells.

All coordinates live in a disk of radius ``R`` centred on the origin.  After
sampling, the whole base-station set is translated so that the station nearest
the origin sits exactly at ``(0, 0)`` and becomes index 0; cells are the
Voronoi regions of the (shifted) stations.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree

from .errors import DegenerateRealizationError, ParameterError


@dataclass(frozen=True)
class SystemParams:
    """Deployment densities and physical-layer constants for one run.

    rho_c      -- base stations per unit area
    rho_m      -- mobiles per unit area
    k_max      -- cap on simultaneously active mobiles per cell
    alpha      -- path-loss exponent (> 2; > 4 needed for contamination bounds)
    n_antennas -- antennas at the receiving base station
    radius     -- radius of the simulated disk
    """

    rho_c: float
    rho_m: float
    k_max: int
    alpha: float
    n_antennas: int
    radius: float

    def __post_init__(self):
        if self.rho_c <= 0 or self.rho_m <= 0:
            raise ParameterError("densities must be positive")
        if self.k_max < 1:
            raise ParameterError("k_max must be >= 1")
        if self.alpha <= 2:
            raise ParameterError("path-loss exponent must exceed 2")
        if self.n_antennas < 1:
            raise ParameterError("n_antennas must be >= 1")
        if self.radius <= 0:
            raise ParameterError("radius must be positive")
        if self.n_mobiles < 1:
            raise ParameterError("rho_m * pi * radius^2 rounds to zero mobiles")

    @property
    def n_mobiles(self) -> int:
        """Deterministic mobile count: round(pi * rho_m * radius^2)."""
        return int(round(math.pi * self.rho_m * self.radius**2))

    @property
    def users_per_antenna(self) -> float:
        """Diagnostic ratio n_mobiles / n_antennas (reported, never enforced)."""
        return self.n_mobiles / self.n_antennas


@dataclass
class NetworkRealization:
    """One sampled deployment.

    ``base_stations[0]`` is the origin station; ``mobiles[0]`` is the
    representative transmitter.  ``cell_of[i]`` is the index of the station
    nearest to mobile ``i`` (ties broken towards the lowest index).
    """

    params: SystemParams
    base_stations: np.ndarray  # (m, 2)
    mobiles: np.ndarray  # (n, 2)
    cell_of: np.ndarray  # (n,) int
    r0_mode: str
    r0: float | None
    resample_count: int = 0
    rejection_draws: int = 0
    seed: int | None = None

    @property
    def link_length(self) -> float:
        """Distance from the representative mobile to the origin station."""
        return float(np.hypot(self.mobiles[0, 0], self.mobiles[0, 1]))

    def mobile_distances(self) -> np.ndarray:
        """Distances of all mobiles from the origin."""
        return np.hypot(self.mobiles[:, 0], self.mobiles[:, 1])


def sample_ppp(density: float, radius: float, rng: np.random.Generator) -> np.ndarray:
    """Sample a homogeneous Poisson point process on the disk B(0, radius).

    Returns an (m, 2) array; m is Poisson with mean density*pi*radius^2 and
    the points are i.i.d. uniform on the disk.
    """
    if density <= 0 or radius <= 0:
        raise ParameterError("density and radius must be positive")
    count = int(rng.poisson(density * math.pi * radius**2))
    return _uniform_disk(count, radius, rng)


def _uniform_disk(count: int, radius: float, rng: np.random.Generator) -> np.ndarray:
    r = radius * np.sqrt(rng.random(count))
    theta = 2.0 * math.pi * rng.random(count)
    return np.column_stack((r * np.cos(theta), r * np.sin(theta)))


def nearest_cell(points: np.ndarray, base_stations: np.ndarray) -> np.ndarray:
    """Index of the nearest base station per point, lowest index on ties."""
    points = np.atleast_2d(points)
    m = len(base_stations)
    if m == 0:
        raise ParameterError("need at least one base station")
    if m == 1:
        return np.zeros(len(points), dtype=np.int64)
    k = min(4, m)
    tree = cKDTree(base_stations)
    dist, idx = tree.query(points, k=k)
    # Lowest index among exact distance ties within the k nearest.
    tied = dist == dist[:, :1]
    choice = np.where(tied, idx, m).min(axis=1)
    # If all k neighbours tie there may be an even lower index outside the
    # query window; fall back to a full scan for those (degenerate) rows.
    overflow = tied.all(axis=1) & (k < m)
    if overflow.any():
        d2 = np.sum((points[overflow, None, :] - base_stations[None, :, :]) ** 2, axis=2)
        choice[overflow] = d2.argmin(axis=1)
    return choice.astype(np.int64)


def assign_cells(realization: NetworkRealization) -> np.ndarray:
    """Recompute the mobile -> nearest-station map for a realization."""
    return nearest_cell(realization.mobiles, realization.base_stations)


def build_realization(
    params: SystemParams,
    r0_mode: str,
    rng: np.random.Generator,
    r0: float | None = None,
    rejection_cap: int = 10**6,
    seed: int | None = None,
) -> NetworkRealization:
    """Sample base stations and mobiles and centre the nearest station.

    ``r0_mode`` places the representative mobile:
      * ``"fixed"``   -- at distance ``r0`` from the origin, uniform angle;
      * ``"uniform"`` -- uniform in the origin cell, by rejection from the disk.

    Empty base-station draws are resampled (counted in ``resample_count``).
    In uniform mode, exceeding ``rejection_cap`` candidate draws raises
    :class:`DegenerateRealizationError`.
    """
    if r0_mode not in ("fixed", "uniform"):
        raise ParameterError(f"unknown r0_mode {r0_mode!r}")
    if r0_mode == "fixed":
        if r0 is None or r0 <= 0:
            raise ParameterError("fixed mode requires r0 > 0")
    resample_count = 0
    while True:
        stations = sample_ppp(params.rho_c, params.radius, rng)
        if len(stations):
            break
        resample_count += 1
    stations = shift_nearest_to_origin(stations)

    rejection_draws = 0
    if r0_mode == "fixed":
        theta = 2.0 * math.pi * rng.random()
        rep = np.array([r0 * math.cos(theta), r0 * math.sin(theta)])
    else:
        rep, rejection_draws = _sample_in_origin_cell(stations, params.radius, rng, rejection_cap)

    others = _uniform_disk(params.n_mobiles - 1, params.radius, rng)
    mobiles = np.vstack((rep[None, :], others))
    cell_of = nearest_cell(mobiles, stations)
    return NetworkRealization(
        params=params,
        base_stations=stations,
        mobiles=mobiles,
        cell_of=cell_of,
        r0_mode=r0_mode,
        r0=r0,
        resample_count=resample_count,
        rejection_draws=rejection_draws,
        seed=seed,
    )


def shift_nearest_to_origin(points: np.ndarray, reference=(0.0, 0.0)) -> np.ndarray:
    """Translate ``points`` so the one nearest ``reference`` is first and at (0,0)."""
    if len(points) == 0:
        raise ParameterError("cannot shift an empty point set")
    ref = np.asarray(reference, dtype=float)
    d2 = np.sum((points - ref) ** 2, axis=1)
    near = int(d2.argmin())  # argmin takes the lowest index on ties
    order = np.concatenate(([near], np.delete(np.arange(len(points)), near)))
    return points[order] - points[near]


def _sample_in_origin_cell(stations, radius, rng, cap):
    """Rejection-sample a point of B(0,R) whose nearest station is station 0."""
    draws = 0
    batch = 256
    while draws < cap:
        batch = min(batch, cap - draws)
        candidates = _uniform_disk(batch, radius, rng)
        cells = nearest_cell(candidates, stations)
        hits = np.flatnonzero(cells == 0)
        if hits.size:
            draws += int(hits[0]) + 1
            return candidates[hits[0]], draws
        draws += batch
        batch = min(batch * 2, 65536)
    raise DegenerateRealizationError(
        f"no point of the origin cell found in {cap} draws (cell may exceed the disk)"
    )


def estimate_cell_areas(
    realization: NetworkRealization,
    samples_per_unit_area: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Monte Carlo estimate of each cell's area within the disk."""
    return monte_carlo_cell_areas(
        realization.base_stations, realization.params.radius, samples_per_unit_area, rng
    )


def monte_carlo_cell_areas(
    base_stations: np.ndarray,
    radius: float,
    samples_per_unit_area: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Unbiased hit-count estimate; entries sum to the disk area pi*R^2."""
    if samples_per_unit_area <= 0:
        raise ParameterError("samples_per_unit_area must be positive")
    disk_area = math.pi * radius**2
    total = max(1, int(round(samples_per_unit_area * disk_area)))
    points = _uniform_disk(total, radius, rng)
    hits = np.bincount(nearest_cell(points, base_stations), minlength=len(base_stations))
    return hits * (disk_area / total)


# ---------------------------------------------------------------------------
# JSON serialization (replay/debug)
# ---------------------------------------------------------------------------

def realization_to_dict(realization: NetworkRealization) -> dict:
    return {
        "params": asdict(realization.params),
        "base_stations": realization.base_stations.tolist(),
        "mobiles": realization.mobiles.tolist(),
        "cell_of": realization.cell_of.tolist(),
        "r0_mode": realization.r0_mode,
        "r0": realization.r0,
        "resample_count": realization.resample_count,
        "rejection_draws": realization.rejection_draws,
        "seed": realization.seed,
    }


def realization_from_dict(doc: dict) -> NetworkRealization:
    return NetworkRealization(
        params=SystemParams(**doc["params"]),
        base_stations=np.asarray(doc["base_stations"], dtype=float).reshape(-1, 2),
        mobiles=np.asarray(doc["mobiles"], dtype=float).reshape(-1, 2),
        cell_of=np.asarray(doc["cell_of"], dtype=np.int64),
        r0_mode=doc["r0_mode"],
        r0=doc["r0"],
        resample_count=doc.get("resample_count", 0),
        rejection_draws=doc.get("rejection_draws", 0),
        seed=doc.get("seed"),
    )


def save_realization(realization: NetworkRealization, path) -> None:
    Path(path).write_text(json.dumps(realization_to_dict(realization)))


def load_realization(path) -> NetworkRealization:
    return realization_from_dict(json.loads(Path(path).read_text()))

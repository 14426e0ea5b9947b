"""Campaign orchestration: seeded Monte Carlo trials, aggregation, outputs.

A campaign runs ``trials`` independent network draws for every antenna count
in the experiment grid.  Within a trial, every requested channel-knowledge
mode is evaluated on the *same* realization and fading draw, so perfect-CSI
and pilot-contaminated results form paired comparisons.  Each trial owns an
RNG substream derived from (seed, n_antennas, trial, attempt), which makes
campaigns reproducible and order-independent under any worker count.
"""

from __future__ import annotations

import json
import math
import os
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import brentq
from scipy.special import gammaincc

from .analytic import (
    normalized_sir_closed_form,
    outage_spectral_efficiency,
    pc_bound_from_bs,
    pc_bound_from_contaminators,
    spectral_efficiency_cdf,
)
from .channel import assign_pilots, estimate_channel, sample_fading
from .errors import (
    DegenerateRealizationError,
    NumericError,
    ParameterError,
    SingularCovarianceError,
)
from .geometry import SystemParams, build_realization
from .mac import activate, active_density
from .receiver import SirSample, build_covariance, mmse_weight, output_sir
from .version import __version__

WORKERS_ENV_VAR = "POISSONMIMO_WORKERS"

CSV_HEADER = "trial,seed,mode,r0,n_antennas,sir,norm_sir,se,active_count"


@dataclass
class ExperimentConfig:
    """Declarative description of one campaign (JSON schema in the README)."""

    rho_c: float
    rho_m: float
    k_max: int
    alpha: float
    n_antennas: tuple[int, ...] = (16, 32, 64)
    trials: int = 500
    r0_mode: str = "uniform"
    r0: float | None = None
    modes: tuple[str, ...] = ("perfect", "pc")
    seed: int = 0
    radius: float | None = None
    interferer_ratio: float = 20.0
    shortfall_target: float = 1e-6
    workers: int | None = None
    max_retries: int = 10

    def __post_init__(self):
        self.n_antennas = tuple(int(n) for n in self.n_antennas)
        self.modes = tuple(self.modes)
        if self.trials < 1:
            raise ParameterError("trials must be >= 1")
        if not self.n_antennas:
            raise ParameterError("n_antennas list is empty")
        if self.r0_mode not in ("uniform", "fixed"):
            raise ParameterError(f"unknown r0_mode {self.r0_mode!r}")
        if self.r0_mode == "fixed" and (self.r0 is None or self.r0 <= 0):
            raise ParameterError("fixed r0_mode requires r0 > 0")
        bad = [m for m in self.modes if m not in ("perfect", "pc")]
        if bad:
            raise ParameterError(f"unknown modes {bad}")

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        return cls(**doc)

    @classmethod
    def from_json_file(cls, path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        doc = asdict(self)
        doc["n_antennas"] = list(self.n_antennas)
        doc["modes"] = list(self.modes)
        return doc


@dataclass
class FeasibilityReport:
    """Expected active-interferer supply versus the antenna demand."""

    n_antennas: int
    radius: float
    expected_active: float
    shortfall_probability: float
    min_radius: float  # smallest radius meeting the shortfall target


@dataclass
class BoundRecord:
    """Per-trial pilot-contamination lower bounds (normalized SIR)."""

    n_antennas: int
    trial: int
    r0: float
    station_bound: float  # one-contaminator-per-cell, half-station-distance bound
    contaminator_bound: float  # bound from the actual contamination set


@dataclass
class CampaignResult:
    config: ExperimentConfig
    radius_used: float
    p_active: float
    rho: float
    beta_limit: float
    samples: list[SirSample] = field(default_factory=list)
    bounds: list[BoundRecord] = field(default_factory=list)
    skipped: dict[int, int] = field(default_factory=dict)
    version: str = __version__
    wall_time_s: float = 0.0

    def spectral_efficiencies(self, n_antennas: int, mode: str) -> np.ndarray:
        return np.array(
            [
                s.spectral_efficiency
                for s in self.samples
                if s.n_antennas == n_antennas and s.mode == mode
            ]
        )

    def norm_sirs(self, n_antennas: int, mode: str) -> np.ndarray:
        return np.array(
            [s.norm_sir for s in self.samples if s.n_antennas == n_antennas and s.mode == mode]
        )

    def empirical_cdf(self, n_antennas: int, mode: str) -> tuple[np.ndarray, np.ndarray]:
        values = np.sort(self.spectral_efficiencies(n_antennas, mode))
        return values, np.arange(1, len(values) + 1) / max(len(values), 1)

    def to_summary_dict(self) -> dict:
        curves = {}
        for n in self.config.n_antennas:
            per_mode = {}
            for mode in self.config.modes:
                se = self.spectral_efficiencies(n, mode)
                if len(se) == 0:
                    continue
                per_mode[mode] = {
                    "trials": int(len(se)),
                    "mean_se": float(se.mean()),
                    "outage_p10_se": float(np.quantile(se, 0.1)),
                }
            entry = {
                "modes": per_mode,
                "analytic_outage_p10_se": float(
                    outage_spectral_efficiency(0.1, n, self.config.alpha, self.rho, self.config.rho_c)
                ),
            }
            records = [b for b in self.bounds if b.n_antennas == n]
            if records:
                pc_nsir = self.norm_sirs(n, "pc")
                station_se = [
                    math.log2(1.0 + n ** (self.config.alpha / 2.0) * b.r0 ** (-self.config.alpha) * b.station_bound)
                    for b in records
                ]
                dominance = [
                    float(x >= b.contaminator_bound) for x, b in zip(pc_nsir, records)
                ]
                entry["pc_bounds"] = {
                    "mean_station_bound_se": float(np.mean(station_se)),
                    "contaminator_bound_dominance": float(np.mean(dominance)),
                }
            curves[str(n)] = entry
        return {
            "version": self.version,
            "seed": int(self.config.seed),
            "config": self.config.to_dict(),
            "radius_used": float(self.radius_used),
            "active_density": {"p_active": float(self.p_active), "rho": float(self.rho)},
            "beta_limit": float(self.beta_limit),
            "curves": curves,
            "skipped_trials": {str(k): int(v) for k, v in self.skipped.items()},
            "wall_time_s": float(self.wall_time_s),
        }


def min_radius_for_shortfall(rho: float, n_antennas: int, target: float = 1e-6) -> float:
    """Smallest radius keeping P(active interferers < n_antennas) below target."""
    if rho <= 0 or n_antennas < 1 or not 0 < target < 1:
        raise ParameterError("invalid feasibility inputs")
    # P(Poisson(mean) <= N-1) = gammaincc(N, mean), decreasing in mean.
    lo = float(n_antennas)
    hi = n_antennas + 20.0 * math.sqrt(n_antennas) + 60.0
    mean = brentq(lambda m: gammaincc(n_antennas, m) - target, lo, hi, xtol=1e-9)
    return math.sqrt(mean / (math.pi * rho))


def feasibility_check(
    rho: float, radius: float, n_antennas: int, shortfall_target: float = 1e-6
) -> FeasibilityReport:
    """Compare the expected active-interferer count on the disk against N."""
    expected = math.pi * rho * radius**2
    shortfall = float(gammaincc(n_antennas, expected))
    return FeasibilityReport(
        n_antennas=n_antennas,
        radius=radius,
        expected_active=expected,
        shortfall_probability=shortfall,
        min_radius=min_radius_for_shortfall(rho, n_antennas, shortfall_target),
    )


def _resolve_workers(config: ExperimentConfig) -> int:
    if config.workers is not None:
        return max(1, int(config.workers))
    env = os.environ.get(WORKERS_ENV_VAR)
    if env:
        return max(1, int(env))
    return 1


def _trial_rng(seed: int, n_antennas: int, trial: int, attempt: int) -> np.random.Generator:
    key = np.random.SeedSequence(entropy=seed, spawn_key=(n_antennas, trial, attempt))
    return np.random.default_rng(key)


def _attempt_trial(config, params, rng, trial, beta_limit):
    real = build_realization(params, config.r0_mode, rng, r0=config.r0)
    state = activate(real, config.k_max, rng)
    pilots = assign_pilots(state, real, config.k_max, rng)

    active_idx = np.flatnonzero(state.active)
    fadings = np.zeros((len(real.mobiles), params.n_antennas), dtype=complex)
    fadings[active_idx] = sample_fading(params.n_antennas, rng, count=len(active_idx))
    dists = real.mobile_distances()
    interferers = active_idx[active_idx != 0]
    cov = build_covariance(dists[interferers], fadings[interferers], config.alpha)

    r0 = real.link_length
    samples = []
    for mode in config.modes:
        estimate = estimate_channel(mode, pilots.contaminators, real, fadings)
        w = mmse_weight(estimate.vector, cov)
        samples.append(
            output_sir(
                w,
                fadings[0],
                r0,
                dists[interferers],
                fadings[interferers],
                config.alpha,
                mode=mode,
                trial=trial,
                seed=config.seed,
            )
        )

    bound = None
    if "pc" in config.modes:
        station_dists = np.hypot(real.base_stations[1:, 0], real.base_stations[1:, 1])
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # alpha<=4 advisory already raised upstream
            station = pc_bound_from_bs(
                r0, station_dists, beta_limit, config.alpha,
                rho_c=config.rho_c, truncation_radius=params.radius,
            )
        others = pilots.contaminators[pilots.contaminators != 0]
        contaminator = pc_bound_from_contaminators(r0, dists[others], beta_limit, config.alpha)
        bound = BoundRecord(
            n_antennas=params.n_antennas,
            trial=trial,
            r0=r0,
            station_bound=station,
            contaminator_bound=contaminator,
        )
    return samples, bound


def _run_trial(config: ExperimentConfig, radius: float, beta_limit: float, n_antennas: int, trial: int):
    """One grid cell: returns (samples, bound) or None if every attempt failed."""
    params = SystemParams(
        rho_c=config.rho_c,
        rho_m=config.rho_m,
        k_max=config.k_max,
        alpha=config.alpha,
        n_antennas=n_antennas,
        radius=radius,
    )
    for attempt in range(config.max_retries + 1):
        rng = _trial_rng(config.seed, n_antennas, trial, attempt)
        try:
            return _attempt_trial(config, params, rng, trial, beta_limit)
        except (SingularCovarianceError, DegenerateRealizationError, NumericError):
            # Fresh realization; substreams are attempt-indexed so retries stay
            # deterministic and order-independent.
            continue
    return None


def _run_trial_star(args):
    return _run_trial(*args)


def run_campaign(config: ExperimentConfig) -> CampaignResult:
    """Run the full experiment grid and aggregate per-curve results."""
    start = time.perf_counter()
    density = active_density(config.rho_c, config.rho_m, config.k_max)
    rho = density.rho
    beta_limit = normalized_sir_closed_form(rho, config.alpha)

    if config.radius is not None:
        radius = float(config.radius)
    else:
        radius = max(
            max(
                min_radius_for_shortfall(rho, n, config.shortfall_target),
                math.sqrt(config.interferer_ratio * n / (math.pi * rho)),
            )
            for n in config.n_antennas
        )
    for n in config.n_antennas:
        report = feasibility_check(rho, radius, n, config.shortfall_target)
        if report.expected_active < n or report.shortfall_probability > config.shortfall_target:
            warnings.warn(
                f"N={n}: expected {report.expected_active:.1f} active interferers on the disk, "
                f"shortfall probability {report.shortfall_probability:.2e}",
                stacklevel=2,
            )

    tasks = [(config, radius, beta_limit, n, t) for n in config.n_antennas for t in range(config.trials)]
    workers = _resolve_workers(config)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_trial_star, tasks, chunksize=8))
    else:
        outcomes = [_run_trial(*task) for task in tasks]

    result = CampaignResult(
        config=config,
        radius_used=radius,
        p_active=density.p_active,
        rho=rho,
        beta_limit=beta_limit,
        skipped={n: 0 for n in config.n_antennas},
    )
    for (_, _, _, n, _), outcome in zip(tasks, outcomes):
        if outcome is None:
            result.skipped[n] += 1
            continue
        samples, bound = outcome
        result.samples.extend(samples)
        if bound is not None:
            result.bounds.append(bound)
    result.wall_time_s = time.perf_counter() - start
    return result


# ---------------------------------------------------------------------------
# Output files
# ---------------------------------------------------------------------------

def emit_outputs(result: CampaignResult, out_dir, formats=("csv", "dat", "json")) -> dict[str, Path]:
    """Write trials.csv, per-curve CDF tables, and summary.json to ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: dict[str, Path] = {}

    if "csv" in formats:
        path = out / "trials.csv"
        lines = [CSV_HEADER]
        for s in result.samples:
            lines.append(
                f"{s.trial},{s.seed},{s.mode},{float(s.r0)!r},{s.n_antennas},"
                f"{float(s.sir)!r},{float(s.norm_sir)!r},{float(s.spectral_efficiency)!r},"
                f"{s.active_count}"
            )
        _write_text(path, "\n".join(lines) + "\n")
        written["trials"] = path

    if "dat" in formats:
        for n in result.config.n_antennas:
            for mode in result.config.modes:
                taus, probs = result.empirical_cdf(n, mode)
                if len(taus) == 0:
                    continue
                path = out / f"cdf_{n}_{mode}.dat"
                _write_text(path, _cdf_table(taus, probs))
                _validate_cdf_file(path)
                written[f"cdf_{n}_{mode}"] = path
            grid = _theory_grid(result, n)
            probs = spectral_efficiency_cdf(grid, n, result.config.alpha, result.rho, result.config.rho_c)
            path = out / f"cdf_{n}_theory.dat"
            _write_text(path, _cdf_table(grid, probs))
            _validate_cdf_file(path)
            written[f"cdf_{n}_theory"] = path

    if "json" in formats:
        path = out / "summary.json"
        _write_text(path, json.dumps(result.to_summary_dict(), indent=2, sort_keys=True) + "\n")
        written["summary"] = path
    return written


def _theory_grid(result: CampaignResult, n_antennas: int) -> np.ndarray:
    values = [
        s.spectral_efficiency
        for s in result.samples
        if s.n_antennas == n_antennas and s.spectral_efficiency > 0
    ]
    if values:
        lo = max(1e-3, 0.5 * min(values))
        hi = 1.2 * max(values)
    else:
        lo, hi = 0.05, 10.0
    return np.linspace(lo, hi, 401)


def _cdf_table(taus, probs) -> str:
    lines = [f"{float(t)!r} {float(p)!r}" for t, p in zip(taus, probs)]
    return "\n".join(lines) + "\n"


def _validate_cdf_file(path: Path) -> None:
    """Post-write check: rows sorted by tau, probabilities non-decreasing in [0,1]."""
    taus, probs = [], []
    for line in Path(path).read_text().splitlines():
        t, p = line.split()
        taus.append(float(t))
        probs.append(float(p))
    taus = np.asarray(taus)
    probs = np.asarray(probs)
    if np.any(np.diff(taus) < 0):
        raise RuntimeError(f"{path}: tau column not sorted")
    if np.any(np.diff(probs) < 0) or np.any(probs < 0) or np.any(probs > 1):
        raise RuntimeError(f"{path}: probabilities not a CDF")


def _write_text(path: Path, text: str) -> None:
    try:
        path.write_text(text)
    except OSError as exc:
        raise RuntimeError(f"failed to write {path}: {exc}") from exc

"""Command-line interface.

Subcommands:
  density    analytic (and optionally empirical) active-mobile density
  analytic   normalized-SIR limit, spectral efficiency and its CDF table
  pc-bound   pilot-contamination lower bound for a saved realization
  simulate   run a Monte Carlo campaign from a JSON config
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .analytic import (
    normalized_sir_closed_form,
    pc_bound_from_bs,
    solve_normalized_sir,
    spectral_efficiency_approx,
    spectral_efficiency_cdf,
)
from .geometry import build_realization, load_realization, SystemParams
from .harness import ExperimentConfig, emit_outputs, run_campaign
from .mac import active_density, empirical_active_fraction


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="poissonmimo", description=__doc__)
    sub = parser.add_subparsers(required=True)

    p = sub.add_parser("density", help="active-mobile density under the per-cell cap")
    p.add_argument("--rho-c", type=float, required=True, help="base-station density")
    p.add_argument("--rho-m", type=float, required=True, help="mobile density")
    p.add_argument("--k", type=int, required=True, help="max active mobiles per cell")
    p.add_argument("--empirical", action="store_true", help="also estimate from simulated networks")
    p.add_argument("--trials", type=int, default=200, help="realizations for --empirical")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--radius", type=float, default=None, help="disk radius for --empirical")
    p.set_defaults(func=_cmd_density)

    p = sub.add_parser("analytic", help="closed-form SIR limit and CDF table")
    p.add_argument("--n-antennas", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--rho-c", type=float, required=True)
    p.add_argument("--rho-m", type=float, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--r0", type=float, required=True, help="representative link length")
    p.add_argument("--tau-grid", type=str, default=None, metavar="LO:HI:STEP")
    p.add_argument(
        "--c",
        type=float,
        default=None,
        help="users-per-antenna ratio; solves the finite-c fixed point instead of the large-c limit",
    )
    p.set_defaults(func=_cmd_analytic)

    p = sub.add_parser("pc-bound", help="contamination bound for a realization JSON")
    p.add_argument("--realization", type=str, required=True, help="path to a realization JSON")
    p.set_defaults(func=_cmd_pc_bound)

    p = sub.add_parser("simulate", help="run a Monte Carlo campaign")
    p.add_argument("--config", type=str, required=True, help="path to a campaign config JSON")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--workers", type=int, default=None, help="trial-level process count")
    p.add_argument("--out", type=str, default="campaign_out", help="output directory")
    p.add_argument("--no-figures", action="store_true", help="skip matplotlib rendering")
    p.set_defaults(func=_cmd_simulate)
    return parser


def _emit(doc: dict) -> int:
    json.dump(doc, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    return 0


def _cmd_density(args) -> int:
    analytic = active_density(args.rho_c, args.rho_m, args.k)
    doc = {
        "p_active": analytic.p_active,
        "rho": analytic.rho,
        "ci": None,
        "source": "analytic",
    }
    if args.empirical:
        rng = np.random.default_rng(args.seed)
        radius = args.radius or 25.0 / math.sqrt(math.pi * args.rho_c)
        params = SystemParams(
            rho_c=args.rho_c, rho_m=args.rho_m, k_max=args.k,
            alpha=4.5, n_antennas=1, radius=radius,
        )
        reals = [
            build_realization(params, "fixed", rng, r0=0.1 / math.sqrt(args.rho_c))
            for _ in range(args.trials)
        ]
        margin = 5.0 / math.sqrt(math.pi * args.rho_c)
        est = empirical_active_fraction(reals, args.k, rng, interior_margin=margin)
        doc.update(
            {
                "p_active": est.fraction,
                "rho": est.fraction * args.rho_m,
                "ci": [est.ci_low, est.ci_high],
                "source": "empirical",
                "analytic": {"p_active": analytic.p_active, "rho": analytic.rho},
            }
        )
    return _emit(doc)


def _parse_tau_grid(spec: str) -> np.ndarray:
    try:
        lo, hi, step = (float(x) for x in spec.split(":"))
    except ValueError as exc:
        raise SystemExit(f"bad --tau-grid {spec!r}, expected LO:HI:STEP") from exc
    if step <= 0 or hi <= lo:
        raise SystemExit(f"bad --tau-grid {spec!r}: need HI > LO and STEP > 0")
    return np.arange(lo, hi + step / 2, step)


def _cmd_analytic(args) -> int:
    density = active_density(args.rho_c, args.rho_m, args.k)
    rho = density.rho
    if args.c is not None:
        beta = solve_normalized_sir(rho, args.c, args.alpha)
    else:
        beta = normalized_sir_closed_form(rho, args.alpha)
    gamma = spectral_efficiency_approx(args.n_antennas, args.alpha, rho, args.r0)
    taus = _parse_tau_grid(args.tau_grid) if args.tau_grid else np.linspace(0.25, 10.0, 40)
    cdf = spectral_efficiency_cdf(taus, args.n_antennas, args.alpha, rho, args.rho_c)
    return _emit(
        {
            "rho": rho,
            "p_active": density.p_active,
            "beta": beta,
            "gamma": gamma,
            "cdf": [[float(t), float(p)] for t, p in zip(taus, cdf)],
        }
    )


def _cmd_pc_bound(args) -> int:
    real = load_realization(args.realization)
    params = real.params
    density = active_density(params.rho_c, params.rho_m, params.k_max)
    beta = normalized_sir_closed_form(density.rho, params.alpha)
    station_dists = np.hypot(real.base_stations[1:, 0], real.base_stations[1:, 1])
    r0 = real.link_length
    bound = pc_bound_from_bs(
        r0, station_dists, beta, params.alpha,
        rho_c=params.rho_c, truncation_radius=params.radius,
    )
    n = params.n_antennas
    return _emit(
        {
            "r0": r0,
            "n_antennas": n,
            "beta": beta,
            "bound_norm_sir": bound,
            "bound_se": math.log2(1.0 + n ** (params.alpha / 2.0) * r0 ** (-params.alpha) * bound),
        }
    )


def _cmd_simulate(args) -> int:
    config = ExperimentConfig.from_json_file(args.config)
    if args.seed is not None:
        config.seed = args.seed
    if args.workers is not None:
        config.workers = args.workers
    result = run_campaign(config)
    written = emit_outputs(result, args.out)
    if not args.no_figures:
        from .plotting import render_campaign_figures

        for path in render_campaign_figures(result, args.out):
            written[path.stem] = path
    for name in sorted(written):
        print(f"{name}: {written[name]}")
    skipped = sum(result.skipped.values())
    if skipped:
        print(f"skipped trials: {skipped}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

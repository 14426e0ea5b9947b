"""Render campaign figures to files next to the delimited outputs."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .analytic import spectral_efficiency_cdf
from .harness import CampaignResult, _theory_grid

_MODE_STYLE = {"perfect": "-", "pc": "--"}


def render_campaign_figures(result: CampaignResult, out_dir) -> list[Path]:
    """Write cdf.png (always) and se_bounds.png (when bounds were recorded)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = [_render_cdf(result, out / "cdf.png")]
    if result.bounds:
        paths.append(_render_bounds(result, out / "se_bounds.png"))
    return paths


def _render_cdf(result: CampaignResult, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(7, 5))
    colors = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    for i, n in enumerate(result.config.n_antennas):
        color = colors[i % len(colors)]
        for mode in result.config.modes:
            taus, probs = result.empirical_cdf(n, mode)
            if len(taus) == 0:
                continue
            ax.step(
                taus,
                probs,
                where="post",
                color=color,
                linestyle=_MODE_STYLE.get(mode, "-"),
                label=f"N={n} {mode} (sim)",
            )
        grid = _theory_grid(result, n)
        theory = spectral_efficiency_cdf(grid, n, result.config.alpha, result.rho, result.config.rho_c)
        ax.plot(grid, theory, color=color, linestyle=":", linewidth=2, label=f"N={n} theory")
    ax.set_xlabel("spectral efficiency (b/s/Hz)")
    ax.set_ylabel("CDF")
    ax.set_ylim(0, 1)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    ax.set_title(
        f"Uplink spectral efficiency, K={result.config.k_max}, "
        f"alpha={result.config.alpha}, {result.config.trials} trials"
    )
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def _render_bounds(result: CampaignResult, path: Path) -> Path:
    alpha = result.config.alpha
    ns, mean_pc, mean_perfect, mean_bound = [], [], [], []
    for n in result.config.n_antennas:
        records = [b for b in result.bounds if b.n_antennas == n]
        pc = result.spectral_efficiencies(n, "pc")
        if not records or len(pc) == 0:
            continue
        ns.append(n)
        mean_pc.append(float(pc.mean()))
        perfect = result.spectral_efficiencies(n, "perfect")
        mean_perfect.append(float(perfect.mean()) if len(perfect) else math.nan)
        mean_bound.append(
            float(
                np.mean(
                    [
                        math.log2(1.0 + n ** (alpha / 2.0) * b.r0 ** (-alpha) * b.station_bound)
                        for b in records
                    ]
                )
            )
        )
    fig, ax = plt.subplots(figsize=(7, 5))
    ax.plot(ns, mean_perfect, "o-", label="perfect CSI (sim)")
    ax.plot(ns, mean_pc, "s-", label="pilot contaminated (sim)")
    ax.plot(ns, mean_bound, "k--", label="contamination lower bound")
    ax.set_xlabel("base-station antennas N")
    ax.set_ylabel("mean spectral efficiency (b/s/Hz)")
    ax.grid(True, alpha=0.3)
    ax.legend()
    ax.set_title(f"Mean spectral efficiency vs N (r0={result.config.r0})")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path

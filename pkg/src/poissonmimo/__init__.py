"""Simulation and asymptotic analytics for the uplink of massive-MIMO
cellular networks whose base stations form a Poisson point process."""

from .analytic import (
    normalized_sir_closed_form,
    outage_spectral_efficiency,
    pc_bound_from_bs,
    pc_bound_from_contaminators,
    solve_normalized_sir,
    spectral_efficiency_approx,
    spectral_efficiency_cdf,
)
from .channel import assign_pilots, estimate_channel, sample_fading
from .geometry import (
    NetworkRealization,
    SystemParams,
    assign_cells,
    build_realization,
    estimate_cell_areas,
    load_realization,
    sample_ppp,
    save_realization,
)
from .harness import (
    CampaignResult,
    ExperimentConfig,
    emit_outputs,
    feasibility_check,
    run_campaign,
)
from .mac import (
    activate,
    activation_probability,
    active_density,
    cell_area_pdf,
    empirical_active_fraction,
)
from .receiver import (
    SirSample,
    build_covariance,
    mmse_weight,
    output_sir,
    perfect_csi_normalized_sir,
)
from .specfun import csc_2pi_over_alpha, gauss_2f1, sin_2pi_over_alpha
from .version import __version__

__all__ = [
    "CampaignResult",
    "ExperimentConfig",
    "NetworkRealization",
    "SirSample",
    "SystemParams",
    "__version__",
    "activate",
    "activation_probability",
    "active_density",
    "assign_cells",
    "assign_pilots",
    "build_covariance",
    "build_realization",
    "cell_area_pdf",
    "csc_2pi_over_alpha",
    "emit_outputs",
    "empirical_active_fraction",
    "estimate_cell_areas",
    "estimate_channel",
    "feasibility_check",
    "gauss_2f1",
    "load_realization",
    "mmse_weight",
    "normalized_sir_closed_form",
    "outage_spectral_efficiency",
    "output_sir",
    "pc_bound_from_bs",
    "pc_bound_from_contaminators",
    "perfect_csi_normalized_sir",
    "run_campaign",
    "sample_fading",
    "sample_ppp",
    "save_realization",
    "solve_normalized_sir",
    "spectral_efficiency_approx",
    "spectral_efficiency_cdf",
]

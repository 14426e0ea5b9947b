"""Hand-built fixtures shared across test modules."""

import numpy as np

from poissonmimo.geometry import NetworkRealization, SystemParams, nearest_cell


def manual_realization(base_stations, mobiles, alpha=5.0, k_max=10, n_antennas=4,
                       radius=10_000.0, rho_c=1e-4, rho_m=1e-3):
    """Realization with prescribed geometry; cell map recomputed from scratch."""
    base_stations = np.asarray(base_stations, dtype=float)
    mobiles = np.asarray(mobiles, dtype=float)
    params = SystemParams(
        rho_c=rho_c, rho_m=rho_m, k_max=k_max, alpha=alpha,
        n_antennas=n_antennas, radius=radius,
    )
    return NetworkRealization(
        params=params,
        base_stations=base_stations,
        mobiles=mobiles,
        cell_of=nearest_cell(mobiles, base_stations),
        r0_mode="fixed",
        r0=float(np.hypot(*mobiles[0])),
    )


def two_cell_realization(n_far=50, far=(2000.0, 0.0), rep=(1.0, 0.0), spread=50.0,
                         rng=None, **kwargs):
    """Representative alone in cell 0; ``n_far`` mobiles clustered in cell 1."""
    rng = rng or np.random.default_rng(0)
    cluster = np.asarray(far) + spread * (rng.random((n_far, 2)) - 0.5)
    mobiles = np.vstack(([rep], cluster))
    return manual_realization([(0.0, 0.0), far], mobiles, **kwargs)


def random_interference(n_antennas, n_interferers, rng, d_lo=10.0, d_hi=1000.0):
    """Random distances and CN(0,1) fadings for receiver tests."""
    distances = rng.uniform(d_lo, d_hi, n_interferers)
    fadings = np.sqrt(0.5) * (
        rng.standard_normal((n_interferers, n_antennas))
        + 1j * rng.standard_normal((n_interferers, n_antennas))
    )
    return distances, fadings

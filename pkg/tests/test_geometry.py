import json
import math

import numpy as np
import pytest
from scipy import stats

from poissonmimo.errors import DegenerateRealizationError, ParameterError
from poissonmimo.geometry import (
    SystemParams,
    assign_cells,
    build_realization,
    estimate_cell_areas,
    load_realization,
    monte_carlo_cell_areas,
    nearest_cell,
    realization_from_dict,
    realization_to_dict,
    sample_ppp,
    save_realization,
    shift_nearest_to_origin,
)

from _util import manual_realization


def params_for(radius, rho_c=2e-5, rho_m=1e-3, **kw):
    defaults = dict(rho_c=rho_c, rho_m=rho_m, k_max=10, alpha=5.0, n_antennas=4, radius=radius)
    defaults.update(kw)
    return SystemParams(**defaults)


class TestSamplePPP:
    def test_count_moments(self):
        # mean pi * 2e-5 * 5000^2 = 1570.8; sample mean of 1000 draws within 3 sigma
        rng = np.random.default_rng(1)
        counts = [len(sample_ppp(2e-5, 5000.0, rng)) for _ in range(1000)]
        mean = math.pi * 2e-5 * 5000.0**2
        assert abs(np.mean(counts) - mean) < 3.0 * math.sqrt(mean / 1000)
        assert abs(np.var(counts) - mean) < 5.0 * mean / math.sqrt(1000)

    def test_tiny_density_usually_empty(self):
        rng = np.random.default_rng(2)
        counts = [len(sample_ppp(1e-6, 10.0, rng)) for _ in range(2000)]
        assert sum(counts) <= 5  # mean count per draw is 3.14e-4
        assert counts.count(0) >= 1995

    def test_deterministic_given_seed(self):
        a = sample_ppp(1e-3, 100.0, np.random.default_rng(7))
        b = sample_ppp(1e-3, 100.0, np.random.default_rng(7))
        assert np.array_equal(a, b)

    def test_points_uniform_in_disk(self):
        rng = np.random.default_rng(3)
        pts = sample_ppp(2.0, 50.0, rng)
        r2 = (pts**2).sum(axis=1) / 50.0**2
        assert stats.kstest(r2, "uniform").pvalue > 1e-3

    @pytest.mark.parametrize("density,radius", [(0.0, 1.0), (-1.0, 1.0), (1.0, 0.0)])
    def test_rejects_bad_inputs(self, density, radius):
        with pytest.raises(ParameterError):
            sample_ppp(density, radius, np.random.default_rng(0))


class TestShift:
    def test_single_station_translates_everything(self):
        shifted = shift_nearest_to_origin(np.array([[3.0, 4.0], [10.0, 10.0]]))
        assert np.array_equal(shifted[0], [0.0, 0.0])
        assert np.array_equal(shifted[1], [7.0, 6.0])

    def test_translation_equivariance(self):
        rng = np.random.default_rng(11)
        pts = rng.uniform(-100, 100, (20, 2))
        delta = np.array([17.5, -42.25])
        assert np.allclose(
            shift_nearest_to_origin(pts + delta, reference=delta),
            shift_nearest_to_origin(pts),
        )


class TestBuildRealization:
    def test_fixed_mode_link_length(self):
        params = params_for(500.0, rho_m=2e-5)
        real = build_realization(params, "fixed", np.random.default_rng(0), r0=100.0)
        assert math.isclose(real.link_length, 100.0, rel_tol=1e-12)
        assert np.array_equal(real.base_stations[0], [0.0, 0.0])

    def test_mobile_count_and_disk(self):
        params = params_for(300.0)
        real = build_realization(params, "uniform", np.random.default_rng(1))
        assert len(real.mobiles) == params.n_mobiles
        assert np.all(real.mobile_distances() <= 300.0 + 1e-9)

    def test_uniform_mode_rep_in_origin_cell(self):
        params = params_for(400.0)
        for seed in range(5):
            real = build_realization(params, "uniform", np.random.default_rng(seed))
            assert real.cell_of[0] == 0

    def test_uniform_mode_nearest_distance_law(self):
        # |X_0| for a mobile uniform in the origin cell follows the
        # nearest-station law 1 - exp(-rho_c pi r^2); KS distance <= 0.02.
        rho_c, radius = 2e-5, 1500.0
        params = params_for(radius, rho_m=1.0 / (math.pi * radius**2))
        rng = np.random.default_rng(42)
        r0 = [build_realization(params, "uniform", rng).link_length for _ in range(10_000)]
        result = stats.kstest(r0, lambda r: 1.0 - np.exp(-rho_c * math.pi * np.asarray(r) ** 2))
        assert result.statistic <= 0.02

    def test_empty_process_resampled(self):
        # mean station count 0.5 per draw: several resamples expected overall
        params = params_for(100.0, rho_c=0.5 / (math.pi * 100.0**2), rho_m=1e-3)
        reals = [build_realization(params, "fixed", np.random.default_rng(s), r0=10.0) for s in range(20)]
        assert all(len(r.base_stations) >= 1 for r in reals)
        assert any(r.resample_count > 0 for r in reals)

    def test_rejection_cap_raises(self):
        params = params_for(300.0)
        with pytest.raises(DegenerateRealizationError):
            build_realization(params, "uniform", np.random.default_rng(0), rejection_cap=0)

    def test_fixed_mode_requires_r0(self):
        with pytest.raises(ParameterError):
            build_realization(params_for(300.0), "fixed", np.random.default_rng(0))

    def test_deterministic_given_seed(self):
        params = params_for(400.0)
        a = build_realization(params, "uniform", np.random.default_rng(3))
        b = build_realization(params, "uniform", np.random.default_rng(3))
        assert np.array_equal(a.mobiles, b.mobiles)
        assert np.array_equal(a.base_stations, b.base_stations)
        assert np.array_equal(a.cell_of, b.cell_of)


class TestAssignCells:
    def test_nearest_station_wins(self):
        real = manual_realization([(0.0, 0.0), (10.0, 0.0)], [(4.0, 0.0)])
        assert real.cell_of[0] == 0

    def test_tie_broken_to_lowest_index(self):
        real = manual_realization([(0.0, 0.0), (10.0, 0.0)], [(5.0, 0.0)])
        assert real.cell_of[0] == 0

    def test_matches_bruteforce_scan(self):
        rng = np.random.default_rng(5)
        stations = rng.uniform(-500, 500, (10, 2))
        mobiles = rng.uniform(-500, 500, (1000, 2))
        got = nearest_cell(mobiles, stations)
        d2 = np.sum((mobiles[:, None, :] - stations[None, :, :]) ** 2, axis=2)
        assert np.array_equal(got, d2.argmin(axis=1))

    def test_every_mobile_nearest(self):
        params = params_for(400.0)
        real = build_realization(params, "uniform", np.random.default_rng(9))
        d_own = np.hypot(*(real.mobiles - real.base_stations[real.cell_of]).T)
        for j in range(len(real.base_stations)):
            d_j = np.hypot(*(real.mobiles - real.base_stations[j]).T)
            assert np.all(d_own <= d_j + 1e-9)
        assert np.array_equal(assign_cells(real), real.cell_of)


class TestCellAreas:
    def test_single_station_gets_whole_disk(self):
        real = manual_realization([(0.0, 0.0)], [(1.0, 0.0)], radius=200.0)
        areas = estimate_cell_areas(real, 0.01, np.random.default_rng(0))
        assert areas[0] == pytest.approx(math.pi * 200.0**2, rel=1e-12)

    def test_symmetric_pair_splits_evenly(self):
        areas = monte_carlo_cell_areas(
            np.array([(50.0, 0.0), (-50.0, 0.0)]), 200.0,
            1e6 / (math.pi * 200.0**2), np.random.default_rng(1),
        )
        assert abs(areas[0] - areas[1]) / areas.mean() < 0.02

    def test_areas_sum_to_disk(self):
        rng = np.random.default_rng(2)
        stations = rng.uniform(-300, 300, (15, 2))
        areas = monte_carlo_cell_areas(stations, 400.0, 0.005, rng)
        assert np.all(areas >= 0)
        assert areas.sum() == pytest.approx(math.pi * 400.0**2, rel=1e-9)

    def test_mean_cell_area_matches_inverse_density(self):
        # pooled mean estimated area -> 1/rho_c within 5%
        rho_c = 2e-5
        params = params_for(2000.0, rho_m=1e-5)
        rng = np.random.default_rng(3)
        total_area, total_cells = 0.0, 0
        for _ in range(40):
            real = build_realization(params, "fixed", rng, r0=50.0)
            areas = estimate_cell_areas(real, 1e-4, rng)
            total_area += areas.sum()
            total_cells += len(areas)
        assert total_area / total_cells == pytest.approx(1.0 / rho_c, rel=0.05)


class TestParams:
    def test_n_mobiles_rounding(self):
        params = params_for(1000.0, rho_m=1e-3)
        assert params.n_mobiles == round(math.pi * 1e-3 * 1000.0**2)

    @pytest.mark.parametrize(
        "overrides",
        [
            {"rho_c": 0.0},
            {"rho_m": -1e-3},
            {"k_max": 0},
            {"alpha": 2.0},
            {"n_antennas": 0},
            {"radius": 0.0},
        ],
    )
    def test_invalid_params_raise(self, overrides):
        with pytest.raises(ParameterError):
            params_for(500.0, **overrides)

    def test_tiny_mobile_density_rejected(self):
        with pytest.raises(ParameterError):
            params_for(10.0, rho_m=1e-9)


class TestSerialization:
    def test_roundtrip_preserves_realization(self, tmp_path):
        params = params_for(300.0)
        real = build_realization(params, "uniform", np.random.default_rng(4), seed=4)
        doc = realization_to_dict(real)
        json.dumps(doc)  # must already be JSON-safe
        back = realization_from_dict(doc)
        assert back.params == real.params
        assert np.array_equal(back.base_stations, real.base_stations)
        assert np.array_equal(back.mobiles, real.mobiles)
        assert np.array_equal(back.cell_of, real.cell_of)
        assert back.seed == 4

        path = tmp_path / "real.json"
        save_realization(real, path)
        assert np.array_equal(load_realization(path).mobiles, real.mobiles)

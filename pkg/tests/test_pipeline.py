"""Pipeline-level tests, including an independent end-to-end cost oracle.

The oracle recomputes route 201's valuation from first principles with
plain loops (no shared code with the valuation module), starting from the
hand-known fixture facts: 5 buses, 7.0 km/h, 21 km/day. Energy inputs are
taken from the pipeline's fleet block (the surrogate itself is validated
against the physics oracle elsewhere) so the check isolates the cost math.
"""

import pytest

from electrify.errors import UnknownRouteName
from electrify.pipeline import empirical_grades, load_state, run_metadata, valuate_routes
from electrify.profiles import get_profile


@pytest.fixture(scope="module")
def state(run_config):
    return load_state(run_config)


class TestLoadState:
    def test_selected_routes(self, state):
        assert state.route_ids == ["r201", "r202"]
        assert state.city_id == "boston"
        assert state.representative_date.isoformat() == "2020-03-02"

    def test_empirical_grades_cover_all_pairs(self, state):
        grades = empirical_grades(state.clusters, state.distances, state.elevations)
        # r201: 2 clusters x 3 pairs; r202: 3 + 2 pairs
        assert len(grades) == 11

    def test_metadata_fields(self, state):
        meta = run_metadata(state, {"tco": {"fuel_price_usd_per_gal": 3.0}})
        assert meta["model_hash"] == state.model.content_hash
        assert meta["seed"] == 11
        assert meta["overrides"] == {"tco": {"fuel_price_usd_per_gal": 3.0}}
        assert len(meta["formula_deviations"]) == 4

    def test_unknown_route_rejected(self, state):
        with pytest.raises(UnknownRouteName, match="ghost"):
            valuate_routes(state, ["r201", "ghost"])


class TestIndependentCostOracle:
    def test_route_201_recomputed_from_scratch(self, state):
        (valuation,) = valuate_routes(state, ["r201"])
        fleet = valuation.fleet
        profile = get_profile("boston")
        p = profile.tco

        # hand-known fixture facts
        assert fleet.buses_total == 5
        assert fleet.route_speed_kmh == pytest.approx(7.0)
        assert fleet.annual_vkt_km == pytest.approx(21.0 * 365)

        # fuel economy: quadratic in mph
        mph = 0.621371 * 7.0
        fe = -0.0032 * mph * mph + 0.2143 * mph + 0.9726
        assert valuation.fe_mpg == pytest.approx(fe, rel=1e-12)

        # diesel TCO, written as explicit yearly loops
        vkt = 21.0 * 365
        capex_d = 485_000.0 * 5
        fuel = 0.0
        for y in range(1, 13):
            fuel += 2.546 * (1.007 ** y) * 0.621371 * vkt / fe
        om_yearly_d = 0.88 * 5 * 0.621371 * vkt
        annuity = ((1.035 ** 12) - 1.0) / (0.035 * (1.035 ** 12))
        om_d = annuity * om_yearly_d
        salvage_d = -(0.15 * 485_000.0 * 5) / (1.035 ** 12)
        assert valuation.diesel.capex_usd == pytest.approx(capex_d)
        assert valuation.diesel.fuel_cost_usd == pytest.approx(fuel, rel=1e-12)
        assert valuation.diesel.om_cost_usd == pytest.approx(om_d, rel=1e-12)
        assert valuation.diesel.salvage_usd == pytest.approx(salvage_d, rel=1e-12)
        assert valuation.diesel.tco_npv_usd == pytest.approx(
            capex_d + fuel + om_d + salvage_d, rel=1e-12
        )

        # diesel emissions and health, from the same VKT
        co2 = vkt * 310.0 / 1e6 + (vkt * 0.621371 / fe) * 10.21 / 1000.0
        assert valuation.diesel.co2_t_yr == pytest.approx(co2, rel=1e-12)
        pm = vkt * 0.583
        hi = 25.8e-6 * (pm / 1000.0) * 260.110 * 6.267e6
        assert valuation.diesel.pm25_g_yr == pytest.approx(pm, rel=1e-12)
        assert valuation.diesel.health_usd_yr == pytest.approx(hi, rel=1e-12)

        # electric TCO from the fleet block's reported energies
        daily_total = sum(fleet.daily_energy_kwh.values())
        annual_kwh = daily_total * 365.0
        assert valuation.electric.energy_kwh_yr == pytest.approx(annual_kwh, rel=1e-12)
        n_c = fleet.chargers
        capex_e = 750_000.0 * 5 + (17_692.0 + 27_549.0) * n_c
        energy_cost = 0.0
        demand = 0.0
        for y in range(1, 13):
            energy_cost += 0.098 * (0.999 ** y) * annual_kwh / 0.95
            demand += 8.0 * n_c * 50.0 * (1.0 ** y) * 12.0
        om_e = annuity * (0.64 * 5 * 0.621371 * vkt + 500.0 * n_c)
        salvage_e = -(0.15 * 750_000.0 * 5 + 0.15 * 27_549.0 * n_c) / (1.035 ** 12)
        assert valuation.electric.capex_usd == pytest.approx(capex_e)
        assert valuation.electric.energy_cost_usd == pytest.approx(energy_cost, rel=1e-12)
        assert valuation.electric.demand_charge_usd == pytest.approx(demand, rel=1e-12)
        assert valuation.electric.om_cost_usd == pytest.approx(om_e, rel=1e-12)
        assert valuation.electric.salvage_usd == pytest.approx(salvage_e, rel=1e-12)
        assert valuation.electric.tco_npv_usd == pytest.approx(
            capex_e + energy_cost + demand + om_e + salvage_e, rel=1e-12
        )

        # electric CO2 from the daily energies
        co2_e = daily_total * 0.2369 * 365.0 / 1000.0
        assert valuation.electric.co2_t_yr == pytest.approx(co2_e, rel=1e-12)

    def test_override_does_not_leak_between_calls(self, state):
        (base,) = valuate_routes(state, ["r201"])
        valuate_routes(state, ["r201"], {"tco": {"fuel_price_usd_per_gal": 9.9}})
        (again,) = valuate_routes(state, ["r201"])
        assert again.diesel.tco_npv_usd == base.diesel.tco_npv_usd

    def test_duplicate_route_ids_collapse(self, state):
        valuations = valuate_routes(state, ["r201", "r201", "r201"])
        assert [v.route_id for v in valuations] == ["r201"]

    def test_route_without_representative_day_service_rejected(self, state):
        import dataclasses
        import datetime as dt

        from electrify.errors import NoTrips

        shifted = dataclasses.replace(state, representative_date=dt.date(2021, 1, 1))
        with pytest.raises(NoTrips, match="representative day"):
            valuate_routes(shifted, ["r201"])


class TestMilanProfile:
    def test_milan_config_end_to_end(self, artifacts_dir):
        import json

        from electrify.config import load_run_config

        cfg_path = artifacts_dir / "milan_config.json"
        cfg_path.write_text(json.dumps({
            "feed": "feed.json",
            "distances": "distances.csv",
            "elevations": "elevations.csv",
            "model": "model.json",
            "profile": "milan",
            "seed": 11,
            "routes": ["201"],
        }))
        state = load_state(load_run_config(cfg_path))
        (valuation,) = valuate_routes(state, None)

        # Milan factors flow through: diesel upstream at 149.1 g/km,
        # electric grid at 0.483 kg/kWh, diesel fuel at 5.8 USD/gal
        vkt = valuation.fleet.annual_vkt_km
        fe = valuation.fe_mpg
        expected_diesel_co2 = vkt * 149.1 / 1e6 + (vkt * 0.621371 / fe) * 10.21 / 1000.0
        assert valuation.diesel.co2_t_yr == pytest.approx(expected_diesel_co2, rel=1e-12)
        daily = sum(valuation.fleet.daily_energy_kwh.values())
        assert valuation.electric.co2_t_yr == pytest.approx(
            daily * 0.483 * 365 / 1000.0, rel=1e-12
        )
        year_one_fuel = 5.8 * 1.043 * 0.621371 * vkt / fe
        assert valuation.diesel.fuel_cost_usd > year_one_fuel  # 12 growing years
        # cheaper electric bus capital in the Milan profile
        assert valuation.electric.capex_usd < 750_000.0 * valuation.fleet.buses_total

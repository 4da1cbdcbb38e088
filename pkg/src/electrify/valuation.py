"""Diesel fuel economy, well-to-wheel emissions, health costs, and NPV TCO.

Cost conventions follow the published comparison they feed: yearly energy,
demand-charge, and fuel streams are summed undiscounted over the 12-year
horizon, operation and maintenance is annuitized at the discount rate, and
only the salvage credit is discounted. The diesel CO2 well-to-tank factor
is applied per km with a plain g-to-tonne conversion (the source equation
carries an inverted unit factor, corrected here and noted in report
metadata).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NonPositiveFE, NonPositiveSpeed
from .fleet import ChargerSpec, FleetEstimate
from .physics import BusSpec
from .validation import require_int_at_least, require_non_negative, require_positive, require_rate

KM_TO_MILES = 0.621371

# Deviations from the published formulas, echoed into report metadata.
FORMULA_DEVIATIONS = (
    "diesel well-to-tank CO2 uses g-to-tonne conversion (source equation inverts the factor)",
    "charger count drops the dimensionally inconsistent 1000 W/kW factor",
    "cluster speed divides mean trip distance (not summed distance) by mean cycle length",
    "daily cluster energy is the representative-day total (per-trip mean times trip count)",
)


@dataclass(frozen=True)
class TcoParams:
    energy_price_usd_per_kwh: float = 0.098
    energy_price_growth: float = -0.001
    demand_charge_usd_per_kw: float = 8.0
    demand_charge_growth: float = 0.0
    fuel_price_usd_per_gal: float = 2.546
    fuel_price_growth: float = 0.007
    ebus_cost_usd: float = 750_000.0
    dbus_cost_usd: float = 485_000.0
    charger_unit_usd: float = 27_549.0
    charger_install_usd: float = 17_692.0
    om_electric_usd_per_mile: float = 0.64
    om_diesel_usd_per_mile: float = 0.88
    om_charger_usd_per_year: float = 500.0
    residual_bus: float = 0.15
    residual_charger: float = 0.15
    discount_rate: float = 0.035
    horizon_years: int = 12
    km_to_miles: float = KM_TO_MILES

    def __post_init__(self):
        for name in (
            "energy_price_usd_per_kwh", "demand_charge_usd_per_kw", "fuel_price_usd_per_gal",
            "ebus_cost_usd", "dbus_cost_usd", "charger_unit_usd", "charger_install_usd",
            "om_electric_usd_per_mile", "om_diesel_usd_per_mile", "om_charger_usd_per_year",
            "residual_bus", "residual_charger",
        ):
            require_non_negative(getattr(self, name), name)
        for name in ("energy_price_growth", "demand_charge_growth", "fuel_price_growth"):
            require_rate(getattr(self, name), name)
        require_positive(self.discount_rate, "discount_rate")
        require_int_at_least(self.horizon_years, 1, "horizon_years")
        require_positive(self.km_to_miles, "km_to_miles")


@dataclass(frozen=True)
class EmissionFactors:
    diesel_w2t_g_per_km: float = 310.0
    diesel_t2w_kg_per_gal: float = 10.21
    electric_w2t_kg_per_kwh: float = 0.2369
    pm25_t2w_g_per_km: float = 0.583

    def __post_init__(self):
        for name in (
            "diesel_w2t_g_per_km", "diesel_t2w_kg_per_gal",
            "electric_w2t_kg_per_kwh", "pm25_t2w_g_per_km",
        ):
            require_non_negative(getattr(self, name), name)


@dataclass(frozen=True)
class HealthParams:
    intake_fraction_ppm: float = 25.8
    effect_factor_daly_per_kg: float = 260.110
    vsl_musd: float = 6.267

    def __post_init__(self):
        require_non_negative(self.intake_fraction_ppm, "intake_fraction_ppm")
        require_non_negative(self.effect_factor_daly_per_kg, "effect_factor_daly_per_kg")
        require_non_negative(self.vsl_musd, "vsl_musd")


@dataclass(frozen=True)
class ElectricCosts:
    energy_kwh_yr: float
    co2_t_yr: float
    capex_usd: float
    energy_cost_usd: float
    demand_charge_usd: float
    om_cost_usd: float
    salvage_usd: float  # <= 0, a credit

    @property
    def tco_npv_usd(self) -> float:
        return (
            self.capex_usd + self.energy_cost_usd + self.demand_charge_usd
            + self.om_cost_usd + self.salvage_usd
        )


@dataclass(frozen=True)
class DieselCosts:
    fuel_gal_yr: float
    co2_t_yr: float
    pm25_g_yr: float
    health_usd_yr: float
    capex_usd: float
    fuel_cost_usd: float
    om_cost_usd: float
    salvage_usd: float

    @property
    def tco_npv_usd(self) -> float:
        return self.capex_usd + self.fuel_cost_usd + self.om_cost_usd + self.salvage_usd


# ---------------------------------------------------------------------------
# Diesel energy and emissions


def fuel_economy(avg_speed_kmh: float, km_to_miles: float = KM_TO_MILES) -> float:
    """Diesel fuel economy in MPG from average route speed (quadratic fit)."""
    if avg_speed_kmh <= 0:
        raise NonPositiveSpeed(f"average speed must be positive, got {avg_speed_kmh}")
    mph = km_to_miles * avg_speed_kmh
    fe = -0.0032 * mph**2 + 0.2143 * mph + 0.9726
    if fe <= 0:
        raise NonPositiveFE(f"fuel economy is non-positive at {avg_speed_kmh} km/h")
    return fe


def co2_diesel(annual_vkt_km: float, fe_mpg: float, ef: EmissionFactors) -> float:
    """Well-to-wheel diesel CO2 in tonnes/year: per-km upstream + per-gallon tailpipe."""
    if fe_mpg <= 0:
        raise NonPositiveFE(f"fuel economy must be positive, got {fe_mpg}")
    upstream_t = annual_vkt_km * ef.diesel_w2t_g_per_km / 1e6
    gallons = annual_vkt_km * KM_TO_MILES / fe_mpg
    tailpipe_t = gallons * ef.diesel_t2w_kg_per_gal / 1000.0
    return upstream_t + tailpipe_t


def co2_electric(daily_energies_kwh: list[float], ef: EmissionFactors) -> float:
    """Well-to-tank CO2 of the electricity, tonnes/year (zero tailpipe)."""
    return sum(daily_energies_kwh) * ef.electric_w2t_kg_per_kwh * 365.0 / 1000.0


def health_impact(
    annual_vkt_km: float, ef: EmissionFactors, hp: HealthParams
) -> tuple[float, float]:
    """(PM2.5 grams/year, monetized health cost USD/year) of diesel exhaust.

    Population intake converts emitted grams to inhaled kg via the intake
    fraction (ppm); the effect factor then prices the intake through the
    value of statistical life (supplied in millions of USD).
    """
    pm_g = annual_vkt_km * ef.pm25_t2w_g_per_km
    intake_kg = hp.intake_fraction_ppm * 1e-6 * pm_g / 1000.0
    usd = intake_kg * hp.effect_factor_daly_per_kg * hp.vsl_musd * 1e6
    return pm_g, usd


# ---------------------------------------------------------------------------
# Net-present-value total cost of ownership


def annuity_factor(rate: float, years: int) -> float:
    """Present value of 1 USD/year for `years` years at `rate`."""
    growth = (1.0 + rate) ** years
    return (growth - 1.0) / (rate * growth)


def tco_npv_electric(
    fleet: FleetEstimate,
    annual_energy_kwh: float,
    p: TcoParams,
    charger: ChargerSpec,
    bus: BusSpec,
    ef: EmissionFactors,
) -> ElectricCosts:
    n_v, n_c = fleet.buses_total, fleet.chargers
    capex = p.ebus_cost_usd * n_v + (p.charger_install_usd + p.charger_unit_usd) * n_c

    energy_cost = sum(
        p.energy_price_usd_per_kwh
        * (1.0 + p.energy_price_growth) ** y
        * annual_energy_kwh
        / charger.efficiency
        for y in range(1, p.horizon_years + 1)
    )
    p_c = charger.effective_power_kw(bus)
    demand = sum(
        p.demand_charge_usd_per_kw * n_c * p_c * (1.0 + p.demand_charge_growth) ** y * 12.0
        for y in range(1, p.horizon_years + 1)
    )
    om_yearly = (
        p.om_electric_usd_per_mile * n_v * p.km_to_miles * fleet.annual_vkt_km
        + p.om_charger_usd_per_year * n_c
    )
    om = annuity_factor(p.discount_rate, p.horizon_years) * om_yearly
    salvage = -(p.residual_bus * p.ebus_cost_usd * n_v + p.residual_charger * p.charger_unit_usd * n_c)
    salvage /= (1.0 + p.discount_rate) ** p.horizon_years

    return ElectricCosts(
        energy_kwh_yr=annual_energy_kwh,
        co2_t_yr=co2_electric(list(fleet.daily_energy_kwh.values()), ef),
        capex_usd=capex,
        energy_cost_usd=energy_cost,
        demand_charge_usd=demand,
        om_cost_usd=om,
        salvage_usd=salvage,
    )


def tco_npv_diesel(
    fleet: FleetEstimate,
    fe_mpg: float,
    p: TcoParams,
    ef: EmissionFactors,
    hp: HealthParams,
) -> DieselCosts:
    if fe_mpg <= 0:
        raise NonPositiveFE(f"fuel economy must be positive, got {fe_mpg}")
    n_v = fleet.buses_total
    vkt = fleet.annual_vkt_km
    capex = p.dbus_cost_usd * n_v

    fuel_gal_yr = vkt * p.km_to_miles / fe_mpg
    fuel_cost = sum(
        p.fuel_price_usd_per_gal * (1.0 + p.fuel_price_growth) ** y * p.km_to_miles * vkt / fe_mpg
        for y in range(1, p.horizon_years + 1)
    )
    om_yearly = p.om_diesel_usd_per_mile * n_v * p.km_to_miles * vkt
    om = annuity_factor(p.discount_rate, p.horizon_years) * om_yearly
    salvage = -(p.residual_bus * p.dbus_cost_usd * n_v) / (1.0 + p.discount_rate) ** p.horizon_years

    pm_g, health_usd = health_impact(vkt, ef, hp)
    return DieselCosts(
        fuel_gal_yr=fuel_gal_yr,
        co2_t_yr=co2_diesel(vkt, fe_mpg, ef),
        pm25_g_yr=pm_g,
        health_usd_yr=health_usd,
        capex_usd=capex,
        fuel_cost_usd=fuel_cost,
        om_cost_usd=om,
        salvage_usd=salvage,
    )


@dataclass(frozen=True)
class RouteValuation:
    route_id: str
    short_name: str
    fleet: FleetEstimate
    fe_mpg: float
    electric: ElectricCosts
    diesel: DieselCosts

"""Built-in city parameter profiles.

Each profile bundles the cost, emission, health, weather, and vehicle
defaults for one metropolitan area. Every field is overridable through the
run configuration or a per-request override; the profiles only seed the
starting point.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .errors import ConfigError
from .fleet import ChargerSpec
from .physics import BusSpec, HvacModel
from .valuation import EmissionFactors, HealthParams, TcoParams


@dataclass(frozen=True)
class WeatherProfile:
    avg_temp_c: float
    lowest_temp_c: float  # coldest monthly mean, drives range feasibility
    monthly_means_c: tuple[float, ...]
    mixture_sigma_c: float = 3.0


@dataclass(frozen=True)
class CityProfile:
    name: str
    tco: TcoParams
    emissions: EmissionFactors
    health: HealthParams
    weather: WeatherProfile
    bus: BusSpec = field(default_factory=BusSpec)
    charger: ChargerSpec = field(default_factory=ChargerSpec)
    hvac: HvacModel = field(default_factory=HvacModel)
    ridership_mean: float = 15.0
    passenger_max: int = 40
    bus_size: str = "40ft"


_BOSTON_MONTHLY = (-5.0, -1.0, 3.0, 9.0, 15.0, 20.0, 24.0, 23.0, 19.0, 13.2, 7.0, 4.8)
_MILAN_MONTHLY = (0.0, 4.0, 9.5, 14.0, 19.0, 23.5, 26.5, 25.5, 21.5, 16.0, 9.5, 5.0)

BOSTON = CityProfile(
    name="boston",
    tco=TcoParams(
        energy_price_usd_per_kwh=0.098,
        energy_price_growth=-0.001,
        demand_charge_usd_per_kw=8.0,
        demand_charge_growth=0.0,
        fuel_price_usd_per_gal=2.546,
        fuel_price_growth=0.007,
        ebus_cost_usd=750_000.0,
        dbus_cost_usd=485_000.0,
    ),
    emissions=EmissionFactors(
        diesel_w2t_g_per_km=310.0,
        diesel_t2w_kg_per_gal=10.21,
        electric_w2t_kg_per_kwh=0.2369,
        pm25_t2w_g_per_km=0.583,
    ),
    health=HealthParams(
        intake_fraction_ppm=25.8,
        effect_factor_daly_per_kg=260.110,
        vsl_musd=6.267,
    ),
    weather=WeatherProfile(
        avg_temp_c=11.0,
        lowest_temp_c=-5.0,
        monthly_means_c=_BOSTON_MONTHLY,
    ),
)

MILAN = CityProfile(
    name="milan",
    tco=TcoParams(
        energy_price_usd_per_kwh=0.232,
        energy_price_growth=0.011,
        demand_charge_usd_per_kw=8.0,
        demand_charge_growth=0.0,
        fuel_price_usd_per_gal=5.8,
        fuel_price_growth=0.043,
        ebus_cost_usd=450_000.0,
        dbus_cost_usd=360_000.0,
    ),
    emissions=EmissionFactors(
        diesel_w2t_g_per_km=149.1,
        diesel_t2w_kg_per_gal=10.21,
        electric_w2t_kg_per_kwh=0.483,
        pm25_t2w_g_per_km=0.583,
    ),
    health=HealthParams(
        intake_fraction_ppm=35.3,
        effect_factor_daly_per_kg=79.802,
        vsl_musd=4.303,
    ),
    weather=WeatherProfile(
        avg_temp_c=14.5,
        lowest_temp_c=0.0,
        monthly_means_c=_MILAN_MONTHLY,
    ),
)

PROFILES = {"boston": BOSTON, "milan": MILAN}


def get_profile(name: str) -> CityProfile:
    try:
        return PROFILES[name]
    except KeyError:
        raise ConfigError(
            f"unknown profile {name!r}; available: {', '.join(sorted(PROFILES))}",
            field="profile",
        ) from None


def apply_overrides(profile: CityProfile, overrides: dict) -> CityProfile:
    """Return a copy of the profile with nested field overrides applied.

    Overrides are grouped by section: tco, emissions, health, bus, charger,
    hvac, weather, plus the scalar ridership_mean / passenger_max /
    bus_size. Unknown sections or fields raise ConfigError naming them;
    invariant violations surface as ConfigError from the dataclass
    validators, again naming the field.
    """
    if not overrides:
        return profile
    sections = {
        "tco": profile.tco,
        "emissions": profile.emissions,
        "health": profile.health,
        "bus": profile.bus,
        "charger": profile.charger,
        "hvac": profile.hvac,
        "weather": profile.weather,
    }
    updated: dict = {}
    for section, value in overrides.items():
        if section in ("ridership_mean", "passenger_max", "bus_size"):
            updated[section] = value
            continue
        if section not in sections:
            raise ConfigError(f"unknown override section {section!r}", field=section)
        if not isinstance(value, dict):
            raise ConfigError(f"override section {section!r} must be an object", field=section)
        target = sections[section]
        valid = set(target.__dataclass_fields__)
        for key in value:
            if key not in valid:
                raise ConfigError(f"unknown field {section}.{key}", field=f"{section}.{key}")
        if section == "weather" and "monthly_means_c" in value:
            value = {**value, "monthly_means_c": tuple(value["monthly_means_c"])}
        try:
            updated[section] = replace(target, **value)
        except (ValueError, ConfigError) as exc:
            f = getattr(exc, "field", "") or next(iter(value))
            raise ConfigError(f"invalid override {section}.{f}: {exc}", field=f"{section}.{f}") from None
    if "ridership_mean" in updated and updated["ridership_mean"] < 0:
        raise ConfigError("ridership_mean must be >= 0", field="ridership_mean")
    if "passenger_max" in updated and int(updated["passenger_max"]) < 0:
        raise ConfigError("passenger_max must be >= 0", field="passenger_max")
    return replace(profile, **updated)

"""End-to-end orchestration shared by the CLI and the HTTP service.

A LoadedState freezes the artifacts (feed, geo tables, model, profile)
once; valuations are then pure functions of (state, route set, overrides),
which is what makes CLI output and service responses agree field for field.
"""

from __future__ import annotations

import datetime as dt
import logging
from dataclasses import dataclass

from .analysis import build_report
from .config import RunConfig
from .errors import ConfigError, NoTrips, UnknownRouteName
from .fleet import estimate_fleet
from .geo import (
    DistanceTable,
    ElevationTable,
    enrich_cluster,
    load_distance_cache,
    load_elevation_cache,
)
from .gtfs import GtfsFeed, TripCluster, cluster_trips, load_feed, representative_service_date, select_routes
from .physics import DriveCycle, load_bundled_cycle
from .profiles import CityProfile, apply_overrides, get_profile
from .surrogate import (
    ElasticNetConfig,
    ScenarioDistributions,
    SurrogateModel,
    monthly_mixture,
    sample_scenarios,
    simulate_targets,
    train_surrogate,
)
from .valuation import (
    FORMULA_DEVIATIONS,
    RouteValuation,
    fuel_economy,
    tco_npv_diesel,
    tco_npv_electric,
)

logger = logging.getLogger(__name__)


@dataclass
class LoadedState:
    city_id: str
    feed: GtfsFeed
    route_ids: list[str]  # selected bus routes, sorted
    clusters: dict[str, list[TripCluster]]
    distances: DistanceTable
    elevations: ElevationTable
    model: SurrogateModel
    profile: CityProfile
    representative_date: dt.date
    seed: int
    bus_size: str


def load_state(config: RunConfig) -> LoadedState:
    """Load and cross-wire every artifact named by the run configuration."""
    feed = load_feed(config.existing_path("feed"))
    distances = load_distance_cache(config.existing_path("distances"))
    elevations = load_elevation_cache(config.existing_path("elevations"))
    model = SurrogateModel.load(config.existing_path("model"))

    profile = apply_overrides(get_profile(config.profile), config.overrides)

    if config.routes:
        route_ids = select_routes(feed, config.routes)
    else:
        route_ids = sorted(r.route_id for r in feed.routes.values() if r.is_bus)
    if not route_ids:
        raise ConfigError("no bus routes selected", field="routes")

    clusters = {rid: cluster_trips(feed, rid) for rid in route_ids}
    rep_date = representative_service_date(feed, route_ids)

    return LoadedState(
        city_id=config.city_id or profile.name,
        feed=feed,
        route_ids=sorted(route_ids),
        clusters=clusters,
        distances=distances,
        elevations=elevations,
        model=model,
        profile=profile,
        representative_date=rep_date,
        seed=config.seed,
        bus_size=config.bus_size,
    )


def empirical_grades(
    clusters: dict[str, list[TripCluster]],
    distances: DistanceTable,
    elevations: ElevationTable,
) -> list[float]:
    """Grade of every consecutive stop pair across all clusters (the
    empirical sampling pool for Monte-Carlo scenarios)."""
    grades: list[float] = []
    for rid in sorted(clusters):
        for cluster in clusters[rid]:
            grades.extend(p.grade_rad for p in enrich_cluster(cluster, distances, elevations))
    return grades


def train_from_state(
    state: LoadedState,
    cycle: DriveCycle | None = None,
    n_samples: int = 20_000,
    seed: int | None = None,
    cfg: ElasticNetConfig | None = None,
) -> SurrogateModel:
    """Sample scenarios from the loaded feed's distributions and fit the surrogate."""
    if cycle is None:
        cycle = load_bundled_cycle()
    seed = state.seed if seed is None else seed
    grades = empirical_grades(state.clusters, state.distances, state.elevations)
    weather = state.profile.weather
    dists = ScenarioDistributions(
        passenger_max=state.profile.passenger_max,
        temp_mixture=monthly_mixture(list(weather.monthly_means_c), weather.mixture_sigma_c),
        grade_source=tuple(grades),
    )
    cfg = cfg or ElasticNetConfig(seed=seed)
    samples = sample_scenarios(dists, n_samples, seed)
    targets = simulate_targets(cycle, samples, state.profile.bus, state.profile.hvac)
    model = train_surrogate(
        samples,
        targets,
        cfg,
        metadata={"city": state.profile.name, "n_grade_pairs": len(grades)},
    )
    logger.info(
        "trained surrogate on %d samples: train RMSE %.6f, test RMSE %.6f kWh/km",
        n_samples, model.train_rmse, model.test_rmse,
    )
    return model


def valuate_routes(
    state: LoadedState,
    route_ids: list[str] | None = None,
    overrides: dict | None = None,
) -> list[RouteValuation]:
    """Pure valuation of the requested routes under optional overrides."""
    profile = apply_overrides(state.profile, overrides or {})
    wanted = state.route_ids if route_ids is None else sorted(set(route_ids))
    unknown = sorted(set(wanted) - set(state.route_ids))
    if unknown:
        raise UnknownRouteName(f"unknown route id(s): {', '.join(unknown)}")

    valuations = []
    for rid in wanted:
        fleet = estimate_fleet(
            feed=state.feed,
            route_id=rid,
            clusters=state.clusters[rid],
            model=state.model,
            distances=state.distances,
            elevations=state.elevations,
            bus=profile.bus,
            charger=profile.charger,
            ridership=profile.ridership_mean,
            avg_temp_c=profile.weather.avg_temp_c,
            lowest_temp_c=profile.weather.lowest_temp_c,
            representative_date=state.representative_date,
        )
        if fleet.annual_vkt_km <= 0:
            raise NoTrips(
                f"route {rid!r} has no service on the representative day "
                f"{state.representative_date}; daily quantities are undefined"
            )
        fe = fuel_economy(fleet.route_speed_kmh, profile.tco.km_to_miles)
        electric = tco_npv_electric(
            fleet, fleet.annual_energy_kwh, profile.tco, profile.charger, profile.bus, profile.emissions
        )
        diesel = tco_npv_diesel(fleet, fe, profile.tco, profile.emissions, profile.health)
        valuations.append(
            RouteValuation(
                route_id=rid,
                short_name=state.feed.routes[rid].short_name,
                fleet=fleet,
                fe_mpg=fe,
                electric=electric,
                diesel=diesel,
            )
        )
    return valuations


def run_metadata(state: LoadedState, overrides: dict | None = None) -> dict:
    return {
        "city": state.city_id,
        "profile": state.profile.name,
        "bus_size": state.bus_size,
        "seed": state.seed,
        "model_hash": state.model.content_hash,
        "representative_date": state.representative_date.isoformat(),
        "formula_deviations": list(FORMULA_DEVIATIONS),
        "overrides": overrides or {},
    }


def valuation_report(
    state: LoadedState,
    route_ids: list[str] | None = None,
    overrides: dict | None = None,
) -> dict:
    valuations = valuate_routes(state, route_ids, overrides)
    return build_report(valuations, run_metadata(state, overrides))

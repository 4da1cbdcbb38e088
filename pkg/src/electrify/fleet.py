"""Operational fleet parameters inferred from the schedule.

Bus counts follow a conservative cycle-length/headway argument: a bus
arriving at stop s needs its whole round-trip duration before it can serve
the same stop again, so the ratio of cycle length to headway bounds the
vehicles simultaneously in service. Chargers are sized from total daily
depot energy; range feasibility is checked at the coldest monthly mean
temperature, where HVAC demand peaks.
"""

from __future__ import annotations

import datetime as dt
import logging
import math
from dataclasses import dataclass, field

from .errors import MissingGeoData, NoTrips, ZeroCycleLength
from .geo import DistanceTable, ElevationTable, enrich_cluster
from .gtfs import GtfsFeed, Trip, TripCluster, filter_skipped_stops
from .physics import BusSpec
from .surrogate import SurrogateModel
from .validation import require_fraction, require_positive

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ChargerSpec:
    power_kw: float = 50.0
    fastest_charge_h: float = 5.0
    efficiency: float = 0.95

    def __post_init__(self):
        require_positive(self.power_kw, "power_kw")
        require_positive(self.fastest_charge_h, "fastest_charge_h")
        require_fraction(self.efficiency, "efficiency")

    def effective_power_kw(self, bus: BusSpec) -> float:
        """Charging power is bounded by both the plug and the bus intake."""
        if bus.charge_power_kw is None:
            return self.power_kw
        return min(self.power_kw, bus.charge_power_kw)


@dataclass
class FleetEstimate:
    route_id: str
    buses_inbound: int
    buses_outbound: int
    buses_total: int
    chargers: int
    cluster_speeds_kmh: dict[str, float]
    route_speed_kmh: float
    annual_vkt_km: float
    daily_energy_kwh: dict[str, float]  # cluster_id -> kWh/day at average temperature
    daily_energy_low_temp_kwh: dict[str, float] = field(default_factory=dict)
    cluster_buses: dict[str, int] = field(default_factory=dict)
    feasible: bool = True
    needs_fast_charging: bool = False

    @property
    def annual_energy_kwh(self) -> float:
        return sum(self.daily_energy_kwh.values()) * 365.0


# ---------------------------------------------------------------------------
# Bus counting


def buses_required(feed: GtfsFeed, route_id: str) -> tuple[int, int, int]:
    """(inbound, outbound, total) vehicles needed to cover the schedule.

    For every stop arrival, the ratio of that trip's cycle length to the
    headway behind the preceding arrival bounds the buses in circulation;
    the per-direction count is the ceiling of the worst ratio across all
    stops, times, and service days. A direction served by trips with no
    observable headway needs exactly one vehicle.
    """
    trips = [filter_skipped_stops(t) for t in feed.trips_of_route(route_id)]
    if not trips:
        raise NoTrips(f"route {route_id!r} has no trips")

    counts = {}
    for direction in ("inbound", "outbound"):
        members = [t for t in trips if t.direction == direction]
        counts[direction] = _direction_bus_count(members)
    return counts["inbound"], counts["outbound"], counts["inbound"] + counts["outbound"]


def _direction_bus_count(trips: list[Trip]) -> int:
    if not trips:
        return 0
    worst = 0.0
    arrivals: dict[tuple[dt.date, str], list[tuple[int, Trip]]] = {}
    for trip in trips:
        for ev in trip.stop_events:
            arrivals.setdefault((trip.service_date, ev.stop_id), []).append((ev.arrival_s, trip))
    for key in sorted(arrivals):
        series = sorted(arrivals[key], key=lambda pair: pair[0])
        for (prev_t, _), (t, trip) in zip(series, series[1:]):
            headway = t - prev_t
            if headway <= 0:
                # simultaneous scheduled arrivals carry no headway information
                continue
            worst = max(worst, trip.cycle_length_s / headway)
    return max(1, math.ceil(worst)) if worst > 0 else 1


# ---------------------------------------------------------------------------
# Speeds and mileage


def sequence_distance_km(cluster: TripCluster, distances: DistanceTable) -> float:
    pairs = zip(cluster.stop_sequence, cluster.stop_sequence[1:])
    total = 0.0
    for a, b in pairs:
        d = distances.get(a, b)
        if d is None:
            raise MissingGeoData(f"no distance entry for stop pair ({a}, {b})")
        total += d
    return total


def cluster_speed_kmh(feed: GtfsFeed, cluster: TripCluster, distances: DistanceTable) -> float:
    """Mean trip distance over mean cycle length, in km/h.

    All member trips share the stop sequence, so the mean trip distance is
    the sequence distance itself; cycle lengths vary per trip.
    """
    trips = _cluster_trips(feed, cluster)
    mean_cycle_min = sum(t.cycle_length_s for t in trips) / len(trips) / 60.0
    if mean_cycle_min <= 0:
        raise ZeroCycleLength(f"cluster {cluster.cluster_id} has non-positive mean cycle length")
    return sequence_distance_km(cluster, distances) / mean_cycle_min * 60.0


def route_speed_kmh(feed: GtfsFeed, clusters: list[TripCluster], distances: DistanceTable) -> float:
    speeds = [cluster_speed_kmh(feed, c, distances) for c in clusters]
    return sum(speeds) / len(speeds)


def annual_vkt_km(
    feed: GtfsFeed,
    clusters: list[TripCluster],
    distances: DistanceTable,
    representative_date: dt.date,
) -> float:
    """Representative-day kilometers across all clusters, scaled to a year."""
    daily = 0.0
    for cluster in clusters:
        trips_today = _trips_on_date(feed, cluster, representative_date)
        daily += sequence_distance_km(cluster, distances) * len(trips_today)
    return daily * 365.0


def _cluster_trips(feed: GtfsFeed, cluster: TripCluster) -> list[Trip]:
    wanted = set(cluster.trips)
    found = [t for t in feed.trips if t.trip_id in wanted]
    if not found:
        raise NoTrips(f"cluster {cluster.cluster_id} has no resolvable trips")
    return found


def _trips_on_date(feed: GtfsFeed, cluster: TripCluster, day: dt.date) -> list[Trip]:
    return [t for t in _cluster_trips(feed, cluster) if t.service_date == day]


# ---------------------------------------------------------------------------
# Energy, chargers, feasibility


def trip_energy_kwh(
    cluster: TripCluster,
    model: SurrogateModel,
    distances: DistanceTable,
    elevations: ElevationTable,
    passengers: float,
    ambient_temp_c: float,
) -> float:
    """Predicted energy for one traversal of the cluster's stop sequence.

    Sum over consecutive stop pairs of predicted efficiency times distance,
    with efficiency evaluated at (ridership, temperature, pair grade).
    """
    pairs = enrich_cluster(cluster, distances, elevations)
    if not pairs:
        return 0.0
    grades = [p.grade_rad for p in pairs]
    ee = model.predict_batch([passengers] * len(pairs), [ambient_temp_c] * len(pairs), grades)
    return float(sum(e * p.distance_km for e, p in zip(ee, pairs)))


def daily_cluster_energy_kwh(
    feed: GtfsFeed,
    cluster: TripCluster,
    model: SurrogateModel,
    distances: DistanceTable,
    elevations: ElevationTable,
    passengers: float,
    ambient_temp_c: float,
    representative_date: dt.date,
) -> float:
    """Total predicted energy of the cluster's representative-day service."""
    trips_today = _trips_on_date(feed, cluster, representative_date)
    if not trips_today:
        return 0.0
    per_trip = trip_energy_kwh(cluster, model, distances, elevations, passengers, ambient_temp_c)
    return per_trip * len(trips_today)


def chargers_required(
    daily_energies_kwh: list[float], charger: ChargerSpec, bus: BusSpec
) -> int:
    """Overnight depot chargers needed for the route's total daily energy."""
    total = sum(daily_energies_kwh)
    if total <= 0:
        return 0
    p_c = charger.effective_power_kw(bus)
    return math.ceil(total / (p_c * charger.fastest_charge_h * charger.efficiency))


def apportion_buses(total_buses: int, cluster_trip_counts: dict[str, int]) -> dict[str, int]:
    """Route buses attributed to each cluster by trip share, rounded up."""
    total_trips = sum(cluster_trip_counts.values())
    if total_trips == 0:
        return {cid: 0 for cid in cluster_trip_counts}
    return {
        cid: math.ceil(total_buses * count / total_trips)
        for cid, count in cluster_trip_counts.items()
    }


def range_feasible(daily_energy_kwh: float, battery_kwh: float, cluster_buses: int) -> bool:
    """True when the cluster's daily energy fits strictly inside the batteries."""
    return daily_energy_kwh < battery_kwh * cluster_buses


def estimate_fleet(
    feed: GtfsFeed,
    route_id: str,
    clusters: list[TripCluster],
    model: SurrogateModel,
    distances: DistanceTable,
    elevations: ElevationTable,
    bus: BusSpec,
    charger: ChargerSpec,
    ridership: float,
    avg_temp_c: float,
    lowest_temp_c: float,
    representative_date: dt.date,
) -> FleetEstimate:
    """Full per-route fleet picture used by the valuation stage."""
    inbound, outbound, total = buses_required(feed, route_id)

    speeds = {c.cluster_id: cluster_speed_kmh(feed, c, distances) for c in clusters}
    vkt = annual_vkt_km(feed, clusters, distances, representative_date)

    daily = {}
    daily_low = {}
    for c in clusters:
        daily[c.cluster_id] = daily_cluster_energy_kwh(
            feed, c, model, distances, elevations, ridership, avg_temp_c, representative_date
        )
        daily_low[c.cluster_id] = daily_cluster_energy_kwh(
            feed, c, model, distances, elevations, ridership, lowest_temp_c, representative_date
        )

    n_chargers = chargers_required(list(daily.values()), charger, bus)
    cluster_buses = apportion_buses(total, {c.cluster_id: c.trip_count for c in clusters})
    feasible = all(
        range_feasible(daily_low[c.cluster_id], bus.battery_kwh, cluster_buses[c.cluster_id])
        for c in clusters
    )

    return FleetEstimate(
        route_id=route_id,
        buses_inbound=inbound,
        buses_outbound=outbound,
        buses_total=total,
        chargers=n_chargers,
        cluster_speeds_kmh=speeds,
        route_speed_kmh=sum(speeds.values()) / len(speeds) if speeds else 0.0,
        annual_vkt_km=vkt,
        daily_energy_kwh=daily,
        daily_energy_low_temp_kwh=daily_low,
        cluster_buses=cluster_buses,
        feasible=feasible,
        needs_fast_charging=not feasible,
    )

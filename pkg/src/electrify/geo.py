"""Inter-stop distance, elevation, and road grade enrichment.

Distances and elevations come from pluggable providers hidden behind file
caches, so the pipeline never needs network access: the bundled offline
provider computes haversine distances on a spherical Earth and a flat
elevation profile, and the cache provider replays previously written CSVs.
"""

from __future__ import annotations

import csv
import math
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Protocol

from .errors import DegenerateSegment, GradeOutOfRange, MissingGeoData, PartialCoverage, ProviderUnavailable
from .gtfs import Stop, TripCluster

EARTH_RADIUS_KM = 6371.0


@dataclass(frozen=True)
class StopPairGeo:
    from_stop: str
    to_stop: str
    distance_km: float
    elevation_change_m: float
    grade_rad: float


class DistanceTable:
    """Directed (from_stop, to_stop) -> distance in km."""

    def __init__(self, entries: dict[tuple[str, str], float] | None = None):
        self._entries = dict(entries or {})
        for pair, d in self._entries.items():
            if d <= 0:
                raise DegenerateSegment(f"distance for {pair} must be positive, got {d}")

    def get(self, from_stop: str, to_stop: str) -> float | None:
        return self._entries.get((from_stop, to_stop))

    def items(self):
        return self._entries.items()

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, pair: tuple[str, str]) -> bool:
        return pair in self._entries


class ElevationTable:
    """stop_id -> elevation above sea level in meters."""

    def __init__(self, entries: dict[str, float] | None = None):
        self._entries = dict(entries or {})

    def get(self, stop_id: str) -> float | None:
        return self._entries.get(stop_id)

    def items(self):
        return self._entries.items()

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, stop_id: str) -> bool:
        return stop_id in self._entries


def compute_grade(delta_e_m: float, distance_km: float) -> float:
    """Road grade angle in radians from elevation change and path distance.

    grade = arcsin(delta_e / distance), both expressed in meters.
    """
    if distance_km <= 0:
        raise DegenerateSegment(f"distance must be positive, got {distance_km} km")
    ratio = delta_e_m / (1000.0 * distance_km)
    if abs(ratio) > 1:
        raise GradeOutOfRange(
            f"elevation change {delta_e_m} m over {distance_km} km gives |sin| = {abs(ratio):.3f} > 1"
        )
    return math.asin(ratio)


def enrich_cluster(
    cluster: TripCluster, distances: DistanceTable, elevations: ElevationTable
) -> list[StopPairGeo]:
    """One StopPairGeo per consecutive stop pair of the cluster's sequence."""
    pairs: list[StopPairGeo] = []
    seq = cluster.stop_sequence
    for a, b in zip(seq, seq[1:]):
        d = distances.get(a, b)
        if d is None:
            raise MissingGeoData(f"no distance entry for stop pair ({a}, {b})")
        ea, eb = elevations.get(a), elevations.get(b)
        if ea is None or eb is None:
            missing = a if ea is None else b
            raise MissingGeoData(f"no elevation entry for stop {missing}")
        delta = eb - ea
        pairs.append(StopPairGeo(a, b, d, delta, compute_grade(delta, d)))
    return pairs


# ---------------------------------------------------------------------------
# Providers


class GeoProvider(Protocol):
    def elevation_m(self, stop: Stop) -> float: ...

    def distance_km(self, from_stop: Stop, to_stop: Stop) -> float: ...


def haversine_km(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Great-circle distance on a sphere of radius EARTH_RADIUS_KM."""
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dp = p2 - p1
    dl = math.radians(lon2 - lon1)
    a = math.sin(dp / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dl / 2) ** 2
    return 2 * EARTH_RADIUS_KM * math.asin(math.sqrt(a))


class OfflineProvider:
    """Deterministic provider for tests and network-free runs.

    Distances are haversine great circles; the elevation profile is flat
    (0 m everywhere), so all offline grades are zero.
    """

    def __init__(self):
        self.calls = 0

    def elevation_m(self, stop: Stop) -> float:
        self.calls += 1
        return 0.0

    def distance_km(self, from_stop: Stop, to_stop: Stop) -> float:
        self.calls += 1
        d = haversine_km(from_stop.lat, from_stop.lon, to_stop.lat, to_stop.lon)
        if d <= 0:
            # co-located stops: fall back to a 1 m segment so grades stay defined
            return 1e-3
        return d


class CacheOnlyProvider:
    """Replays existing cache files; any cache miss is unavailable."""

    def elevation_m(self, stop: Stop) -> float:
        raise ProviderUnavailable(f"no cached elevation for stop {stop.stop_id}")

    def distance_km(self, from_stop: Stop, to_stop: Stop) -> float:
        raise ProviderUnavailable(
            f"no cached distance for pair ({from_stop.stop_id}, {to_stop.stop_id})"
        )


# ---------------------------------------------------------------------------
# File caches

_cache_write_lock = threading.Lock()


def load_distance_cache(path: str | Path) -> DistanceTable:
    entries: dict[tuple[str, str], float] = {}
    p = Path(path)
    if p.exists():
        with p.open(newline="", encoding="utf-8") as fh:
            for row in csv.DictReader(fh):
                entries[(row["from_stop"], row["to_stop"])] = float(row["distance_km"])
    return DistanceTable(entries)


def load_elevation_cache(path: str | Path) -> ElevationTable:
    entries: dict[str, float] = {}
    p = Path(path)
    if p.exists():
        with p.open(newline="", encoding="utf-8") as fh:
            for row in csv.DictReader(fh):
                entries[row["stop_id"]] = float(row["elevation_m"])
    return ElevationTable(entries)


def save_distance_cache(table: DistanceTable, path: str | Path) -> None:
    with _cache_write_lock:
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["from_stop", "to_stop", "distance_km"])
            for (a, b), d in sorted(table.items()):
                writer.writerow([a, b, repr(d)])


def save_elevation_cache(table: ElevationTable, path: str | Path) -> None:
    with _cache_write_lock:
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["stop_id", "elevation_m"])
            for stop_id, e in sorted(table.items()):
                writer.writerow([stop_id, repr(e)])


def fetch_and_cache(
    provider: GeoProvider,
    pairs: Iterable[tuple[str, str]],
    stops: dict[str, Stop],
    distance_cache: str | Path,
    elevation_cache: str | Path,
) -> tuple[DistanceTable, ElevationTable]:
    """Resolve distances and elevations, querying the provider only on cache misses.

    Cache files are (re)written after any fetch; a warm cache therefore
    serves repeat calls with zero provider queries. Unresolvable entries
    collect into a single PartialCoverage error naming every missing pair.
    """
    distances = dict(load_distance_cache(distance_cache).items())
    elevations = dict(load_elevation_cache(elevation_cache).items())

    wanted_pairs = sorted(set(pairs))
    wanted_stops = sorted({s for pair in wanted_pairs for s in pair})

    unresolved: list[str] = []
    fetched = False
    for stop_id in wanted_stops:
        if stop_id in elevations:
            continue
        stop = stops.get(stop_id)
        if stop is None:
            unresolved.append(f"stop:{stop_id}")
            continue
        try:
            elevations[stop_id] = provider.elevation_m(stop)
            fetched = True
        except ProviderUnavailable:
            unresolved.append(f"stop:{stop_id}")

    for a, b in wanted_pairs:
        if (a, b) in distances:
            continue
        sa, sb = stops.get(a), stops.get(b)
        if sa is None or sb is None:
            unresolved.append(f"pair:{a}->{b}")
            continue
        try:
            distances[(a, b)] = provider.distance_km(sa, sb)
            fetched = True
        except ProviderUnavailable:
            unresolved.append(f"pair:{a}->{b}")

    dist_table = DistanceTable(distances)
    elev_table = ElevationTable(elevations)
    if fetched:
        save_distance_cache(dist_table, distance_cache)
        save_elevation_cache(elev_table, elevation_cache)
    if unresolved:
        raise PartialCoverage(
            f"{len(unresolved)} geo entries unresolved: {', '.join(unresolved)}",
            unresolved=unresolved,
        )
    return dist_table, elev_table

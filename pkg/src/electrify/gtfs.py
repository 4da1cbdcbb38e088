"""GTFS static feed parsing, route selection, and trip clustering.

Parses the four mandatory GTFS CSV files (stops, routes, trips, stop_times)
into an immutable in-memory feed, expands service calendars into concrete
service dates, and groups each route's trips into clusters that share one
exact stop sequence.

Conventions:
  - arrival/departure times are stored as seconds since midnight and may
    exceed 86400 for overnight service, per common GTFS practice;
  - a trip whose service is active on several dates is expanded into one
    trip instance per date (ids suffixed ``@YYYYMMDD``), so "the day with
    the most trips" is well defined downstream.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import json
import logging
import re
from dataclasses import dataclass
from pathlib import Path

from .errors import DanglingReference, MalformedRow, MissingFile, UnknownRouteName

logger = logging.getLogger(__name__)

MANDATORY_FILES = ("stops.txt", "routes.txt", "trips.txt", "stop_times.txt")

# GTFS route_type -> mode label. Extended codes 700-799 are also buses.
_ROUTE_TYPE_MODES = {
    0: "tram",
    1: "metro",
    2: "rail",
    3: "bus",
    4: "ferry",
    5: "cable_tram",
    6: "aerial_lift",
    7: "funicular",
    11: "trolleybus",
    12: "monorail",
}

# Placeholder service date for feeds that ship no calendar information.
FALLBACK_SERVICE_DATE = dt.date(1970, 1, 1)

_TIME_RE = re.compile(r"^(\d{1,3}):([0-5]\d):([0-5]\d)$")

INBOUND = "inbound"
OUTBOUND = "outbound"


@dataclass(frozen=True)
class Stop:
    stop_id: str
    name: str
    lat: float
    lon: float


@dataclass(frozen=True)
class RouteInfo:
    route_id: str
    short_name: str
    mode: str

    @property
    def is_bus(self) -> bool:
        return self.mode == "bus"


@dataclass(frozen=True)
class StopEvent:
    stop_id: str
    arrival_s: int
    departure_s: int


@dataclass(frozen=True)
class Trip:
    trip_id: str
    route_id: str
    direction: str  # "inbound" | "outbound"
    service_date: dt.date
    stop_events: tuple[StopEvent, ...]

    @property
    def first_departure_s(self) -> int:
        return self.stop_events[0].departure_s

    @property
    def last_arrival_s(self) -> int:
        return self.stop_events[-1].arrival_s

    @property
    def cycle_length_s(self) -> int:
        """Duration from first departure to last arrival."""
        return self.last_arrival_s - self.first_departure_s


@dataclass(frozen=True)
class GtfsFeed:
    stops: dict[str, Stop]
    routes: dict[str, RouteInfo]
    trips: tuple[Trip, ...]
    feed_window: tuple[dt.date, dt.date]

    def trips_of_route(self, route_id: str) -> list[Trip]:
        return [t for t in self.trips if t.route_id == route_id]

    def service_dates(self) -> list[dt.date]:
        return sorted({t.service_date for t in self.trips})


@dataclass(frozen=True)
class TripCluster:
    cluster_id: str
    route_id: str
    direction: str
    stop_sequence: tuple[str, ...]
    trips: tuple[str, ...]  # member trip ids

    @property
    def trip_count(self) -> int:
        return len(self.trips)


# ---------------------------------------------------------------------------
# CSV helpers


def _parse_gtfs_time(value: str, filename: str, line: int) -> int:
    m = _TIME_RE.match(value.strip())
    if not m:
        raise MalformedRow(
            f"{filename}:{line}: bad time {value!r} (expected HH:MM:SS)",
            filename=filename,
            line=line,
        )
    h, mi, s = (int(g) for g in m.groups())
    return h * 3600 + mi * 60 + s


def _parse_gtfs_date(value: str, filename: str, line: int) -> dt.date:
    try:
        return dt.datetime.strptime(value.strip(), "%Y%m%d").date()
    except ValueError:
        raise MalformedRow(
            f"{filename}:{line}: bad date {value!r} (expected YYYYMMDD)",
            filename=filename,
            line=line,
        ) from None


def _read_rows(directory: Path, filename: str, required: tuple[str, ...]):
    """Yield (line_number, row_dict) for a GTFS CSV, checking required columns."""
    path = directory / filename
    text = path.read_text(encoding="utf-8-sig")
    reader = csv.DictReader(io.StringIO(text))
    header = reader.fieldnames or []
    missing = [c for c in required if c not in header]
    if missing:
        raise MalformedRow(
            f"{filename}: missing required column(s) {', '.join(missing)}",
            filename=filename,
            line=1,
        )
    for line, row in enumerate(reader, start=2):
        if all((v is None or v.strip() == "") for v in row.values()):
            continue
        yield line, {k: (v or "").strip() for k, v in row.items() if k is not None}


def _float_field(row: dict, key: str, filename: str, line: int) -> float:
    try:
        return float(row[key])
    except (ValueError, KeyError):
        raise MalformedRow(
            f"{filename}:{line}: bad numeric value for {key}: {row.get(key)!r}",
            filename=filename,
            line=line,
        ) from None


# ---------------------------------------------------------------------------
# Calendar expansion

_WEEKDAY_COLS = ("monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday")


def _service_dates_from_calendar(directory: Path) -> dict[str, set[dt.date]]:
    """service_id -> set of active dates, from calendar.txt and calendar_dates.txt.

    Both files are optional; with neither present every service is pinned to
    a single fallback date so that each trips.txt row yields one trip.
    """
    active: dict[str, set[dt.date]] = {}
    cal_path = directory / "calendar.txt"
    if cal_path.exists():
        required = ("service_id", "start_date", "end_date") + _WEEKDAY_COLS
        for line, row in _read_rows(directory, "calendar.txt", required):
            start = _parse_gtfs_date(row["start_date"], "calendar.txt", line)
            end = _parse_gtfs_date(row["end_date"], "calendar.txt", line)
            weekdays = {i for i, col in enumerate(_WEEKDAY_COLS) if row[col] == "1"}
            dates = active.setdefault(row["service_id"], set())
            day = start
            while day <= end:
                if day.weekday() in weekdays:
                    dates.add(day)
                day += dt.timedelta(days=1)
    cd_path = directory / "calendar_dates.txt"
    if cd_path.exists():
        for line, row in _read_rows(
            directory, "calendar_dates.txt", ("service_id", "date", "exception_type")
        ):
            day = _parse_gtfs_date(row["date"], "calendar_dates.txt", line)
            dates = active.setdefault(row["service_id"], set())
            if row["exception_type"] == "1":
                dates.add(day)
            elif row["exception_type"] == "2":
                dates.discard(day)
            else:
                raise MalformedRow(
                    f"calendar_dates.txt:{line}: bad exception_type {row['exception_type']!r}",
                    filename="calendar_dates.txt",
                    line=line,
                )
    return active


# ---------------------------------------------------------------------------
# Feed parsing


def parse_feed(feed_directory: str | Path) -> GtfsFeed:
    """Parse a GTFS directory into a fully cross-referenced feed.

    Raises MissingFile if a mandatory file is absent, MalformedRow on schema
    violations (with file and line), and DanglingReference when a row points
    at an id that does not exist in the feed.
    """
    directory = Path(feed_directory)
    for name in MANDATORY_FILES:
        if not (directory / name).exists():
            raise MissingFile(f"mandatory GTFS file {name} not found in {directory}")

    stops: dict[str, Stop] = {}
    for line, row in _read_rows(directory, "stops.txt", ("stop_id", "stop_name", "stop_lat", "stop_lon")):
        lat = _float_field(row, "stop_lat", "stops.txt", line)
        lon = _float_field(row, "stop_lon", "stops.txt", line)
        if not -90 <= lat <= 90 or not -180 <= lon <= 180:
            raise MalformedRow(
                f"stops.txt:{line}: coordinates out of range ({lat}, {lon})",
                filename="stops.txt",
                line=line,
            )
        if row["stop_id"] in stops:
            raise MalformedRow(
                f"stops.txt:{line}: duplicate stop_id {row['stop_id']!r}",
                filename="stops.txt",
                line=line,
            )
        stops[row["stop_id"]] = Stop(row["stop_id"], row["stop_name"], lat, lon)

    routes: dict[str, RouteInfo] = {}
    for line, row in _read_rows(directory, "routes.txt", ("route_id", "route_short_name", "route_type")):
        try:
            rtype = int(row["route_type"])
        except ValueError:
            raise MalformedRow(
                f"routes.txt:{line}: bad route_type {row['route_type']!r}",
                filename="routes.txt",
                line=line,
            ) from None
        mode = "bus" if 700 <= rtype <= 799 else _ROUTE_TYPE_MODES.get(rtype, f"type_{rtype}")
        routes[row["route_id"]] = RouteInfo(row["route_id"], row["route_short_name"], mode)

    # trips.txt rows, before calendar expansion
    trip_rows: dict[str, dict] = {}
    for line, row in _read_rows(directory, "trips.txt", ("route_id", "service_id", "trip_id")):
        if row["route_id"] not in routes:
            raise DanglingReference(
                f"trips.txt:{line}: trip {row['trip_id']!r} references unknown route "
                f"{row['route_id']!r} (row: {row})"
            )
        if row["trip_id"] in trip_rows:
            raise MalformedRow(
                f"trips.txt:{line}: duplicate trip_id {row['trip_id']!r}",
                filename="trips.txt",
                line=line,
            )
        trip_rows[row["trip_id"]] = row

    events: dict[str, list[tuple[int, StopEvent]]] = {t: [] for t in trip_rows}
    for line, row in _read_rows(
        directory, "stop_times.txt", ("trip_id", "arrival_time", "departure_time", "stop_id", "stop_sequence")
    ):
        if row["trip_id"] not in trip_rows:
            raise DanglingReference(
                f"stop_times.txt:{line}: unknown trip_id {row['trip_id']!r} (row: {row})"
            )
        if row["stop_id"] not in stops:
            raise DanglingReference(
                f"stop_times.txt:{line}: unknown stop_id {row['stop_id']!r} (row: {row})"
            )
        arr = _parse_gtfs_time(row["arrival_time"], "stop_times.txt", line)
        dep = _parse_gtfs_time(row["departure_time"], "stop_times.txt", line)
        if dep < arr:
            raise MalformedRow(
                f"stop_times.txt:{line}: departure {row['departure_time']} precedes arrival",
                filename="stop_times.txt",
                line=line,
            )
        try:
            seq = int(row["stop_sequence"])
        except ValueError:
            raise MalformedRow(
                f"stop_times.txt:{line}: bad stop_sequence {row['stop_sequence']!r}",
                filename="stop_times.txt",
                line=line,
            ) from None
        events[row["trip_id"]].append((seq, StopEvent(row["stop_id"], arr, dep)))

    service_dates = _service_dates_from_calendar(directory)

    trips: list[Trip] = []
    for trip_id, row in trip_rows.items():
        raw = events[trip_id]
        if not raw:
            raise DanglingReference(
                f"trips.txt: trip {trip_id!r} has no stop_times rows"
            )
        raw.sort(key=lambda pair: pair[0])
        ordered = tuple(ev for _, ev in raw)
        prev = ordered[0]
        for ev in ordered[1:]:
            if ev.arrival_s < prev.arrival_s:
                raise MalformedRow(
                    f"stop_times.txt: trip {trip_id!r} has decreasing arrival times",
                    filename="stop_times.txt",
                )
            prev = ev
        direction = _direction_from_row(row)
        dates = sorted(service_dates.get(row["service_id"], set()))
        if not dates:
            if service_dates:
                raise DanglingReference(
                    f"trips.txt: trip {trip_id!r} references service "
                    f"{row['service_id']!r} with no active dates"
                )
            dates = [FALLBACK_SERVICE_DATE]
        for day in dates:
            instance_id = trip_id if len(dates) == 1 else f"{trip_id}@{day:%Y%m%d}"
            trips.append(Trip(instance_id, row["route_id"], direction or "", day, ordered))

    trips = _infer_missing_directions(trips)
    trips.sort(key=lambda t: (t.route_id, t.service_date, t.first_departure_s, t.trip_id))

    all_dates = sorted({t.service_date for t in trips}) or [FALLBACK_SERVICE_DATE]
    feed = GtfsFeed(
        stops=stops,
        routes=routes,
        trips=tuple(trips),
        feed_window=(all_dates[0], all_dates[-1]),
    )
    logger.info(
        "parsed feed: %d stops, %d routes, %d trips, window %s..%s",
        len(stops), len(routes), len(trips), feed.feed_window[0], feed.feed_window[1],
    )
    return feed


def _direction_from_row(row: dict) -> str | None:
    value = row.get("direction_id", "")
    if value == "0":
        return OUTBOUND
    if value == "1":
        return INBOUND
    return None


def _infer_missing_directions(trips: list[Trip]) -> list[Trip]:
    """Fill in direction for trips lacking direction_id.

    The first-seen trip of each route fixes the outbound orientation; trips
    running between the same endpoints in reverse are inbound.
    """
    reference: dict[str, tuple[str, str]] = {}
    resolved: list[Trip] = []
    for trip in trips:
        if trip.direction:
            resolved.append(trip)
            continue
        endpoints = (trip.stop_events[0].stop_id, trip.stop_events[-1].stop_id)
        ref = reference.setdefault(trip.route_id, endpoints)
        direction = INBOUND if endpoints == (ref[1], ref[0]) and endpoints != ref else OUTBOUND
        resolved.append(Trip(trip.trip_id, trip.route_id, direction, trip.service_date, trip.stop_events))
    return resolved


# ---------------------------------------------------------------------------
# Skipped-stop filtering and clustering


def filter_skipped_stops(trip: Trip) -> Trip:
    """Collapse runs of consecutive events sharing an arrival time.

    When consecutive stops carry the same arrival time the vehicle visited
    only the first; the rest are schedule placeholders for skipped stops.
    Idempotent, never increases the event count.
    """
    kept: list[StopEvent] = []
    prev_arrival: int | None = None
    for ev in trip.stop_events:
        if prev_arrival is not None and ev.arrival_s == prev_arrival:
            continue
        kept.append(ev)
        prev_arrival = ev.arrival_s
    if len(kept) == len(trip.stop_events):
        return trip
    return Trip(trip.trip_id, trip.route_id, trip.direction, trip.service_date, tuple(kept))


def select_routes(feed: GtfsFeed, allowed_short_names: list[str]) -> list[str]:
    """Resolve an allow-list of route short names to bus route ids.

    Non-bus modes (trams, metro trains, trolleybuses, ...) are always
    excluded, with a warning when the allow-list names one. An allow-list
    entry matching nothing in the feed raises UnknownRouteName.
    """
    by_name: dict[str, list[RouteInfo]] = {}
    for info in feed.routes.values():
        by_name.setdefault(info.short_name, []).append(info)

    selected: list[str] = []
    for name in allowed_short_names:
        matches = by_name.get(name)
        if not matches:
            raise UnknownRouteName(f"allow-list route {name!r} not present in feed")
        buses = [m for m in matches if m.is_bus]
        for m in matches:
            if not m.is_bus:
                logger.warning(
                    "route %s (%s) excluded: mode %s is not a bus", name, m.route_id, m.mode
                )
        selected.extend(sorted(m.route_id for m in buses))
    return selected


def cluster_trips(feed: GtfsFeed, route_id: str, min_trips: int = 1) -> list[TripCluster]:
    """Partition a route's trips into clusters of identical stop sequences.

    Trips are first run through filter_skipped_stops; the cluster key is the
    (direction, stop sequence) pair. Clusters are ordered by descending trip
    count, ties broken by first appearance.
    """
    order: list[tuple[str, tuple[str, ...]]] = []
    members: dict[tuple[str, tuple[str, ...]], list[str]] = {}
    for trip in feed.trips_of_route(route_id):
        filtered = filter_skipped_stops(trip)
        key = (filtered.direction, tuple(ev.stop_id for ev in filtered.stop_events))
        if key not in members:
            members[key] = []
            order.append(key)
        members[key].append(filtered.trip_id)

    first_seen = {key: i for i, key in enumerate(order)}
    ranked = sorted(order, key=lambda key: (-len(members[key]), first_seen[key]))
    clusters = []
    for k, key in enumerate(ranked):
        if len(members[key]) < min_trips:
            continue
        clusters.append(
            TripCluster(
                cluster_id=f"{route_id}:c{k}",
                route_id=route_id,
                direction=key[0],
                stop_sequence=key[1],
                trips=tuple(members[key]),
            )
        )
    return clusters


def representative_service_date(feed: GtfsFeed, route_ids: list[str]) -> dt.date:
    """The feed day with the most trips over the given routes (ties: earliest)."""
    counts: dict[dt.date, int] = {}
    for trip in feed.trips:
        if trip.route_id in route_ids:
            counts[trip.service_date] = counts.get(trip.service_date, 0) + 1
    if not counts:
        raise NoTrips(f"no trips found for routes {route_ids!r}")
    best = max(sorted(counts), key=lambda d: counts[d])
    return best


# ---------------------------------------------------------------------------
# Feed archive (JSON) round-trip


ARCHIVE_FORMAT = "electrify-feed/1"


def save_feed(feed: GtfsFeed, path: str | Path) -> None:
    payload = {
        "format": ARCHIVE_FORMAT,
        "feed_window": [feed.feed_window[0].isoformat(), feed.feed_window[1].isoformat()],
        "stops": [
            {"stop_id": s.stop_id, "name": s.name, "lat": s.lat, "lon": s.lon}
            for s in sorted(feed.stops.values(), key=lambda s: s.stop_id)
        ],
        "routes": [
            {"route_id": r.route_id, "short_name": r.short_name, "mode": r.mode}
            for r in sorted(feed.routes.values(), key=lambda r: r.route_id)
        ],
        "trips": [
            {
                "trip_id": t.trip_id,
                "route_id": t.route_id,
                "direction": t.direction,
                "service_date": t.service_date.isoformat(),
                "stop_events": [[e.stop_id, e.arrival_s, e.departure_s] for e in t.stop_events],
            }
            for t in feed.trips
        ],
    }
    Path(path).write_text(json.dumps(payload, indent=1, sort_keys=True), encoding="utf-8")


def load_feed(path: str | Path) -> GtfsFeed:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    if payload.get("format") != ARCHIVE_FORMAT:
        raise MalformedRow(f"{path}: not a feed archive (format={payload.get('format')!r})")
    stops = {s["stop_id"]: Stop(s["stop_id"], s["name"], s["lat"], s["lon"]) for s in payload["stops"]}
    routes = {
        r["route_id"]: RouteInfo(r["route_id"], r["short_name"], r["mode"]) for r in payload["routes"]
    }
    trips = tuple(
        Trip(
            t["trip_id"],
            t["route_id"],
            t["direction"],
            dt.date.fromisoformat(t["service_date"]),
            tuple(StopEvent(e[0], e[1], e[2]) for e in t["stop_events"]),
        )
        for t in payload["trips"]
    )
    window = (
        dt.date.fromisoformat(payload["feed_window"][0]),
        dt.date.fromisoformat(payload["feed_window"][1]),
    )
    return GtfsFeed(stops=stops, routes=routes, trips=trips, feed_window=window)

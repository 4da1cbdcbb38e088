"""Shared fixtures: a hand-built mini GTFS feed, geo tables, and a trained model.

The mini feed has 3 routes (201 and 202 are buses, 210 is a tram), 12
trips, and 8 stops, all on one service day (2020-03-02). Hand-derived
facts asserted throughout the suite:

  route 201: outbound 4 trips (S1-S2-S3-S4, 30 min cycle, 10 min headway
             -> 3 buses), inbound 2 trips (30 min cycle, 15 min headway
             -> 2 buses); sequence distance 3.5 km; speed 7.0 km/h;
             daily km = 6 * 3.5 = 21.
  route 202: outbound 3 full trips (S5-S6-S7-S8, 24 min cycle, 12 min
             headway -> 2 buses) plus 1 trip with S7 skipped (same arrival
             as S6); both sequences are 3.0 km; speed 7.5 km/h;
             daily km = 12.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import pytest

from electrify.config import RunConfig
from electrify.geo import DistanceTable, ElevationTable, save_distance_cache, save_elevation_cache
from electrify.gtfs import GtfsFeed, parse_feed, save_feed
from electrify.physics import BusSpec, HvacModel, synthetic_stop_and_go
from electrify.surrogate import (
    ElasticNetConfig,
    ScenarioDistributions,
    SurrogateModel,
    monthly_mixture,
    sample_scenarios,
    simulate_targets,
    train_surrogate,
)

SERVICE_DAY = "20200302"

_session_start = 0.0


def pytest_configure(config):
    global _session_start
    import time

    _session_start = time.perf_counter()


def pytest_sessionfinish(session, exitstatus):
    import time

    elapsed = time.perf_counter() - _session_start
    verdict = "PASS" if elapsed < 60.0 else "FAIL"
    print(f"\nACCEPTANCE suite-duration: {elapsed:.1f} s (< 60 s budget: {verdict})")

BOSTON_MONTHLY = [-5.0, -1.0, 3.0, 9.0, 15.0, 20.0, 24.0, 23.0, 19.0, 13.2, 7.0, 4.8]

STOPS = [
    ("S1", "Main & First", 42.25, -71.00),
    ("S2", "Main & Second", 42.26, -71.00),
    ("S3", "Main & Third", 42.27, -71.00),
    ("S4", "Main & Fourth", 42.28, -71.00),
    ("S5", "Oak & First", 42.25, -70.99),
    ("S6", "Oak & Second", 42.26, -70.99),
    ("S7", "Oak & Third", 42.27, -70.99),
    ("S8", "Oak & Fourth", 42.28, -70.99),
]

ROUTES = [
    ("r201", "201", 3),
    ("r202", "202", 3),
    ("r210", "210", 0),  # tram, always filtered out
]

DISTANCES_KM = {
    ("S1", "S2"): 1.2, ("S2", "S3"): 0.8, ("S3", "S4"): 1.5,
    ("S4", "S3"): 1.5, ("S3", "S2"): 0.8, ("S2", "S1"): 1.2,
    ("S5", "S6"): 1.0, ("S6", "S7"): 1.1, ("S7", "S8"): 0.9,
    ("S6", "S8"): 2.0,
    ("S1", "S5"): 0.85, ("S5", "S1"): 0.85,
}

ELEVATIONS_M = {
    "S1": 10.0, "S2": 15.0, "S3": 12.0, "S4": 20.0,
    "S5": 0.0, "S6": 5.0, "S7": 2.0, "S8": 8.0,
}


def _stop_times(trip_id: str, legs: list[tuple[str, str, str]]) -> list[list[str]]:
    rows = []
    for seq, (stop, arr, dep) in enumerate(legs, start=1):
        rows.append([trip_id, arr, dep, stop, str(seq)])
    return rows


def _hhmmss(minutes_from_midnight: int) -> str:
    return f"{minutes_from_midnight // 60:02d}:{minutes_from_midnight % 60:02d}:00"


def write_mini_gtfs(directory: Path) -> None:
    directory.mkdir(parents=True, exist_ok=True)

    def write(name: str, header: list[str], rows: list[list]):
        with (directory / name).open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            w.writerows(rows)

    write("stops.txt", ["stop_id", "stop_name", "stop_lat", "stop_lon"],
          [[s, n, str(lat), str(lon)] for s, n, lat, lon in STOPS])
    write("routes.txt", ["route_id", "route_short_name", "route_type"],
          [[rid, sn, str(t)] for rid, sn, t in ROUTES])
    write("calendar.txt",
          ["service_id", "monday", "tuesday", "wednesday", "thursday", "friday",
           "saturday", "sunday", "start_date", "end_date"],
          [["WK1", "1", "0", "0", "0", "0", "0", "0", SERVICE_DAY, SERVICE_DAY]])

    trips = []
    stop_times: list[list[str]] = []

    # route 201 outbound: 4 trips every 10 min, 10 min per leg (30 min cycle)
    for k in range(4):
        tid = f"t201_o{k + 1}"
        trips.append(["r201", "WK1", tid, "0"])
        start = 8 * 60 + 10 * k
        times = [_hhmmss(start + 10 * i) for i in range(4)]
        legs = [(s, t, t) for s, t in zip(["S1", "S2", "S3", "S4"], times)]
        stop_times += _stop_times(tid, legs)

    # route 201 inbound: 2 trips, 15 min apart, 10 min per leg
    for k in range(2):
        tid = f"t201_i{k + 1}"
        trips.append(["r201", "WK1", tid, "1"])
        start = 9 * 60 + 15 * k
        times = [_hhmmss(start + 10 * i) for i in range(4)]
        legs = [(s, t, t) for s, t in zip(["S4", "S3", "S2", "S1"], times)]
        stop_times += _stop_times(tid, legs)

    # route 202 outbound: 3 full trips every 12 min, 8 min per leg (24 min cycle)
    for k in range(3):
        tid = f"t202_o{k + 1}"
        trips.append(["r202", "WK1", tid, "0"])
        start = 7 * 60 + 12 * k
        times = [_hhmmss(start + 8 * i) for i in range(4)]
        legs = [(s, t, t) for s, t in zip(["S5", "S6", "S7", "S8"], times)]
        stop_times += _stop_times(tid, legs)

    # route 202 skip trip: S7 shares S6's arrival time, so S7 is skipped
    trips.append(["r202", "WK1", "t202_s1", "0"])
    stop_times += _stop_times("t202_s1", [
        ("S5", "08:00:00", "08:00:00"),
        ("S6", "08:08:00", "08:08:00"),
        ("S7", "08:08:00", "08:08:00"),
        ("S8", "08:24:00", "08:24:00"),
    ])

    # route 210 (tram): 2 trips, never selected
    for k in range(2):
        tid = f"t210_{k + 1}"
        trips.append(["r210", "WK1", tid, "0"])
        start = 10 * 60 + 30 * k
        stop_times += _stop_times(tid, [
            ("S1", _hhmmss(start), _hhmmss(start)),
            ("S5", _hhmmss(start + 10), _hhmmss(start + 10)),
        ])

    write("trips.txt", ["route_id", "service_id", "trip_id", "direction_id"], trips)
    write("stop_times.txt",
          ["trip_id", "arrival_time", "departure_time", "stop_id", "stop_sequence"],
          stop_times)


@pytest.fixture(scope="session")
def gtfs_dir(tmp_path_factory) -> Path:
    directory = tmp_path_factory.mktemp("gtfs") / "mini"
    write_mini_gtfs(directory)
    return directory


@pytest.fixture(scope="session")
def feed(gtfs_dir) -> GtfsFeed:
    return parse_feed(gtfs_dir)


@pytest.fixture(scope="session")
def distances() -> DistanceTable:
    return DistanceTable(DISTANCES_KM)


@pytest.fixture(scope="session")
def elevations() -> ElevationTable:
    return ElevationTable(ELEVATIONS_M)


@pytest.fixture(scope="session")
def drive_cycle():
    return synthetic_stop_and_go()


@pytest.fixture(scope="session")
def surrogate_model(drive_cycle) -> SurrogateModel:
    """Desk-scale surrogate shared by fleet/valuation/pipeline tests."""
    grades = (0.0041667, -0.00375, 0.0053333, -0.0041667, 0.00375,
              -0.0053333, 0.005, -0.0027273, 0.0066667, 0.0015)
    dists = ScenarioDistributions(
        passenger_max=40,
        temp_mixture=monthly_mixture(BOSTON_MONTHLY),
        grade_source=grades,
    )
    samples = sample_scenarios(dists, 1500, seed=11)
    targets = simulate_targets(drive_cycle, samples, BusSpec(), HvacModel())
    return train_surrogate(samples, targets, ElasticNetConfig(seed=11))


@pytest.fixture(scope="session")
def artifacts_dir(tmp_path_factory, gtfs_dir, feed, distances, elevations, surrogate_model) -> Path:
    """Directory with every pipeline artifact plus a run-config file."""
    directory = tmp_path_factory.mktemp("artifacts")
    save_feed(feed, directory / "feed.json")
    save_distance_cache(distances, directory / "distances.csv")
    save_elevation_cache(elevations, directory / "elevations.csv")
    surrogate_model.save(directory / "model.json")
    config = {
        "feed": "feed.json",
        "distances": "distances.csv",
        "elevations": "elevations.csv",
        "model": "model.json",
        "profile": "boston",
        "seed": 11,
        "routes": ["201", "202"],
    }
    (directory / "config.json").write_text(json.dumps(config, indent=1), encoding="utf-8")
    return directory


@pytest.fixture(scope="session")
def run_config(artifacts_dir) -> RunConfig:
    from electrify.config import load_run_config

    return load_run_config(artifacts_dir / "config.json")

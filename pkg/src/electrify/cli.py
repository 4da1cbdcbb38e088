"""Command-line pipeline driver.

Subcommands mirror the pipeline stages: ingest -> enrich -> train ->
valuate -> report, plus `serve` for the HTTP service and `params show`
for the built-in profiles. Every stage writes its artifact and a small
JSON log next to it. Module errors exit 1 with a machine-parsable
{"error": category, "message": ...} line on stderr; usage errors exit 2.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

from .analysis import report_to_csv_text, report_to_json_text
from .config import RunConfig, load_run_config, read_allow_list
from .errors import ElectrifyError, MissingInput
from .geo import (
    CacheOnlyProvider,
    OfflineProvider,
    fetch_and_cache,
    load_distance_cache,
    load_elevation_cache,
)
from .gtfs import (
    cluster_trips,
    load_feed,
    parse_feed,
    representative_service_date,
    save_feed,
    select_routes,
)
from .physics import load_drive_cycle
from .pipeline import LoadedState, load_state, train_from_state, valuation_report
from .profiles import apply_overrides, get_profile
from .surrogate import ElasticNetConfig

logger = logging.getLogger(__name__)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level.upper(), logging.INFO))
    try:
        return args.handler(args)
    except MissingInput as exc:
        print(json.dumps({"error": exc.category, "message": exc.message}), file=sys.stderr)
        return 2
    except ElectrifyError as exc:
        print(json.dumps({"error": exc.category, "message": exc.message}), file=sys.stderr)
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="electrify",
        description="Transit bus electrification valuation from GTFS data",
    )
    parser.add_argument("--log-level", default="WARNING")
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("ingest", help="parse a GTFS directory into a feed archive")
    p.add_argument("--gtfs", required=True, help="GTFS directory")
    p.add_argument("--routes", help="allow-list file of route short names, one per line")
    p.add_argument("--out", required=True, help="feed archive output path")
    p.set_defaults(handler=cmd_ingest)

    p = sub.add_parser("enrich", help="resolve stop-pair distances and elevations into caches")
    p.add_argument("--config")
    p.add_argument("--feed", help="feed archive")
    p.add_argument("--distances", help="distance cache CSV (read/write)")
    p.add_argument("--elevations", help="elevation cache CSV (read/write)")
    p.add_argument("--provider", choices=["offline", "cache"], default="offline")
    p.set_defaults(handler=cmd_enrich)

    p = sub.add_parser("train", help="fit the energy-efficiency surrogate")
    p.add_argument("--config")
    p.add_argument("--feed")
    p.add_argument("--distances")
    p.add_argument("--elevations")
    p.add_argument("--cycle", help="drive-cycle CSV (default: bundled synthetic cycle)")
    p.add_argument("--samples", type=int, default=20_000)
    p.add_argument("--seed", type=int)
    p.add_argument("--profile")
    p.add_argument("--out", required=True, help="model output path")
    p.set_defaults(handler=cmd_train)

    p = sub.add_parser("fleet", help="estimate fleet parameters only (no cost model)")
    p.add_argument("--config")
    p.add_argument("--feed")
    p.add_argument("--distances")
    p.add_argument("--elevations")
    p.add_argument("--model")
    p.add_argument("--profile")
    p.add_argument("--out", required=True, help="fleet report output path")
    p.set_defaults(handler=cmd_fleet)

    p = sub.add_parser("valuate", help="run fleet + valuation + analysis end to end")
    p.add_argument("--config")
    p.add_argument("--feed")
    p.add_argument("--distances")
    p.add_argument("--elevations")
    p.add_argument("--model")
    p.add_argument("--profile")
    p.add_argument("--seed", type=int)
    p.add_argument("--routes", help="comma-separated route short names (default: config)")
    p.add_argument("--out", help="report JSON path (default: config report or report.json)")
    p.add_argument("--csv", help="also write the flat CSV report here")
    p.set_defaults(handler=cmd_valuate)

    p = sub.add_parser("report", help="re-emit CSV/summary from an existing report.json")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--csv")
    p.set_defaults(handler=cmd_report)

    p = sub.add_parser("serve", help="run the JSON HTTP service")
    p.add_argument("--config")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(handler=cmd_serve)

    p = sub.add_parser("params", help="inspect parameter profiles")
    params_sub = p.add_subparsers(dest="params_cmd", required=True)
    show = params_sub.add_parser("show", help="print a profile's defaults as JSON")
    show.add_argument("--profile", default="boston")
    show.set_defaults(handler=cmd_params_show)

    return parser


def _merged_config(args, flags: tuple[str, ...]) -> RunConfig:
    cfg = load_run_config(getattr(args, "config", None))
    for name in flags:
        value = getattr(args, name, None)
        if value is not None:
            setattr(cfg, name, value)
    return cfg


def _write_log(artifact: Path, info: dict) -> None:
    log_path = artifact.with_name(artifact.name + ".log")
    log_path.write_text(json.dumps(info, indent=1, sort_keys=True) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# Handlers


def cmd_ingest(args) -> int:
    feed = parse_feed(args.gtfs)
    if args.routes:
        names = read_allow_list(args.routes)
        route_ids = select_routes(feed, names)
    else:
        route_ids = sorted(r.route_id for r in feed.routes.values() if r.is_bus)
    out = Path(args.out)
    save_feed(feed, out)
    _write_log(out, {
        "command": "ingest",
        "gtfs": str(args.gtfs),
        "stops": len(feed.stops),
        "routes": len(feed.routes),
        "selected_routes": route_ids,
        "trips": len(feed.trips),
    })
    print(f"wrote {out} ({len(feed.trips)} trips, {len(route_ids)} selected routes)")
    return 0


def cmd_enrich(args) -> int:
    cfg = _merged_config(args, ("feed", "distances", "elevations"))
    feed = load_feed(cfg.existing_path("feed"))
    if cfg.distances is None or cfg.elevations is None:
        raise MissingInput("enrich needs --distances and --elevations cache paths", field="distances")

    pairs = set()
    stops_needed = set()
    route_ids = select_routes(feed, cfg.routes) if cfg.routes else [
        r.route_id for r in feed.routes.values() if r.is_bus
    ]
    for rid in sorted(route_ids):
        for cluster in cluster_trips(feed, rid):
            seq = cluster.stop_sequence
            pairs.update(zip(seq, seq[1:]))
            stops_needed.update(seq)

    provider = OfflineProvider() if args.provider == "offline" else CacheOnlyProvider()
    dist_path, elev_path = cfg.resolve(cfg.distances), cfg.resolve(cfg.elevations)
    distances, elevations = fetch_and_cache(provider, sorted(pairs), feed.stops, dist_path, elev_path)
    _write_log(dist_path, {
        "command": "enrich",
        "provider": args.provider,
        "pairs": len(distances),
        "stops": len(elevations),
    })
    print(f"geo caches ready: {len(distances)} pairs, {len(elevations)} stops")
    return 0


def cmd_train(args) -> int:
    cfg = _merged_config(args, ("feed", "distances", "elevations", "cycle", "profile", "seed"))
    state = _state_without_model(cfg)
    cycle = load_drive_cycle(cfg.resolve(cfg.cycle)) if cfg.cycle else None
    model = train_from_state(
        state, cycle=cycle, n_samples=args.samples, seed=cfg.seed,
        cfg=ElasticNetConfig(seed=cfg.seed),
    )
    out = Path(args.out)
    model.save(out)
    _write_log(out, {
        "command": "train",
        "samples": args.samples,
        "seed": cfg.seed,
        "train_rmse": model.train_rmse,
        "test_rmse": model.test_rmse,
        "model_hash": model.content_hash,
    })
    print(f"wrote {out} (test RMSE {model.test_rmse:.6f} kWh/km, hash {model.content_hash[:12]})")
    return 0


def _state_without_model(cfg: RunConfig) -> LoadedState:
    """LoadedState for stages that run before a model exists."""
    feed = load_feed(cfg.existing_path("feed"))
    distances = load_distance_cache(cfg.existing_path("distances"))
    elevations = load_elevation_cache(cfg.existing_path("elevations"))
    profile = apply_overrides(get_profile(cfg.profile), cfg.overrides)
    route_ids = select_routes(feed, cfg.routes) if cfg.routes else sorted(
        r.route_id for r in feed.routes.values() if r.is_bus
    )
    clusters = {rid: cluster_trips(feed, rid) for rid in route_ids}
    return LoadedState(
        city_id=cfg.city_id or profile.name,
        feed=feed,
        route_ids=sorted(route_ids),
        clusters=clusters,
        distances=distances,
        elevations=elevations,
        model=None,  # type: ignore[arg-type]
        profile=profile,
        representative_date=representative_service_date(feed, route_ids),
        seed=cfg.seed,
        bus_size=cfg.bus_size,
    )


def cmd_fleet(args) -> int:
    from .analysis import fleet_block
    from .fleet import estimate_fleet

    cfg = _merged_config(args, ("feed", "distances", "elevations", "model", "profile"))
    state = load_state(cfg)
    profile = state.profile
    rows = []
    for rid in state.route_ids:
        est = estimate_fleet(
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
        rows.append({"route_id": rid, "short_name": state.feed.routes[rid].short_name,
                     "fleet": fleet_block(est)})
    out = Path(args.out)
    payload = {
        "format": "electrify-fleet/1",
        "metadata": {"profile": profile.name, "model_hash": state.model.content_hash,
                     "representative_date": state.representative_date.isoformat()},
        "routes": rows,
    }
    out.write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    _write_log(out, {"command": "fleet", "routes": [r["route_id"] for r in rows]})
    print(f"wrote {out} ({len(rows)} routes)")
    return 0


def cmd_valuate(args) -> int:
    cfg = _merged_config(args, ("feed", "distances", "elevations", "model", "profile", "seed"))
    state = load_state(cfg)
    route_ids = None
    if args.routes:
        route_ids = select_routes(state.feed, [name.strip() for name in args.routes.split(",")])
    report = valuation_report(state, route_ids)
    out = Path(args.out or cfg.report or "report.json")
    out.write_text(report_to_json_text(report), encoding="utf-8")
    csv_path = args.csv or cfg.report_csv
    if csv_path:
        Path(csv_path).write_text(report_to_csv_text(report), encoding="utf-8")
    _write_log(out, {
        "command": "valuate",
        "routes": [r["route_id"] for r in report["routes"]],
        "model_hash": report["metadata"]["model_hash"],
        "seed": report["metadata"]["seed"],
    })
    print(f"wrote {out} ({len(report['routes'])} routes)")
    return 0


def cmd_report(args) -> int:
    payload = json.loads(Path(args.in_path).read_text(encoding="utf-8"))
    if args.csv:
        Path(args.csv).write_text(report_to_csv_text(payload), encoding="utf-8")
    for row in payload["routes"]:
        flag = "feasible" if row["fleet"]["feasible"] else "NEEDS FAST CHARGING"
        print(
            f"route {row['short_name']:>6}: TCO e/d = "
            f"{row['electric']['tco_npv_usd']:,.0f} / {row['diesel']['tco_npv_usd']:,.0f} USD, "
            f"CO2 e/d = {row['electric']['co2_t_yr']:.1f} / {row['diesel']['co2_t_yr']:.1f} t/yr, "
            f"{flag}"
        )
    frontier = ", ".join(payload["analysis"]["pareto_frontier"])
    print(f"pareto frontier: {frontier}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    cfg = load_run_config(args.config)
    state = load_state(cfg)
    app = create_app(state, report_path=cfg.resolve(cfg.report))
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def cmd_params_show(args) -> int:
    profile = get_profile(args.profile)
    payload = {
        "name": profile.name,
        "bus_size": profile.bus_size,
        "ridership_mean": profile.ridership_mean,
        "passenger_max": profile.passenger_max,
        "tco": dataclasses.asdict(profile.tco),
        "emissions": dataclasses.asdict(profile.emissions),
        "health": dataclasses.asdict(profile.health),
        "weather": dataclasses.asdict(profile.weather),
        "bus": dataclasses.asdict(profile.bus),
        "charger": dataclasses.asdict(profile.charger),
        "hvac": dataclasses.asdict(profile.hvac),
    }
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Cross-route decision analytics and report files.

The Pareto frontier compares routes on the electric/diesel TCO ratio and
GHG ratio simultaneously (lower is better on both); the health curve ranks
routes by monetized health benefit and accumulates the percentage of total
savings. Reports are written deterministically so repeat runs are
byte-identical.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path

from .errors import AllZeroImpacts, WriteFailure
from .valuation import RouteValuation

REPORT_FORMAT = "electrify-report/1"


@dataclass(frozen=True)
class RouteRatios:
    route_id: str
    tco_ratio: float
    ghg_ratio: float


@dataclass(frozen=True)
class HealthCurvePoint:
    rank: int
    route_id: str
    cumulative_savings_pct: float


def pareto_frontier(points: list[RouteRatios]) -> list[str]:
    """Routes not strictly dominated on (tco_ratio, ghg_ratio), both minimized.

    A point is dominated when some other point is <= in both coordinates
    and < in at least one; exact duplicates are all kept. Output is ordered
    by ascending tco_ratio.
    """
    if not points:
        raise ValueError("pareto_frontier needs at least one point")
    ordered = sorted(points, key=lambda p: (p.tco_ratio, p.ghg_ratio, p.route_id))
    frontier: list[RouteRatios] = []
    best_ghg_strictly_cheaper = float("inf")
    i = 0
    while i < len(ordered):
        j = i
        while j < len(ordered) and ordered[j].tco_ratio == ordered[i].tco_ratio:
            j += 1
        group = ordered[i:j]
        group_min = min(p.ghg_ratio for p in group)
        if group_min < best_ghg_strictly_cheaper:
            frontier.extend(p for p in group if p.ghg_ratio == group_min)
        best_ghg_strictly_cheaper = min(best_ghg_strictly_cheaper, group_min)
        i = j
    return [p.route_id for p in frontier]


def health_savings_curve(impacts: dict[str, float]) -> list[HealthCurvePoint]:
    """Cumulative percent of total health cost saved, electrifying by benefit."""
    total = sum(impacts.values())
    if total <= 0:
        raise AllZeroImpacts("all route health impacts are zero")
    ranked = sorted(impacts.items(), key=lambda kv: (-kv[1], kv[0]))
    curve = []
    running = 0.0
    for rank, (route_id, hi) in enumerate(ranked, start=1):
        running += hi
        curve.append(HealthCurvePoint(rank, route_id, 100.0 * running / total))
    return curve


# ---------------------------------------------------------------------------
# Report emission

CSV_COLUMNS = [
    "route_id", "short_name",
    "buses_inbound", "buses_outbound", "buses_total", "chargers",
    "route_speed_kmh", "annual_vkt_km", "annual_energy_kwh",
    "fuel_economy_mpg",
    "electric_tco_npv_usd", "electric_capex_usd", "electric_energy_cost_usd",
    "electric_demand_charge_usd", "electric_om_cost_usd", "electric_salvage_usd",
    "electric_co2_t_yr",
    "diesel_tco_npv_usd", "diesel_capex_usd", "diesel_fuel_cost_usd",
    "diesel_om_cost_usd", "diesel_salvage_usd",
    "diesel_co2_t_yr", "diesel_fuel_gal_yr", "pm25_g_yr", "health_usd_yr",
    "tco_ratio", "ghg_ratio", "on_pareto_frontier",
    "health_curve_rank", "health_cumulative_pct",
    "feasible", "needs_fast_charging",
]


def fleet_block(f) -> dict:
    """Serializable view of a FleetEstimate, shared by all report shapes."""
    return {
        "buses_inbound": f.buses_inbound,
        "buses_outbound": f.buses_outbound,
        "buses_total": f.buses_total,
        "chargers": f.chargers,
        "cluster_speeds_kmh": dict(sorted(f.cluster_speeds_kmh.items())),
        "route_speed_kmh": f.route_speed_kmh,
        "annual_vkt_km": f.annual_vkt_km,
        "daily_energy_kwh": dict(sorted(f.daily_energy_kwh.items())),
        "daily_energy_low_temp_kwh": dict(sorted(f.daily_energy_low_temp_kwh.items())),
        "cluster_buses": dict(sorted(f.cluster_buses.items())),
        "feasible": f.feasible,
        "needs_fast_charging": f.needs_fast_charging,
    }


def build_report(valuations: list[RouteValuation], metadata: dict) -> dict:
    """Assemble the report payload: per-route results plus cross-route analysis."""
    if not valuations:
        raise ValueError("cannot report on an empty valuation list")
    ordered = sorted(valuations, key=lambda v: v.route_id)

    ratios = [
        RouteRatios(
            v.route_id,
            v.electric.tco_npv_usd / v.diesel.tco_npv_usd,
            v.electric.co2_t_yr / v.diesel.co2_t_yr,
        )
        for v in ordered
    ]
    frontier_sorted = pareto_frontier(ratios)
    frontier = set(frontier_sorted)
    curve = health_savings_curve({v.route_id: v.diesel.health_usd_yr for v in ordered})
    curve_by_route = {pt.route_id: pt for pt in curve}
    ratio_by_route = {r.route_id: r for r in ratios}

    routes = []
    for v in ordered:
        f = v.fleet
        pt = curve_by_route[v.route_id]
        r = ratio_by_route[v.route_id]
        routes.append(
            {
                "route_id": v.route_id,
                "short_name": v.short_name,
                "fleet": fleet_block(f),
                "fuel_economy_mpg": v.fe_mpg,
                "electric": {
                    "energy_kwh_yr": v.electric.energy_kwh_yr,
                    "co2_t_yr": v.electric.co2_t_yr,
                    "capex_usd": v.electric.capex_usd,
                    "energy_cost_usd": v.electric.energy_cost_usd,
                    "demand_charge_usd": v.electric.demand_charge_usd,
                    "om_cost_usd": v.electric.om_cost_usd,
                    "salvage_usd": v.electric.salvage_usd,
                    "tco_npv_usd": v.electric.tco_npv_usd,
                },
                "diesel": {
                    "fuel_gal_yr": v.diesel.fuel_gal_yr,
                    "co2_t_yr": v.diesel.co2_t_yr,
                    "pm25_g_yr": v.diesel.pm25_g_yr,
                    "health_usd_yr": v.diesel.health_usd_yr,
                    "capex_usd": v.diesel.capex_usd,
                    "fuel_cost_usd": v.diesel.fuel_cost_usd,
                    "om_cost_usd": v.diesel.om_cost_usd,
                    "salvage_usd": v.diesel.salvage_usd,
                    "tco_npv_usd": v.diesel.tco_npv_usd,
                },
                "ratios": {"tco": r.tco_ratio, "ghg": r.ghg_ratio},
                "on_pareto_frontier": v.route_id in frontier,
                "health_curve_rank": pt.rank,
                "health_cumulative_pct": pt.cumulative_savings_pct,
            }
        )

    return {
        "format": REPORT_FORMAT,
        "metadata": metadata,
        "routes": routes,
        "analysis": {
            "pareto_frontier": frontier_sorted,
            "health_curve": [
                {
                    "rank": pt.rank,
                    "route_id": pt.route_id,
                    "cumulative_savings_pct": pt.cumulative_savings_pct,
                }
                for pt in curve
            ],
        },
    }


def report_to_csv_text(report: dict) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in report["routes"]:
        writer.writerow(
            {
                "route_id": row["route_id"],
                "short_name": row["short_name"],
                "buses_inbound": row["fleet"]["buses_inbound"],
                "buses_outbound": row["fleet"]["buses_outbound"],
                "buses_total": row["fleet"]["buses_total"],
                "chargers": row["fleet"]["chargers"],
                "route_speed_kmh": row["fleet"]["route_speed_kmh"],
                "annual_vkt_km": row["fleet"]["annual_vkt_km"],
                "annual_energy_kwh": row["electric"]["energy_kwh_yr"],
                "fuel_economy_mpg": row["fuel_economy_mpg"],
                "electric_tco_npv_usd": row["electric"]["tco_npv_usd"],
                "electric_capex_usd": row["electric"]["capex_usd"],
                "electric_energy_cost_usd": row["electric"]["energy_cost_usd"],
                "electric_demand_charge_usd": row["electric"]["demand_charge_usd"],
                "electric_om_cost_usd": row["electric"]["om_cost_usd"],
                "electric_salvage_usd": row["electric"]["salvage_usd"],
                "electric_co2_t_yr": row["electric"]["co2_t_yr"],
                "diesel_tco_npv_usd": row["diesel"]["tco_npv_usd"],
                "diesel_capex_usd": row["diesel"]["capex_usd"],
                "diesel_fuel_cost_usd": row["diesel"]["fuel_cost_usd"],
                "diesel_om_cost_usd": row["diesel"]["om_cost_usd"],
                "diesel_salvage_usd": row["diesel"]["salvage_usd"],
                "diesel_co2_t_yr": row["diesel"]["co2_t_yr"],
                "diesel_fuel_gal_yr": row["diesel"]["fuel_gal_yr"],
                "pm25_g_yr": row["diesel"]["pm25_g_yr"],
                "health_usd_yr": row["diesel"]["health_usd_yr"],
                "tco_ratio": row["ratios"]["tco"],
                "ghg_ratio": row["ratios"]["ghg"],
                "on_pareto_frontier": row["on_pareto_frontier"],
                "health_curve_rank": row["health_curve_rank"],
                "health_cumulative_pct": row["health_cumulative_pct"],
                "feasible": row["fleet"]["feasible"],
                "needs_fast_charging": row["fleet"]["needs_fast_charging"],
            }
        )
    return buf.getvalue()


def report_to_json_text(report: dict) -> str:
    return json.dumps(report, indent=1, sort_keys=True) + "\n"


def emit_report(
    valuations: list[RouteValuation],
    metadata: dict,
    json_path: str | Path,
    csv_path: str | Path | None = None,
) -> dict:
    """Write report.json (and optionally report.csv); returns the payload."""
    report = build_report(valuations, metadata)
    try:
        Path(json_path).write_text(report_to_json_text(report), encoding="utf-8")
        if csv_path is not None:
            Path(csv_path).write_text(report_to_csv_text(report), encoding="utf-8")
    except OSError as exc:
        raise WriteFailure(f"could not write report: {exc}") from exc
    return report

/** Chart models derived from a valuation response.
 *
 * No valuation math happens here: every number is copied from a response
 * field. Builders only reshape the payload for rendering, so tests can
 * trace each displayed value back to the API.
 */

import type { ValuationResponse } from "./types.js";

export interface BarSegment {
  name: string;
  value: number;
}

export interface TcoBar {
  powertrain: "diesel" | "electric";
  segments: BarSegment[];
  /** Net TCO as reported by the service (costs plus salvage credit). */
  total: number;
}

export interface RouteTcoBars {
  routeId: string;
  shortName: string;
  diesel: TcoBar;
  electric: TcoBar;
  feasible: boolean;
  needsFastCharging: boolean;
}

export function tcoBars(response: ValuationResponse): RouteTcoBars[] {
  return response.routes.map((route) => ({
    routeId: route.route_id,
    shortName: route.short_name,
    diesel: {
      powertrain: "diesel",
      segments: [
        { name: "capex", value: route.diesel.capex_usd },
        { name: "fuel", value: route.diesel.fuel_cost_usd },
        { name: "o&m", value: route.diesel.om_cost_usd },
        { name: "salvage", value: route.diesel.salvage_usd },
      ],
      total: route.diesel.tco_npv_usd,
    },
    electric: {
      powertrain: "electric",
      segments: [
        { name: "capex", value: route.electric.capex_usd },
        { name: "energy", value: route.electric.energy_cost_usd },
        { name: "demand", value: route.electric.demand_charge_usd },
        { name: "o&m", value: route.electric.om_cost_usd },
        { name: "salvage", value: route.electric.salvage_usd },
      ],
      total: route.electric.tco_npv_usd,
    },
    feasible: route.fleet.feasible,
    needsFastCharging: route.fleet.needs_fast_charging,
  }));
}

export interface ScatterPoint {
  routeId: string;
  shortName: string;
  tcoRatio: number;
  ghgRatio: number;
  onFrontier: boolean;
}

export interface ParetoScatter {
  points: ScatterPoint[];
  /** Frontier route ids in the service's order (ascending TCO ratio). */
  frontier: string[];
}

export function paretoScatter(response: ValuationResponse): ParetoScatter {
  return {
    points: response.routes.map((route) => ({
      routeId: route.route_id,
      shortName: route.short_name,
      tcoRatio: route.ratios.tco,
      ghgRatio: route.ratios.ghg,
      onFrontier: route.on_pareto_frontier,
    })),
    frontier: [...response.analysis.pareto_frontier],
  };
}

export interface CurvePoint {
  rank: number;
  routeId: string;
  cumulativePct: number;
}

export function healthCurve(response: ValuationResponse): CurvePoint[] {
  return response.analysis.health_curve.map((entry) => ({
    rank: entry.rank,
    routeId: entry.route_id,
    cumulativePct: entry.cumulative_savings_pct,
  }));
}

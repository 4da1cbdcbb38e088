/** API payload types, mirroring the service's report schema field for field. */

export interface FleetBlock {
  buses_inbound: number;
  buses_outbound: number;
  buses_total: number;
  chargers: number;
  cluster_speeds_kmh: Record<string, number>;
  route_speed_kmh: number;
  annual_vkt_km: number;
  daily_energy_kwh: Record<string, number>;
  daily_energy_low_temp_kwh: Record<string, number>;
  cluster_buses: Record<string, number>;
  feasible: boolean;
  needs_fast_charging: boolean;
}

export interface ElectricBlock {
  energy_kwh_yr: number;
  co2_t_yr: number;
  capex_usd: number;
  energy_cost_usd: number;
  demand_charge_usd: number;
  om_cost_usd: number;
  salvage_usd: number;
  tco_npv_usd: number;
}

export interface DieselBlock {
  fuel_gal_yr: number;
  co2_t_yr: number;
  pm25_g_yr: number;
  health_usd_yr: number;
  capex_usd: number;
  fuel_cost_usd: number;
  om_cost_usd: number;
  salvage_usd: number;
  tco_npv_usd: number;
}

export interface RouteResult {
  route_id: string;
  short_name: string;
  fleet: FleetBlock;
  fuel_economy_mpg: number;
  electric: ElectricBlock;
  diesel: DieselBlock;
  ratios: { tco: number; ghg: number };
  on_pareto_frontier: boolean;
  health_curve_rank: number;
  health_cumulative_pct: number;
}

export interface HealthCurveEntry {
  rank: number;
  route_id: string;
  cumulative_savings_pct: number;
}

export interface ValuationResponse {
  format: string;
  metadata: Record<string, unknown>;
  routes: RouteResult[];
  analysis: {
    pareto_frontier: string[];
    health_curve: HealthCurveEntry[];
  };
}

export interface CityInfo {
  id: string;
  profile: string;
  route_count: number;
  bus_size: string;
}

export interface RouteInfo {
  route_id: string;
  short_name: string;
  clusters: number;
  trips: number;
}

/** Parameter overrides keyed by section, as the service accepts them. */
export type Overrides = Record<string, Record<string, number> | number | string>;

export interface ValuationRequest {
  route_ids: string[];
  overrides: Overrides;
}

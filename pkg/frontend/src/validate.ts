/** Client-side pre-validation mirroring the service's 422 rules.
 *
 * The service is the authority; these checks only block obviously invalid
 * submissions early and flag the offending field the same way a 422
 * response would.
 */

export interface FieldError {
  field: string;
  message: string;
}

type Rule = (value: number) => string | null;

const nonNegative: Rule = (v) => (v >= 0 ? null : "must be >= 0");
const positive: Rule = (v) => (v > 0 ? null : "must be > 0");
const rate: Rule = (v) => (v > -1 ? null : "must be > -1");
const fraction: Rule = (v) => (v > 0 && v <= 1 ? null : "must be in (0, 1]");
const atLeastOne: Rule = (v) =>
  Number.isInteger(v) && v >= 1 ? null : "must be an integer >= 1";

const RULES: Record<string, Record<string, Rule>> = {
  tco: {
    energy_price_usd_per_kwh: nonNegative,
    energy_price_growth: rate,
    demand_charge_usd_per_kw: nonNegative,
    demand_charge_growth: rate,
    fuel_price_usd_per_gal: nonNegative,
    fuel_price_growth: rate,
    ebus_cost_usd: nonNegative,
    dbus_cost_usd: nonNegative,
    charger_unit_usd: nonNegative,
    charger_install_usd: nonNegative,
    om_electric_usd_per_mile: nonNegative,
    om_diesel_usd_per_mile: nonNegative,
    om_charger_usd_per_year: nonNegative,
    residual_bus: nonNegative,
    residual_charger: nonNegative,
    discount_rate: positive,
    horizon_years: atLeastOne,
    km_to_miles: positive,
  },
  emissions: {
    diesel_w2t_g_per_km: nonNegative,
    diesel_t2w_kg_per_gal: nonNegative,
    electric_w2t_kg_per_kwh: nonNegative,
    pm25_t2w_g_per_km: nonNegative,
  },
  health: {
    intake_fraction_ppm: nonNegative,
    effect_factor_daly_per_kg: nonNegative,
    vsl_musd: nonNegative,
  },
  bus: {
    mass_kg: positive,
    frontal_area_m2: positive,
    drag_coeff: positive,
    rolling_coeff: positive,
    motor_eff: fraction,
    battery_eff: fraction,
    motor_power_w: positive,
    battery_kwh: positive,
    aux_power_w: nonNegative,
    hvac_cop: (v) => (v >= 1 ? null : "must be >= 1"),
    passenger_mass_kg: positive,
    charge_power_kw: positive,
  },
  charger: {
    power_kw: positive,
    fastest_charge_h: positive,
    efficiency: fraction,
  },
  hvac: {
    setpoint_c: () => null,
    heat_w_per_deg: nonNegative,
    cool_w_per_deg: nonNegative,
  },
  weather: {
    avg_temp_c: () => null,
    lowest_temp_c: () => null,
    mixture_sigma_c: positive,
  },
};

/** Validate nested overrides; returns one error per offending field. */
export function validateOverrides(overrides: Record<string, unknown>): FieldError[] {
  const errors: FieldError[] = [];
  for (const [section, fields] of Object.entries(overrides)) {
    if (section === "ridership_mean" || section === "passenger_max") {
      const v = fields as number;
      if (!(typeof v === "number" && v >= 0)) {
        errors.push({ field: section, message: "must be >= 0" });
      }
      continue;
    }
    if (section === "bus_size") continue;
    const sectionRules = RULES[section];
    if (!sectionRules) {
      errors.push({ field: section, message: "unknown parameter section" });
      continue;
    }
    for (const [name, value] of Object.entries(fields as Record<string, unknown>)) {
      const rule = sectionRules[name];
      const path = `${section}.${name}`;
      if (!rule) {
        errors.push({ field: path, message: "unknown parameter" });
        continue;
      }
      if (typeof value !== "number" || Number.isNaN(value)) {
        errors.push({ field: path, message: "must be a number" });
        continue;
      }
      const problem = rule(value);
      if (problem) {
        errors.push({ field: path, message: problem });
      }
    }
  }
  return errors;
}

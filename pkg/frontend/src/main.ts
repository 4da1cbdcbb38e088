/** Dashboard entry point: route selection, parameter form, charts. */

import { ApiClient, ApiError } from "./api.js";
import { healthCurve, paretoScatter, tcoBars } from "./charts.js";
import { renderHealthCurve, renderParetoScatter, renderTcoBars } from "./render.js";
import {
  SessionState,
  beginRequest,
  canSubmit,
  completeRequest,
  failRequest,
  initialState,
  selectCity,
  setFieldErrors,
  toggleRoute,
} from "./state.js";
import type { Overrides } from "./types.js";
import { validateOverrides } from "./validate.js";

const api = new ApiClient("");
let state: SessionState = initialState();

// form fields exposed in the UI: (section, field, label, step)
const FORM_FIELDS: [string, string, string, string][] = [
  ["tco", "energy_price_usd_per_kwh", "Energy price (USD/kWh)", "0.001"],
  ["tco", "demand_charge_usd_per_kw", "Demand charge (USD/kW)", "0.1"],
  ["tco", "fuel_price_usd_per_gal", "Diesel price (USD/gal)", "0.01"],
  ["tco", "ebus_cost_usd", "Electric bus cost (USD)", "1000"],
  ["tco", "demand_charge_growth", "Demand charge growth (/yr)", "0.001"],
  ["charger", "efficiency", "Charging efficiency (0-1]", "0.01"],
];

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function collectOverrides(): Overrides {
  const overrides: Record<string, Record<string, number>> = {};
  for (const [section, field] of FORM_FIELDS) {
    const input = document.getElementById(`field-${section}-${field}`) as HTMLInputElement | null;
    if (!input || input.value.trim() === "") continue;
    const value = Number(input.value);
    (overrides[section] ??= {})[field] = value;
  }
  return overrides;
}

function syncSubmitButton() {
  const button = el<HTMLButtonElement>("submit");
  button.disabled = !canSubmit(state);
  button.textContent = state.inFlight ? "Valuating..." : "Valuate";
}

function showBanner(message: string | null, retry: boolean) {
  const banner = el<HTMLDivElement>("banner");
  banner.innerHTML = "";
  banner.classList.toggle("hidden", message === null);
  if (message === null) return;
  banner.append(message);
  if (retry) {
    const button = document.createElement("button");
    button.textContent = "Retry";
    button.addEventListener("click", () => void submit());
    banner.append(" ", button);
  }
}

function flagFields() {
  for (const [section, field] of FORM_FIELDS) {
    const input = document.getElementById(`field-${section}-${field}`);
    input?.classList.remove("invalid");
    input?.removeAttribute("title");
  }
  for (const err of state.fieldErrors) {
    const input = document.getElementById(`field-${err.field.replace(".", "-")}`);
    input?.classList.add("invalid");
    input?.setAttribute("title", err.message);
  }
}

function renderCharts() {
  const response = state.lastResponse;
  if (!response) return;
  el("tco-chart").innerHTML = renderTcoBars(tcoBars(response));
  el("pareto-chart").innerHTML = renderParetoScatter(paretoScatter(response));
  el("health-chart").innerHTML = renderHealthCurve(healthCurve(response));

  const badges = el<HTMLDivElement>("badges");
  badges.innerHTML = "";
  for (const route of response.routes) {
    const badge = document.createElement("span");
    badge.className = route.fleet.feasible ? "badge ok" : "badge warn";
    badge.textContent = route.fleet.feasible
      ? `${route.short_name}: feasible`
      : `${route.short_name}: needs fast charging`;
    badges.append(badge);
  }
}

async function submit() {
  const overrides = collectOverrides();
  const errors = validateOverrides(overrides);
  state = setFieldErrors(state, errors);
  flagFields();
  syncSubmitButton();
  if (errors.length > 0 || !canSubmit(state)) return;

  state = beginRequest(state);
  const requestId = state.requestId;
  syncSubmitButton();
  try {
    const response = await api.valuate({ route_ids: state.selectedRoutes, overrides });
    state = completeRequest(state, requestId, response);
    showBanner(null, false);
    renderCharts();
  } catch (err) {
    if (err instanceof ApiError && err.failure.kind === "invalid_field") {
      state = failRequest(state, requestId, err.message, [
        { field: err.failure.field, message: err.failure.message },
      ]);
      flagFields();
    } else {
      state = failRequest(state, requestId, String(err instanceof Error ? err.message : err));
      showBanner(state.error, err instanceof ApiError && err.failure.kind === "network");
    }
  }
  syncSubmitButton();
}

async function loadRoutes(cityId: string) {
  const list = el<HTMLDivElement>("routes");
  list.innerHTML = "";
  try {
    const routes = await api.routes(cityId);
    for (const route of routes) {
      const label = document.createElement("label");
      const box = document.createElement("input");
      box.type = "checkbox";
      box.value = route.route_id;
      box.addEventListener("change", () => {
        state = toggleRoute(state, route.route_id);
        syncSubmitButton();
      });
      label.append(box, ` ${route.short_name} (${route.trips} trips)`);
      list.append(label);
    }
  } catch (err) {
    if (err instanceof ApiError && err.failure.kind === "unknown_city") {
      list.textContent = `City "${cityId}" is not loaded on this service. Pick a city from the selector.`;
    } else {
      showBanner(String(err instanceof Error ? err.message : err), true);
    }
  }
}

function buildForm() {
  const form = el<HTMLDivElement>("parameters");
  for (const [section, field, label, step] of FORM_FIELDS) {
    const wrapper = document.createElement("label");
    wrapper.textContent = label;
    const input = document.createElement("input");
    input.type = "number";
    input.step = step;
    input.id = `field-${section}-${field}`;
    input.addEventListener("input", () => {
      state = setFieldErrors(state, validateOverrides(collectOverrides()));
      flagFields();
      syncSubmitButton();
    });
    wrapper.append(input);
    form.append(wrapper);
  }
}

async function start() {
  buildForm();
  el<HTMLButtonElement>("submit").addEventListener("click", () => void submit());
  try {
    const cities = await api.cities();
    const select = el<HTMLSelectElement>("city");
    for (const city of cities) {
      const option = document.createElement("option");
      option.value = city.id;
      option.textContent = `${city.id} (${city.route_count} routes, ${city.bus_size})`;
      select.append(option);
    }
    select.addEventListener("change", () => {
      state = selectCity(state, select.value);
      void loadRoutes(select.value);
      syncSubmitButton();
    });
    // URL hash may preselect a city; unknown values produce the guidance state
    const fromHash = window.location.hash.slice(1);
    const initial = fromHash || cities[0]?.id;
    if (initial) {
      select.value = cities.some((c) => c.id === initial) ? initial : "";
      state = selectCity(state, initial);
      void loadRoutes(initial);
    }
  } catch (err) {
    showBanner(String(err instanceof Error ? err.message : err), true);
  }
  syncSubmitButton();
}

void start();

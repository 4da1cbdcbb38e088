/** Session state and its pure transitions.
 *
 * A monotonically increasing request id implements the "one in-flight
 * request, later submissions supersede earlier ones" policy: completing a
 * request whose id is no longer current is a no-op.
 */

import type { Overrides, ValuationResponse } from "./types.js";

export interface SessionState {
  city: string | null;
  selectedRoutes: string[];
  overrides: Overrides;
  lastResponse: ValuationResponse | null;
  inFlight: boolean;
  requestId: number;
  error: string | null;
  fieldErrors: { field: string; message: string }[];
}

export function initialState(): SessionState {
  return {
    city: null,
    selectedRoutes: [],
    overrides: {},
    lastResponse: null,
    inFlight: false,
    requestId: 0,
    error: null,
    fieldErrors: [],
  };
}

export function selectCity(state: SessionState, city: string | null): SessionState {
  return { ...initialState(), city };
}

export function toggleRoute(state: SessionState, routeId: string): SessionState {
  const selected = state.selectedRoutes.includes(routeId)
    ? state.selectedRoutes.filter((r) => r !== routeId)
    : [...state.selectedRoutes, routeId].sort();
  return { ...state, selectedRoutes: selected };
}

export function canSubmit(state: SessionState): boolean {
  return state.selectedRoutes.length > 0 && !state.inFlight && state.fieldErrors.length === 0;
}

export function setFieldErrors(
  state: SessionState,
  fieldErrors: { field: string; message: string }[],
): SessionState {
  return { ...state, fieldErrors };
}

export function beginRequest(state: SessionState): SessionState {
  return { ...state, inFlight: true, error: null, requestId: state.requestId + 1 };
}

export function completeRequest(
  state: SessionState,
  requestId: number,
  response: ValuationResponse,
): SessionState {
  if (requestId !== state.requestId) {
    return state; // superseded by a newer submission
  }
  return { ...state, inFlight: false, lastResponse: response, error: null };
}

export function failRequest(
  state: SessionState,
  requestId: number,
  message: string,
  fieldErrors: { field: string; message: string }[] = [],
): SessionState {
  if (requestId !== state.requestId) {
    return state;
  }
  return { ...state, inFlight: false, error: message, fieldErrors };
}

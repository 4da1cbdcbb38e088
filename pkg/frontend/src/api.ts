/** Typed client for the valuation service. */

import type { CityInfo, RouteInfo, ValuationRequest, ValuationResponse } from "./types.js";

export type ApiFailure =
  | { kind: "network"; message: string }
  | { kind: "malformed"; message: string }
  | { kind: "unknown_routes"; ids: string[] }
  | { kind: "unknown_city"; city: string }
  | { kind: "invalid_field"; field: string; message: string }
  | { kind: "server"; message: string };

export class ApiError extends Error {
  constructor(public failure: ApiFailure) {
    super(describeFailure(failure));
  }
}

export function describeFailure(failure: ApiFailure): string {
  switch (failure.kind) {
    case "network":
      return `Service unreachable: ${failure.message}`;
    case "malformed":
      return `Request rejected: ${failure.message}`;
    case "unknown_routes":
      return `Unknown route ids: ${failure.ids.join(", ")}`;
    case "unknown_city":
      return `Unknown city: ${failure.city}`;
    case "invalid_field":
      return `Invalid value for ${failure.field}: ${failure.message}`;
    case "server":
      return `Service error: ${failure.message}`;
  }
}

export class ApiClient {
  constructor(private baseUrl: string = "") {}

  async cities(): Promise<CityInfo[]> {
    return this.get<CityInfo[]>("/api/cities");
  }

  async routes(cityId: string): Promise<RouteInfo[]> {
    return this.get<RouteInfo[]>(`/api/cities/${encodeURIComponent(cityId)}/routes`);
  }

  async valuate(request: ValuationRequest): Promise<ValuationResponse> {
    let response: Response;
    try {
      response = await fetch(`${this.baseUrl}/api/valuate`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(request),
      });
    } catch (err) {
      throw new ApiError({ kind: "network", message: String(err) });
    }
    const body = await response.json().catch(() => ({}));
    if (response.ok) {
      return body as ValuationResponse;
    }
    throw new ApiError(classifyError(response.status, body));
  }

  private async get<T>(path: string): Promise<T> {
    let response: Response;
    try {
      response = await fetch(`${this.baseUrl}${path}`);
    } catch (err) {
      throw new ApiError({ kind: "network", message: String(err) });
    }
    const body = await response.json().catch(() => ({}));
    if (response.ok) {
      return body as T;
    }
    throw new ApiError(classifyError(response.status, body));
  }
}

export function classifyError(status: number, body: Record<string, unknown>): ApiFailure {
  if (status === 400) {
    return { kind: "malformed", message: String(body["detail"] ?? body["error"] ?? "bad request") };
  }
  if (status === 404 && Array.isArray(body["unknown_route_ids"])) {
    return { kind: "unknown_routes", ids: body["unknown_route_ids"] as string[] };
  }
  if (status === 404 && typeof body["unknown_city"] === "string") {
    return { kind: "unknown_city", city: body["unknown_city"] as string };
  }
  if (status === 422) {
    return {
      kind: "invalid_field",
      field: String(body["field"] ?? "?"),
      message: String(body["message"] ?? "invalid value"),
    };
  }
  return { kind: "server", message: String(body["message"] ?? `HTTP ${status}`) };
}

/** Deterministic SVG renderers for the three charts.
 *
 * Pure string builders: identical chart models produce byte-identical
 * markup, which is what the resubmit-stability tests pin down. Pixel
 * scaling is the only arithmetic performed here.
 */

import type { CurvePoint, ParetoScatter, RouteTcoBars, TcoBar } from "./charts.js";

const SEGMENT_COLORS: Record<string, string> = {
  capex: "#4e79a7",
  fuel: "#e15759",
  energy: "#59a14f",
  demand: "#edc948",
  "o&m": "#f28e2b",
  salvage: "#76b7b2",
};

const WIDTH = 760;
const HEIGHT = 300;
const MARGIN = 40;

function fmtUsd(value: number): string {
  return Math.round(value).toLocaleString("en-US");
}

/** Stacked TCO bars: diesel on the left, electric on the right per route. */
export function renderTcoBars(bars: RouteTcoBars[]): string {
  const maxStack = Math.max(
    1,
    ...bars.flatMap((b) => [stackHeight(b.diesel), stackHeight(b.electric)]),
  );
  const scale = (HEIGHT - 2 * MARGIN) / maxStack;
  const groupWidth = (WIDTH - 2 * MARGIN) / Math.max(1, bars.length);
  const barWidth = Math.min(48, groupWidth / 3);

  const parts: string[] = [];
  bars.forEach((route, i) => {
    const x0 = MARGIN + i * groupWidth + groupWidth / 2;
    parts.push(renderStack(route.diesel, x0 - barWidth - 4, barWidth, scale, route.routeId));
    parts.push(renderStack(route.electric, x0 + 4, barWidth, scale, route.routeId));
    const badge = route.feasible
      ? `<text class="badge feasible" x="${x0}" y="${HEIGHT - 8}" text-anchor="middle">${route.shortName}</text>`
      : `<text class="badge needs-fast-charging" x="${x0}" y="${HEIGHT - 8}" text-anchor="middle">${route.shortName} (fast charging)</text>`;
    parts.push(badge);
  });
  return `<svg viewBox="0 0 ${WIDTH} ${HEIGHT}" role="img" aria-label="TCO comparison">${parts.join("")}</svg>`;
}

function stackHeight(bar: TcoBar): number {
  return bar.segments.filter((s) => s.value > 0).reduce((acc, s) => acc + s.value, 0);
}

function renderStack(bar: TcoBar, x: number, width: number, scale: number, routeId: string): string {
  const rects: string[] = [];
  let yTop = HEIGHT - MARGIN;
  for (const segment of bar.segments) {
    if (segment.value <= 0) continue; // salvage credit drawn as the net marker instead
    const h = segment.value * scale;
    yTop -= h;
    rects.push(
      `<rect class="seg" data-route="${routeId}" data-powertrain="${bar.powertrain}" ` +
        `data-segment="${segment.name}" data-value="${segment.value}" ` +
        `x="${x.toFixed(1)}" y="${yTop.toFixed(1)}" width="${width.toFixed(1)}" height="${h.toFixed(1)}" ` +
        `fill="${SEGMENT_COLORS[segment.name] ?? "#bab0ac"}"/>`,
    );
  }
  // dashed marker annotates the net TCO from the response
  const netY = HEIGHT - MARGIN - bar.total * scale;
  rects.push(
    `<line class="net-tco" data-route="${routeId}" data-powertrain="${bar.powertrain}" ` +
      `data-total="${bar.total}" x1="${x.toFixed(1)}" x2="${(x + width).toFixed(1)}" ` +
      `y1="${netY.toFixed(1)}" y2="${netY.toFixed(1)}" stroke="#222" stroke-dasharray="4 2"/>`,
  );
  rects.push(
    `<title>${bar.powertrain} net TCO ${fmtUsd(bar.total)} USD</title>`,
  );
  return `<g class="bar ${bar.powertrain}">${rects.join("")}</g>`;
}

/** Pareto scatter of TCO ratio vs GHG ratio with the frontier highlighted. */
export function renderParetoScatter(scatter: ParetoScatter): string {
  const xs = scatter.points.map((p) => p.tcoRatio);
  const ys = scatter.points.map((p) => p.ghgRatio);
  const xMin = Math.min(...xs, 1.0) - 0.05;
  const xMax = Math.max(...xs, 1.0) + 0.05;
  const yMin = Math.min(...ys, 0.0);
  const yMax = Math.max(...ys, 0.1) + 0.02;
  const sx = (v: number) => MARGIN + ((v - xMin) / (xMax - xMin)) * (WIDTH - 2 * MARGIN);
  const sy = (v: number) => HEIGHT - MARGIN - ((v - yMin) / (yMax - yMin)) * (HEIGHT - 2 * MARGIN);

  const byId = new Map(scatter.points.map((p) => [p.routeId, p]));
  const frontierPath = scatter.frontier
    .map((rid) => byId.get(rid))
    .filter((p): p is NonNullable<typeof p> => p !== undefined)
    .map((p, i) => `${i === 0 ? "M" : "L"}${sx(p.tcoRatio).toFixed(1)},${sy(p.ghgRatio).toFixed(1)}`)
    .join(" ");

  const dots = scatter.points
    .map(
      (p) =>
        `<circle class="pt${p.onFrontier ? " frontier" : ""}" data-route="${p.routeId}" ` +
        `data-tco-ratio="${p.tcoRatio}" data-ghg-ratio="${p.ghgRatio}" ` +
        `cx="${sx(p.tcoRatio).toFixed(1)}" cy="${sy(p.ghgRatio).toFixed(1)}" r="${p.onFrontier ? 7 : 4}" ` +
        `fill="${p.onFrontier ? "#e15759" : "#4e79a7"}"/>` +
        `<text x="${(sx(p.tcoRatio) + 9).toFixed(1)}" y="${sy(p.ghgRatio).toFixed(1)}" class="pt-label">${p.shortName}</text>`,
    )
    .join("");

  const path = frontierPath ? `<path class="frontier-line" d="${frontierPath}" fill="none" stroke="#e15759" stroke-width="1.5"/>` : "";
  return `<svg viewBox="0 0 ${WIDTH} ${HEIGHT}" role="img" aria-label="TCO vs GHG ratios">${path}${dots}</svg>`;
}

/** Cumulative health-savings curve by electrification rank. */
export function renderHealthCurve(points: CurvePoint[]): string {
  if (points.length === 0) {
    return `<svg viewBox="0 0 ${WIDTH} ${HEIGHT}"></svg>`;
  }
  const sx = (rank: number) =>
    MARGIN + ((rank - 1) / Math.max(1, points.length - 1)) * (WIDTH - 2 * MARGIN);
  const sy = (pct: number) => HEIGHT - MARGIN - (pct / 100) * (HEIGHT - 2 * MARGIN);
  const path = points
    .map((p, i) => `${i === 0 ? "M" : "L"}${sx(p.rank).toFixed(1)},${sy(p.cumulativePct).toFixed(1)}`)
    .join(" ");
  const markers = points
    .map(
      (p) =>
        `<circle class="curve-pt" data-route="${p.routeId}" data-rank="${p.rank}" ` +
        `data-pct="${p.cumulativePct}" cx="${sx(p.rank).toFixed(1)}" cy="${sy(p.cumulativePct).toFixed(1)}" r="3.5" fill="#59a14f"/>`,
    )
    .join("");
  return (
    `<svg viewBox="0 0 ${WIDTH} ${HEIGHT}" role="img" aria-label="Cumulative health savings">` +
    `<path d="${path}" fill="none" stroke="#59a14f" stroke-width="2"/>${markers}</svg>`
  );
}

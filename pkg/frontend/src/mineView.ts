/** SVG rendering of the mine: tunnels colored by CO level, exits, fences,
 * worker positions, and a readings table. */

import { coColor, formatReading } from "./format.js";
import type { JunctionState, SimState, TunnelState } from "./types.js";

export interface TunnelSegment {
  id: string;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  mx: number;
  my: number;
}

export interface MineLayout {
  viewBox: string;
  segments: TunnelSegment[];
}

/** Pure geometry: tunnel endpoints from junction coordinates, plus a padded
 * view box. Tunnels naming unknown junctions are skipped. */
export function mineLayout(
  junctions: JunctionState[],
  tunnels: TunnelState[],
  pad = 40,
): MineLayout {
  const at = new Map(junctions.map((j) => [j.id, j]));
  const segments: TunnelSegment[] = [];
  for (const tunnel of tunnels) {
    const [a, b] = tunnel.ends;
    const from = a !== undefined ? at.get(a) : undefined;
    const to = b !== undefined ? at.get(b) : undefined;
    if (!from || !to) continue;
    segments.push({
      id: tunnel.id,
      x1: from.x,
      y1: from.y,
      x2: to.x,
      y2: to.y,
      mx: (from.x + to.x) / 2,
      my: (from.y + to.y) / 2,
    });
  }
  const xs = junctions.map((j) => j.x);
  const ys = junctions.map((j) => j.y);
  const minX = Math.min(0, ...xs) - pad;
  const minY = Math.min(0, ...ys) - pad;
  const width = Math.max(1, ...xs.map((x) => x - minX)) + pad;
  const height = Math.max(1, ...ys.map((y) => y - minY)) + pad;
  return { viewBox: `${minX} ${minY} ${width} ${height}`, segments };
}

const SVG_NS = "http://www.w3.org/2000/svg";

function svgEl<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string>,
): SVGElementTagNameMap[K] {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  return node;
}

export function renderMine(svg: SVGSVGElement, state: SimState): void {
  const layout = mineLayout(state.junctions, state.tunnels, 40);
  const tunnelById = new Map(state.tunnels.map((t) => [t.id, t]));
  svg.setAttribute("viewBox", layout.viewBox);
  svg.replaceChildren();
  for (const seg of layout.segments) {
    const tunnel = tunnelById.get(seg.id);
    if (!tunnel) continue;
    const line = svgEl("line", {
      x1: String(seg.x1),
      y1: String(seg.y1),
      x2: String(seg.x2),
      y2: String(seg.y2),
      stroke: coColor(tunnel.co),
      "stroke-width": "14",
      "stroke-linecap": "round",
    });
    if (tunnel.geofenced) line.setAttribute("stroke-dasharray", "6 8");
    svg.appendChild(line);
    const label = svgEl("text", {
      x: String(seg.mx),
      y: String(seg.my - 12),
      class: "tunnel-label",
      "text-anchor": "middle",
    });
    label.textContent = tunnel.exit ? `${seg.id} ⬆` : seg.id;
    svg.appendChild(label);
  }
  const bySegment = new Map(layout.segments.map((s) => [s.id, s]));
  const perTunnel = new Map<string, number>();
  for (const worker of state.workers) {
    const seg = bySegment.get(worker.tunnel);
    if (!seg) continue;
    const index = perTunnel.get(worker.tunnel) ?? 0;
    perTunnel.set(worker.tunnel, index + 1);
    const dot = svgEl("circle", {
      cx: String(seg.mx + (index - 0.5) * 16),
      cy: String(seg.my + 14),
      r: "6",
      class: `worker worker-${worker.status}`,
    });
    dot.appendChild(svgEl("title", {})).textContent = `${worker.id} (${worker.status})`;
    svg.appendChild(dot);
  }
}

export function renderReadings(table: HTMLElement, state: SimState): void {
  table.replaceChildren();
  const header = document.createElement("tr");
  for (const text of ["tunnel", "CO ppm", "°C", "flags"]) {
    const th = document.createElement("th");
    th.textContent = text;
    header.appendChild(th);
  }
  table.appendChild(header);
  for (const tunnel of state.tunnels) {
    const row = document.createElement("tr");
    const flags = [
      tunnel.exit ? "exit" : "",
      tunnel.geofenced ? "geofenced" : "",
      tunnel.co > 50 ? "CO!" : "",
    ]
      .filter(Boolean)
      .join(", ");
    for (const text of [tunnel.id, formatReading(tunnel.co), formatReading(tunnel.temperature), flags]) {
      const td = document.createElement("td");
      td.textContent = text;
      row.appendChild(td);
    }
    if (tunnel.co > 50) row.classList.add("alert");
    table.appendChild(row);
  }
}

export function renderWorkers(list: HTMLElement, state: SimState): void {
  list.replaceChildren();
  for (const worker of state.workers) {
    const item = document.createElement("li");
    item.textContent = `${worker.id}: ${worker.status} (${worker.tunnel})`;
    item.className = `worker-${worker.status}`;
    list.appendChild(item);
  }
}

export function renderEvents(list: HTMLElement, state: SimState): void {
  list.replaceChildren();
  if (state.events.length === 0) {
    const item = document.createElement("li");
    item.textContent = "no active events";
    list.appendChild(item);
    return;
  }
  for (const event of state.events) {
    const item = document.createElement("li");
    const until = (event.start ?? 0) + event.duration;
    item.textContent = `${event.kind} in ${event.tunnel} until tick ${until}`;
    list.appendChild(item);
  }
}

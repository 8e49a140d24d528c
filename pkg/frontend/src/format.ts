/** Pure text/color helpers shared by the editor and the mine dashboard. */

import type { LogEntry } from "./types.js";

/** Substitute renamed variables into an ACA label:
 * renderLabel("the co of tunnel ?a is ?b", {b: "b2"}) → "the co of tunnel ?a is ?b2". */
export function renderLabel(label: string, rename: Record<string, string> = {}): string {
  return label.replace(/\?([A-Za-z_][A-Za-z0-9_]*)/g, (whole, name: string) => {
    const target = rename[name];
    return target ? `?${target}` : whole;
  });
}

export function describeComparison(variable: string, op: string, value: string): string {
  return `?${variable} ${op} ${value}`;
}

/** One decimal place, integers without a trailing ".0". */
export function formatReading(value: number): string {
  const rounded = Math.round(value * 10) / 10;
  return Number.isInteger(rounded) ? String(rounded) : rounded.toFixed(1);
}

/** Green at ambient through amber to red at the 50 ppm action threshold. */
export function coColor(ppm: number): string {
  const clamped = Math.max(0, Math.min(ppm, 50));
  const hue = 120 - (clamped / 50) * 120;
  return `hsl(${Math.round(hue)}, 75%, 42%)`;
}

export function commandText(entry: LogEntry): string {
  return entry.command.target
    ? `${entry.command.kind}(${entry.command.target})`
    : entry.command.kind;
}

export function logLineText(entry: LogEntry): string {
  const label = entry.label ? ` — ${entry.label}` : "";
  return `tick ${entry.tick} · ${entry.policy} · ${commandText(entry)}${label}`;
}

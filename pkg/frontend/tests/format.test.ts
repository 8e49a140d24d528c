import { describe, expect, it } from "vitest";

import {
  coColor,
  commandText,
  describeComparison,
  formatReading,
  logLineText,
  renderLabel,
} from "../src/format.js";
import { mineLayout } from "../src/mineView.js";
import type { LogEntry, TunnelState } from "../src/types.js";

const ENTRY: LogEntry = {
  tick: 19,
  seq: 1,
  policy: "evacuate-on-co",
  label: "the carbon monoxide concentration of tunnel T3 is 56",
  binding: { a: ":t3", b: "56" },
  command: { kind: "EvacuateTunnel", target: "t3" },
};

describe("renderLabel", () => {
  it("substitutes renamed variables and leaves the rest", () => {
    expect(renderLabel("the co of tunnel ?a is ?b", { b: "b2" })).toBe(
      "the co of tunnel ?a is ?b2",
    );
    expect(renderLabel("evacuate tunnel ?a")).toBe("evacuate tunnel ?a");
  });

  it("does not rewrite prefixes of longer variable names", () => {
    expect(renderLabel("?a versus ?ab", { a: "x" })).toBe("?x versus ?ab");
  });
});

describe("formatReading", () => {
  it("rounds to one decimal and drops trailing zeroes", () => {
    expect(formatReading(56)).toBe("56");
    expect(formatReading(27.46)).toBe("27.5");
    expect(formatReading(2.04)).toBe("2");
  });
});

describe("coColor", () => {
  it("moves from green to red as CO rises", () => {
    expect(coColor(0)).toBe("hsl(120, 75%, 42%)");
    expect(coColor(50)).toBe("hsl(0, 75%, 42%)");
    expect(coColor(999)).toBe("hsl(0, 75%, 42%)");
    expect(coColor(25)).toBe("hsl(60, 75%, 42%)");
  });
});

describe("log lines", () => {
  it("describes a command with its target", () => {
    expect(commandText(ENTRY)).toBe("EvacuateTunnel(t3)");
    expect(commandText({ ...ENTRY, command: { kind: "EvacuateMine", target: null } })).toBe(
      "EvacuateMine",
    );
  });

  it("formats a whole entry", () => {
    expect(logLineText(ENTRY)).toBe(
      "tick 19 · evacuate-on-co · EvacuateTunnel(t3) — " +
        "the carbon monoxide concentration of tunnel T3 is 56",
    );
  });
});

describe("describeComparison", () => {
  it("prints the filter the server will apply", () => {
    expect(describeComparison("b", ">", "50")).toBe("?b > 50");
  });
});

describe("mineLayout", () => {
  const junctions = [
    { id: "j1", x: 0, y: 0 },
    { id: "j2", x: 200, y: 0 },
    { id: "j3", x: 200, y: 150 },
  ];
  const tunnel = (id: string, ends: string[]): TunnelState => ({
    id,
    ends,
    length: 200,
    exit: false,
    co: 2,
    temperature: 18,
    geofenced: false,
  });

  it("maps tunnels onto junction coordinates with midpoints", () => {
    const layout = mineLayout(junctions, [tunnel("t1", ["j1", "j2"]), tunnel("t2", ["j2", "j3"])]);
    expect(layout.segments).toHaveLength(2);
    expect(layout.segments[0]).toMatchObject({ id: "t1", x1: 0, y1: 0, x2: 200, y2: 0, mx: 100, my: 0 });
    expect(layout.segments[1]).toMatchObject({ id: "t2", mx: 200, my: 75 });
  });

  it("skips tunnels that reference unknown junctions", () => {
    const layout = mineLayout(junctions, [tunnel("t9", ["j1", "nope"])]);
    expect(layout.segments).toEqual([]);
  });

  it("pads the view box around the extent", () => {
    const layout = mineLayout(junctions, [], 40);
    expect(layout.viewBox).toBe("-40 -40 280 230");
  });
});

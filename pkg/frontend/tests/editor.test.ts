import { describe, expect, it } from "vitest";

import {
  addComparison,
  addCondition,
  appliedVars,
  comparisonConstant,
  draftProblems,
  emptyDraft,
  loadDraft,
  removeCondition,
  setAction,
  setRename,
  toDocument,
  updateComparison,
  usedVariables,
  wireActionArg,
} from "../src/editor.js";
import type { AcaSummary, StoredPolicy } from "../src/types.js";

const CO_ACA: AcaSummary = {
  id: "aca-co",
  label: "the carbon monoxide concentration of tunnel ?a is ?b",
  exposedVars: ["a", "b"],
  kind: "observation",
};

const TEMP_ACA: AcaSummary = {
  id: "aca-temp",
  label: "the temperature of tunnel ?a is ?b",
  exposedVars: ["a", "b"],
  kind: "observation",
};

const EVACUATE_ACA: AcaSummary = {
  id: "aca-evacuate",
  label: "evacuate tunnel ?a",
  exposedVars: ["a"],
  kind: "actuation",
};

function twoConditionDraft() {
  return addCondition(addCondition(emptyDraft("p"), CO_ACA), TEMP_ACA);
}

describe("addCondition", () => {
  it("keeps the first condition's variables untouched", () => {
    const draft = addCondition(emptyDraft("p"), CO_ACA);
    expect(draft.conditions[0]!.rename).toEqual({});
    expect(usedVariables(draft)).toEqual(["a", "b"]);
  });

  it("joins on the first exposed variable and uniquifies the rest", () => {
    const draft = twoConditionDraft();
    expect(appliedVars(draft.conditions[0]!)).toEqual(["a", "b"]);
    expect(appliedVars(draft.conditions[1]!)).toEqual(["a", "b2"]);
    expect(usedVariables(draft)).toEqual(["a", "b", "b2"]);
  });

  it("keeps uniquifying across three conditions", () => {
    const draft = addCondition(twoConditionDraft(), CO_ACA);
    expect(appliedVars(draft.conditions[2]!)).toEqual(["a", "b3"]);
  });
});

describe("removeCondition", () => {
  it("drops comparisons on variables that disappear and unwires arguments", () => {
    let draft = twoConditionDraft();
    draft = addComparison(draft, "b");
    draft = updateComparison(draft, 0, { value: "50" });
    draft = addComparison(draft, "b2");
    draft = setAction(draft, EVACUATE_ACA);
    expect(draft.action!.args).toEqual({ a: "a" });

    const withoutFirst = removeCondition(draft, 0);
    // ?b was produced only by the removed condition; ?a and ?b2 survive.
    expect(withoutFirst.comparisons.map((c) => c.variable)).toEqual(["b2"]);
    expect(withoutFirst.action!.args).toEqual({ a: "a" });

    const withoutBoth = removeCondition(withoutFirst, 0);
    expect(withoutBoth.comparisons).toEqual([]);
    expect(withoutBoth.action!.args).toEqual({ a: "" });
  });
});

describe("setRename", () => {
  it("stores non-identity renames and drops identity ones", () => {
    let draft = addCondition(emptyDraft("p"), CO_ACA);
    draft = setRename(draft, 0, "b", "reading");
    expect(draft.conditions[0]!.rename).toEqual({ b: "reading" });
    draft = setRename(draft, 0, "b", "b");
    expect(draft.conditions[0]!.rename).toEqual({});
  });

  it("flags collisions inside one condition", () => {
    let draft = addCondition(emptyDraft("p"), CO_ACA);
    draft = setRename(draft, 0, "b", "a");
    expect(draftProblems(draft)).toContain("condition 1 renames two variables to a");
  });
});

describe("setAction", () => {
  it("auto-wires like-named variables", () => {
    const draft = setAction(addCondition(emptyDraft("p"), CO_ACA), EVACUATE_ACA);
    expect(draft.action!.args).toEqual({ a: "a" });
  });

  it("leaves unmatched arguments unwired", () => {
    const draft = setAction(emptyDraft("p"), EVACUATE_ACA);
    expect(draft.action!.args).toEqual({ a: "" });
    expect(draftProblems(draft)).toContain(
      "action argument a is not wired to a condition variable",
    );
  });
});

describe("draftProblems", () => {
  it("reports everything missing on an empty draft", () => {
    const problems = draftProblems(emptyDraft());
    expect(problems).toContain("policy needs an id");
    expect(problems).toContain("policy needs at least one condition");
    expect(problems).toContain("policy needs an action");
  });

  it("flags comparisons on unbound variables and missing values", () => {
    let draft = addCondition(emptyDraft("p"), CO_ACA);
    draft = addComparison(draft, "z");
    const problems = draftProblems(draft);
    expect(problems).toContain("comparison 1 references unbound variable z");
    expect(problems).toContain("comparison 1 needs a value");
  });

  it("accepts a complete draft", () => {
    let draft = setAction(addCondition(emptyDraft("evacuate-on-co"), CO_ACA), EVACUATE_ACA);
    draft = addComparison(draft, "b");
    draft = updateComparison(draft, 0, { op: ">", value: "50" });
    expect(draftProblems(draft)).toEqual([]);
  });
});

describe("comparisonConstant", () => {
  it("types numbers, booleans, IRIs, and strings", () => {
    expect(comparisonConstant("50")).toEqual({ value: 50 });
    expect(comparisonConstant("-3.5")).toEqual({ value: -3.5 });
    expect(comparisonConstant("true")).toEqual({ value: true });
    expect(comparisonConstant(":t3")).toEqual({ iri: ":t3" });
    expect(comparisonConstant("<http://example.org/mine#t3>")).toEqual({
      iri: "http://example.org/mine#t3",
    });
    expect(comparisonConstant("http://example.org/x")).toEqual({ iri: "http://example.org/x" });
    expect(comparisonConstant("plain text")).toEqual({ value: "plain text" });
  });
});

describe("toDocument", () => {
  it("produces the engine's policy document shape", () => {
    let draft = setAction(addCondition(emptyDraft("evacuate-on-co"), CO_ACA), EVACUATE_ACA);
    draft = { ...draft, name: "Evacuate smoky tunnels" };
    draft = addComparison(draft, "b");
    draft = updateComparison(draft, 0, { op: ">", value: "50" });
    expect(toDocument(draft)).toEqual({
      id: "evacuate-on-co",
      name: "Evacuate smoky tunnels",
      conditions: [{ aca: "aca-co", rename: {} }],
      comparisons: [{ var: "b", op: ">", value: 50 }],
      action: { aca: "aca-evacuate", args: { a: "a" } },
      enabled: true,
    });
  });

  it("round-trips through loadDraft", () => {
    let draft = setAction(addCondition(twoConditionDraft(), CO_ACA), EVACUATE_ACA);
    draft = addComparison(draft, "b3");
    draft = updateComparison(draft, 0, { op: ">=", value: "12.5" });
    const doc = toDocument(draft);
    const catalog = new Map([
      [CO_ACA.id, CO_ACA],
      [TEMP_ACA.id, TEMP_ACA],
      [EVACUATE_ACA.id, EVACUATE_ACA],
    ]);
    const reloaded = loadDraft({ ...doc, valid: true, diagnostics: [] }, catalog);
    expect(toDocument(reloaded)).toEqual(doc);
  });

  it("keeps unknown ACA ids editable with a placeholder label", () => {
    const stored: StoredPolicy = {
      id: "p",
      name: "p",
      conditions: [{ aca: "gone", rename: {} }],
      comparisons: [],
      action: { aca: "aca-evacuate", args: { a: "a" } },
      enabled: false,
      valid: false,
      diagnostics: ["unknown ACA id gone"],
    };
    const draft = loadDraft(stored, new Map([[EVACUATE_ACA.id, EVACUATE_ACA]]));
    expect(draft.conditions[0]!.acaId).toBe("gone");
    expect(draft.conditions[0]!.label).toContain("unknown ACA");
    expect(draft.enabled).toBe(false);
  });
});

describe("wireActionArg", () => {
  it("rewires a single argument", () => {
    let draft = setAction(twoConditionDraft(), EVACUATE_ACA);
    draft = wireActionArg(draft, "a", "b2");
    expect(draft.action!.args).toEqual({ a: "b2" });
  });
});

/** The policy draft: the editor's working state and the pure operations the
 * UI performs on it. A draft is built by picking ACAs from the catalog,
 * renaming their exposed variables (shared names join conditions), adding
 * threshold comparisons, and wiring action arguments; toDocument() produces
 * the JSON the engine accepts. */

import type {
  AcaSummary,
  ComparisonDoc,
  ComparisonOp,
  PolicyDoc,
  StoredPolicy,
} from "./types.js";

export interface DraftCondition {
  acaId: string;
  label: string;
  exposedVars: string[];
  /** exposed variable → policy variable; identity renames are omitted. */
  rename: Record<string, string>;
}

export interface DraftComparison {
  variable: string;
  op: ComparisonOp;
  /** Raw text; typed (number/boolean/IRI/string) at serialization time. */
  value: string;
}

export interface DraftAction {
  acaId: string;
  label: string;
  exposedVars: string[];
  /** action argument → policy variable ("" while unwired). */
  args: Record<string, string>;
}

export interface PolicyDraft {
  id: string;
  name: string;
  conditions: DraftCondition[];
  comparisons: DraftComparison[];
  action: DraftAction | null;
  enabled: boolean;
}

export function emptyDraft(id = ""): PolicyDraft {
  return { id, name: "", conditions: [], comparisons: [], action: null, enabled: true };
}

/** The policy variable each exposed variable ends up as. */
export function appliedVars(condition: DraftCondition): string[] {
  return condition.exposedVars.map((v) => condition.rename[v] ?? v);
}

/** Every policy variable the conditions produce, in first-appearance order. */
export function usedVariables(draft: PolicyDraft): string[] {
  const seen: string[] = [];
  for (const condition of draft.conditions) {
    for (const name of appliedVars(condition)) {
      if (!seen.includes(name)) seen.push(name);
    }
  }
  return seen;
}

function freshName(base: string, taken: Set<string>): string {
  let k = 2;
  while (taken.has(`${base}${k}`)) k += 1;
  return `${base}${k}`;
}

/** Add a condition. The first exposed variable keeps its name so conditions
 * over the same subject join automatically; later exposed variables are
 * uniquified against names already in use (b → b2, b3, …) so each reading
 * stays individually addressable. Renames remain editable afterwards. */
export function addCondition(draft: PolicyDraft, aca: AcaSummary): PolicyDraft {
  const taken = new Set(usedVariables(draft));
  const rename: Record<string, string> = {};
  aca.exposedVars.forEach((v, index) => {
    if (index > 0 && taken.has(v)) {
      rename[v] = freshName(v, taken);
      taken.add(rename[v]);
    } else {
      taken.add(v);
    }
  });
  const condition: DraftCondition = {
    acaId: aca.id,
    label: aca.label,
    exposedVars: [...aca.exposedVars],
    rename,
  };
  return { ...draft, conditions: [...draft.conditions, condition] };
}

/** Remove a condition; comparisons on variables that are no longer produced
 * are dropped, and action arguments wired to them are unwired. */
export function removeCondition(draft: PolicyDraft, index: number): PolicyDraft {
  const conditions = draft.conditions.filter((_, i) => i !== index);
  const still = new Set(usedVariables({ ...draft, conditions }));
  const comparisons = draft.comparisons.filter((c) => still.has(c.variable));
  const action = draft.action
    ? {
        ...draft.action,
        args: Object.fromEntries(
          Object.entries(draft.action.args).map(([arg, v]) => [arg, still.has(v) ? v : ""]),
        ),
      }
    : null;
  return { ...draft, conditions, comparisons, action };
}

/** Rename one exposed variable of one condition (identity renames are
 * dropped from the map). Comparisons and arguments keep their references;
 * draftProblems() flags any that dangle. */
export function setRename(
  draft: PolicyDraft,
  index: number,
  exposedVar: string,
  name: string,
): PolicyDraft {
  const conditions = draft.conditions.map((condition, i) => {
    if (i !== index) return condition;
    const rename = { ...condition.rename };
    const trimmed = name.trim();
    if (!trimmed || trimmed === exposedVar) {
      delete rename[exposedVar];
    } else {
      rename[exposedVar] = trimmed;
    }
    return { ...condition, rename };
  });
  return { ...draft, conditions };
}

export function addComparison(draft: PolicyDraft, variable: string): PolicyDraft {
  const comparison: DraftComparison = { variable, op: ">", value: "" };
  return { ...draft, comparisons: [...draft.comparisons, comparison] };
}

export function updateComparison(
  draft: PolicyDraft,
  index: number,
  patch: Partial<DraftComparison>,
): PolicyDraft {
  const comparisons = draft.comparisons.map((c, i) => (i === index ? { ...c, ...patch } : c));
  return { ...draft, comparisons };
}

export function removeComparison(draft: PolicyDraft, index: number): PolicyDraft {
  return { ...draft, comparisons: draft.comparisons.filter((_, i) => i !== index) };
}

/** Choose the action; each argument auto-wires to the like-named condition
 * variable when one exists. */
export function setAction(draft: PolicyDraft, aca: AcaSummary): PolicyDraft {
  const used = new Set(usedVariables(draft));
  const args = Object.fromEntries(aca.exposedVars.map((v) => [v, used.has(v) ? v : ""]));
  return {
    ...draft,
    action: { acaId: aca.id, label: aca.label, exposedVars: [...aca.exposedVars], args },
  };
}

export function wireActionArg(draft: PolicyDraft, arg: string, variable: string): PolicyDraft {
  if (!draft.action) return draft;
  const action = { ...draft.action, args: { ...draft.action.args, [arg]: variable } };
  return { ...draft, action };
}

/** Quick client-side checks so obvious mistakes don't round-trip to the
 * server; the server's validator remains the authority. */
export function draftProblems(draft: PolicyDraft): string[] {
  const problems: string[] = [];
  if (!draft.id.trim()) problems.push("policy needs an id");
  if (draft.conditions.length === 0) problems.push("policy needs at least one condition");
  const used = new Set(usedVariables(draft));
  draft.conditions.forEach((condition, i) => {
    const names = appliedVars(condition);
    names.forEach((name, j) => {
      if (names.indexOf(name) !== j) {
        problems.push(`condition ${i + 1} renames two variables to ${name}`);
      }
    });
  });
  draft.comparisons.forEach((c, i) => {
    if (!used.has(c.variable)) {
      problems.push(`comparison ${i + 1} references unbound variable ${c.variable || "?"}`);
    }
    if (!c.value.trim()) problems.push(`comparison ${i + 1} needs a value`);
  });
  if (!draft.action) {
    problems.push("policy needs an action");
  } else {
    for (const [arg, variable] of Object.entries(draft.action.args)) {
      if (!variable || !used.has(variable)) {
        problems.push(`action argument ${arg} is not wired to a condition variable`);
      }
    }
  }
  return problems;
}

/** Type a comparison constant the way the engine reads it: numbers and
 * booleans as JSON values, prefixed names / absolute IRIs / <IRI>s as IRI
 * references, anything else as a string. */
export function comparisonConstant(text: string): Pick<ComparisonDoc, "value" | "iri"> {
  const trimmed = text.trim();
  if (/^-?\d+(\.\d+)?$/.test(trimmed)) return { value: Number(trimmed) };
  if (trimmed === "true" || trimmed === "false") return { value: trimmed === "true" };
  if (trimmed.startsWith("<") && trimmed.endsWith(">")) return { iri: trimmed.slice(1, -1) };
  if (trimmed.startsWith(":") || /^[A-Za-z][A-Za-z0-9+.-]*:/.test(trimmed)) {
    return { iri: trimmed };
  }
  return { value: trimmed };
}

export function toDocument(draft: PolicyDraft): PolicyDoc {
  if (!draft.action) throw new Error("draft has no action");
  return {
    id: draft.id.trim(),
    name: draft.name.trim() || draft.id.trim(),
    conditions: draft.conditions.map((c) => ({ aca: c.acaId, rename: { ...c.rename } })),
    comparisons: draft.comparisons.map((c) => ({
      var: c.variable,
      op: c.op,
      ...comparisonConstant(c.value),
    })),
    action: { aca: draft.action.acaId, args: { ...draft.action.args } },
    enabled: draft.enabled,
  };
}

function constantText(doc: ComparisonDoc): string {
  if (doc.iri !== undefined) return doc.iri;
  return String(doc.value ?? "");
}

/** Rebuild a draft from a stored policy so it can be edited. ACAs no longer
 * in the catalog keep their id with a placeholder label. */
export function loadDraft(
  doc: StoredPolicy | PolicyDoc,
  catalog: Map<string, AcaSummary>,
): PolicyDraft {
  const lookup = (id: string) =>
    catalog.get(id) ?? { id, label: `(unknown ACA ${id})`, exposedVars: [], kind: "observation" as const };
  return {
    id: doc.id,
    name: doc.name,
    conditions: doc.conditions.map((c) => {
      const aca = lookup(c.aca);
      return {
        acaId: c.aca,
        label: aca.label,
        exposedVars: [...aca.exposedVars],
        rename: { ...c.rename },
      };
    }),
    comparisons: doc.comparisons.map((c) => ({
      variable: c.var,
      op: c.op,
      value: constantText(c),
    })),
    action: (() => {
      const aca = lookup(doc.action.aca);
      return {
        acaId: doc.action.aca,
        label: aca.label,
        exposedVars: [...aca.exposedVars],
        args: { ...doc.action.args },
      };
    })(),
    enabled: doc.enabled,
  };
}

/** Wires the editor and the mine dashboard to the engine's HTTP interface:
 * ACA search feeds the policy draft, the draft saves through /policies with
 * server diagnostics surfaced inline, and two pollers keep the mine state
 * and the trigger log fresh. */

import { ApiError, createApi } from "./api.js";
import {
  addComparison,
  addCondition,
  draftProblems,
  emptyDraft,
  loadDraft,
  removeComparison,
  removeCondition,
  setAction,
  setRename,
  toDocument,
  updateComparison,
  usedVariables,
  wireActionArg,
  type PolicyDraft,
} from "./editor.js";
import { describeComparison, formatReading, renderLabel } from "./format.js";
import { LogPanel } from "./logView.js";
import { renderEvents, renderMine, renderReadings, renderWorkers } from "./mineView.js";
import { LatestGate, Poller } from "./poll.js";
import { COMPARISON_OPS, type AcaSummary, type ComparisonOp, type EventDoc } from "./types.js";

const api = createApi();

function must<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  text = "",
  className = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (text) node.textContent = text;
  if (className) node.className = className;
  return node;
}

function button(text: string, onClick: () => void, className = ""): HTMLButtonElement {
  const node = el("button", text, className);
  node.type = "button";
  node.addEventListener("click", onClick);
  return node;
}

function showList(list: HTMLElement, items: string[], className = ""): void {
  list.replaceChildren();
  for (const item of items) list.appendChild(el("li", item, className));
}

// ---------------------------------------------------------------------------
// Editor state
// ---------------------------------------------------------------------------

let draft: PolicyDraft = emptyDraft();
const catalog = new Map<string, AcaSummary>();

function apply(next: PolicyDraft): void {
  draft = next;
  renderDraft();
}

function variableSelect(current: string, onChange: (value: string) => void): HTMLSelectElement {
  const select = el("select");
  select.appendChild(new Option("—", ""));
  for (const name of usedVariables(draft)) {
    select.appendChild(new Option(`?${name}`, name));
  }
  select.value = usedVariables(draft).includes(current) ? current : "";
  select.addEventListener("change", () => onChange(select.value));
  return select;
}

function renderDraft(): void {
  (must<HTMLInputElement>("draft-id")).value = draft.id;
  (must<HTMLInputElement>("draft-name")).value = draft.name;
  (must<HTMLInputElement>("draft-enabled")).checked = draft.enabled;

  const conditions = must("draft-conditions");
  conditions.replaceChildren();
  draft.conditions.forEach((condition, index) => {
    const item = el("li");
    item.appendChild(el("span", renderLabel(condition.label, condition.rename), "aca-label"));
    for (const exposed of condition.exposedVars) {
      const input = el("input");
      input.className = "rename";
      input.value = condition.rename[exposed] ?? exposed;
      input.title = `rename ?${exposed}; shared names join conditions`;
      input.addEventListener("change", () => apply(setRename(draft, index, exposed, input.value)));
      item.appendChild(input);
    }
    item.appendChild(button("✕", () => apply(removeCondition(draft, index)), "remove"));
    conditions.appendChild(item);
  });
  if (draft.conditions.length === 0) {
    conditions.appendChild(el("li", "pick a condition from the concept list", "hint"));
  }

  const comparisons = must("draft-comparisons");
  comparisons.replaceChildren();
  draft.comparisons.forEach((comparison, index) => {
    const item = el("li");
    item.appendChild(
      variableSelect(comparison.variable, (value) =>
        apply(updateComparison(draft, index, { variable: value })),
      ),
    );
    const op = el("select");
    for (const candidate of COMPARISON_OPS) op.appendChild(new Option(candidate, candidate));
    op.value = comparison.op;
    op.addEventListener("change", () =>
      apply(updateComparison(draft, index, { op: op.value as ComparisonOp })),
    );
    item.appendChild(op);
    const value = el("input");
    value.value = comparison.value;
    value.placeholder = "50";
    value.addEventListener("change", () =>
      apply(updateComparison(draft, index, { value: value.value })),
    );
    item.appendChild(value);
    item.appendChild(el("span", describeComparison(comparison.variable, comparison.op, comparison.value), "hint"));
    item.appendChild(button("✕", () => apply(removeComparison(draft, index)), "remove"));
    comparisons.appendChild(item);
  });

  const action = must("draft-action");
  action.replaceChildren();
  if (draft.action) {
    action.appendChild(el("span", draft.action.label, "aca-label"));
    for (const arg of draft.action.exposedVars) {
      const wire = el("label", ` ?${arg} ← `);
      wire.appendChild(
        variableSelect(draft.action.args[arg] ?? "", (value) =>
          apply(wireActionArg(draft, arg, value)),
        ),
      );
      action.appendChild(wire);
    }
  } else {
    action.appendChild(el("span", "pick an action from the concept list", "hint"));
  }

  showList(must("draft-problems"), draftProblems(draft), "problem");
}

// ---------------------------------------------------------------------------
// Catalog search
// ---------------------------------------------------------------------------

const searchGate = new LatestGate();

async function refreshAcas(query: string): Promise<void> {
  const token = searchGate.begin();
  const found = await api.searchAcas(query);
  if (!searchGate.accept(token)) return; // a newer search is in flight
  for (const aca of found) catalog.set(aca.id, aca);
  const results = must("aca-results");
  results.replaceChildren();
  for (const aca of found) {
    const item = el("li");
    item.appendChild(el("span", aca.label, "aca-label"));
    if (aca.kind === "observation") {
      item.appendChild(button("+ condition", () => apply(addCondition(draft, aca))));
    } else {
      item.appendChild(button("set action", () => apply(setAction(draft, aca))));
    }
    results.appendChild(item);
  }
  if (found.length === 0) results.appendChild(el("li", "nothing matches", "hint"));
}

// ---------------------------------------------------------------------------
// Saved policies
// ---------------------------------------------------------------------------

async function showQuery(policyId: string): Promise<void> {
  const preview = must("query-preview");
  try {
    preview.textContent = await api.policyQuery(policyId);
  } catch (error) {
    preview.textContent =
      error instanceof ApiError ? error.diagnostics.join("\n") : String(error);
  }
}

async function refreshPolicies(): Promise<void> {
  const policies = await api.listPolicies();
  const list = must("policy-list");
  list.replaceChildren();
  for (const policy of policies) {
    const item = el("li");
    item.appendChild(el("span", policy.name || policy.id, "policy-name"));
    item.appendChild(
      el("span", policy.valid ? "compiles" : policy.diagnostics.join("; "), policy.valid ? "ok" : "problem"),
    );
    item.appendChild(button(policy.enabled ? "disable" : "enable", () => {
      void api
        .savePolicy({ ...policy, enabled: !policy.enabled })
        .then(refreshPolicies);
    }));
    item.appendChild(button("edit", () => apply(loadDraft(policy, catalog))));
    item.appendChild(button("query", () => void showQuery(policy.id)));
    item.appendChild(button("✕", () => {
      void api.deletePolicy(policy.id).then(refreshPolicies);
    }, "remove"));
    list.appendChild(item);
  }
  if (policies.length === 0) list.appendChild(el("li", "no policies yet", "hint"));
}

async function saveDraft(): Promise<void> {
  const diagnosticsList = must("server-diagnostics");
  const problems = draftProblems(draft);
  if (problems.length > 0) {
    showList(diagnosticsList, ["fix the draft problems above before saving"], "problem");
    return;
  }
  try {
    const { id } = await api.savePolicy(toDocument(draft));
    showList(diagnosticsList, [`saved ${id}`], "ok");
    await refreshPolicies();
    await showQuery(id);
  } catch (error) {
    if (error instanceof ApiError) {
      showList(diagnosticsList, error.diagnostics, "problem");
    } else {
      showList(diagnosticsList, [String(error)], "problem");
    }
  }
}

// ---------------------------------------------------------------------------
// Simulation panel
// ---------------------------------------------------------------------------

const logPanel = new LogPanel(must("trigger-log"));

async function refreshState(): Promise<void> {
  const state = await api.simState();
  must("tick").textContent = String(state.tick);
  must("sim-status").textContent = state.running
    ? "running"
    : state.mineEvacuation
      ? "paused · mine evacuation"
      : "paused";
  renderMine(must<HTMLElement>("mine-map") as unknown as SVGSVGElement, state);
  renderReadings(must("readings"), state);
  renderWorkers(must("workers"), state);
  renderEvents(must("events"), state);
  const tunnelSelect = must<HTMLSelectElement>("event-tunnel");
  if (tunnelSelect.options.length !== state.tunnels.length) {
    const selected = tunnelSelect.value;
    tunnelSelect.replaceChildren();
    for (const tunnel of state.tunnels) tunnelSelect.appendChild(new Option(tunnel.id, tunnel.id));
    if (selected) tunnelSelect.value = selected;
  }
}

async function refreshLog(): Promise<void> {
  const entries = await api.fetchLog(logPanel.since);
  logPanel.append(entries);
}

async function injectEvent(event: SubmitEvent): Promise<void> {
  event.preventDefault();
  const kind = must<HTMLSelectElement>("event-kind").value as EventDoc["kind"];
  const tunnel = must<HTMLSelectElement>("event-tunnel").value;
  const rate = Number(must<HTMLInputElement>("event-rate").value);
  const duration = Number(must<HTMLInputElement>("event-duration").value);
  const doc: EventDoc =
    kind === "GasLeak"
      ? { kind, tunnel, rate, duration }
      : { kind, tunnel, co_rate: rate, heat: rate, duration };
  const status = must("event-status");
  try {
    await api.injectEvent(doc);
    status.textContent = `${kind} injected into ${tunnel} (+${formatReading(rate)}/tick)`;
    status.className = "ok";
  } catch (error) {
    status.textContent = error instanceof ApiError ? error.message : String(error);
    status.className = "problem";
  }
}

// ---------------------------------------------------------------------------
// Boot
// ---------------------------------------------------------------------------

function switchTab(tab: "editor" | "mine"): void {
  must("view-editor").hidden = tab !== "editor";
  must("view-mine").hidden = tab !== "mine";
  must("tab-editor").classList.toggle("active", tab === "editor");
  must("tab-mine").classList.toggle("active", tab === "mine");
}

export function boot(): void {
  const statePoller = new Poller(refreshState, 500);
  const logPoller = new Poller(refreshLog, 1000);

  must("tab-editor").addEventListener("click", () => switchTab("editor"));
  must("tab-mine").addEventListener("click", () => switchTab("mine"));

  const search = must<HTMLInputElement>("aca-search");
  search.addEventListener("input", () => void refreshAcas(search.value));

  must<HTMLInputElement>("draft-id").addEventListener("change", (e) => {
    draft = { ...draft, id: (e.target as HTMLInputElement).value };
  });
  must<HTMLInputElement>("draft-name").addEventListener("change", (e) => {
    draft = { ...draft, name: (e.target as HTMLInputElement).value };
  });
  must<HTMLInputElement>("draft-enabled").addEventListener("change", (e) => {
    draft = { ...draft, enabled: (e.target as HTMLInputElement).checked };
  });
  must("btn-add-comparison").addEventListener("click", () => {
    const candidates = usedVariables(draft);
    apply(addComparison(draft, candidates[candidates.length - 1] ?? ""));
  });
  must("btn-new-draft").addEventListener("click", () => apply(emptyDraft()));
  must("btn-save").addEventListener("click", () => void saveDraft());

  must("btn-run").addEventListener("click", () => void api.runSim().then(refreshState));
  must("btn-pause").addEventListener("click", () => void api.pauseSim().then(refreshState));
  must("btn-step").addEventListener("click", () => void api.step(1).then(refreshState).then(refreshLog));
  must("btn-step10").addEventListener("click", () => void api.step(10).then(refreshState).then(refreshLog));
  must("btn-reset").addEventListener("click", () => {
    void api.resetSim().then(() => {
      logPanel.clear();
      return Promise.all([refreshState(), refreshLog()]);
    });
  });
  must<HTMLFormElement>("event-form").addEventListener("submit", (e) => void injectEvent(e));

  renderDraft();
  void refreshAcas("");
  void refreshPolicies();
  statePoller.start();
  logPoller.start();
}

boot();

/** Typed client for the engine's HTTP interface. Every method maps to one
 * route; validation failures surface as ApiError carrying the server's
 * diagnostics verbatim. */

import type {
  AcaSummary,
  EventDoc,
  LogEntry,
  PolicyDoc,
  SimState,
  StepReport,
  StoredPolicy,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly diagnostics: string[],
  ) {
    super(diagnostics.length ? diagnostics.join("; ") : `request failed with status ${status}`);
    this.name = "ApiError";
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

async function raise(response: Response): Promise<never> {
  let diagnostics: string[] = [];
  try {
    const body = await response.json();
    if (body && Array.isArray(body.diagnostics)) {
      diagnostics = body.diagnostics.map(String);
    }
  } catch {
    // Non-JSON error body; the status alone will have to do.
  }
  throw new ApiError(response.status, diagnostics);
}

function postJson(body: unknown): RequestInit {
  return {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(body),
  };
}

export function createApi(fetchFn: FetchLike = (url, init) => fetch(url, init), base = "") {
  async function asJson<T>(url: string, init?: RequestInit): Promise<T> {
    const response = await fetchFn(base + url, init);
    if (!response.ok) await raise(response);
    return (await response.json()) as T;
  }

  async function asText(url: string): Promise<string> {
    const response = await fetchFn(base + url);
    if (!response.ok) await raise(response);
    return response.text();
  }

  return {
    searchAcas: (q: string) => asJson<AcaSummary[]>(`/acas?q=${encodeURIComponent(q)}`),
    listPolicies: () => asJson<StoredPolicy[]>("/policies"),
    /** Create or replace; the engine treats POST /policies as an upsert. */
    savePolicy: (doc: PolicyDoc) => asJson<{ id: string }>("/policies", postJson(doc)),
    deletePolicy: (id: string) =>
      asJson<{ deleted: string }>(`/policies/${encodeURIComponent(id)}`, { method: "DELETE" }),
    policyQuery: (id: string) => asText(`/policies/${encodeURIComponent(id)}/query`),
    simState: () => asJson<SimState>("/sim/state"),
    step: (n = 1) => asJson<StepReport>(`/sim/step?n=${n}`, { method: "POST" }),
    runSim: () => asJson<{ running: boolean }>("/sim/run", { method: "POST" }),
    pauseSim: () => asJson<{ running: boolean }>("/sim/pause", { method: "POST" }),
    resetSim: (seed?: number) =>
      asJson<{ tick: number; seed: number }>(
        seed === undefined ? "/sim/reset" : `/sim/reset?seed=${seed}`,
        { method: "POST" },
      ),
    injectEvent: (doc: EventDoc) => asJson<{ accepted: boolean }>("/sim/events", postJson(doc)),
    fetchLog: (since?: number) =>
      asJson<LogEntry[]>(since === undefined ? "/log" : `/log?since=${since}`),
  };
}

export type Api = ReturnType<typeof createApi>;

/** JSON document shapes exchanged with the policy engine's HTTP interface. */

export type AcaKind = "observation" | "actuation";

export interface AcaSummary {
  id: string;
  label: string;
  exposedVars: string[];
  kind: AcaKind;
}

export type ComparisonOp = "<" | "<=" | ">" | ">=" | "=" | "!=";

export const COMPARISON_OPS: ComparisonOp[] = ["<", "<=", ">", ">=", "=", "!="];

export interface ConditionDoc {
  aca: string;
  rename: Record<string, string>;
}

/** A comparison constant is either a JSON value or an IRI (prefixed or full). */
export interface ComparisonDoc {
  var: string;
  op: ComparisonOp;
  value?: number | string | boolean;
  iri?: string;
}

export interface ActionDoc {
  aca: string;
  args: Record<string, string>;
}

export interface PolicyDoc {
  id: string;
  name: string;
  conditions: ConditionDoc[];
  comparisons: ComparisonDoc[];
  action: ActionDoc;
  enabled: boolean;
}

/** GET /policies decorates each document with its compile status. */
export interface StoredPolicy extends PolicyDoc {
  valid: boolean;
  diagnostics: string[];
}

export interface JunctionState {
  id: string;
  x: number;
  y: number;
}

export interface TunnelState {
  id: string;
  ends: string[];
  length: number;
  exit: boolean;
  co: number;
  temperature: number;
  geofenced: boolean;
}

export type WorkerStatus = "working" | "evacuating" | "surfaced";

export interface WorkerState {
  id: string;
  tunnel: string;
  status: WorkerStatus;
}

export interface EventState {
  kind: string;
  tunnel: string;
  coRate: number;
  heatRate: number;
  start: number | null;
  duration: number;
}

export interface SimState {
  tick: number;
  mineEvacuation: boolean;
  junctions: JunctionState[];
  tunnels: TunnelState[];
  workers: WorkerState[];
  events: EventState[];
  running: boolean;
}

export interface StepReport {
  tick: number;
  triggers: number;
  errors: string[];
}

export interface LogCommand {
  kind: string;
  target: string | null;
}

export interface LogEntry {
  tick: number;
  seq: number;
  policy: string;
  label: string;
  binding: Record<string, string>;
  command: LogCommand;
}

export interface EventDoc {
  kind: "GasLeak" | "Fire";
  tunnel: string;
  rate?: number;
  co_rate?: number;
  heat?: number;
  duration: number;
  at_tick?: number;
}

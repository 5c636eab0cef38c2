/**
 * Payload types for the forecasting service API.
 *
 * These mirror the gateway's JSON documents exactly; the UI performs no
 * model arithmetic of its own, so everything rendered traces back to one of
 * these shapes.
 */

export type Category =
  | "historical"
  | "annual"
  | "tax"
  | "demand"
  | "supply"
  | "politics"
  | "price";

export const CATEGORY_ORDER: Category[] = [
  "historical",
  "annual",
  "tax",
  "demand",
  "supply",
  "politics",
  "price",
];

export interface DistributionDoc {
  type: "categorical" | "uniform" | "normal" | "triangular";
  values?: number[];
  probs?: number[];
  labels?: string[];
  lo?: number;
  hi?: number;
  mu?: number;
  sigma?: number;
  trunc_lo?: number;
  trunc_hi?: number;
  mode?: number;
}

export interface NodeDoc {
  id: string;
  category: Category;
  period: string;
  kind: "constant" | "prior" | "deterministic" | "table" | "conditional";
  value?: number;
  label?: string;
  dist?: DistributionDoc;
  parents?: string[];
  expr?: string;
  states?: { label: string; value: number }[];
  rows?: unknown[];
}

export interface NetworkDoc {
  format: string;
  name: string;
  periods: string[];
  nodes: NodeDoc[];
}

export type OverlayEdit =
  | { op: "pin"; node: string; value: number }
  | { op: "replace_dist"; node: string; dist: DistributionDoc }
  | { op: "excise"; node: string; substitute: number }
  | { op: "insert_history"; period: string; values: Record<string, number> };

export interface OverlayDoc {
  format: string;
  name: string;
  base: string;
  edits: OverlayEdit[];
}

export interface TargetResult {
  target: string;
  n: number;
  seed: number;
  mean: number;
  stddev: number;
  histogram: Record<string, number>;
  samples: number[];
}

export interface RunRecord {
  format: string;
  run_id: string;
  status: "complete" | "running";
  network: string | null;
  network_hash: string;
  overlay: string | null;
  targets: string[];
  n: number;
  seed: number;
  created_at: string;
  results: TargetResult[];
}

export interface DiffResult {
  added: string[];
  removed: string[];
  changed: string[];
}

export interface ApiError {
  code: string;
  message: string;
  detail?: unknown;
}

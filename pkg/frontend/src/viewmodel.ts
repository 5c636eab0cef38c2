/**
 * Pure view-model logic: everything the page renders is computed here from
 * server payloads, with no DOM access, so it can be tested headlessly.
 *
 * The network view is a grid: one row per node category, one column per
 * time period (plus "annual").  That layout IS the model document --
 * the UI never invents nodes, arcs, or numbers.
 */

import type {
  Category,
  DistributionDoc,
  NetworkDoc,
  NodeDoc,
  OverlayDoc,
  OverlayEdit,
  RunRecord,
  TargetResult,
} from "./types.js";
import { CATEGORY_ORDER } from "./types.js";

// --- network grid ---------------------------------------------------------

export interface GridCell {
  period: string;
  nodes: NodeDoc[];
}

export interface GridRow {
  category: Category;
  cells: GridCell[];
}

export interface NetworkGrid {
  name: string;
  columns: string[]; // "annual" + the document's periods, in order
  rows: GridRow[];   // only categories that actually occur
}

export function buildGrid(doc: NetworkDoc): NetworkGrid {
  const columns = ["annual", ...doc.periods];
  const present = new Set(doc.nodes.map((n) => n.category));
  const rows: GridRow[] = [];
  for (const category of CATEGORY_ORDER) {
    if (!present.has(category)) continue;
    const cells = columns.map((period) => ({
      period,
      nodes: doc.nodes
        .filter((n) => n.category === category && n.period === period)
        .sort((a, b) => (a.id < b.id ? -1 : 1)),
    }));
    rows.push({ category, cells });
  }
  return { name: doc.name, columns, rows };
}

/** Arcs as [parent, child] pairs, for the inspector's neighbor lists. */
export function nodeNeighbors(doc: NetworkDoc, id: string): {
  parents: string[];
  children: string[];
} {
  const node = doc.nodes.find((n) => n.id === id);
  const parents = node?.parents ? [...node.parents] : [];
  const children = doc.nodes
    .filter((n) => n.parents?.includes(id))
    .map((n) => n.id)
    .sort();
  return { parents, children };
}

export function describeNode(node: NodeDoc): string {
  switch (node.kind) {
    case "constant":
      return `constant ${formatStat(node.value ?? 0)}` +
        (node.label ? ` (state "${node.label}")` : "");
    case "prior":
      return `prior ~ ${node.dist?.type ?? "?"}`;
    case "deterministic":
      return node.expr ?? "";
    case "table":
      return `table over [${(node.parents ?? []).join(", ")}]`;
    case "conditional":
      return `conditional distribution over [${(node.parents ?? []).join(", ")}]`;
  }
}

// --- overlay editor -------------------------------------------------------

/** Pending edits accumulate in order; saving serializes them verbatim. */
export interface EditorState {
  base: string;
  name: string;
  edits: OverlayEdit[];
}

export function emptyEditor(base: string, name: string): EditorState {
  return { base, name, edits: [] };
}

export function withPin(state: EditorState, node: string, value: number): EditorState {
  return { ...state, edits: [...state.edits, { op: "pin", node, value }] };
}

export function withExcise(state: EditorState, node: string,
                           substitute: number): EditorState {
  return { ...state, edits: [...state.edits, { op: "excise", node, substitute }] };
}

export function withReplaceDist(state: EditorState, node: string,
                                dist: DistributionDoc): EditorState {
  return { ...state, edits: [...state.edits, { op: "replace_dist", node, dist }] };
}

export function withoutEdit(state: EditorState, index: number): EditorState {
  return { ...state, edits: state.edits.filter((_, i) => i !== index) };
}

export function clearEdits(state: EditorState): EditorState {
  return { ...state, edits: [] };
}

/** An editor with no edits is the identity overlay. */
export function isIdentity(state: EditorState): boolean {
  return state.edits.length === 0;
}

export function toOverlayDoc(state: EditorState): OverlayDoc {
  return {
    format: "beliefcast-overlay/1",
    name: state.name,
    base: state.base,
    edits: [...state.edits],
  };
}

export function describeEdit(edit: OverlayEdit): string {
  switch (edit.op) {
    case "pin":
      return `pin ${edit.node} = ${formatStat(edit.value)}`;
    case "excise":
      return `excise ${edit.node} (substitute ${formatStat(edit.substitute)})`;
    case "replace_dist":
      return `replace ${edit.node} ~ ${edit.dist.type}`;
    case "insert_history":
      return `insert history for ${edit.period} ` +
        `(${Object.keys(edit.values).length} nodes)`;
  }
}

// --- runs and statistics ----------------------------------------------------

/**
 * Full-precision statistic formatting, matching the CLI's output digit for
 * digit: shortest round-trip decimal, with integral values keeping one
 * decimal place ("18.0", not "18").
 */
export function formatStat(x: number): string {
  if (Number.isInteger(x) && Math.abs(x) < 1e15) {
    return x.toFixed(1);
  }
  return String(x);
}

export interface RunSummaryLine {
  target: string;
  n: number;
  mean: string;
  stddev: string;
}

export function summaryLines(record: RunRecord): RunSummaryLine[] {
  return record.results.map((r) => ({
    target: r.target,
    n: r.n,
    mean: formatStat(r.mean),
    stddev: formatStat(r.stddev),
  }));
}

export function runLabel(record: RunRecord): string {
  const overlay = record.overlay ? ` + ${record.overlay}` : "";
  return `${record.run_id.slice(-8)} ${record.network ?? "?"}${overlay} ` +
    `(n=${record.n}, seed=${record.seed})`;
}

/** Newest first, so the analyst's next what-if starts from the last answer. */
export function pushRun(history: RunRecord[], record: RunRecord): RunRecord[] {
  return [record, ...history.filter((r) => r.run_id !== record.run_id)];
}

export function findResult(record: RunRecord, target: string): TargetResult | undefined {
  return record.results.find((r) => r.target === target);
}

/** Targets present in both runs, preserving the first run's order. */
export function comparableTargets(a: RunRecord, b: RunRecord): string[] {
  const inB = new Set(b.results.map((r) => r.target));
  return a.results.map((r) => r.target).filter((t) => inB.has(t));
}

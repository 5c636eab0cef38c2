/**
 * Page controller: wires the API client, the network grid, the overlay
 * editor, and the run/compare panels together.  All model semantics live
 * server-side; reloading the page and refetching reproduces every view.
 */

import { ApiClient, ServiceError } from "./api.js";
import { histogramSvg } from "./charts.js";
import type { NetworkDoc, RunRecord } from "./types.js";
import {
  EditorState,
  buildGrid,
  comparableTargets,
  describeEdit,
  describeNode,
  emptyEditor,
  findResult,
  isIdentity,
  nodeNeighbors,
  pushRun,
  runLabel,
  summaryLines,
  toOverlayDoc,
  withExcise,
  withPin,
  withoutEdit,
} from "./viewmodel.js";

interface AppState {
  networkId: string | null;
  network: NetworkDoc | null;
  selectedNode: string | null;
  editor: EditorState;
  savedOverlayId: string | null;
  history: RunRecord[];
  compare: [string | null, string | null]; // run ids
  error: string | null;
}

const api = new ApiClient("");

const state: AppState = {
  networkId: null,
  network: null,
  selectedNode: null,
  editor: emptyEditor("", "ui-overlay"),
  savedOverlayId: null,
  history: [],
  compare: [null, null],
  error: null,
};

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function setError(message: string | null): void {
  state.error = message;
  const banner = el<HTMLDivElement>("error-banner");
  banner.textContent = message ?? "";
  banner.style.display = message ? "block" : "none";
}

async function guard<T>(work: () => Promise<T>): Promise<T | undefined> {
  try {
    setError(null);
    return await work();
  } catch (err) {
    if (err instanceof ServiceError) {
      setError(`${err.code}: ${err.message}` +
        (err.detail ? ` — ${JSON.stringify(err.detail)}` : ""));
    } else {
      setError(String(err));
    }
    return undefined;
  }
}

// --- network grid -----------------------------------------------------------

function renderGrid(): void {
  const host = el<HTMLDivElement>("grid");
  if (!state.network) {
    host.innerHTML = '<p class="empty">No network loaded.</p>';
    return;
  }
  const grid = buildGrid(state.network);
  if (grid.rows.length === 0) {
    host.innerHTML = '<p class="empty">Network has no nodes.</p>';
    return;
  }
  const head = `<tr><th></th>${grid.columns.map((c) => `<th>${c}</th>`).join("")}</tr>`;
  const body = grid.rows.map((row) =>
    `<tr><th class="category">${row.category}</th>` +
    row.cells.map((cell) =>
      `<td>${cell.nodes.map((n) =>
        `<button class="node kind-${n.kind}" data-node="${n.id}">${n.id}</button>`,
      ).join("")}</td>`,
    ).join("") + "</tr>",
  ).join("");
  host.innerHTML = `<table class="network-grid">${head}${body}</table>`;
  host.querySelectorAll<HTMLButtonElement>("button.node").forEach((btn) => {
    btn.addEventListener("click", () => selectNode(btn.dataset.node ?? null));
  });
}

function selectNode(id: string | null): void {
  state.selectedNode = id;
  const host = el<HTMLDivElement>("inspector");
  if (!id || !state.network) {
    host.innerHTML = '<p class="empty">Click a node to inspect it.</p>';
    return;
  }
  const node = state.network.nodes.find((n) => n.id === id);
  if (!node) return;
  const { parents, children } = nodeNeighbors(state.network, id);
  host.innerHTML = `
    <h3>${node.id}</h3>
    <dl>
      <dt>kind</dt><dd>${node.kind}</dd>
      <dt>category / period</dt><dd>${node.category} / ${node.period}</dd>
      <dt>definition</dt><dd><code>${describeNode(node)}</code></dd>
      <dt>parents</dt><dd>${parents.join(", ") || "—"}</dd>
      <dt>children</dt><dd>${children.join(", ") || "—"}</dd>
    </dl>
    <div class="inspector-actions">
      <input id="pin-value" type="number" step="any" placeholder="value"/>
      <button id="pin-node">pin</button>
      <button id="excise-node">excise</button>
    </div>`;
  el<HTMLButtonElement>("pin-node").addEventListener("click", () => {
    const value = Number(el<HTMLInputElement>("pin-value").value);
    if (Number.isFinite(value)) {
      state.editor = withPin(state.editor, id, value);
      renderEditor();
    }
  });
  el<HTMLButtonElement>("excise-node").addEventListener("click", () => {
    const value = Number(el<HTMLInputElement>("pin-value").value || "0");
    state.editor = withExcise(state.editor, id, value);
    renderEditor();
  });
}

// --- overlay editor -----------------------------------------------------------

function renderEditor(): void {
  const host = el<HTMLUListElement>("edits");
  host.innerHTML = state.editor.edits.map((edit, i) =>
    `<li>${describeEdit(edit)} <button data-remove="${i}">×</button></li>`,
  ).join("");
  host.querySelectorAll<HTMLButtonElement>("button[data-remove]").forEach((btn) => {
    btn.addEventListener("click", () => {
      state.editor = withoutEdit(state.editor, Number(btn.dataset.remove));
      renderEditor();
    });
  });
  el<HTMLSpanElement>("editor-status").textContent = isIdentity(state.editor)
    ? "identity overlay (no edits)"
    : `${state.editor.edits.length} pending edit(s)`;
}

async function saveOverlay(): Promise<string | null> {
  if (!state.networkId) return null;
  const overlayId = el<HTMLInputElement>("overlay-id").value || "ui-overlay";
  state.editor = { ...state.editor, name: overlayId, base: state.networkId };
  const saved = await guard(() => api.putOverlay(overlayId, toOverlayDoc(state.editor)));
  if (saved) {
    state.savedOverlayId = overlayId;
    el<HTMLSpanElement>("editor-status").textContent = `saved as ${overlayId}`;
    return overlayId;
  }
  return null;
}

// --- runs ----------------------------------------------------------------------

function renderHistory(): void {
  const host = el<HTMLUListElement>("history");
  host.innerHTML = state.history.map((record) => `
    <li>
      <label><input type="radio" name="cmp-a" value="${record.run_id}"
        ${state.compare[0] === record.run_id ? "checked" : ""}/>A</label>
      <label><input type="radio" name="cmp-b" value="${record.run_id}"
        ${state.compare[1] === record.run_id ? "checked" : ""}/>B</label>
      <span class="run-label">${runLabel(record)}</span>
    </li>`).join("");
  host.querySelectorAll<HTMLInputElement>("input[name=cmp-a]").forEach((input) => {
    input.addEventListener("change", () => {
      state.compare[0] = input.value;
      renderComparison();
    });
  });
  host.querySelectorAll<HTMLInputElement>("input[name=cmp-b]").forEach((input) => {
    input.addEventListener("change", () => {
      state.compare[1] = input.value;
      renderComparison();
    });
  });
}

function renderLastRun(record: RunRecord): void {
  const host = el<HTMLDivElement>("last-run");
  const rows = summaryLines(record).map((line) =>
    `<tr><td>${line.target}</td><td>${line.n}</td>` +
    `<td class="num">${line.mean}</td><td class="num">${line.stddev}</td></tr>`,
  ).join("");
  const charts = record.results.map((r) =>
    histogramSvg([r], [record.overlay ?? record.network ?? "run"],
                 { title: r.target })).join("");
  host.innerHTML = `
    <table class="stats"><tr><th>target</th><th>n</th><th>mean</th><th>stddev</th></tr>
    ${rows}</table>
    <div class="charts">${charts}</div>`;
}

async function runSimulation(): Promise<void> {
  if (!state.networkId) return;
  const targets = el<HTMLInputElement>("targets").value
    .split(",").map((t) => t.trim()).filter(Boolean);
  const n = Number(el<HTMLInputElement>("n").value);
  const seed = Number(el<HTMLInputElement>("seed").value);
  let overlay: string | null = null;
  if (!isIdentity(state.editor)) {
    overlay = await saveOverlay();
    if (!overlay) return; // validation failed; banner already shows why
  }
  const record = await guard(() => api.simulate(
    { network: state.networkId!, overlay, targets, n, seed }));
  if (!record) return;
  state.history = pushRun(state.history, record);
  renderHistory();
  renderLastRun(record);
}

// --- comparison -------------------------------------------------------------------

function renderComparison(): void {
  const host = el<HTMLDivElement>("comparison");
  const [aId, bId] = state.compare;
  const a = state.history.find((r) => r.run_id === aId);
  const b = state.history.find((r) => r.run_id === bId);
  if (!a || !b) {
    host.innerHTML = '<p class="empty">Pick runs A and B above to compare.</p>';
    return;
  }
  const targets = comparableTargets(a, b);
  if (targets.length === 0) {
    host.innerHTML = '<p class="empty">The selected runs share no targets.</p>';
    return;
  }
  const panels = targets.map((target) => {
    const ra = findResult(a, target)!;
    const rb = findResult(b, target)!;
    return histogramSvg([ra, rb],
                        [a.overlay ?? a.network ?? "A", b.overlay ?? b.network ?? "B"],
                        { title: target });
  }).join("");
  host.innerHTML = `<div class="charts">${panels}</div>`;
}

// --- bootstrap -----------------------------------------------------------------------

async function loadNetwork(id: string): Promise<void> {
  const doc = await guard(() => api.getNetwork(id));
  if (!doc) return;
  state.networkId = id;
  state.network = doc;
  state.editor = emptyEditor(id, "ui-overlay");
  renderGrid();
  selectNode(null);
  renderEditor();
}

async function boot(): Promise<void> {
  const listing = await guard(() => api.listNetworks());
  const select = el<HTMLSelectElement>("network-select");
  const networks = listing?.networks ?? [];
  select.innerHTML = networks.map((n) => `<option value="${n}">${n}</option>`).join("");
  select.addEventListener("change", () => void loadNetwork(select.value));
  el<HTMLButtonElement>("run").addEventListener("click", () => void runSimulation());
  el<HTMLButtonElement>("clear-edits").addEventListener("click", () => {
    state.editor = { ...state.editor, edits: [] };
    renderEditor();
  });
  if (networks.length > 0) {
    await loadNetwork(networks[0]);
  } else {
    renderGrid();
    renderEditor();
  }
}

if (typeof document !== "undefined" && document.getElementById("grid")) {
  void boot();
}

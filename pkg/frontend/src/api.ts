/**
 * Thin typed client for the gateway HTTP API.  Every method either returns
 * the parsed payload or throws a ServiceError carrying the gateway's
 * {code, message, detail} body verbatim.
 */

import type { DiffResult, NetworkDoc, OverlayDoc, RunRecord } from "./types.js";

export class ServiceError extends Error {
  readonly code: string;
  readonly status: number;
  readonly detail: unknown;

  constructor(status: number, code: string, message: string, detail?: unknown) {
    super(message);
    this.status = status;
    this.code = code;
    this.detail = detail;
  }
}

async function request<T>(base: string, path: string, init?: RequestInit): Promise<T> {
  const response = await fetch(base + path, {
    headers: { "content-type": "application/json" },
    ...init,
  });
  const body = await response.json().catch(() => null);
  if (!response.ok && !(response.status === 202)) {
    const err = (body ?? {}) as { code?: string; message?: string; detail?: unknown };
    throw new ServiceError(
      response.status,
      err.code ?? "unknown",
      err.message ?? `request failed with status ${response.status}`,
      err.detail,
    );
  }
  // the gateway uses 202 for both completed and still-running simulations,
  // and embeds {code, message} on in-band errors
  if (body && typeof body === "object" && "code" in body && "message" in body &&
      !("run_id" in body)) {
    const err = body as { code: string; message: string; detail?: unknown };
    throw new ServiceError(response.status, err.code, err.message, err.detail);
  }
  return body as T;
}

export class ApiClient {
  constructor(readonly base: string = "") {}

  health(): Promise<{ status: string }> {
    return request(this.base, "/healthz");
  }

  listNetworks(): Promise<{ networks: string[] }> {
    return request(this.base, "/networks");
  }

  getNetwork(id: string): Promise<NetworkDoc> {
    return request(this.base, `/networks/${encodeURIComponent(id)}`);
  }

  putOverlay(id: string, doc: OverlayDoc): Promise<{ id: string }> {
    return request(this.base, `/overlays/${encodeURIComponent(id)}`, {
      method: "PUT",
      body: JSON.stringify(doc),
    });
  }

  getOverlay(id: string): Promise<OverlayDoc> {
    return request(this.base, `/overlays/${encodeURIComponent(id)}`);
  }

  simulate(req: {
    network: string;
    overlay?: string | null;
    targets: string[];
    n: number;
    seed: number;
  }): Promise<RunRecord> {
    return request(this.base, "/simulate", {
      method: "POST",
      body: JSON.stringify(req),
    });
  }

  getRun(id: string): Promise<RunRecord> {
    return request(this.base, `/runs/${encodeURIComponent(id)}`);
  }

  diff(a: string, b: string): Promise<DiffResult> {
    return request(this.base, "/diff", {
      method: "POST",
      body: JSON.stringify({ a, b }),
    });
  }
}

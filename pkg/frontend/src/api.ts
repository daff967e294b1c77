// Thin fetch client for the sheetstack JSON API. The UI talks to the service
// through this module only — no file access, no local analytics.

import type { CommandOutcome, Feed, SeriesDoc, ServiceIndex } from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly body: unknown,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

/** 422 from POST /commands: the text did not parse; `help` is the grammar. */
export class CommandRejected extends ApiError {
  readonly help: string;

  constructor(status: number, body: unknown, detail: string, help: string) {
    super(status, body, detail);
    this.name = "CommandRejected";
    this.help = help;
  }
}

/** Canonical series key, identical to the server's encoding. */
export function seriesKey(ins: { group: string; entity: string[]; attribute: string }): string {
  return JSON.stringify([ins.group, ins.entity, ins.attribute]);
}

async function readBody(res: Response): Promise<unknown> {
  const text = await res.text();
  try {
    return JSON.parse(text);
  } catch {
    return text;
  }
}

function raiseFor(status: number, body: unknown): never {
  const doc = (typeof body === "object" && body !== null ? body : {}) as Record<string, unknown>;
  const detail = typeof doc.detail === "string" ? doc.detail : `HTTP ${status}`;
  if (status === 422 && typeof doc.help === "string") {
    throw new CommandRejected(status, body, detail, doc.help);
  }
  throw new ApiError(status, body, detail);
}

export class ApiClient {
  readonly base: string;

  constructor(base = "") {
    this.base = base.replace(/\/+$/, "");
  }

  private async getJson<T>(path: string): Promise<T> {
    const res = await fetch(this.base + path, { headers: { Accept: "application/json" } });
    const body = await readBody(res);
    if (!res.ok) raiseFor(res.status, body);
    return body as T;
  }

  index(): Promise<ServiceIndex> {
    return this.getJson<ServiceIndex>("/");
  }

  fetchFeed(reportType: string, user = "default"): Promise<Feed> {
    const q = user === "default" ? "" : `?user=${encodeURIComponent(user)}`;
    return this.getJson<Feed>(`/feeds/${encodeURIComponent(reportType)}${q}`);
  }

  async sendCommand(text: string, user = "default"): Promise<CommandOutcome> {
    const res = await fetch(this.base + "/commands", {
      method: "POST",
      headers: { "Content-Type": "application/json", Accept: "application/json" },
      body: JSON.stringify({ text, user }),
    });
    const body = await readBody(res);
    if (!res.ok) raiseFor(res.status, body);
    return body as CommandOutcome;
  }

  fetchSeries(key: string, reportType?: string): Promise<SeriesDoc> {
    return this.getJson<SeriesDoc>(this.seriesPath(key, reportType));
  }

  seriesPath(key: string, reportType?: string): string {
    const q = reportType ? `?report=${encodeURIComponent(reportType)}` : "";
    return `/series/${encodeURIComponent(key)}${q}`;
  }

  seriesUrl(key: string, reportType?: string): string {
    return this.base + this.seriesPath(key, reportType);
  }
}

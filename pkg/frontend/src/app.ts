// Page controller: owns the feed pane and the transcript, talks to the
// service through an ApiClient, and keeps at most one command in flight.
// Re-fetching after losing all client state reproduces the identical view —
// nothing here caches analytics, only the last feed document for display.

import { ApiClient, CommandRejected } from "./api.js";
import { renderFeed } from "./cards.js";
import { Transcript } from "./chat.js";
import type { Feed } from "./types.js";

export interface AppElements {
  feedPane: HTMLElement;
  transcriptPane: HTMLElement;
  statusLine?: HTMLElement;
}

export interface AppOptions {
  reportType: string;
  user?: string;
}

export class ExplorerApp {
  readonly transcript: Transcript;
  readonly reportType: string;
  readonly user: string;
  lastFeed: Feed | null = null;

  constructor(
    readonly client: ApiClient,
    readonly els: AppElements,
    opts: AppOptions,
  ) {
    this.transcript = new Transcript(els.transcriptPane);
    this.reportType = opts.reportType;
    this.user = opts.user ?? "default";
  }

  private status(text: string): void {
    if (this.els.statusLine) this.els.statusLine.textContent = text;
  }

  private show(feed: Feed): void {
    this.lastFeed = feed;
    renderFeed(this.els.feedPane, feed, {
      apiBase: this.client.base,
      report: this.reportType,
    });
    this.status(
      `${feed.report_type} · ${feed.insights.length} insights · window of ${feed.window.count}`,
    );
  }

  /** Fetch and render the current feed. */
  async load(): Promise<void> {
    try {
      this.show(await this.client.fetchFeed(this.reportType, this.user));
    } catch (err) {
      this.transcript.addRetry(describe(err), () => void this.load());
    }
  }

  /**
   * Submit one command: transcript entry, POST, and — on success — swap the
   * feed pane to the document embedded in the response (one round-trip).
   */
  async submit(text: string): Promise<void> {
    this.transcript.add("user", text);
    try {
      const outcome = await this.client.sendCommand(text, this.user);
      for (const warning of outcome.warnings) {
        this.transcript.add("system", `warning: ${warning}`);
      }
      this.transcript.add(
        "reply",
        `${outcome.verb} applied to ${outcome.report_type} — ${outcome.feed.insights.length} insights.`,
      );
      this.show(outcome.feed);
    } catch (err) {
      if (err instanceof CommandRejected) {
        this.transcript.add("system", err.message);
        this.transcript.addHelp(err.help);
        return; // feed pane untouched
      }
      this.transcript.addRetry(describe(err), () => void this.submit(text));
    }
  }
}

function describe(err: unknown): string {
  if (err instanceof Error) return err.message;
  return String(err);
}

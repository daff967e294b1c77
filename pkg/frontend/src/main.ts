// Browser bootstrap: read page parameters, discover a report type, and wire
// the form. All analytics stay on the server; this file only moves JSON.

import { ApiClient } from "./api.js";
import { ExplorerApp } from "./app.js";
import { wireCommandBox } from "./chat.js";

async function boot(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const base = params.get("api") ?? "http://127.0.0.1:8000";
  const user = params.get("user") ?? "default";
  const client = new ApiClient(base);

  const feedPane = document.getElementById("feed")!;
  const transcriptPane = document.getElementById("transcript")!;
  const statusLine = document.getElementById("status")!;
  const form = document.getElementById("command-form") as HTMLFormElement;
  const input = document.getElementById("command-input") as HTMLInputElement;

  let reportType = params.get("report");
  if (!reportType) {
    try {
      const index = await client.index();
      reportType = index.report_types[0] ?? null;
    } catch (err) {
      statusLine.textContent = `service unreachable at ${base}: ${String(err)}`;
      return;
    }
    if (!reportType) {
      statusLine.textContent = `no reports ingested yet at ${base}`;
      return;
    }
  }

  const app = new ExplorerApp(client, { feedPane, transcriptPane, statusLine }, {
    reportType,
    user,
  });
  wireCommandBox(form, input, (text) => app.submit(text));
  app.transcript.add(
    "system",
    `connected to ${base} · report "${reportType}" · user "${user}" — try: show preferences for ${reportType}`,
  );
  await app.load();
}

window.addEventListener("DOMContentLoaded", () => void boot());

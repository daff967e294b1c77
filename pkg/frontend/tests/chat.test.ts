// @vitest-environment jsdom
// Transcript behavior and the command flow against a scripted fake client:
// help bubbles on rejection (feed untouched), retry affordance on network
// failure, one in-flight command at a time.

import { beforeEach, describe, expect, it, vi } from "vitest";

import type { ApiClient } from "../src/api.js";
import { CommandRejected } from "../src/api.js";
import { ExplorerApp } from "../src/app.js";
import { Transcript, wireCommandBox } from "../src/chat.js";
import type { CommandOutcome, Feed, FeedInsight } from "../src/types.js";

function feedDoc(insights: FeedInsight[] = [], user = "default"): Feed {
  return {
    report_type: "r1",
    window: { from_ts: 10, to_ts: 20, count: 2 },
    user,
    generated_at: 20,
    insights,
  };
}

function insight(attribute: string, narrative = "x"): FeedInsight {
  return {
    category: "Highlight",
    group: "NTS",
    entity: ["P1"],
    attribute,
    narrative,
    score: 1,
    points: [{ ordinal: 0, ts: 10, value: 1 }],
  };
}

function outcome(verb: string, feed: Feed, warnings: string[] = []): CommandOutcome {
  return { user: feed.user, verb, report_type: feed.report_type, warnings, feed };
}

interface FakeScript {
  feed?: () => Promise<Feed>;
  command?: (text: string) => Promise<CommandOutcome>;
}

function fakeClient(script: FakeScript): ApiClient {
  return {
    base: "",
    fetchFeed: () => (script.feed ? script.feed() : Promise.resolve(feedDoc())),
    sendCommand: (text: string) => {
      if (!script.command) throw new Error("unexpected command");
      return script.command(text);
    },
  } as unknown as ApiClient;
}

function makeApp(script: FakeScript) {
  const feedPane = document.createElement("div");
  const transcriptPane = document.createElement("div");
  document.body.append(feedPane, transcriptPane);
  const app = new ExplorerApp(fakeClient(script), { feedPane, transcriptPane }, {
    reportType: "r1",
  });
  return { app, feedPane, transcriptPane };
}

beforeEach(() => {
  document.body.innerHTML = "";
});

describe("transcript", () => {
  it("keeps bubbles in arrival order with role classes", () => {
    const el = document.createElement("div");
    const t = new Transcript(el);
    t.add("user", "hello");
    t.add("reply", "done");
    t.add("system", "note");
    expect([...el.children].map((c) => c.className)).toEqual([
      "bubble bubble-user",
      "bubble bubble-reply",
      "bubble bubble-system",
    ]);
    expect(el.children[0]!.textContent).toBe("hello");
  });

  it("help bubbles preserve the grammar text verbatim", () => {
    const el = document.createElement("div");
    const t = new Transcript(el);
    t.addHelp("use attributes <a, b> for <report>\nset window <n> for <report>");
    const pre = el.querySelector("pre")!;
    expect(pre.textContent).toContain("set window <n> for <report>");
  });

  it("retry bubbles invoke the callback once", () => {
    const el = document.createElement("div");
    const t = new Transcript(el);
    const onRetry = vi.fn();
    t.addRetry("network down", onRetry);
    const button = el.querySelector("button.retry")!;
    (button as HTMLButtonElement).click();
    (button as HTMLButtonElement).click();
    expect(onRetry).toHaveBeenCalledTimes(1);
  });
});

describe("command box wiring", () => {
  function buildForm() {
    const form = document.createElement("form");
    const input = document.createElement("input");
    form.appendChild(input);
    document.body.appendChild(form);
    return { form, input };
  }

  it("submits trimmed text and clears the input", async () => {
    const { form, input } = buildForm();
    const seen: string[] = [];
    wireCommandBox(form, input, async (text) => {
      seen.push(text);
    });
    input.value = "  show preferences for r1  ";
    form.dispatchEvent(new Event("submit", { cancelable: true }));
    await Promise.resolve();
    expect(seen).toEqual(["show preferences for r1"]);
    expect(input.value).toBe("");
  });

  it("ignores empty submissions and allows only one in flight", async () => {
    const { form, input } = buildForm();
    let release!: () => void;
    const gate = new Promise<void>((r) => (release = r));
    const seen: string[] = [];
    wireCommandBox(form, input, (text) => {
      seen.push(text);
      return gate;
    });
    form.dispatchEvent(new Event("submit", { cancelable: true })); // empty: ignored
    input.value = "first";
    form.dispatchEvent(new Event("submit", { cancelable: true }));
    input.value = "second while busy";
    form.dispatchEvent(new Event("submit", { cancelable: true })); // blocked
    expect(seen).toEqual(["first"]);
    release();
    await gate;
    await Promise.resolve();
    input.value = "third";
    form.dispatchEvent(new Event("submit", { cancelable: true }));
    expect(seen).toEqual(["first", "third"]);
  });
});

describe("app command flow", () => {
  it("renders the feed returned by a successful command in one round-trip", async () => {
    let calls = 0;
    const { app, feedPane } = makeApp({
      command: async () => {
        calls += 1;
        return outcome("use", feedDoc([insight("Sales", "only sales")]));
      },
    });
    await app.submit("use attributes Sales for r1");
    expect(calls).toBe(1);
    expect(feedPane.querySelectorAll(".card").length).toBe(1);
    expect(feedPane.querySelector(".narrative")!.textContent).toBe("only sales");
  });

  it("gibberish → help bubble, feed pane untouched", async () => {
    const { app, feedPane, transcriptPane } = makeApp({
      feed: async () => feedDoc([insight("Sales")]),
      command: async () => {
        throw new CommandRejected(422, {}, "could not parse", "use attributes <a> for <r>");
      },
    });
    await app.load();
    const before = feedPane.innerHTML;
    await app.submit("make it nicer please");
    expect(feedPane.innerHTML).toBe(before);
    const help = transcriptPane.querySelector(".bubble-help pre")!;
    expect(help.textContent).toContain("use attributes");
  });

  it("network failure → retry bubble; retrying resubmits the same text", async () => {
    const texts: string[] = [];
    let fail = true;
    const { app, feedPane, transcriptPane } = makeApp({
      command: async (text) => {
        texts.push(text);
        if (fail) throw new TypeError("fetch failed");
        return outcome("use", feedDoc([insight("Sales")]));
      },
    });
    await app.submit("use attributes Sales for r1");
    expect(feedPane.querySelectorAll(".card").length).toBe(0);
    const button = transcriptPane.querySelector<HTMLButtonElement>("button.retry")!;
    fail = false;
    button.click();
    await vi.waitFor(() => {
      expect(feedPane.querySelectorAll(".card").length).toBe(1);
    });
    expect(texts).toEqual(["use attributes Sales for r1", "use attributes Sales for r1"]);
  });

  it("warnings from the service land in the transcript", async () => {
    const { app, transcriptPane } = makeApp({
      command: async () =>
        outcome("use", feedDoc([]), ["unknown attribute 'Salez' (stored anyway)"]),
    });
    await app.submit("use attributes Salez for r1");
    const systems = [...transcriptPane.querySelectorAll(".bubble-system")].map(
      (b) => b.textContent,
    );
    expect(systems.some((s) => s!.includes("Salez"))).toBe(true);
  });
});

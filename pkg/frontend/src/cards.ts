// Feed pane rendering: one card per insight, grouped by category, ordered by
// score. Every number shown comes verbatim from the feed document — the only
// client-side arithmetic is the sparkline's min-max pixel scaling.

import { seriesKey } from "./api.js";
import type { Feed, FeedInsight, FeedPoint } from "./types.js";
import { CATEGORIES, GROUPS } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

/** Display form of a feed number: the JSON value itself, unreformatted. */
export function fmtNum(value: number): string {
  return String(value);
}

function isInt(v: unknown): v is number {
  return typeof v === "number" && Number.isInteger(v);
}

function isNum(v: unknown): v is number {
  return typeof v === "number" && Number.isFinite(v);
}

function isStrArray(v: unknown): v is string[] {
  return Array.isArray(v) && v.every((e) => typeof e === "string");
}

/**
 * Structural check against feed schema v1. Returns a list of problems;
 * an empty list means the document is renderable.
 */
export function validateFeed(doc: unknown): string[] {
  const problems: string[] = [];
  if (typeof doc !== "object" || doc === null || Array.isArray(doc)) {
    return ["feed document is not an object"];
  }
  const d = doc as Record<string, unknown>;
  if (typeof d.report_type !== "string") problems.push("report_type: expected string");
  if (typeof d.user !== "string") problems.push("user: expected string");
  if (!isInt(d.generated_at)) problems.push("generated_at: expected integer");
  const w = d.window as Record<string, unknown> | undefined;
  if (typeof w !== "object" || w === null) {
    problems.push("window: expected object");
  } else {
    for (const f of ["from_ts", "to_ts", "count"]) {
      if (!isInt(w[f])) problems.push(`window.${f}: expected integer`);
    }
  }
  if (!Array.isArray(d.insights)) {
    problems.push("insights: expected array");
    return problems;
  }
  (d.insights as unknown[]).forEach((raw, i) => {
    const at = `insights[${i}]`;
    if (typeof raw !== "object" || raw === null) {
      problems.push(`${at}: expected object`);
      return;
    }
    const ins = raw as Record<string, unknown>;
    if (!CATEGORIES.includes(ins.category as never)) problems.push(`${at}.category: unknown value`);
    if (!GROUPS.includes(ins.group as never)) problems.push(`${at}.group: unknown value`);
    if (!isStrArray(ins.entity)) problems.push(`${at}.entity: expected string array`);
    if (typeof ins.attribute !== "string") problems.push(`${at}.attribute: expected string`);
    if (typeof ins.narrative !== "string") problems.push(`${at}.narrative: expected string`);
    if (!isNum(ins.score)) problems.push(`${at}.score: expected number`);
    if (!Array.isArray(ins.points)) {
      problems.push(`${at}.points: expected array`);
      return;
    }
    (ins.points as unknown[]).forEach((p, j) => {
      const pt = p as Record<string, unknown>;
      if (typeof pt !== "object" || pt === null || !isInt(pt.ordinal) || !isInt(pt.ts) || !isNum(pt.value)) {
        problems.push(`${at}.points[${j}]: expected {ordinal, ts, value}`);
      }
    });
  });
  return problems;
}

/** Sparkline SVG: a polyline plus one marker per point, min-max scaled. */
export function renderSparkline(points: FeedPoint[]): SVGSVGElement {
  const width = 220;
  const height = 44;
  const pad = 5;
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("class", "spark");
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("width", String(width));
  svg.setAttribute("height", String(height));

  const values = points.map((p) => p.value);
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  const span = hi - lo;
  const xAt = (i: number) =>
    points.length === 1 ? width / 2 : pad + (i * (width - 2 * pad)) / (points.length - 1);
  const yAt = (v: number) => (span === 0 ? height / 2 : height - pad - ((v - lo) * (height - 2 * pad)) / span);

  const line = document.createElementNS(SVG_NS, "polyline");
  line.setAttribute("class", "spark-line");
  line.setAttribute("fill", "none");
  line.setAttribute(
    "points",
    points.map((p, i) => `${xAt(i).toFixed(2)},${yAt(p.value).toFixed(2)}`).join(" "),
  );
  svg.appendChild(line);

  points.forEach((p, i) => {
    const dot = document.createElementNS(SVG_NS, "circle");
    dot.setAttribute("class", "spark-pt");
    dot.setAttribute("cx", xAt(i).toFixed(2));
    dot.setAttribute("cy", yAt(p.value).toFixed(2));
    dot.setAttribute("r", "2.5");
    dot.setAttribute("data-ordinal", String(p.ordinal));
    dot.setAttribute("data-value", fmtNum(p.value));
    const title = document.createElementNS(SVG_NS, "title");
    title.textContent = `ordinal ${p.ordinal}: ${fmtNum(p.value)}`;
    dot.appendChild(title);
    svg.appendChild(dot);
  });
  return svg;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function numSpan(value: number): HTMLSpanElement {
  const span = el("span", "num", fmtNum(value));
  span.setAttribute("data-numeric", "");
  return span;
}

export interface RenderOptions {
  /** Base used for the card's explore link (defaults to same-origin paths). */
  apiBase?: string;
  /** Report scope appended to explore links. */
  report?: string;
}

function entityLabel(ins: FeedInsight): string {
  return ins.entity.length ? ins.entity.join("/") : "all series";
}

function buildCard(ins: FeedInsight, index: number, opts: RenderOptions): HTMLElement {
  const card = el("article", "card");
  card.setAttribute("data-insight-index", String(index));
  card.setAttribute("data-category", ins.category);

  const head = el("header", "card-head");
  head.appendChild(el("span", `badge badge-${ins.category.toLowerCase()}`, ins.category));
  head.appendChild(el("span", "chip chip-group", ins.group));
  const score = el("span", "chip chip-score", "score ");
  score.appendChild(numSpan(ins.score));
  head.appendChild(score);
  card.appendChild(head);

  const title = el("h3", "card-title", `${entityLabel(ins)} · ${ins.attribute || "—"}`);
  card.appendChild(title);
  card.appendChild(el("p", "narrative", ins.narrative));

  if (ins.points.length > 0) {
    const fig = el("figure", "spark-box");
    fig.appendChild(renderSparkline(ins.points));
    const caption = el("figcaption", "spark-range");
    const first = ins.points[0];
    const last = ins.points[ins.points.length - 1];
    if (first && last) {
      caption.appendChild(numSpan(first.value));
      caption.appendChild(document.createTextNode(" → "));
      caption.appendChild(numSpan(last.value));
    }
    fig.appendChild(caption);
    card.appendChild(fig);
  }

  if (ins.group !== "ALL") {
    const key = seriesKey(ins);
    const q = opts.report ? `?report=${encodeURIComponent(opts.report)}` : "";
    const link = el("a", "explore", "Explore series");
    link.setAttribute("href", `${opts.apiBase ?? ""}/series/${encodeURIComponent(key)}${q}`);
    link.setAttribute("data-series-key", key);
    card.appendChild(link);
  }
  return card;
}

/**
 * Render a feed into `root`, replacing previous content. Invalid documents
 * produce a banner and nothing else; empty feeds produce an empty-state note.
 */
export function renderFeed(root: HTMLElement, feed: Feed, opts: RenderOptions = {}): void {
  root.textContent = "";
  const problems = validateFeed(feed);
  if (problems.length > 0) {
    const banner = el("div", "schema-banner");
    banner.appendChild(el("strong", undefined, "Feed does not match schema v1. "));
    banner.appendChild(el("span", undefined, problems.join("; ")));
    root.appendChild(banner);
    return;
  }

  if (feed.insights.length === 0) {
    root.appendChild(
      el("div", "empty-state", "No insights yet — upload a snapshot to get a first feed."),
    );
    return;
  }

  // Group cards by category (sections keep the feed's category order) and
  // order cards inside each section by score, descending.
  const order: string[] = [];
  const byCategory = new Map<string, Array<{ ins: FeedInsight; index: number }>>();
  feed.insights.forEach((ins, index) => {
    if (!byCategory.has(ins.category)) {
      byCategory.set(ins.category, []);
      order.push(ins.category);
    }
    byCategory.get(ins.category)!.push({ ins, index });
  });

  for (const category of order) {
    const section = el("section", "category-section");
    section.setAttribute("data-category", category);
    section.appendChild(el("h2", "category-title", category));
    const grid = el("div", "cards");
    const members = byCategory.get(category)!;
    members.sort((a, b) => b.ins.score - a.ins.score || a.index - b.index);
    for (const { ins, index } of members) {
      grid.appendChild(buildCard(ins, index, opts));
    }
    section.appendChild(grid);
    root.appendChild(section);
  }
}

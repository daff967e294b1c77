// Wire types for the feed JSON (schema v1) and the command/series endpoints.

export const CATEGORIES = ["Highlight", "Trend", "Outlier", "Delta", "Novelty"] as const;
export type Category = (typeof CATEGORIES)[number];

export const GROUPS = ["NTS", "RTS", "CTS", "ALL"] as const;
export type Group = (typeof GROUPS)[number];

export interface FeedPoint {
  ordinal: number;
  ts: number;
  value: number;
}

export interface FeedInsight {
  category: Category;
  group: Group;
  entity: string[];
  attribute: string;
  narrative: string;
  score: number;
  points: FeedPoint[];
}

export interface ShortSeries {
  group: Exclude<Group, "ALL">;
  entity: string[];
  attribute: string;
  mean: number;
  variance: number;
}

export interface FeedWindow {
  from_ts: number;
  to_ts: number;
  count: number;
}

export interface Feed {
  report_type: string;
  window: FeedWindow;
  user: string;
  generated_at: number;
  insights: FeedInsight[];
  appendix?: { short_series: ShortSeries[] };
}

export interface CommandOutcome {
  user: string;
  verb: string;
  report_type: string;
  warnings: string[];
  feed: Feed;
}

export interface SeriesDoc {
  report_type: string;
  series: { group: Group; entity: string[]; attribute: string };
  points: FeedPoint[];
  stats: Record<string, unknown>;
}

export interface ServiceIndex {
  service: string;
  report_types: string[];
  endpoints: string[];
}

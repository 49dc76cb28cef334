// Pure view rendering: (ViewState, fetched data) -> markup strings.
// Nothing here touches the DOM, the network or the clock, so fixture
// snapshots pin the exact output.

import type { SeriesEntry, SeriesResponse } from "./api.js";
import type { ColorAssigner } from "./colors.js";
import type { ViewState } from "./state.js";

const WIDTH = 720;
const HEIGHT = 300;
const MARGIN = { top: 16, right: 16, bottom: 34, left: 56 };
const PANEL_W = 340;
const PANEL_H = 180;
const RANK_COLORS = ["#2563eb", "#dc2626", "#16a34a", "#9333ea"];

export function fmt(value: number): string {
  if (Number.isInteger(value) && Math.abs(value) < 1e15) return String(value);
  return Number(value.toPrecision(5)).toString();
}

/** The value column the active view plots for one series entry. */
export function activeColumn(state: ViewState, entry: SeriesEntry): Array<number | null> {
  if (!entry.points) return [];
  let column: Array<number | null>;
  if (state.family === "freq") {
    column = entry.points[state.absolute ? "absolute" : "per_million"] ?? [];
  } else if (state.family === "dist") {
    column = entry.points["distance"] ?? [];
  } else {
    column = entry.points[state.sentimentMode] ?? [];
  }
  return state.zeroFill ? column.map((v) => (v === null ? 0 : v)) : column;
}

function yAxisLabel(state: ViewState): string {
  switch (state.family) {
    case "freq":
      return state.absolute ? "occurrences" : "per million tokens";
    case "dist":
      return "cosine distance to anchor";
    case "sent":
      return state.sentimentMode === "mean_pos" ? "mean positive score" : "positive fraction";
    case "topic":
      return "mean topic score";
  }
}

interface Scale {
  x(i: number): number;
  y(v: number): number;
  yMax: number;
}

function makeScale(nBuckets: number, yMax: number): Scale {
  const innerW = WIDTH - MARGIN.left - MARGIN.right;
  const innerH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const step = nBuckets > 1 ? innerW / (nBuckets - 1) : 0;
  return {
    x: (i) => MARGIN.left + (nBuckets > 1 ? i * step : innerW / 2),
    y: (v) => MARGIN.top + innerH - (yMax > 0 ? (v / yMax) * innerH : 0),
    yMax,
  };
}

/** Polyline paths per contiguous non-null run; lone points become dots. */
function seriesPaths(column: Array<number | null>, scale: Scale, color: string): string {
  const parts: string[] = [];
  let run: Array<[number, number]> = [];
  const flush = () => {
    if (run.length === 1) {
      parts.push(`<circle cx="${fmt(run[0][0])}" cy="${fmt(run[0][1])}" r="3" fill="${color}"/>`);
    } else if (run.length > 1) {
      const pts = run.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
      parts.push(`<polyline points="${pts}" fill="none" stroke="${color}" stroke-width="2"/>`);
    }
    run = [];
  };
  column.forEach((v, i) => {
    if (v === null) {
      flush();
    } else {
      run.push([scale.x(i), scale.y(v)]);
    }
  });
  flush();
  return parts.join("");
}

function axes(buckets: string[], scale: Scale, yLabel: string): string {
  const parts: string[] = [];
  const innerBottom = HEIGHT - MARGIN.bottom;
  parts.push(
    `<line x1="${MARGIN.left}" y1="${innerBottom}" x2="${WIDTH - MARGIN.right}" y2="${innerBottom}" stroke="#888"/>`,
    `<line x1="${MARGIN.left}" y1="${MARGIN.top}" x2="${MARGIN.left}" y2="${innerBottom}" stroke="#888"/>`,
  );
  const every = Math.max(1, Math.ceil(buckets.length / 12));
  buckets.forEach((label, i) => {
    if (i % every !== 0 && i !== buckets.length - 1) return;
    const x = scale.x(i);
    parts.push(
      `<line x1="${fmt(x)}" y1="${innerBottom}" x2="${fmt(x)}" y2="${innerBottom + 4}" stroke="#888"/>`,
      `<text x="${fmt(x)}" y="${innerBottom + 16}" font-size="10" text-anchor="middle">${esc(label)}</text>`,
    );
  });
  for (const frac of [0, 0.5, 1]) {
    const v = scale.yMax * frac;
    const y = scale.y(v);
    parts.push(
      `<line x1="${MARGIN.left - 4}" y1="${fmt(y)}" x2="${MARGIN.left}" y2="${fmt(y)}" stroke="#888"/>`,
      `<text x="${MARGIN.left - 8}" y="${fmt(y + 3)}" font-size="10" text-anchor="end">${fmt(v)}</text>`,
    );
  }
  parts.push(
    `<text x="12" y="${MARGIN.top - 4}" font-size="10" fill="#555">${esc(yLabel)}</text>`,
  );
  return parts.join("");
}

export function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Line chart shared by the frequency, distance and sentiment tabs. */
export function renderLineChart(
  state: ViewState,
  resp: SeriesResponse,
  colors: ColorAssigner,
): string {
  const found = resp.series.filter((s) => s.found);
  let yMax = 0;
  for (const entry of found) {
    for (const v of activeColumn(state, entry)) {
      if (v !== null && v > yMax) yMax = v;
    }
  }
  const scale = makeScale(resp.buckets.length, yMax || 1);
  const lines = found
    .map((entry) => seriesPaths(activeColumn(state, entry), scale, colors.color(entry.word)))
    .join("");
  return (
    `<svg viewBox="0 0 ${WIDTH} ${HEIGHT}" role="img" class="chart">` +
    axes(resp.buckets, scale, yAxisLabel(state)) +
    lines +
    `</svg>`
  );
}

/** Per-word small multiples: one panel per word, top-4 topic lines each. */
export function renderTopicPanels(
  state: ViewState,
  resp: SeriesResponse,
  colors: ColorAssigner,
): string {
  const panels = resp.series
    .filter((s) => s.found && s.points && s.top4)
    .map((entry) => {
      const top4 = entry.top4 as string[];
      let yMax = 0;
      for (const label of top4) {
        for (const v of entry.points![label] ?? []) {
          if (v !== null && v > yMax) yMax = v;
        }
      }
      const scaleFull = makeScale(resp.buckets.length, yMax || 1);
      // panel reuses the shared geometry scaled down
      const lines = top4
        .map((label, rank) => {
          let column = entry.points![label] ?? [];
          if (state.zeroFill) column = column.map((v) => (v === null ? 0 : v));
          return seriesPaths(column, scaleFull, RANK_COLORS[rank]);
        })
        .join("");
      const legend = top4
        .map(
          (label, rank) =>
            `<span class="topic-key" style="color:${RANK_COLORS[rank]}">${esc(label)}</span>`,
        )
        .join(" ");
      return (
        `<figure class="topic-panel" data-word="${esc(entry.word)}">` +
        `<figcaption><strong style="color:${colors.color(entry.word)}">${esc(entry.word)}</strong> ${legend}</figcaption>` +
        `<svg viewBox="0 0 ${WIDTH} ${HEIGHT}" width="${PANEL_W}" height="${PANEL_H}" role="img" class="chart">` +
        axes(resp.buckets, scaleFull, "mean topic score") +
        lines +
        `</svg></figure>`
      );
    });
  return `<div class="topic-grid">${panels.join("")}</div>`;
}

export function renderNotices(resp: SeriesResponse): string {
  const missing = resp.series.filter((s) => !s.found);
  if (!missing.length) return "";
  const items = missing
    .map((s) => `<li><code>${esc(s.word)}</code>: ${esc(s.note ?? "no data")}</li>`)
    .join("");
  return `<ul class="notices">${items}</ul>`;
}

export function renderChips(state: ViewState, colors: ColorAssigner): string {
  return state.words
    .map(
      (w) =>
        `<span class="chip" style="border-color:${colors.color(w)}">` +
        `<span class="chip-label" style="color:${colors.color(w)}">${esc(w)}</span>` +
        `<button class="chip-remove" data-word="${esc(w)}" title="remove">&times;</button></span>`,
    )
    .join("");
}

export function renderSuggestions(items: string[]): string {
  if (!items.length) return "";
  return items
    .map((w) => `<li class="suggestion" data-word="${esc(w)}">${esc(w)}</li>`)
    .join("");
}

export function renderBanner(message: string): string {
  return (
    `<div class="banner" role="alert">${esc(message)} ` +
    `<button id="retry">retry</button></div>`
  );
}

/** Main content for the active tab. */
export function renderView(
  state: ViewState,
  resp: SeriesResponse | null,
  colors: ColorAssigner,
): string {
  if (!state.words.length) {
    return `<p class="hint">Add a word above to start exploring.</p>`;
  }
  if (!resp) return "";
  const notices = renderNotices(resp);
  if (!resp.series.some((s) => s.found)) {
    return notices || `<p class="hint">No data for this selection.</p>`;
  }
  const chart =
    state.family === "topic"
      ? renderTopicPanels(state, resp, colors)
      : renderLineChart(state, resp, colors);
  return notices + chart;
}

// CSV download of exactly what the current view shows.

import type { SeriesResponse } from "./api.js";
import { activeColumn } from "./render.js";
import type { ViewState } from "./state.js";

function quote(field: string): string {
  return /[",\n]/.test(field) ? `"${field.replace(/"/g, '""')}"` : field;
}

export function viewToCsv(state: ViewState, resp: SeriesResponse): string {
  const rows: string[] = [];
  if (state.family === "topic") {
    const header = ["bucket"];
    const columns: Array<{ values: Array<number | null> }> = [];
    for (const entry of resp.series) {
      if (!entry.found || !entry.points || !entry.top4) continue;
      for (const label of entry.top4) {
        header.push(quote(`${entry.word}:${label}`));
        let values = entry.points[label] ?? [];
        if (state.zeroFill) values = values.map((v) => (v === null ? 0 : v));
        columns.push({ values });
      }
    }
    rows.push(header.join(","));
    resp.buckets.forEach((bucket, i) => {
      const cells = [quote(bucket)];
      for (const col of columns) {
        const v = col.values[i];
        cells.push(v === null || v === undefined ? "" : String(v));
      }
      rows.push(cells.join(","));
    });
  } else {
    const found = resp.series.filter((s) => s.found);
    rows.push(["bucket", ...found.map((s) => quote(s.word))].join(","));
    const columns = found.map((entry) => activeColumn(state, entry));
    resp.buckets.forEach((bucket, i) => {
      const cells = [quote(bucket)];
      for (const col of columns) {
        const v = col[i];
        cells.push(v === null || v === undefined ? "" : String(v));
      }
      rows.push(cells.join(","));
    });
  }
  return rows.join("\n") + "\n";
}

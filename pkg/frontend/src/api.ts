// Typed client for the series API. Responses are cached by request
// hash; in-flight races resolve by sequence number, so a stale response
// can never overwrite a newer view.
//
// zero_fill, sentiment mode and absolute-vs-per-million are all
// client-side transforms over the same response, so toggling them never
// refetches.

import type { Family, ViewState } from "./state.js";

export interface SeriesEntry {
  word: string;
  found: boolean;
  note?: string;
  top4?: string[];
  points: Record<string, Array<number | null>> | null;
}

export interface SeriesResponse {
  family: Family;
  buckets: string[];
  units: Record<string, string>;
  zero_fill: boolean;
  topic_labels?: string[];
  series: SeriesEntry[];
}

export interface Manifest {
  corpus_id: string;
  buckets: string[];
  families: Family[];
  vocab_size: number;
  built_unix: number;
  fingerprint: string;
}

export interface SeriesResult {
  data: SeriesResponse | null;
  error: string | null;
  /** true when a newer request finished first; drop this result */
  stale: boolean;
}

type FetchLike = (url: string) => Promise<{
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
}>;

export function seriesRequestHash(state: ViewState): string {
  // words order matters for legend order; range narrows the payload
  return JSON.stringify([state.words, state.family, state.from, state.to]);
}

export function seriesUrl(base: string, state: ViewState): string {
  const params = new URLSearchParams();
  params.set("words", state.words.join(","));
  params.set("family", state.family);
  if (state.from) params.set("from", state.from);
  if (state.to) params.set("to", state.to);
  if (state.family === "topic") params.set("full", "false");
  return `${base}/api/series?${params.toString()}`;
}

export class ApiClient {
  private cache = new Map<string, SeriesResponse>();
  private pending = new Map<string, Promise<{ data: SeriesResponse | null; error: string | null }>>();
  private seq = 0;
  private applied = 0;

  constructor(
    private base = "",
    private fetchFn: FetchLike = (url) => fetch(url),
  ) {}

  /** Number of network fetches issued (cache and in-flight misses). */
  fetchCount = 0;

  async series(state: ViewState): Promise<SeriesResult> {
    const hash = seriesRequestHash(state);
    const mySeq = ++this.seq;
    const cached = this.cache.get(hash);
    if (cached) {
      this.applied = Math.max(this.applied, mySeq);
      return { data: cached, error: null, stale: false };
    }
    let flight = this.pending.get(hash);
    if (!flight) {
      flight = this.fetchSeries(hash, state);
      this.pending.set(hash, flight);
    }
    const { data, error } = await flight;
    if (mySeq < this.applied) {
      return { data, error, stale: true };
    }
    this.applied = mySeq;
    return { data, error, stale: false };
  }

  private async fetchSeries(
    hash: string,
    state: ViewState,
  ): Promise<{ data: SeriesResponse | null; error: string | null }> {
    try {
      this.fetchCount += 1;
      const resp = await this.fetchFn(seriesUrl(this.base, state));
      const body = (await resp.json()) as SeriesResponse & { error?: string };
      if (!resp.ok) {
        return { data: null, error: body.error ?? `request failed with status ${resp.status}` };
      }
      this.cache.set(hash, body);
      return { data: body, error: null };
    } catch (e) {
      return {
        data: null,
        error: `service unreachable: ${e instanceof Error ? e.message : String(e)}`,
      };
    } finally {
      this.pending.delete(hash);
    }
  }

  async suggest(q: string, limit = 10): Promise<string[]> {
    try {
      const resp = await this.fetchFn(
        `${this.base}/api/suggest?q=${encodeURIComponent(q)}&limit=${limit}`,
      );
      if (!resp.ok) return [];
      const body = (await resp.json()) as { suggestions: string[] };
      return body.suggestions;
    } catch {
      return [];
    }
  }

  async manifest(): Promise<Manifest | null> {
    try {
      const resp = await this.fetchFn(`${this.base}/api/manifest`);
      if (!resp.ok) return null;
      return (await resp.json()) as Manifest;
    } catch {
      return null;
    }
  }
}

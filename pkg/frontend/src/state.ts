// View state and its URL round-trip. The URL query string is the single
// source of truth for a view, so copied links reproduce it exactly.

export type Family = "freq" | "dist" | "sent" | "topic";
export type SentimentMode = "mean_pos" | "pos_frac";

export const MAX_WORDS = 8;
export const FAMILIES: Family[] = ["freq", "dist", "sent", "topic"];

export interface ViewState {
  words: string[];
  family: Family;
  from: string | null;
  to: string | null;
  zeroFill: boolean;
  sentimentMode: SentimentMode;
  /** frequency tab: absolute counts instead of the per-million default */
  absolute: boolean;
}

export function defaultState(): ViewState {
  return {
    words: [],
    family: "freq",
    from: null,
    to: null,
    zeroFill: false,
    sentimentMode: "mean_pos",
    absolute: false,
  };
}

/** Add a word; rejects duplicates and enforces the word cap. */
export function addWord(
  state: ViewState,
  word: string,
): { state: ViewState; error: string | null } {
  const w = word.trim().toLowerCase();
  if (!w) return { state, error: null };
  if (state.words.includes(w)) {
    return { state, error: `"${w}" is already plotted` };
  }
  if (state.words.length >= MAX_WORDS) {
    return { state, error: `at most ${MAX_WORDS} words per plot; remove one first` };
  }
  return { state: { ...state, words: [...state.words, w] }, error: null };
}

export function removeWord(state: ViewState, word: string): ViewState {
  return { ...state, words: state.words.filter((w) => w !== word) };
}

/** Serialize only the parts that differ from the defaults. */
export function encodeState(state: ViewState): string {
  const params = new URLSearchParams();
  if (state.words.length) params.set("words", state.words.join(","));
  if (state.family !== "freq") params.set("family", state.family);
  if (state.from) params.set("from", state.from);
  if (state.to) params.set("to", state.to);
  if (state.zeroFill) params.set("zero_fill", "1");
  if (state.sentimentMode !== "mean_pos") params.set("sent_mode", state.sentimentMode);
  if (state.absolute) params.set("absolute", "1");
  return params.toString();
}

/** Tolerant inverse of encodeState: junk falls back to defaults. */
export function decodeState(query: string): ViewState {
  const params = new URLSearchParams(query);
  const state = defaultState();
  const words = (params.get("words") ?? "")
    .split(",")
    .map((w) => w.trim().toLowerCase())
    .filter((w) => w.length > 0);
  state.words = [...new Set(words)].slice(0, MAX_WORDS);
  const family = params.get("family");
  if (family && (FAMILIES as string[]).includes(family)) {
    state.family = family as Family;
  }
  state.from = params.get("from");
  state.to = params.get("to");
  state.zeroFill = params.get("zero_fill") === "1";
  if (params.get("sent_mode") === "pos_frac") state.sentimentMode = "pos_frac";
  state.absolute = params.get("absolute") === "1";
  return state;
}

// DOM wiring: every user action updates ViewState, the URL, and at most
// one API call; rendering is delegated to the pure render module.

import { ApiClient, type SeriesResponse } from "./api.js";
import { ColorAssigner } from "./colors.js";
import { viewToCsv } from "./csv.js";
import {
  renderBanner, renderChips, renderSuggestions, renderView,
} from "./render.js";
import {
  addWord, decodeState, encodeState, removeWord,
  type Family, type ViewState,
} from "./state.js";

const API_BASE = (window as { CHRONOLEX_API?: string }).CHRONOLEX_API ?? "";

const client = new ApiClient(API_BASE);
const colors = new ColorAssigner();

let state: ViewState = decodeState(location.search);
let lastResponse: SeriesResponse | null = null;
let buckets: string[] = [];

const $ = <T extends HTMLElement>(sel: string): T => {
  const el = document.querySelector<T>(sel);
  if (!el) throw new Error(`missing element ${sel}`);
  return el;
};

const bannerHost = $("#banner");
const chipsHost = $("#chips");
const viewHost = $("#view");
const suggestHost = $("#suggestions");
const wordInput = $<HTMLInputElement>("#word-input");
const messageHost = $("#message");
const fromSelect = $<HTMLSelectElement>("#from");
const toSelect = $<HTMLSelectElement>("#to");

function pushUrl() {
  const qs = encodeState(state);
  history.replaceState(null, "", qs ? `?${qs}` : location.pathname);
}

function setState(next: ViewState, refetch: boolean) {
  state = next;
  pushUrl();
  if (refetch) {
    void refresh();
  } else {
    paint();
  }
}

function paint() {
  chipsHost.innerHTML = renderChips(state, colors);
  viewHost.innerHTML = renderView(state, lastResponse, colors);
  document.querySelectorAll<HTMLButtonElement>(".tab").forEach((tab) => {
    tab.classList.toggle("active", tab.dataset.family === state.family);
  });
  $<HTMLInputElement>("#zero-fill").checked = state.zeroFill;
  $<HTMLSelectElement>("#sent-mode").value = state.sentimentMode;
  $<HTMLInputElement>("#absolute").checked = state.absolute;
  $("#sent-controls").style.display = state.family === "sent" ? "" : "none";
  $("#freq-controls").style.display = state.family === "freq" ? "" : "none";
  fromSelect.value = state.from ?? "";
  toSelect.value = state.to ?? "";
}

async function refresh() {
  bannerHost.innerHTML = "";
  if (!state.words.length) {
    lastResponse = null;
    paint();
    return;
  }
  const result = await client.series(state);
  if (result.stale) return;
  if (result.error) {
    bannerHost.innerHTML = renderBanner(result.error);
    const retry = document.getElementById("retry");
    retry?.addEventListener("click", () => void refresh());
    return;
  }
  lastResponse = result.data;
  paint();
}

function tryAddWord(word: string) {
  const { state: next, error } = addWord(state, word);
  messageHost.textContent = error ?? "";
  if (!error && next !== state) {
    wordInput.value = "";
    suggestHost.innerHTML = "";
    setState(next, true);
  }
}

// --- suggestions (debounced, one call per pause) ---

let suggestTimer: number | undefined;
wordInput.addEventListener("input", () => {
  window.clearTimeout(suggestTimer);
  const q = wordInput.value.trim().toLowerCase();
  if (!q) {
    suggestHost.innerHTML = "";
    return;
  }
  suggestTimer = window.setTimeout(async () => {
    const items = await client.suggest(q, 8);
    if (wordInput.value.trim().toLowerCase() === q) {
      suggestHost.innerHTML = renderSuggestions(items);
    }
  }, 150);
});

wordInput.addEventListener("keydown", (ev) => {
  if (ev.key === "Enter") {
    ev.preventDefault();
    tryAddWord(wordInput.value);
  }
});

suggestHost.addEventListener("click", (ev) => {
  const li = (ev.target as HTMLElement).closest<HTMLElement>(".suggestion");
  if (li?.dataset.word) tryAddWord(li.dataset.word);
});

chipsHost.addEventListener("click", (ev) => {
  const btn = (ev.target as HTMLElement).closest<HTMLElement>(".chip-remove");
  if (btn?.dataset.word) setState(removeWord(state, btn.dataset.word), true);
});

document.querySelectorAll<HTMLButtonElement>(".tab").forEach((tab) => {
  tab.addEventListener("click", () => {
    setState({ ...state, family: tab.dataset.family as Family }, true);
  });
});

// client-side transforms: no refetch
$<HTMLInputElement>("#zero-fill").addEventListener("change", (ev) => {
  setState({ ...state, zeroFill: (ev.target as HTMLInputElement).checked }, false);
});
$<HTMLSelectElement>("#sent-mode").addEventListener("change", (ev) => {
  const mode = (ev.target as HTMLSelectElement).value as ViewState["sentimentMode"];
  setState({ ...state, sentimentMode: mode }, false);
});
$<HTMLInputElement>("#absolute").addEventListener("change", (ev) => {
  setState({ ...state, absolute: (ev.target as HTMLInputElement).checked }, false);
});

// range controls refetch (narrower payload)
fromSelect.addEventListener("change", () => {
  setState({ ...state, from: fromSelect.value || null }, true);
});
toSelect.addEventListener("change", () => {
  setState({ ...state, to: toSelect.value || null }, true);
});
$("#reset-range").addEventListener("click", () => {
  setState({ ...state, from: null, to: null }, true);
});

// drag-brush over the chart selects a bucket range
let brushStart: number | null = null;
viewHost.addEventListener("pointerdown", (ev) => {
  if (!lastResponse || state.family === "topic") return;
  brushStart = ev.clientX;
});
viewHost.addEventListener("pointerup", (ev) => {
  if (brushStart === null || !lastResponse) return;
  const rect = viewHost.querySelector("svg")?.getBoundingClientRect();
  const start = brushStart;
  brushStart = null;
  if (!rect || Math.abs(ev.clientX - start) < 8) return;
  const axis = lastResponse.buckets;
  const toBucket = (clientX: number) => {
    const frac = Math.min(1, Math.max(0, (clientX - rect.left) / rect.width));
    return axis[Math.min(axis.length - 1, Math.round(frac * (axis.length - 1)))];
  };
  const a = toBucket(Math.min(start, ev.clientX));
  const b = toBucket(Math.max(start, ev.clientX));
  if (a !== b) setState({ ...state, from: a, to: b }, true);
});

$("#download").addEventListener("click", () => {
  if (!lastResponse) return;
  const blob = new Blob([viewToCsv(state, lastResponse)], { type: "text/csv" });
  const a = document.createElement("a");
  a.href = URL.createObjectURL(blob);
  a.download = `chronolex-${state.family}.csv`;
  a.click();
  URL.revokeObjectURL(a.href);
});

window.addEventListener("popstate", () => {
  state = decodeState(location.search);
  void refresh();
});

async function boot() {
  const manifest = await client.manifest();
  if (manifest) {
    buckets = manifest.buckets;
    for (const select of [fromSelect, toSelect]) {
      select.innerHTML =
        `<option value=""></option>` +
        buckets.map((b) => `<option value="${b}">${b}</option>`).join("");
    }
    $("#corpus-info").textContent =
      `${manifest.corpus_id}: ${manifest.vocab_size.toLocaleString()} keys, ` +
      `${buckets.length} buckets`;
  } else {
    bannerHost.innerHTML = renderBanner("service unreachable");
    document.getElementById("retry")?.addEventListener("click", () => void boot());
  }
  paint();
  await refresh();
}

void boot();

"""Read-only HTTP JSON API over a committed store.

Endpoints (GET only):
  /api/manifest                      store metadata
  /api/suggest?q=...&limit=...       prefix autocomplete
  /api/series?words=a,b&family=...   aligned series for up to 8 words
       [&from=...&to=...&zero_fill=true&full=true]

Responses are pure functions of (store, request). Absent points are
nulls unless zero_fill is set, so clients can tell "no data" from zero.
Unknown words are reported per word; only a request where no word exists
at all is a 404.
"""

from __future__ import annotations

import json
import signal
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from .base import SeriesNotFound
from .scores import TOPIC_LABELS
from .store import DIST, FREQ, SENT, TOPIC, Store

MAX_WORDS = 8

FAMILY_UNITS = {
    FREQ: {"absolute": "occurrences", "per_million": "per million tokens"},
    DIST: {"distance": "cosine distance to anchor bucket"},
    SENT: {"means": "mean classifier scores", "pos_frac": "positive-argmax fraction"},
    TOPIC: {"topics": "mean topic scores"},
}


class ApiError(Exception):
    def __init__(self, status: int, message: str, **extra):
        super().__init__(message)
        self.status = status
        self.payload = {"error": message, **extra}


def _bool_param(params: dict, name: str) -> bool:
    value = params.get(name, ["false"])[0].lower()
    if value in ("1", "true", "yes"):
        return True
    if value in ("0", "false", "no", ""):
        return False
    raise ApiError(400, f"malformed boolean parameter {name}={value!r}")


def _bucket_window(store: Store, params: dict) -> tuple[int, int]:
    labels = store.manifest.buckets
    lo, hi = 0, len(labels)
    if "from" in params:
        val = params["from"][0]
        if val not in labels:
            raise ApiError(400, f"unknown bucket in from={val!r}", buckets=labels)
        lo = labels.index(val)
    if "to" in params:
        val = params["to"][0]
        if val not in labels:
            raise ApiError(400, f"unknown bucket in to={val!r}", buckets=labels)
        hi = labels.index(val) + 1
    if lo >= hi:
        raise ApiError(400, "empty bucket range")
    return lo, hi


def _column(points: dict, idx_range, pick, zero_fill: bool, zero=0):
    out = []
    for i in idx_range:
        if i in points:
            out.append(pick(points[i]))
        else:
            out.append(zero if zero_fill else None)
    return out


def series_response(store: Store, params: dict) -> dict:
    words_raw = params.get("words", [""])[0]
    words = [w.strip().lower() for w in words_raw.split(",") if w.strip()]
    if not words:
        raise ApiError(400, "missing words parameter")
    if len(words) > MAX_WORDS:
        raise ApiError(400, f"at most {MAX_WORDS} words per request, got {len(words)}")
    family = params.get("family", [FREQ])[0].lower()
    if family not in FAMILY_UNITS:
        raise ApiError(400, f"unknown family {family!r}")
    zero_fill = _bool_param(params, "zero_fill")
    full = _bool_param(params, "full")
    lo, hi = _bucket_window(store, params)
    idx_range = range(lo, hi)

    series = []
    found_any = False
    for word in words:
        entry: dict = {"word": word, "found": False}
        record = None
        if word in store:
            try:
                record = store.get_series(word, family)
            except SeriesNotFound:
                record = None
        if record is None:
            entry["points"] = None
            entry["note"] = ("word not in vocabulary" if word not in store
                             else f"no {family} series for this word")
            series.append(entry)
            continue
        found_any = True
        entry["found"] = True
        pts = record.points
        if family == FREQ:
            entry["points"] = {
                "absolute": _column(pts, idx_range, lambda v: v[0], zero_fill),
                "per_million": _column(pts, idx_range, lambda v: v[1], zero_fill, 0.0),
            }
        elif family == DIST:
            entry["points"] = {
                "distance": _column(pts, idx_range, lambda v: v, zero_fill, 0.0),
            }
        elif family == SENT:
            entry["points"] = {
                "mean_neg": _column(pts, idx_range, lambda v: v[0], zero_fill, 0.0),
                "mean_neu": _column(pts, idx_range, lambda v: v[1], zero_fill, 0.0),
                "mean_pos": _column(pts, idx_range, lambda v: v[2], zero_fill, 0.0),
                "pos_frac": _column(pts, idx_range, lambda v: v[3], zero_fill, 0.0),
                "n_sampled": _column(pts, idx_range, lambda v: v[4], zero_fill),
            }
        else:
            top4 = list(record.top4)
            shown = top4 if not full else list(range(len(TOPIC_LABELS)))
            entry["top4"] = [TOPIC_LABELS[i] for i in top4]
            entry["points"] = {
                TOPIC_LABELS[i]: _column(pts, idx_range, lambda v, i=i: v[i], zero_fill, 0.0)
                for i in shown
            }
        series.append(entry)

    if not found_any:
        raise ApiError(404, "none of the requested words exist",
                       words=[s["word"] for s in series])
    response = {
        "family": family,
        "buckets": store.manifest.buckets[lo:hi],
        "units": FAMILY_UNITS[family],
        "zero_fill": zero_fill,
        "series": series,
    }
    if family == TOPIC:
        response["topic_labels"] = list(TOPIC_LABELS)
    return response


def suggest_response(store: Store, params: dict) -> dict:
    if "q" not in params:
        raise ApiError(400, "missing q parameter")
    q = params["q"][0].lower()
    try:
        limit = int(params.get("limit", ["10"])[0])
    except ValueError:
        raise ApiError(400, "malformed limit parameter") from None
    return {"q": q, "suggestions": store.prefix_search(q, limit)}


def manifest_response(store: Store) -> dict:
    m = store.manifest
    return {
        "corpus_id": m.corpus_id,
        "buckets": m.buckets,
        "families": m.families,
        "vocab_size": m.vocab_size,
        "built_unix": m.built_unix,
        "fingerprint": m.fingerprint,
    }


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server_version = "chronolex"

    def do_GET(self):
        url = urlparse(self.path)
        params = parse_qs(url.query, keep_blank_values=True)
        store: Store = self.server.store
        try:
            if url.path == "/api/series":
                self._send(200, series_response(store, params))
            elif url.path == "/api/suggest":
                self._send(200, suggest_response(store, params))
            elif url.path == "/api/manifest":
                self._send(200, manifest_response(store))
            elif self.server.static_dir and url.path.lstrip("/").find("..") < 0:
                self._send_static(url.path)
            else:
                self._send(404, {"error": f"no such endpoint {url.path}"})
        except ApiError as e:
            self._send(e.status, e.payload)
        except Exception as e:  # pragma: no cover - defensive
            self._send(500, {"error": f"{type(e).__name__}: {e}"})

    def _send(self, status: int, payload: dict):
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        if self.server.cors_origin:
            self.send_header("Access-Control-Allow-Origin", self.server.cors_origin)
        self.end_headers()
        self.wfile.write(body)

    def _send_static(self, path: str):
        root = Path(self.server.static_dir)
        target = root / (path.lstrip("/") or "index.html")
        if target.is_dir():
            target = target / "index.html"
        if not target.is_file():
            self._send(404, {"error": f"no such file {path}"})
            return
        ctype = {
            ".html": "text/html", ".js": "application/javascript",
            ".css": "text/css", ".json": "application/json",
            ".svg": "image/svg+xml", ".ico": "image/x-icon",
        }.get(target.suffix, "application/octet-stream")
        body = target.read_bytes()
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        if self.server.cors_origin:
            self.send_header("Access-Control-Allow-Origin", self.server.cors_origin)
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, fmt, *args):  # quiet by default
        if self.server.verbose:
            super().log_message(fmt, *args)


class SeriesServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, store: Store, bind=("127.0.0.1", 0), cors_origin=None,
                 static_dir=None, verbose=False):
        super().__init__(bind, _Handler)
        self.store = store
        self.cors_origin = cors_origin
        self.static_dir = static_dir
        self.verbose = verbose

    @property
    def address(self) -> str:
        host, port = self.server_address[:2]
        return f"http://{host}:{port}"


def serve(store_path, bind="127.0.0.1:8701", cors_origin=None,
          static_dir=None, verbose=True):
    """Open the store, serve until SIGINT/SIGTERM, drain, and return."""
    host, _, port = bind.rpartition(":")
    with Store(store_path) as store:
        server = SeriesServer(store, (host or "127.0.0.1", int(port)),
                              cors_origin=cors_origin, static_dir=static_dir,
                              verbose=verbose)
        stop = threading.Event()

        def _shutdown(signum, frame):
            stop.set()
            threading.Thread(target=server.shutdown, daemon=True).start()

        signal.signal(signal.SIGINT, _shutdown)
        signal.signal(signal.SIGTERM, _shutdown)
        print(f"serving {store_path} on {server.address}")
        server.serve_forever()
        server.server_close()

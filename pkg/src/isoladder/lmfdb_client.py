"""Resolve LMFDB isogeny-class labels to Weil polynomials, with caching and offline fixtures."""

import json
import os
import re
import tempfile
import threading
import urllib.error
import urllib.parse
import urllib.request
from importlib import resources
from pathlib import Path

from sympy import factorint

from .errors import BadLabel, NetworkUnavailable, UpstreamSchemaChange

DEFAULT_ENDPOINT = "https://www.lmfdb.org/api/av_fq_isog/"
FIXTURE_VERSION = "v1"
_LABEL_RE = re.compile(r"^(\d+)\.(\d+)\.([a-z]+(?:_[a-z]+)*)$")


def cache_dir():
    env = os.environ.get("ISOLADDER_CACHE_DIR")
    if env:
        return Path(env)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "isoladder" / "lmfdb"


def endpoint():
    return os.environ.get("ISOLADDER_LMFDB_ENDPOINT", DEFAULT_ENDPOINT)


def _decode_coeff(code):
    if code.startswith("a") and len(code) > 1:
        return -_decode_coeff(code[1:])
    v = 0
    for ch in code:
        v = 26 * v + (ord(ch) - ord("a"))
    return v


def _encode_coeff(a):
    if a < 0:
        return "a" + _encode_coeff(-a)
    digits = []
    while True:
        a, r = divmod(a, 26)
        digits.append(chr(ord("a") + r))
        if a == 0:
            break
    return "".join(reversed(digits))


def weil_polynomial(g, q, top):
    """Ascending coefficients of h from a_1..a_g using a_{2g-i} symmetry."""
    if len(top) != g:
        raise BadLabel(f"expected {g} coefficients, got {len(top)}")
    h = [0] * (2 * g + 1)
    h[2 * g] = 1
    for i, a in enumerate(top, start=1):
        h[2 * g - i] = a
    for i in range(g):
        # coefficient of x^i equals q^(g-i) times coefficient of x^(2g-i)
        h[i] = q ** (g - i) * h[2 * g - i]
    return h


def decode_label(label):
    """'g.q.code' -> (g, q, h) with h ascending."""
    m = _LABEL_RE.match(label or "")
    if not m:
        raise BadLabel(f"malformed label {label!r}")
    g, q = int(m.group(1)), int(m.group(2))
    codes = m.group(3).split("_")
    if g < 1 or len(codes) != g:
        raise BadLabel(f"label {label!r} needs {g} coefficient codes")
    fac = factorint(q)
    if q < 2 or len(fac) != 1:
        raise BadLabel(f"q = {q} is not a prime power")
    return g, q, weil_polynomial(g, q, [_decode_coeff(c) for c in codes])


def encode_label(g, q, h):
    top = [h[2 * g - i] for i in range(1, g + 1)]
    return f"{g}.{q}." + "_".join(_encode_coeff(a) for a in top)


def satisfies_weil_symmetry(g, q, h):
    """x^(2g) h(q/x) = q^g h(x)."""
    n = 2 * g
    return len(h) == n + 1 and all(h[n - i] * q ** (n - i) == q ** g * h[i] for i in range(n + 1))


def _record(label, h, g, q, extra=None):
    p = next(iter(factorint(q)))
    rec = {"label": label, "g": g, "q": q, "p": p, "h": [str(c) for c in h]}
    if extra:
        rec.update(extra)
    return rec


def _fixture(label):
    name = f"{label}.json"
    base = resources.files("isoladder") / "data" / "lmfdb" / FIXTURE_VERSION
    f = base / name
    if f.is_file():
        return json.loads(f.read_text())
    return None


def _cache_path(label):
    return cache_dir() / f"{label}.json"


def _write_atomic(path, data):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".json")
    with os.fdopen(fd, "w") as fh:
        json.dump(data, fh, sort_keys=True, indent=1)
    os.replace(tmp, path)


def _parse_upstream(label, payload):
    try:
        rows = payload["data"]
        row = rows[0]
        poly = [int(c) for c in row["poly"]]
        g, q = int(row["g"]), int(row["q"])
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise UpstreamSchemaChange(f"unexpected response for {label}: {exc}") from None
    if not satisfies_weil_symmetry(g, q, poly):
        raise UpstreamSchemaChange(f"upstream polynomial for {label} fails the Weil symmetry")
    extra = {}
    if "p_rank" in row:
        extra["is_ordinary"] = int(row["p_rank"]) == g
    return _record(label, poly, g, q, extra)


def _download(label, timeout=20):
    url = endpoint() + "?" + urllib.parse.urlencode({"label": label, "_format": "json"})
    try:
        with urllib.request.urlopen(url, timeout=timeout) as resp:
            payload = json.loads(resp.read().decode())
    except (urllib.error.URLError, OSError) as exc:
        raise NetworkUnavailable(f"cannot reach {url}: {exc}") from None
    except json.JSONDecodeError:
        raise UpstreamSchemaChange("response is not JSON") from None
    return _parse_upstream(label, payload)


_locks = {}
_locks_guard = threading.Lock()


def fetch(label, offline=False, downloader=None):
    """Record {label, g, q, p, h, ...}; cache first, then bundled fixtures, then the network."""
    decode_label(label)
    with _locks_guard:
        lock = _locks.setdefault(label, threading.Lock())
    with lock:
        path = _cache_path(label)
        if path.is_file():
            return json.loads(path.read_text())
        rec = _fixture(label)
        if rec is None:
            if offline:
                raise NetworkUnavailable(f"{label} is not cached and offline mode is on")
            rec = (downloader or _download)(label)
        h = [int(c) for c in rec["h"]]
        if not satisfies_weil_symmetry(rec["g"], rec["q"], h):
            raise UpstreamSchemaChange(f"record for {label} fails the Weil symmetry")
        if not path.is_file():
            _write_atomic(path, rec)
        return rec


def fixture_labels():
    base = resources.files("isoladder") / "data" / "lmfdb" / FIXTURE_VERSION
    return sorted(f.name[:-5] for f in base.iterdir() if f.name.endswith(".json"))

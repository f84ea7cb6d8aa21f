import functools
import time
import os
import tempfile

import pytest

os.environ.setdefault("ISOLADDER_CACHE_DIR", tempfile.mkdtemp(prefix="isoladder-test-cache-"))

from isoladder.algebra_core import make_algebra  # noqa: E402
from isoladder.lmfdb_client import decode_label  # noqa: E402
from isoladder.maximalization import maximal_order  # noqa: E402
from isoladder.orders import order_from_generators  # noqa: E402
from isoladder.ladders import singular_primes  # noqa: E402

CLASSDATA = os.path.join(os.path.dirname(__file__), "..", "src", "isoladder", "data", "classdata")


@functools.lru_cache(maxsize=None)
def frobenius_order(label):
    """(algebra, Z[pi, q/pi], O_K) for an LMFDB label."""
    g, q, h = decode_label(label)
    A = make_algebra(h, q)
    R = order_from_generators(A, [A.pi, A.q_over_pi()])
    return A, R, maximal_order(A)


def prime_above(R, ell, size=None):
    return next(m for m in singular_primes(R) if m.residue_char == ell
                and (size is None or m.residue_size == size))


def classdata_path(label):
    return os.path.abspath(os.path.join(CLASSDATA, label + ".json"))


@pytest.fixture
def setup_label():
    return frobenius_order


# ------------------------------------------------------------------ acceptance report

_criteria = {}
_WALL_LIMIT = 300.0
_start = time.monotonic()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and rep.passed):
        return
    n = mark.args[0]
    ok = rep.passed
    _criteria.setdefault(n, []).append((item.name, ok))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    tr = terminalreporter
    elapsed = time.monotonic() - _start
    if 13 in _criteria:
        _criteria[13].append((f"wall-clock {elapsed:.0f}s < {_WALL_LIMIT:.0f}s", elapsed < _WALL_LIMIT))
    tr.section("acceptance criteria")
    for n in sorted(_criteria):
        results = _criteria[n]
        bad = [name for name, ok in results if not ok]
        status = "FAIL" if bad else "PASS"
        extra = f" ({', '.join(bad)})" if bad else ""
        tr.write_line(f"criterion {n:2d}: {status}{extra}")

"""Shared fixtures plus a one-line-per-criterion acceptance summary."""

from __future__ import annotations

from collections import OrderedDict

import numpy as np
import pytest

ACCEPTANCE_TITLES = {
    1: "oracle equivalence, n <= 6",
    2: "exact expectations over the uniform ensemble",
    3: "uniform-ensemble Monte Carlo matches plotted p_s",
    4: "analytic bounds contain exact p_s for some r, n <= 6",
    5: "cluster census: T within S, ratio >= 0.9 at 16, nondecreasing",
    6: "combinatorics: f, g, growth constants",
    7: "Haar separation trend (EA vs LE)",
    8: "determinism across reruns and worker counts",
}

_outcomes: "OrderedDict[int, list[tuple[str, str]]]" = OrderedDict((k, []) for k in ACCEPTANCE_TITLES)


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(n): test belongs to acceptance criterion n")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    for key in report.keywords:
        if key.startswith("AC") and key[2:].isdigit():
            _outcomes[int(key[2:])].append((report.nodeid, report.outcome))


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("acceptance")
        if m is not None:
            item.keywords[f"AC{m.args[0]}"] = True


def pytest_terminal_summary(terminalreporter):
    if not any(_outcomes.values()):
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n, title in ACCEPTANCE_TITLES.items():
        runs = _outcomes[n]
        if not runs:
            tr.write_line(f"AC{n} NOT RUN  {title}")
            continue
        ok = all(o == "passed" for _, o in runs)
        failed = sum(o != "passed" for _, o in runs)
        tail = "" if ok else f" ({failed}/{len(runs)} checks failed)"
        tr.write_line(f"AC{n} {'PASS' if ok else 'FAIL'}  {title}{tail}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)

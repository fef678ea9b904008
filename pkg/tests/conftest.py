import re

import numpy as np
import pytest

from rosettefront import FrontBranch, Rosette, support_function


def oval():
    return Rosette(support_function(31, [(2, 2, 0), (5, 0, 1)]))


def oval_small():
    return Rosette(support_function(11, [(2, -0.5, 0), (3, 0, 1)]))


def two_rosette():
    return Rosette(support_function(11, [(1, 0, 1), (3, -7, 0), (4, 0, -0.5)], m=2))


def circle(radius: float = 1.0):
    return Rosette(support_function(radius))


ROSETTES = {"oval": oval, "oval_small": oval_small, "two_rosette": two_rosette}


@pytest.fixture(scope="session")
def ov():
    return oval()


@pytest.fixture(scope="session")
def ov_branch(ov):
    return FrontBranch(ov, 1)


@pytest.fixture(scope="session")
def ov2_branch():
    return FrontBranch(oval_small(), 1)


@pytest.fixture(scope="session")
def r2():
    return two_rosette()


@pytest.fixture(scope="session")
def r2_branch(r2):
    return FrontBranch(r2, 1)


@pytest.fixture(scope="session", params=sorted(ROSETTES))
def any_branch(request):
    return FrontBranch(ROSETTES[request.param](), 1)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


_CRITERION = re.compile(r"test_criterion_(\d+)")


def pytest_terminal_summary(terminalreporter):
    rows: dict[int, list[tuple[bool, str]]] = {}
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            if rep.when != "call" and outcome != "error":
                continue
            m = _CRITERION.search(getattr(rep, "nodeid", ""))
            if m:
                detail = dict(rep.user_properties).get("detail", "")
                rows.setdefault(int(m.group(1)), []).append((outcome == "passed", detail))
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(rows):
        verdict = "PASS" if all(ok for ok, _ in rows[n]) else "FAIL"
        detail = " | ".join(d for _, d in rows[n] if d)
        terminalreporter.write_line(f"criterion {n}: {verdict}  {detail}")

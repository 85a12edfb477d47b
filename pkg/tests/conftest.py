"""Shared fixtures, random model generators and the acceptance summary hook."""

from __future__ import annotations

import math

import numpy as np
import pytest

from tropsched.matrix import mat_add, mat_mul, tr_fn
from tropsched.scheduling import ProjectModel

NEG = -math.inf

# reference data used across the suite
REF_A = [[4, 0, None], [1, 3, -1], [0, -2, 2]]
REF_B = [[None, -2, 1], [0, None, 2], [-1, None, None]]
REF_C = [[None, None, -1], [None, None, 1], [None, None, None]]


def ref_model(**vectors) -> ProjectModel:
    return ProjectModel(start_finish=REF_A, start_start=REF_B, finish_start=REF_C, **vectors)


@pytest.fixture
def due_date_model():
    return ref_model(due_dates=[5, 5, 5])


@pytest.fixture
def finish_spread_model():
    return ref_model(deadlines=[6, 6, 6])


@pytest.fixture
def flow_time_model():
    return ref_model(release_times=[2, 2, 1])


@pytest.fixture
def makespan_model():
    return ProjectModel(
        start_finish=REF_A,
        release_times=[2, 2, 1],
        release_deadlines=[3, 3, 2],
        deadlines=[6, 6, 6],
    )


# random generators --------------------------------------------------------


def random_matrix(rng, n, lo=-5, hi=5, density=0.6, diag=None):
    """Integer matrix with entries in ``[lo, hi]``; others -inf with prob ``1 - density``."""
    m = rng.integers(lo, hi + 1, size=(n, n)).astype(float)
    m[rng.random((n, n)) > density] = NEG
    if diag is not None:
        np.fill_diagonal(m, rng.integers(diag[0], diag[1] + 1, size=n))
    return m


def random_precedence(rng, n, a, density=0.3):
    """Sparse start-start and finish-start lags with ``Tr(B + C A) <= 0``."""
    while True:
        b = random_matrix(rng, n, density=density)
        np.fill_diagonal(b, NEG)
        c = random_matrix(rng, n, density=density)
        np.fill_diagonal(c, NEG)
        if tr_fn(mat_add(b, mat_mul(c, a))) <= 0:
            return b, c


def random_model(rng, problem: str, n: int) -> ProjectModel:
    """Random integer model whose constraint vectors admit a feasible schedule."""
    a = random_matrix(rng, n, diag=(0, 5))
    if problem == "makespan":
        g = rng.integers(0, 6, size=n).astype(float)
        h = g + rng.integers(0, 4, size=n)
        ag = np.max(a + g[None, :], axis=1)
        f = ag + rng.integers(0, 4, size=n)
        return ProjectModel(start_finish=a, release_times=g, release_deadlines=h, deadlines=f)
    b, c = random_precedence(rng, n, a)
    if problem == "due-date":
        return ProjectModel(a, b, c, due_dates=rng.integers(0, 11, size=n))
    if problem == "finish-spread":
        return ProjectModel(a, b, c, deadlines=rng.integers(0, 11, size=n))
    return ProjectModel(a, b, c, release_times=rng.integers(0, 6, size=n))


# acceptance summary ---------------------------------------------------------

_CRITERIA: dict[int, tuple[str, list[str]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(num, title): acceptance criterion")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    marker = getattr(report, "criterion", None)
    if marker is None:
        return
    num, title = marker
    _, outcomes = _CRITERIA.setdefault(num, (title, []))
    outcomes.append(report.outcome)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is not None:
        report.criterion = (m.args[0], m.args[1])


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        title, outcomes = _CRITERIA[num]
        status = "PASS" if outcomes and all(o == "passed" for o in outcomes) else "FAIL"
        terminalreporter.write_line(f"AC{num} {status}: {title}")

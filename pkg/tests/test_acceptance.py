"""Acceptance criteria, one test (or group of tests) per criterion.

A PASS/FAIL line per criterion is printed in the terminal summary.
"""

from __future__ import annotations

import itertools
import json
import math
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from tropsched import cli
from tropsched.fileio import dump_project
from tropsched.matrix import (
    conjugate_transpose,
    identity,
    kleene_star,
    mat_add,
    mat_mul,
    mat_scale,
    spectral_radius,
    to_scalar,
    tr_fn,
    trace,
)
from tropsched.linsys import solve_closed_inequality
from tropsched.oracle import enumerate_theta
from tropsched.scheduling import ProjectModel, aggregate_precedence, instantiate, solve
from tropsched.tropopt import theta_trace_sum

from conftest import NEG, random_matrix, random_model

SAMPLES = Path(__file__).resolve().parents[1] / "samples"
TOL = 1e-9


def criterion(num, title):
    return pytest.mark.criterion(num, title)


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# AC1 ---------------------------------------------------------------------------


@criterion(1, "due-date reference: objective 2, x = (2,4,1), y = (6,7,3), < 1 s")
def test_ac1_due_date_reference():
    t0 = time.perf_counter()
    proc = subprocess.run(
        [sys.executable, "-m", "tropsched", "solve", "--problem", "due-date",
         "--input", str(SAMPLES / "due_date.json")],
        capture_output=True, check=False,
    )
    elapsed = time.perf_counter() - t0
    assert proc.returncode == 0, proc.stderr
    doc = json.loads(proc.stdout)
    assert doc["objective"] == 2
    assert doc["start"] == [2, 4, 1]
    assert doc["finish"] == [6, 7, 3]
    assert elapsed < 1.0


# AC2 ---------------------------------------------------------------------------


@criterion(2, "finish-spread reference: objective 4, alpha <= 6, x = (1,3,0), y = (5,6,2)")
def test_ac2_finish_spread_reference(capsys):
    code, out, _ = run_cli(capsys, "solve", "--problem", "finish-spread",
                           "--input", str(SAMPLES / "finish_spread.json"))
    assert code == 0
    doc = json.loads(out)
    assert doc["objective"] == 4
    assert doc["family"]["kind"] == "ray-scaled"
    assert doc["family"]["upper"] == [6]
    assert doc["parameter"] == [6]
    assert doc["start"] == [1, 3, 0]
    assert doc["finish"] == [5, 6, 2]


# AC3 ---------------------------------------------------------------------------


@criterion(3, "flow-time reference: lambda = theta = 4, generator, x = (2,4,1), y = (6,7,3)")
def test_ac3_flow_time_reference(capsys, flow_time_model):
    assert spectral_radius(flow_time_model.start_finish) == 4
    code, out, _ = run_cli(capsys, "solve", "--problem", "flow-time",
                           "--input", str(SAMPLES / "flow_time.json"))
    assert code == 0
    doc = json.loads(out)
    assert doc["objective"] == 4
    assert doc["family"]["generator"] == [[0, -2, 1], [2, 0, 3], [-1, -3, 0]]
    assert doc["parameter"] == [2, 2, 1]
    assert doc["start"] == [2, 4, 1]
    assert doc["finish"] == [6, 7, 3]


# AC4 ---------------------------------------------------------------------------


@criterion(4, "makespan reference: theta = 4, u in [(2,2,1), (2,3,2)], x2 in [2,3], y = (6, x2+3, 4)")
def test_ac4_makespan_reference(capsys, makespan_model):
    code, out, _ = run_cli(capsys, "solve", "--problem", "makespan",
                           "--input", str(SAMPLES / "makespan.json"))
    assert code == 0
    doc = json.loads(out)
    assert doc["objective"] == 4
    assert doc["family"]["lower"] == [2, 2, 1]
    assert doc["family"]["upper"] == [2, 3, 2]
    assert doc["family"]["start_lower"] == [2, 2, 2]
    assert doc["family"]["start_upper"] == [2, 3, 2]
    fam = solve(makespan_model, "makespan")
    rng = np.random.default_rng(4)
    lo, hi = fam.family.lower.ravel(), fam.family.upper.ravel()
    for u in [lo, hi, *(lo + rng.random(3) * (hi - lo) for _ in range(20))]:
        s = instantiate(fam, u)
        x2 = s.start[1]
        assert s.start[0] == 2 and s.start[2] == 2 and 2 <= x2 <= 3
        assert list(s.finish) == [6, x2 + 3, 4]


# AC5 ---------------------------------------------------------------------------

_AC5_START = {}


@criterion(5, "oracle-check agrees within 1e-9 on 200 random models per problem, < 2 min total")
@pytest.mark.parametrize("problem", ["due-date", "finish-spread", "flow-time", "makespan"])
def test_ac5_oracle_equivalence(capsys, tmp_path, problem):
    _AC5_START.setdefault("t0", time.perf_counter())
    rng = np.random.default_rng({"due-date": 51, "finish-spread": 52, "flow-time": 53, "makespan": 54}[problem])
    failures = []
    for k in range(200):
        n = 2 + k % 2
        model = random_model(rng, problem, n)
        path = tmp_path / f"m{k}.json"
        path.write_bytes(dump_project(model))
        code, out, err = run_cli(capsys, "oracle-check", "--problem", problem, "--input", str(path))
        doc = json.loads(out) if out else {}
        if code != 0 or not doc.get("agree"):
            failures.append((k, code, err.strip(), doc.get("solver"), doc.get("oracle")))
        elif problem == "due-date":
            assert doc["grid"]["step"] == "1/2"
    assert not failures, failures[:5]
    assert time.perf_counter() - _AC5_START["t0"] < 120


# AC6 ---------------------------------------------------------------------------


def _random_matrices(seed, count=500, sizes=(1, 2, 3, 4, 5)):
    rng = np.random.default_rng(seed)
    for k in range(count):
        yield rng, random_matrix(rng, sizes[k % len(sizes)], density=0.7)


def _nonpositive(a):
    lam = spectral_radius(a)
    if lam == NEG or lam <= 0:
        return a
    out = a.copy()
    out[np.isfinite(out)] -= math.ceil(lam)
    return out


@criterion(6, "algebra property suite on 500 random matrices each")
def test_ac6_star_fixpoint():
    for _, a in _random_matrices(61):
        a = _nonpositive(a)
        s = kleene_star(a)
        np.testing.assert_array_equal(mat_add(identity(a.shape[0]), mat_mul(a, s)), s)


@criterion(6, "algebra property suite on 500 random matrices each")
def test_ac6_conjugation():
    rng = np.random.default_rng(62)
    for k in range(500):
        n = 1 + k % 5
        x = rng.integers(-20, 21, size=(n, 1)).astype(float)
        xc = conjugate_transpose(x)
        assert to_scalar(mat_mul(xc, x)) == 0
        assert (mat_mul(x, xc) >= identity(n)).all()


@criterion(6, "algebra property suite on 500 random matrices each")
def test_ac6_trace_identities():
    for rng, a in _random_matrices(63):
        b = random_matrix(rng, a.shape[0], density=0.7)
        c = float(rng.integers(-10, 11))
        assert trace(mat_mul(a, b)) == trace(mat_mul(b, a))
        assert trace(mat_add(a, b)) == max(trace(a), trace(b))
        assert trace(mat_scale(c, a)) == c + trace(a)


@criterion(6, "algebra property suite on 500 random matrices each")
def test_ac6_closed_inequality():
    axes = np.arange(-4, 5, dtype=float)
    pts3 = np.array(list(itertools.product(axes, repeat=3)))
    for rng, a in _random_matrices(64, sizes=(3,)):
        a = _nonpositive(a)
        sol = solve_closed_inequality(a)
        for _ in range(5):
            u = rng.integers(-10, 11, size=(3, 1)).astype(float)
            x = sol.instantiate(u)
            assert (mat_mul(a, x) <= x).all()
        star = np.asarray(sol.generator)
        solves = (np.max(a[None] + pts3[:, None, :], axis=2) <= pts3).all(axis=1)
        fixed = (np.max(star[None] + pts3[:, None, :], axis=2) == pts3).all(axis=1)
        np.testing.assert_array_equal(solves, fixed)


# AC7 ---------------------------------------------------------------------------


def _max_closed_walk(d: np.ndarray) -> float:
    """Largest weight of a closed walk of length 1..n, by enumeration."""
    n = d.shape[0]
    best = NEG
    for k in range(1, n + 1):
        for walk in itertools.product(range(n), repeat=k):
            best = max(best, sum(d[walk[t], walk[(t + 1) % k]] for t in range(k)))
    return best


def _check_infeasible(capsys, tmp_path, model, name):
    expected = _max_closed_walk(np.asarray(aggregate_precedence(model)))
    assert expected > 0
    path = tmp_path / f"{name}.json"
    path.write_bytes(dump_project(model))
    for problem in ("due-date", "finish-spread", "flow-time"):
        code, out, err = run_cli(capsys, "solve", "--problem", problem, "--input", str(path))
        assert code == 1
        reported = json.loads(out)["validation"]["values"]["Tr(D)"]
        assert reported == pytest.approx(expected, abs=TOL)
        assert "Tr(D) =" in err
    code, out, _ = run_cli(capsys, "validate", "--input", str(path))
    assert code == 1


@criterion(7, "positive-cycle models exit 1 and report Tr(D)")
def test_ac7_constructed_counterexample(capsys, tmp_path):
    # a -> b -> c -> a start-start cycle of total lag 1
    model = ProjectModel(
        [[2, None, None], [None, 1, None], [None, None, 3]],
        start_start=[[None, 1, None], [None, None, 1], [-1, None, None]],
        due_dates=[4, 4, 4], deadlines=[9, 9, 9], release_times=[0, 0, 0],
    )
    assert tr_fn(aggregate_precedence(model)) == 1
    _check_infeasible(capsys, tmp_path, model, "cycle")


@criterion(7, "positive-cycle models exit 1 and report Tr(D)")
def test_ac7_random_perturbations(capsys, tmp_path):
    rng = np.random.default_rng(71)
    for k in range(50):
        n = 3
        base = random_model(rng, "due-date", n)
        b = np.array(base.start_start)
        c = np.array(base.finish_start)
        d = np.asarray(aggregate_precedence(base))
        # close a cycle i -> j -> i through a new start-start lag that makes it positive
        i, j = rng.choice(n, size=2, replace=False)
        back = d[j, i] if np.isfinite(d[j, i]) else 0.0
        if not np.isfinite(d[j, i]):
            b[j, i] = 0.0
        b[i, j] = max(b[i, j], -back + int(rng.integers(1, 4)))
        model = ProjectModel(
            base.start_finish, b, c,
            due_dates=base.due_dates, deadlines=rng.integers(0, 11, size=n), release_times=rng.integers(0, 6, size=n),
        )
        assert tr_fn(aggregate_precedence(model)) > 0
        _check_infeasible(capsys, tmp_path, model, f"p{k}")


# AC8 ---------------------------------------------------------------------------


@criterion(8, "theta recurrence equals literal word enumeration (100 pairs each of 3x3, 4x4)")
@pytest.mark.parametrize("n", [3, 4])
def test_ac8_theta_recurrence(n):
    rng = np.random.default_rng(80 + n)
    for _ in range(100):
        a = random_matrix(rng, n, density=0.6)
        b = random_matrix(rng, n, density=0.5)
        expected = enumerate_theta(a, b)
        got = theta_trace_sum(a, b)
        if expected == NEG:
            assert got == NEG
        else:
            assert got == pytest.approx(expected, abs=TOL)

"""Acceptance gate: every criterion at its stated tolerance.

Each test runs one criterion of the verify-paper suite and prints its
pass/fail line; tolerances are pinned inside the criteria themselves
(1e-9 for closed-form identities, 1e-6 through nets, paper constants for
the comparison bounds).
"""

import time

import pytest

from coarsegeom.acceptance import CRITERIA, RunConfig, verify_paper

CFG = RunConfig(seed=1729, horizon=8)

_BUDGETS = {1: 5.0, 2: 30.0, 4: 1.0, 6: 60.0}


@pytest.mark.parametrize("number", range(1, 14))
def test_criterion(number):
    fn = CRITERIA[number - 1]
    rows = []
    t0 = time.time()
    result = fn(CFG, rows)
    elapsed = time.time() - t0
    print(result.line())
    assert result.skipped is None, result.line()
    assert result.passed, f"{result.line()}  measured={result.measured}"
    if number in _BUDGETS:
        assert elapsed < _BUDGETS[number], f"criterion {number} took {elapsed:.1f}s"


def test_low_horizon_skips_and_fails_cleanly():
    rows = []
    shallow = RunConfig(seed=1729, horizon=2, quick=True)
    skipped = [fn(shallow, rows) for fn in (CRITERIA[9], CRITERIA[10], CRITERIA[11])]
    assert all(r.skipped == "horizon" for r in skipped)
    assert not any(r.passed for r in skipped)
    _, ok = verify_paper(shallow, echo=None)
    assert not ok  # skipped suites make the aggregate run fail


def test_verify_paper_aggregate(tmp_path):
    report, ok = verify_paper(RunConfig(seed=3, quick=True,
                                        out_dir=str(tmp_path), figures=False),
                              echo=None)
    assert ok == report["all_passed"]
    assert report["schema_version"] == 1
    assert len(report["criteria"]) == 13
    assert (tmp_path / "report.json").exists()
    assert (tmp_path / "profiles.csv").exists()

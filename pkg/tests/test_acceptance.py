"""Acceptance criteria 1-14 at their default sample sizes under the 2-of-3 seed policy."""

import pytest

from ipe_lab.experiments import CRITERIA, REGISTRY, run_experiment
from ipe_lab.harness import check_passes

RESULTS = {}


def _line(k, reports):
    verdict = "PASS" if all(r.passed for r in reports) else "FAIL"
    detail = "; ".join(f"{r.name} n={r.n} seeds={r.seeds} {r.runtime:.0f}s" for r in reports)
    return f"criterion {k:2d}: {verdict}  {detail}"


@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_criterion(k):
    reports = [run_experiment(name) for name in CRITERIA[k]]
    RESULTS[k] = _line(k, reports)
    print(RESULTS[k])
    failing = {r.name: {c: v for c, v in r.statistics.items() if not check_passes(v)} for r in reports if not r.passed}
    assert not failing, failing


def test_every_criterion_has_experiments():
    assert all(all(n in REGISTRY for n in names) for names in CRITERIA.values())

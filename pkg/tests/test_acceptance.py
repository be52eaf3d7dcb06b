"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines; the same
checks back ``qmoments verify``.
"""
import functools

import pytest

from qmoments import acceptance

from conftest import ACCEPTANCE_LINES

TITLES = {i: name for i, (name, _) in acceptance.CRITERIA.items()}
TITLES[1] = "moment identity"
TITLES[2] = "probability normalization"


@functools.lru_cache(maxsize=None)
def _group(i):
    return tuple(acceptance.CRITERIA[i][1]())


def checks_for(criterion):
    if criterion in (1, 2):
        checks = _group(1)
        is_norm = [c.check_name.startswith("normalization") for c in checks]
        return [c for c, n in zip(checks, is_norm) if n == (criterion == 2)]
    return list(_group(criterion))


def report(criterion, checks):
    ok = bool(checks) and all(c.passed for c in checks)
    worst = max((c.measured / c.tolerance if c.tolerance else c.measured) for c in checks)
    line = (f"{'PASS' if ok else 'FAIL'} criterion {criterion:2d} {TITLES[criterion]}: "
            f"{len(checks)} checks, worst measured/tolerance {worst:.2e}")
    print("\n" + line)
    ACCEPTANCE_LINES.append(line)
    for c in checks:
        if not c.passed:
            print(f"    failed {c.check_name}: measured {c.measured!r} tolerance {c.tolerance!r}")
    return ok


CRITERIA_IDS = [pytest.param(i, marks=pytest.mark.slow) if i == 10 else i
                for i in sorted(TITLES)]


@pytest.mark.parametrize("criterion", CRITERIA_IDS, ids=lambda i: f"criterion_{i:02d}")
def test_criterion(criterion):
    checks = checks_for(criterion)
    assert report(criterion, checks), [c for c in checks if not c.passed]

"""Acceptance criteria 1 to 11, one pass/fail line per criterion.

Run ``pytest tests/test_acceptance.py -v`` or ``python tests/test_acceptance.py``.
"""

import sys

import pytest

from comlab.verify import CRITERIA, run_criterion

TITLES = {
    1: "Schwarzschild mass law and ladder extrapolation",
    2: "Schwarzschild center of mass vanishes",
    3: "translated Schwarzschild center converges to z",
    4: "prescribed graph slice center and momentum",
    5: "prescribed York family center",
    6: "divergent graph slice oscillation law",
    7: "divergent York families",
    8: "Newtonian prescribed density",
    9: "Newtonian divergent density",
    10: "mean curvature oracle and CMC fit",
    11: "property suites",
}


def _summary(k, checks):
    ok = all(c.passed for c in checks)
    failed = "; ".join(f"{c.name}: {c.measured!s:.60}" for c in checks if not c.passed)
    line = f"CRITERION {k:>2} {'PASS' if ok else 'FAIL'}  {TITLES[k]}"
    return ok, line + (f"  [{failed}]" if failed else "")


@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_criterion(k, capsys):
    checks = run_criterion(k)
    ok, line = _summary(k, checks)
    with capsys.disabled():
        print("\n" + line)
        for c in checks:
            print("    " + c.line())
    assert ok, line


if __name__ == "__main__":
    results = []
    for k in sorted(CRITERIA):
        ok, line = _summary(k, run_criterion(k))
        print(line, flush=True)
        results.append(ok)
    sys.exit(0 if all(results) else 1)

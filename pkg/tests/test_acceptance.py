"""Acceptance gate: one line per criterion, PASS or FAIL."""

import pytest

from crwlf.acceptance import CRITERIA, format_line


@pytest.mark.parametrize("crit", CRITERIA, ids=[c.cid for c in CRITERIA])
def test_criterion(crit, capsys):
    import time

    t0 = time.perf_counter()
    out = crit.run()
    line = format_line(crit, out, time.perf_counter() - t0)
    with capsys.disabled():
        print("\n" + line)
    assert out.ok, line

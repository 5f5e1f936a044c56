"""Runs every acceptance criterion at its stated tolerance and time limit.

Each criterion prints one ``[PASS]``/``[FAIL]`` line; the lines are also
collected into a block at the end of the pytest run.
"""

import json

import pytest

from qvdc import acceptance


@pytest.mark.parametrize("number", sorted(acceptance.CRITERIA))
def test_criterion(number, capsys, acceptance_log):
    res = acceptance.run_criterion(number)
    line = res.line()
    with capsys.disabled():
        print(f"\n{line}")
    acceptance_log.append(line)
    assert res.passed, json.dumps(res.detail, default=str)[:2000]

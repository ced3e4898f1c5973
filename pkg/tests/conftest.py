"""Shared fixtures: identity watch over every invariant record, and the acceptance summary."""

import pytest

from singcol.invariants import InvariantRecord

RECORD_LOG = {"count": 0, "violations": []}
AC_LINES: dict[str, str] = {}


def _watch(rec: InvariantRecord) -> None:
    RECORD_LOG["count"] += 1
    if rec.mu != 2 * rec.delta - rec.r + 1 or rec.kappa != rec.mu + rec.mult - 1:
        RECORD_LOG["violations"].append(rec)


InvariantRecord.observers.append(_watch)


def report(key: str, ok: bool, detail: str = "") -> None:
    line = f"{key} {'PASS' if ok else 'FAIL'}" + (f": {detail}" if detail else "")
    AC_LINES[key] = line
    print(line)


@pytest.fixture
def ac_report():
    return report


def pytest_terminal_summary(terminalreporter):
    if AC_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(AC_LINES, key=lambda k: int(k[2:])):
            terminalreporter.write_line(AC_LINES[key])
    terminalreporter.write_line(
        f"invariant records constructed: {RECORD_LOG['count']}, "
        f"identity violations: {len(RECORD_LOG['violations'])}"
    )


def pytest_sessionfinish(session, exitstatus):
    if RECORD_LOG["violations"] and exitstatus == 0:
        session.exitstatus = 1


def pytest_collection_modifyitems(session, config, items):
    # the identity audit must see every record built by the rest of the run
    last = [i for i in items if i.name == "test_ac9_identity_invariants"]
    items[:] = [i for i in items if i not in last] + last

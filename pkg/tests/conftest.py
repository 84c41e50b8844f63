from fractions import Fraction

import pytest

ACCEPTANCE_MODULE = "test_acceptance.py"


def frac_vector(*parts):
    """Build a slope vector from ``(value, multiplicity)`` pairs or plain values."""
    out = []
    for p in parts:
        if isinstance(p, tuple):
            value, mult = p
            out.extend([Fraction(value)] * mult)
        else:
            out.append(Fraction(p))
    return tuple(out)


@pytest.fixture
def fv():
    return frac_vector


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion, in file order."""
    lines = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(rep, "nodeid", "")
            if ACCEPTANCE_MODULE in nodeid and getattr(rep, "when", "call") == "call":
                lines.append((rep.location[1] or 0, nodeid.split("::")[-1], rep.outcome))
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for _, name, outcome in sorted(lines):
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict}  {name}")

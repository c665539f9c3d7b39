"""Shared pytest wiring: one visible PASS/FAIL line per acceptance criterion.

test_acceptance.py names its tests test_c01_* .. test_c11_*; the summary
hook folds their outcomes into ACCEPTANCE lines at the end of the run so the
gate can be read without scanning the dot stream.
"""

import re

ACCEPTANCE_LABELS = {
    1: "geometric representing function",
    2: "log-mean density reproduction",
    3: "dual log mean, scalar and matrix",
    4: "closed-form matrix agreement",
    5: "canonical half-line form agreement",
    6: "axiom suites M1/M2/M3",
    7: "transpose calculus",
    8: "mean and symmetry predicates",
    9: "mixed-measure decomposition",
    10: "cantor moments and suites",
    11: "order without measure domination",
}

_NODE_RE = re.compile(r"test_acceptance\.py::test_c(\d{2})_")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    outcomes = {}
    for status in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(status, []):
            match = _NODE_RE.search(rep.nodeid)
            if match is None:
                continue
            num = int(match.group(1))
            ok = status == "passed" and outcomes.get(num, True)
            outcomes[num] = ok
    if not outcomes:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for num in sorted(ACCEPTANCE_LABELS):
        if num not in outcomes:
            continue
        verdict = "PASS" if outcomes[num] else "FAIL"
        label = ACCEPTANCE_LABELS[num]
        terminalreporter.write_line(f"ACCEPTANCE C{num} {label}: {verdict}")

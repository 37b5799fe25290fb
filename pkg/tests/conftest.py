"""Shared pytest configuration.

Prints a one-line PASS/FAIL verdict per acceptance criterion after the
run, collected from the tests in test_acceptance.py.
"""

import re

CRITERION_TITLES = {
    1: "hermitized spectrum equals signed singular values",
    2: "root process matches product eigenvalue roots",
    3: "pooled radial law matches the closed-form CDF",
    4: "product CLT variance and normality diagnostics",
    5: "exact cumulant decay and covariance limit",
    6: "cyclic moment sums match the large-n form",
    7: "truncated-unitary law, moments, CLT variance",
    8: "least singular value tails and median band",
    9: "intermediate singular value lower bound",
    10: "log-determinant identity residual",
    11: "resolvent swap residual is fifth order",
    12: "four-moment universality and local density",
    13: "analytic cross-checks and counting identities",
}

_PATTERN = re.compile(r"test_acceptance\.py::test_criterion_(\d+)")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    verdicts = {}
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            if getattr(rep, "when", "call") != "call" and outcome != "error":
                continue
            match = _PATTERN.search(getattr(rep, "nodeid", ""))
            if not match:
                continue
            num = int(match.group(1))
            verdicts[num] = verdicts.get(num, True) and outcome == "passed"
    if not verdicts:
        return
    terminalreporter.write_sep("=", "acceptance summary")
    for num in sorted(verdicts):
        status = "PASS" if verdicts[num] else "FAIL"
        title = CRITERION_TITLES.get(num, "")
        terminalreporter.write_line(f"ACCEPTANCE {num:02d} [{status}] {title}")

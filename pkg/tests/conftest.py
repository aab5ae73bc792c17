"""Shared pytest configuration: acceptance criteria summary lines."""

CRITERIA = {
    1: "exact 3-adic local integral 1/(n+1) for n = 1..200",
    2: "non-equidistribution gap log 2 at n = 200, places {arch, 3}",
    3: "archimedean gap bound and root-sum identity for T^n - 2 vs T = 1",
    4: "height = (1/d) log Mahler, root-based and quadrature routes",
    5: "log Mahler measure nonnegative on primitive polynomials",
    6: "finite local Mahler term equals v_p(leading) log p exactly",
    7: "canonical height: squaring map, preperiodic zero, functional equation",
}


def _criterion_number(nodeid: str):
    marker = "test_criterion_"
    index = nodeid.find(marker)
    if index < 0:
        return None
    digits = ""
    for ch in nodeid[index + len(marker):]:
        if not ch.isdigit():
            break
        digits += ch
    return int(digits) if digits else None


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    outcomes = {}
    for status in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(status, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py" not in nodeid:
                continue
            if getattr(report, "when", "call") not in ("call", "setup"):
                continue
            number = _criterion_number(nodeid)
            if number is None:
                continue
            verdict = "PASS" if status == "passed" else "FAIL"
            if outcomes.get(number) != "FAIL":
                outcomes[number] = verdict
    if not outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(outcomes):
        label = CRITERIA.get(number, "")
        terminalreporter.write_line(
            f"[criterion {number}] {outcomes[number]}: {label}"
        )

"""Collects acceptance verdicts and prints one line per criterion at the end."""

ACCEPTANCE = []


def record(criterion, label, value, bound, ok, relation="<"):
    ACCEPTANCE.append((criterion, label, value, bound, bool(ok), relation))
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for criterion, label, value, bound, ok, relation in sorted(ACCEPTANCE, key=lambda r: r[0]):
        tag = "PASS" if ok else "FAIL"
        tr.write_line(f"[{tag}] criterion {criterion}: {label:<52} {value:.3e} {relation} {bound:.3g}")

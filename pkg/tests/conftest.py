CRITERIA = {
    1: "ordering rule for comparable diagrams",
    2: "ground diagram and ground multiplicity",
    3: "nonpositive off-diagonal, connected hopping graph",
    4: "positive, nondegenerate relative ground states",
    5: "highest-weight identification",
    6: "free-fermion limit and periodic dispersion",
    7: "combinatorics anchors",
    8: "oracle equivalence",
    9: "determinism",
}


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import SUMMARY
    except ImportError:
        return
    if not SUMMARY:
        return
    terminalreporter.section("acceptance criteria")
    for n, title in CRITERIA.items():
        if n in SUMMARY:
            ok, detail = SUMMARY[n]
            terminalreporter.write_line(f"criterion {n} {'PASS' if ok else 'FAIL'}: {title} ({detail})")
        else:
            terminalreporter.write_line(f"criterion {n} NOT RUN: {title}")

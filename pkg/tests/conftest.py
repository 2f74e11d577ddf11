import re

import pytest

# criterion number -> (description, passed, measured detail)
_ACCEPTANCE: dict[int, list] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = re.match(r"test_criterion_(\d+)", item.name)
    if not m or rep.when == "teardown" and rep.passed:
        return
    doc = (item.function.__doc__ or item.name).strip().splitlines()[0]
    entry = _ACCEPTANCE.setdefault(int(m[1]), [doc, True, ""])
    if rep.failed or rep.skipped:
        entry[1] = False
    details = [v for k, v in item.user_properties if k == "measured"]
    if details:
        entry[2] = details[-1]


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for k in sorted(_ACCEPTANCE):
        doc, passed, detail = _ACCEPTANCE[k]
        line = f"criterion {k:2d}: {'PASS' if passed else 'FAIL'}  {doc}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)

"""Shared test plumbing: the acceptance-criterion registry and its
end-of-run summary (one PASS/FAIL line per criterion)."""

import functools

_ACCEPTANCE = {}


def record_criterion(num: int, desc: str, passed: bool, detail: str = ""):
    _ACCEPTANCE[num] = (desc, passed, detail)


def criterion(num: int, desc: str):
    """Wrap an acceptance test so its outcome lands in the summary table
    even when it dies on an exception."""
    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                detail = fn(*args, **kwargs)
            except AssertionError as exc:
                record_criterion(num, desc, False, str(exc).splitlines()[0])
                raise
            except Exception as exc:
                record_criterion(num, desc, False, f"error: {exc!r}")
                raise
            record_criterion(num, desc, True, detail or "")
        return wrapper
    return deco


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_ACCEPTANCE):
        desc, ok, detail = _ACCEPTANCE[num]
        line = f"criterion {num:2d} [{'PASS' if ok else 'FAIL'}] {desc}"
        if detail:
            line += f" -- {detail}"
        terminalreporter.write_line(line)

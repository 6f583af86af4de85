import weakref

import pytest

from intruder.terms import TermBank

_banks: list = []
_orig_init = TermBank.__init__


def _tracking_init(self, *args, **kwargs):
    _orig_init(self, *args, **kwargs)
    _banks.append(weakref.ref(self))


TermBank.__init__ = _tracking_init

# criterion number -> (passed, detail); filled by test_acceptance
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture(autouse=True)
def bank_invariants():
    """Every bank touched by a test must still be canonically flattened."""
    start = len(_banks)
    yield
    for ref in _banks[start:]:
        bank = ref()
        if bank is not None:
            bank.check_invariants()
    del _banks[start:]


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")

from __future__ import annotations

import pytest

from grexpand import kernels


@pytest.fixture(params=["compiled", "python"])
def backend(request, monkeypatch):
    """Run a test once per kernel backend (compiled is skipped when unavailable)."""
    if request.param == "compiled":
        if kernels._ckernels is None:
            pytest.skip("compiled kernels not built")
    else:
        monkeypatch.setattr(kernels, "_ckernels", None)
    return request.param


# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")

"""Shared settings and the per-criterion acceptance summary."""

import os

from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=int(os.environ.get("HYPOTHESIS_EXAMPLES", "60")), deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

ACCEPTANCE: dict[int, tuple[str, str, str]] = {}


def record_criterion(number: int, title: str, ok: bool, detail: str = "") -> None:
    ACCEPTANCE[number] = (title, "PASS" if ok else "FAIL", detail)
    print(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}  {detail}".rstrip())


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, verdict, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {verdict}  {title}  {detail}".rstrip())

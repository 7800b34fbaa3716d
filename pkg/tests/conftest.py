import os

from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=40, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.register_profile("thorough", max_examples=300, deadline=None, suppress_health_check=list(HealthCheck))
settings.load_profile(os.environ.get("SPECFILT_HYPOTHESIS_PROFILE", "default"))

# acceptance criteria register their verdicts here; printed at session end
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, note = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:>2}: {'PASS' if ok else 'FAIL'}  {note}")

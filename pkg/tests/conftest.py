import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

ACCEPTANCE: dict[int, tuple[str, str, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        title, status, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:>2} {status}: {title}" + (f" ({detail})" if detail else ""))

import shutil
import sys
from pathlib import Path

import pytest

TESTS = Path(__file__).resolve().parent
E2E = TESTS / "fixtures" / "e2e"

# make tests/oracle.py importable as a plain module
sys.path.insert(0, str(TESTS))


@pytest.fixture(scope="session")
def e2e_dir() -> Path:
    return E2E


@pytest.fixture(scope="session")
def e2e_run(tmp_path_factory) -> Path:
    """Full pipeline over the hand-auditable fixture, run once per session."""
    from commdiff.config import load_config
    from commdiff.report import run_pipeline

    cfg = load_config(E2E / "pipeline.cfg").with_output_dir(tmp_path_factory.mktemp("e2e") / "out")
    return run_pipeline(cfg).out_dir


@pytest.fixture
def e2e_copy(tmp_path) -> Path:
    """Writable copy of the fixture directory."""
    dst = tmp_path / "e2e"
    shutil.copytree(E2E, dst, ignore=shutil.ignore_patterns("make_oracle_sheet.py", "oracle.json"))
    return dst


_ACCEPTANCE: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(n, title): acceptance criterion number and title")


@pytest.hookimpl(wrapper=True)
def pytest_runtest_makereport(item, call):
    report = yield
    marker = item.get_closest_marker("acceptance")
    if marker is not None and (report.when == "call" or report.failed):
        n, title = marker.args
        entry = _ACCEPTANCE.setdefault(n, {"title": title, "ok": True, "details": []})
        entry["ok"] = entry["ok"] and report.passed
        entry["details"] += [v for k, v in item.user_properties if k == "detail"]
    return report


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        e = _ACCEPTANCE[n]
        line = f"[{'PASS' if e['ok'] else 'FAIL'}] {n}. {e['title']}"
        if e["details"]:
            line += " | " + "; ".join(dict.fromkeys(e["details"]))
        terminalreporter.write_line(line)

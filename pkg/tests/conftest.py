import os
from pathlib import Path

import pytest

from e2page.ext_engine import EngineConfig, ExtEngine
from e2page.names_registry import Registry
from e2page.products import Products

# Resolutions are cached here so repeated runs skip the expensive builds.
CACHE = os.environ.get("E2PAGE_CACHE") or str(Path(__file__).resolve().parents[1] / ".cache" / "e2page")


@pytest.fixture(scope="session")
def cache_dir():
    Path(CACHE).mkdir(parents=True, exist_ok=True)
    return CACHE


@pytest.fixture(scope="session")
def engine(cache_dir):
    return ExtEngine(EngineConfig(s_max=9, t_max=40, cache_dir=cache_dir, keep_qi_below=70))


@pytest.fixture(scope="session")
def products(engine):
    return Products(engine)


@pytest.fixture(scope="session")
def registry(engine, products):
    return Registry(engine, products=products)


@pytest.fixture
def small_engine():
    """Uncached engine for tests that must not touch shared state."""
    return ExtEngine(EngineConfig(s_max=5, t_max=20))


ACCEPTANCE: dict = {}


@pytest.fixture
def report_criterion(capsys):
    """Print and remember one pass/fail line per acceptance criterion."""
    def report(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE[number] = line
        with capsys.disabled():
            print("\n" + line)
        return ok
    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])

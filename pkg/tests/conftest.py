import pytest

from orbitzeta.potential import Potential
from orbitzeta.shifts import tile_shift
from orbitzeta.subdivision import DATA_DIR, load_rule, shipped_rules

RULES = shipped_rules()


@pytest.fixture(scope="session")
def p2():
    return load_rule("pillow2x2")


@pytest.fixture(scope="session")
def ts2(p2):
    return tile_shift(p2)


@pytest.fixture(scope="session", params=RULES)
def any_rule(request):
    return load_rule(request.param)


@pytest.fixture(scope="session")
def mild():
    return Potential.load(DATA_DIR / "potential_mild.json")


@pytest.fixture(scope="session")
def spread():
    return Potential.load(DATA_DIR / "potential_spread.json")


@pytest.fixture(scope="session")
def k3():
    return Potential.load(DATA_DIR / "potential_k3.json")


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.RESULTS):
        ok, detail = mod.RESULTS[k]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {k}: {detail}")

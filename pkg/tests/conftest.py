import pytest

from kanca.automaton import Automaton, RuleTable
from kanca.group import GroupSpec

Z = GroupSpec((0,))
Z2 = GroupSpec((2,))
Z3 = GroupSpec((3,))
Z2xZ2 = GroupSpec((2, 2))
TRIVIAL = GroupSpec(())


def and_rule(arity=2):
    return RuleTable.from_function(lambda *xs: str(int(all(x == "1" for x in xs))), "01", arity)


def xor_rule():
    return RuleTable.from_entries({("0", "0"): "0", ("0", "1"): "1", ("1", "0"): "1", ("1", "1"): "0"})


def make(group, offsets, rule, states="01"):
    return Automaton(group, tuple(states), tuple(group.element(o) for o in offsets), rule)


@pytest.fixture
def and_z():
    return make(Z, [0, 1], and_rule())


@pytest.fixture
def and_z2():
    return make(Z2, [0, 1], and_rule())


@pytest.fixture
def and_z3():
    return make(Z3, [0, 1], and_rule())


@pytest.fixture
def identity_trivial():
    return make(TRIVIAL, [()], RuleTable.from_entries({("0",): "0", ("1",): "1"}))


# -- acceptance reporting ----------------------------------------------------------

_acceptance = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(n, title): acceptance criterion number and title")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or rep.when != "call" and not (rep.when == "setup" and rep.failed):
        return
    n, title = mark.args
    prev = _acceptance.get(n, (title, True))
    _acceptance[n] = (title, prev[1] and rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_acceptance):
        title, ok = _acceptance[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {n:>2}. {title}")

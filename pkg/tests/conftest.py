import itertools

import pytest

from doflab import CsitProfile

# Worked examples: (config, csit, predicted d2).
EXAMPLES = [
    ((1, 4, 1, 3), CsitProfile(beta12=0.5), 1.0),
    ((3, 4, 1, 3), CsitProfile(beta12=2 / 3), 2.0),
    ((2, 4, 1, 3), CsitProfile(beta12=0.75), 1.75),
    ((1, 4, 2, 3), CsitProfile(beta12=0.5), 2.0),
    ((4, 4, 1, 3), CsitProfile(beta12=5 / 6, beta21=0.5), 2.5),
]


def grid_configs(top=6, ordered=True):
    for m1, m2, n1, n2 in itertools.product(range(1, top + 1), repeat=4):
        if ordered and n1 > n2:
            continue
        yield (m1, m2, n1, n2)


@pytest.fixture(scope="session")
def examples():
    return EXAMPLES


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)

import math

import pytest

from regge.oracle import solve_eigenvalue
from regge.potential import PowerLaw
from regge.reference import MARTIN_ROWS

_criteria_lines: list[str] = []


def record_criterion(label: str, ok: bool, detail: str = "") -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {label}" + (f" -- {detail}" if detail else "")
    _criteria_lines.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _criteria_lines:
        terminalreporter.section("acceptance criteria")
        for line in _criteria_lines:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def martin():
    return PowerLaw(1.0, 0.1)


@pytest.fixture(scope="session")
def harmonic():
    return PowerLaw(1.0, 2.0)


@pytest.fixture(scope="session")
def martin_energies(martin):
    """Oracle energies of the reference states, keyed by (n, l)."""
    return {(n, l): solve_eigenvalue(martin, 1.0, 1.0, l, n).E for n, l, *_ in MARTIN_ROWS}


OMEGA_HO = math.sqrt(2.0)  # sqrt(2A/m) for A = m = 1

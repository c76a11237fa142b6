import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from qtc_rotor import RotorSpec, SimulationConfig, orientation_tracks  # noqa: E402

# fluoromethane, internal units (energies / B)
B_CM, C_CM, MU_D = 5.182, 0.852, 1.847
C_RATIO = C_CM / B_CM


def fluoromethane(jmax=12, kind="symmetric", C=C_RATIO):
    return RotorSpec(kind, 1.0, C, 1.0, jmax)


def track_config(state, steps=10_000, jmax=12, kind="symmetric", C=C_RATIO, **kw):
    return SimulationConfig(fluoromethane(jmax, kind, C), tuple(state), orientation_tracks(5.0), 5.0, steps, **kw)


@pytest.fixture
def rng():
    return np.random.default_rng(20211015)


def random_state(basis, rng, interior=True):
    psi = rng.normal(size=basis.dim) + 1j * rng.normal(size=basis.dim)
    if interior:
        psi[basis.J == basis.jmax] = 0.0
    return psi / np.linalg.norm(psi)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report():
    """Record one PASS/FAIL line for an acceptance criterion and return the verdict."""
    def _report(criterion: int, passed: bool, detail: str) -> bool:
        line = f"criterion {criterion}: {'PASS' if passed else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed
    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hsiband.datamodel import SyntheticSpec, generate_synthetic  # noqa: E402


@pytest.fixture
def planted():
    """64x64, 8 classes, 5 signal / 10 noise / 5 duplicate bands."""
    spec = SyntheticSpec(64, 64, 8, n_signal=5, n_noise=10, n_redundant=5,
                         noise_sigma=0.05 * 65535, seed=3)
    return generate_synthetic(spec)


ACCEPTANCE_RESULTS = {}


def record_acceptance(number, title, passed, detail=""):
    ACCEPTANCE_RESULTS[number] = (title, passed, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        title, passed, detail = ACCEPTANCE_RESULTS[number]
        status = {True: "PASS", False: "FAIL", None: "SKIP"}[passed]
        terminalreporter.write_line(f"[{status}] {number}. {title}: {detail}")

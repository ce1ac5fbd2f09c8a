import numpy as np
import pytest

from fsclust import _pykernels

try:
    from fsclust import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS = [pytest.param(_pykernels, id="python")]
if _ckernels is not None:
    BACKENDS.append(pytest.param(_ckernels, id="cython"))


@pytest.fixture(params=BACKENDS)
def kernels(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20190228)


ACCEPTANCE = {}


@pytest.fixture
def criterion(request):
    """Record a pass/fail line for the acceptance summary."""

    def record(number, passed, detail):
        status = "SKIP" if passed is None else "PASS" if passed else "FAIL"
        ACCEPTANCE[number] = (status, detail)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        status, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {detail}")

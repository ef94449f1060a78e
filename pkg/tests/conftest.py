import functools

import numpy as np
import pytest

from jetgeom.inputs import ScalarField, TemporalMetric
from jetgeom.validation import cross_validate

# fields shared by the cross-validation tests
_Q = np.array([[0.6, 0.2, -0.1, 0.0],
               [0.2, -0.4, 0.3, 0.1],
               [-0.1, 0.3, 0.5, -0.2],
               [0.0, 0.1, -0.2, 0.3]])

SIGMAS = {
    "linear": ScalarField.linear([0.7, -0.3, 0.2, 0.5]),
    "quadratic": ScalarField.quadratic(_Q, [0.1, -0.2, 0.3, 0.05]),
    "cubic": ScalarField.polynomial([
        ((1, 0, 0, 0), 0.5), ((0, 1, 1, 0), -0.4), ((2, 0, 0, 1), 0.3),
        ((0, 0, 3, 0), 0.2), ((1, 1, 1, 0), -0.25), ((0, 0, 0, 2), 0.15),
    ]),
}
METRICS = {"unit": TemporalMetric.constant(1.0), "t2": TemporalMetric.power(2.0)}


@functools.lru_cache(maxsize=None)
def xval_report(sigma_name, h_name, samples=100, seed=2024):
    return cross_validate(SIGMAS[sigma_name], METRICS[h_name], samples, seed)


@pytest.fixture
def measure(request):
    """Record a named measurement shown in the acceptance summary."""

    def record(name, value):
        request.node.user_properties.append((name, value))

    return record


_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    number, title = marker.args
    ok = call.excinfo is None
    _criteria[number] = (title, ok, item.user_properties)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, ok, props = _criteria[number]
        detail = ", ".join(f"{k}={v:.3g}" if isinstance(v, float) else f"{k}={v}"
                           for k, v in props)
        line = f"{'PASS' if ok else 'FAIL'}  {number:2d}. {title}"
        terminalreporter.write_line(line + (f"  [{detail}]" if detail else ""))

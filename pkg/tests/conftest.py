import functools

import numpy as np
import pytest

from lattice_fill import _fallback
from lattice_fill.core import SetupSpec

try:
    from lattice_fill import _kernels
except ImportError:  # extension not built
    _kernels = None

BACKENDS = [pytest.param(_fallback, id="python")]
if _kernels is not None:
    BACKENDS.append(pytest.param(_kernels, id="compiled"))


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


def reference_spec(**kw) -> SetupSpec:
    base = dict(L=40, L_B=4096, g=0.5, t_B=1.0, gamma=1.0, m=21, beta=1.0, mu=-2.01, statistics="boson")
    base.update(kw)
    return SetupSpec.from_dict(base)


@functools.lru_cache(maxsize=None)
def recipe_result(name: str):
    """Run a harness recipe once per test session."""
    from lattice_fill.harness import make_config, run

    return run(make_config(name))


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240611)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)

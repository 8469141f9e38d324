import numpy as np
import pytest

from gtrmodel.core import RatioSolution
from gtrmodel.datasets import BUILTIN
from gtrmodel.inversion import concretize, fit_ratios

# ratios as printed for the two polls (4 decimals)
PRINTED_RATIOS = {
    "clinton-gore": (0.1545, 0.2237, 0.6316, -0.2961, 0.2271, 0.5367),
    "rose-jackson": (-0.0995, 0.2245, 0.6224, 0.4369, 0.4023, 0.4578),
}
# parameters at eps_a = 1/2 as printed (2 decimals): eps_b, d_a, d_b, cos_theta, cos_theta_a, cos_theta_b
PRINTED_PARAMS = {
    "clinton-gore": dict(eps_b=0.59, d_a=0.08, d_b=-0.17, cos_theta=0.32, cos_theta_a=0.11, cos_theta_b=0.13),
    "rose-jackson": dict(eps_b=0.68, d_a=-0.05, d_b=0.30, cos_theta=0.31, cos_theta_a=0.11, cos_theta_b=0.27),
}


def ratios_from_brackets(a, b, b2, c, a1, a2):
    """Inverse of RatioSolution.brackets()."""
    da = 0.5 * (a2 - a1)
    db = 0.5 * (b2 - b)
    return RatioSolution(
        da_over_ea=da,
        costhetaa_over_ea=a + da,
        costheta_over_ea=0.5 * (a1 + a2),
        db_over_eb=db,
        costhetab_over_eb=c + db,
        costheta_over_eb=0.5 * (b + b2),
    )


def random_ratios(rng, margin=0.01):
    return ratios_from_brackets(*rng.uniform(-1 + margin, 1 - margin, size=6))


@pytest.fixture(params=sorted(BUILTIN))
def dataset(request):
    return BUILTIN[request.param]


@pytest.fixture
def cg_ratios():
    return fit_ratios(BUILTIN["clinton-gore"].table())


@pytest.fixture
def cg_params(cg_ratios):
    return concretize(cg_ratios, 0.5)


@pytest.fixture
def rng():
    return np.random.default_rng(20161015)


# -- acceptance reporting ----------------------------------------------------

_ACCEPTANCE = {}


@pytest.fixture
def acceptance():
    """Record ``(criterion, ok, detail)``; the outcome is printed in the terminal summary."""

    def record(number, ok, detail):
        _ACCEPTANCE[number] = (bool(ok), detail)
        return bool(ok)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")

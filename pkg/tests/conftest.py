import pytest

from corrdyn.core import EscapeConfig, Exponent
from corrdyn.misiurewicz import SignSequence, solve_misiurewicz_42


@pytest.fixture(scope="session")
def report_m2():
    """The preperiod-2 period-1 point at -2 of the two-branch square family."""
    seq = SignSequence(signs=(1, 1), preperiod=2, period=1)
    return solve_misiurewicz_42(seq, -2.1)


@pytest.fixture(scope="session")
def cfg42():
    return EscapeConfig.for_parameter(Exponent(4, 2), 2.2)
